use serde::{Deserialize, Serialize};

use super::multipoly::MultiPoly;
use crate::arith::{format_rational, parse_rational};
use crate::error::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
struct TermJson {
    c: String,
    e: Vec<u32>,
}

#[derive(Debug, Serialize, Deserialize)]
struct PolyJson {
    vars: Vec<String>,
    terms: Vec<TermJson>,
}

impl Serialize for MultiPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let n = self.vars().len();
        PolyJson {
            vars: self.vars().to_vec(),
            terms: self
                .terms()
                .map(|(m, c)| TermJson {
                    c: format_rational(c),
                    e: m.exponents(n),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MultiPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = PolyJson::deserialize(d)?;
        from_json_parts(raw).map_err(serde::de::Error::custom)
    }
}

fn from_json_parts(raw: PolyJson) -> Result<MultiPoly> {
    if raw.vars.len() > super::monomial::MAX_VARS {
        return Err(Error::Parse("too many variables".into()));
    }
    for (i, v) in raw.vars.iter().enumerate() {
        if raw.vars[..i].contains(v) {
            return Err(Error::Parse(format!("variable {v} listed twice")));
        }
    }
    let mut terms = Vec::with_capacity(raw.terms.len());
    for t in raw.terms {
        if t.e.len() != raw.vars.len() {
            return Err(Error::Parse(
                "exponent vector length differs from variable count".into(),
            ));
        }
        if t.e.iter().any(|&e| e > 255) {
            return Err(Error::Parse("exponent exceeds 255".into()));
        }
        terms.push((parse_rational(&t.c)?, t.e));
    }
    Ok(MultiPoly::from_terms(&raw.vars, terms))
}

impl MultiPoly {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("polynomials serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: PolyJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        from_json_parts(raw)
    }
}
