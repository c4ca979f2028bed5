use std::cmp::Ordering;
use std::collections::HashMap;
use web_time::Instant;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::certificate::{Certificate, StepKind};
use crate::arith::{parse_rational, Rational};
use crate::error::{Error, Result};
use crate::poly::{linear_test, weakest_prefix, Context, MultiPoly, Verdict};

/// One instruction of a proof pipeline.
#[derive(Debug, Clone, PartialEq)]
pub enum Op {
    /// A formula definition such as `Den[x_,y_]=4+(x-y)^2`; not a checked step.
    Define(String),
    /// Evaluates `expr` and divides out every denominator factor exactly.
    Poly {
        name: String,
        expr: String,
        vars: Vec<String>,
    },
    Degree {
        name: String,
        var: String,
        expected: u32,
    },
    Integral {
        name: String,
    },
    /// `lhs - rhs` is the zero rational function.
    Identity {
        lhs: String,
        rhs: String,
    },
    LinearTest {
        expr: String,
        vars: Vec<String>,
        order: Vec<String>,
        expect: Verdict,
        /// Negative control: break the weakest partial sum before testing.
        perturb: bool,
    },
    /// Sign of `expr` at a rational point.
    Sign {
        expr: String,
        point: Vec<(String, String)>,
        expect: Ordering,
    },
    /// `expr >= 0` at pseudo-random points of the unit cube.
    SpotCheck {
        expr: String,
        vars: Vec<String>,
        samples: usize,
        seed: u64,
    },
}

/// A proof pipeline as data: ambient variables and an ordered list of operations.
#[derive(Debug, Clone, PartialEq)]
pub struct Pipeline {
    pub id: String,
    pub vars: Vec<String>,
    pub ops: Vec<Op>,
}

impl Pipeline {
    pub fn new(id: &str, vars: &[&str]) -> Self {
        Self {
            id: id.to_string(),
            vars: vars.iter().map(|v| v.to_string()).collect(),
            ops: Vec::new(),
        }
    }

    pub fn define(mut self, text: &str) -> Self {
        self.ops.push(Op::Define(text.to_string()));
        self
    }

    pub fn poly(mut self, name: &str, expr: &str, vars: &[&str]) -> Self {
        self.ops.push(Op::Poly {
            name: name.into(),
            expr: expr.into(),
            vars: strings(vars),
        });
        self
    }

    pub fn degree(mut self, name: &str, var: &str, expected: u32) -> Self {
        self.ops.push(Op::Degree {
            name: name.into(),
            var: var.into(),
            expected,
        });
        self
    }

    pub fn integral(mut self, name: &str) -> Self {
        self.ops.push(Op::Integral { name: name.into() });
        self
    }

    pub fn identity(mut self, lhs: &str, rhs: &str) -> Self {
        self.ops.push(Op::Identity {
            lhs: lhs.into(),
            rhs: rhs.into(),
        });
        self
    }

    pub fn linear_test(
        mut self,
        expr: &str,
        vars: &[&str],
        order: &[&str],
        expect: Verdict,
    ) -> Self {
        self.ops.push(Op::LinearTest {
            expr: expr.into(),
            vars: strings(vars),
            order: strings(order),
            expect,
            perturb: false,
        });
        self
    }

    pub fn sign(mut self, expr: &str, point: &[(&str, &str)], expect: Ordering) -> Self {
        self.ops.push(Op::Sign {
            expr: expr.into(),
            point: point
                .iter()
                .map(|(v, q)| (v.to_string(), q.to_string()))
                .collect(),
            expect,
        });
        self
    }

    pub fn spot_check(mut self, expr: &str, vars: &[&str], samples: usize, seed: u64) -> Self {
        self.ops.push(Op::SpotCheck {
            expr: expr.into(),
            vars: strings(vars),
            samples,
            seed,
        });
        self
    }

    /// The same pipeline with the last expected-Pass test fed a perturbed polynomial.
    pub fn perturbed(&self) -> Self {
        let mut copy = self.clone();
        if let Some(Op::LinearTest { perturb, .. }) = copy.ops.iter_mut().rev().find(|op| {
            matches!(
                op,
                Op::LinearTest {
                    expect: Verdict::Pass,
                    ..
                }
            )
        }) {
            *perturb = true;
        }
        copy.id = format!("{}-control", self.id);
        copy
    }

    pub fn run(&self) -> Certificate {
        self.run_with_polys().0
    }

    /// Runs the pipeline and also returns every polynomial it named.
    pub fn run_with_polys(&self) -> (Certificate, HashMap<String, MultiPoly>) {
        let start = Instant::now();
        let mut cert = Certificate::new(&self.id);
        let mut state = State {
            ctx: Context::new(&self.vars),
            polys: HashMap::new(),
        };
        for op in &self.ops {
            if let Err(e) = apply(op, &mut state, &mut cert) {
                cert.record_with(
                    kind_of(op),
                    describe(op),
                    false,
                    Some(json!({ "error": e.to_string() })),
                );
            }
            if !cert.succeeded() {
                break;
            }
        }
        cert.ms = start.elapsed().as_millis() as u64;
        (cert, state.polys)
    }
}

fn strings(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn kind_of(op: &Op) -> StepKind {
    match op {
        Op::Define(_) | Op::Degree { .. } | Op::Integral { .. } | Op::Identity { .. } => {
            StepKind::Identity
        }
        Op::Poly { .. } => StepKind::ZeroRemainder,
        Op::LinearTest { .. } => StepKind::LinearTest,
        Op::Sign { .. } | Op::SpotCheck { .. } => StepKind::RationalCompare,
    }
}

fn describe(op: &Op) -> String {
    match op {
        Op::Define(text) => format!("define {text}"),
        Op::Poly { name, expr, .. } => format!("{name} = {expr}"),
        Op::Degree {
            name,
            var,
            expected,
        } => format!("degree of {name} in {var} is {expected}"),
        Op::Integral { name } => format!("{name} has integer coefficients"),
        Op::Identity { lhs, rhs } => format!("{lhs} == {rhs}"),
        Op::LinearTest {
            expr,
            order,
            expect,
            perturb,
            ..
        } => format!(
            "linear test on {}{} (order {}) expects {:?}",
            if *perturb { "perturbed " } else { "" },
            expr,
            order.join(","),
            expect
        ),
        Op::Sign {
            expr,
            point,
            expect,
        } => {
            let at: Vec<String> = point.iter().map(|(v, q)| format!("{v}={q}")).collect();
            let rel = match expect {
                Ordering::Greater => "> 0",
                Ordering::Less => "< 0",
                Ordering::Equal => "= 0",
            };
            format!("{expr} {rel} at {}", at.join(", "))
        }
        Op::SpotCheck { expr, samples, .. } => {
            format!("{expr} >= 0 at {samples} random points of the unit cube")
        }
    }
}

fn named_poly(ctx: &mut Context, expr: &str, vars: &[String]) -> Result<MultiPoly> {
    ctx.eval_str(expr)?.into_poly()?.embed(vars)
}

struct State {
    ctx: Context,
    polys: HashMap<String, MultiPoly>,
}

impl State {
    fn poly(&self, name: &str) -> Result<&MultiPoly> {
        self.polys
            .get(name)
            .ok_or_else(|| Error::Parse(format!("no polynomial named {name}")))
    }
}

fn apply(op: &Op, state: &mut State, cert: &mut Certificate) -> Result<()> {
    let ctx = &mut state.ctx;
    let kind = kind_of(op);
    let desc = describe(op);
    match op {
        Op::Define(text) => {
            ctx.define(text)?;
        }
        Op::Poly { name, expr, vars } => {
            let f = ctx.eval_str(expr)?;
            let mut divisions = 0u32;
            match f.into_poly_with(|_, k| divisions += k) {
                Ok(p) => {
                    let p = p.embed(vars)?;
                    cert.record(
                        kind,
                        format!("{desc}: {divisions} exact divisions, {} terms", p.len()),
                        true,
                    );
                    ctx.define_poly(name, p.clone());
                    state.polys.insert(name.clone(), p);
                }
                Err(Error::Division { remainder }) => {
                    cert.record_with(
                        kind,
                        desc,
                        false,
                        Some(json!({ "remainder_terms": remainder.len() })),
                    );
                }
                Err(e) => return Err(e),
            }
        }
        Op::Degree {
            name,
            var,
            expected,
        } => {
            let got = state.poly(name)?.degree_in(var);
            cert.record_with(kind, desc, got == *expected, Some(json!({ "degree": got })));
        }
        Op::Integral { name } => {
            cert.record(kind, desc, state.poly(name)?.is_integral());
        }
        Op::Identity { lhs, rhs } => {
            let diff = ctx.eval_str(&format!("({lhs})-({rhs})"))?;
            cert.record(kind, desc, diff.is_zero());
        }
        Op::LinearTest {
            expr,
            vars,
            order,
            expect,
            perturb,
        } => {
            let mut p = named_poly(ctx, expr, vars)?;
            if *perturb {
                p = break_weakest_sum(&p, order);
            }
            let report = linear_test(&p, order);
            let witness = report
                .witness
                .as_ref()
                .map(|w| serde_json::to_value(w).expect("witness serializes"));
            cert.record_with(
                kind,
                format!("{desc} ({} terms)", p.len()),
                report.verdict == *expect,
                witness,
            );
        }
        Op::Sign {
            expr,
            point,
            expect,
        } => {
            let f = ctx.eval_str(expr)?;
            let mut at = HashMap::new();
            for (v, q) in point {
                at.insert(v.clone(), parse_rational(q)?);
            }
            let value = f.eval(&at)?;
            cert.record(kind, desc, value.cmp(&Rational::zero()) == *expect);
        }
        Op::SpotCheck {
            expr,
            vars,
            samples,
            seed,
        } => {
            let p = named_poly(ctx, expr, vars)?;
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let denom = BigInt::from(1u32 << 16);
            let mut bad = None;
            for _ in 0..*samples {
                let point: Vec<Rational> = (0..vars.len())
                    .map(|_| {
                        Rational::new(BigInt::from(rng.gen_range(0..=1u32 << 16)), denom.clone())
                    })
                    .collect();
                if p.eval_slice(&point).is_negative() {
                    bad = Some(point);
                    break;
                }
            }
            let witness = bad
                .as_ref()
                .map(|pt| json!(pt.iter().map(|q| q.to_string()).collect::<Vec<_>>()));
            cert.record_with(kind, desc, bad.is_none(), witness);
        }
    }
    Ok(())
}

/// Lowers the coefficient at the weakest partial sum so that this sum becomes `-1`.
pub fn break_weakest_sum<S: AsRef<str>>(p: &MultiPoly, order: &[S]) -> MultiPoly {
    let weakest = weakest_prefix(p, order);
    let delta = -(weakest.partial_sum.clone() + Rational::from_integer(1.into()));
    let exps: Vec<u32> = p
        .vars()
        .iter()
        .map(|v| {
            weakest
                .order
                .iter()
                .position(|o| o == v)
                .map_or(0, |k| weakest.prefix[k])
        })
        .collect();
    p.add(&MultiPoly::from_terms(p.vars(), [(delta, exps)]))
}
