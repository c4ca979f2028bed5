use web_time::Instant;

use serde_json::json;

use super::certificate::{Certificate, StepKind};
use crate::arith::{Precision, RatInterval, Rational};
use crate::bridge::{audit_on_grid, le, nonlinear_mean, Audit, Check};
use crate::error::{Error, Result};

fn max(a: &RatInterval, b: &RatInterval) -> RatInterval {
    RatInterval::new(a.lo().max(b.lo()).clone(), a.hi().max(b.hi()).clone())
}

fn record(cert: &mut Certificate, desc: &str, audit: Result<Audit>) {
    match audit {
        Ok(a) => {
            let witness = json!({
                "cases": a.cases,
                "equalities": a.equalities,
                "first_problem": a.first_problem,
            });
            cert.record_with(
                StepKind::RationalCompare,
                format!(
                    "{desc}: {} cases, {} exact equalities",
                    a.cases, a.equalities
                ),
                a.holds(),
                Some(witness),
            );
        }
        Err(e) => {
            cert.record_with(
                StepKind::RationalCompare,
                desc,
                false,
                Some(json!({ "error": e.to_string() })),
            );
        }
    }
}

/// Checks the three reduced inequalities on every applicable tuple of `A`-values on `D_n`.
pub fn audit_reduction_instances(n: u32) -> Certificate {
    audit_reduction_instances_at(n, Precision::new(128))
}

pub fn audit_reduction_instances_at(n: u32, p: Precision) -> Certificate {
    let start = Instant::now();
    let mut cert = Certificate::new("reductions");
    if n == 0 || n > 10 {
        cert.record_with(
            StepKind::RationalCompare,
            "grid level",
            false,
            Some(json!({ "error": Error::Domain(format!("level {n} is not in 1..=10")).to_string() })),
        );
        return cert;
    }
    record(
        &mut cert,
        "M[M[z,x],M[y,x]] >= M[M[y,z],x] for y, z on one side of x",
        case_one(n, p),
    );
    record(
        &mut cert,
        "M[M[x,y],M[z,w]] <= max(M[x,w], M[y,z]) for x <= y <= z <= w",
        case_two(n, p),
    );
    record(
        &mut cert,
        "M[z,y] <= M[(z+M[z,y])/2, M[M[z,y],y]] for z <= y, y - z <= 3/4",
        final_step(n, p),
    );
    cert.ms = start.elapsed().as_millis() as u64;
    cert
}

fn case_one(n: u32, p: Precision) -> Result<Audit> {
    audit_on_grid(
        n,
        p,
        |c| {
            let len = c.len();
            let mut out = Vec::new();
            for x in 0..len {
                for y in 0..len {
                    for z in y + 1..len {
                        if (y >= x && z >= x) || (y <= x && z <= x) {
                            out.push((x, y, z));
                        }
                    }
                }
            }
            out
        },
        |c, &(x, y, z)| {
            if x == y || x == z {
                return (Check::Holds, true);
            }
            let w = c.precision();
            let v = c.values();
            let m = |a: &RatInterval, b: &RatInterval| nonlinear_mean(a, b, w);
            let lhs = m(&m(&v[z], &v[x]), &m(&v[y], &v[x]));
            let rhs = m(&m(&v[y], &v[z]), &v[x]);
            (le(&rhs, &lhs), false)
        },
        |&(x, y, z)| format!("indices x={x} y={y} z={z}"),
    )
}

fn case_two(n: u32, p: Precision) -> Result<Audit> {
    audit_on_grid(
        n,
        p,
        |c| {
            let len = c.len();
            let mut out = Vec::new();
            for x in 0..len {
                for y in x..len {
                    for z in y..len {
                        for w in z..len {
                            out.push((x, y, z, w));
                        }
                    }
                }
            }
            out
        },
        |c, &(x, y, z, w)| {
            if x == y && z == w {
                return (Check::Holds, true);
            }
            let pr = c.precision();
            let v = c.values();
            let m = |a: &RatInterval, b: &RatInterval| nonlinear_mean(a, b, pr);
            let lhs = m(&m(&v[x], &v[y]), &m(&v[z], &v[w]));
            let rhs = max(&m(&v[x], &v[w]), &m(&v[y], &v[z]));
            (le(&lhs, &rhs), false)
        },
        |&(x, y, z, w)| format!("indices x={x} y={y} z={z} w={w}"),
    )
}

fn final_step(n: u32, p: Precision) -> Result<Audit> {
    let three_quarters = Rational::new(3.into(), 4.into());
    audit_on_grid(
        n,
        p,
        |c| {
            let v = c.values();
            let mut out = Vec::new();
            for z in 0..c.len() {
                for y in z..c.len() {
                    if (&v[y] - &v[z]).hi() <= &three_quarters {
                        out.push((z, y));
                    }
                }
            }
            out
        },
        |c, &(z, y)| {
            if z == y {
                return (Check::Holds, true);
            }
            let pr = c.precision();
            let v = c.values();
            let m = |a: &RatInterval, b: &RatInterval| nonlinear_mean(a, b, pr);
            let x = m(&v[z], &v[y]);
            let half = Rational::new(1.into(), 2.into());
            let rhs = m(&(&v[z] + &x).scale(&half), &m(&x, &v[y]));
            (le(&x, &rhs), false)
        },
        |&(z, y)| format!("indices z={z} y={y}"),
    )
}
