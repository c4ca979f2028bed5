use std::cmp::Ordering::Equal;
use std::collections::HashMap;
use web_time::Instant;

use num_bigint::BigInt;
use num_traits::One;

use super::certificate::{Certificate, StepKind};
use super::engine::Pipeline;
use crate::arith::Rational;
use crate::error::Result;
use crate::poly::{Context, Verdict::Pass};

/// Coefficients of `sum_k x (x^{2k}/(2k+1) - 1) tau^{2k+1}` are non-negative for `x >= sqrt 3`.
///
/// At `x = sqrt 3` the coefficient sign is that of `3^k - (2k+1)`, checked for
/// `k = 0..=max_k`; larger `x` only increase `x^{2k}`.
pub fn prove_phi_coeffs(max_k: u64) -> Certificate {
    let start = Instant::now();
    let mut cert = Certificate::new("phi");
    let mut power = BigInt::one();
    let mut first_bad = None;
    let mut equalities = Vec::new();
    for k in 0..=max_k {
        let rhs = BigInt::from(2 * k + 1);
        if power < rhs {
            first_bad = Some(k);
            break;
        }
        if power == rhs {
            equalities.push(k);
        }
        power *= 3;
    }
    cert.record_with(
        StepKind::RationalCompare,
        format!("3^k >= 2k+1 for k = 0..={max_k} (equality at k in {equalities:?}; monotone in x beyond sqrt 3)"),
        first_bad.is_none(),
        first_bad.map(|k| serde_json::json!({ "k": k })),
    );
    let step = Pipeline::new("phi", &["k"])
        .identity("3*(2*k+1)-(2*k+3)", "4*k")
        .linear_test("4*k", &["k"], &["k"], Pass)
        .run();
    for s in step.steps {
        cert.record(s.kind, format!("induction: {}", s.desc), s.ok);
    }
    cert.ms = start.elapsed().as_millis() as u64;
    cert
}

/// `1/(1+x^2)` satisfies the Bellman inequality.
pub fn tilde_b_pipeline() -> Pipeline {
    Pipeline::new("tilde-b", &["x", "t"])
        .identity(
            "((1-t^2)/(1-2*x*t+x^2)+(1-t^2)/(1+2*x*t+x^2))/2",
            "(1-t^2)*(1+x^2)/((1+x^2)^2-4*x^2*t^2)",
        )
        .identity(
            "((1+x^2)^2-4*x^2*t^2)-(1-t^2)*(1+x^2)^2",
            "t^2*((1+x^2)^2-4*x^2)",
        )
        .identity("(1+x^2)^2-4*x^2", "(1-x^2)^2")
        .linear_test("(1-(1-x)^2)^2", &["x"], &["x"], Pass)
        .sign("(1+x^2)^2-4*x^2", &[("x", "1")], Equal)
        .sign("(1-x^2)^2", &[("x", "1")], Equal)
}

pub fn prove_tilde_b_supersolution() -> Certificate {
    tilde_b_pipeline().run()
}

/// Boundary case `x- = 0` of the triple check: `x F' + F'' >= 0` for `F = (1+x^2)/(1+3x^2)`.
pub fn prove_case3_boundary() -> Certificate {
    let start = Instant::now();
    let mut cert = Certificate::new("case3");
    if let Err(e) = case3_steps(&mut cert) {
        cert.record(StepKind::Identity, format!("evaluation error: {e}"), false);
    }
    cert.ms = start.elapsed().as_millis() as u64;
    cert
}

fn case3_steps(cert: &mut Certificate) -> Result<()> {
    let mut ctx = Context::new(&["x", "s"]);
    ctx.define("F[x_]=(1+x^2)/(1+3*x^2)")?;
    let f = ctx.eval_str("F[x]")?;
    let d1 = f.derivative("x");
    let d2 = d1.derivative("x");
    let lhs = ctx.eval_str("x")?.mul(&d1).add(&d2);
    let rhs = ctx.eval_str("4*(8*x^2-3*x^4-1)/(1+3*x^2)^3")?;
    cert.record(
        StepKind::Identity,
        "x F'(x) + F''(x) == 4(8x^2-3x^4-1)/(1+3x^2)^3",
        lhs.equals(&rhs),
    );
    let diff = ctx.eval_str("(8*x^2-3*x^4-1)-(3*x^2*(1-x^2)+(5*x^2-1))")?;
    cert.record(
        StepKind::Identity,
        "8x^2-3x^4-1 == 3x^2(1-x^2)+(5x^2-1)",
        diff.is_zero(),
    );
    // F depends on x^2 only, so F(1/sqrt 5) is (1+s)/(1+3s) at s = 1/5
    let h = ctx.eval_str("(1+s)/(1+3*s)")?;
    let g = ctx.eval_str("F[x]")?;
    let point = |v: &str, q: Rational| HashMap::from([(v.to_string(), q)]);
    let at_fifth = h.eval(&point("s", Rational::new(1.into(), 5.into())))?;
    cert.record(
        StepKind::Identity,
        "F(1/sqrt5) == 3/4",
        at_fifth == Rational::new(3.into(), 4.into()),
    );
    let at_one = g.eval(&point("x", Rational::one()))?;
    cert.record(
        StepKind::Identity,
        "F(1) == 1/2",
        at_one == Rational::new(1.into(), 2.into()),
    );
    let sub = ctx.eval_str("F[x]-(1+s)/(1+3*s)")?;
    let on_square = sub.substitute(&HashMap::from([("s".to_string(), ctx.eval_str("x^2")?)]))?;
    cert.record(
        StepKind::Identity,
        "F(x) == (1+s)/(1+3s) with s = x^2",
        on_square.is_zero(),
    );
    Ok(())
}
