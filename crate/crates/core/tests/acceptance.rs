use std::time::{Duration, Instant};

use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cww_core::arith::{DyadicRational, Precision, RatInterval, Rational};
use cww_core::bridge::{
    audit_double_bound, audit_midpoint, audit_monotone, audit_neighbor_bound, big_b, bridge_value,
    check_ratio_monotone, mean_properties, BridgeCache, Check,
};
use cww_core::certify::{
    audit_reduction_instances, level5_margin, mean_assoc_pipeline, negative_controls,
    prove_case3_boundary, prove_level5, prove_merge_max, prove_midpoint_step, prove_phi_coeffs,
    prove_tail_ratio, prove_tilde_b_supersolution, Certificate, QuadElem, StepKind, PHI_COEFFS_K,
};
use cww_core::extremal::{
    build_extremal, dp_oracle, square_function_sup, tail_measure, DpGrid, Threshold,
};
use cww_core::poly::MultiPoly;

fn q(a: i64, b: i64) -> Rational {
    Rational::new(a.into(), b.into())
}

struct Criterion {
    id: u32,
    name: &'static str,
    checks: Vec<(String, bool)>,
}

impl Criterion {
    fn new(id: u32, name: &'static str) -> Self {
        Criterion {
            id,
            name,
            checks: Vec::new(),
        }
    }

    fn check(&mut self, what: impl Into<String>, ok: bool) -> &mut Self {
        self.checks.push((what.into(), ok));
        self
    }

    fn within(&mut self, what: &str, elapsed: Duration, limit: Duration) -> &mut Self {
        self.check(
            format!(
                "{what} in {:.1}s (limit {}s)",
                elapsed.as_secs_f64(),
                limit.as_secs()
            ),
            elapsed <= limit,
        )
    }

    fn report(&self) -> bool {
        let passed = self.checks.iter().all(|(_, ok)| *ok);
        let verdict = if passed { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {verdict}: {}", self.id, self.name);
        for (what, ok) in &self.checks {
            println!("    [{}] {what}", if *ok { "ok" } else { "FAILED" });
        }
        passed
    }
}

fn step_ok(cert: &Certificate, kind: StepKind, needle: &str) -> bool {
    cert.steps
        .iter()
        .any(|s| s.kind == kind && s.desc.contains(needle) && s.ok)
}

fn count_ok(cert: &Certificate, kind: StepKind, needle: &str) -> usize {
    cert.steps
        .iter()
        .filter(|s| s.kind == kind && s.desc.contains(needle) && s.ok)
        .count()
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let v = f();
    (v, start.elapsed())
}

/// `lo <= sqrt(v) <= hi` for `v >= 0` in a quadratic field, decided exactly.
fn encloses_sqrt(enc: &RatInterval, v: &QuadElem, d: i64) -> bool {
    let sq = |r: &Rational| QuadElem::new(r * r, Rational::zero(), d);
    let lo_ok = !enc.lo().is_positive() || (v - &sq(enc.lo())).signum() >= 0;
    let hi_ok = !enc.hi().is_negative() && (&sq(enc.hi()) - v).signum() >= 0;
    lo_ok && hi_ok
}

fn criterion_01_mean_assoc() -> Criterion {
    let mut c = Criterion::new(1, "mean associativity pipeline");
    let ((cert, polys), elapsed) = timed(|| mean_assoc_pipeline().run_with_polys());
    c.check("certificate status success", cert.succeeded());
    c.check(
        "P1 formed with zero remainder",
        step_ok(&cert, StepKind::ZeroRemainder, "P1 ="),
    );
    c.check(
        "P2 formed with zero remainder",
        step_ok(&cert, StepKind::ZeroRemainder, "P2 ="),
    );
    c.check(
        "P1(0,y,z) factorization identity",
        step_ok(
            &cert,
            StepKind::Identity,
            "P1[0,y,z] == y*(y-z)^2*z*(y+z)^2",
        ),
    );
    c.check(
        "linear test directly on P1 fails",
        step_ok(
            &cert,
            StepKind::LinearTest,
            "P1[x,y,z] (order z,y,x) expects Fail",
        ),
    );
    c.check(
        "linear test on P1 - P1(0,y,z) passes",
        step_ok(&cert, StepKind::LinearTest, "P1[x,y,z]-P1[0,y,z]"),
    );
    c.check(
        "linear test on P2 - P2(0,y,z) passes",
        step_ok(&cert, StepKind::LinearTest, "P2[x,y,z]-P2[0,y,z]"),
    );
    match (polys.get("P1"), polys.get("P2")) {
        (Some(p1), Some(p2)) => {
            let p1_0 = p1.eval_var("x", &Rational::zero());
            let p2_0 = p2.eval_var("x", &Rational::zero());
            let dz = MultiPoly::var(p1.vars(), "y").sub(&MultiPoly::var(p1.vars(), "z"));
            c.check(
                "P2(0,y,z)*(y-z)^2 == P1(0,y,z)^2",
                p2_0.mul(&dz.pow(2)) == p1_0.pow(2),
            );
            c.check(
                "P2(0,y,z) == P1(0,y,z)^2 as literally stated",
                p2_0 == p1_0.pow(2),
            );
        }
        _ => {
            c.check("P1 and P2 available", false);
        }
    }
    c.within("full pipeline", elapsed, Duration::from_secs(300));
    c
}

fn criterion_02_merge_max() -> Criterion {
    let mut c = Criterion::new(2, "merge-max pipeline");
    let (cert, elapsed) = timed(prove_merge_max);
    c.check("certificate status success", cert.succeeded());
    c.check(
        "degree in u is 8",
        step_ok(&cert, StepKind::Identity, "degree of P1 in u is 8"),
    );
    c.check(
        "4^36 scaling gives integer coefficients",
        step_ok(&cert, StepKind::Identity, "P3 has integer coefficients"),
    );
    c.check(
        "Fail without the y-flip",
        step_ok(
            &cert,
            StepKind::LinearTest,
            "P3[x,y,z] (order z,y,x) expects Fail",
        ),
    );
    c.check(
        "Pass with the y-flip",
        step_ok(
            &cert,
            StepKind::LinearTest,
            "P3[x,1-y,z] (order z,y,x) expects Pass",
        ),
    );
    c.within("pipeline", elapsed, Duration::from_secs(300));
    c
}

fn criterion_03_tail_ratio() -> Criterion {
    let mut c = Criterion::new(3, "tail-ratio pipeline");
    let (cert, elapsed) = timed(prove_tail_ratio);
    c.check("certificate status success", cert.succeeded());
    c.check(
        "exact division by y",
        step_ok(&cert, StepKind::ZeroRemainder, "P3 = P2[y,z]/y"),
    );
    c.check(
        "both half-cube tests pass",
        count_ok(&cert, StepKind::LinearTest, "2^13*P3[") == 2,
    );
    c.within("pipeline", elapsed, Duration::from_secs(120));
    c
}

fn criterion_04_midpoint_step() -> Criterion {
    let mut c = Criterion::new(4, "midpoint-step pipeline");
    let (cert, elapsed) = timed(prove_midpoint_step);
    c.check("certificate status success", cert.succeeded());
    c.check(
        "10^20 scaling gives integer coefficients",
        step_ok(&cert, StepKind::Identity, "P2 has integer coefficients"),
    );
    c.check(
        "linear test passes",
        step_ok(&cert, StepKind::LinearTest, "P2[y,z]"),
    );
    c.within("pipeline", elapsed, Duration::from_secs(60));
    c
}

fn criterion_05_level5() -> Criterion {
    let mut c = Criterion::new(5, "level-five inequality");
    let (cert, elapsed) = timed(prove_level5);
    c.check("certificate status success", cert.succeeded());
    for needle in [
        "845 > 841",
        "68/140 == 17/35",
        "4284 > 4225",
        "355/1775 == 1/5",
    ] {
        c.check(
            format!("exact step {needle}"),
            cert.steps.iter().any(|s| s.desc.contains(needle) && s.ok),
        );
    }
    c.check(
        "integer comparisons hold in i64",
        13 * 13 * 5 > 29 * 29 && 36 * 119 > 65 * 65 && 68 * 35 == 17 * 140 && 355 * 5 == 1775,
    );
    let margin = level5_margin(Precision::new(128));
    c.check(
        format!(
            "margin enclosure {} positive",
            margin.lo().to_f64().unwrap_or(f64::NAN)
        ),
        margin.lo().is_positive(),
    );
    c.check(
        "margin enclosure meets [9.0e-4, 9.3e-4]",
        margin.overlaps(&RatInterval::new(q(9, 10_000), q(93, 100_000))),
    );
    let float = {
        let m = |a: f64, b: f64| (a + b) / (4.0 + (a - b) * (a - b)).sqrt();
        let r = 5f64.sqrt();
        m(1.0 / (2.0 * r), m(1.0 / r, 1.0)) - 1.0 / r
    };
    c.check(
        format!("independent float margin {float:.9} within 1e-12"),
        (margin.midpoint().to_f64().unwrap() - float).abs() < 1e-12,
    );
    c.within("certificate", elapsed, Duration::from_secs(1));
    c
}

fn criterion_06_bridge_exactness() -> Criterion {
    let mut c = Criterion::new(6, "bridge exactness");
    let p = Precision::new(128);
    let quarter = bridge_value(&DyadicRational::new(1, 2), p).unwrap();
    let five_lo = quarter.lo() * quarter.lo() * q(5, 1);
    let five_hi = quarter.hi() * quarter.hi() * q(5, 1);
    c.check(
        "A(1/4) contains 1/sqrt5 (5 lo^2 <= 1 <= 5 hi^2)",
        five_lo <= Rational::one() && five_hi >= Rational::one(),
    );
    let three_eighths = bridge_value(&DyadicRational::new(3, 3), p).unwrap();
    let target = QuadElem::int(6, 2, 5)
        .div(&QuadElem::int(26, -2, 5))
        .unwrap();
    c.check(
        "A(3/8) contains (sqrt5+1)/sqrt(26-2 sqrt5)",
        encloses_sqrt(&three_eighths, &target, 5),
    );
    let b1 = big_b(&Rational::one(), p).unwrap();
    c.check(
        format!(
            "B(1) contains 1/2 with width 2^{:.1}",
            b1.width().to_f64().unwrap().log2()
        ),
        b1.contains(&q(1, 2)) && b1.width() <= cww_core::arith::pow2(-128),
    );
    let (cache, elapsed) = timed(|| BridgeCache::build(10, Precision::new(53)).unwrap());
    let widest = cache.values().iter().map(|v| v.width()).max().unwrap();
    c.check(
        format!("D_10 enclosures of width <= 2^-53 ({} points)", cache.len()),
        cache.len() == 513 && widest <= cww_core::arith::pow2(-53),
    );
    c.within("D_10 enclosures", elapsed, Duration::from_secs(10));
    c
}

fn criterion_07_property_suite() -> Criterion {
    let mut c = Criterion::new(7, "bridge property suite");
    let p = Precision::new(128);
    let audits = [
        ("A(t) <= 2t on D_12", audit_double_bound(12, p)),
        (
            "neighbor gaps <= (3/4)^(n-1) on D_12",
            audit_neighbor_bound(12, p),
        ),
        ("strict monotonicity on D_12", audit_monotone(12, p)),
        ("midpoint inequality on D_6 x D_6", audit_midpoint(6, p)),
        ("A(t)/t non-decreasing on D_10", check_ratio_monotone(10, p)),
    ];
    for (name, audit) in audits {
        match audit {
            Ok(a) => c.check(
                format!("{name}: {} cases, {:?}", a.cases, a.check),
                a.holds(),
            ),
            Err(e) => c.check(format!("{name}: {e}"), false),
        };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut tally = [0usize; 3];
    for _ in 0..1000 {
        let a = q(rng.gen_range(0..=1_000_000), 1_000_000);
        let b = q(rng.gen_range(0..=1_000_000), 1_000_000);
        match mean_properties(&a, &b, p) {
            Ok(Check::Holds) => tally[0] += 1,
            Ok(Check::Violated) | Err(_) => tally[1] += 1,
            Ok(Check::Inconclusive) => tally[2] += 1,
        }
    }
    c.check(
        format!(
            "mean properties on 1000 random pairs: {} hold, {} violated, {} inconclusive",
            tally[0], tally[1], tally[2]
        ),
        tally[0] == 1000,
    );
    c
}

fn criterion_08_extremal_optimality() -> Criterion {
    let mut c = Criterion::new(8, "extremal optimality");
    let p = Precision::new(96);
    let mut bad = Vec::new();
    for k in 0..=128u64 {
        let t = DyadicRational::new(k, 8);
        let tree = build_extremal(&t, p).unwrap();
        let tail = tail_measure(&tree, &Threshold::Bridge(t.clone())).unwrap();
        if tail.measure.to_rational() != Rational::one() - t.to_rational()
            || !square_function_sup(&tree).bounded
        {
            bad.push(t.to_string());
        }
    }
    c.check(
        format!(
            "tail = 1 - t and sup (Sf)^2 <= 1 on all of D_8 ({} failures)",
            bad.len()
        ),
        bad.is_empty(),
    );

    let t = DyadicRational::new(3, 3);
    let tree = build_extremal(&t, p).unwrap();
    let coeffs = tree.haar_coefficients().unwrap();
    let norm = QuadElem::int(26, -2, 5);
    let expected = [
        ((0, 0), QuadElem::int(6, -2, 5)),
        ((0, 1), QuadElem::int(20, 0, 5)),
        ((1, 1), QuadElem::int(4, 0, 5)),
        ((2, 2), QuadElem::int(16, 0, 5)),
    ];
    let matches = coeffs.len() == 4
        && coeffs
            .iter()
            .zip(&expected)
            .all(|(h, ((k, level), square))| {
                (h.interval.k, h.interval.level) == (*k, *level)
                    && encloses_sqrt(&h.coefficient, &square.div(&norm).unwrap(), 5)
            });
    c.check(
        "A(3/8) tree has the four displayed Haar coefficients",
        matches,
    );
    let tail = tail_measure(&tree, &Threshold::Bridge(t)).unwrap();
    c.check(
        "A(3/8) tree measure is exactly 5/8",
        tail.measure.to_rational() == q(5, 8),
    );

    let mut two_value = true;
    for n in 1..=6u32 {
        let tree = build_extremal(&DyadicRational::new(1, n), p).unwrap();
        let scale = QuadElem::new(
            q(3, 1) / (Rational::from_integer(4.into()).pow(n as i32) - Rational::one()),
            Rational::zero(),
            5,
        );
        let width = cww_core::arith::pow2(-(n as i64));
        let low = Rational::one() - cww_core::arith::pow2(n as i64);
        for leaf in tree.leaves().unwrap() {
            let start = Rational::from_integer(leaf.interval.k.into())
                * cww_core::arith::pow2(-(leaf.interval.level as i64));
            let (v, factor) = if start < width {
                (-&leaf.value, -low.clone())
            } else {
                (leaf.value.clone(), Rational::one())
            };
            let square = QuadElem::new(&factor * &factor, Rational::zero(), 5);
            two_value &= encloses_sqrt(&v, &(&square * &scale), 5);
        }
    }
    c.check(
        "A(2^-n) trees take the two values sqrt(3/(4^n-1)) (1-2^n or 1), n <= 6",
        two_value,
    );
    c
}

fn criterion_09_oracle_sandwich() -> Criterion {
    let mut c = Criterion::new(9, "dynamic-programming oracle sandwich");
    let p = Precision::new(64);
    let (grid, elapsed) = timed(|| dp_oracle(DpGrid::new(12, q(1, 560), q(4, 1), 512).unwrap()));
    let mut monotone = true;
    let mut below_tilde = true;
    for i in 0..grid.points() {
        let x = grid.x(i);
        let tilde = Rational::one() / (Rational::one() + &x * &x);
        for k in 0..12 {
            monotone &= grid.value(k, i) <= grid.value(k + 1, i);
        }
        below_tilde &= grid.value(12, i) <= tilde;
    }
    c.check("values are monotone in depth", monotone);
    c.check("values never exceed 1/(1+x^2)", below_tilde);
    let mut below_b = true;
    for i in (0..grid.points())
        .filter(|&i| grid.x(i) <= Rational::one())
        .step_by(5)
    {
        let b = big_b(&grid.x(i), p).unwrap();
        below_b &= grid.value(12, i) <= *b.hi();
    }
    c.check(
        "values never exceed the upper enclosure of 1 - A^{-1}(x) on [0,1]",
        below_b,
    );
    let mut worst = f64::INFINITY;
    for j in 0..64 {
        let x = q(j, 70);
        let b = big_b(&x, p).unwrap();
        let ratio = (grid.lower_bound(&x) / b.hi()).to_f64().unwrap();
        worst = worst.min(ratio);
    }
    c.check(
        format!("depth 12, 512 taus: worst ratio {worst:.4} >= 0.95 on 64 points in [0, 0.9]"),
        worst >= 0.95,
    );
    c.within("oracle", elapsed, Duration::from_secs(60));
    c
}

fn criterion_10_auxiliary() -> Criterion {
    let mut c = Criterion::new(10, "auxiliary identities and negative controls");
    c.check(
        "tilde-b supersolution",
        prove_tilde_b_supersolution().succeeded(),
    );
    c.check("case-3 boundary", prove_case3_boundary().succeeded());
    c.check(
        format!("phi coefficients up to k = {PHI_COEFFS_K}"),
        prove_phi_coeffs(10_000).succeeded(),
    );
    let (audit, elapsed) = timed(|| audit_reduction_instances(6));
    c.check(
        format!("reduction instances on D_6 ({:.0}s)", elapsed.as_secs_f64()),
        audit.succeeded(),
    );
    for control in negative_controls() {
        c.check(
            format!("control {} reports failure", control.pipeline),
            !control.succeeded(),
        );
    }
    c
}

fn outcome(id: u32, joined: std::thread::Result<Criterion>) -> (u32, Option<Criterion>) {
    (id, joined.ok())
}

fn main() {
    // Short timed criteria run alone; the heavy pipelines then share the machine.
    let alone: [(u32, fn() -> Criterion); 4] = [
        (4, criterion_04_midpoint_step),
        (5, criterion_05_level5),
        (6, criterion_06_bridge_exactness),
        (9, criterion_09_oracle_sandwich),
    ];
    let shared: [(u32, fn() -> Criterion); 6] = [
        (1, criterion_01_mean_assoc),
        (2, criterion_02_merge_max),
        (3, criterion_03_tail_ratio),
        (7, criterion_07_property_suite),
        (8, criterion_08_extremal_optimality),
        (10, criterion_10_auxiliary),
    ];
    let mut done: Vec<_> = alone
        .iter()
        .map(|&(id, run)| outcome(id, std::thread::spawn(run).join()))
        .collect();
    std::thread::scope(|scope| {
        let handles: Vec<_> = shared
            .iter()
            .map(|&(id, run)| (id, scope.spawn(run)))
            .collect();
        done.extend(handles.into_iter().map(|(id, h)| outcome(id, h.join())));
    });
    done.sort_by_key(|(id, _)| *id);
    let results: Vec<bool> = done
        .iter()
        .map(|(id, c)| match c {
            Some(c) => c.report(),
            None => {
                println!("criterion {id:>2} FAIL: panicked");
                false
            }
        })
        .collect();
    let passed = results.iter().filter(|ok| **ok).count();
    println!("acceptance: {passed}/{} criteria pass", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
