use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;

use cww_core::arith::{pow2, sqrt_enclosure, DyadicRational, Precision, RatInterval, Rational};
use cww_core::bridge::{bridge_value, nonlinear_mean, tau_of, x_map, BridgeCache};
use cww_core::extremal::{dp_oracle, DpGrid};
use cww_core::poly::{linear_test, MultiPoly};

fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

fn unit() -> impl Strategy<Value = Rational> {
    (0i64..=1000).prop_map(|n| q(n, 1000))
}

fn poly(vars: &'static [&'static str]) -> impl Strategy<Value = MultiPoly> {
    let n = vars.len();
    prop::collection::vec((-20i64..=20, prop::collection::vec(0u32..3, n)), 0..8).prop_map(
        move |terms| MultiPoly::from_terms(vars, terms.into_iter().map(|(c, e)| (q(c, 1), e))),
    )
}

fn at(vars: &[&str], values: &[Rational]) -> HashMap<String, Rational> {
    vars.iter()
        .map(|v| v.to_string())
        .zip(values.iter().cloned())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn sqrt_encloses(n in 1i64..1_000_000, d in 1i64..1_000_000, bits in 8u32..200) {
        let v = q(n, d);
        let r = sqrt_enclosure(&RatInterval::point(v.clone()), Precision::new(bits)).unwrap();
        prop_assert!(r.lo() * r.lo() <= v);
        prop_assert!(r.hi() * r.hi() >= v);
        prop_assert!(r.width() <= pow2(-(bits as i64)));
    }

    #[test]
    fn interval_product_contains_point_product(a in unit(), b in unit(), c in unit(), d in unit()) {
        let x = RatInterval::new(a.clone().min(b.clone()), a.clone().max(b.clone()));
        let y = RatInterval::new(c.clone().min(d.clone()) - q(1, 2), c.clone().max(d.clone()) - q(1, 2));
        let prod = &x * &y;
        prop_assert!(prod.contains(&(&a * (&c - q(1, 2)))));
        prop_assert!(prod.contains(&(&b * (&d - q(1, 2)))));
    }

    #[test]
    fn mean_is_symmetric_and_between(a in unit(), b in unit()) {
        let p = Precision::new(80);
        let (ia, ib) = (RatInterval::point(a.clone()), RatInterval::point(b.clone()));
        let m = nonlinear_mean(&ia, &ib, p);
        prop_assert!(m.overlaps(&nonlinear_mean(&ib, &ia, p)));
        let (lo, hi) = (a.clone().min(b.clone()), a.max(b));
        prop_assert!(m.hi() >= &lo && m.lo() <= &hi);
    }

    #[test]
    fn triple_recovers_midpoint(a in unit(), b in unit()) {
        let p = Precision::new(80);
        let (ia, ib) = (RatInterval::point(a), RatInterval::point(b));
        let x = nonlinear_mean(&ia, &ib, p);
        let tau = tau_of(&ia, &ib, p);
        let minus = x_map(&x, &-&tau, p).unwrap();
        let plus = x_map(&x, &tau, p).unwrap();
        let slack = RatInterval::new(-pow2(-60), pow2(-60));
        prop_assert!((&minus + &slack).overlaps(&ia));
        prop_assert!((&plus + &slack).overlaps(&ib));
    }

    #[test]
    fn product_divides_back(a in poly(&["x", "y"]), b in poly(&["x", "y"])) {
        prop_assume!(!b.is_zero());
        let prod = a.mul(&b);
        prop_assert_eq!(prod.exact_divide(&b).unwrap(), a);
    }

    #[test]
    fn evaluation_is_a_ring_map(a in poly(&["x", "y", "z"]), b in poly(&["x", "y", "z"]), pt in prop::collection::vec(unit(), 3)) {
        let vars = ["x", "y", "z"];
        let e = |p: &MultiPoly| p.eval(&at(&vars, &pt)).unwrap();
        prop_assert_eq!(e(&a.mul(&b)), e(&a) * e(&b));
        prop_assert_eq!(e(&a.add(&b)), e(&a) + e(&b));
        prop_assert_eq!(e(&a.flip_var("y")), {
            let mut flipped = pt.clone();
            flipped[1] = Rational::one() - &pt[1];
            b_eval(&a, &vars, &flipped)
        });
    }

    #[test]
    fn passing_polynomials_are_nonnegative(p in poly(&["x", "y"]), pts in prop::collection::vec((unit(), unit()), 16)) {
        let report = linear_test(&p, &["y".to_string(), "x".to_string()]);
        if report.passed() {
            for (x, y) in pts {
                prop_assert!(p.eval(&at(&["x", "y"], &[x, y])).unwrap() >= Rational::zero());
            }
        }
    }

    #[test]
    fn bridge_bounded_by_double(level in 1u32..=12, k in 0u64..4096) {
        let k = k % ((1u64 << (level - 1)) + 1);
        let t = DyadicRational::new(k, level);
        let v = bridge_value(&t, Precision::new(64)).unwrap();
        prop_assert!(v.lo() <= &(t.to_rational() * q(2, 1)));
        prop_assert!(v.lo() >= &Rational::zero() && v.hi() <= &Rational::one());
    }

    #[test]
    fn dyadic_parents_bracket(level in 2u32..=20, k in 0u64..(1 << 19)) {
        let k = 2 * (k % (1u64 << (level - 1))) + 1;
        let t = DyadicRational::new(k, level);
        let (lo, hi) = t.parents().unwrap();
        prop_assert_eq!(lo.midpoint(&hi), t.clone());
        prop_assert!(lo.level() < level && hi.level() < level);
    }
}

fn b_eval(p: &MultiPoly, vars: &[&str], pt: &[Rational]) -> Rational {
    p.eval(&at(vars, pt)).unwrap()
}

#[test]
fn bridge_strictly_increasing_on_d10() {
    let cache = BridgeCache::build(10, Precision::new(64)).unwrap();
    for w in cache.values().windows(2) {
        assert!(w[0].hi() < w[1].lo());
    }
}

#[test]
fn dp_below_inverse_square_bound() {
    let grid = dp_oracle(DpGrid::new(8, q(1, 64), q(4, 1), 64).unwrap());
    for i in 0..grid.points() {
        let x = grid.x(i);
        let bound = Rational::one() / (Rational::one() + &x * &x);
        for k in 0..=8 {
            assert!(grid.value(k, i) <= bound, "depth {k} at x = {x}");
        }
    }
}
