use num_traits::ToPrimitive;
use proptest::prelude::*;
use renorm_core::conjugacy::{backward_equidistribution, twist_experiment, BackwardModel, Graph, RationalFunction2};
use renorm_core::ratmaps::MultiPoly;
use renorm_core::Q;

fn poly() -> impl Strategy<Value = MultiPoly> {
    prop::collection::vec(((0u32..=2, 0u32..=2), -4i64..=4), 1..5).prop_map(|terms| {
        MultiPoly::from_terms(2, terms.into_iter().map(|((a, b), c)| (vec![a, b], Q::from_integer(c.into()))))
    })
}

fn nonzero_poly() -> impl Strategy<Value = MultiPoly> {
    poly().prop_filter("nonzero", |p| !p.is_zero())
}

fn rational() -> impl Strategy<Value = RationalFunction2> {
    (poly(), nonzero_poly()).prop_map(|(n, d)| RationalFunction2::new(n, d).unwrap())
}

fn close(a: f64, b: f64) -> bool {
    !a.is_finite() || !b.is_finite() || (a - b).abs() <= 1e-7 * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_operations_match_pointwise_arithmetic(
        f in rational(),
        g in rational(),
        x in prop::array::uniform2(-2.0f64..2.0),
    ) {
        let (a, b) = (f.eval_f64(&x), g.eval_f64(&x));
        prop_assume!(a.is_finite() && b.is_finite() && b.abs() > 1e-6 && a.abs() < 1e6 && b.abs() < 1e6);
        prop_assert!(close(f.add(&g).eval_f64(&x), a + b));
        prop_assert!(close(f.sub(&g).eval_f64(&x), a - b));
        prop_assert!(close(f.mul(&g).eval_f64(&x), a * b));
        if !g.is_zero() {
            prop_assert!(close(f.div(&g).unwrap().eval_f64(&x), a / b));
        }
        prop_assert!(f.sub(&f).is_zero());
        prop_assert!(f.add(&g).equals(&g.add(&f)));
        prop_assert!(f.mul(&g).equals(&g.mul(&f)));
    }

    #[test]
    fn composition_matches_pointwise_evaluation(
        f in rational(),
        g in rational(),
        h in rational(),
        x in prop::array::uniform2(-2.0f64..2.0),
    ) {
        let inner = [g.eval_f64(&x), h.eval_f64(&x)];
        prop_assume!(inner.iter().all(|v| v.is_finite() && v.abs() < 1e3));
        let Ok(c) = f.compose(&[g.clone(), h.clone()]) else { return Ok(()); };
        let want = f.eval_f64(&inner);
        prop_assume!(want.is_finite() && want.abs() < 1e6);
        prop_assert!(close(c.eval_f64(&x), want), "{} vs {}", c.eval_f64(&x), want);
    }

    #[test]
    fn exact_evaluation_agrees_with_float(f in rational(), x in prop::array::uniform2(-6i64..=6)) {
        let xq = x.map(|v| Q::new(v.into(), 3.into()));
        let xf = x.map(|v| v as f64 / 3.0);
        if let Ok(v) = f.eval(&xq) {
            prop_assert!(close(v.to_f64().unwrap(), f.eval_f64(&xf)));
        }
    }
}

#[test]
fn twist_count_equals_level() {
    for n in 1..=9 {
        let r = twist_experiment(n, &Graph::line(1.0 / 3.0, 5.0), &Graph::line(1.0, 0.5)).unwrap();
        assert_eq!(r.count, n, "level {n}");
        assert_eq!(r.roots.len(), n);
        assert!((r.measure.mass() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn backward_orbits_approach_the_limit_law() {
    for (model, seed) in [(BackwardModel::Square, 1.7), (BackwardModel::Cheb, 0.3), (BackwardModel::Cantor, 0.5)] {
        let r = backward_equidistribution(model, seed, 12).unwrap();
        for w in r.w1[3..].windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-9) + 1e-12, "{model:?}: {:?}", r.w1);
        }
        assert!(r.w1[11] < r.w1[0], "{model:?}");
    }
}
