use proptest::prelude::*;
use renorm_core::cohomology::{
    invariant_classes, lamplighter_push_from_relations, map_action, printed, Basis, BlowupSurface, DivisorClass, IMat,
};

fn mat_vec(m: &IMat, v: &[i64]) -> Vec<i64> {
    m.iter().map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

fn surfaces() -> Vec<(BlowupSurface, IMat, i64)> {
    let s = |n| BlowupSurface::preset(n).unwrap();
    vec![
        (s("grigorchuk4"), printed::grig_push(), 2),
        (s("lamplighter2"), lamplighter_push_from_relations(), 1),
        (s("hanoi4"), printed::hanoi_push(), 2),
    ]
}

fn class(x: &BlowupSurface, v: &[i64]) -> DivisorClass {
    DivisorClass::new(v.to_vec(), x.basis)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn pushforward_and_pullback_are_adjoint(
        which in 0usize..3,
        a in prop::collection::vec(-9i64..=9, 5),
        b in prop::collection::vec(-9i64..=9, 5),
    ) {
        let (x, push, d) = surfaces().swap_remove(which);
        let n = x.dim();
        let (a, b) = (&a[..n], &b[..n]);
        let act = map_action(&x, &push, d as u32).unwrap();
        let lhs = x.intersection(&class(&x, &mat_vec(&act.push, a)), &class(&x, b)).unwrap();
        let rhs = x.intersection(&class(&x, a), &class(&x, &mat_vec(&act.pull, b))).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn change_of_basis_preserves_intersections(
        which in 0usize..3,
        a in prop::collection::vec(-9i64..=9, 5),
        b in prop::collection::vec(-9i64..=9, 5),
    ) {
        let (x, _, _) = surfaces().swap_remove(which);
        let n = x.dim();
        let (ca, cb) = (class(&x, &a[..n]), class(&x, &b[..n]));
        let std = x.with_basis(Basis::Standard);
        let (sa, sb) = (x.convert(&ca, Basis::Standard).unwrap(), x.convert(&cb, Basis::Standard).unwrap());
        prop_assert_eq!(x.intersection(&ca, &cb).unwrap(), std.intersection(&sa, &sb).unwrap());
        prop_assert_eq!(std.convert(&sa, Basis::Adapted).unwrap(), ca);
    }
}

#[test]
fn invariant_candidates_satisfy_their_certificates() {
    for (x, push, d) in surfaces() {
        let act = map_action(&x, &push, d as u32).unwrap();
        let rep = invariant_classes(&x, &act, d, &x.default_effective()).unwrap();
        assert!(!rep.candidates().is_empty(), "{}", x.name);
        for c in rep.candidates() {
            let v = &c.class.coords;
            assert_eq!(mat_vec(&act.pull, v), v.iter().map(|a| a * d).collect::<Vec<_>>(), "{}", x.name);
            assert_eq!(x.intersection(&c.class, &c.class).unwrap(), c.self_intersection);
            assert_eq!(x.intersection(&c.class, &x.canonical()).unwrap(), c.dot_canonical);
            for e in x.default_effective() {
                assert!(x.intersection(&c.class, &e).unwrap() >= 0, "{}", x.name);
            }
        }
    }
}
