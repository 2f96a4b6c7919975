use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;
use renorm_core::groups::Builtin;
use renorm_core::ratmaps::{
    potential, reduce_triple, BinaryForm, MapName, PotentialValue, RationalMapP2, RecursionPotential,
};
use renorm_core::{PencilScheme, Q};

const MAPS: [MapName; 3] = [MapName::RG, MapName::RL, MapName::RH];

fn map() -> impl Strategy<Value = RationalMapP2> {
    prop::sample::select(MAPS.to_vec()).prop_map(RationalMapP2::builtin)
}

fn triple() -> impl Strategy<Value = [i64; 3]> {
    prop::array::uniform3(-20i64..=20).prop_filter("nonzero", |v| v.iter().any(|&x| x != 0))
}

fn qs(v: [i64; 3]) -> [Q; 3] {
    v.map(|x| Q::from_integer(x.into()))
}

fn ints(v: [i64; 3]) -> [BigInt; 3] {
    v.map(BigInt::from)
}

/// Cross products vanish iff the triples are projectively equal.
fn same_point(a: &[BigInt; 3], b: &[BigInt; 3]) -> bool {
    (0..3).all(|i| (i + 1..3).all(|j| &a[i] * &b[j] == &a[j] * &b[i]))
}

#[test]
fn potential_converges_on_the_slice_and_is_singular_on_the_spectrum() {
    let s = RecursionPotential { scheme: PencilScheme::builtin(Builtin::Grigorchuk).unwrap() };
    let u = |n| potential(&s, -1.0, 0.2, n).unwrap();
    let (PotentialValue::Finite(a), PotentialValue::Finite(b)) = (u(18), u(20)) else {
        panic!("expected finite values");
    };
    assert!((a - b).abs() < 1e-6, "{a} vs {b}");
    assert_eq!(potential(&s, -1.0, 2.0, 12).unwrap(), PotentialValue::NegInfinity);
}

#[test]
fn degrees_are_submultiplicative() {
    for name in MAPS {
        let f = RationalMapP2::builtin(name);
        let degs = f.dynamical_degree(6, 2, 11).unwrap().degrees;
        let d1 = degs[0];
        for k in 1..degs.len() {
            assert!(degs[k] <= degs[k - 1] * d1, "{name:?}: {degs:?}");
            for j in 0..k {
                assert!(degs[k] <= degs[j] * degs[k - 1 - j], "{name:?}: {degs:?}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn eval_is_projectively_invariant(f in map(), p in triple(), c in prop::sample::select(vec![-3i64, 2, 7])) {
        let scaled = p.map(|x| x * c);
        match (f.eval_exact(&qs(p)), f.eval_exact(&qs(scaled))) {
            (Ok(a), Ok(b)) => prop_assert_eq!(a, b),
            (Err(_), Err(_)) => {}
            other => prop_assert!(false, "{:?}", other),
        }
    }

    #[test]
    fn reduction_is_idempotent(f in map(), p in triple(), q in triple()) {
        let b: [BinaryForm; 3] = std::array::from_fn(|i| BinaryForm::linear(BigInt::from(p[i]), BigInt::from(q[i])));
        let img = f.apply_to_forms(&b);
        prop_assume!(!img.iter().all(BinaryForm::is_zero));
        let once = reduce_triple(img).unwrap();
        prop_assert_eq!(reduce_triple(once.clone()).unwrap(), once);
    }

    #[test]
    fn iterated_forms_track_iterated_points(
        f in map(),
        p in triple(),
        q in triple(),
        st in prop::array::uniform2(-4i64..=4),
    ) {
        prop_assume!(st != [0, 0]);
        let n = 2;
        let Ok(forms) = f.iterate_forms(&ints(p), &ints(q), n) else { return Ok(()); };
        let (s, t) = (BigInt::from(st[0]), BigInt::from(st[1]));
        let via_forms: [BigInt; 3] = std::array::from_fn(|i| forms[i].eval(&s, &t));
        prop_assume!(!via_forms.iter().all(Zero::is_zero));
        let mut x = qs(std::array::from_fn(|i| st[0] * p[i] + st[1] * q[i]));
        for _ in 0..n {
            match f.eval_exact(&x) {
                Ok(v) => x = v.map(Q::from_integer),
                Err(_) => return Ok(()),
            }
        }
        let direct = x.map(|c| c.to_integer());
        prop_assert!(same_point(&via_forms, &direct), "{:?} vs {:?}", via_forms, direct);
    }
}

#[test]
fn first_dynamical_degree_is_at_most_the_degree() {
    for (name, deg) in [(MapName::RG, 3.0), (MapName::RL, 2.0), (MapName::RH, 4.0)] {
        let d = RationalMapP2::builtin(name).dynamical_degree(6, 1, 5).unwrap();
        assert_eq!(d.degrees[0] as f64, deg, "{name:?}");
        assert!(d.estimate <= deg + 1e-9, "{name:?}: {}", d.estimate);
    }
}
