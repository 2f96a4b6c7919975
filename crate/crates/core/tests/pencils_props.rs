use proptest::prelude::*;
use renorm_core::groups::Builtin;
use renorm_core::pencils::{det_exact, det_poly, schur_complement, PencilScheme, RatMatrix, SchurSide};
use renorm_core::ratmaps::MultiPoly;
use renorm_core::Q;

fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

fn block(m: &RatMatrix, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> RatMatrix {
    m[rows].iter().map(|r| r[cols.clone()].to_vec()).collect()
}

fn builtin() -> impl Strategy<Value = Builtin> {
    prop::sample::select(vec![Builtin::Grigorchuk, Builtin::Lamplighter, Builtin::Hanoi])
}

#[test]
fn grigorchuk_level_one_closed_form() {
    let s = PencilScheme::builtin(Builtin::Grigorchuk).unwrap();
    let d = det_poly(&s.assemble_poly(1).unwrap());
    let want = MultiPoly::parse("(2 - m - l)*(2 - m + l)", &["l", "m"]).unwrap();
    assert!(d == want || d == -&want);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn pencils_are_symmetric(b in builtin(), l in -5.0f64..5.0, m in -5.0f64..5.0, n in 1usize..=4) {
        let s = PencilScheme::builtin(b).unwrap();
        prop_assume!(n >= s.min_level);
        let a = s.assemble_f64(n, l, m).unwrap();
        let size = (a.len() as f64).sqrt() as usize;
        for i in 0..size {
            for j in 0..i {
                prop_assert_eq!(a[i * size + j], a[j * size + i]);
            }
        }
    }

    #[test]
    fn determinant_factors_through_schur_complement(
        size in 2usize..=5,
        split_frac in 0.2f64..0.8,
        entries in prop::collection::vec((-9i64..=9, 1i64..=5), 25),
    ) {
        let split = ((size as f64 * split_frac) as usize).clamp(1, size - 1);
        let m: RatMatrix = (0..size).map(|i| (0..size).map(|j| {
            let (n, d) = entries[i * 5 + j];
            q(n, d)
        }).collect()).collect();
        let dblock = block(&m, split..size, split..size);
        let det_d = det_exact(&dblock);
        prop_assume!(det_d != Q::from_integer(0.into()));
        let s1 = schur_complement(&m, split, SchurSide::One).unwrap();
        prop_assert_eq!(det_exact(&m), det_d * det_exact(&s1));
    }

    #[test]
    fn recursion_holds_at_seeded_points(b in builtin(), seed in 0u64..1000) {
        let s = PencilScheme::builtin(b).unwrap();
        let n = 2;
        let r = s.verify_recursion(n, 3, seed).unwrap();
        prop_assert!(r.failures.is_empty(), "{:?}", r.failures);
    }
}
