use proptest::prelude::*;
use renorm_core::groups::{Builtin, GroupSpec, LevelAction};

fn spec(b: Builtin) -> GroupSpec {
    GroupSpec::builtin(b).unwrap()
}

fn act(g: &GroupSpec, w: &str, n: usize) -> LevelAction {
    g.level_action(w, n).unwrap()
}

#[test]
fn grigorchuk_klein_relations() {
    let g = spec(Builtin::Grigorchuk);
    for n in 1..=10 {
        for x in ["a", "b", "c", "d"] {
            assert!(act(&g, &format!("{x}{x}"), n).is_identity(), "{x}^2 at level {n}");
        }
        assert_eq!(act(&g, "bc", n), act(&g, "d", n));
        assert_eq!(act(&g, "cd", n), act(&g, "b", n));
        assert_eq!(act(&g, "bd", n), act(&g, "c", n));
    }
}

/// The swap `σ = b⁻¹a` is read left to right (b⁻¹ first); with words acting
/// right to left it is the word `a b^-1`.
#[test]
fn lamplighter_swap_is_b_inverse_a() {
    let g = spec(Builtin::Lamplighter);
    for n in 1..=12 {
        let half = 1usize << (n - 1);
        let swap: Vec<usize> = (0..2 * half).map(|v| (v + half) % (2 * half)).collect();
        assert_eq!(act(&g, "a b^-1", n).perm, swap, "level {n}");
    }
}

#[test]
fn hanoi_generators_are_symmetric_involutions() {
    let g = spec(Builtin::Hanoi);
    for n in 1..=7 {
        for x in ["a", "b", "c"] {
            assert!(act(&g, &format!("{x}{x}"), n).is_identity());
            assert!(g.generator_matrix(x, n).unwrap().is_symmetric());
        }
    }
}

#[test]
fn collapsing_a_level_reproduces_the_previous_level() {
    for b in [Builtin::Grigorchuk, Builtin::Lamplighter, Builtin::Hanoi] {
        let g = spec(b);
        for name in g.generator_names() {
            for n in 2..=6 {
                assert_eq!(act(&g, name, n).collapse(), Some(act(&g, name, n - 1)), "{name} at {n}");
            }
        }
    }
}

fn word(b: Builtin) -> impl Strategy<Value = String> {
    let names: Vec<String> = spec(b).generator_names().iter().map(|s| s.to_string()).collect();
    prop::collection::vec((prop::sample::select(names), any::<bool>()), 0..12).prop_map(|toks| {
        toks.into_iter().map(|(g, inv)| if inv { format!("{g}^-1") } else { g }).collect::<Vec<_>>().join(" ")
    })
}

fn group() -> impl Strategy<Value = Builtin> {
    prop::sample::select(vec![Builtin::Grigorchuk, Builtin::Lamplighter, Builtin::Hanoi])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn words_act_bijectively((b, w) in group().prop_flat_map(|b| (Just(b), word(b))), n in 1usize..=6) {
        let g = spec(b);
        let a = act(&g, &w, n);
        prop_assert!(a.is_bijection());
        prop_assert!(a.compose(&a.inverse()).is_identity());
        if n > 1 {
            prop_assert_eq!(a.collapse(), Some(act(&g, &w, n - 1)));
        }
    }

    #[test]
    fn concatenation_is_composition(
        (b, u, v) in group().prop_flat_map(|b| (Just(b), word(b), word(b))),
        n in 1usize..=5,
    ) {
        let g = spec(b);
        let uv = act(&g, &format!("{u} {v}"), n);
        prop_assert_eq!(uv, act(&g, &u, n).compose(&act(&g, &v, n)));
    }
}
