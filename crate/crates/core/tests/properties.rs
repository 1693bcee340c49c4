use std::collections::HashMap;
use std::sync::Arc;

use corec::laws::{gen_system, GenBounds};
use corec::monad::{decompose, kleisli_extend, recompose};
use corec::solve::substitute_rhs;
use corec::tree::enumerate_graphs;
use corec::{Class, EqSystem, Name, Node, OpId, Rhs, Signature};
use corec::RatTree;
use proptest::prelude::*;

fn sig() -> Arc<Signature> {
    Signature::new(&[("*", 2), ("s", 1), ("c", 0)]).unwrap()
}

/// Raw graphs of 1..=8 nodes over `*/2, s/1, c/0` and leaves `a, b`.
fn arb_tree() -> impl Strategy<Value = RatTree> {
    prop::collection::vec((0u8..5, 0usize..8, 0usize..8), 1..=8).prop_map(|raw| {
        let n = raw.len();
        let nodes = raw
            .into_iter()
            .map(|(kind, l, r)| match kind {
                0 => Node::Op { op: OpId(0), children: vec![l % n, r % n] },
                1 => Node::Op { op: OpId(1), children: vec![l % n] },
                2 => Node::Op { op: OpId(2), children: vec![] },
                3 => Node::Param(Name::from("a")),
                _ => Node::Param(Name::from("b")),
            })
            .collect();
        RatTree::from_graph(sig(), nodes, 0).unwrap()
    })
}

fn arb_map() -> impl Strategy<Value = HashMap<Name, RatTree>> {
    (arb_tree(), arb_tree()).prop_map(|(a, b)| HashMap::from([(Name::from("a"), a), (Name::from("b"), b)]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn minimize_preserves_unfoldings(t in arb_tree(), d in 0usize..10) {
        prop_assert_eq!(t.minimize().unfold(d), t.unfold(d));
    }

    #[test]
    fn minimize_is_idempotent_and_counts_classes(t in arb_tree()) {
        let m = t.minimize();
        prop_assert_eq!(m.minimize(), m.clone());
        prop_assert_eq!(t.count_subtrees(), m.len());
        prop_assert!(m.len() <= t.len());
        // distinct nodes of a minimal graph are never bisimilar
        for i in 0..m.len() {
            for j in (i + 1)..m.len() {
                prop_assert!(!m.subtree(i).bisim_eq(&m.subtree(j)).unwrap());
            }
        }
    }

    #[test]
    fn bisim_matches_unfold_oracle(t in arb_tree(), u in arb_tree()) {
        let bound = t.len() * u.len();
        let oracle = (0..=bound).all(|d| t.unfold(d) == u.unfold(d));
        prop_assert_eq!(t.bisim_eq(&u).unwrap(), oracle);
        prop_assert_eq!(u.bisim_eq(&t).unwrap(), oracle);
        prop_assert!(t.bisim_eq(&t).unwrap());
    }

    #[test]
    fn bisim_is_transitive(t in arb_tree(), u in arb_tree(), v in arb_tree()) {
        if t.bisim_eq(&u).unwrap() && u.bisim_eq(&v).unwrap() {
            prop_assert!(t.bisim_eq(&v).unwrap());
        }
    }

    #[test]
    fn mstar_is_the_union_of_the_un(t in arb_tree()) {
        let some_n = (0..=t.len()).any(|n| t.is_in_un(n));
        prop_assert_eq!(t.is_in_mstar(), some_n);
    }

    #[test]
    fn decompose_round_trips(t in arb_tree()) {
        let d = decompose(&t);
        prop_assert!(recompose(&sig(), &d).unwrap().bisim_eq(&t).unwrap());
        prop_assert_eq!(matches!(d, corec::Decomposed::Param(_)), matches!(t.root_node(), Node::Param(_)));
    }

    #[test]
    fn extension_preserves_mstar(t in arb_tree(), h in arb_map()) {
        if t.is_in_mstar() && h.values().all(RatTree::is_in_mstar) {
            prop_assert!(kleisli_extend(h).apply(&t).unwrap().is_in_mstar());
        }
    }

    #[test]
    fn text_round_trip(t in arb_tree()) {
        let m = t.minimize();
        let text = m.to_string();
        let back = corec::parse_tree(&sig(), &text).unwrap();
        prop_assert!(back.bisim_eq(&m).unwrap());
        prop_assert_eq!(back.minimize().to_string(), text);
    }

    #[test]
    fn solutions_satisfy_their_equations(seed in 0u64..1_000_000) {
        let e = gen_system(seed, &GenBounds::default());
        let s = e.solve_strict();
        let map = s.as_map();
        for ((_, r), v) in e.equations().zip(s.values()) {
            let once = substitute_rhs(r, s.sig(), &map).unwrap();
            prop_assert!(v.bisim_eq(&once).unwrap());
        }
        let chain = e.derived_chain();
        prop_assert!(chain.stable_index() <= e.len());
        for x in chain.x_infinity() {
            prop_assert_eq!(s.values()[*x].to_string(), "bot()");
        }
        if e.classify() != Class::General {
            prop_assert!(chain.stage(1).is_empty());
            prop_assert!(e.solve_unique().unwrap().bisim_eq(&s).unwrap());
        }
    }

    #[test]
    fn parameterless_solutions_are_closed(seed in 0u64..1_000_000) {
        let bounds = GenBounds { params: vec![], ..GenBounds::default() };
        let e = gen_system(seed, &bounds);
        for v in e.solve_strict().values() {
            prop_assert!(v.is_closed());
            prop_assert_eq!(v.param_occurrences(), corec::Occurrences::Finite(Default::default()));
        }
    }

    #[test]
    fn self_substitution_keeps_solutions(seed in 0u64..1_000_000) {
        let e = gen_system(seed, &GenBounds::default());
        prop_assert!(e.solve_strict().bisim_eq(&e.self_substitute().solve_strict()).unwrap());
    }
}

/// Every assignment from a pool of candidate trees that satisfies the fixpoint
/// identity, with `pinned` variables forced to `bot`.
fn fixpoint_assignments(e: &EqSystem, pool: &[RatTree], pinned: &[usize]) -> Vec<Vec<usize>> {
    let n = e.len();
    let bot = corec::parse_tree(&e.sig().strict_closure(), "bot()").unwrap();
    let mut out = Vec::new();
    let total = pool.len().pow(n as u32);
    for code in 0..total {
        let mut rest = code;
        let choice: Vec<usize> = (0..n)
            .map(|_| {
                let c = rest % pool.len();
                rest /= pool.len();
                c
            })
            .collect();
        let values: Vec<RatTree> = (0..n)
            .map(|x| if pinned.contains(&x) { bot.clone() } else { pool[choice[x]].clone() })
            .collect();
        if pinned.iter().any(|&x| choice[x] != 0) {
            continue;
        }
        let map: HashMap<Name, RatTree> = e.vars().iter().cloned().zip(values.iter().cloned()).collect();
        let ok = e.equations().zip(&values).all(|((_, r), v)| {
            let sig = e.sig().strict_closure();
            substitute_rhs(r, &sig, &map).unwrap().bisim_eq(v).unwrap()
        });
        if ok {
            out.push(choice);
        }
    }
    out
}

#[test]
fn ideal_solutions_are_unique_among_small_candidates() {
    let sig = Signature::new(&[("*", 2), ("c", 0)]).unwrap();
    let pool = enumerate_graphs(&sig, &["a"], 3);
    let bounds = GenBounds {
        sig: sig.clone(),
        max_vars: 2,
        params: vec![Name::from("a")],
        max_rhs_nodes: 3,
        guarded: 1.0,
    };
    let mut checked = 0;
    for seed in 0..300 {
        let e = gen_system(seed, &bounds);
        let sol = e.solve_unique().unwrap();
        if sol.values().iter().any(|v| v.len() > 3 || v.to_string().contains("bot")) {
            continue;
        }
        let found = fixpoint_assignments(&e, &pool, &[]);
        assert_eq!(found.len(), 1, "seed {seed}: {e}");
        for (x, &c) in found[0].iter().enumerate() {
            assert!(pool[c].bisim_eq(&sol.values()[x]).unwrap());
        }
        checked += 1;
    }
    assert!(checked > 50, "only {checked} systems had small solutions");
}

#[test]
fn strict_solutions_are_unique_among_small_candidates() {
    let sig = Signature::new(&[("s", 1), ("c", 0)]).unwrap();
    let strict = sig.strict_closure();
    let mut pool = vec![corec::parse_tree(&strict, "bot()").unwrap()];
    pool.extend(enumerate_graphs(&strict, &["a"], 3).into_iter().filter(|t| t.to_string() != "bot()"));
    let bounds = GenBounds {
        sig,
        max_vars: 3,
        params: vec![Name::from("a")],
        max_rhs_nodes: 3,
        guarded: 0.5,
    };
    let mut checked = 0;
    for seed in 0..300 {
        let e = gen_system(seed, &bounds);
        let sol = e.solve_strict();
        if sol.values().iter().any(|v| v.len() > 3) {
            continue;
        }
        let pinned = e.derived_chain().x_infinity().to_vec();
        let found = fixpoint_assignments(&e, &pool, &pinned);
        assert_eq!(found.len(), 1, "seed {seed}: {e}");
        for (x, &c) in found[0].iter().enumerate() {
            assert!(pool[c].bisim_eq(&sol.values()[x]).unwrap());
        }
        if !pinned.is_empty() && e.classify() == Class::General {
            checked += 1;
        }
    }
    assert!(checked > 10, "only {checked} systems exercised bot");
}

#[test]
fn unguarded_systems_have_many_unconstrained_solutions() {
    // without pinning X_∞, x = x is satisfied by every candidate
    let e = corec::parse_system("sig u\nop s/1\nop c/0\nsys\nx = x\n").unwrap();
    let pool = enumerate_graphs(&e.sig().strict_closure(), &[] as &[&str], 2);
    assert_eq!(fixpoint_assignments(&e, &pool, &[]).len(), pool.len());
    assert!(matches!(e.rhs(0), Rhs::Var(_)));
}
