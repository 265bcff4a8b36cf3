//! Brute-force isomorphism and automorphism counts against the canonical
//! encoder.

use aromakit::forest::{generate, Forest, Kind};
use aromakit::util::permutations;
use num_bigint::BigUint;
use proptest::prelude::*;
use std::collections::HashSet;

/// All node bijections π with π(f) = g, respecting kinds, edges and the
/// numbering of roots.
fn isomorphisms(f: &Forest, g: &Forest) -> usize {
    let n = f.len();
    if n != g.len() || f.num_roots() != g.num_roots() {
        return 0;
    }
    permutations(n)
        .into_iter()
        .filter(|(pi, _)| {
            (0..n).all(|v| f.kind(v) == g.kind(pi[v]) && f.succ(v).map(|s| pi[s]) == g.succ(pi[v]))
                && f.roots().iter().zip(g.roots()).all(|(&r, &s)| pi[r] == s)
        })
        .count()
}

fn raw_forest(n: usize, p: usize, succ_choice: &[usize], root_flags: &[bool], perm_seed: &[usize]) -> Forest {
    let mut kinds = vec![Kind::Vertex; n];
    for (i, k) in kinds.iter_mut().enumerate().take(p) {
        *k = Kind::Covertex(i as u32 + 1);
    }
    let succ: Vec<Option<usize>> = (0..n).map(|v| (!root_flags[v]).then(|| succ_choice[v] % n)).collect();
    let mut roots: Vec<usize> = (0..n).filter(|&v| root_flags[v]).collect();
    let k = roots.len();
    if k > 1 {
        for i in (1..k).rev() {
            roots.swap(i, perm_seed[i] % (i + 1));
        }
    }
    Forest::new(kinds, succ, roots).expect("valid raw forest")
}

fn relabel_nodes(f: &Forest, pi: &[usize]) -> Forest {
    let n = f.len();
    let mut kinds = vec![Kind::Vertex; n];
    let mut succ = vec![None; n];
    for v in 0..n {
        kinds[pi[v]] = f.kind(v);
        succ[pi[v]] = f.succ(v).map(|s| pi[s]);
    }
    let roots = f.roots().iter().map(|&r| pi[r]).collect();
    Forest::new(kinds, succ, roots).expect("relabelled forest")
}

fn forest_strategy() -> impl Strategy<Value = Forest> {
    (1usize..=6).prop_flat_map(|n| {
        (
            Just(n),
            0..=n.min(2),
            prop::collection::vec(0..n, n),
            prop::collection::vec(prop::bool::weighted(0.3), n),
            prop::collection::vec(0usize..720, n),
        )
            .prop_map(|(n, p, s, r, perm)| raw_forest(n, p, &s, &r, &perm))
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn code_is_invariant_under_relabelling(f in forest_strategy(), seed in 0usize..720) {
        let perms = permutations(f.len());
        let (pi, _) = &perms[seed % perms.len()];
        let g = relabel_nodes(&f, pi);
        prop_assert_eq!(f.code(), g.code());
        prop_assert_eq!(f.canonicalize().canonicalize(), f.canonicalize());
        prop_assert!(isomorphisms(&f, &f.canonicalize()) > 0);
    }

    #[test]
    fn equal_codes_iff_isomorphic(f in forest_strategy(), g in forest_strategy()) {
        prop_assert_eq!(f.code() == g.code(), isomorphisms(&f, &g) > 0);
    }

    #[test]
    fn symmetry_matches_brute_force(f in forest_strategy()) {
        prop_assert_eq!(f.symmetry_order(), BigUint::from(isomorphisms(&f, &f)));
    }
}

#[test]
fn generated_forests_are_distinct_classes() {
    for order in 1..=5 {
        for roots in 0..=2 {
            for p in 0..=1 {
                let all = generate(order, roots, p, false).unwrap_or_default();
                let codes: HashSet<_> = all.iter().map(|f| f.code()).collect();
                assert_eq!(codes.len(), all.len());
                for f in &all {
                    assert_eq!(f.symmetry_order(), BigUint::from(isomorphisms(f, f)), "{f}");
                }
            }
        }
    }
}

#[test]
fn generation_is_complete_on_small_orders() {
    // Every labelled functional graph on up to 4 nodes with one root lands
    // in a generated class.
    for n in 1..=4usize {
        let known: HashSet<_> = generate(n, 1, 0, false).unwrap().iter().map(|f| f.code()).collect();
        let mut found = HashSet::new();
        let total = n.pow(n as u32);
        for root in 0..n {
            for code in 0..total {
                let mut c = code;
                let succ: Vec<Option<usize>> = (0..n)
                    .map(|v| {
                        let s = c % n;
                        c /= n;
                        (v != root).then_some(s)
                    })
                    .collect();
                let f = Forest::new(vec![Kind::Vertex; n], succ, vec![root]).unwrap();
                found.insert(f.code());
            }
        }
        assert_eq!(found, known, "n = {n}");
    }
}
