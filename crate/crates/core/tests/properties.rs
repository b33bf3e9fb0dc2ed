use proptest::prelude::*;

use pdp_core::cyclic::{cyclic_pdp, develop, factorization_condition, Factorization};
use pdp_core::design::{ParallelClass, Point, Schedule};
use pdp_core::hosts::{assign_hosts, perfect_matching, IncidenceGraph};
use pdp_core::latin::{gf_mols, pdp_from_family};
use pdp_core::planner::{generate, GenerateOptions};
use pdp_core::search::{search_pdp, SearchConfig, SearchMode};
use pdp_core::verify::{pair_multiset, verify};

fn permutation(n: usize) -> impl Strategy<Value = Vec<Point>> {
    Just((0..n as Point).collect::<Vec<_>>()).prop_shuffle()
}

/// `k` classes on `k * w` points, each an arbitrary partition into `k`-sets.
fn random_classes(max_k: usize, max_w: usize) -> impl Strategy<Value = (usize, Vec<ParallelClass>)> {
    (3..=max_k, 1..=max_w).prop_flat_map(|(k, w)| {
        let v = k * w;
        proptest::collection::vec(permutation(v), k).prop_map(move |perms| {
            let classes = perms
                .into_iter()
                .map(|p| ParallelClass::from_member_lists(p.chunks(k).map(<[Point]>::to_vec)))
                .collect();
            (k, classes)
        })
    })
}

/// A valid design from the planner, relabeled by a random permutation.
fn relabeled_design() -> impl Strategy<Value = Schedule> {
    prop_oneof![
        (3usize..=20).prop_map(|w| (3, w)),
        (4usize..=15).prop_map(|w| (4, w)),
        (5usize..=11).prop_map(|w| (5, w)),
    ]
    .prop_flat_map(|(k, w)| {
        let s = generate(k, k * w, &GenerateOptions::default()).unwrap().1;
        let v = s.v;
        (Just(s), permutation(v))
    })
    .prop_map(|(s, perm)| s.relabel(&perm))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn union_of_perfect_matchings_is_matchable(
        (v, perms) in (1usize..=200, 1usize..=6)
            .prop_flat_map(|(v, k)| (Just(v), proptest::collection::vec(permutation(v), k)))
    ) {
        let edges: Vec<(usize, usize)> = perms
            .iter()
            .flat_map(|p| p.iter().enumerate().map(|(l, &r)| (l, r as usize)))
            .collect();
        let g = IncidenceGraph::from_edges(v, v, &edges);
        let m = perfect_matching(&g).unwrap();
        prop_assert_eq!(m.len(), v);
        let mut rights: Vec<usize> = m.pairs.iter().map(|&(_, r)| r).collect();
        rights.sort_unstable();
        prop_assert_eq!(rights, (0..v).collect::<Vec<_>>());
        for &(l, r) in &m.pairs {
            prop_assert!(g.neighbours(l).contains(&r));
        }
    }

    #[test]
    fn hosts_for_any_partitions((k, classes) in random_classes(6, 12)) {
        let s = assign_hosts(&classes).unwrap();
        let r = verify(&s).unwrap();
        prop_assert!(r.axiom1_ok && r.axiom3_ok, "{:?}", r.violations);
        prop_assert_eq!(s.k, k);
        prop_assert_eq!(&s.without_hosts().classes, &classes);
    }

    #[test]
    fn pair_total((_, classes) in random_classes(6, 12)) {
        let s = assign_hosts(&classes).unwrap();
        let total: usize = pair_multiset(&s).values().sum();
        prop_assert_eq!(total, s.v * s.k * (s.k - 1) / 2);
    }

    #[test]
    fn rehosting_preserves_pairs(s in relabeled_design()) {
        let rehosted = assign_hosts(&s.without_hosts().classes).unwrap();
        prop_assert_eq!(pair_multiset(&rehosted), pair_multiset(&s));
        prop_assert!(verify(&rehosted).unwrap().is_valid());
    }

    #[test]
    fn relabeling_keeps_validity(s in relabeled_design()) {
        prop_assert!(verify(&s).unwrap().is_valid());
    }

    #[test]
    fn verify_is_pure((_, classes) in random_classes(5, 8)) {
        let s = assign_hosts(&classes).unwrap();
        let before = s.clone();
        let a = verify(&s).unwrap();
        let b = verify(&s).unwrap();
        prop_assert_eq!(a, b);
        prop_assert_eq!(s, before);
    }

    #[test]
    fn json_round_trip((_, classes) in random_classes(6, 10)) {
        let s = assign_hosts(&classes).unwrap();
        prop_assert_eq!(Schedule::from_json(&s.to_json()).unwrap(), s.clone());
        prop_assert_eq!(Schedule::from_json(&s.to_json_pretty()).unwrap(), s);
    }

    #[test]
    fn cyclic_succeeds_iff_condition(k in 3usize..=8, w in 3usize..=64) {
        prop_assume!(w >= k);
        let holds = factorization_condition(k, w) == Factorization::Holds;
        prop_assert_eq!(cyclic_pdp(k, w).is_ok(), holds);
        prop_assert_eq!(verify(&develop(k, w)).unwrap().is_valid(), holds);
    }

    #[test]
    fn mols_pipeline_is_valid(q in prop::sample::select(vec![3usize, 4, 5, 7, 8, 9, 11]), k in 3usize..=6) {
        prop_assume!(k <= q);
        let family = gf_mols(q, k - 1).unwrap();
        let s = pdp_from_family(k, &family).unwrap();
        prop_assert!(verify(&s).unwrap().is_valid());
    }

    #[test]
    fn search_is_deterministic(seed in any::<u64>(), w in 3usize..=5) {
        let config = SearchConfig { mode: SearchMode::Find, budget: 50_000, seed, ..SearchConfig::default() };
        let a = search_pdp(3, 3 * w, &config).unwrap();
        let b = search_pdp(3, 3 * w, &config).unwrap();
        prop_assert_eq!(a.stats_json(), b.stats_json());
        prop_assert_eq!(a.found().cloned(), b.found().cloned());
        if let Some(s) = a.found() {
            prop_assert!(verify(s).unwrap().is_valid());
        }
    }
}
