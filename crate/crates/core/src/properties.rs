//! Property tests against the brute-force oracles in `tests/common`.

use std::sync::Arc;

use crate::brute::{brute_rank, first_circuit, ids, independent, independent_minor, set, small_instance};
use parbasis::baseline::{kuw_round, RoundOutcome};
use parbasis::decomposition::find_circuit;
use parbasis::decomposition::remove_small_circuits;
use parbasis::instance::MatroidInstance;
use parbasis::{
    general_find_basis, kuw_find_basis, partition_find_basis, ElementId, GeneralConfig, MatroidView,
    PartitionConfig, QuerySession,
};
use proptest::prelude::*;
use proptest::sample::subsequence;

fn instance() -> impl Strategy<Value = MatroidInstance> {
    (0u8..7, 2usize..10, any::<u64>()).prop_map(|(k, n, s)| small_instance(k, n, s))
}

fn with_subset() -> impl Strategy<Value = (MatroidInstance, Vec<usize>)> {
    instance().prop_flat_map(|m| {
        let n = m.ground_size();
        (Just(m), subsequence((0..n).collect::<Vec<_>>(), 0..=n))
    })
}

fn with_two_subsets() -> impl Strategy<Value = (MatroidInstance, Vec<usize>, Vec<usize>)> {
    instance().prop_flat_map(|m| {
        let n = m.ground_size();
        let all: Vec<usize> = (0..n).collect();
        (Just(m), subsequence(all.clone(), 0..=n), subsequence(all, 0..=n))
    })
}

fn view(m: &MatroidInstance) -> MatroidView {
    MatroidView::new(Arc::new(m.clone()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn oracle_matches_definition((m, s) in with_subset()) {
        let v = view(&m);
        prop_assert_eq!(v.is_independent(&set(m.ground_size(), &s)).unwrap(), independent(&m, &s));
    }

    #[test]
    fn downward_closed((m, s) in with_subset()) {
        let v = view(&m);
        if v.is_independent(&set(m.ground_size(), &s)).unwrap() {
            for i in 0..s.len() {
                let mut smaller = s.clone();
                smaller.remove(i);
                prop_assert!(v.is_independent(&set(m.ground_size(), &smaller)).unwrap());
            }
        }
    }

    #[test]
    fn exchange((m, a, b) in with_two_subsets()) {
        let v = view(&m);
        let n = m.ground_size();
        let (small, large) = if a.len() < b.len() { (a, b) } else { (b, a) };
        let ind = |s: &[usize]| v.is_independent(&set(n, s)).unwrap();
        if small.len() < large.len() && ind(&small) && ind(&large) {
            let extends = large.iter().filter(|x| !small.contains(x)).any(|&x| {
                let mut bigger = small.clone();
                bigger.push(x);
                ind(&bigger)
            });
            prop_assert!(extends);
        }
    }

    #[test]
    fn contraction_semantics((m, c, t) in with_two_subsets()) {
        let n = m.ground_size();
        let v = view(&m);
        let cs = set(n, &c);
        if !independent(&m, &c) {
            prop_assert!(v.contract(&cs).is_err());
            return Ok(());
        }
        let minor = v.contract(&cs).unwrap();
        let t: Vec<usize> = t.into_iter().filter(|x| !c.contains(x)).collect();
        prop_assert_eq!(minor.is_independent(&set(n, &t)).unwrap(), independent_minor(&m, &c, &t));
        prop_assert_eq!(minor.rank_greedy(), brute_rank(&m, &c, &ids(minor.alive())));
    }

    #[test]
    fn greedy_rank_matches_brute_force((m, d) in with_subset()) {
        let n = m.ground_size();
        let v = view(&m).delete(&set(n, &d)).unwrap();
        let alive = ids(v.alive());
        prop_assert_eq!(v.rank_greedy(), brute_rank(&m, &[], &alive));
        prop_assert!(v.is_basis(&v.greedy_basis()).unwrap());
    }

    #[test]
    fn first_circuit_matches_enumeration((m, order) in instance().prop_flat_map(|m| {
        let n = m.ground_size();
        (Just(m), Just((0..n).collect::<Vec<usize>>()).prop_shuffle())
    })) {
        let v = view(&m);
        let pi: Vec<ElementId> = order.iter().map(|&i| ElementId::new(i)).collect();
        let mut session = QuerySession::new(m.ground_size(), 0);
        let got = find_circuit(&v, &pi, &mut session).unwrap();
        let want = first_circuit(&m, &order);
        prop_assert_eq!(got.map(|c| (c.trigger_index, ids(&c.circuit))), want);
        prop_assert_eq!(session.rounds(), 1);
    }

    #[test]
    fn solvers_return_bases_and_replay(m in instance(), seed in any::<u64>()) {
        let v = view(&m);
        let rank = brute_rank(&m, &[], &ids(v.alive()));
        let runs: [&dyn Fn(&mut QuerySession) -> parbasis::Result<parbasis::ElementSet>; 2] = [
            &|s| kuw_find_basis(&v, s),
            &|s| general_find_basis(&v, s, &GeneralConfig::default()),
        ];
        for run in runs {
            let mut s1 = QuerySession::new(m.ground_size(), seed);
            let b1 = run(&mut s1).unwrap();
            prop_assert!(v.is_basis(&b1).unwrap());
            prop_assert_eq!(b1.len(), rank);
            let mut s2 = QuerySession::new(m.ground_size(), seed);
            let b2 = run(&mut s2).unwrap();
            prop_assert_eq!(&b1, &b2);
            prop_assert_eq!(s1.ledger(), s2.ledger());
        }
    }

    #[test]
    fn small_circuit_and_kuw_deletions_keep_rank((m, c) in with_subset(), seed in any::<u64>()) {
        let n = m.ground_size();
        let c: Vec<usize> = if independent(&m, &c) { c } else { Vec::new() };
        let v = view(&m).contract(&set(n, &c)).unwrap();
        let rank = v.rank_greedy();
        let mut session = QuerySession::new(n, seed);
        for threshold in 1..=3 {
            let cleared = remove_small_circuits(&v, &mut session, threshold).unwrap();
            prop_assert_eq!(cleared.rank_greedy(), rank);
        }
        if v.alive_len() > 0 {
            if let RoundOutcome::Deleted(d) = kuw_round(&v, &mut session).unwrap() {
                prop_assert_eq!(v.delete(&d).unwrap().rank_greedy(), rank);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partition_rank_identity(sizes in prop::collection::vec(1usize..8, 1..6), budget_seed in any::<u64>(), seed in any::<u64>()) {
        let mut parts = Vec::new();
        let mut budgets = Vec::new();
        let mut next = 0;
        for (i, &s) in sizes.iter().enumerate() {
            parts.push((next..next + s).collect::<Vec<_>>());
            budgets.push((budget_seed as usize >> (3 * i)) % (s + 1));
            next += s;
        }
        let expected: usize = sizes.iter().zip(&budgets).map(|(&s, &b)| s.min(b)).sum();
        let m = MatroidInstance::partition(next, parts, budgets).unwrap();
        let v = view(&m);
        prop_assert_eq!(v.rank_greedy(), expected);
        let mut session = QuerySession::new(next, seed);
        let b = partition_find_basis(&v, &mut session, &PartitionConfig::default()).unwrap();
        prop_assert_eq!(b.len(), expected);
        prop_assert!(v.is_basis(&b).unwrap());
    }
}
