mod common;

use common::{best_sw, perms, seq, sw};
use proptest::prelude::*;
use seqdict::osa::random_digraph_instance;
use seqdict::osm::{random_matching_instance, MatchingInstance};
use seqdict::oss::{nonmonotone_sat_instance, posd_sat_instance};
use seqdict::paths::posd_paths_instance;
use seqdict::seq::{is_subsequence, prefix_of};
use seqdict::seqopt::MonotoneInstance;
use seqdict::value::{int, ratio, zero};
use seqdict::welfare::{
    brute_force_optimal_sequence, check_monotone_exhaustive, price_of_serial_dictatorship,
    social_welfare, PosdRatio, UnderlyingProblem,
};
use seqdict::{ActionSeq, Caps, Error, Valuation, ValuationOracle};

#[test]
fn prefixes() {
    assert_eq!(prefix_of(&seq(&[2, 0, 1]), 0).unwrap(), seq(&[2]));
    assert_eq!(prefix_of(&seq(&[0, 1, 2]), 0).unwrap(), ActionSeq::empty());
    assert_eq!(prefix_of(&seq(&[2, 0, 1]), 1).unwrap(), seq(&[2, 0]));
    assert_eq!(prefix_of(&seq(&[2, 0]), 1), Err(Error::AgentNotInSequence(1)));
}

#[test]
fn subsequences() {
    assert!(is_subsequence(&[0, 2], &[0, 1, 2]));
    assert!(!is_subsequence(&[2, 0], &[0, 1, 2]));
    assert!(is_subsequence(&[], &[0, 1]));
}

#[test]
fn welfare_examples() {
    let single = MatchingInstance::from_weights(vec![vec![ratio(3, 2)]]).unwrap();
    let mut o = ValuationOracle::new(&single);
    assert_eq!(social_welfare(&mut o, &seq(&[0])).unwrap(), ratio(3, 2));

    let nonmono = nonmonotone_sat_instance();
    assert_eq!(social_welfare(&mut ValuationOracle::new(&nonmono), &seq(&[0, 1, 2])).unwrap(), int(11));

    let sat = posd_sat_instance(&ratio(1, 10)).unwrap();
    assert_eq!(social_welfare(&mut ValuationOracle::new(&sat), &seq(&[0, 1, 2])).unwrap(), ratio(39, 10));
}

#[test]
fn welfare_rejects_partial_sequences() {
    let inst = random_matching_instance(3, 1, 4);
    let mut o = ValuationOracle::new(&inst);
    assert!(matches!(
        social_welfare(&mut o, &seq(&[0, 1])),
        Err(Error::NotFull { len: 2, n: 3 })
    ));
}

#[test]
fn brute_force_examples() {
    let caps = Caps::default();
    let single = MatchingInstance::from_weights(vec![vec![int(5)]]).unwrap();
    let (s, v) = brute_force_optimal_sequence(&mut ValuationOracle::new(&single), &caps).unwrap();
    assert_eq!((s, v), (seq(&[0]), int(5)));

    let sat = posd_sat_instance(&ratio(1, 10)).unwrap();
    let (_, v) = brute_force_optimal_sequence(&mut ValuationOracle::new(&sat), &caps).unwrap();
    assert_eq!(v, ratio(39, 10));

    // The longest-paths instance: the best order collects both heavy edges
    // 0 -> 3 and 2 -> 1, giving 2 + 2 eps.
    let paths = posd_paths_instance(&ratio(1, 10)).unwrap();
    let (_, v) = brute_force_optimal_sequence(&mut ValuationOracle::new(&paths), &caps).unwrap();
    assert_eq!(v, ratio(11, 5));
    assert_eq!(v, best_sw(&paths));
}

#[test]
fn brute_force_agrees_with_reference_and_ties_lexicographically() {
    for seed in 0..20 {
        let inst = MonotoneInstance::random(5, seed, 2);
        let (s, v) = brute_force_optimal_sequence(&mut ValuationOracle::new(&inst), &Caps::default()).unwrap();
        assert_eq!(v, best_sw(&inst));
        let first = perms(5).into_iter().find(|p| sw(&inst, p) == v).unwrap();
        assert_eq!(s.as_slice(), first.as_slice());
    }
}

#[test]
fn brute_force_dominates_sampled_sequences() {
    let inst = random_digraph_instance(6, 5, 3);
    let (_, best) = brute_force_optimal_sequence(&mut ValuationOracle::new(&inst), &Caps::default()).unwrap();
    let all = perms(6);
    for k in 0..50 {
        let p = &all[(k * 97 + 13) % all.len()];
        assert!(sw(&inst, p) <= best);
    }
}

#[test]
fn caps_are_enforced() {
    let inst = MonotoneInstance::random(4, 0, 2);
    let tight = Caps { factorial: 3, exponential: 3, monotone: 3 };
    assert!(matches!(
        brute_force_optimal_sequence(&mut ValuationOracle::new(&inst), &tight),
        Err(Error::CapExceeded { n: 4, cap: 3, .. })
    ));
    assert!(check_monotone_exhaustive(&mut ValuationOracle::new(&inst), &tight).is_err());
    let caps: Caps = "factorial=8, monotone=5".parse().unwrap();
    assert_eq!((caps.factorial, caps.exponential, caps.monotone), (8, 20, 5));
    assert!("speed=1".parse::<Caps>().is_err());
}

#[test]
fn underlying_optima() {
    let caps = Caps::default();
    assert_eq!(posd_paths_instance(&ratio(1, 10)).unwrap().underlying_optimum(&caps).unwrap(), int(3));
    assert_eq!(posd_sat_instance(&ratio(1, 10)).unwrap().underlying_optimum(&caps).unwrap(), ratio(57, 10));
    let zeros = MatchingInstance::from_weights(vec![vec![zero(); 3]; 3]).unwrap();
    assert_eq!(zeros.underlying_optimum(&caps).unwrap(), zero());
}

#[test]
fn posd_examples() {
    let caps = Caps::default();
    for seed in 0..10 {
        let inst = random_matching_instance(2 + (seed as usize % 5), seed, 3);
        let r = price_of_serial_dictatorship(&inst, &caps).unwrap();
        assert_eq!(r.ratio, PosdRatio::Finite(int(1)), "seed {seed}");
    }
    let sat = price_of_serial_dictatorship(&posd_sat_instance(&ratio(1, 10)).unwrap(), &caps).unwrap();
    assert_eq!(sat.ratio, PosdRatio::Finite(ratio(19, 13)));
    let paths = price_of_serial_dictatorship(&posd_paths_instance(&ratio(1, 10)).unwrap(), &caps).unwrap();
    assert_eq!((paths.optimum.clone(), paths.best_welfare.clone()), (int(3), ratio(11, 5)));
    assert_eq!(paths.ratio, PosdRatio::Finite(ratio(15, 11)));
    let zeros = MatchingInstance::from_weights(vec![vec![zero(); 2]; 2]).unwrap();
    assert_eq!(price_of_serial_dictatorship(&zeros, &caps).unwrap().ratio, PosdRatio::Finite(int(1)));
}

#[test]
fn monotonicity_examples() {
    let caps = Caps::default();
    for seed in 0..5 {
        let inst = random_matching_instance(4, seed, 3);
        assert!(check_monotone_exhaustive(&mut ValuationOracle::new(&inst), &caps).unwrap());
    }
    let nonmono = nonmonotone_sat_instance();
    assert!(!check_monotone_exhaustive(&mut ValuationOracle::new(&nonmono), &caps).unwrap());
    assert!(!common::monotone(&nonmono));
    let zero_oracle = seqdict::oracle::ZeroValuation(4);
    assert!(check_monotone_exhaustive(&mut ValuationOracle::new(&zero_oracle), &caps).unwrap());
}

#[test]
fn oracle_rejects_bad_queries() {
    let inst = MonotoneInstance::random(3, 0, 2);
    let mut o = ValuationOracle::new(&inst);
    assert_eq!(o.query(0, &[0]), Err(Error::SelfQuery(0)));
    assert!(matches!(o.query(3, &[]), Err(Error::AgentOutOfRange { agent: 3, n: 3 })));
    assert_eq!(o.query(0, &[1, 1]), Err(Error::DuplicateAgent(1)));
    assert_eq!(o.total_calls(), 0);
}

proptest! {
    #[test]
    fn welfare_issues_n_queries(n in 1usize..7, seed in any::<u64>(), rot in 0usize..7) {
        let inst = MonotoneInstance::random(n, seed, 3);
        let mut order: Vec<usize> = (0..n).collect();
        order.rotate_left(rot % n);
        let mut o = ValuationOracle::new(&inst);
        let v = social_welfare(&mut o, &seq(&order)).unwrap();
        prop_assert_eq!(o.total_calls(), n as u64);
        prop_assert_eq!(v, sw(&inst, &order));
    }

    #[test]
    fn ledger_counts(queries in proptest::collection::vec((0usize..4, 0usize..4), 0..40)) {
        let inst = MonotoneInstance::random(4, 9, 2);
        let mut o = ValuationOracle::new(&inst);
        let mut distinct = std::collections::HashSet::new();
        let mut total = 0u64;
        for (agent, other) in queries {
            let prefix: Vec<usize> = if agent == other { vec![] } else { vec![other] };
            let before = (o.ledger().total_calls(), o.ledger().distinct_calls());
            o.query(agent, &prefix).unwrap();
            total += 1;
            distinct.insert((agent, prefix));
            let after = (o.ledger().total_calls(), o.ledger().distinct_calls());
            prop_assert!(after.0 > before.0 && after.1 >= before.1);
        }
        prop_assert_eq!(o.ledger().total_calls(), total);
        prop_assert_eq!(o.ledger().distinct_calls(), distinct.len() as u64);
        prop_assert!(o.ledger().distinct_calls() <= o.ledger().total_calls());
    }

    #[test]
    fn action_seq_rejects_duplicates(v in proptest::collection::vec(0usize..6, 0..8)) {
        let mut sorted = v.clone();
        sorted.sort_unstable();
        sorted.dedup();
        prop_assert_eq!(ActionSeq::new(v.clone()).is_ok(), sorted.len() == v.len());
    }

    #[test]
    fn subsequence_matches_reference(a in proptest::collection::vec(0usize..5, 0..5), b in Just((0usize..5).collect::<Vec<_>>()).prop_shuffle()) {
        let mut a = a;
        a.dedup();
        let positions: Option<Vec<usize>> = a.iter().map(|x| b.iter().position(|y| y == x)).collect();
        let expected = match positions {
            Some(pos) => pos.windows(2).all(|w| w[0] < w[1]),
            None => false,
        };
        let has_dup = { let mut s = a.clone(); s.sort_unstable(); s.windows(2).any(|w| w[0] == w[1]) };
        prop_assume!(!has_dup);
        prop_assert_eq!(is_subsequence(&a, &b), expected);
    }
}

#[test]
fn monotone_family_is_monotone() {
    for seed in 0..5 {
        let inst = MonotoneInstance::random(4, seed, 3);
        assert!(common::monotone(&inst));
        assert!(inst.monotone_claimed());
    }
}
