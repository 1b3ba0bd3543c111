mod common;

use std::collections::BTreeSet;

use common::perms;
use seqdict::feasibility::{producing_sequence_exhaustive, Collection};
use seqdict::osa::{
    for_each_arborescence, is_pareto_optimal_arborescence, random_digraph_instance,
    sequence_for_arborescence, Arborescence, ArborescenceContext, ArborescenceInstance,
};
use seqdict::osm::{
    is_pareto_optimal_matching, random_matching_instance, sequence_for_matching, Matching,
    MatchingContext, MatchingInstance,
};
use seqdict::Caps;

/// Rank of `target` in `row`: heavier first, smaller index on ties.
fn rank_in(row: &[seqdict::Value], skip: Option<usize>, target: usize) -> usize {
    let mut order: Vec<usize> = (0..row.len()).filter(|&j| Some(j) != skip).collect();
    order.sort_by(|&a, &b| row[b].cmp(&row[a]).then(a.cmp(&b)));
    order.iter().position(|&j| j == target).unwrap()
}

fn dominates(a: &[usize], b: &[usize]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y) && a != b
}

fn produced_matchings(inst: &MatchingInstance) -> BTreeSet<Vec<usize>> {
    let n = inst.n();
    perms(n)
        .iter()
        .map(|p| {
            let mut taken = vec![false; n];
            let mut items = vec![0; n];
            for &i in p {
                let j = (0..n)
                    .filter(|&j| !taken[j])
                    .min_by_key(|&j| rank_in(&inst.weights()[i], None, j))
                    .unwrap();
                taken[j] = true;
                items[i] = j;
            }
            items
        })
        .collect()
}

fn matching_ranks(inst: &MatchingInstance, items: &[usize]) -> Vec<usize> {
    (0..items.len()).map(|i| rank_in(&inst.weights()[i], None, items[i])).collect()
}

#[test]
fn matching_characterisation() {
    let caps = Caps::default();
    for k in 0..50u64 {
        let n = 1 + (k % 4) as usize;
        let inst = random_matching_instance(n, k, 3);
        let produced = produced_matchings(&inst);
        let all = perms(n);
        for m in &all {
            let ranks = matching_ranks(&inst, m);
            let pareto = !all.iter().any(|o| dominates(&matching_ranks(&inst, o), &ranks));
            let matching = Matching::new(m.clone()).unwrap();
            let decided = sequence_for_matching(&inst, &matching).unwrap();
            let exhaustive = producing_sequence_exhaustive(
                &MatchingContext(&inst),
                &Collection::full(m.iter().copied()),
                &caps,
            )
            .unwrap();
            assert_eq!(produced.contains(m), pareto, "seed {k} {m:?}");
            assert_eq!(decided.is_produced(), pareto, "seed {k} {m:?}");
            assert_eq!(exhaustive.is_some(), pareto, "seed {k} {m:?}");
            assert_eq!(is_pareto_optimal_matching(&inst, &matching, &caps).unwrap(), pareto);
            if let Some(s) = decided.sequence() {
                assert_eq!(seqdict::osm::matching_from_sequence(&inst, s).unwrap(), matching);
            }
        }
    }
}

fn arborescence_ranks(inst: &ArborescenceInstance, parent: &[Option<usize>]) -> Vec<usize> {
    let n = parent.len();
    (0..n)
        .map(|i| match parent[i] {
            Some(j) => rank_in(&inst.weights()[i], Some(i), j),
            None => n,
        })
        .collect()
}

fn produced_arborescences(inst: &ArborescenceInstance) -> BTreeSet<Vec<Option<usize>>> {
    let n = inst.n();
    perms(n)
        .iter()
        .map(|p| {
            let mut parent: Vec<Option<usize>> = vec![None; n];
            for &i in p {
                let closes = |j: usize, parent: &[Option<usize>]| {
                    let mut cur = j;
                    loop {
                        if cur == i {
                            return true;
                        }
                        match parent[cur] {
                            Some(q) => cur = q,
                            None => return false,
                        }
                    }
                };
                parent[i] = (0..n)
                    .filter(|&j| j != i && !closes(j, &parent))
                    .min_by_key(|&j| rank_in(&inst.weights()[i], Some(i), j));
            }
            parent
        })
        .collect()
}

#[test]
fn arborescence_characterisation() {
    let caps = Caps::default();
    for k in 0..50u64 {
        let n = 1 + (k % 4) as usize;
        let inst = random_digraph_instance(n, k, 3);
        let produced = produced_arborescences(&inst);
        let mut all = Vec::new();
        for_each_arborescence(n, |p| all.push(p.to_vec()));
        assert_eq!(all.len(), n.pow(n as u32 - 1));
        for t in &all {
            let ranks = arborescence_ranks(&inst, t);
            let pareto = !all.iter().any(|o| dominates(&arborescence_ranks(&inst, o), &ranks));
            let tree = Arborescence::new(t.clone()).unwrap();
            let decided = sequence_for_arborescence(&inst, &tree).unwrap();
            let exhaustive = producing_sequence_exhaustive(
                &ArborescenceContext(&inst),
                &Collection::full(t.iter().copied()),
                &caps,
            )
            .unwrap();
            assert_eq!(produced.contains(t), pareto, "seed {k} {t:?}");
            assert_eq!(decided.is_produced(), pareto, "seed {k} {t:?}");
            assert_eq!(exhaustive.is_some(), pareto, "seed {k} {t:?}");
            assert_eq!(is_pareto_optimal_arborescence(&inst, &tree, &caps).unwrap(), pareto);
        }
    }
}
