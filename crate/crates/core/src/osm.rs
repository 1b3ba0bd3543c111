//! Bipartite-matching valuations: agents pick their best remaining item.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::feasibility::{sequence_for_collection, Collection, Decision, FeasibilityContext};
use crate::oracle::{Valuation, ValuationOracle};
use crate::seq::{for_each_permutation, ActionSeq, AgentId};
use crate::value::{ratio, Value};
use crate::welfare::UnderlyingProblem;

pub type Item = usize;

/// `K_{n,n}` with weights `w(i, j)` and strict per-agent item rankings
/// consistent with the weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchingInstance {
    weights: Vec<Vec<Value>>,
    /// `prefs[i][0]` is agent `i`'s rank-1 item.
    prefs: Vec<Vec<Item>>,
}

impl MatchingInstance {
    pub fn new(weights: Vec<Vec<Value>>, prefs: Vec<Vec<Item>>) -> Result<Self> {
        let n = weights.len();
        let bad = |m: String| Err(Error::InvalidInstance(m));
        if prefs.len() != n {
            return bad("matching: one ranking per agent required".into());
        }
        for (i, (row, pref)) in weights.iter().zip(&prefs).enumerate() {
            if row.len() != n {
                return bad(format!("matching: weight row {i} has {} entries", row.len()));
            }
            if row.iter().any(|w| *w < Value::zero()) {
                return bad(format!("matching: negative weight for agent {i}"));
            }
            let mut sorted = pref.clone();
            sorted.sort_unstable();
            if sorted != (0..n).collect::<Vec<_>>() {
                return bad(format!("matching: ranking of agent {i} is not a permutation"));
            }
            if pref.windows(2).any(|p| row[p[0]] < row[p[1]]) {
                return bad(format!("matching: ranking of agent {i} contradicts weights"));
            }
        }
        Ok(MatchingInstance { weights, prefs })
    }

    /// Ranks items by decreasing weight, lower item index first on ties.
    pub fn from_weights(weights: Vec<Vec<Value>>) -> Result<Self> {
        let prefs = weights
            .iter()
            .map(|row| {
                let mut items: Vec<Item> = (0..row.len()).collect();
                items.sort_by(|&a, &b| row[b].cmp(&row[a]).then(a.cmp(&b)));
                items
            })
            .collect();
        Self::new(weights, prefs)
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn weight(&self, agent: AgentId, item: Item) -> &Value {
        &self.weights[agent][item]
    }

    pub fn weights(&self) -> &[Vec<Value>] {
        &self.weights
    }

    pub fn preferences(&self, agent: AgentId) -> &[Item] {
        &self.prefs[agent]
    }

    /// 1-based rank of `item` for `agent`.
    pub fn rank(&self, agent: AgentId, item: Item) -> usize {
        self.prefs[agent].iter().position(|&j| j == item).expect("valid item") + 1
    }

    fn pick(&self, agent: AgentId, taken: &[bool]) -> Item {
        *self.prefs[agent]
            .iter()
            .find(|&&j| !taken[j])
            .expect("fewer agents than items have acted")
    }

    fn taken_after(&self, prefix: &[AgentId]) -> Vec<bool> {
        let mut taken = vec![false; self.n()];
        for &k in prefix {
            let j = self.pick(k, &taken);
            taken[j] = true;
        }
        taken
    }
}

impl Valuation for MatchingInstance {
    fn agents(&self) -> usize {
        self.n()
    }

    fn value(&self, agent: AgentId, prefix: &[AgentId]) -> Value {
        let taken = self.taken_after(prefix);
        self.weights[agent][self.pick(agent, &taken)].clone()
    }
}

/// A perfect matching, `items[i]` being agent `i`'s item.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matching {
    items: Vec<Item>,
}

impl Matching {
    pub fn new(items: Vec<Item>) -> Result<Self> {
        let n = items.len();
        let mut seen = vec![false; n];
        for &j in &items {
            if j >= n || std::mem::replace(&mut seen[j], true) {
                return Err(Error::InvalidInstance(format!(
                    "not a perfect matching: {items:?}"
                )));
            }
        }
        Ok(Matching { items })
    }

    pub fn item(&self, agent: AgentId) -> Item {
        self.items[agent]
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn weight(&self, inst: &MatchingInstance) -> Value {
        self.items
            .iter()
            .enumerate()
            .map(|(i, &j)| inst.weight(i, j).clone())
            .sum()
    }
}

/// Appends, each round, the remaining agent with the highest value after the
/// sequence built so far (smallest index on ties). Issues `n(n+1)/2` queries.
pub fn greedy_osm(oracle: &mut ValuationOracle<'_>) -> Result<ActionSeq> {
    let n = oracle.n();
    let mut seq = ActionSeq::empty();
    let mut remaining: Vec<AgentId> = (0..n).collect();
    while !remaining.is_empty() {
        let mut best: Option<(usize, Value)> = None;
        for (pos, &agent) in remaining.iter().enumerate() {
            let v = oracle.query(agent, seq.as_slice())?;
            if best.as_ref().is_none_or(|(_, b)| v > *b) {
                best = Some((pos, v));
            }
        }
        let (pos, _) = best.expect("non-empty");
        seq.push(remaining.remove(pos))?;
    }
    Ok(seq)
}

pub fn matching_from_sequence(inst: &MatchingInstance, seq: &ActionSeq) -> Result<Matching> {
    let n = inst.n();
    seq.check_full(n)?;
    let mut taken = vec![false; n];
    let mut items = vec![0; n];
    for agent in seq.iter() {
        let j = inst.pick(agent, &taken);
        taken[j] = true;
        items[agent] = j;
    }
    Matching::new(items)
}

/// True iff no perfect matching weakly improves every agent's rank and
/// strictly improves one. Enumerates all `n!` matchings.
pub fn is_pareto_optimal_matching(
    inst: &MatchingInstance,
    m: &Matching,
    caps: &Caps,
) -> Result<bool> {
    let n = inst.n();
    caps.check_factorial("Pareto check over matchings", n)?;
    let current: Vec<usize> = (0..n).map(|i| inst.rank(i, m.item(i))).collect();
    let items: Vec<Item> = (0..n).collect();
    let mut dominated = false;
    for_each_permutation(&items, |other| {
        let mut strict = false;
        for (i, &j) in other.iter().enumerate() {
            let r = inst.rank(i, j);
            if r > current[i] {
                return true;
            }
            strict |= r < current[i];
        }
        dominated = strict;
        !dominated
    });
    Ok(!dominated)
}

/// `F` = partial matching, `BR(i, M)` = agent `i`'s top-ranked free item.
#[derive(Debug, Clone, Copy)]
pub struct MatchingContext<'a>(pub &'a MatchingInstance);

impl FeasibilityContext for MatchingContext<'_> {
    type Action = Item;

    fn agents(&self) -> usize {
        self.0.n()
    }

    fn is_feasible(&self, collection: &Collection<Item>) -> bool {
        let mut seen = vec![false; self.0.n()];
        collection
            .iter()
            .all(|(_, &j)| j < seen.len() && !std::mem::replace(&mut seen[j], true))
    }

    fn best_response(&self, agent: AgentId, collection: &Collection<Item>) -> Item {
        let mut taken = vec![false; self.0.n()];
        for (_, &j) in collection.iter() {
            taken[j] = true;
        }
        self.0.pick(agent, &taken)
    }
}

pub fn sequence_for_matching(inst: &MatchingInstance, m: &Matching) -> Result<Decision> {
    sequence_for_collection(&MatchingContext(inst), &Collection::full(m.items().iter().copied()))
}

/// i.i.d. weights `k / weight_denominator` with `k` uniform in
/// `0..=weight_denominator`.
pub fn random_matching_instance(n: usize, seed: u64, weight_denominator: u32) -> MatchingInstance {
    let d = weight_denominator.max(1) as i64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights = (0..n)
        .map(|_| (0..n).map(|_| ratio(rng.gen_range(0..=d), d)).collect())
        .collect();
    MatchingInstance::from_weights(weights).expect("generated weights are valid")
}

/// Maximum-weight perfect matching by enumeration.
pub fn max_weight_matching(inst: &MatchingInstance, caps: &Caps) -> Result<(Matching, Value)> {
    let n = inst.n();
    caps.check_factorial("maximum-weight matching", n)?;
    let items: Vec<Item> = (0..n).collect();
    let mut best: Option<(Vec<Item>, Value)> = None;
    for_each_permutation(&items, |perm| {
        let w: Value = perm.iter().enumerate().map(|(i, &j)| inst.weight(i, j).clone()).sum();
        if best.as_ref().is_none_or(|(_, b)| w > *b) {
            best = Some((perm.to_vec(), w));
        }
        true
    });
    let (items, w) = best.expect("at least one matching");
    Ok((Matching::new(items)?, w))
}

impl UnderlyingProblem for MatchingInstance {
    fn underlying_optimum(&self, caps: &Caps) -> Result<Value> {
        max_weight_matching(self, caps).map(|(_, w)| w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::{int, zero};
    use crate::welfare::welfare_of;

    fn two_by_two(w: [[i64; 2]; 2]) -> MatchingInstance {
        MatchingInstance::from_weights(w.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect())
            .unwrap()
    }

    /// Agent 0: (1+e, 1), agent 1: (1, 1-e) with e = 1/10.
    fn counterexample() -> MatchingInstance {
        MatchingInstance::from_weights(vec![
            vec![ratio(11, 10), int(1)],
            vec![int(1), ratio(9, 10)],
        ])
        .unwrap()
    }

    #[test]
    fn empty_prefix_gets_maximum_weight() {
        let inst = random_matching_instance(4, 3, 7);
        for i in 0..4 {
            let max = inst.weights()[i].iter().max().unwrap().clone();
            assert_eq!(inst.value(i, &[]), max);
        }
        let one = MatchingInstance::from_weights(vec![vec![ratio(3, 4)]]).unwrap();
        assert_eq!(one.value(0, &[]), ratio(3, 4));
    }

    #[test]
    fn counterexample_values_and_greedy() {
        let inst = counterexample();
        assert_eq!(inst.value(1, &[0]), ratio(9, 10));
        let mut o = ValuationOracle::new(&inst);
        let seq = greedy_osm(&mut o).unwrap();
        assert_eq!(seq.as_slice(), &[0, 1]);
        assert_eq!(o.total_calls(), 3);
        assert_eq!(welfare_of(&inst, &seq).unwrap(), int(2));
        assert_eq!(matching_from_sequence(&inst, &seq).unwrap().items(), &[0, 1]);

        let misreport = MatchingInstance::from_weights(vec![
            vec![ratio(9, 10), zero()],
            vec![int(1), ratio(9, 10)],
        ])
        .unwrap();
        let seq = greedy_osm(&mut ValuationOracle::new(&misreport)).unwrap();
        assert_eq!(seq.as_slice(), &[1, 0]);
    }

    #[test]
    fn all_zero_weights() {
        let inst = MatchingInstance::from_weights(vec![vec![zero(); 3]; 3]).unwrap();
        let seq = greedy_osm(&mut ValuationOracle::new(&inst)).unwrap();
        assert_eq!(seq, ActionSeq::ascending(3));
        assert_eq!(welfare_of(&inst, &seq).unwrap(), zero());
        assert_eq!(inst.underlying_optimum(&Caps::default()).unwrap(), zero());
    }

    #[test]
    fn decider_examples() {
        let inst = two_by_two([[2, 1], [2, 1]]);
        let good = Matching::new(vec![0, 1]).unwrap();
        assert_eq!(
            sequence_for_matching(&inst, &good).unwrap(),
            Decision::Produced(ActionSeq::ascending(2))
        );
        // Agent 1 gets item 0 only if it acts first; (1, 0) produces it.
        let swapped = Matching::new(vec![1, 0]).unwrap();
        assert!(sequence_for_matching(&inst, &swapped).unwrap().is_produced());

        // Both strictly prefer the other's item: dominated.
        let crossed = two_by_two([[1, 2], [2, 1]]);
        assert_eq!(sequence_for_matching(&crossed, &good).unwrap(), Decision::Fail);
        assert!(!is_pareto_optimal_matching(&crossed, &good, &Caps::default()).unwrap());
        assert!(is_pareto_optimal_matching(&crossed, &swapped, &Caps::default()).unwrap());
    }

    #[test]
    fn single_agent() {
        let inst = MatchingInstance::from_weights(vec![vec![int(5)]]).unwrap();
        let m = matching_from_sequence(&inst, &ActionSeq::ascending(1)).unwrap();
        assert_eq!(m.items(), &[0]);
        assert!(is_pareto_optimal_matching(&inst, &m, &Caps::default()).unwrap());
        assert_eq!(
            sequence_for_matching(&inst, &m).unwrap(),
            Decision::Produced(ActionSeq::ascending(1))
        );
    }

    #[test]
    fn generator_is_deterministic_and_valid() {
        assert_eq!(random_matching_instance(3, 7, 5), random_matching_instance(3, 7, 5));
        let inst = random_matching_instance(3, 7, 5);
        assert!(MatchingInstance::new(inst.weights().to_vec(), inst.prefs.clone()).is_ok());
        let binary = random_matching_instance(5, 2, 1);
        assert!(binary
            .weights()
            .iter()
            .flatten()
            .all(|w| *w == zero() || *w == int(1)));
    }

    #[test]
    fn rejects_inconsistent_rankings() {
        let w = vec![vec![int(1), int(2)], vec![int(0), int(0)]];
        assert!(MatchingInstance::new(w.clone(), vec![vec![0, 1], vec![0, 1]]).is_err());
        assert!(MatchingInstance::new(w.clone(), vec![vec![1, 1], vec![0, 1]]).is_err());
        assert!(MatchingInstance::new(w, vec![vec![1, 0], vec![1, 0]]).is_ok());
        assert!(Matching::new(vec![0, 0]).is_err());
    }
}
