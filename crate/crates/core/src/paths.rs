//! Longest-paths valuations: each agent adds its heaviest out-edge that keeps
//! the drawn edges a union of vertex-disjoint directed paths.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::oracle::Valuation;
use crate::seq::{ActionSeq, AgentId};
use crate::value::{int, ratio, to_pq, zero, Value};
use crate::welfare::UnderlyingProblem;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathsInstance {
    weights: Vec<Vec<Value>>,
    /// Targets of each node by decreasing weight, smaller index first on ties.
    ranking: Vec<Vec<AgentId>>,
}

impl PathsInstance {
    pub fn new(mut weights: Vec<Vec<Value>>) -> Result<Self> {
        let n = weights.len();
        for i in 0..n {
            if weights[i].len() != n {
                return Err(Error::InvalidInstance(format!("paths: row {i} has {} entries", weights[i].len())));
            }
            weights[i][i] = zero();
            if weights[i].iter().any(|w| *w < Value::zero()) {
                return Err(Error::InvalidInstance(format!("paths: negative weight from {i}")));
            }
        }
        let ranking = (0..n)
            .map(|i| {
                let mut t: Vec<AgentId> = (0..n).filter(|&j| j != i).collect();
                t.sort_by(|&a, &b| weights[i][b].cmp(&weights[i][a]).then(a.cmp(&b)));
                t
            })
            .collect();
        Ok(PathsInstance { weights, ranking })
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn weight(&self, from: AgentId, to: AgentId) -> &Value {
        &self.weights[from][to]
    }

    pub fn weights(&self) -> &[Vec<Value>] {
        &self.weights
    }

    fn pick(&self, agent: AgentId, next: &[Option<AgentId>], has_in: &[bool]) -> Option<AgentId> {
        self.ranking[agent]
            .iter()
            .copied()
            .find(|&j| !has_in[j] && !path_reaches(next, j, agent))
    }

    /// Successor of each node after the agents in `prefix` act.
    pub fn edges_after(&self, prefix: &[AgentId]) -> Vec<Option<AgentId>> {
        let n = self.n();
        let mut next = vec![None; n];
        let mut has_in = vec![false; n];
        for &k in prefix {
            if let Some(j) = self.pick(k, &next, &has_in) {
                next[k] = Some(j);
                has_in[j] = true;
            }
        }
        next
    }
}

fn path_reaches(next: &[Option<AgentId>], from: AgentId, to: AgentId) -> bool {
    let mut cur = from;
    for _ in 0..=next.len() {
        if cur == to {
            return true;
        }
        match next[cur] {
            Some(j) => cur = j,
            None => return false,
        }
    }
    true
}

impl Valuation for PathsInstance {
    fn agents(&self) -> usize {
        self.n()
    }

    fn value(&self, agent: AgentId, prefix: &[AgentId]) -> Value {
        let next = self.edges_after(prefix);
        let mut has_in = vec![false; self.n()];
        for j in next.iter().flatten() {
            has_in[*j] = true;
        }
        match self.pick(agent, &next, &has_in) {
            Some(j) => self.weights[agent][j].clone(),
            None => zero(),
        }
    }
}

/// Out-degree and in-degree at most one, no self-loops, no cycles.
pub fn is_path_union(next: &[Option<AgentId>]) -> bool {
    let n = next.len();
    let mut has_in = vec![false; n];
    for (i, e) in next.iter().enumerate() {
        if let Some(j) = *e {
            if j >= n || j == i || has_in[j] {
                return false;
            }
            has_in[j] = true;
        }
    }
    (0..n).all(|i| next[i].is_none_or(|j| !path_reaches(next, j, i)))
}

pub fn paths_from_sequence(inst: &PathsInstance, seq: &ActionSeq) -> Result<Vec<Option<AgentId>>> {
    seq.check_full(inst.n())?;
    Ok(inst.edges_after(seq.as_slice()))
}

/// Maximum total weight of a union of vertex-disjoint directed paths, by
/// enumerating every successor assignment that respects the degree and
/// acyclicity constraints.
pub fn max_weight_paths(inst: &PathsInstance, caps: &Caps) -> Result<(Vec<Option<AgentId>>, Value)> {
    let n = inst.n();
    caps.check_factorial("maximum-weight path union", n)?;

    struct Search<'a> {
        inst: &'a PathsInstance,
        next: Vec<Option<AgentId>>,
        has_in: Vec<bool>,
        best: Option<(Vec<Option<AgentId>>, Value)>,
    }

    impl Search<'_> {
        fn go(&mut self, i: usize, acc: Value) {
            let n = self.next.len();
            if i == n {
                if self.best.as_ref().is_none_or(|(_, b)| acc > *b) {
                    self.best = Some((self.next.clone(), acc));
                }
                return;
            }
            for j in (0..n).filter(|&j| j != i) {
                if self.has_in[j] || path_reaches(&self.next, j, i) {
                    continue;
                }
                self.next[i] = Some(j);
                self.has_in[j] = true;
                let w = acc.clone() + self.inst.weight(i, j);
                self.go(i + 1, w);
                self.has_in[j] = false;
                self.next[i] = None;
            }
            self.go(i + 1, acc);
        }
    }

    let mut search = Search { inst, next: vec![None; n], has_in: vec![false; n], best: None };
    search.go(0, zero());
    Ok(search.best.expect("the empty union is always feasible"))
}

/// Four nodes: a unit-weight path `0 -> 1 -> 2 -> 3` plus the heavier edges
/// `0 -> 3`, `1 -> 3`, `2 -> 1` of weight `1 + eps`.
pub fn posd_paths_instance(eps: &Value) -> Result<PathsInstance> {
    if *eps <= zero() {
        return Err(Error::InvalidInstance(format!("eps = {} must be positive", to_pq(eps))));
    }
    let heavy = Value::one() + eps;
    let mut w = vec![vec![zero(); 4]; 4];
    w[0][1] = int(1);
    w[1][2] = int(1);
    w[2][3] = int(1);
    w[0][3] = heavy.clone();
    w[1][3] = heavy.clone();
    w[2][1] = heavy;
    PathsInstance::new(w)
}

/// i.i.d. edge weights `k / weight_denominator`, `k` uniform in
/// `0..=weight_denominator`.
pub fn random_paths_instance(n: usize, seed: u64, weight_denominator: u32) -> PathsInstance {
    let d = weight_denominator.max(1) as i64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = (0..n)
        .map(|i| (0..n).map(|j| if i == j { zero() } else { ratio(rng.gen_range(0..=d), d) }).collect())
        .collect();
    PathsInstance::new(w).expect("generated weights are valid")
}

impl UnderlyingProblem for PathsInstance {
    fn underlying_optimum(&self, caps: &Caps) -> Result<Value> {
        max_weight_paths(self, caps).map(|(_, w)| w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::ValuationOracle;
    use crate::seq::for_each_permutation;
    use crate::welfare::{brute_force_optimal_sequence, welfare_of};

    #[test]
    fn posd_instance_values() {
        let inst = posd_paths_instance(&ratio(1, 10)).unwrap();
        assert_eq!(inst.value(0, &[]), ratio(11, 10));
        assert_eq!(inst.value(3, &[0, 1, 2]), zero());
        for i in 0..4 {
            let top = inst.weights()[i].iter().max().unwrap().clone();
            assert_eq!(inst.value(i, &[]), top);
        }
        let (path, opt) = max_weight_paths(&inst, &Caps::default()).unwrap();
        assert_eq!(opt, int(3));
        assert_eq!(path, vec![Some(1), Some(2), Some(3), None]);
        let (_, best) =
            brute_force_optimal_sequence(&mut ValuationOracle::new(&inst), &Caps::default()).unwrap();
        // 0 -> 3 and 2 -> 1 are both available to whoever of 0, 2 acts
        // first, so the heavy pair is collected: 2 + 2 eps.
        assert_eq!(best, ratio(11, 5));
        let seq = ActionSeq::new(vec![0, 2, 1, 3]).unwrap();
        assert_eq!(welfare_of(&inst, &seq).unwrap(), ratio(11, 5));
    }

    #[test]
    fn sequences_give_path_unions() {
        let inst = random_paths_instance(5, 3, 4);
        for_each_permutation(&[0, 1, 2, 3, 4], |p| {
            let seq = ActionSeq::new(p.to_vec()).unwrap();
            let next = paths_from_sequence(&inst, &seq).unwrap();
            assert!(is_path_union(&next));
            let w: Value = next
                .iter()
                .enumerate()
                .filter_map(|(i, e)| e.map(|j| inst.weight(i, j).clone()))
                .sum();
            assert_eq!(w, welfare_of(&inst, &seq).unwrap());
            true
        });
    }

    #[test]
    fn path_union_predicate() {
        assert!(is_path_union(&[Some(1), Some(2), None]));
        assert!(!is_path_union(&[Some(1), Some(0)]));
        assert!(!is_path_union(&[Some(2), Some(2), None]));
        assert!(!is_path_union(&[Some(0)]));
    }

    #[test]
    fn rejects_bad_eps() {
        assert!(posd_paths_instance(&zero()).is_err());
    }
}
