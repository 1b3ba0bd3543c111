//! Arborescence valuations: each agent draws its best out-edge that does not
//! close a cycle with the edges drawn before it.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::feasibility::{sequence_for_collection, Collection, Decision, FeasibilityContext};
use crate::oracle::{Valuation, ValuationOracle};
use crate::seq::{ActionSeq, AgentId};
use crate::value::{int, ratio, zero, Value};
use crate::welfare::{welfare_of, UnderlyingProblem};

/// Complete digraph on the agents with weights `w(i, j)` on edge `i -> j`
/// (diagonal ignored) and strict per-agent rankings of out-edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArborescenceInstance {
    weights: Vec<Vec<Value>>,
    /// `prefs[i]` lists the `n - 1` targets of agent `i`, best first.
    prefs: Vec<Vec<AgentId>>,
}

impl ArborescenceInstance {
    pub fn new(mut weights: Vec<Vec<Value>>, prefs: Vec<Vec<AgentId>>) -> Result<Self> {
        let n = weights.len();
        let bad = |m: String| Err(Error::InvalidInstance(m));
        if prefs.len() != n {
            return bad("arborescence: one ranking per agent required".into());
        }
        for i in 0..n {
            if weights[i].len() != n {
                return bad(format!("arborescence: weight row {i} has {} entries", weights[i].len()));
            }
            weights[i][i] = zero();
            if weights[i].iter().any(|w| *w < Value::zero()) {
                return bad(format!("arborescence: negative weight for agent {i}"));
            }
            let mut sorted = prefs[i].clone();
            sorted.sort_unstable();
            if sorted != (0..n).filter(|&j| j != i).collect::<Vec<_>>() {
                return bad(format!("arborescence: ranking of agent {i} must list every other node once"));
            }
            if prefs[i].windows(2).any(|p| weights[i][p[0]] < weights[i][p[1]]) {
                return bad(format!("arborescence: ranking of agent {i} contradicts weights"));
            }
        }
        Ok(ArborescenceInstance { weights, prefs })
    }

    /// Ranks out-edges by decreasing weight, lower target index first on ties.
    pub fn from_weights(weights: Vec<Vec<Value>>) -> Result<Self> {
        let n = weights.len();
        let prefs = (0..n)
            .map(|i| {
                let row = &weights[i];
                let mut targets: Vec<AgentId> = (0..n).filter(|&j| j != i).collect();
                targets.sort_by(|&a, &b| row.get(b).cmp(&row.get(a)).then(a.cmp(&b)));
                targets
            })
            .collect();
        Self::new(weights, prefs)
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

    pub fn preferences(&self, agent: AgentId) -> &[AgentId] {
        &self.prefs[agent]
    }

    /// 1-based rank of edge `agent -> target`; drawing no edge ranks `n`,
    /// below every edge.
    pub fn rank(&self, agent: AgentId, target: Option<AgentId>) -> usize {
        match target {
            Some(j) => self.prefs[agent].iter().position(|&t| t == j).expect("valid target") + 1,
            None => self.n(),
        }
    }

    fn pick(&self, agent: AgentId, parent: &[Option<AgentId>]) -> Option<AgentId> {
        self.prefs[agent]
            .iter()
            .copied()
            .find(|&j| !reaches(parent, j, agent))
    }

    fn parents_after(&self, prefix: &[AgentId]) -> Vec<Option<AgentId>> {
        let mut parent = vec![None; self.n()];
        for &k in prefix {
            parent[k] = self.pick(k, &parent);
        }
        parent
    }
}

/// Whether following out-edges from `from` arrives at `to`. Out-degree is at
/// most one, so this is a single walk.
fn reaches(parent: &[Option<AgentId>], from: AgentId, to: AgentId) -> bool {
    let mut cur = from;
    for _ in 0..=parent.len() {
        if cur == to {
            return true;
        }
        match parent[cur] {
            Some(next) => cur = next,
            None => return false,
        }
    }
    // Only reachable if `parent` already holds a cycle.
    true
}

impl Valuation for ArborescenceInstance {
    fn agents(&self) -> usize {
        self.n()
    }

    fn value(&self, agent: AgentId, prefix: &[AgentId]) -> Value {
        let parent = self.parents_after(prefix);
        match self.pick(agent, &parent) {
            Some(j) => self.weights[agent][j].clone(),
            None => zero(),
        }
    }
}

/// A spanning arborescence: every node but the root has one out-edge, and
/// all edges point toward the root.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Arborescence {
    parent: Vec<Option<AgentId>>,
}

impl Arborescence {
    pub fn new(parent: Vec<Option<AgentId>>) -> Result<Self> {
        let n = parent.len();
        let bad = || Err(Error::InvalidInstance(format!("not an arborescence: {parent:?}")));
        if n > 0 && parent.iter().filter(|p| p.is_none()).count() != 1 {
            return bad();
        }
        for (i, p) in parent.iter().enumerate() {
            if let Some(j) = *p {
                if j >= n || j == i {
                    return bad();
                }
            }
        }
        if !is_forest(&parent) {
            return bad();
        }
        Ok(Arborescence { parent })
    }

    pub fn parent(&self, agent: AgentId) -> Option<AgentId> {
        self.parent[agent]
    }

    pub fn parents(&self) -> &[Option<AgentId>] {
        &self.parent
    }

    pub fn root(&self) -> Option<AgentId> {
        self.parent.iter().position(|p| p.is_none())
    }

    pub fn edge_count(&self) -> usize {
        self.parent.iter().filter(|p| p.is_some()).count()
    }

    pub fn weight(&self, inst: &ArborescenceInstance) -> Value {
        self.parent
            .iter()
            .enumerate()
            .filter_map(|(i, p)| p.map(|j| inst.weight(i, j).clone()))
            .sum()
    }
}

fn is_forest(parent: &[Option<AgentId>]) -> bool {
    (0..parent.len()).all(|i| match parent[i] {
        Some(j) => j < parent.len() && !reaches(parent, j, i),
        None => true,
    })
}

/// Visits every spanning arborescence of the complete digraph on `n` nodes
/// (`n^(n-1)` of them), assigning parents node by node and pruning cycles.
pub fn for_each_arborescence(n: usize, mut visit: impl FnMut(&[Option<AgentId>])) {
    fn go(
        i: usize,
        parent: &mut Vec<Option<AgentId>>,
        roots: usize,
        visit: &mut impl FnMut(&[Option<AgentId>]),
    ) {
        let n = parent.len();
        if i == n {
            if roots == 1 {
                visit(parent);
            }
            return;
        }
        if roots == 0 {
            go(i + 1, parent, 1, visit);
        }
        for j in (0..n).filter(|&j| j != i) {
            if reaches(parent, j, i) {
                continue;
            }
            parent[i] = Some(j);
            go(i + 1, parent, roots, visit);
            parent[i] = None;
        }
    }
    if n == 0 {
        return;
    }
    go(0, &mut vec![None; n], 0, &mut visit);
}

/// Algorithm for 2-approximate arborescence sequences. Agents are scanned in
/// index order; one that cannot draw its top edge closes a cycle with the
/// agents kept so far, the cycle is detected with `v_i(pi \ j)` queries, and
/// its member with the smallest `v(∅)` is moved to a reserve list. Returns the
/// kept agents followed by the reserve in eviction order. `O(n^2)` queries.
pub fn greedy_osa(oracle: &mut ValuationOracle<'_>) -> Result<ActionSeq> {
    let n = oracle.n();
    let mut top: Vec<Value> = Vec::with_capacity(n);
    let mut kept = ActionSeq::empty();
    let mut reserve = Vec::new();
    for i in 0..n {
        let alone = oracle.query(i, &[])?;
        top.push(alone.clone());
        let now = oracle.query(i, kept.as_slice())?;
        if now == alone {
            kept.push(i)?;
            continue;
        }
        let mut cycle = vec![i];
        for j in kept.iter().collect::<Vec<_>>() {
            if oracle.query(i, kept.without(j).as_slice())? == alone {
                cycle.push(j);
            }
        }
        let evicted = *cycle
            .iter()
            .min_by(|&&a, &&b| top[a].cmp(&top[b]).then(a.cmp(&b)))
            .expect("cycle contains i");
        kept.push(i)?;
        kept = kept.without(evicted);
        reserve.push(evicted);
    }
    for agent in reserve {
        kept.push(agent)?;
    }
    Ok(kept)
}

/// `Bit`: ascending order on heads, descending on tails. No queries.
pub fn bit(n: usize, heads: bool) -> ActionSeq {
    let mut order: Vec<AgentId> = (0..n).collect();
    if !heads {
        order.reverse();
    }
    ActionSeq::new(order).expect("permutation")
}

/// Exact expected welfare of `Bit`: the mean of both coin outcomes.
pub fn bit_expected_welfare(valuation: &dyn Valuation) -> Result<Value> {
    let n = valuation.agents();
    let heads = welfare_of(valuation, &bit(n, true))?;
    let tails = welfare_of(valuation, &bit(n, false))?;
    Ok((heads + tails) / int(2))
}

pub fn arborescence_from_sequence(inst: &ArborescenceInstance, seq: &ActionSeq) -> Result<Arborescence> {
    seq.check_full(inst.n())?;
    Arborescence::new(inst.parents_after(seq.as_slice()))
}

/// True iff no arborescence weakly improves every agent's edge rank and
/// strictly improves one.
pub fn is_pareto_optimal_arborescence(
    inst: &ArborescenceInstance,
    t: &Arborescence,
    caps: &Caps,
) -> Result<bool> {
    let n = inst.n();
    caps.check_factorial("Pareto check over arborescences", n)?;
    let current: Vec<usize> = (0..n).map(|i| inst.rank(i, t.parent(i))).collect();
    let mut dominated = false;
    for_each_arborescence(n, |other| {
        if dominated {
            return;
        }
        let ranks = (0..n).map(|i| inst.rank(i, other[i]));
        let mut strict = false;
        for (i, r) in ranks.enumerate() {
            if r > current[i] {
                return;
            }
            strict |= r < current[i];
        }
        dominated = strict;
    });
    Ok(!dominated)
}

/// `F` = directed forest, `BR(i, M)` = best-ranked out-edge of `i` that does
/// not close a cycle with `M` (`None` when every edge does).
#[derive(Debug, Clone, Copy)]
pub struct ArborescenceContext<'a>(pub &'a ArborescenceInstance);

impl ArborescenceContext<'_> {
    fn parents(&self, collection: &Collection<Option<AgentId>>) -> Vec<Option<AgentId>> {
        let mut parent = vec![None; self.0.n()];
        for (i, &p) in collection.iter() {
            parent[i] = p;
        }
        parent
    }
}

impl FeasibilityContext for ArborescenceContext<'_> {
    type Action = Option<AgentId>;

    fn agents(&self) -> usize {
        self.0.n()
    }

    fn is_feasible(&self, collection: &Collection<Option<AgentId>>) -> bool {
        let n = self.0.n();
        let valid = collection
            .iter()
            .all(|(i, p)| i < n && p.is_none_or(|j| j < n && j != i));
        valid && is_forest(&self.parents(collection))
    }

    fn best_response(&self, agent: AgentId, collection: &Collection<Option<AgentId>>) -> Option<AgentId> {
        self.0.pick(agent, &self.parents(collection))
    }
}

pub fn sequence_for_arborescence(inst: &ArborescenceInstance, t: &Arborescence) -> Result<Decision> {
    sequence_for_collection(
        &ArborescenceContext(inst),
        &Collection::full(t.parents().iter().copied()),
    )
}

/// i.i.d. edge weights `k / weight_denominator`, `k` uniform in
/// `0..=weight_denominator`.
pub fn random_digraph_instance(n: usize, seed: u64, weight_denominator: u32) -> ArborescenceInstance {
    let d = weight_denominator.max(1) as i64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { zero() } else { ratio(rng.gen_range(0..=d), d) })
                .collect()
        })
        .collect();
    ArborescenceInstance::from_weights(weights).expect("generated weights are valid")
}

/// Maximum-weight spanning arborescence by enumeration.
pub fn max_weight_arborescence(
    inst: &ArborescenceInstance,
    caps: &Caps,
) -> Result<(Arborescence, Value)> {
    let n = inst.n();
    caps.check_factorial("maximum-weight arborescence", n)?;
    let mut best: Option<(Vec<Option<AgentId>>, Value)> = None;
    for_each_arborescence(n, |parent| {
        let w: Value = parent
            .iter()
            .enumerate()
            .filter_map(|(i, p)| p.map(|j| inst.weight(i, j).clone()))
            .sum();
        if best.as_ref().is_none_or(|(_, b)| w > *b) {
            best = Some((parent.to_vec(), w));
        }
    });
    let (parent, w) = best.ok_or_else(|| Error::InvalidInstance("empty digraph".into()))?;
    Ok((Arborescence::new(parent)?, w))
}

impl UnderlyingProblem for ArborescenceInstance {
    fn underlying_optimum(&self, caps: &Caps) -> Result<Value> {
        max_weight_arborescence(self, caps).map(|(_, w)| w)
    }
}
