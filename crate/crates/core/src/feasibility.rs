//! Deciding whether a full feasible collection of actions can be produced by
//! some action sequence, for downward-closed constraints with endogenous best
//! responses.

use std::collections::btree_map::{self, BTreeMap};
use std::collections::BTreeSet;
use std::fmt::Debug;

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::seq::{for_each_permutation, ActionSeq, AgentId};

/// A set of `(agent, action)` pairs with at most one pair per agent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Collection<A> {
    pairs: BTreeMap<AgentId, A>,
}

impl<A> Default for Collection<A> {
    fn default() -> Self {
        Collection {
            pairs: BTreeMap::new(),
        }
    }
}

impl<A: Clone> Collection<A> {
    pub fn new() -> Self {
        Self::default()
    }

    /// The full collection assigning `actions[i]` to agent `i`.
    pub fn full(actions: impl IntoIterator<Item = A>) -> Self {
        Collection {
            pairs: actions.into_iter().enumerate().collect(),
        }
    }

    pub fn insert(&mut self, agent: AgentId, action: A) -> Result<()> {
        match self.pairs.entry(agent) {
            btree_map::Entry::Occupied(_) => Err(Error::DuplicateAgent(agent)),
            btree_map::Entry::Vacant(e) => {
                e.insert(action);
                Ok(())
            }
        }
    }

    pub fn get(&self, agent: AgentId) -> Option<&A> {
        self.pairs.get(&agent)
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// All `n` agents present (and nobody else).
    pub fn is_full(&self, n: usize) -> bool {
        self.pairs.len() == n && self.pairs.keys().all(|&a| a < n)
    }

    pub fn iter(&self) -> impl Iterator<Item = (AgentId, &A)> {
        self.pairs.iter().map(|(&a, x)| (a, x))
    }

    /// Actions in agent order, when full.
    pub fn actions(&self) -> Vec<A> {
        self.pairs.values().cloned().collect()
    }

    fn subset(&self, mask: u64) -> Self {
        Collection {
            pairs: self
                .pairs
                .iter()
                .enumerate()
                .filter(|(k, _)| mask & (1 << k) != 0)
                .map(|(_, (&a, x))| (a, x.clone()))
                .collect(),
        }
    }
}

/// A feasibility constraint `F` together with the best-response function
/// `BR(i, M)`.
///
/// `F` must be downward closed, `BR(i, M)` must be deterministic and return an
/// action `a` with `M + (i, a)` feasible.
pub trait FeasibilityContext {
    type Action: Clone + Eq + Debug;

    fn agents(&self) -> usize;

    fn is_feasible(&self, collection: &Collection<Self::Action>) -> bool;

    fn best_response(&self, agent: AgentId, collection: &Collection<Self::Action>) -> Self::Action;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decision {
    Produced(ActionSeq),
    Fail,
}

impl Decision {
    pub fn sequence(&self) -> Option<&ActionSeq> {
        match self {
            Decision::Produced(s) => Some(s),
            Decision::Fail => None,
        }
    }

    pub fn is_produced(&self) -> bool {
        matches!(self, Decision::Produced(_))
    }
}

/// Repeatedly lets the smallest-index agent whose target action is its best
/// response to the already-fixed pairs act next; fails when no such agent
/// exists.
pub fn sequence_for_collection<C: FeasibilityContext>(
    ctx: &C,
    target: &Collection<C::Action>,
) -> Result<Decision> {
    let n = ctx.agents();
    if !target.is_full(n) {
        return Err(Error::NotFullCollection);
    }
    if !ctx.is_feasible(target) {
        return Err(Error::InfeasibleCollection);
    }
    let mut pending: BTreeSet<AgentId> = (0..n).collect();
    let mut fixed = Collection::new();
    let mut order = Vec::with_capacity(n);
    while !pending.is_empty() {
        let top = pending.iter().copied().find(|&i| {
            let wanted = target.get(i).expect("full target");
            ctx.best_response(i, &fixed) == *wanted
        });
        let Some(agent) = top else {
            return Ok(Decision::Fail);
        };
        pending.remove(&agent);
        fixed.insert(agent, target.get(agent).expect("full target").clone())?;
        order.push(agent);
    }
    Ok(Decision::Produced(ActionSeq::new(order)?))
}

/// The collection produced when agents act in the order `seq`.
pub fn produce<C: FeasibilityContext>(ctx: &C, seq: &ActionSeq) -> Result<Collection<C::Action>> {
    let mut out = Collection::new();
    for agent in seq.iter() {
        let action = ctx.best_response(agent, &out);
        out.insert(agent, action)?;
    }
    Ok(out)
}

/// Exhaustive reference: the lexicographically first full sequence producing
/// `target`, if any.
pub fn producing_sequence_exhaustive<C: FeasibilityContext>(
    ctx: &C,
    target: &Collection<C::Action>,
    caps: &Caps,
) -> Result<Option<ActionSeq>> {
    let n = ctx.agents();
    caps.check_factorial("exhaustive producibility", n)?;
    let agents: Vec<AgentId> = (0..n).collect();
    let mut found = None;
    let mut failure = None;
    for_each_permutation(&agents, |order| {
        let seq = match ActionSeq::new(order.to_vec()) {
            Ok(s) => s,
            Err(e) => {
                failure = Some(e);
                return false;
            }
        };
        match produce(ctx, &seq) {
            Ok(c) if c == *target => {
                found = Some(seq);
                false
            }
            Ok(_) => true,
            Err(e) => {
                failure = Some(e);
                false
            }
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(found),
    }
}

/// Checks that every subset of `target` is feasible.
pub fn is_downward_closed_on<C: FeasibilityContext>(
    ctx: &C,
    target: &Collection<C::Action>,
    caps: &Caps,
) -> Result<bool> {
    caps.check_exponential("downward-closedness check", target.len())?;
    Ok((0u64..(1 << target.len())).all(|mask| ctx.is_feasible(&target.subset(mask))))
}
