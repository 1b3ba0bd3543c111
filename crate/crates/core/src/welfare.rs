//! Social welfare, brute-force optima, monotonicity and the price of serial
//! dictatorship.

use std::collections::HashMap;
use std::fmt;

use num_traits::Zero;

use crate::caps::Caps;
use crate::error::Result;
use crate::oracle::{Valuation, ValuationOracle};
use crate::seq::{ordered_subsets, ActionSeq, AgentId};
use crate::value::{int, Value};

/// `SW(S) = sum_i v_i(S^i)`. Issues exactly `n` queries.
pub fn social_welfare(oracle: &mut ValuationOracle<'_>, seq: &ActionSeq) -> Result<Value> {
    seq.check_full(oracle.n())?;
    let order = seq.as_slice();
    let mut total = Value::zero();
    for (pos, &agent) in order.iter().enumerate() {
        total += oracle.query(agent, &order[..pos])?;
    }
    Ok(total)
}

/// Convenience: welfare of `seq` on an uncounted fresh oracle.
pub fn welfare_of(valuation: &dyn Valuation, seq: &ActionSeq) -> Result<Value> {
    social_welfare(&mut ValuationOracle::new(valuation), seq)
}

/// Maximum social welfare over all `n!` sequences.
///
/// Walks the permutation tree depth first so that each prefix is queried once
/// per extension; children are visited in ascending order and only strict
/// improvements replace the incumbent, so ties resolve to the
/// lexicographically smallest sequence.
pub fn brute_force_optimal_sequence(
    oracle: &mut ValuationOracle<'_>,
    caps: &Caps,
) -> Result<(ActionSeq, Value)> {
    let n = oracle.n();
    caps.check_factorial("brute-force optimal sequence", n)?;
    let mut search = BestSequence {
        oracle,
        prefix: Vec::with_capacity(n),
        used: vec![false; n],
        best: None,
    };
    search.descend(Value::zero())?;
    let (order, value) = search.best.expect("at least one sequence");
    Ok((ActionSeq::new(order)?, value))
}

struct BestSequence<'o, 'a> {
    oracle: &'o mut ValuationOracle<'a>,
    prefix: Vec<AgentId>,
    used: Vec<bool>,
    best: Option<(Vec<AgentId>, Value)>,
}

impl BestSequence<'_, '_> {
    fn descend(&mut self, acc: Value) -> Result<()> {
        let n = self.used.len();
        if self.prefix.len() == n {
            if self.best.as_ref().is_none_or(|(_, b)| acc > *b) {
                self.best = Some((self.prefix.clone(), acc));
            }
            return Ok(());
        }
        for agent in 0..n {
            if self.used[agent] {
                continue;
            }
            let v = self.oracle.query(agent, &self.prefix)?;
            self.used[agent] = true;
            self.prefix.push(agent);
            self.descend(&acc + v)?;
            self.prefix.pop();
            self.used[agent] = false;
        }
        Ok(())
    }
}

/// A witness `S' <= S` with `v_i(S') < v_i(S)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonotonicityViolation {
    pub agent: AgentId,
    pub shorter: Vec<AgentId>,
    pub shorter_value: Value,
    pub longer: Vec<AgentId>,
    pub longer_value: Value,
}

/// True iff `v_i(S') >= v_i(S)` for every agent and every pair `S' <= S`.
pub fn check_monotone_exhaustive(oracle: &mut ValuationOracle<'_>, caps: &Caps) -> Result<bool> {
    let mut ok = true;
    scan_monotonicity(oracle, caps, |_| {
        ok = false;
        false
    })?;
    Ok(ok)
}

/// Every monotonicity violation, in a deterministic order.
pub fn monotonicity_violations(
    oracle: &mut ValuationOracle<'_>,
    caps: &Caps,
) -> Result<Vec<MonotonicityViolation>> {
    let mut out = Vec::new();
    scan_monotonicity(oracle, caps, |v| {
        out.push(v);
        true
    })?;
    Ok(out)
}

fn scan_monotonicity(
    oracle: &mut ValuationOracle<'_>,
    caps: &Caps,
    mut on_violation: impl FnMut(MonotonicityViolation) -> bool,
) -> Result<()> {
    let n = oracle.n();
    caps.check_monotone(n)?;
    for agent in 0..n {
        let others: Vec<AgentId> = (0..n).filter(|&a| a != agent).collect();
        let mut memo: HashMap<Vec<AgentId>, Value> = HashMap::new();
        for longer in ordered_subsets(&others) {
            let longer_value = lookup(oracle, &mut memo, agent, &longer)?;
            for mask in 0u32..(1 << longer.len()) {
                let shorter: Vec<AgentId> = longer
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| mask & (1 << k) != 0)
                    .map(|(_, &a)| a)
                    .collect();
                let shorter_value = lookup(oracle, &mut memo, agent, &shorter)?;
                if shorter_value < longer_value {
                    let keep_going = on_violation(MonotonicityViolation {
                        agent,
                        shorter,
                        shorter_value,
                        longer: longer.clone(),
                        longer_value: longer_value.clone(),
                    });
                    if !keep_going {
                        return Ok(());
                    }
                }
            }
        }
    }
    Ok(())
}

fn lookup(
    oracle: &mut ValuationOracle<'_>,
    memo: &mut HashMap<Vec<AgentId>, Value>,
    agent: AgentId,
    seq: &[AgentId],
) -> Result<Value> {
    if let Some(v) = memo.get(seq) {
        return Ok(v.clone());
    }
    let v = oracle.query(agent, seq)?;
    memo.insert(seq.to_vec(), v.clone());
    Ok(v)
}

/// Structures whose valuations come from a combinatorial problem with a
/// computable exact optimum over all feasible collections of actions.
pub trait UnderlyingProblem: Valuation {
    fn underlying_optimum(&self, caps: &Caps) -> Result<Value>;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PosdRatio {
    Finite(Value),
    /// Positive optimum but every action sequence has zero welfare.
    Infinite,
}

impl fmt::Display for PosdRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PosdRatio::Finite(v) => write!(f, "{v}"),
            PosdRatio::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PosdReport {
    pub optimum: Value,
    pub best_sequence: ActionSeq,
    pub best_welfare: Value,
    pub ratio: PosdRatio,
}

/// Underlying optimum divided by the best action-sequence welfare; `1` when
/// both are zero.
pub fn price_of_serial_dictatorship(
    instance: &dyn UnderlyingProblem,
    caps: &Caps,
) -> Result<PosdReport> {
    let optimum = instance.underlying_optimum(caps)?;
    let valuation: &dyn Valuation = instance;
    let (best_sequence, best_welfare) =
        brute_force_optimal_sequence(&mut ValuationOracle::new(valuation), caps)?;
    let ratio = posd_ratio(&optimum, &best_welfare);
    Ok(PosdReport {
        optimum,
        best_sequence,
        best_welfare,
        ratio,
    })
}

pub fn posd_ratio(optimum: &Value, best_welfare: &Value) -> PosdRatio {
    if best_welfare.is_zero() {
        if optimum.is_zero() {
            PosdRatio::Finite(int(1))
        } else {
            PosdRatio::Infinite
        }
    } else {
        PosdRatio::Finite(optimum / best_welfare)
    }
}
