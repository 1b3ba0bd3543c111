//! Approximation algorithms for general monotone instances (`Det`, `Rand`,
//! `Det+`) and the adversarial lower-bound family.

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::oracle::{Valuation, ValuationOracle};
use crate::seq::{combinations, for_each_permutation, is_subsequence, ActionSeq, AgentId};
use crate::value::{int, ratio, zero, Value};
use crate::welfare::social_welfare;

fn check_c(c: usize, n: usize, allow_zero: bool) -> Result<()> {
    if c > n || (c == 0 && !allow_zero) {
        Err(Error::COutOfRange { c, n })
    } else {
        Ok(())
    }
}

/// The ordering `S` of `subset` maximizing `sum_{i in S} v_i(S^i)`, with its
/// value. Makes exactly `c * c!` queries; ties go to the lexicographically
/// smallest ordering.
pub fn best_ordering(
    oracle: &mut ValuationOracle<'_>,
    subset: &[AgentId],
) -> Result<(Vec<AgentId>, Value)> {
    let mut best: Option<(Vec<AgentId>, Value)> = None;
    let mut failure = None;
    for_each_permutation(subset, |order| {
        let mut sum = Value::zero();
        for (pos, &agent) in order.iter().enumerate() {
            match oracle.query(agent, &order[..pos]) {
                Ok(v) => sum += v,
                Err(e) => {
                    failure = Some(e);
                    return false;
                }
            }
        }
        if best.as_ref().is_none_or(|(_, b)| sum > *b) {
            best = Some((order.to_vec(), sum));
        }
        true
    });
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(best.unwrap_or_default())
}

/// `prefix` followed by the remaining agents of `0..n` in ascending order.
pub fn complete_ascending(prefix: &[AgentId], n: usize) -> Result<ActionSeq> {
    let mut order = prefix.to_vec();
    order.extend((0..n).filter(|a| !prefix.contains(a)));
    ActionSeq::new(order)
}

/// `Det`: tries every `c`-subset and every ordering of it, keeps the best
/// prefix, fills the rest ascending. Issues `C(n,c) * c * c!` queries.
pub fn det(oracle: &mut ValuationOracle<'_>, c: usize) -> Result<ActionSeq> {
    let n = oracle.n();
    check_c(c, n, false)?;
    let mut best: Option<(Vec<AgentId>, Value)> = None;
    for subset in combinations(n, c) {
        let (order, value) = best_ordering(oracle, &subset)?;
        let better = match &best {
            None => true,
            Some((b_order, b_value)) => value > *b_value || (value == *b_value && order < *b_order),
        };
        if better {
            best = Some((order, value));
        }
    }
    let (prefix, _) = best.expect("C(n,c) >= 1");
    complete_ascending(&prefix, n)
}

/// Uniform `c`-subset of `0..n` by a partial Fisher-Yates shuffle, sorted.
pub fn draw_subset(n: usize, c: usize, rng: &mut impl Rng) -> Vec<AgentId> {
    let mut pool: Vec<AgentId> = (0..n).collect();
    for k in 0..c {
        let j = rng.gen_range(k..n);
        pool.swap(k, j);
    }
    let mut subset = pool[..c].to_vec();
    subset.sort_unstable();
    subset
}

/// The output of one `Rand` run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandRun {
    pub sequence: ActionSeq,
    pub subset: Vec<AgentId>,
}

/// `Rand`: best ordering of a uniformly drawn `c`-subset, rest ascending.
/// Issues exactly `c * c!` queries.
pub fn rand_sequence(
    oracle: &mut ValuationOracle<'_>,
    c: usize,
    rng: &mut impl Rng,
) -> Result<RandRun> {
    let n = oracle.n();
    check_c(c, n, false)?;
    let subset = draw_subset(n, c, rng);
    let sequence = rand_with_subset(oracle, &subset)?;
    Ok(RandRun { sequence, subset })
}

/// [`rand_sequence`] driven by a `ChaCha8` generator seeded with `seed`.
pub fn rand_seeded(oracle: &mut ValuationOracle<'_>, c: usize, seed: u64) -> Result<RandRun> {
    rand_sequence(oracle, c, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// The deterministic half of `Rand` once the subset is fixed.
pub fn rand_with_subset(oracle: &mut ValuationOracle<'_>, subset: &[AgentId]) -> Result<ActionSeq> {
    let (prefix, _) = best_ordering(oracle, subset)?;
    complete_ascending(&prefix, oracle.n())
}

/// `Det+`: the welfare-maximizing sequence among those whose last `n - c`
/// agents appear in ascending index order. `c = 0` yields `(0, ..., n-1)`.
pub fn det_plus(oracle: &mut ValuationOracle<'_>, c: usize, caps: &Caps) -> Result<ActionSeq> {
    let n = oracle.n();
    check_c(c, n, true)?;
    caps.check_factorial("Det+ candidate enumeration", n)?;
    let mut best: Option<(ActionSeq, Value)> = None;
    for subset in combinations(n, c) {
        let mut failure = None;
        for_each_permutation(&subset, |prefix| {
            let outcome = complete_ascending(prefix, n)
                .and_then(|seq| social_welfare(oracle, &seq).map(|sw| (seq, sw)));
            match outcome {
                Ok((seq, sw)) => {
                    let better = match &best {
                        None => true,
                        Some((b_seq, b_sw)) => sw > *b_sw || (sw == *b_sw && seq < *b_seq),
                    };
                    if better {
                        best = Some((seq, sw));
                    }
                    true
                }
                Err(e) => {
                    failure = Some(e);
                    false
                }
            }
        });
        if let Some(e) = failure {
            return Err(e);
        }
    }
    Ok(best.expect("at least one candidate").0)
}

/// An instance `I_pi` of the family `F_c`: `v_i(S) = 1` iff `|S| < c` or
/// `S <= pi`, else `0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LowerBoundInstance {
    c: usize,
    hidden: ActionSeq,
}

impl LowerBoundInstance {
    pub fn new(c: usize, hidden: ActionSeq) -> Result<Self> {
        let n = hidden.len();
        hidden.check_full(n)?;
        check_c(c, n, false)?;
        Ok(LowerBoundInstance { c, hidden })
    }

    /// Draws the hidden sequence uniformly at random.
    pub fn random(n: usize, c: usize, seed: u64) -> Result<Self> {
        let mut order: Vec<AgentId> = (0..n).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        Self::new(c, ActionSeq::new(order)?)
    }

    pub fn c(&self) -> usize {
        self.c
    }

    pub fn hidden(&self) -> &ActionSeq {
        &self.hidden
    }
}

impl Valuation for LowerBoundInstance {
    fn agents(&self) -> usize {
        self.hidden.len()
    }

    fn value(&self, _agent: AgentId, prefix: &[AgentId]) -> Value {
        if prefix.len() < self.c || is_subsequence(prefix, self.hidden.as_slice()) {
            int(1)
        } else {
            zero()
        }
    }
}

/// A random monotone valuation family for general instances:
///
/// `v_i(S) = max(0, base_i - sum_{k in S} crowding_ik - disorder_i * inv_i(S))`
///
/// where `inv_i(S)` counts pairs of `S` ordered against agent `i`'s reference
/// order. Every term only grows when `S` is extended, hence monotone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonotoneInstance {
    pub base: Vec<Value>,
    pub crowding: Vec<Vec<Value>>,
    pub disorder: Vec<Value>,
    /// `reference[i]` is a permutation of `0..n`.
    pub reference: Vec<Vec<AgentId>>,
}

impl MonotoneInstance {
    pub fn new(
        base: Vec<Value>,
        crowding: Vec<Vec<Value>>,
        disorder: Vec<Value>,
        reference: Vec<Vec<AgentId>>,
    ) -> Result<Self> {
        let n = base.len();
        let bad = |m: &str| Err(Error::InvalidInstance(m.to_string()));
        if crowding.len() != n || disorder.len() != n || reference.len() != n {
            return bad("monotone instance: inconsistent dimensions");
        }
        if crowding.iter().any(|row| row.len() != n) {
            return bad("monotone instance: crowding must be n x n");
        }
        let negative = |v: &Value| *v < zero();
        if base.iter().any(negative)
            || disorder.iter().any(negative)
            || crowding.iter().flatten().any(negative)
        {
            return bad("monotone instance: negative parameter");
        }
        for r in &reference {
            ActionSeq::new(r.clone())
                .and_then(|s| s.check_full(n))
                .map_err(|_| Error::InvalidInstance("monotone instance: bad reference order".into()))?;
        }
        Ok(MonotoneInstance {
            base,
            crowding,
            disorder,
            reference,
        })
    }

    pub fn random(n: usize, seed: u64, weight_denominator: u32) -> Self {
        let d = weight_denominator.max(1) as i64;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pick = |hi: i64| ratio(rng.gen_range(0..=hi), d);
        let base = (0..n).map(|_| pick(4 * d)).collect();
        let crowding = (0..n).map(|_| (0..n).map(|_| pick(d)).collect()).collect();
        let disorder = (0..n).map(|_| pick(d)).collect();
        let reference = (0..n)
            .map(|_| {
                let mut r: Vec<AgentId> = (0..n).collect();
                r.shuffle(&mut rng);
                r
            })
            .collect();
        MonotoneInstance {
            base,
            crowding,
            disorder,
            reference,
        }
    }
}

impl Valuation for MonotoneInstance {
    fn agents(&self) -> usize {
        self.base.len()
    }

    fn value(&self, agent: AgentId, prefix: &[AgentId]) -> Value {
        let rank = |a: AgentId| self.reference[agent].iter().position(|&x| x == a).unwrap_or(0);
        let mut inversions = 0i64;
        for (k, &a) in prefix.iter().enumerate() {
            for &b in &prefix[k + 1..] {
                if rank(a) > rank(b) {
                    inversions += 1;
                }
            }
        }
        let mut v = self.base[agent].clone() - &self.disorder[agent] * int(inversions);
        for &k in prefix {
            v -= &self.crowding[agent][k];
        }
        if v < zero() {
            zero()
        } else {
            v
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::welfare::{brute_force_optimal_sequence, check_monotone_exhaustive, welfare_of};

    fn seq(v: &[AgentId]) -> ActionSeq {
        ActionSeq::new(v.to_vec()).unwrap()
    }

    #[test]
    fn lower_bound_oracle_examples() {
        let inst = LowerBoundInstance::new(1, seq(&[1, 0, 2])).unwrap();
        assert_eq!(inst.value(2, &[1, 0]), int(1));
        assert_eq!(inst.value(2, &[0, 1]), zero());
        for a in 0..3 {
            assert_eq!(inst.value(a, &[]), int(1));
        }
    }

    #[test]
    fn det_on_lower_bound_starts_with_agent_zero() {
        // All v_i(empty) = 1, so every singleton ties and agent 0 wins.
        let inst = LowerBoundInstance::new(1, seq(&[1, 2, 0])).unwrap();
        let mut o = ValuationOracle::new(&inst);
        let out = det(&mut o, 1).unwrap();
        assert_eq!(out, seq(&[0, 1, 2]));
        assert_eq!(o.total_calls(), 3);
        // (0,1,2) vs pi=(1,2,0): (0) <= pi but (0,1) is not.
        assert_eq!(welfare_of(&inst, &out).unwrap(), int(2));
    }

    #[test]
    fn c_out_of_range() {
        let inst = LowerBoundInstance::random(3, 1, 0).unwrap();
        let mut o = ValuationOracle::new(&inst);
        assert!(det(&mut o, 0).is_err());
        assert!(det(&mut o, 4).is_err());
        assert!(rand_seeded(&mut o, 0, 1).is_err());
        assert!(det_plus(&mut o, 4, &Caps::default()).is_err());
        assert!(LowerBoundInstance::new(0, seq(&[0, 1])).is_err());
    }

    #[test]
    fn det_plus_with_zero_c_is_ascending() {
        let inst = MonotoneInstance::random(4, 3, 5);
        let mut o = ValuationOracle::new(&inst);
        assert_eq!(det_plus(&mut o, 0, &Caps::default()).unwrap(), ActionSeq::ascending(4));
    }

    #[test]
    fn full_c_recovers_optimum() {
        for seed in 0..5 {
            let inst = MonotoneInstance::random(5, seed, 4);
            let (_, opt) =
                brute_force_optimal_sequence(&mut ValuationOracle::new(&inst), &Caps::default()).unwrap();
            let d = det(&mut ValuationOracle::new(&inst), 5).unwrap();
            assert_eq!(welfare_of(&inst, &d).unwrap(), opt);
            let r = rand_seeded(&mut ValuationOracle::new(&inst), 5, seed).unwrap();
            assert_eq!(welfare_of(&inst, &r.sequence).unwrap(), opt);
            let p = det_plus(&mut ValuationOracle::new(&inst), 5, &Caps::default()).unwrap();
            assert_eq!(welfare_of(&inst, &p).unwrap(), opt);
        }
    }

    #[test]
    fn random_monotone_instances_are_monotone() {
        for seed in 0..10 {
            let inst = MonotoneInstance::random(4, seed, 3);
            assert!(check_monotone_exhaustive(&mut ValuationOracle::new(&inst), &Caps::default()).unwrap());
        }
    }

    #[test]
    fn subset_draw_is_sorted_and_sized() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let s = draw_subset(7, 3, &mut rng);
            assert_eq!(s.len(), 3);
            assert!(s.windows(2).all(|w| w[0] < w[1]));
            assert!(s.iter().all(|&a| a < 7));
        }
    }

    #[test]
    fn single_draw_rand_prefix() {
        let inst = MonotoneInstance::random(4, 11, 4);
        let mut o = ValuationOracle::new(&inst);
        let run = rand_seeded(&mut o, 1, 3).unwrap();
        assert_eq!(run.sequence.as_slice()[0], run.subset[0]);
        assert_eq!(o.total_calls(), 1);
        let drawn = run.subset[0];
        assert!(welfare_of(&inst, &run.sequence).unwrap() >= inst.value(drawn, &[]));
    }
}
