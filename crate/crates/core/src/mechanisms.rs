//! VCG payments for `Rand` and `Det+`, the two-point cycle-monotonicity test,
//! and exact truthfulness spot checks over explicit valuation tables.

use std::collections::HashMap;

use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::oracle::{Valuation, ValuationOracle};
use crate::osa::{bit, greedy_osa, ArborescenceInstance};
use crate::osm::{greedy_osm, MatchingInstance};
use crate::seq::{combinations, ordered_subsets, ActionSeq, AgentId};
use crate::seqopt::{det, det_plus, draw_subset, rand_with_subset};
use crate::value::{int, ratio, zero, Value};

/// One agent's valuation as an explicit table. Missing entries read as 0, so
/// the empty table is the all-zero valuation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AgentTable {
    entries: HashMap<Vec<AgentId>, Value>,
}

impl AgentTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Tabulates `f` on every ordered subset of the other `n - 1` agents.
    pub fn from_fn(n: usize, agent: AgentId, mut f: impl FnMut(&[AgentId]) -> Value) -> Self {
        let others: Vec<AgentId> = (0..n).filter(|&k| k != agent).collect();
        let entries = ordered_subsets(&others)
            .into_iter()
            .map(|s| {
                let v = f(&s);
                (s, v)
            })
            .filter(|(_, v)| !v.is_zero())
            .collect();
        AgentTable { entries }
    }

    pub fn from_valuation(valuation: &dyn Valuation, agent: AgentId) -> Self {
        Self::from_fn(valuation.agents(), agent, |s| valuation.value(agent, s))
    }

    pub fn get(&self, prefix: &[AgentId]) -> Value {
        self.entries.get(prefix).cloned().unwrap_or_else(zero)
    }

    pub fn set(&mut self, prefix: Vec<AgentId>, value: Value) {
        if value.is_zero() {
            self.entries.remove(&prefix);
        } else {
            self.entries.insert(prefix, value);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Explicit per-agent valuation tables `v = (v_0, ..., v_{n-1})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValuationProfile {
    tables: Vec<AgentTable>,
}

impl ValuationProfile {
    pub fn new(tables: Vec<AgentTable>) -> Self {
        ValuationProfile { tables }
    }

    pub fn zero(n: usize) -> Self {
        ValuationProfile { tables: vec![AgentTable::new(); n] }
    }

    /// Tabulates every agent of `valuation`; the tables have
    /// `sum_k (n-1)!/(n-1-k)!` entries each.
    pub fn from_valuation(valuation: &dyn Valuation, caps: &Caps) -> Result<Self> {
        let n = valuation.agents();
        caps.check_factorial("valuation table", n)?;
        Ok(ValuationProfile {
            tables: (0..n).map(|i| AgentTable::from_valuation(valuation, i)).collect(),
        })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(AgentId, &[AgentId]) -> Value) -> Self {
        ValuationProfile {
            tables: (0..n).map(|i| AgentTable::from_fn(n, i, |s| f(i, s))).collect(),
        }
    }

    pub fn table(&self, agent: AgentId) -> &AgentTable {
        &self.tables[agent]
    }

    /// `(v_{-agent}, table)`.
    pub fn with_agent(&self, agent: AgentId, table: AgentTable) -> Self {
        let mut tables = self.tables.clone();
        tables[agent] = table;
        ValuationProfile { tables }
    }

    /// `(v_{-agent}, 0)`.
    pub fn zeroed(&self, agent: AgentId) -> Self {
        self.with_agent(agent, AgentTable::new())
    }
}

impl Valuation for ValuationProfile {
    fn agents(&self) -> usize {
        self.tables.len()
    }

    fn value(&self, agent: AgentId, prefix: &[AgentId]) -> Value {
        self.tables[agent].get(prefix)
    }

    fn monotone_claimed(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MechanismOutcome {
    pub sequence: ActionSeq,
    pub payments: Vec<Value>,
    /// Oracle queries spent on the sequence and the payments.
    pub queries: u64,
}

impl MechanismOutcome {
    fn unpaid(sequence: ActionSeq, queries: u64) -> Self {
        let n = sequence.len();
        MechanismOutcome { sequence, payments: vec![zero(); n], queries }
    }

    /// `v_agent(M^agent) - p_agent` under the valuation `truth`.
    pub fn utility(&self, truth: &dyn Valuation, agent: AgentId) -> Result<Value> {
        Ok(value_in(truth, &self.sequence, agent)? - &self.payments[agent])
    }
}

fn value_in(v: &dyn Valuation, seq: &ActionSeq, agent: AgentId) -> Result<Value> {
    let pos = seq.position(agent).ok_or(Error::AgentNotInSequence(agent))?;
    Ok(v.value(agent, &seq.as_slice()[..pos]))
}

/// `sum_{k in group, k != skip} v_k(M^k)`, through `oracle`.
fn group_welfare(
    oracle: &mut ValuationOracle<'_>,
    seq: &ActionSeq,
    group: &[AgentId],
    skip: AgentId,
) -> Result<Value> {
    let mut total = zero();
    for &k in group.iter().filter(|&&k| k != skip) {
        let pos = seq.position(k).ok_or(Error::AgentNotInSequence(k))?;
        total += oracle.query(k, &seq.as_slice()[..pos])?;
    }
    Ok(total)
}

/// VCG payments for a rule maximizing the welfare of `group` over an outcome
/// range that does not depend on the reports: agent `i` in `group` pays the
/// others' welfare when it reports zero minus their welfare at the actual
/// outcome; everyone else pays nothing.
fn vcg(
    profile: &ValuationProfile,
    group: &[AgentId],
    rule: impl Fn(&mut ValuationOracle<'_>) -> Result<ActionSeq>,
) -> Result<MechanismOutcome> {
    let n = profile.agents();
    let mut oracle = ValuationOracle::new(profile);
    let sequence = rule(&mut oracle)?;
    let mut payments = vec![zero(); n];
    let mut queries = 0;
    for &i in group {
        let zeroed = profile.zeroed(i);
        let mut z_oracle = ValuationOracle::new(&zeroed);
        let without = rule(&mut z_oracle)?;
        queries += z_oracle.total_calls();
        let others_without = group_welfare(&mut oracle, &without, group, i)?;
        let others_with = group_welfare(&mut oracle, &sequence, group, i)?;
        payments[i] = others_without - others_with;
    }
    queries += oracle.total_calls();
    Ok(MechanismOutcome { sequence, payments, queries })
}

/// `Rand` with VCG payments on a fixed drawn subset `C`.
pub fn vcg_rand_with_subset(profile: &ValuationProfile, subset: &[AgentId]) -> Result<MechanismOutcome> {
    let n = profile.agents();
    if subset.is_empty() || subset.len() > n || subset.iter().any(|&a| a >= n) {
        return Err(Error::COutOfRange { c: subset.len(), n });
    }
    vcg(profile, subset, |o| rand_with_subset(o, subset))
}

/// `Rand` with VCG payments; the subset is drawn exactly as
/// [`crate::seqopt::rand_seeded`] draws it for the same seed.
pub fn vcg_rand(profile: &ValuationProfile, c: usize, seed: u64) -> Result<MechanismOutcome> {
    let n = profile.agents();
    if c == 0 || c > n {
        return Err(Error::COutOfRange { c, n });
    }
    let subset = draw_subset(n, c, &mut ChaCha8Rng::seed_from_u64(seed));
    vcg_rand_with_subset(profile, &subset)
}

/// `Det+` with VCG payments summed over the whole population.
pub fn vcg_det_plus(profile: &ValuationProfile, c: usize, caps: &Caps) -> Result<MechanismOutcome> {
    let everyone: Vec<AgentId> = (0..profile.agents()).collect();
    vcg(profile, &everyone, |o| det_plus(o, c, caps))
}

/// A (possibly randomized) mechanism: maps reports to a finite lottery over
/// outcomes.
pub trait Mechanism {
    fn name(&self) -> String;

    /// `(probability, outcome)` pairs; probabilities sum to 1.
    fn lottery(&self, reported: &ValuationProfile) -> Result<Vec<(Value, MechanismOutcome)>>;
}

/// `Rand` + VCG, with the subset draw enumerated exactly.
pub struct VcgRand {
    pub c: usize,
}

impl Mechanism for VcgRand {
    fn name(&self) -> String {
        format!("vcg-rand(c={})", self.c)
    }

    fn lottery(&self, reported: &ValuationProfile) -> Result<Vec<(Value, MechanismOutcome)>> {
        let n = reported.agents();
        if self.c == 0 || self.c > n {
            return Err(Error::COutOfRange { c: self.c, n });
        }
        let subsets = combinations(n, self.c);
        let p = ratio(1, subsets.len() as i64);
        subsets
            .iter()
            .map(|s| Ok((p.clone(), vcg_rand_with_subset(reported, s)?)))
            .collect()
    }
}

pub struct VcgDetPlus {
    pub c: usize,
    pub caps: Caps,
}

impl Mechanism for VcgDetPlus {
    fn name(&self) -> String {
        format!("vcg-det-plus(c={})", self.c)
    }

    fn lottery(&self, reported: &ValuationProfile) -> Result<Vec<(Value, MechanismOutcome)>> {
        Ok(vec![(int(1), vcg_det_plus(reported, self.c, &self.caps)?)])
    }
}

/// `Bit` without payments.
pub struct Bit;

impl Mechanism for Bit {
    fn name(&self) -> String {
        "bit".into()
    }

    fn lottery(&self, reported: &ValuationProfile) -> Result<Vec<(Value, MechanismOutcome)>> {
        let n = reported.agents();
        Ok([true, false]
            .into_iter()
            .map(|heads| (ratio(1, 2), MechanismOutcome::unpaid(bit(n, heads), 0)))
            .collect())
    }
}

/// A deterministic sequence rule run on the reports, charging nothing.
pub struct Unpaid<F> {
    pub name: String,
    pub rule: F,
}

impl<F> Mechanism for Unpaid<F>
where
    F: Fn(&mut ValuationOracle<'_>) -> Result<ActionSeq>,
{
    fn name(&self) -> String {
        self.name.clone()
    }

    fn lottery(&self, reported: &ValuationProfile) -> Result<Vec<(Value, MechanismOutcome)>> {
        let mut oracle = ValuationOracle::new(reported);
        let seq = (self.rule)(&mut oracle)?;
        Ok(vec![(int(1), MechanismOutcome::unpaid(seq, oracle.total_calls()))])
    }
}

/// The four terms of the two-point cycle-monotonicity inequality
/// `v_i(M(v)) + v'_i(M(v')) >= v_i(M(v')) + v'_i(M(v))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleMonTerms {
    pub truth_at_truth: Value,
    pub alt_at_alt: Value,
    pub truth_at_alt: Value,
    pub alt_at_truth: Value,
}

impl CycleMonTerms {
    pub fn violated(&self) -> bool {
        self.truth_at_truth.clone() + &self.alt_at_alt < self.truth_at_alt.clone() + &self.alt_at_truth
    }
}

pub fn cycle_mon_terms(
    rule: impl Fn(&mut ValuationOracle<'_>) -> Result<ActionSeq>,
    v: &ValuationProfile,
    agent: AgentId,
    alt: &AgentTable,
) -> Result<CycleMonTerms> {
    let v_alt = v.with_agent(agent, alt.clone());
    let m = rule(&mut ValuationOracle::new(v))?;
    let m_alt = rule(&mut ValuationOracle::new(&v_alt))?;
    Ok(CycleMonTerms {
        truth_at_truth: value_in(v, &m, agent)?,
        alt_at_alt: value_in(&v_alt, &m_alt, agent)?,
        truth_at_alt: value_in(v, &m_alt, agent)?,
        alt_at_truth: value_in(&v_alt, &m, agent)?,
    })
}

/// True iff `rule` violates the two-point inequality on `(v, (v_{-i}, alt))`,
/// which rules out any truthful implementation of it.
pub fn cycle_mon_violation(
    rule: impl Fn(&mut ValuationOracle<'_>) -> Result<ActionSeq>,
    v: &ValuationProfile,
    agent: AgentId,
    alt: &AgentTable,
) -> Result<bool> {
    cycle_mon_terms(rule, v, agent, alt).map(|t| t.violated())
}

/// The algorithm a counterexample is aimed at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetRule {
    GreedyOsm,
    GreedyOsa,
    Det { c: usize },
}

impl TargetRule {
    pub fn run(&self, oracle: &mut ValuationOracle<'_>) -> Result<ActionSeq> {
        match *self {
            TargetRule::GreedyOsm => greedy_osm(oracle),
            TargetRule::GreedyOsa => greedy_osa(oracle),
            TargetRule::Det { c } => det(oracle, c),
        }
    }

    pub fn name(&self) -> String {
        match self {
            TargetRule::GreedyOsm => "greedy-osm".into(),
            TargetRule::GreedyOsa => "greedy-osa".into(),
            TargetRule::Det { c } => format!("det(c={c})"),
        }
    }
}

/// A profile together with a misreport that breaks cycle monotonicity for
/// `rule`.
#[derive(Debug, Clone)]
pub struct Counterexample {
    pub name: &'static str,
    pub rule: TargetRule,
    pub truth: ValuationProfile,
    pub agent: AgentId,
    pub alt: AgentTable,
}

impl Counterexample {
    pub fn terms(&self) -> Result<CycleMonTerms> {
        cycle_mon_terms(|o| self.rule.run(o), &self.truth, self.agent, &self.alt)
    }
}

/// Two agents, two items. Agent 0 truly prefers item 0 (`1 + eps` vs 1) but
/// can pretend to value it at `1 - eps` and item 1 at 0.
pub fn osm_counterexample(eps: &Value) -> Result<(MatchingInstance, MatchingInstance)> {
    let one = int(1);
    let truth = MatchingInstance::from_weights(vec![
        vec![one.clone() + eps, one.clone()],
        vec![one.clone(), one.clone() - eps],
    ])?;
    let alt = MatchingInstance::from_weights(vec![
        vec![one.clone() - eps, zero()],
        vec![one.clone(), one - eps],
    ])?;
    Ok((truth, alt))
}

/// Four agents on a complete digraph. Agent 0 truly has `0 -> 1` at
/// `1 - eps` and `0 -> 3` at `eps`; the misreport raises them to `1 + eps`
/// and 1.
pub fn osa_counterexample(eps: &Value) -> Result<(ArborescenceInstance, ArborescenceInstance)> {
    let one = int(1);
    let mut w = vec![vec![zero(); 4]; 4];
    w[1][0] = one.clone();
    w[2][3] = one.clone() - eps;
    w[3][2] = one.clone();
    let mut truth = w.clone();
    truth[0][1] = one.clone() - eps;
    truth[0][3] = eps.clone();
    let mut alt = w;
    alt[0][1] = one.clone() + eps;
    alt[0][3] = one;
    Ok((ArborescenceInstance::from_weights(truth)?, ArborescenceInstance::from_weights(alt)?))
}

/// Agents `0..c` get 10 while fewer than `c` agents precede them and 8
/// afterwards; everyone else gets 9. Agent 0's misreport is 8 early and 0
/// late.
pub fn det_counterexample(n: usize, c: usize) -> Result<(ValuationProfile, AgentTable)> {
    if c == 0 || c >= n {
        return Err(Error::COutOfRange { c, n });
    }
    let truth = ValuationProfile::from_fn(n, |i, s| match (i < c, s.len() < c) {
        (true, true) => int(10),
        (true, false) => int(8),
        (false, _) => int(9),
    });
    let alt = AgentTable::from_fn(n, 0, |s| if s.len() < c { int(8) } else { zero() });
    Ok((truth, alt))
}

/// The three counterexamples with parameter `eps` (and `n`, `c` for `Det`).
pub fn counterexample_profiles(eps: &Value, n: usize, c: usize, caps: &Caps) -> Result<Vec<Counterexample>> {
    if *eps <= zero() || *eps >= int(1) {
        return Err(Error::InvalidInstance("eps must lie in (0, 1)".into()));
    }
    let (osm_v, osm_alt) = osm_counterexample(eps)?;
    let (osa_v, osa_alt) = osa_counterexample(eps)?;
    let (det_v, det_alt) = det_counterexample(n, c)?;
    Ok(vec![
        Counterexample {
            name: "osm",
            rule: TargetRule::GreedyOsm,
            truth: ValuationProfile::from_valuation(&osm_v, caps)?,
            agent: 0,
            alt: AgentTable::from_valuation(&osm_alt, 0),
        },
        Counterexample {
            name: "osa",
            rule: TargetRule::GreedyOsa,
            truth: ValuationProfile::from_valuation(&osa_v, caps)?,
            agent: 0,
            alt: AgentTable::from_valuation(&osa_alt, 0),
        },
        Counterexample {
            name: "det",
            rule: TargetRule::Det { c },
            truth: det_v,
            agent: 0,
            alt: det_alt,
        },
    ])
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthViolation {
    pub agent: AgentId,
    pub misreport: usize,
    pub truthful_utility: Value,
    pub misreport_utility: Value,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SpotcheckReport {
    pub pairs_checked: usize,
    pub violations: Vec<TruthViolation>,
    /// Agents with expected utility below 0 when truthful.
    pub rationality_failures: Vec<AgentId>,
    /// Agents charged a negative amount in some truthful outcome.
    pub negative_payments: Vec<AgentId>,
}

impl SpotcheckReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.rationality_failures.is_empty() && self.negative_payments.is_empty()
    }
}

fn expected_utility(
    lottery: &[(Value, MechanismOutcome)],
    truth: &dyn Valuation,
    agent: AgentId,
) -> Result<Value> {
    let mut total = zero();
    for (p, outcome) in lottery {
        total += p * outcome.utility(truth, agent)?;
    }
    Ok(total)
}

/// For each agent and each of its listed misreports, compares exact expected
/// utilities under the true valuations. `misreports[i]` is agent `i`'s family
/// (missing or empty families are skipped).
pub fn truthfulness_spotcheck(
    mechanism: &dyn Mechanism,
    truth: &ValuationProfile,
    misreports: &[Vec<AgentTable>],
) -> Result<SpotcheckReport> {
    let n = truth.agents();
    let honest = mechanism.lottery(truth)?;
    let mut report = SpotcheckReport::default();
    for i in 0..n {
        if honest.iter().any(|(_, o)| o.payments[i] < zero()) {
            report.negative_payments.push(i);
        }
        let truthful_utility = expected_utility(&honest, truth, i)?;
        if truthful_utility < zero() {
            report.rationality_failures.push(i);
        }
        for (k, table) in misreports.get(i).into_iter().flatten().enumerate() {
            let lie = mechanism.lottery(&truth.with_agent(i, table.clone()))?;
            let misreport_utility = expected_utility(&lie, truth, i)?;
            report.pairs_checked += 1;
            if misreport_utility > truthful_utility {
                report.violations.push(TruthViolation {
                    agent: i,
                    misreport: k,
                    truthful_utility: truthful_utility.clone(),
                    misreport_utility,
                });
            }
        }
    }
    Ok(report)
}
