//! The valuation-oracle contract and query accounting.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashSet;
use std::fmt;
use std::hash::{Hash, Hasher};

use crate::error::{Error, Result};
use crate::seq::AgentId;
use crate::value::Value;

/// A family of valuation functions `v_i : S_{-i} -> Q_{>=0}`.
///
/// Implementations may assume `prefix` is duplicate-free, in range and does
/// not contain `agent`; [`ValuationOracle`] enforces this before calling.
pub trait Valuation {
    fn agents(&self) -> usize;

    fn value(&self, agent: AgentId, prefix: &[AgentId]) -> Value;

    /// Whether the instance claims `S' <= S => v_i(S') >= v_i(S)`.
    fn monotone_claimed(&self) -> bool {
        true
    }
}

impl<V: Valuation + ?Sized> Valuation for &V {
    fn agents(&self) -> usize {
        (**self).agents()
    }

    fn value(&self, agent: AgentId, prefix: &[AgentId]) -> Value {
        (**self).value(agent, prefix)
    }

    fn monotone_claimed(&self) -> bool {
        (**self).monotone_claimed()
    }
}

impl<V: Valuation + ?Sized> Valuation for Box<V> {
    fn agents(&self) -> usize {
        (**self).agents()
    }

    fn value(&self, agent: AgentId, prefix: &[AgentId]) -> Value {
        (**self).value(agent, prefix)
    }

    fn monotone_claimed(&self) -> bool {
        (**self).monotone_claimed()
    }
}

/// Counts every query, and separately the distinct `(agent, subsequence)`
/// pairs seen.
#[derive(Default, Clone)]
pub struct QueryLedger {
    total: u64,
    // 64-bit fingerprints; exact keys would cost gigabytes at the factorial cap.
    seen: HashSet<u64>,
}

impl QueryLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, agent: AgentId, prefix: &[AgentId]) {
        self.total += 1;
        let mut h = DefaultHasher::new();
        agent.hash(&mut h);
        prefix.hash(&mut h);
        self.seen.insert(h.finish());
    }

    pub fn total_calls(&self) -> u64 {
        self.total
    }

    pub fn distinct_calls(&self) -> u64 {
        self.seen.len() as u64
    }
}

impl fmt::Debug for QueryLedger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QueryLedger")
            .field("total_calls", &self.total)
            .field("distinct_calls", &self.seen.len())
            .finish()
    }
}

/// The only access path to valuations. Every [`query`](Self::query) is
/// recorded in the attached ledger.
pub struct ValuationOracle<'a> {
    valuation: &'a dyn Valuation,
    ledger: QueryLedger,
}

impl<'a> ValuationOracle<'a> {
    pub fn new(valuation: &'a dyn Valuation) -> Self {
        ValuationOracle {
            valuation,
            ledger: QueryLedger::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.valuation.agents()
    }

    pub fn monotone_claimed(&self) -> bool {
        self.valuation.monotone_claimed()
    }

    /// `v_agent(prefix)`.
    pub fn query(&mut self, agent: AgentId, prefix: &[AgentId]) -> Result<Value> {
        self.validate(agent, prefix)?;
        self.ledger.record(agent, prefix);
        Ok(self.valuation.value(agent, prefix))
    }

    pub fn ledger(&self) -> &QueryLedger {
        &self.ledger
    }

    pub fn total_calls(&self) -> u64 {
        self.ledger.total_calls()
    }

    /// Hands back the ledger and starts a fresh one.
    pub fn take_ledger(&mut self) -> QueryLedger {
        std::mem::take(&mut self.ledger)
    }

    fn validate(&self, agent: AgentId, prefix: &[AgentId]) -> Result<()> {
        let n = self.n();
        if agent >= n {
            return Err(Error::AgentOutOfRange { agent, n });
        }
        let mut seen = vec![false; n];
        for &a in prefix {
            if a >= n {
                return Err(Error::AgentOutOfRange { agent: a, n });
            }
            if a == agent {
                return Err(Error::SelfQuery(agent));
            }
            if std::mem::replace(&mut seen[a], true) {
                return Err(Error::DuplicateAgent(a));
            }
        }
        Ok(())
    }
}

impl fmt::Debug for ValuationOracle<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ValuationOracle")
            .field("n", &self.n())
            .field("ledger", &self.ledger)
            .finish()
    }
}

/// A valuation that is identically zero.
#[derive(Debug, Clone, Copy)]
pub struct ZeroValuation(pub usize);

impl Valuation for ZeroValuation {
    fn agents(&self) -> usize {
        self.0
    }

    fn value(&self, _agent: AgentId, _prefix: &[AgentId]) -> Value {
        crate::value::zero()
    }
}
