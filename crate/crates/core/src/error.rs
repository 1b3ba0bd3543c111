use thiserror::Error;

use crate::seq::AgentId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("agent {0} not in sequence")]
    AgentNotInSequence(AgentId),
    #[error("agent {agent} out of range for {n} agents")]
    AgentOutOfRange { agent: AgentId, n: usize },
    #[error("duplicate agent {0} in sequence")]
    DuplicateAgent(AgentId),
    #[error("query for agent {0} with a subsequence containing that agent")]
    SelfQuery(AgentId),
    #[error("sequence of length {len} is not a full sequence over {n} agents")]
    NotFull { len: usize, n: usize },
    #[error("enumeration cap exceeded: {what} with n = {n} (cap {cap})")]
    CapExceeded { what: &'static str, n: usize, cap: usize },
    #[error("parameter c = {c} out of range for {n} agents")]
    COutOfRange { c: usize, n: usize },
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("target collection is not full")]
    NotFullCollection,
    #[error("target collection is infeasible")]
    InfeasibleCollection,
    #[error("malformed X3C input: {0}")]
    MalformedX3c(String),
    #[error("parse error: {0}")]
    Parse(String),
}
