//! Optimizing over serial dictatorships.
//!
//! Agents act one after the other in an *action sequence*; each picks its best
//! available action given what its predecessors did. The value agent `i` gets
//! when acting right after the subsequence `S` is only reachable through a
//! counted [`ValuationOracle`] query. This crate provides:
//!
//! - the oracle model with query accounting, social welfare, brute-force optima
//!   and the price of serial dictatorship ([`welfare`]);
//! - query-efficient approximation algorithms for general monotone instances
//!   and the adversarial lower-bound family ([`seqopt`]);
//! - the generic producibility decider for downward-closed constraints
//!   ([`feasibility`]);
//! - structured valuation domains: bipartite matchings ([`osm`]), arborescences
//!   ([`osa`]), weighted satisfiability ([`oss`]), independent sets ([`osi`])
//!   and longest paths ([`paths`]);
//! - VCG payments and truthfulness checks ([`mechanisms`]).
//!
//! All values are exact rationals.

pub mod caps;
pub mod error;
pub mod feasibility;
pub mod mechanisms;
pub mod oracle;
pub mod osa;
pub mod osi;
pub mod osm;
pub mod oss;
pub mod paths;
pub mod seq;
pub mod seqopt;
pub mod value;
pub mod welfare;

pub use caps::Caps;
pub use error::{Error, Result};
pub use oracle::{QueryLedger, Valuation, ValuationOracle};
pub use seq::{ActionSeq, AgentId};
pub use value::Value;
