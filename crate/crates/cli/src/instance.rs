//! The JSON instance file: `{"schema_version", "kind", "payload"}` with every
//! rational written as a `"p/q"` string.

use serde::{Deserialize, Serialize};
use serde_json::Value as Json;

use seqdict::mechanisms::ValuationProfile;
use seqdict::osa::ArborescenceInstance;
use seqdict::osi::OsiInstance;
use seqdict::osm::MatchingInstance;
use seqdict::oss::{Clause, Literal, SatInstance};
use seqdict::paths::PathsInstance;
use seqdict::seqopt::{LowerBoundInstance, MonotoneInstance};
use seqdict::value::{parse_value, to_pq};
use seqdict::welfare::UnderlyingProblem;
use seqdict::{ActionSeq, AgentId, Caps, Valuation, Value};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

pub const KINDS: [&str; 7] = ["osm", "osa", "oss", "osi", "paths", "lowerbound", "general"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instance {
    Osm(MatchingInstance),
    Osa(ArborescenceInstance),
    Oss(SatInstance),
    Osi(OsiInstance),
    Paths(PathsInstance),
    LowerBound(LowerBoundInstance),
    General(MonotoneInstance),
}

/// An alternative weight row for one agent of an `osm` or `osa` instance,
/// used by the truthfulness checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Misreport {
    pub agent: AgentId,
    pub weights: Vec<Value>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceFile {
    pub instance: Instance,
    pub misreport: Option<Misreport>,
}

impl Instance {
    pub fn kind(&self) -> &'static str {
        match self {
            Instance::Osm(_) => "osm",
            Instance::Osa(_) => "osa",
            Instance::Oss(_) => "oss",
            Instance::Osi(_) => "osi",
            Instance::Paths(_) => "paths",
            Instance::LowerBound(_) => "lowerbound",
            Instance::General(_) => "general",
        }
    }

    pub fn valuation(&self) -> &dyn Valuation {
        match self {
            Instance::Osm(x) => x,
            Instance::Osa(x) => x,
            Instance::Oss(x) => x,
            Instance::Osi(x) => x,
            Instance::Paths(x) => x,
            Instance::LowerBound(x) => x,
            Instance::General(x) => x,
        }
    }

    pub fn n(&self) -> usize {
        self.valuation().agents()
    }

    /// `None` for kinds without an underlying combinatorial problem.
    pub fn underlying(&self) -> Option<&dyn UnderlyingProblem> {
        match self {
            Instance::Osm(x) => Some(x),
            Instance::Osa(x) => Some(x),
            Instance::Oss(x) => Some(x),
            Instance::Osi(x) => Some(x),
            Instance::Paths(x) => Some(x),
            Instance::LowerBound(_) | Instance::General(_) => None,
        }
    }
}

impl InstanceFile {
    pub fn plain(instance: Instance) -> Self {
        InstanceFile { instance, misreport: None }
    }

    /// The true profile and the misreported one, as explicit tables.
    pub fn misreport_profiles(&self, caps: &Caps) -> Result<Option<(ValuationProfile, ValuationProfile, AgentId)>, CliError> {
        let Some(m) = &self.misreport else {
            return Ok(None);
        };
        let alt: Box<dyn Valuation> = match &self.instance {
            Instance::Osm(x) => {
                let mut w = x.weights().to_vec();
                w[m.agent] = m.weights.clone();
                Box::new(MatchingInstance::from_weights(w)?)
            }
            Instance::Osa(x) => {
                let mut w = x.weights().to_vec();
                w[m.agent] = m.weights.clone();
                Box::new(ArborescenceInstance::from_weights(w)?)
            }
            _ => return Err(CliError::Usage("misreports are only defined for osm and osa".into())),
        };
        let truth = ValuationProfile::from_valuation(self.instance.valuation(), caps)?;
        let alt_profile = ValuationProfile::from_valuation(alt.as_ref(), caps)?;
        let lie = truth.with_agent(m.agent, alt_profile.table(m.agent).clone());
        Ok(Some((truth, lie, m.agent)))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Envelope {
    schema_version: u32,
    kind: String,
    payload: Json,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MisreportPayload {
    agent: usize,
    weights: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RankedPayload {
    weights: Vec<Vec<String>>,
    preferences: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    misreport: Option<MisreportPayload>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClausePayload {
    weight: String,
    /// 1-based, negative for negated variables.
    literals: Vec<i64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SatPayload {
    variables: usize,
    clauses: Vec<ClausePayload>,
    tie_default: Vec<bool>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OsiPayload {
    n: usize,
    edges: Vec<[usize; 2]>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PathsPayload {
    weights: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LowerBoundPayload {
    c: usize,
    hidden: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeneralPayload {
    base: Vec<String>,
    crowding: Vec<Vec<String>>,
    disorder: Vec<String>,
    reference: Vec<Vec<usize>>,
}

fn pq_row(row: &[Value]) -> Vec<String> {
    row.iter().map(to_pq).collect()
}

fn pq_matrix(m: &[Vec<Value>]) -> Vec<Vec<String>> {
    m.iter().map(|r| pq_row(r)).collect()
}

fn parse_row(row: &[String]) -> Result<Vec<Value>, CliError> {
    row.iter().map(|s| parse_value(s).map_err(CliError::from)).collect()
}

fn parse_matrix(m: &[Vec<String>]) -> Result<Vec<Vec<Value>>, CliError> {
    m.iter().map(|r| parse_row(r)).collect()
}

fn to_json<T: Serialize>(x: T) -> Json {
    serde_json::to_value(x).expect("payloads always serialize")
}

fn from_json<T: for<'de> Deserialize<'de>>(kind: &str, payload: Json) -> Result<T, CliError> {
    serde_json::from_value(payload).map_err(|e| CliError::Format(format!("{kind} payload: {e}")))
}

pub fn to_json_value(file: &InstanceFile) -> Json {
    let misreport = file.misreport.as_ref().map(|m| MisreportPayload { agent: m.agent, weights: pq_row(&m.weights) });
    let payload = match &file.instance {
        Instance::Osm(x) => to_json(RankedPayload {
            weights: pq_matrix(x.weights()),
            preferences: (0..x.n()).map(|i| x.preferences(i).to_vec()).collect(),
            misreport,
        }),
        Instance::Osa(x) => to_json(RankedPayload {
            weights: pq_matrix(x.weights()),
            preferences: (0..x.n()).map(|i| x.preferences(i).to_vec()).collect(),
            misreport,
        }),
        Instance::Oss(x) => to_json(SatPayload {
            variables: x.n(),
            clauses: x
                .clauses()
                .iter()
                .map(|c| ClausePayload {
                    weight: to_pq(&c.weight),
                    literals: c.literals.iter().map(|l| l.to_dimacs()).collect(),
                })
                .collect(),
            tie_default: x.tie_default().to_vec(),
        }),
        Instance::Osi(x) => to_json(OsiPayload {
            n: x.n(),
            edges: (0..x.n())
                .flat_map(|a| (a + 1..x.n()).filter(move |&b| x.has_edge(a, b)).map(move |b| [a, b]))
                .collect(),
        }),
        Instance::Paths(x) => to_json(PathsPayload { weights: pq_matrix(x.weights()) }),
        Instance::LowerBound(x) => to_json(LowerBoundPayload { c: x.c(), hidden: x.hidden().as_slice().to_vec() }),
        Instance::General(x) => to_json(GeneralPayload {
            base: pq_row(&x.base),
            crowding: pq_matrix(&x.crowding),
            disorder: pq_row(&x.disorder),
            reference: x.reference.clone(),
        }),
    };
    to_json(Envelope { schema_version: SCHEMA_VERSION, kind: file.instance.kind().into(), payload })
}

pub fn serialize(file: &InstanceFile) -> String {
    let mut s = serde_json::to_string_pretty(&to_json_value(file)).expect("JSON values always serialize");
    s.push('\n');
    s
}

pub fn parse(text: &str) -> Result<InstanceFile, CliError> {
    let env: Envelope = serde_json::from_str(text).map_err(|e| CliError::Format(e.to_string()))?;
    if env.schema_version != SCHEMA_VERSION {
        return Err(CliError::Format(format!(
            "unsupported schema_version {} (expected {SCHEMA_VERSION})",
            env.schema_version
        )));
    }
    let kind = env.kind.as_str();
    let mut misreport = None;
    let instance = match kind {
        "osm" | "osa" => {
            let p: RankedPayload = from_json(kind, env.payload)?;
            let w = parse_matrix(&p.weights)?;
            if let Some(m) = p.misreport {
                let weights = parse_row(&m.weights)?;
                if m.agent >= w.len() || weights.len() != w.len() {
                    return Err(CliError::Format("misreport does not fit the instance".into()));
                }
                misreport = Some(Misreport { agent: m.agent, weights });
            }
            if kind == "osm" {
                Instance::Osm(MatchingInstance::new(w, p.preferences)?)
            } else {
                Instance::Osa(ArborescenceInstance::new(w, p.preferences)?)
            }
        }
        "oss" => {
            let p: SatPayload = from_json(kind, env.payload)?;
            let mut clauses = Vec::with_capacity(p.clauses.len());
            for c in p.clauses {
                let lits = c
                    .literals
                    .iter()
                    .map(|&d| Literal::from_dimacs(d).ok_or_else(|| CliError::Format(format!("bad literal {d}"))))
                    .collect::<Result<Vec<_>, _>>()?;
                clauses.push(Clause::new(lits, parse_value(&c.weight)?));
            }
            Instance::Oss(SatInstance::with_tie_default(p.variables, clauses, p.tie_default)?)
        }
        "osi" => {
            let p: OsiPayload = from_json(kind, env.payload)?;
            let edges: Vec<(usize, usize)> = p.edges.iter().map(|e| (e[0], e[1])).collect();
            Instance::Osi(OsiInstance::from_edges(p.n, &edges)?)
        }
        "paths" => {
            let p: PathsPayload = from_json(kind, env.payload)?;
            Instance::Paths(PathsInstance::new(parse_matrix(&p.weights)?)?)
        }
        "lowerbound" => {
            let p: LowerBoundPayload = from_json(kind, env.payload)?;
            Instance::LowerBound(LowerBoundInstance::new(p.c, ActionSeq::new(p.hidden)?)?)
        }
        "general" => {
            let p: GeneralPayload = from_json(kind, env.payload)?;
            Instance::General(MonotoneInstance::new(
                parse_row(&p.base)?,
                parse_matrix(&p.crowding)?,
                parse_row(&p.disorder)?,
                p.reference,
            )?)
        }
        other => return Err(CliError::Format(format!("unknown kind {other:?}"))),
    };
    Ok(InstanceFile { instance, misreport })
}
