use seqdict::mechanisms::{osa_counterexample, osm_counterexample};
use seqdict::osa::random_digraph_instance;
use seqdict::osi::OsiInstance;
use seqdict::osm::random_matching_instance;
use seqdict::oss::{nonmonotone_sat_instance, posd_sat_instance, random_sat_instance, x3c_reduce};
use seqdict::paths::{posd_paths_instance, random_paths_instance};
use seqdict::seqopt::{LowerBoundInstance, MonotoneInstance};
use seqdict::value::int;
use seqdict::Value;

use crate::instance::{Instance, InstanceFile, Misreport};
use crate::CliError;

pub const NAMED_INSTANCES: [&str; 6] =
    ["sat-posd", "paths-posd", "oss-nonmono", "osm-counterexample", "osa-counterexample", "x3c"];

#[derive(Debug, Clone)]
pub struct GenOptions {
    /// Weights are multiples of `1 / denom`.
    pub denom: u32,
    /// `F_c` parameter; defaults to `max(1, n / 2)`.
    pub c: Option<usize>,
    /// Number of clauses for `oss`; defaults to `2n`.
    pub clauses: Option<usize>,
    /// Edge probability for `osi`, as `(numerator, denominator)`.
    pub edge_prob: (u32, u32),
}

impl Default for GenOptions {
    fn default() -> Self {
        GenOptions { denom: 4, c: None, clauses: None, edge_prob: (1, 2) }
    }
}

pub fn random_instance(kind: &str, n: usize, seed: u64, opts: &GenOptions) -> Result<Instance, CliError> {
    let d = opts.denom;
    Ok(match kind {
        "osm" => Instance::Osm(random_matching_instance(n, seed, d)),
        "osa" => Instance::Osa(random_digraph_instance(n, seed, d)),
        "oss" => Instance::Oss(random_sat_instance(n, opts.clauses.unwrap_or(2 * n), 3, seed, d)?),
        "osi" => Instance::Osi(OsiInstance::random(n, seed, opts.edge_prob.0, opts.edge_prob.1)),
        "paths" => Instance::Paths(random_paths_instance(n, seed, d)),
        "lowerbound" => {
            let c = opts.c.unwrap_or((n / 2).max(1));
            Instance::LowerBound(LowerBoundInstance::random(n, c, seed)?)
        }
        "general" => Instance::General(MonotoneInstance::random(n, seed, d)),
        other => return Err(CliError::Usage(format!("unknown kind {other:?}"))),
    })
}

/// X3C input written as `0,1,2;3,4,5`.
pub fn parse_x3c_sets(text: &str) -> Result<Vec<[usize; 3]>, CliError> {
    text.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            let xs: Vec<usize> = s
                .split(',')
                .map(|x| x.trim().parse().map_err(|_| CliError::Usage(format!("bad X3C element {x:?}"))))
                .collect::<Result<_, _>>()?;
            <[usize; 3]>::try_from(xs).map_err(|_| CliError::Usage(format!("X3C set {s:?} must have 3 elements")))
        })
        .collect()
}

/// The named instances. `x3c` reduces `sets` over `0..universe`, by default
/// the single set `{0, 1, 2}`.
pub fn named_instance(
    name: &str,
    eps: &Value,
    x3c: Option<(usize, Vec<[usize; 3]>)>,
) -> Result<InstanceFile, CliError> {
    let misreport = |agent: usize, row: &[Value]| Some(Misreport { agent, weights: row.to_vec() });
    Ok(match name {
        "sat-posd" => InstanceFile::plain(Instance::Oss(posd_sat_instance(eps)?)),
        "paths-posd" => InstanceFile::plain(Instance::Paths(posd_paths_instance(eps)?)),
        "oss-nonmono" => InstanceFile::plain(Instance::Oss(nonmonotone_sat_instance())),
        "osm-counterexample" => {
            check_eps(eps)?;
            let (truth, alt) = osm_counterexample(eps)?;
            InstanceFile { misreport: misreport(0, &alt.weights()[0]), instance: Instance::Osm(truth) }
        }
        "osa-counterexample" => {
            check_eps(eps)?;
            let (truth, alt) = osa_counterexample(eps)?;
            InstanceFile { misreport: misreport(0, &alt.weights()[0]), instance: Instance::Osa(truth) }
        }
        "x3c" => {
            let (universe, sets) = x3c.unwrap_or((3, vec![[0, 1, 2]]));
            InstanceFile::plain(Instance::Oss(x3c_reduce(universe, &sets)?))
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown --paper instance {other:?}; expected one of {}",
                NAMED_INSTANCES.join(", ")
            )))
        }
    })
}

fn check_eps(eps: &Value) -> Result<(), CliError> {
    if *eps <= int(0) || *eps >= int(1) {
        return Err(CliError::Usage("--eps must lie in (0, 1)".into()));
    }
    Ok(())
}
