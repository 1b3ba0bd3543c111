use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value as Json};

use seqdict::osa::{bit, bit_expected_welfare, greedy_osa};
use seqdict::osi::osi_learn_and_solve;
use seqdict::osm::greedy_osm;
use seqdict::seqopt::{det, det_plus, rand_seeded};
use seqdict::value::to_f64;
use seqdict::welfare::{brute_force_optimal_sequence, posd_ratio, price_of_serial_dictatorship, social_welfare};
use seqdict::{ActionSeq, Caps, Error, ValuationOracle, Value};

use crate::instance::{Instance, InstanceFile};
use crate::report::{envelope, pq, ratio_f64, ratio_str};
use crate::CliError;

pub const ALGORITHMS: [&str; 7] = ["det", "rand", "det-plus", "greedy-osm", "greedy-osa", "bit", "osi-learn"];

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub sequence: ActionSeq,
    pub welfare: Value,
    pub queries: u64,
    pub distinct_queries: u64,
    /// The subset drawn by `rand`.
    pub subset: Option<Vec<usize>>,
    /// Exact expectation over both coin outcomes, for `bit`.
    pub expected_welfare: Option<Value>,
}

fn need_c(algorithm: &str, c: Option<usize>) -> Result<usize, CliError> {
    c.ok_or_else(|| CliError::Usage(format!("{algorithm} needs --c")))
}

fn need_kind(algorithm: &str, inst: &Instance, kind: &str) -> Result<(), CliError> {
    if inst.kind() != kind {
        return Err(CliError::Usage(format!("{algorithm} needs a {kind} instance, got {}", inst.kind())));
    }
    Ok(())
}

/// Runs `algorithm` and evaluates the sequence it returns.
pub fn run_algorithm(
    inst: &Instance,
    algorithm: &str,
    c: Option<usize>,
    seed: u64,
    caps: &Caps,
) -> Result<RunOutcome, CliError> {
    let v = inst.valuation();
    let mut oracle = ValuationOracle::new(v);
    let mut subset = None;
    let mut expected_welfare = None;
    let sequence = match algorithm {
        "det" => det(&mut oracle, need_c(algorithm, c)?)?,
        "rand" => {
            let run = rand_seeded(&mut oracle, need_c(algorithm, c)?, seed)?;
            subset = Some(run.subset);
            run.sequence
        }
        "det-plus" => det_plus(&mut oracle, need_c(algorithm, c)?, caps)?,
        "greedy-osm" => {
            need_kind(algorithm, inst, "osm")?;
            greedy_osm(&mut oracle)?
        }
        "greedy-osa" => {
            need_kind(algorithm, inst, "osa")?;
            greedy_osa(&mut oracle)?
        }
        "bit" => {
            expected_welfare = Some(bit_expected_welfare(v)?);
            bit(inst.n(), ChaCha8Rng::seed_from_u64(seed).gen_bool(0.5))
        }
        "osi-learn" => {
            need_kind(algorithm, inst, "osi")?;
            osi_learn_and_solve(&mut oracle, caps)?
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown algorithm {other:?}; expected one of {}",
                ALGORITHMS.join(", ")
            )))
        }
    };
    let queries = oracle.total_calls();
    let distinct_queries = oracle.ledger().distinct_calls();
    let welfare = social_welfare(&mut ValuationOracle::new(v), &sequence)?;
    Ok(RunOutcome { sequence, welfare, queries, distinct_queries, subset, expected_welfare })
}

/// The best-sequence optimum, or `None` when the enumeration is over the
/// caps.
pub fn best_sequence(inst: &Instance, caps: &Caps) -> Result<Option<(ActionSeq, Value)>, CliError> {
    match brute_force_optimal_sequence(&mut ValuationOracle::new(inst.valuation()), caps) {
        Ok(x) => Ok(Some(x)),
        Err(Error::CapExceeded { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

pub fn run_report(
    file: &InstanceFile,
    algorithm: &str,
    c: Option<usize>,
    seed: u64,
    caps: &Caps,
) -> Result<Json, CliError> {
    let inst = &file.instance;
    let out = run_algorithm(inst, algorithm, c, seed, caps)?;
    let mut body = json!({
        "kind": inst.kind(),
        "n": inst.n(),
        "algorithm": algorithm,
        "c": c,
        "seed": seed,
        "sequence": out.sequence.as_slice(),
        "welfare": pq(&out.welfare),
        "welfare_decimal": to_f64(&out.welfare),
        "queries": out.queries,
        "distinct_queries": out.distinct_queries,
    });
    let obj = body.as_object_mut().expect("object literal");
    if let Some(s) = &out.subset {
        obj.insert("subset".into(), json!(s));
    }
    if let Some(e) = &out.expected_welfare {
        obj.insert("expected_welfare".into(), json!(pq(e)));
    }
    match best_sequence(inst, caps)? {
        Some((best, opt)) => {
            let r = posd_ratio(&opt, &out.welfare);
            obj.insert("optimum".into(), json!(pq(&opt)));
            obj.insert("optimal_sequence".into(), json!(best.as_slice()));
            obj.insert("ratio".into(), json!(ratio_str(&r)));
            obj.insert("ratio_decimal".into(), json!(ratio_f64(&r)));
        }
        None => {
            obj.insert("optimum_skipped".into(), json!(format!("n = {} exceeds the factorial cap", inst.n())));
        }
    }
    Ok(envelope("run", caps, body))
}

pub fn run_text(report: &Json) -> String {
    let g = |k: &str| report.get(k).map(|v| v.to_string().trim_matches('"').to_string()).unwrap_or_default();
    let mut s = format!(
        "{} on {} (n = {})\nsequence: {}\nwelfare:  {} ({})\nqueries:  {} ({} distinct)\n",
        g("algorithm"),
        g("kind"),
        g("n"),
        g("sequence"),
        g("welfare"),
        g("welfare_decimal"),
        g("queries"),
        g("distinct_queries"),
    );
    if report.get("optimum").is_some() {
        s += &format!("optimum:  {} via {}\nratio:    {}\n", g("optimum"), g("optimal_sequence"), g("ratio"));
    } else if report.get("optimum_skipped").is_some() {
        s += &format!("optimum:  skipped, {}\n", g("optimum_skipped"));
    }
    if report.get("expected_welfare").is_some() {
        s += &format!("expected: {}\n", g("expected_welfare"));
    }
    s
}

pub fn posd_report(file: &InstanceFile, caps: &Caps) -> Result<Json, CliError> {
    let inst = &file.instance;
    let problem = inst
        .underlying()
        .ok_or_else(|| CliError::Usage(format!("{} instances have no underlying problem", inst.kind())))?;
    let r = price_of_serial_dictatorship(problem, caps)?;
    Ok(envelope(
        "posd",
        caps,
        json!({
            "kind": inst.kind(),
            "n": inst.n(),
            "optimum": pq(&r.optimum),
            "best_welfare": pq(&r.best_welfare),
            "best_sequence": r.best_sequence.as_slice(),
            "ratio": ratio_str(&r.ratio),
            "ratio_decimal": ratio_f64(&r.ratio),
        }),
    ))
}

pub fn posd_text(report: &Json) -> String {
    let g = |k: &str| report.get(k).map(|v| v.to_string().trim_matches('"').to_string()).unwrap_or_default();
    format!(
        "underlying optimum: {}\nbest sequence:      {} with welfare {}\nPoSD:               {} ({})\n",
        g("optimum"),
        g("best_sequence"),
        g("best_welfare"),
        g("ratio"),
        g("ratio_decimal"),
    )
}
