//! `seqdict bench`: per-(n, c) cells of fresh random instances, one CSV row
//! per cell.
//!
//! For each trial `fraction = SW / OPT` (1 when `OPT = 0`) and
//! `ratio = OPT / SW` (`inf` when only `SW` is 0), `OPT` being the best
//! action-sequence welfare by brute force. `mean_ratio` is
//! `1 / mean_fraction`, the ratio in expectation; a mean of per-trial ratios
//! would be infinite as soon as one trial scores 0.

use std::io::Write;
use std::ops::RangeInclusive;
use std::time::Instant;

use seqdict::value::to_f64;
use seqdict::welfare::posd_ratio;
use seqdict::Caps;

use crate::gen::{random_instance, GenOptions};
use crate::report::ratio_f64;
use crate::run::{best_sequence, run_algorithm};
use crate::verify::derive_seed;
use crate::CliError;

pub const HEADER: [&str; 14] = [
    "kind",
    "algorithm",
    "n",
    "c",
    "trials",
    "seed",
    "mean_fraction",
    "stderr_fraction",
    "min_fraction",
    "mean_ratio",
    "max_ratio",
    "mean_queries",
    "mean_micros",
    "optimum_trials",
];

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub kind: String,
    pub algorithm: String,
    pub n: RangeInclusive<usize>,
    pub c: Option<RangeInclusive<usize>>,
    pub trials: usize,
    pub seed: u64,
}

/// `3..6` (inclusive) or a single `4`.
pub fn parse_range(s: &str) -> Result<RangeInclusive<usize>, CliError> {
    let bad = || CliError::Usage(format!("bad range {s:?}; expected a..b or a"));
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (a, b.trim_start_matches('=')),
        None => (s, s),
    };
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    if a > b {
        return Err(bad());
    }
    Ok(a..=b)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub n: usize,
    pub c: Option<usize>,
    pub trials: usize,
    pub mean_fraction: f64,
    pub stderr_fraction: f64,
    pub min_fraction: f64,
    pub mean_ratio: f64,
    pub max_ratio: f64,
    pub mean_queries: f64,
    pub mean_micros: f64,
    /// Trials whose optimum was within the caps.
    pub optimum_trials: usize,
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        f64::NAN
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

fn run_cell(cfg: &BenchConfig, n: usize, c: Option<usize>, caps: &Caps) -> Result<Cell, CliError> {
    let (mut fractions, mut ratios, mut queries, mut micros) = (vec![], vec![], vec![], vec![]);
    let opts = GenOptions::default();
    for t in 0..cfg.trials {
        let label = format!("{}/{}/{n}/{c:?}", cfg.kind, cfg.algorithm);
        let inst_seed = derive_seed(cfg.seed, &label, 2 * t);
        let run_seed = derive_seed(cfg.seed, &label, 2 * t + 1);
        let inst = random_instance(&cfg.kind, n, inst_seed, &opts)?;
        let start = Instant::now();
        let out = run_algorithm(&inst, &cfg.algorithm, c, run_seed, caps)?;
        micros.push(start.elapsed().as_secs_f64() * 1e6);
        queries.push(out.queries as f64);
        if let Some((_, opt)) = best_sequence(&inst, caps)? {
            let fraction = if opt == seqdict::value::zero() { 1.0 } else { to_f64(&(out.welfare.clone() / &opt)) };
            fractions.push(fraction);
            ratios.push(ratio_f64(&posd_ratio(&opt, &out.welfare)));
        }
    }
    let mf = mean(&fractions);
    let sd = if fractions.len() > 1 {
        (fractions.iter().map(|x| (x - mf).powi(2)).sum::<f64>() / (fractions.len() - 1) as f64).sqrt()
    } else {
        0.0
    };
    Ok(Cell {
        n,
        c,
        trials: cfg.trials,
        mean_fraction: mf,
        stderr_fraction: if fractions.is_empty() { f64::NAN } else { sd / (fractions.len() as f64).sqrt() },
        min_fraction: fractions.iter().copied().fold(f64::NAN, f64::min),
        mean_ratio: 1.0 / mf,
        max_ratio: ratios.iter().copied().fold(f64::NAN, f64::max),
        mean_queries: mean(&queries),
        mean_micros: mean(&micros),
        optimum_trials: fractions.len(),
    })
}

fn takes_c(algorithm: &str) -> bool {
    matches!(algorithm, "det" | "rand" | "det-plus")
}

/// Cells in row order: `n` ascending, then `c` ascending; cells with
/// `c > n` are skipped. No cells at all when `trials` is 0.
pub fn run_bench(cfg: &BenchConfig, caps: &Caps) -> Result<Vec<Cell>, CliError> {
    if cfg.trials == 0 {
        return Ok(vec![]);
    }
    if takes_c(&cfg.algorithm) && cfg.c.is_none() {
        return Err(CliError::Usage(format!("{} needs --c", cfg.algorithm)));
    }
    let mut cells = Vec::new();
    for n in cfg.n.clone() {
        match (&cfg.c, takes_c(&cfg.algorithm)) {
            (Some(cs), true) => {
                for c in cs.clone().filter(|&c| c >= 1 && c <= n) {
                    cells.push(run_cell(cfg, n, Some(c), caps)?);
                }
            }
            _ => cells.push(run_cell(cfg, n, None, caps)?),
        }
    }
    Ok(cells)
}

fn num(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else if x.is_infinite() {
        "inf".into()
    } else {
        format!("{x:.6}")
    }
}

pub fn write_csv(cfg: &BenchConfig, cells: &[Cell], out: impl Write) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| CliError::Io(std::io::Error::other(e));
    w.write_record(HEADER).map_err(io)?;
    for cell in cells {
        w.write_record([
            cfg.kind.clone(),
            cfg.algorithm.clone(),
            cell.n.to_string(),
            cell.c.map(|c| c.to_string()).unwrap_or_default(),
            cell.trials.to_string(),
            cfg.seed.to_string(),
            num(cell.mean_fraction),
            num(cell.stderr_fraction),
            num(cell.min_fraction),
            num(cell.mean_ratio),
            num(cell.max_ratio),
            num(cell.mean_queries),
            num(cell.mean_micros),
            cell.optimum_trials.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}
