use std::io::{ErrorKind, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use seqdict::value::parse_value;
use seqdict_cli::bench::{parse_range, run_bench, write_csv, BenchConfig};
use seqdict_cli::gen::{named_instance, parse_x3c_sets, random_instance, GenOptions};
use seqdict_cli::instance::{parse, serialize, InstanceFile};
use seqdict_cli::report::to_pretty;
use seqdict_cli::run::{posd_report, posd_text, run_report, run_text};
use seqdict_cli::verify::{run_suite, verify_report, verify_text, VerifyOptions};
use seqdict_cli::{caps_from_env, CliError, EXIT_USAGE, EXIT_VERIFY_FAILED};

/// Optimal action sequences, serial dictatorships and their prices.
///
/// Enumeration caps can be overridden with SEQDICT_CAPS, e.g.
/// `SEQDICT_CAPS=factorial=8,exponential=16,monotone=5`.
#[derive(Parser)]
#[command(name = "seqdict", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a random or named instance file.
    Gen {
        /// osm, osa, oss, osi, paths, lowerbound or general.
        kind: Option<String>,
        /// Number of agents.
        n: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Weights are multiples of 1/DENOM.
        #[arg(long, default_value_t = 4)]
        denom: u32,
        /// F_c parameter for lowerbound.
        #[arg(long)]
        c: Option<usize>,
        /// Clause count for oss.
        #[arg(long)]
        clauses: Option<usize>,
        /// Named instance: sat-posd, paths-posd, oss-nonmono,
        /// osm-counterexample, osa-counterexample or x3c.
        #[arg(long = "paper", value_name = "NAME")]
        named: Option<String>,
        #[arg(long, default_value = "1/10")]
        eps: String,
        /// X3C universe size, with --paper x3c.
        #[arg(long)]
        universe: Option<usize>,
        /// X3C sets such as "0,1,2;3,4,5", with --paper x3c.
        #[arg(long)]
        sets: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run an algorithm on an instance file ("-" reads stdin).
    Run {
        file: PathBuf,
        /// det, rand, det-plus, greedy-osm, greedy-osa, bit or osi-learn.
        algorithm: String,
        #[arg(long)]
        c: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Underlying optimum, best action-sequence welfare and their ratio.
    Posd {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Run a property suite; exits 1 if any check fails.
    Verify {
        /// monotonicity, pareto, approx, truthful, lowerbound or x3c.
        suite: String,
        /// Check one file instead (monotonicity, truthful).
        #[arg(long)]
        instance: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random instances per structure.
        #[arg(long, default_value_t = 50)]
        instances: usize,
        #[arg(long)]
        json: bool,
    },
    /// CSV of per-cell welfare fractions, ratios, queries and timings.
    Bench {
        kind: String,
        #[arg(long = "algo")]
        algorithm: String,
        /// Inclusive range such as 3..6.
        #[arg(long = "n")]
        n_range: String,
        /// Inclusive range of c for det, rand and det-plus.
        #[arg(long = "c")]
        c_range: Option<String>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn read_instance(path: &PathBuf) -> Result<InstanceFile, CliError> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        s
    } else {
        std::fs::read_to_string(path)?
    };
    parse(&text)
}

/// Writes to stdout; a closed pipe (`| head`) is not an error.
fn out(text: &str) -> Result<(), CliError> {
    let mut stdout = std::io::stdout().lock();
    match stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()) {
        Err(e) if e.kind() != ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn emit(output: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match output {
        Some(p) => std::fs::write(p, text)?,
        None => out(text)?,
    }
    Ok(())
}

fn real_main(cli: Cli) -> Result<ExitCode, CliError> {
    let caps = caps_from_env()?;
    match cli.command {
        Command::Gen { kind, n, seed, denom, c, clauses, named, eps, universe, sets, output } => {
            let file = match (named, kind) {
                (Some(name), None) => {
                    let eps = parse_value(&eps).map_err(|e| CliError::Usage(format!("--eps: {e}")))?;
                    let x3c = match (universe, sets) {
                        (Some(u), Some(s)) => Some((u, parse_x3c_sets(&s)?)),
                        (None, None) => None,
                        _ => return Err(CliError::Usage("--universe and --sets go together".into())),
                    };
                    named_instance(&name, &eps, x3c)?
                }
                (None, Some(kind)) => {
                    let n = n.ok_or_else(|| CliError::Usage("gen KIND needs N".into()))?;
                    let opts = GenOptions { denom, c, clauses, ..GenOptions::default() };
                    InstanceFile::plain(random_instance(&kind, n, seed, &opts)?)
                }
                (Some(_), Some(_)) => return Err(CliError::Usage("give either KIND N or --paper, not both".into())),
                (None, None) => return Err(CliError::Usage("gen needs KIND N or --paper NAME".into())),
            };
            emit(&output, &serialize(&file))?;
        }
        Command::Run { file, algorithm, c, seed, json } => {
            let report = run_report(&read_instance(&file)?, &algorithm, c, seed, &caps)?;
            if json {
                out(&(to_pretty(&report) + "\n"))?;
            } else {
                out(&run_text(&report))?;
            }
        }
        Command::Posd { file, json } => {
            let report = posd_report(&read_instance(&file)?, &caps)?;
            if json {
                out(&(to_pretty(&report) + "\n"))?;
            } else {
                out(&posd_text(&report))?;
            }
        }
        Command::Verify { suite, instance, seed, instances, json } => {
            let file = instance.as_ref().map(read_instance).transpose()?;
            let opts = VerifyOptions { seed, instances };
            let checks = run_suite(&suite, file.as_ref(), &opts, &caps)?;
            if json {
                out(&(to_pretty(&verify_report(&suite, &opts, &caps, &checks)) + "\n"))?;
            } else {
                out(&verify_text(&checks))?;
            }
            if checks.iter().any(|c| !c.passed) {
                return Ok(ExitCode::from(EXIT_VERIFY_FAILED as u8));
            }
        }
        Command::Bench { kind, algorithm, n_range, c_range, trials, seed, output } => {
            let cfg = BenchConfig {
                kind,
                algorithm,
                n: parse_range(&n_range)?,
                c: c_range.as_deref().map(parse_range).transpose()?,
                trials,
                seed,
            };
            let cells = run_bench(&cfg, &caps)?;
            let mut buf = Vec::new();
            write_csv(&cfg, &cells, &mut buf)?;
            emit(&output, &String::from_utf8(buf).expect("CSV is UTF-8"))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match real_main(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE as u8)
        }
    }
}
