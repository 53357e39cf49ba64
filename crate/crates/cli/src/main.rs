mod crosscheck;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use loctame::hornsat::{self, Mode, Outcome};
use loctame::interpolate::{interpolate, InterpolationError, InterpolationProblem};
use loctame::normalize::normalize;
use loctame::pipeline::{check_query, classify, explain};
use loctame::reduce::parse_dump;
use loctame::syntax::{parse_cbox, CBox};

use report::{print_text, query_report, RunReport};

#[derive(Parser)]
#[command(name = "loctame", version, about = "Subsumption and interpolation for EL-family CBoxes")]
struct Cli {
    #[arg(long, value_enum, default_value = "chase", global = true)]
    mode: ModeArg,
    /// Normalize the CBox before reasoning.
    #[arg(long, global = true)]
    normalize: bool,
    /// Print the Ψ-closure of each query.
    #[arg(long, global = true)]
    emit_psi: bool,
    /// Print the ground Horn problem of each query.
    #[arg(long, global = true)]
    emit_reduction: bool,
    #[arg(long, global = true)]
    json: bool,
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Instantiate,
    Chase,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Instantiate => Mode::Instantiate,
            ModeArg::Chase => Mode::Chase,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Decide every `?` query of a CBox file.
    Check { file: PathBuf },
    /// Subsumption between all concept names.
    Classify { file: PathBuf },
    /// Print the derivation of a query (the first one by default).
    Explain {
        file: PathBuf,
        #[arg(long, default_value_t = 1)]
        query: usize,
    },
    /// Ground interpolant for a file of `A:` and `B:` literals.
    Interpolate { file: PathBuf },
    /// Solve a Horn problem in the `--emit-reduction` format.
    Solve { file: PathBuf },
    /// Compare the pipeline with the oracles on a file and on random CBoxes.
    CrossCheck {
        file: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        samples: usize,
    },
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load(path: &Path, norm: bool) -> Result<CBox> {
    let text = read(path)?;
    let cbox = parse_cbox(&text).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
    if norm {
        return Ok(normalize(&cbox)?.cbox);
    }
    Ok(cbox)
}

fn print_json<T: serde::Serialize>(v: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn ok_if(holds: bool) -> ExitCode {
    if holds {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let mode: Mode = cli.mode.into();
    match cli.command {
        Command::Check { file } => {
            let cbox = load(&file, cli.normalize)?;
            if cbox.queries.is_empty() {
                bail!("{}: no queries", file.display());
            }
            let queries = cbox
                .queries
                .iter()
                .map(|q| query_report(&check_query(&cbox, q, mode), cli.emit_psi, cli.emit_reduction))
                .collect();
            let report = RunReport { file: file.display().to_string(), mode: mode.to_string(), seed: cli.seed, queries };
            if cli.json {
                print_json(&report)?;
            } else {
                print_text(&report);
            }
            Ok(ok_if(report.all_hold()))
        }
        Command::Classify { file } => {
            let cbox = load(&file, cli.normalize)?;
            let c = classify(&cbox, None, mode);
            if cli.json {
                print_json(&serde_json::json!({ "names": c.names, "matrix": c.matrix }))?;
            } else {
                for n in &c.names {
                    println!("{n}: {}", c.subsumers(n).join(", "));
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Explain { file, query } => {
            let cbox = load(&file, cli.normalize)?;
            let Some(q) = query.checked_sub(1).and_then(|i| cbox.queries.get(i)) else {
                bail!("{}: no query #{query}", file.display());
            };
            let r = check_query(&cbox, q, mode);
            match explain(&r) {
                Ok(lines) => {
                    if cli.json {
                        print_json(&serde_json::json!({ "query": r.query, "steps": lines }))?;
                    } else {
                        println!("{}", r.query);
                        lines.iter().for_each(|l| println!("{l}"));
                    }
                    Ok(ExitCode::SUCCESS)
                }
                Err(e) => {
                    eprintln!("{e}");
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::Interpolate { file } => {
            let mut p = InterpolationProblem::parse(&read(&file)?)?;
            match interpolate(&mut p) {
                Ok(i) => {
                    if cli.json {
                        print_json(&serde_json::json!({
                            "interpolant": i.to_string(),
                            "atoms": i.rendered,
                            "rounds": i.rounds,
                            "separations": i.separations,
                        }))?;
                    } else {
                        println!("{i}");
                    }
                    Ok(ExitCode::SUCCESS)
                }
                Err(e @ InterpolationError::NotUnsat) => {
                    eprintln!("{e}");
                    Ok(ExitCode::from(1))
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Solve { file } => {
            let p = parse_dump(&read(&file)?).map_err(|e| anyhow::anyhow!("{}:{}: {}", file.display(), e.line, e.msg))?;
            let sat = hornsat::saturate(&p);
            let outcome = hornsat::solve(&p);
            let unsat = matches!(outcome, Outcome::Unsat(..));
            if cli.json {
                print_json(&serde_json::json!({
                    "result": if unsat { "unsat" } else { "sat" },
                    "derived": sat.stats.derived,
                    "decrements": sat.stats.decrements,
                    "literal_occurrences": sat.stats.literal_occurrences,
                }))?;
            } else {
                println!("{}", if unsat { "UNSAT" } else { "SAT" });
                println!("  derived {}  decrements {}", sat.stats.derived, sat.stats.decrements);
            }
            Ok(ok_if(unsat))
        }
        Command::CrossCheck { file, samples } => {
            let mut report = match &file {
                Some(f) => crosscheck::check_file(&load(f, cli.normalize)?),
                None => Default::default(),
            };
            crosscheck::check_samples(samples, cli.seed, &mut report);
            if cli.json {
                print_json(&report)?;
            } else {
                for f in &report.failures {
                    match f.seed {
                        Some(s) => println!("FAIL seed {s}: {}", f.what),
                        None => println!("FAIL {}", f.what),
                    }
                }
                println!(
                    "{} checks, {} failures, {} unconfirmed non-subsumptions",
                    report.checked,
                    report.failures.len(),
                    report.unconfirmed
                );
            }
            Ok(ok_if(report.failures.is_empty()))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
