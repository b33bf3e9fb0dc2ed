use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use pdp_core::database::DesignDatabase;
use pdp_core::search::{search_pdp, SearchConfig, SearchMode, SearchOutcome};
use pdp_core::{export, generate, plan, verify, Format, GenerateOptions, PlanError, PlanOptions, Schedule};

const OK: u8 = 0;
const VIOLATION: u8 = 1;
const INFEASIBLE: u8 = 2;
const NO_ROUTE: u8 = 3;
const BUDGET: u8 = 4;

#[derive(Parser)]
#[command(name = "pdp", version, about = "Progressive dinner party schedules")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build, verify and print a schedule
    Generate {
        #[arg(short)]
        k: usize,
        #[arg(short)]
        v: usize,
        /// Replace the construction's hosts with a matching-based assignment
        #[arg(long)]
        rehost: bool,
        /// Seed for the search route
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "json")]
        format: Format,
        /// File with one couple name per line
        #[arg(long)]
        names: Option<PathBuf>,
        /// Design database JSON
        #[arg(long)]
        db: Option<PathBuf>,
        /// Node budget for the search route
        #[arg(long, default_value_t = 2_000_000)]
        budget: u64,
    },
    /// Check a schedule file against the three axioms
    Verify { file: PathBuf },
    /// Backtracking search; prints statistics as JSON
    Search {
        #[arg(short)]
        k: usize,
        #[arg(short)]
        v: usize,
        /// Enumerate the whole space instead of stopping at the first design
        #[arg(long)]
        exhaust: bool,
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write a found schedule here
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Show which construction would be used and why
    Plan {
        #[arg(short)]
        k: usize,
        #[arg(short)]
        v: usize,
        #[arg(long)]
        db: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
}

fn load_db(path: Option<&Path>) -> Result<Option<DesignDatabase>> {
    path.map(|p| DesignDatabase::load(p).with_context(|| format!("loading {}", p.display())))
        .transpose()
}

fn load_names(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(String::from)
        .collect())
}

fn plan_error_code(e: &PlanError) -> u8 {
    match e {
        PlanError::Infeasible { .. } => INFEASIBLE,
        PlanError::NoRoute { chain, .. } => {
            for a in chain {
                eprintln!("  - {}: {}", a.route, a.note);
            }
            NO_ROUTE
        }
        PlanError::BudgetExceeded { .. } => BUDGET,
        PlanError::Invalid { .. } => VIOLATION,
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Generate {
            k,
            v,
            rehost,
            seed,
            format,
            names,
            db,
            budget,
        } => {
            let names = names.as_deref().map(load_names).transpose()?;
            let options = GenerateOptions {
                plan: PlanOptions {
                    database: load_db(db.as_deref())?,
                    search_budget: budget,
                    seed,
                    ..PlanOptions::default()
                },
                rehost,
            };
            match generate(k, v, &options) {
                Ok((_, schedule)) => {
                    let doc = export(&schedule, format, names.as_deref())?;
                    print!("{doc}");
                    if !doc.ends_with('\n') {
                        println!();
                    }
                    Ok(OK)
                }
                Err(e) => {
                    eprintln!("pdp: {e}");
                    Ok(plan_error_code(&e))
                }
            }
        }
        Command::Verify { file } => {
            let text = fs::read_to_string(&file).with_context(|| format!("reading {}", file.display()))?;
            let schedule =
                Schedule::from_json(&text).with_context(|| format!("parsing {}", file.display()))?;
            let report = match verify(&schedule) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("pdp: malformed schedule: {e}");
                    return Ok(VIOLATION);
                }
            };
            let mark = |ok: bool| if ok { "ok" } else { "FAILED" };
            println!("axiom 1 (parallel classes): {}", mark(report.axiom1_ok));
            println!("axiom 2 (no repeated pair): {}", mark(report.axiom2_ok));
            println!("axiom 3 (host bijection):   {}", mark(report.axiom3_ok));
            for violation in &report.violations {
                println!("  {violation}");
            }
            Ok(if report.is_valid() { OK } else { VIOLATION })
        }
        Command::Search {
            k,
            v,
            exhaust,
            budget,
            seed,
            out,
        } => {
            let config = SearchConfig {
                mode: if exhaust {
                    SearchMode::Exhaust
                } else {
                    SearchMode::Find
                },
                budget,
                seed,
                ..SearchConfig::default()
            };
            let result = search_pdp(k, v, &config)?;
            println!("{}", serde_json::to_string_pretty(&result.stats_json())?);
            Ok(match &result.outcome {
                SearchOutcome::Found(s) => {
                    if let Some(path) = out {
                        fs::write(&path, s.to_json_pretty())
                            .with_context(|| format!("writing {}", path.display()))?;
                    }
                    OK
                }
                SearchOutcome::Exhausted => INFEASIBLE,
                SearchOutcome::BudgetExceeded => BUDGET,
            })
        }
        Command::Plan { k, v, db, json } => {
            let options = PlanOptions {
                database: load_db(db.as_deref())?,
                ..PlanOptions::default()
            };
            match plan(k, v, &options) {
                Ok(decision) => {
                    if json {
                        println!("{}", serde_json::to_string_pretty(&decision)?);
                    } else {
                        print!("{decision}");
                    }
                    Ok(OK)
                }
                Err(e) => {
                    eprintln!("pdp: {e}");
                    Ok(plan_error_code(&e))
                }
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("pdp: {e:#}");
            ExitCode::from(VIOLATION)
        }
    }
}
