use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use loforge::concentration::parse_ratio;
use loforge::experiments::{claim_bound, count_vectors, mixing_experiment, MixingConfig, Schedule};
use loforge::instance::{rho_report, Instance};
use loforge::pipeline::{recover_structure, Mode, PipelineConfig};
use loforge::verify;

#[derive(Parser)]
#[command(name = "loforge", version, about = "Concentration of random walks on Abelian groups and inverse structure recovery")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Also write the JSON report to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Exact concentration functionals of an instance file.
    Rho { instance: PathBuf },
    /// Run the structure-recovery pipeline on an instance file.
    Invert {
        instance: PathBuf,
        #[arg(long)]
        n_prime: u64,
        #[arg(long, default_value_t = 2)]
        max_rank: usize,
        /// abelian, abelian-doubled, word or rho-star.
        #[arg(long)]
        mode: Mode,
        /// Laziness; defaults to the instance's lazy law.
        #[arg(long)]
        alpha: Option<String>,
        /// Word length or subset size; defaults to the instance's `m`.
        #[arg(long)]
        m: Option<u64>,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Mixing times of random symmetric walks on Z/q.
    Mix {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        /// `exact`, `exact:MAX` or a comma-separated list of step counts.
        #[arg(long, default_value = "exact")]
        schedule: String,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Copies of 0 among the steps.
        #[arg(long, default_value_t = 0)]
        laziness: u64,
    },
    /// Run acceptance criteria: `all`, a number 1-10, or a suite name.
    Verify { suite: String },
    /// Count integer vectors for the lattice claim.
    Count {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        r: u32,
        #[arg(long)]
        s: u64,
        /// Compare against the bound with this constant.
        #[arg(long)]
        c: Option<f64>,
    },
}

fn parse_schedule(s: &str) -> Result<Schedule, String> {
    if s == "exact" {
        return Ok(Schedule::Exact { max_m: 1 << 30 });
    }
    if let Some(max) = s.strip_prefix("exact:") {
        return max.parse().map(|max_m| Schedule::Exact { max_m }).map_err(|e| format!("bad schedule bound: {e}"));
    }
    s.split(',')
        .map(|t| t.trim().parse::<u64>().map_err(|e| format!("bad step count {t:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()
        .map(|steps| Schedule::Steps { steps })
}

fn emit<T: Serialize>(value: &T, out: &Option<PathBuf>) -> Result<(), String> {
    let text = serde_json::to_string_pretty(value).map_err(|e| e.to_string())?;
    println!("{text}");
    if let Some(path) = out {
        std::fs::write(path, text + "\n").map_err(|e| format!("{}: {e}", path.display()))?;
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<bool, String> {
    let err = |e: loforge::Error| e.to_string();
    match cli.command {
        Command::Rho { instance } => {
            let rep = rho_report(&Instance::load(instance).map_err(err)?).map_err(err)?;
            emit(&rep, &cli.out)?;
            Ok(true)
        }
        Command::Invert { instance, n_prime, max_rank, mode, alpha, m, budget } => {
            let inst = Instance::load(instance).map_err(err)?;
            let a = inst.multiset().map_err(err)?;
            let mut cfg = PipelineConfig::new(mode, n_prime, max_rank);
            cfg.alpha = match alpha {
                Some(s) => Some(parse_ratio(&s).map_err(err)?),
                None => inst.alpha(),
            };
            cfg.m = m.or(inst.m);
            if let Some(b) = budget {
                cfg.cover_budget = b;
            }
            let rep = recover_structure(&a, &cfg).map_err(err)?;
            for c in rep.failed_certificates() {
                eprintln!("{c}");
            }
            emit(&rep, &cli.out)?;
            Ok(rep.passed)
        }
        Command::Mix { q, k, delta, schedule, trials, seed, laziness } => {
            let cfg = MixingConfig {
                delta,
                schedule: parse_schedule(&schedule)?,
                trials,
                seed,
                laziness,
                ..MixingConfig::new(q, k)
            };
            let rep = mixing_experiment(&cfg).map_err(err)?;
            emit(&rep, &cli.out)?;
            Ok(rep.monotone)
        }
        Command::Verify { suite } => {
            let ids = verify::suite(&suite).ok_or_else(|| format!("unknown suite {suite:?}"))?;
            let mut outcomes = Vec::new();
            for id in ids {
                let o = verify::run(id).map_err(err)?;
                eprintln!("{}", o.line());
                outcomes.push(o);
            }
            let pass = outcomes.iter().all(|o| o.pass);
            emit(&json!({"pass": pass, "criteria": outcomes}), &cli.out)?;
            Ok(pass)
        }
        Command::Count { k, r, s, c } => {
            let count = count_vectors(k, r, s).map_err(err)?;
            let bound = c.map(|c| claim_bound(k, r, s, c));
            let holds = bound.map(|b| count as f64 <= b);
            emit(&json!({"k": k, "r": r, "s": s, "count": count, "c": c, "bound": bound, "holds": holds}), &cli.out)?;
            Ok(holds.unwrap_or(true))
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
