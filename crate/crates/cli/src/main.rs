use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use parbasis::experiment::{parse_ratio, run_experiment, to_csv, Algorithm, ExperimentSpec, SolverConfig};
use parbasis::format::{parse_basis, parse_instance, write_basis, write_instance};
use parbasis::general::general_find_basis_with_log;
use parbasis::{kuw_find_basis, partition_find_basis, FamilySpec, MatroidInstance, MatroidView, QuerySession};

/// Instance generation, solving and seeded sweeps for the basis solvers.
#[derive(Parser)]
#[command(name = "parbasis", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated instance file.
    Gen {
        /// kuw-hard, uniform, random-partition, random-graph, random-linear or mixed.
        family: String,
        /// Ground-set size (a cube m^3 for kuw-hard).
        #[arg(short)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Family parameter override such as `rank=3` or `prime=11`; repeatable.
        #[arg(long = "param", value_name = "KEY=VALUE")]
        params: Vec<String>,
        /// Destination file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one algorithm on one instance file.
    Solve {
        instance: PathBuf,
        #[arg(long, short, default_value = "general")]
        algorithm: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        tuning: Tuning,
        /// Write the basis here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the per-round ledger CSV here.
        #[arg(long)]
        ledger: Option<PathBuf>,
        /// Print the general solver's per-iteration log.
        #[arg(long)]
        log: bool,
    },
    /// Run an experiment described by a key=value config file.
    Sweep {
        config: PathBuf,
        /// Replace the configured seed list with this single seed.
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        tuning: Tuning,
        /// Leave wall_ms empty so the CSV is reproducible byte for byte.
        #[arg(long)]
        no_timing: bool,
        /// CSV destination; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check that a basis file is a basis of an instance.
    Verify { instance: PathBuf, basis: PathBuf },
}

#[derive(Args)]
struct Tuning {
    /// Random orders per sampling step.
    #[arg(long)]
    samples: Option<usize>,
    /// Mass slack of greedily-optimal sets, as `p/q` or a decimal.
    #[arg(long)]
    epsilon: Option<String>,
    /// Largest budget (or circuit size) cleared by exhaustive small queries.
    #[arg(long)]
    budget_threshold: Option<usize>,
}

impl Tuning {
    fn apply(&self, config: &mut SolverConfig) -> Result<()> {
        if let Some(s) = self.samples {
            config.set_samples(s);
        }
        if let Some(e) = &self.epsilon {
            config.set_epsilon(parse_ratio(e)?);
        }
        if let Some(t) = self.budget_threshold {
            config.set_budget_threshold(t);
        }
        Ok(())
    }
}

fn read_instance(path: &Path) -> Result<MatroidInstance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_instance(&text).with_context(|| format!("parsing {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => io::stdout().write_all(text.as_bytes()).context("writing to stdout"),
    }
}

fn gen(family: &str, n: usize, seed: u64, params: &[String], out: Option<&Path>) -> Result<ExitCode> {
    let mut spec = ExperimentSpec::new(FamilySpec::new(family.parse()?), vec![n], vec![seed], Algorithm::Kuw)?;
    for p in params {
        let Some((k, v)) = p.split_once('=') else {
            bail!("expected KEY=VALUE, found `{p}`");
        };
        if !["rank", "parts", "budget", "vertices", "rows", "prime"].contains(&k) {
            bail!("`{k}` is not a family parameter");
        }
        spec.set(k, v)?;
    }
    let instance = spec.family.generate(n, seed)?;
    emit(out, &write_instance(&instance))?;
    Ok(ExitCode::SUCCESS)
}

struct SolveArgs<'a> {
    instance: &'a Path,
    algorithm: &'a str,
    seed: u64,
    tuning: &'a Tuning,
    out: Option<&'a Path>,
    ledger: Option<&'a Path>,
    log: bool,
}

fn solve(a: SolveArgs<'_>) -> Result<ExitCode> {
    let algorithm: Algorithm = a.algorithm.parse()?;
    let mut config = SolverConfig::default();
    a.tuning.apply(&mut config)?;
    let view = MatroidView::new(Arc::new(read_instance(a.instance)?));
    let mut session = QuerySession::new(view.universe(), a.seed);
    let basis = match algorithm {
        Algorithm::Kuw => kuw_find_basis(&view, &mut session)?,
        Algorithm::Partition => partition_find_basis(&view, &mut session, &config.partition)?,
        Algorithm::General => {
            let outcome = general_find_basis_with_log(&view, &mut session, &config.general)?;
            if a.log {
                eprint!("{}", outcome.run_log());
            }
            outcome.basis
        }
    };
    let rank = view.rank_greedy();
    let valid = view.is_basis(&basis)? && basis.len() == rank;
    eprintln!(
        "algorithm={algorithm} n={} rounds={} queries={} basis_size={} rank={rank} valid={valid}",
        view.universe(),
        session.rounds(),
        session.total_queries(),
        basis.len()
    );
    if let Some(path) = a.ledger {
        fs::write(path, session.ledger().to_csv()).with_context(|| format!("writing {}", path.display()))?;
    }
    emit(a.out, &write_basis(&basis))?;
    Ok(if valid { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn sweep(config: &Path, seed: Option<u64>, tuning: &Tuning, no_timing: bool, out: Option<&Path>) -> Result<ExitCode> {
    let text = fs::read_to_string(config).with_context(|| format!("reading {}", config.display()))?;
    let mut spec = ExperimentSpec::parse(&text).with_context(|| format!("parsing {}", config.display()))?;
    if let Some(s) = seed {
        spec.seeds = vec![s];
    }
    tuning.apply(&mut spec.config)?;
    if no_timing {
        spec.timing = false;
    }
    let records = run_experiment(&spec)?;
    for r in records.iter().filter(|r| !r.valid) {
        match &r.error {
            Some(e) => eprintln!("n={} seed={}: {e}", r.n, r.seed),
            None => eprintln!("n={} seed={}: output is not a basis", r.n, r.seed),
        }
    }
    emit(out, &to_csv(&records))?;
    Ok(if records.iter().all(|r| r.valid) {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn verify(instance: &Path, basis: &Path) -> Result<ExitCode> {
    let view = MatroidView::new(Arc::new(read_instance(instance)?));
    let text = fs::read_to_string(basis).with_context(|| format!("reading {}", basis.display()))?;
    let b = parse_basis(&text, view.universe())?;
    let rank = view.rank_greedy();
    let valid = view.is_basis(&b)?;
    println!("basis_size={} rank={rank} valid={valid}", b.len());
    Ok(if valid { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn run(cli: Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Gen {
            family,
            n,
            seed,
            params,
            out,
        } => gen(family, *n, *seed, params, out.as_deref()),
        Command::Solve {
            instance,
            algorithm,
            seed,
            tuning,
            out,
            ledger,
            log,
        } => solve(SolveArgs {
            instance,
            algorithm,
            seed: *seed,
            tuning,
            out: out.as_deref(),
            ledger: ledger.as_deref(),
            log: *log,
        }),
        Command::Sweep {
            config,
            seed,
            tuning,
            no_timing,
            out,
        } => sweep(config, *seed, tuning, *no_timing, out.as_deref()),
        Command::Verify { instance, basis } => verify(instance, basis),
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
