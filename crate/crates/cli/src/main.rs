//! `depth`: command-line driver for the depthlab computations and
//! experiments.
//!
//! Exit status is 0 on success, 2 on a configuration error and 3 when a
//! computation fails.

mod commands;
mod config;
mod error;
mod names;
mod plotdata;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{
    AdmissibleSection, BoundsSection, CommandName, EmpiricalSection, ExperimentConfig, PlotdataSection,
    ProblemSection, SimplicialSection,
};
use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "depth", version, about = "Half-space and simplicial depth experiments on sequence spaces")]
struct Cli {
    /// TOML experiment config; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for CSV, JSON and the resolved config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Master seed; required for stochastic runs.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Args, Default)]
struct ProblemArgs {
    /// Model name, e.g. gaussian_unit, rademacher, uniform, cauchy, stable:1.5.
    #[arg(long)]
    model: Option<String>,
    /// Point name, e.g. inverse-k, zero, median, power:1:-1, coords:0.5,1.
    #[arg(long)]
    point: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Closed-form depth or zero certificate.
    Analytic(ProblemArgs),
    /// Markov zero certificate and lower bounds.
    Bounds {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Witness depths m.
        #[arg(long, value_delimiter = ',')]
        depths: Option<Vec<usize>>,
        /// Dimension for the coordinate-projection bound.
        #[arg(long)]
        proj_d: Option<usize>,
    },
    /// Positivity decision via admissible translates.
    Admissible {
        #[command(flatten)]
        problem: ProblemArgs,
        /// AI_AII or AIII.
        #[arg(long)]
        assumptions: Option<String>,
    },
    /// Empirical half-space depth experiment.
    Empirical {
        #[command(flatten)]
        problem: ProblemArgs,
        /// coordinates, random-sparse or markov.
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        n: Option<usize>,
        /// Number of coordinates (sample width).
        #[arg(long = "K")]
        k: Option<usize>,
        #[arg(long)]
        seeds: Option<usize>,
        /// Sample sizes for the consistency-gap table.
        #[arg(long, value_delimiter = ',')]
        n_grid: Option<Vec<usize>>,
        /// Random-sparse family size.
        #[arg(long)]
        count: Option<usize>,
        /// Random-sparse support size.
        #[arg(long)]
        support_size: Option<usize>,
        /// Markov witness depths.
        #[arg(long, value_delimiter = ',')]
        depths: Option<Vec<usize>>,
    },
    /// Block-projection simplicial depth experiment.
    Simplicial {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        kmax: Option<usize>,
        #[arg(long)]
        seeds: Option<usize>,
        /// Maximum number of enumerated subsets.
        #[arg(long)]
        budget: Option<u64>,
        /// Monte Carlo draws for the true block depth.
        #[arg(long)]
        mc_draws: Option<usize>,
    },
    /// Long-format plot series from JSON summaries.
    Plotdata {
        inputs: Vec<PathBuf>,
    },
}

fn merge_problem(cfg: &mut ExperimentConfig, p: ProblemArgs) {
    let s = cfg.problem.get_or_insert_with(ProblemSection::default);
    s.model = p.model.or(s.model.take());
    s.point = p.point.or(s.point.take());
}

/// Applies flags over the file config.
fn merge(mut cfg: ExperimentConfig, cli: Cli) -> ExperimentConfig {
    cfg.out = cli.out.or(cfg.out);
    cfg.seed = cli.seed.or(cfg.seed);
    let Some(command) = cli.command else {
        return cfg;
    };
    match command {
        Command::Analytic(p) => {
            cfg.command = Some(CommandName::Analytic);
            merge_problem(&mut cfg, p);
        }
        Command::Bounds { problem, depths, proj_d } => {
            cfg.command = Some(CommandName::Bounds);
            merge_problem(&mut cfg, problem);
            let s = cfg.bounds.get_or_insert_with(BoundsSection::default);
            s.depths = depths.or(s.depths.take());
            s.proj_d = proj_d.or(s.proj_d);
        }
        Command::Admissible { problem, assumptions } => {
            cfg.command = Some(CommandName::Admissible);
            merge_problem(&mut cfg, problem);
            let s = cfg.admissible.get_or_insert_with(AdmissibleSection::default);
            s.assumptions = assumptions.or(s.assumptions.take());
        }
        Command::Empirical { problem, family, n, k, seeds, n_grid, count, support_size, depths } => {
            cfg.command = Some(CommandName::Empirical);
            merge_problem(&mut cfg, problem);
            let s = cfg.empirical.get_or_insert_with(EmpiricalSection::default);
            s.family = family.or(s.family.take());
            s.n = n.or(s.n);
            s.k = k.or(s.k);
            s.seeds = seeds.or(s.seeds);
            s.n_grid = n_grid.or(s.n_grid.take());
            s.count = count.or(s.count);
            s.support_size = support_size.or(s.support_size);
            s.depths = depths.or(s.depths.take());
        }
        Command::Simplicial { problem, n, d, kmax, seeds, budget, mc_draws } => {
            cfg.command = Some(CommandName::Simplicial);
            merge_problem(&mut cfg, problem);
            let s = cfg.simplicial.get_or_insert_with(SimplicialSection::default);
            s.n = n.or(s.n);
            s.d = d.or(s.d);
            s.kmax = kmax.or(s.kmax);
            s.seeds = seeds.or(s.seeds);
            s.budget = budget.or(s.budget);
            s.mc_draws = mc_draws.or(s.mc_draws);
        }
        Command::Plotdata { inputs } => {
            cfg.command = Some(CommandName::Plotdata);
            let s = cfg.plotdata.get_or_insert_with(PlotdataSection::default);
            if !inputs.is_empty() {
                s.inputs = Some(inputs);
            }
        }
    }
    cfg
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("DEPTHLAB_THREADS") else {
        return Ok(());
    };
    let threads: usize = v
        .parse()
        .ok()
        .filter(|t| *t > 0)
        .ok_or_else(|| CliError::Config(format!("DEPTHLAB_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let file = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    let cfg = merge(file, cli).resolve()?;
    commands::run(&cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, CliError::Config(_)) {
                eprintln!("run `depth --help` for usage");
            }
            e.exit_code()
        }
    }
}
