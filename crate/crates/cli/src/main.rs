//! `freeineq`: free-probability functionals and inequality sweeps.
//!
//! Exit codes: 0 on success, 1 on input or numerical errors, 2 when
//! `--diagnostic` is set and an inequality is violated beyond `--tolerance`.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{LpSweep, Outcome};
use config::{FileConfig, Settings};

#[derive(Debug, Parser)]
#[command(name = "freeineq", version, about = "Free-probability functionals and functional-inequality checks")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

/// Options shared by all subcommands. Unset options fall back to the TOML
/// file named by `FREEINEQ_CONFIG`, then to built-in defaults.
#[derive(Debug, Args)]
struct Common {
    /// Seed for random sweeps and test measures [default: 1]
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Number of random pairs [default: 1000]
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Largest degree of random densities [default: 32]
    #[arg(long, global = true)]
    degree: Option<usize>,
    /// Grid cells for the equilibrium solver and grid functionals [default: 2000]
    #[arg(long, global = true)]
    cells: Option<usize>,
    /// Worker threads for sweeps [default: all cores]
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output file for CSV (stdout when omitted)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Slack below `-tolerance` counts as a violation [default: 1e-9]
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Exit with status 2 when an inequality is violated
    #[arg(long, global = true)]
    diagnostic: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Functionals of two measure specs and the inequality slacks, as JSON
    Functionals { measure_a: PathBuf, measure_b: PathBuf },
    /// Seeded sweep of the inequalities over random density pairs, as CSV
    Verify,
    /// Geometric-family L^p sweep as CSV with the fitted slope in a footer
    LpSweep {
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0.9)]
        r_min: f64,
        #[arg(long, default_value_t = 0.9999)]
        r_max: f64,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        #[arg(long, default_value_t = 1.0)]
        eta: f64,
    },
    /// Equilibrium measure of a potential spec: JSON report, density CSV to --out
    Equilibrium { potential: PathBuf },
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    let c = &cli.common;
    let flags = FileConfig {
        seed: c.seed,
        samples: c.samples,
        degree: c.degree,
        cells: c.cells,
        jobs: c.jobs,
        tolerance: c.tolerance,
        diagnostic: c.diagnostic.then_some(true),
    };
    let settings = Settings::resolve(&flags, &FileConfig::from_env()?)?;
    if let Some(k) = settings.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(k).build_global()?;
    }
    let out = c.out.as_deref();
    match &cli.command {
        Command::Functionals { measure_a, measure_b } => {
            let (obj, outcome) = commands::functionals(measure_a, measure_b, &settings)?;
            println!("{}", obj.to_pretty());
            Ok(outcome)
        }
        Command::Verify => commands::verify(&settings, out),
        Command::LpSweep { p, r_min, r_max, steps, eta } => {
            commands::lp_sweep(LpSweep { p: *p, r_min: *r_min, r_max: *r_max, steps: *steps, eta: *eta }, out)
        }
        Command::Equilibrium { potential } => {
            let (obj, outcome) = commands::equilibrium(potential, &settings, out)?;
            println!("{}", obj.to_pretty());
            Ok(outcome)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Violation) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
