//! `nanopteron` command-line driver.
//!
//! Exit status: 0 on success, 1 when a solver fails to converge or a
//! validation gate fails, 2 for invalid configuration or usage.

mod commands;
mod settings;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "nanopteron", version, about = "Nanopteron traveling waves in spring-dimer FPUT lattices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand.
#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    /// TOML configuration file; flags override it.
    #[arg(long)]
    pub config: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    /// Directory for records and data files; stdout only when absent.
    #[arg(long)]
    pub out_dir: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample the dispersion symbols on [−π, π].
    Dispersion {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Solve for the periodic ripple at one amplitude.
    Periodic {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        a: Option<f64>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        max_iter: Option<usize>,
        #[arg(long)]
        modes: Option<usize>,
    },
    /// Solve for the nanopteron at one or several ε.
    Nanopteron(commands::NanopteronArgs),
    /// Integrate the lattice from a leading-order or saved profile.
    Simulate(commands::SimulateArgs),
    /// Run the identity and property checks and print a gate table.
    Validate {
        #[command(flatten)]
        common: Common,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let out = match cli.command {
        Command::Dispersion { common, eps, samples } => commands::dispersion(&common, eps, samples),
        Command::Periodic { common, eps, a, tol, max_iter, modes } => {
            commands::periodic(&common, eps, a, tol, max_iter, modes)
        }
        Command::Nanopteron(args) => commands::nanopteron(&args),
        Command::Simulate(args) => commands::simulate(&args),
        Command::Validate { common } => commands::validate(&common),
    };
    match out {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
