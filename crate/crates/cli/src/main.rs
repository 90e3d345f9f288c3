use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thermops_cli::commands;
use thermops_cli::{CliError, DeviceSpec, RunConfig};
use thermops_core::tomography::Label;
use thermops_core::type2::StepRule;

#[derive(Parser)]
#[command(name = "thermops", version, about = "Thermodynamic operators of finite-time quantum processes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (also where later commands look for earlier output).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// qubit_reset, doublewell, exact_overwrite or random_channel.
    #[arg(long, global = true)]
    device: Option<String>,
    /// Repeatable.
    #[arg(long, global = true)]
    label: Vec<String>,
    /// Holdout and band tolerance in k_BT.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    max_iter: Option<usize>,
    #[arg(long, global = true, value_enum)]
    step: Option<Step>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Reconstruct thermodynamic operators and validate them on held-out inputs.
    Tomography,
    /// Extremal inputs of every stored operator, plus the full ideal-input suite.
    Extremize,
    /// Frank–Wolfe minimization of a type-II quantity.
    Descend,
    /// Frank–Wolfe maximization of a type-II quantity (local).
    Ascend,
    /// Second-order model around the maximally mixed input and its minimizer.
    Perturb,
    /// Trajectories of random inputs.
    Simulate,
    /// Time-resolved work, heat and entropy-production bands.
    Sweep,
}

#[derive(ValueEnum, Clone, Copy)]
enum Step {
    Classic,
    GapScaled,
    LineSearch,
}

fn config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(name) = &cli.device {
        if name != cfg.device.name() {
            cfg.device = DeviceSpec::by_name(name)?;
        }
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.out = o.clone();
    }
    if !cli.label.is_empty() {
        cfg.labels = cli.label.iter().map(|l| l.parse::<Label>().expect("infallible")).collect();
    }
    if let Some(t) = cli.tol {
        cfg.tol = t;
    }
    if let Some(n) = cli.max_iter {
        cfg.max_iter = n;
    }
    if let Some(s) = cli.step {
        cfg.step_rule = match s {
            Step::Classic => StepRule::Classic,
            Step::GapScaled => StepRule::GapScaled,
            Step::LineSearch => StepRule::LineSearch,
        };
    }
    Ok(cfg)
}

fn print<T: Serialize>(report: T) -> Result<(), CliError> {
    println!("{}", serde_json::to_string_pretty(&report).expect("reports serialize"));
    Ok(())
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = config(cli)?;
    match cli.command {
        Command::Tomography => print(commands::tomography(&cfg)?),
        Command::Extremize => print(commands::extremize_cmd(&cfg)?),
        Command::Descend => print(commands::descend(&cfg)?),
        Command::Ascend => print(commands::ascend(&cfg)?),
        Command::Perturb => print(commands::perturb(&cfg)?),
        Command::Simulate => print(commands::simulate(&cfg)?),
        Command::Sweep => print(commands::sweep(&cfg)?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
