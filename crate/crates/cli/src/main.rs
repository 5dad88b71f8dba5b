mod commands;
mod config;
mod presets;
mod table;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use unidir_core::Execution;

use config::{Format, RunConfig};
use presets::FigurePreset;

#[derive(Debug)]
pub enum Failure {
    /// Bad config, override, parameter set or input file. Exit code 2.
    Config(String),
    /// Regime or physics error raised by the model. Exit code 3.
    Physics(String),
    /// Output could not be written. Exit code 1.
    Io(String),
}

impl Failure {
    pub fn physics(e: impl std::fmt::Display) -> Self {
        Failure::Physics(e.to_string())
    }

    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Physics(_) => 3,
            Failure::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "config error: {m}"),
            Failure::Physics(m) => write!(f, "regime error: {m}"),
            Failure::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "unidir", version, about = "Nonreciprocal optomechanical amplifier model")]
struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<String>,
    /// Base configuration when --config is absent.
    #[arg(long, global = true, value_enum)]
    preset: Option<FigurePreset>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<String>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// key=value; plain keys address params, dotted keys any section.
    #[arg(long = "override", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Evaluate on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Steady-state roots, stability and isolation over the power grid.
    Sweep,
    /// Inverse map s_in(T) on both branches.
    TraceBranches {
        #[arg(long, default_value_t = 400)]
        points: usize,
    },
    /// Drift-matrix spectrum of every root at one input power.
    Stability {
        /// Input power, W.
        #[arg(long)]
        power: f64,
    },
    /// Noise-to-signal ratios across the working region.
    Noise,
    /// Optimal coupling, analytic transmission bounds and isolation estimate.
    Optimize,
    /// Runs a baked parameter set.
    Reproduce {
        #[arg(value_enum)]
        preset: FigurePreset,
    },
    /// Re-checks a sweep table against the transmission cubic.
    Verify { table: String },
    /// Prints the effective configuration.
    Config,
}

fn effective_config(cli: &Cli, preset: Option<FigurePreset>) -> Result<RunConfig, Failure> {
    if preset.is_some() && cli.config.is_some() {
        return Err(Failure::Config("reproduce takes its parameters from the preset; drop --config".into()));
    }
    let base = match (&cli.config, preset.or(cli.preset)) {
        (Some(path), _) => RunConfig::load(path)?,
        (None, Some(p)) => p.config(),
        (None, None) => FigurePreset::Fig2b.config(),
    };
    let mut cfg = base.with_overrides(&cli.overrides)?;
    if let Some(f) = cli.format {
        cfg.output.format = f;
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let exec = if cli.sequential { Execution::Sequential } else { Execution::default() };
    let reproduce = match cli.command {
        Command::Reproduce { preset } => Some(preset),
        _ => None,
    };
    let cfg = effective_config(cli, reproduce)?;
    let fmt = cfg.output.format;
    let outcome = match &cli.command {
        Command::Sweep => commands::Outcome::table(commands::cmd_sweep(&cfg, exec)?, fmt),
        Command::TraceBranches { points } => {
            commands::Outcome::table(commands::cmd_trace_branches(&cfg, *points)?, fmt)
        }
        Command::Stability { power } => commands::Outcome::table(commands::cmd_stability(&cfg, *power)?, fmt),
        Command::Noise => commands::Outcome::table(commands::cmd_noise(&cfg, exec)?, fmt),
        Command::Optimize => commands::cmd_optimize(&cfg, fmt)?,
        Command::Reproduce { preset } => {
            commands::Outcome::table(commands::cmd_reproduce(*preset, &cfg, &cli.overrides, exec)?, fmt)
        }
        Command::Verify { table } => commands::cmd_verify(&cfg, table)?,
        Command::Config => commands::Outcome {
            text: cfg.to_json(),
            failure: None,
        },
    };
    // --out only picks the destination; it is never folded into the config.
    let dest = cli.out.as_deref().or(cfg.output.path.as_deref());
    write_output(dest, &outcome.text)?;
    match outcome.failure {
        Some(f) => Err(f),
        None => Ok(()),
    }
}

fn write_output(path: Option<&str>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Io(format!("{p}: {e}"))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Failure::Io(e.to_string()))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("unidir: {f}");
            ExitCode::from(f.code())
        }
    }
}
