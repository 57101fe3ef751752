//! Thin command-line front end: resolves a config (preset or TOML file),
//! applies flag overrides, and hands off to the library runner.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use newton_flow::config::{self, ExperimentConfig};
use newton_flow::runner;

#[derive(Parser)]
#[command(
    name = "newton-flow",
    about = "Integrate the regularized continuous Newton flow and check its a-priori estimates",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonOpts {
    /// TOML experiment config
    #[arg(long, value_name = "FILE", conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Named built-in experiment (see `list-potentials` for the catalogs)
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,
    /// Output directory for CSV/JSON artifacts
    #[arg(long, value_name = "DIR", default_value = "out")]
    out: PathBuf,
    /// Override the integrator's relative tolerance
    #[arg(long, value_name = "TOL")]
    rtol: Option<f64>,
    /// Override the integrator's absolute tolerance
    #[arg(long, value_name = "TOL")]
    atol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the flow and write the trajectory CSV
    Solve(CommonOpts),
    /// Integrate and check every energy/Lipschitz estimate on the result
    Certify(CommonOpts),
    /// Compare two flows (schedules λ vs η) against the continuity bound
    Stability(CommonOpts),
    /// Solve with a discontinuous BV schedule via mollified approximations
    Bv(CommonOpts),
    /// Print the potential and schedule catalogs
    ListPotentials,
    /// Statically validate a config and print its diagnostics
    Validate {
        #[arg(long, value_name = "FILE", conflicts_with = "preset")]
        config: Option<PathBuf>,
        #[arg(long, value_name = "NAME")]
        preset: Option<String>,
    },
}

fn load(
    config: &Option<PathBuf>,
    preset: &Option<String>,
) -> Result<ExperimentConfig, String> {
    match (config, preset) {
        (Some(path), None) => {
            ExperimentConfig::from_file(path).map_err(|e| format!("{}: {e}", path.display()))
        }
        (None, Some(name)) => config::preset(name).ok_or_else(|| {
            format!("unknown preset '{name}'; available: {:?}", config::PRESET_NAMES)
        }),
        (None, None) => Err("pass --config <FILE> or --preset <NAME>".into()),
        (Some(_), Some(_)) => unreachable!("clap rejects this combination"),
    }
}

fn run_mode(mode: &str, opts: &CommonOpts) -> ExitCode {
    let mut cfg = match load(&opts.config, &opts.preset) {
        Ok(cfg) => cfg,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    cfg.mode = mode.to_string();
    if let Some(rtol) = opts.rtol {
        cfg.integrator.rtol = Some(rtol);
    }
    if let Some(atol) = opts.atol {
        cfg.integrator.atol = Some(atol);
    }
    let rep = runner::run(&cfg, &opts.out);
    for msg in &rep.messages {
        eprintln!("{msg}");
    }
    if rep.exit == runner::ExitCategory::Ok {
        println!(
            "{mode}: ok ({}; artifacts in {})",
            rep.integrator_stats
                .map(|s| format!("{} steps, {} rejected", s.steps, s.rejected))
                .unwrap_or_else(|| "no integration".into()),
            opts.out.display()
        );
    }
    ExitCode::from(rep.exit.code() as u8)
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Solve(opts) => run_mode("solve", &opts),
        Command::Certify(opts) => run_mode("certify", &opts),
        Command::Stability(opts) => run_mode("stability", &opts),
        Command::Bv(opts) => run_mode("bv", &opts),
        Command::ListPotentials => {
            print!("{}", config::list_potentials_text());
            println!("presets: {}", config::PRESET_NAMES.join(", "));
            ExitCode::SUCCESS
        }
        Command::Validate { config, preset } => {
            let cfg = match load(&config, &preset) {
                Ok(cfg) => cfg,
                Err(msg) => {
                    eprintln!("error: {msg}");
                    return ExitCode::from(2);
                }
            };
            let diags = cfg.validate();
            if diags.is_empty() {
                println!("config ok");
                ExitCode::SUCCESS
            } else {
                for d in &diags {
                    eprintln!("{}: {}", d.field, d.message);
                }
                ExitCode::from(2)
            }
        }
    }
}
