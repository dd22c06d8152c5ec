use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use halfwave_lab::config::{ScenarioConfig, ScenarioKind};
use halfwave_lab::runner::{self, RunError, RunOutcome};

#[derive(Parser)]
#[command(name = "halfwave-lab", version, about = "Half-wave maps, Lax operators and the classical Haldane-Shastry chain")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `[output] dir`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve a field on the sphere or the hyperbolic plane.
    Evolve(Common),
    /// Integrate the classical spin chain.
    Chain(Common),
    /// Spectrum of the truncated Lax operator of the initial field.
    LaxSpectrum(Common),
    /// Compare the rescaled chain with the continuum equation.
    HsCompare(Common),
    /// Check a traveling-wave profile and print its report.
    SolitonCheck {
        #[arg(long, conflicts_with_all = ["v", "zeros"])]
        config: Option<PathBuf>,
        /// Velocity, |v| < 1.
        #[arg(long, allow_hyphen_values = true)]
        v: Option<f64>,
        /// Comma-separated zeros in the upper half-plane, e.g. "i,1+2i".
        #[arg(long, default_value = "i")]
        zeros: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time direct and FFT chain forces.
    Bench(Common),
    /// Run several scenario files concurrently, one subdirectory each.
    Batch {
        #[arg(long, num_args = 1.., required = true)]
        config: Vec<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run any scenario, dispatching on its `kind`.
    Run(Common),
}

fn accepts(command: &str, kind: ScenarioKind) -> bool {
    match command {
        "run" => true,
        "evolve" => matches!(kind, ScenarioKind::EvolveSphere | ScenarioKind::EvolveHyperbolic),
        other => other == kind.name(),
    }
}

fn run_config(command: &str, config: ScenarioConfig, out: Option<&Path>) -> Result<RunOutcome, RunError> {
    if !accepts(command, config.kind) {
        return Err(RunError::KindMismatch { command: command.to_string(), kind: config.kind });
    }
    let dir = runner::resolve_out_dir(&config, out);
    runner::dispatch(&config, &dir)
}

fn print_json<T: serde::Serialize>(value: &T) {
    match serde_json::to_string(value) {
        Ok(s) => println!("{s}"),
        Err(e) => eprintln!("{{\"error\":\"serialization\",\"message\":\"{e}\"}}"),
    }
}

fn fail(err: &RunError) -> ExitCode {
    eprintln!("{}", serde_json::to_string(&err.record()).unwrap_or_else(|_| err.to_string()));
    ExitCode::from(err.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    runner::configure_threads();
    let result = match cli.command {
        Command::Batch { config, out } => {
            let results = runner::run_batch(&config, &out);
            let mut code = ExitCode::SUCCESS;
            for (path, result) in results {
                match result {
                    Ok(outcome) => print_json(&outcome),
                    Err(e) => {
                        eprintln!("{}: ", path.display());
                        code = fail(&e);
                    }
                }
            }
            return code;
        }
        Command::SolitonCheck { config, v, zeros, out } => {
            let config = match config {
                Some(path) => runner::load_config(&path),
                None => runner::soliton_config(v.unwrap_or(0.0), &zeros),
            };
            config.and_then(|c| run_config("soliton-check", c, out.as_deref())).and_then(|outcome| {
                let path = &outcome.artifacts[0];
                let text = std::fs::read_to_string(path)
                    .map_err(|e| RunError::Io { action: "read", path: path.clone(), message: e.to_string() })?;
                let report: halfwave_lab::soliton::SolitonReport =
                    serde_json::from_str(&text).map_err(|e| RunError::Json(e.to_string()))?;
                print_json(&report);
                Ok(None)
            })
        }
        Command::Evolve(c) => runner::load_config(&c.config).and_then(|cfg| run_config("evolve", cfg, c.out.as_deref())).map(Some),
        Command::Chain(c) => runner::load_config(&c.config).and_then(|cfg| run_config("chain", cfg, c.out.as_deref())).map(Some),
        Command::LaxSpectrum(c) => {
            runner::load_config(&c.config).and_then(|cfg| run_config("lax-spectrum", cfg, c.out.as_deref())).map(Some)
        }
        Command::HsCompare(c) => {
            runner::load_config(&c.config).and_then(|cfg| run_config("hs-compare", cfg, c.out.as_deref())).map(Some)
        }
        Command::Bench(c) => runner::load_config(&c.config).and_then(|cfg| run_config("bench", cfg, c.out.as_deref())).map(Some),
        Command::Run(c) => runner::load_config(&c.config).and_then(|cfg| run_config("run", cfg, c.out.as_deref())).map(Some),
    };
    match result {
        Ok(Some(outcome)) => {
            print_json(&outcome);
            ExitCode::SUCCESS
        }
        Ok(None) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}
