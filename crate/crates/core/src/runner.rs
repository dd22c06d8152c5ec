//! Scenario dispatch and artifact writing.
//!
//! Every scenario writes into one output directory:
//!
//! | kind | artifacts |
//! |------|-----------|
//! | `evolve-sphere`, `evolve-hyperbolic` | `diagnostics.csv`, `final_field.json` |
//! | `lax-spectrum` | `spectrum.json` |
//! | `chain` | `chain_diagnostics.csv`, `final_chain.json` |
//! | `hs-compare` | `compare.csv`, `rescaling.csv` |
//! | `soliton-check` | `soliton.json` |
//! | `bench` | `benchmark.csv` |
//!
//! CSV floats are written with 17 significant digits.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chain::{self, ChainError, ChainRunSettings, SpinChain};
use crate::config::{parse_config, ConfigError, FieldIssue, ScenarioConfig, ScenarioKind};
use crate::evolution::{self, DiagnosticsRecord, EvolutionError, LaxSettings, RunSettings};
use crate::field::ConstrainedField;
use crate::geometry::{Target, Vec3};
use crate::initial::InitialError;
use crate::lax::{self, LaxError, SpectrumReport};
use crate::soliton::{self, BlaschkeProfile, SolitonError};

/// Environment variable capping the worker threads.
pub const THREADS_ENV: &str = "HWL_THREADS";

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cannot {action} {path}: {message}")]
    Io { action: &'static str, path: PathBuf, message: String },
    #[error("command '{command}' cannot run a '{kind}' scenario")]
    KindMismatch { command: String, kind: ScenarioKind },
    #[error("scenario is missing {0}")]
    Missing(&'static str),
    #[error(transparent)]
    Initial(#[from] InitialError),
    #[error(transparent)]
    Evolution(#[from] EvolutionError),
    #[error(transparent)]
    Lax(#[from] LaxError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Soliton(#[from] SolitonError),
    #[error("serialization failed: {0}")]
    Json(String),
}

impl RunError {
    pub fn category(&self) -> &'static str {
        match self {
            RunError::Config(_) => "config",
            RunError::Io { .. } => "io",
            RunError::KindMismatch { .. } => "usage",
            RunError::Missing(_) => "config",
            RunError::Initial(_) => "initial-condition",
            RunError::Evolution(_) => "evolution",
            RunError::Lax(_) => "lax",
            RunError::Chain(_) => "chain",
            RunError::Soliton(_) => "soliton",
            RunError::Json(_) => "serialization",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::KindMismatch { .. } | RunError::Missing(_) => 2,
            _ => 1,
        }
    }

    pub fn record(&self) -> ErrorRecord {
        ErrorRecord {
            error: self.category().to_string(),
            message: self.to_string(),
            issues: match self {
                RunError::Config(c) => c.issues.clone(),
                _ => Vec::new(),
            },
        }
    }
}

/// Machine-readable failure report written to stderr.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub error: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub issues: Vec<FieldIssue>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutcome {
    pub kind: ScenarioKind,
    pub out_dir: PathBuf,
    pub artifacts: Vec<PathBuf>,
}

/// Final state of a field run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSnapshot {
    pub target: Target,
    pub time: f64,
    pub values: Vec<Vec3>,
}

impl FieldSnapshot {
    fn of<F: ConstrainedField>(field: &F) -> Self {
        FieldSnapshot { target: F::TARGET, time: field.time(), values: field.values().to_vec() }
    }
}

fn io_error(action: &'static str, path: &Path, e: std::io::Error) -> RunError {
    RunError::Io { action, path: path.to_owned(), message: e.to_string() }
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig, RunError> {
    let text = fs::read_to_string(path).map_err(|e| io_error("read", path, e))?;
    Ok(parse_config(&text)?)
}

/// `{:.16e}`: 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_file(path: &Path, contents: &str) -> Result<PathBuf, RunError> {
    fs::write(path, contents).map_err(|e| io_error("write", path, e))?;
    Ok(path.to_owned())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<PathBuf, RunError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| RunError::Json(e.to_string()))?;
    text.push('\n');
    write_file(path, &text)
}

/// `diagnostics.csv` contents.
pub fn diagnostics_csv(records: &[DiagnosticsRecord], eigen_columns: usize) -> String {
    let with_lax = records.first().is_some_and(|r| r.lax.is_some());
    let mut out = String::from("t,energy,sx,sy,sz");
    if with_lax {
        out.push_str(",trL1,trL2,trL3,trL4,rank");
        for k in 1..=eigen_columns {
            let _ = write!(out, ",lam{k}");
        }
    }
    out.push_str(",defect\n");
    for r in records {
        let s = r.total_spin;
        let mut cells = vec![fmt_float(r.time), fmt_float(r.energy), fmt_float(s[0]), fmt_float(s[1]), fmt_float(s[2])];
        if let Some(l) = &r.lax {
            cells.extend(l.trace_powers.iter().map(|&x| fmt_float(x)));
            cells.push(l.rank.to_string());
            cells.extend((0..eigen_columns).map(|k| l.top_eigenvalues.get(k).map_or(String::new(), |&x| fmt_float(x))));
        }
        cells.push(fmt_float(r.constraint_defect));
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn require<T>(value: Option<T>, what: &'static str) -> Result<T, RunError> {
    value.ok_or(RunError::Missing(what))
}

fn run_settings(config: &ScenarioConfig) -> Result<RunSettings, RunError> {
    let time = require(config.time.as_ref(), "a [time] section")?;
    let lax = match (config.lax.enabled, config.grid.as_ref().and_then(|g| g.m)) {
        (true, Some(m)) => Some(LaxSettings {
            truncation: m,
            rank_tolerance: config.lax.rank_tolerance,
            top_eigenvalues: config.lax.top_eigenvalues,
        }),
        (true, None) => return Err(RunError::Missing("grid.m for Lax diagnostics")),
        (false, _) => None,
    };
    Ok(RunSettings { dt: time.dt, t_final: time.t_final, record_interval: time.record_interval, scheme: time.scheme, lax })
}

fn evolve<F: ConstrainedField>(initial: F, config: &ScenarioConfig, out: &Path) -> Result<Vec<PathBuf>, RunError> {
    let settings = run_settings(config)?;
    let (records, last) = evolution::run(initial, &settings)?;
    let columns = match (F::TARGET, &settings.lax) {
        (Target::Sphere, Some(l)) => l.top_eigenvalues,
        _ => 0,
    };
    Ok(vec![
        write_file(&out.join("diagnostics.csv"), &diagnostics_csv(&records, columns))?,
        write_json(&out.join("final_field.json"), &FieldSnapshot::of(&last))?,
    ])
}

/// Lax spectrum of the initial field.
pub fn lax_spectrum(config: &ScenarioConfig) -> Result<SpectrumReport, RunError> {
    let grid = require(config.grid.as_ref(), "a [grid] section")?;
    let m = require(grid.m, "grid.m")?;
    let initial = require(config.initial.as_ref(), "an [initial] section")?;
    let l = match config.target {
        Target::Sphere => lax::build_l(&initial.sphere_field(grid.n, config.seed)?, m)?,
        Target::Hyperbolic => lax::build_l(&initial.hyperbolic_field(grid.n, config.seed)?, m)?,
    };
    Ok(lax::spectrum(&l, config.lax.rank_tolerance, 4, 4)?)
}

fn chain_csv(records: &[chain::ChainDiagnostics]) -> String {
    let mut out = String::from("t,energy,sx,sy,sz,defect\n");
    for r in records {
        let s = r.total_spin;
        let cells = [r.time, r.energy, s[0], s[1], s[2], r.constraint_defect].map(fmt_float);
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn compare_csv(rows: &[chain::CompareRow]) -> String {
    let mut out = String::from("N,error\n");
    for r in rows {
        let _ = writeln!(out, "{},{}", r.n, fmt_float(r.error));
    }
    out
}

pub fn benchmark_csv(rows: &[chain::BenchRow]) -> String {
    let mut out = String::from("N,direct_seconds,fft_seconds,speedup,max_difference\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.n,
            fmt_float(r.direct_seconds),
            fmt_float(r.fft_seconds),
            fmt_float(r.speedup),
            fmt_float(r.max_difference)
        );
    }
    out
}

/// Run a validated scenario, writing its artifacts into `out` (created if needed).
pub fn dispatch(config: &ScenarioConfig, out: &Path) -> Result<RunOutcome, RunError> {
    fs::create_dir_all(out).map_err(|e| io_error("create", out, e))?;
    let initial = || require(config.initial.as_ref(), "an [initial] section");
    let n = || require(config.grid.as_ref().map(|g| g.n), "a [grid] section");
    let artifacts = match config.kind {
        ScenarioKind::EvolveSphere => evolve(initial()?.sphere_field(n()?, config.seed)?, config, out)?,
        ScenarioKind::EvolveHyperbolic => evolve(initial()?.hyperbolic_field(n()?, config.seed)?, config, out)?,
        ScenarioKind::LaxSpectrum => vec![write_json(&out.join("spectrum.json"), &lax_spectrum(config)?)?],
        ScenarioKind::Chain => {
            let time = require(config.time.as_ref(), "a [time] section")?;
            let start = SpinChain::from_field(&initial()?.sphere_field(n()?, config.seed)?);
            let settings = ChainRunSettings {
                dt: time.dt,
                t_final: time.t_final,
                record_interval: time.record_interval,
                scheme: time.scheme,
            };
            let (records, last) = chain::chain_run(start, &settings)?;
            vec![
                write_file(&out.join("chain_diagnostics.csv"), &chain_csv(&records))?,
                write_json(&out.join("final_chain.json"), &last)?,
            ]
        }
        ScenarioKind::HsCompare => {
            let time = require(config.time.as_ref(), "a [time] section")?;
            let ic = initial()?;
            let rows = chain::continuum_compare(ic, &config.compare_sizes, time.t_final, time.dt, config.seed)?;
            let mut rescaling = String::from("N,ratio\n");
            for &size in &config.compare_sizes {
                let ratio = chain::fitted_rescaling(&ic.sphere_field(size, config.seed)?)?;
                let _ = writeln!(rescaling, "{size},{}", fmt_float(ratio));
            }
            vec![
                write_file(&out.join("compare.csv"), &compare_csv(&rows))?,
                write_file(&out.join("rescaling.csv"), &rescaling)?,
            ]
        }
        ScenarioKind::SolitonCheck => {
            let s = require(config.soliton.as_ref(), "a [soliton] section")?;
            let report = soliton::soliton_report(&BlaschkeProfile::new(s.velocity, s.zeros.clone())?)?;
            vec![write_json(&out.join("soliton.json"), &report)?]
        }
        ScenarioKind::Bench => {
            let b = require(config.bench.as_ref(), "a [bench] section")?;
            let rows = chain::benchmark_forces(&b.n_list, b.repeats, config.seed)?;
            vec![write_file(&out.join("benchmark.csv"), &benchmark_csv(&rows))?]
        }
    };
    Ok(RunOutcome { kind: config.kind, out_dir: out.to_owned(), artifacts })
}

/// Output directory: explicit override, then the config's `[output] dir`, then `out`.
pub fn resolve_out_dir(config: &ScenarioConfig, override_dir: Option<&Path>) -> PathBuf {
    override_dir
        .map(Path::to_path_buf)
        .or_else(|| config.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"))
}

/// Run independent scenarios concurrently. Each writes into
/// `out_root/<config file stem>`, so names must be distinct.
pub fn run_batch(paths: &[PathBuf], out_root: &Path) -> Vec<(PathBuf, Result<RunOutcome, RunError>)> {
    paths
        .par_iter()
        .map(|path| {
            let result = load_config(path).and_then(|config| {
                let stem = path.file_stem().map_or_else(|| PathBuf::from("scenario"), PathBuf::from);
                dispatch(&config, &out_root.join(stem))
            });
            (path.clone(), result)
        })
        .collect()
}

/// Size the global worker pool from `HWL_THREADS` when it holds a positive integer.
pub fn configure_threads() -> Option<usize> {
    let threads = std::env::var(THREADS_ENV).ok()?.trim().parse::<usize>().ok().filter(|&t| t > 0)?;
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().ok()?;
    Some(threads)
}

/// Default soliton scenario for command-line use without a config file.
pub fn soliton_config(velocity: f64, zeros: &str) -> Result<ScenarioConfig, RunError> {
    let zeros = soliton::parse_zeros(zeros)?;
    let zero_list: Vec<String> = zeros.iter().map(|z| format!("\"{}{:+}i\"", z.re, z.im)).collect();
    let text = format!("kind = \"soliton-check\"\n[soliton]\nvelocity = {velocity:?}\nzeros = [{}]\n", zero_list.join(", "));
    Ok(parse_config(&text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_round_trips() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            assert_eq!(fmt_float(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn error_record_carries_issues() {
        let err: RunError = parse_config("kind = \"chain\"\n[grid]\nn = 3\n").unwrap_err().into();
        let rec = err.record();
        assert_eq!(rec.error, "config");
        assert!(rec.issues.iter().any(|i| i.field == "grid.n"));
        assert_eq!(err.exit_code(), 2);
        let json = serde_json::to_string(&rec).unwrap();
        assert_eq!(serde_json::from_str::<ErrorRecord>(&json).unwrap(), rec);
    }

    #[test]
    fn soliton_config_from_cli_values() {
        let c = soliton_config(0.5, "i, 1+2i").unwrap();
        let s = c.soliton.unwrap();
        assert_eq!(s.velocity, 0.5);
        assert_eq!(s.zeros.len(), 2);
        assert!(soliton_config(0.5, "1-2i").is_err());
    }
}
