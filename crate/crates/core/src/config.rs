//! Scenario configuration files (TOML).
//!
//! ```toml
//! kind = "evolve-sphere"
//! seed = 7
//!
//! [grid]
//! n = 64
//! m = 16
//!
//! [time]
//! dt = 1e-3
//! t_final = 1.0
//! record_interval = 10
//! scheme = "rk4"
//!
//! [initial]
//! family = "tilted-circle"
//! a = 0.6
//! c = 0.8
//!
//! [lax]
//! enabled = true
//! ```
//!
//! [`parse_config`] reports every problem it finds, not just the first.

use std::fmt;
use std::path::PathBuf;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::Target;
use crate::initial::InitialCondition;
use crate::integrate::Scheme;
use crate::lax::DEFAULT_RANK_TOLERANCE;
use crate::soliton;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    EvolveSphere,
    EvolveHyperbolic,
    Chain,
    LaxSpectrum,
    SolitonCheck,
    HsCompare,
    Bench,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 7] = [
        ScenarioKind::EvolveSphere,
        ScenarioKind::EvolveHyperbolic,
        ScenarioKind::Chain,
        ScenarioKind::LaxSpectrum,
        ScenarioKind::SolitonCheck,
        ScenarioKind::HsCompare,
        ScenarioKind::Bench,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::EvolveSphere => "evolve-sphere",
            ScenarioKind::EvolveHyperbolic => "evolve-hyperbolic",
            ScenarioKind::Chain => "chain",
            ScenarioKind::LaxSpectrum => "lax-spectrum",
            ScenarioKind::SolitonCheck => "soliton-check",
            ScenarioKind::HsCompare => "hs-compare",
            ScenarioKind::Bench => "bench",
        }
    }

    fn needs_initial(self) -> bool {
        !matches!(self, ScenarioKind::SolitonCheck | ScenarioKind::Bench)
    }

    fn needs_time(self) -> bool {
        matches!(
            self,
            ScenarioKind::EvolveSphere | ScenarioKind::EvolveHyperbolic | ScenarioKind::Chain | ScenarioKind::HsCompare
        )
    }

    fn needs_grid(self) -> bool {
        matches!(
            self,
            ScenarioKind::EvolveSphere | ScenarioKind::EvolveHyperbolic | ScenarioKind::Chain | ScenarioKind::LaxSpectrum
        )
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub n: usize,
    /// Lax truncation `M`.
    pub m: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeConfig {
    pub dt: f64,
    pub t_final: f64,
    pub record_interval: usize,
    pub scheme: Scheme,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaxConfig {
    pub enabled: bool,
    pub rank_tolerance: f64,
    pub top_eigenvalues: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolitonConfig {
    pub velocity: f64,
    pub zeros: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub n_list: Vec<usize>,
    pub repeats: usize,
}

/// A validated scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub kind: ScenarioKind,
    pub seed: u64,
    /// Target of the Lax operator in `lax-spectrum` runs.
    pub target: Target,
    pub grid: Option<GridConfig>,
    pub time: Option<TimeConfig>,
    pub initial: Option<InitialCondition>,
    pub lax: LaxConfig,
    pub output_dir: Option<PathBuf>,
    /// Chain sizes compared in `hs-compare`.
    pub compare_sizes: Vec<usize>,
    pub soliton: Option<SolitonConfig>,
    pub bench: Option<BenchConfig>,
}

impl ScenarioConfig {
    /// Target of the evolved or analysed field.
    pub fn field_target(&self) -> Target {
        match self.kind {
            ScenarioKind::EvolveHyperbolic => Target::Hyperbolic,
            ScenarioKind::LaxSpectrum => self.target,
            _ => Target::Sphere,
        }
    }
}

/// One problem in a configuration file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldIssue {
    /// Dotted key path, e.g. `grid.m`.
    pub field: String,
    pub message: String,
}

impl fmt::Display for FieldIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid configuration: {}", .issues.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("; "))]
pub struct ConfigError {
    pub issues: Vec<FieldIssue>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    kind: Option<ScenarioKind>,
    seed: Option<u64>,
    target: Option<Target>,
    grid: Option<RawGrid>,
    time: Option<RawTime>,
    initial: Option<toml::Value>,
    lax: Option<RawLax>,
    output: Option<RawOutput>,
    chain: Option<RawChain>,
    soliton: Option<RawSoliton>,
    bench: Option<RawBench>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    n: Option<i64>,
    m: Option<i64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTime {
    dt: Option<f64>,
    t_final: Option<f64>,
    record_interval: Option<i64>,
    scheme: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLax {
    enabled: Option<bool>,
    rank_tolerance: Option<f64>,
    top_eigenvalues: Option<i64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChain {
    n_list: Option<Vec<i64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSoliton {
    velocity: Option<f64>,
    zeros: Option<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBench {
    n_list: Option<Vec<i64>>,
    repeats: Option<i64>,
}

const SECTIONS: &[(&str, &[&str])] = &[
    ("", &["kind", "seed", "target", "grid", "time", "initial", "lax", "output", "chain", "soliton", "bench"]),
    ("grid", &["n", "m"]),
    ("time", &["dt", "t_final", "record_interval", "scheme"]),
    ("lax", &["enabled", "rank_tolerance", "top_eigenvalues"]),
    ("output", &["dir"]),
    ("chain", &["n_list"]),
    ("soliton", &["velocity", "zeros"]),
    ("bench", &["n_list", "repeats"]),
];

pub const DEFAULT_RECORD_INTERVAL: usize = 1;
pub const DEFAULT_TOP_EIGENVALUES: usize = 4;
pub const DEFAULT_BENCH_SIZES: [usize; 4] = [256, 1024, 2048, 4096];
pub const DEFAULT_BENCH_REPEATS: usize = 5;

struct Issues(Vec<FieldIssue>);

impl Issues {
    fn push(&mut self, field: &str, message: impl Into<String>) {
        self.0.push(FieldIssue { field: field.to_string(), message: message.into() });
    }
}

/// Every key not in the schema, reported with its full path.
fn unknown_keys(table: &toml::Table, issues: &mut Issues) {
    let allowed = |section: &str| SECTIONS.iter().find(|(s, _)| *s == section).map(|(_, k)| *k);
    for (key, value) in table {
        if !allowed("").unwrap().contains(&key.as_str()) {
            issues.push(key, "unknown key");
            continue;
        }
        if let (Some(keys), Some(inner)) = (allowed(key), value.as_table()) {
            for sub in inner.keys() {
                if !keys.contains(&sub.as_str()) {
                    issues.push(&format!("{key}.{sub}"), "unknown key");
                }
            }
        }
    }
}

fn positive_size(issues: &mut Issues, field: &str, value: i64) -> Option<usize> {
    if value < 1 {
        issues.push(field, format!("must be at least 1, got {value}"));
        return None;
    }
    Some(value as usize)
}

/// Parse and validate a scenario file.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let one = |field: &str, message: String| ConfigError { issues: vec![FieldIssue { field: field.into(), message }] };
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| one("<syntax>", e.message().to_string()))?;
    let mut issues = Issues(Vec::new());
    unknown_keys(&table, &mut issues);
    if !issues.0.is_empty() {
        return Err(ConfigError { issues: issues.0 });
    }
    let raw: RawConfig = toml::Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| one("<types>", e.message().to_string()))?;
    validate(raw, &mut issues).ok_or(ConfigError { issues: issues.0 })
}

fn validate(raw: RawConfig, issues: &mut Issues) -> Option<ScenarioConfig> {
    let kind = raw.kind;
    if kind.is_none() {
        let names: Vec<_> = ScenarioKind::ALL.iter().map(|k| k.name()).collect();
        issues.push("kind", format!("missing; expected one of {}", names.join(", ")));
    }
    let kind_or = kind.unwrap_or(ScenarioKind::EvolveSphere);
    let target = raw.target.unwrap_or(Target::Sphere);
    if raw.target.is_some() && kind_or != ScenarioKind::LaxSpectrum {
        issues.push("target", "only used by lax-spectrum scenarios");
    }

    let lax = match raw.lax {
        None => LaxConfig { enabled: false, rank_tolerance: DEFAULT_RANK_TOLERANCE, top_eigenvalues: DEFAULT_TOP_EIGENVALUES },
        Some(l) => {
            let rank_tolerance = l.rank_tolerance.unwrap_or(DEFAULT_RANK_TOLERANCE);
            if !(rank_tolerance > 0.0 && rank_tolerance < 1.0) {
                issues.push("lax.rank_tolerance", format!("must lie in (0, 1), got {rank_tolerance}"));
            }
            let top = match l.top_eigenvalues {
                Some(t) if t < 0 => {
                    issues.push("lax.top_eigenvalues", format!("must be non-negative, got {t}"));
                    0
                }
                Some(t) => t as usize,
                None => DEFAULT_TOP_EIGENVALUES,
            };
            LaxConfig { enabled: l.enabled.unwrap_or(true), rank_tolerance, top_eigenvalues: top }
        }
    };

    let grid = match raw.grid {
        None => {
            if kind_or.needs_grid() {
                issues.push("grid", "missing section");
            }
            None
        }
        Some(g) => {
            let n = match g.n {
                None => {
                    issues.push("grid.n", "missing");
                    None
                }
                Some(n) => {
                    let min = if kind_or == ScenarioKind::Chain { 2 } else { 4 };
                    if n < min || n % 2 != 0 {
                        issues.push("grid.n", format!("must be even and at least {min}, got {n}"));
                        None
                    } else {
                        Some(n as usize)
                    }
                }
            };
            let m = g.m.and_then(|m| positive_size(issues, "grid.m", m));
            if let (Some(n), Some(m)) = (n, m) {
                if m + 1 > n / 2 {
                    issues.push("grid.m", format!("truncation M = {m} must satisfy M ≤ N/2 − 1 = {}", n / 2 - 1));
                }
            }
            let lax_needed = kind_or == ScenarioKind::LaxSpectrum
                || (lax.enabled && matches!(kind_or, ScenarioKind::EvolveSphere | ScenarioKind::EvolveHyperbolic));
            if lax_needed && g.m.is_none() {
                issues.push("grid.m", "Lax truncation is required for this scenario");
            }
            n.map(|n| GridConfig { n, m })
        }
    };

    let time = match raw.time {
        None => {
            if kind_or.needs_time() {
                issues.push("time", "missing section");
            }
            None
        }
        Some(t) => {
            let mut ok = true;
            let dt = t.dt.unwrap_or(f64::NAN);
            if !(dt.is_finite() && dt > 0.0) {
                issues.push("time.dt", format!("must be positive and finite, got {}", t.dt.map_or("nothing".into(), |d| d.to_string())));
                ok = false;
            }
            let t_final = t.t_final.unwrap_or(f64::NAN);
            if !(t_final.is_finite() && t_final > 0.0) {
                issues.push(
                    "time.t_final",
                    format!("must be positive and finite, got {}", t.t_final.map_or("nothing".into(), |d| d.to_string())),
                );
                ok = false;
            }
            let record_interval = match t.record_interval {
                None => DEFAULT_RECORD_INTERVAL,
                Some(r) => positive_size(issues, "time.record_interval", r).unwrap_or_else(|| {
                    ok = false;
                    1
                }),
            };
            let scheme = match t.scheme.as_deref().map(str::parse::<Scheme>) {
                None => Scheme::default(),
                Some(Ok(s)) => s,
                Some(Err(e)) => {
                    issues.push("time.scheme", e);
                    ok = false;
                    Scheme::default()
                }
            };
            ok.then_some(TimeConfig { dt, t_final, record_interval, scheme })
        }
    };

    let field_target = match kind_or {
        ScenarioKind::EvolveHyperbolic => Target::Hyperbolic,
        ScenarioKind::LaxSpectrum => target,
        _ => Target::Sphere,
    };
    let initial = match raw.initial {
        None => {
            if kind_or.needs_initial() {
                issues.push("initial", "missing section");
            }
            None
        }
        Some(value) => match InitialCondition::deserialize(value) {
            Err(e) => {
                issues.push("initial", e.message().to_string());
                None
            }
            Ok(ic) => match ic.validate(field_target) {
                Err(e) => {
                    issues.push("initial", e.to_string());
                    None
                }
                Ok(()) => Some(ic),
            },
        },
    };
    if kind_or == ScenarioKind::HsCompare {
        if let Some(ic @ InitialCondition::File { .. }) = &initial {
            issues.push("initial", format!("family '{}' has no grid-independent definition for hs-compare", ic.name()));
        }
    }

    let compare_sizes = match raw.chain.and_then(|c| c.n_list) {
        None => {
            if kind_or == ScenarioKind::HsCompare {
                issues.push("chain.n_list", "missing");
            }
            Vec::new()
        }
        Some(list) => {
            if list.is_empty() {
                issues.push("chain.n_list", "must not be empty");
            }
            for &n in &list {
                if n < 4 || n % 2 != 0 {
                    issues.push("chain.n_list", format!("sizes must be even and at least 4, got {n}"));
                }
            }
            list.into_iter().map(|n| n.max(0) as usize).collect()
        }
    };

    let soliton = match raw.soliton {
        None => {
            if kind_or == ScenarioKind::SolitonCheck {
                issues.push("soliton", "missing section");
            }
            None
        }
        Some(s) => {
            let velocity = s.velocity.unwrap_or(0.0);
            if !(velocity.abs() < 1.0) {
                issues.push("soliton.velocity", format!("must satisfy |v| < 1, got {velocity}"));
            }
            let mut zeros = Vec::new();
            for (k, text) in s.zeros.unwrap_or_else(|| vec!["i".into()]).iter().enumerate() {
                match soliton::parse_complex(text) {
                    Ok(z) if z.im > 0.0 => zeros.push(z),
                    Ok(_) => issues.push(&format!("soliton.zeros[{k}]"), format!("'{text}' is not in the upper half-plane")),
                    Err(e) => issues.push(&format!("soliton.zeros[{k}]"), e.to_string()),
                }
            }
            Some(SolitonConfig { velocity, zeros })
        }
    };

    let bench = match raw.bench {
        None => (kind_or == ScenarioKind::Bench)
            .then(|| BenchConfig { n_list: DEFAULT_BENCH_SIZES.to_vec(), repeats: DEFAULT_BENCH_REPEATS }),
        Some(b) => {
            let n_list = b.n_list.unwrap_or_else(|| DEFAULT_BENCH_SIZES.iter().map(|&n| n as i64).collect());
            for &n in &n_list {
                if n < 2 {
                    issues.push("bench.n_list", format!("sizes must be at least 2, got {n}"));
                }
            }
            let repeats = positive_size(issues, "bench.repeats", b.repeats.unwrap_or(DEFAULT_BENCH_REPEATS as i64)).unwrap_or(1);
            Some(BenchConfig { n_list: n_list.into_iter().map(|n| n.max(0) as usize).collect(), repeats })
        }
    };

    if !issues.0.is_empty() {
        return None;
    }
    Some(ScenarioConfig {
        kind: kind?,
        seed: raw.seed.unwrap_or(0),
        target,
        grid,
        time,
        initial,
        lax,
        output_dir: raw.output.and_then(|o| o.dir),
        compare_sizes,
        soliton,
        bench,
    })
}
