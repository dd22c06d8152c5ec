//! Named initial-condition families and their exact rotating solutions.

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{ConstrainedField, FieldError, HyperbolicField, SpinField};
use crate::geometry::{cross, Target, Vec3};
use crate::spectral::grid_points;

#[derive(Debug, Error)]
pub enum InitialError {
    #[error("{0}")]
    Parameter(String),
    #[error("family '{family}' is not defined for the {target} target")]
    WrongTarget { family: &'static str, target: Target },
    #[error("cannot read sample file {path}: {message}")]
    File { path: PathBuf, message: String },
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialCondition {
    /// `S ≡ value`. Defaults to the north pole (sphere) or the sheet vertex (hyperbolic).
    Constant {
        #[serde(default)]
        value: Option<[f64; 3]>,
    },
    /// `(cos x, sin x, 0)`.
    GreatCircle,
    /// `(a cos x, a sin x, c)` with `a² + c² = 1`.
    TiltedCircle { a: f64, c: f64 },
    /// `(√(1 + a²), a cos x, a sin x)` on ℍ².
    HyperbolicCircle { a: f64 },
    /// Random unit field that is a trigonometric polynomial of degree `bandwidth`.
    RandomBandLimited {
        bandwidth: usize,
        #[serde(default)]
        seed: Option<u64>,
    },
    /// JSON array of `[x, y, z]` triples.
    File { path: PathBuf },
}

const FAMILY_TOLERANCE: f64 = 1e-12;

impl InitialCondition {
    pub fn name(&self) -> &'static str {
        match self {
            InitialCondition::Constant { .. } => "constant",
            InitialCondition::GreatCircle => "great-circle",
            InitialCondition::TiltedCircle { .. } => "tilted-circle",
            InitialCondition::HyperbolicCircle { .. } => "hyperbolic-circle",
            InitialCondition::RandomBandLimited { .. } => "random-band-limited",
            InitialCondition::File { .. } => "file",
        }
    }

    /// Parameter-range checks independent of the grid.
    pub fn validate(&self, target: Target) -> Result<(), InitialError> {
        use InitialCondition::*;
        let wrong = |family| Err(InitialError::WrongTarget { family, target });
        match (self, target) {
            (Constant { value: Some(v) }, t) => {
                let v = Vec3(*v);
                let ok = match t {
                    Target::Sphere => (v.norm() - 1.0).abs() <= FAMILY_TOLERANCE,
                    Target::Hyperbolic => {
                        v[0] > 0.0 && (crate::geometry::eta_dot(v, v) + 1.0).abs() <= FAMILY_TOLERANCE
                    }
                };
                if !ok {
                    return Err(InitialError::Parameter(format!(
                        "constant value {:?} does not satisfy the {t} constraint",
                        v.0
                    )));
                }
                Ok(())
            }
            (Constant { value: None }, _) => Ok(()),
            (GreatCircle, Target::Sphere) => Ok(()),
            (TiltedCircle { a, c }, Target::Sphere) => {
                let defect = (a * a + c * c - 1.0).abs();
                if !defect.is_finite() || defect > FAMILY_TOLERANCE {
                    return Err(InitialError::Parameter(format!(
                        "tilted-circle requires a² + c² = 1 (got a = {a}, c = {c}, a² + c² = {})",
                        a * a + c * c
                    )));
                }
                Ok(())
            }
            (HyperbolicCircle { a }, Target::Hyperbolic) => {
                if !a.is_finite() {
                    return Err(InitialError::Parameter(format!("hyperbolic-circle amplitude must be finite, got {a}")));
                }
                Ok(())
            }
            (RandomBandLimited { bandwidth, .. }, Target::Sphere) => {
                if *bandwidth == 0 {
                    return Err(InitialError::Parameter("random-band-limited requires bandwidth ≥ 1".into()));
                }
                Ok(())
            }
            (File { .. }, _) => Ok(()),
            (GreatCircle, _) => wrong("great-circle"),
            (TiltedCircle { .. }, _) => wrong("tilted-circle"),
            (HyperbolicCircle { .. }, _) => wrong("hyperbolic-circle"),
            (RandomBandLimited { .. }, _) => wrong("random-band-limited"),
        }
    }

    /// Bandwidth of the family when it is a trigonometric polynomial.
    pub fn bandwidth(&self) -> Option<usize> {
        match self {
            InitialCondition::Constant { .. } => Some(0),
            InitialCondition::GreatCircle
            | InitialCondition::TiltedCircle { .. }
            | InitialCondition::HyperbolicCircle { .. } => Some(1),
            InitialCondition::RandomBandLimited { bandwidth, .. } => Some(*bandwidth),
            InitialCondition::File { .. } => None,
        }
    }

    fn samples(&self, target: Target, n: usize, seed: u64) -> Result<Vec<Vec3>, InitialError> {
        self.validate(target)?;
        let x = grid_points(n);
        Ok(match self {
            InitialCondition::Constant { value } => {
                let v = value.map(Vec3).unwrap_or(match target {
                    Target::Sphere => Vec3::new(0.0, 0.0, 1.0),
                    Target::Hyperbolic => Vec3::new(1.0, 0.0, 0.0),
                });
                vec![v; n]
            }
            InitialCondition::File { path } => load_samples(path)?,
            _ => x.iter().map(|&x| self.exact_value(x, 0.0, seed).expect("validated family")).collect(),
        })
    }

    pub fn sphere_field(&self, n: usize, seed: u64) -> Result<SpinField, InitialError> {
        Ok(SpinField::new(self.samples(Target::Sphere, n, seed)?, 0.0)?)
    }

    pub fn hyperbolic_field(&self, n: usize, seed: u64) -> Result<HyperbolicField, InitialError> {
        Ok(HyperbolicField::new(self.samples(Target::Hyperbolic, n, seed)?, 0.0)?)
    }

    /// Value of the closed-form solution at `(x, t)` when the family has one.
    /// Random data only has a closed form at `t = 0`.
    pub fn exact_value(&self, x: f64, t: f64, seed: u64) -> Option<Vec3> {
        match self {
            InitialCondition::Constant { value } => value.map(Vec3),
            InitialCondition::GreatCircle => Some(Vec3::new(x.cos(), x.sin(), 0.0)),
            // rotates with angular speed c
            InitialCondition::TiltedCircle { a, c } => {
                let p = x + c * t;
                Some(Vec3::new(a * p.cos(), a * p.sin(), *c))
            }
            // rotates with angular speed b = √(1 + a²)
            InitialCondition::HyperbolicCircle { a } => {
                let b = (1.0 + a * a).sqrt();
                let p = x + b * t;
                Some(Vec3::new(b, a * p.cos(), a * p.sin()))
            }
            InitialCondition::RandomBandLimited { bandwidth, seed: own } if t == 0.0 => {
                Some(RotationChain::new(*bandwidth, own.unwrap_or(seed)).eval(x))
            }
            _ => None,
        }
    }

    /// Sampled exact solution at time `t`, if the family has one.
    pub fn exact_samples(&self, n: usize, t: f64, seed: u64) -> Option<Vec<Vec3>> {
        grid_points(n).iter().map(|&x| self.exact_value(x, t, seed)).collect()
    }
}

/// Unit field `x ↦ R_B(x) ⋯ R_1(x) e`, each `R_j(x)` a rotation by angle `x`
/// about a fixed random axis. Every factor has bandwidth one, so the field is
/// an exact trigonometric polynomial of degree `B` with `|S| = 1`.
#[derive(Debug, Clone)]
pub struct RotationChain {
    axes: Vec<Vec3>,
    base: Vec3,
}

impl RotationChain {
    pub fn new(bandwidth: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let unit = |rng: &mut ChaCha8Rng| loop {
            let v = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let n = v.norm();
            if n > 0.2 && n <= 1.0 {
                return v * (1.0 / n);
            }
        };
        let base = unit(&mut rng);
        let axes = (0..bandwidth).map(|_| unit(&mut rng)).collect();
        RotationChain { axes, base }
    }

    pub fn eval(&self, x: f64) -> Vec3 {
        let (s, c) = x.sin_cos();
        self.axes.iter().fold(self.base, |v, k| {
            // Rodrigues: v cos x + (k ∧ v) sin x + k (k·v)(1 − cos x)
            v * c + cross(*k, v) * s + *k * (k.dot(v) * (1.0 - c))
        })
    }
}

pub fn load_samples(path: &std::path::Path) -> Result<Vec<Vec3>, InitialError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| InitialError::File { path: path.to_owned(), message: e.to_string() })?;
    let triples: Vec<[f64; 3]> = serde_json::from_str(&text)
        .map_err(|e| InitialError::File { path: path.to_owned(), message: e.to_string() })?;
    Ok(triples.into_iter().map(Vec3).collect())
}
