//! One-step time integrators for systems of 3-vectors.
//!
//! Constraint restoration is the caller's job; these routines only advance
//! the unconstrained ODE `u' = f(u)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Classical explicit fourth-order Runge-Kutta.
    #[default]
    Rk4,
    /// Implicit midpoint rule solved by fixed-point iteration.
    ImplicitMidpoint,
}

impl std::str::FromStr for Scheme {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rk4" => Ok(Scheme::Rk4),
            "implicit-midpoint" => Ok(Scheme::ImplicitMidpoint),
            other => Err(format!("unknown scheme '{other}' (expected rk4 or implicit-midpoint)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StepError<E> {
    #[error("time step must be finite and non-zero, got {0}")]
    InvalidTimeStep(f64),
    #[error("implicit midpoint iteration did not converge in {iterations} iterations (last update {update:.3e})")]
    NonConvergence { iterations: usize, update: f64 },
    #[error(transparent)]
    Rhs(E),
}

pub const MIDPOINT_MAX_ITERATIONS: usize = 100;
pub const MIDPOINT_TOLERANCE: f64 = 1e-14;

fn axpy(u: &[Vec3], a: f64, k: &[Vec3]) -> Vec<Vec3> {
    u.iter().zip(k).map(|(x, y)| *x + *y * a).collect()
}

/// Advance `u` by `dt` with the given scheme.
pub fn advance<E, F>(u: &[Vec3], dt: f64, scheme: Scheme, mut rhs: F) -> Result<Vec<Vec3>, StepError<E>>
where
    F: FnMut(&[Vec3]) -> Result<Vec<Vec3>, E>,
{
    if !dt.is_finite() || dt == 0.0 {
        return Err(StepError::InvalidTimeStep(dt));
    }
    let mut f = |x: &[Vec3]| rhs(x).map_err(StepError::Rhs);
    match scheme {
        Scheme::Rk4 => {
            let k1 = f(u)?;
            let k2 = f(&axpy(u, 0.5 * dt, &k1))?;
            let k3 = f(&axpy(u, 0.5 * dt, &k2))?;
            let k4 = f(&axpy(u, dt, &k3))?;
            Ok((0..u.len())
                .map(|i| u[i] + (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (dt / 6.0))
                .collect())
        }
        Scheme::ImplicitMidpoint => {
            // u₁ = u₀ + dt f((u₀ + u₁)/2), iterated on the midpoint value
            let mut mid = u.to_vec();
            let mut update = f64::INFINITY;
            for _ in 0..MIDPOINT_MAX_ITERATIONS {
                let k = f(&mid)?;
                let next = axpy(u, 0.5 * dt, &k);
                update = next.iter().zip(&mid).map(|(a, b)| (*a - *b).max_abs()).fold(0.0, f64::max);
                mid = next;
                if update <= MIDPOINT_TOLERANCE {
                    return Ok(u.iter().zip(&mid).map(|(a, m)| *m * 2.0 - *a).collect());
                }
            }
            Err(StepError::NonConvergence { iterations: MIDPOINT_MAX_ITERATIONS, update })
        }
    }
}
