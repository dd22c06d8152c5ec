//! Time integration of the half-wave maps flow
//! `∂ₜS = S ∧ |∇|S` (sphere) and `∂ₜS = S ∧_η |∇|S` (hyperbolic).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{project_all, ConstrainedField, FieldError, HyperbolicField, SpinField};
use crate::geometry::{Target, Vec3};
use crate::integrate::{advance, Scheme, StepError};
use crate::lax::{self, LaxError};
use crate::spectral::{SpectralError, SpectralOps};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvolutionError {
    #[error("time step must be finite and non-zero, got {0}")]
    InvalidTimeStep(f64),
    #[error("final time must be positive and finite, got {0}")]
    InvalidFinalTime(f64),
    #[error("record interval must be at least 1")]
    InvalidRecordInterval,
    #[error("implicit solver did not converge after {iterations} iterations (last update {update:.3e})")]
    NonConvergence { iterations: usize, update: f64 },
    #[error("constraint restoration failed: {0}")]
    Constraint(#[from] FieldError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Lax(#[from] LaxError),
}

impl From<StepError<SpectralError>> for EvolutionError {
    fn from(e: StepError<SpectralError>) -> Self {
        match e {
            StepError::InvalidTimeStep(dt) => EvolutionError::InvalidTimeStep(dt),
            StepError::NonConvergence { iterations, update } => EvolutionError::NonConvergence { iterations, update },
            StepError::Rhs(e) => EvolutionError::Spectral(e),
        }
    }
}

/// `|∇|` applied to each component.
pub fn halfwave_vector(ops: &SpectralOps, values: &[Vec3]) -> Result<Vec<Vec3>, SpectralError> {
    let comps: Vec<Vec<f64>> = (0..3)
        .map(|c| ops.halfwave(&values.iter().map(|v| v[c]).collect::<Vec<_>>()))
        .collect::<Result<_, _>>()?;
    Ok((0..values.len()).map(|k| Vec3::new(comps[0][k], comps[1][k], comps[2][k])).collect())
}

/// `S ∧ |∇|S` or `S ∧_η |∇|S` on raw samples.
pub fn rhs_values(ops: &SpectralOps, target: Target, values: &[Vec3]) -> Result<Vec<Vec3>, SpectralError> {
    let lap = halfwave_vector(ops, values)?;
    Ok(values.iter().zip(&lap).map(|(s, l)| target.wedge(*s, *l)).collect())
}

pub fn hwm_rhs(ops: &SpectralOps, field: &SpinField) -> Result<Vec<Vec3>, SpectralError> {
    rhs_values(ops, Target::Sphere, field.values())
}

pub fn hwmh_rhs(ops: &SpectralOps, field: &HyperbolicField) -> Result<Vec<Vec3>, SpectralError> {
    rhs_values(ops, Target::Hyperbolic, field.values())
}

/// One step followed by pointwise projection back onto the target.
pub fn step<F: ConstrainedField>(ops: &SpectralOps, field: &F, dt: f64, scheme: Scheme) -> Result<F, EvolutionError> {
    let next = advance(field.values(), dt, scheme, |u| rhs_values(ops, F::TARGET, u))?;
    let projected = project_all::<F>(&next)?;
    Ok(F::from_parts_unchecked(projected, field.time() + dt))
}

/// `½ ∫ S·|∇|S dx` (η-product on ℍ²), trapezoid rule.
pub fn energy<F: ConstrainedField>(ops: &SpectralOps, field: &F) -> Result<f64, SpectralError> {
    let lap = halfwave_vector(ops, field.values())?;
    let sum: f64 = field.values().iter().zip(&lap).map(|(s, l)| F::TARGET.inner(*s, *l)).sum();
    Ok(0.5 * ops.spacing() * sum)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LaxSettings {
    pub truncation: usize,
    pub rank_tolerance: f64,
    /// Number of largest eigenvalues to record.
    pub top_eigenvalues: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSettings {
    pub dt: f64,
    pub t_final: f64,
    pub record_interval: usize,
    pub scheme: Scheme,
    pub lax: Option<LaxSettings>,
}

impl RunSettings {
    /// Number of steps; the step is shrunk so that `steps · dt = t_final` exactly.
    pub fn steps(&self) -> usize {
        ((self.t_final / self.dt).round() as usize).max(1)
    }

    pub fn effective_dt(&self) -> f64 {
        self.t_final / self.steps() as f64
    }

    fn validate(&self) -> Result<(), EvolutionError> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(EvolutionError::InvalidTimeStep(self.dt));
        }
        if !(self.t_final.is_finite() && self.t_final > 0.0) {
            return Err(EvolutionError::InvalidFinalTime(self.t_final));
        }
        if self.record_interval == 0 {
            return Err(EvolutionError::InvalidRecordInterval);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaxDiagnostics {
    /// `Tr(|L|^p)`, p = 1..4 (sphere) or `Re Tr(L^k)`, k = 1..4 (hyperbolic).
    pub trace_powers: [f64; 4],
    pub rank: usize,
    /// Largest eigenvalues, descending (sphere target only).
    pub top_eigenvalues: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub time: f64,
    pub energy: f64,
    pub total_spin: Vec3,
    pub lax: Option<LaxDiagnostics>,
    pub constraint_defect: f64,
}

pub fn lax_diagnostics<F: ConstrainedField>(field: &F, settings: &LaxSettings) -> Result<LaxDiagnostics, LaxError> {
    let l = lax::build_l(field, settings.truncation)?;
    let report = lax::spectrum(&l, settings.rank_tolerance, 4, 4)?;
    let trace_powers = match &report.trace_powers.power {
        Some(p) => [p[0][0], p[1][0], p[2][0], p[3][0]],
        None => {
            let a = &report.trace_powers.abs;
            [a[0], a[1], a[2], a[3]]
        }
    };
    let top_eigenvalues = report.eigenvalues.iter().rev().take(settings.top_eigenvalues).cloned().collect();
    Ok(LaxDiagnostics { trace_powers, rank: report.rank, top_eigenvalues })
}

pub fn diagnostics<F: ConstrainedField>(
    ops: &SpectralOps,
    field: &F,
    lax: Option<&LaxSettings>,
) -> Result<DiagnosticsRecord, EvolutionError> {
    Ok(DiagnosticsRecord {
        time: field.time(),
        energy: energy(ops, field)?,
        total_spin: field.total_spin(),
        lax: lax.map(|s| lax_diagnostics(field, s)).transpose()?,
        constraint_defect: field.constraint_defect(),
    })
}

/// Integrate from `t = 0` to `t_final`, recording diagnostics at step 0,
/// every `record_interval` steps, and at the final step.
pub fn run<F: ConstrainedField>(initial: F, settings: &RunSettings) -> Result<(Vec<DiagnosticsRecord>, F), EvolutionError> {
    settings.validate()?;
    let ops = SpectralOps::new(initial.len())?;
    let steps = settings.steps();
    let dt = settings.effective_dt();
    let lax = settings.lax.as_ref();
    let mut field = initial;
    let mut records = vec![diagnostics(&ops, &field, lax)?];
    for i in 1..=steps {
        field = step(&ops, &field, dt, settings.scheme)?;
        // pin the clock to the grid of step times
        field = F::from_parts_unchecked(field.values().to_vec(), i as f64 * dt);
        if i % settings.record_interval == 0 || i == steps {
            records.push(diagnostics(&ops, &field, lax)?);
        }
    }
    Ok((records, field))
}

/// Integrate `steps` steps of size `dt` (which may be negative).
pub fn integrate<F: ConstrainedField>(ops: &SpectralOps, initial: &F, dt: f64, steps: usize, scheme: Scheme) -> Result<F, EvolutionError> {
    let mut field = initial.clone();
    for _ in 0..steps {
        field = step(ops, &field, dt, scheme)?;
    }
    Ok(field)
}

/// Largest pointwise distance between two sample sets.
pub fn sup_distance(a: &[Vec3], b: &[Vec3]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (*x - *y).max_abs()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::eta_dot;
    use crate::initial::InitialCondition;
    use crate::spectral::halfwave_quadrature_oracle;

    fn ops(n: usize) -> SpectralOps {
        SpectralOps::new(n).unwrap()
    }

    /// Right-hand side through the quadrature form of |∇| (no FFT).
    fn quadrature_rhs(target: Target, values: &[Vec3]) -> Vec<Vec3> {
        let comps: Vec<Vec<f64>> =
            (0..3).map(|c| halfwave_quadrature_oracle(&values.iter().map(|v| v[c]).collect::<Vec<_>>())).collect();
        values
            .iter()
            .enumerate()
            .map(|(k, s)| target.wedge(*s, Vec3::new(comps[0][k], comps[1][k], comps[2][k])))
            .collect()
    }

    #[test]
    fn rhs_of_constant_and_great_circle_vanish() {
        let o = ops(32);
        let c = InitialCondition::Constant { value: None }.sphere_field(32, 0).unwrap();
        assert!(hwm_rhs(&o, &c).unwrap().iter().all(|v| v.max_abs() < 1e-15));
        let g = InitialCondition::GreatCircle.sphere_field(32, 0).unwrap();
        assert!(hwm_rhs(&o, &g).unwrap().iter().all(|v| v.max_abs() < 1e-14));
        let h = InitialCondition::Constant { value: None }.hyperbolic_field(32, 0).unwrap();
        assert!(hwmh_rhs(&o, &h).unwrap().iter().all(|v| v.max_abs() < 1e-15));
    }

    #[test]
    fn tilted_circle_rhs_matches_hand_computation_and_oracle() {
        let (a, c) = (0.6, 0.8);
        let n = 256;
        let f = InitialCondition::TiltedCircle { a, c }.sphere_field(n, 0).unwrap();
        let rhs = hwm_rhs(&ops(n), &f).unwrap();
        let x = crate::spectral::grid_points(n);
        for (k, r) in rhs.iter().enumerate() {
            let expect = Vec3::new(-a * c * x[k].sin(), a * c * x[k].cos(), 0.0);
            assert!((*r - expect).max_abs() < 1e-13);
        }
        let q = quadrature_rhs(Target::Sphere, f.values());
        assert!(sup_distance(&q, &rhs) < 1e-6);
    }

    #[test]
    fn hyperbolic_circle_rhs_matches_hand_computation_and_oracle() {
        let a = 0.75;
        let b = (1.0_f64 + a * a).sqrt();
        let n = 256;
        let f = InitialCondition::HyperbolicCircle { a }.hyperbolic_field(n, 0).unwrap();
        let rhs = hwmh_rhs(&ops(n), &f).unwrap();
        let x = crate::spectral::grid_points(n);
        for (k, r) in rhs.iter().enumerate() {
            let expect = Vec3::new(0.0, -a * b * x[k].sin(), a * b * x[k].cos());
            assert!((*r - expect).max_abs() < 1e-13);
        }
        let q = quadrature_rhs(Target::Hyperbolic, f.values());
        assert!(sup_distance(&q, &rhs) < 1e-6);
    }

    #[test]
    fn rhs_is_tangent() {
        let n = 64;
        let o = ops(n);
        let f = InitialCondition::RandomBandLimited { bandwidth: 5, seed: Some(3) }.sphere_field(n, 0).unwrap();
        for (s, r) in f.values().iter().zip(hwm_rhs(&o, &f).unwrap()) {
            assert!(s.dot(r).abs() < 1e-12);
        }
        // random hyperbolic field: lift a random band-limited (x₂, x₃) to the sheet
        let base = InitialCondition::RandomBandLimited { bandwidth: 3, seed: Some(4) }.sphere_field(n, 0).unwrap();
        let lifted: Vec<Vec3> = base
            .values()
            .iter()
            .map(|v| Vec3::new((1.0 + v[1] * v[1] + v[2] * v[2]).sqrt(), v[1], v[2]))
            .collect();
        let h = HyperbolicField::new(lifted, 0.0).unwrap();
        for (s, r) in h.values().iter().zip(hwmh_rhs(&o, &h).unwrap()) {
            assert!(eta_dot(*s, r).abs() < 1e-12);
        }
    }

    #[test]
    fn energy_examples() {
        let o = ops(64);
        let c = InitialCondition::Constant { value: None }.sphere_field(64, 0).unwrap();
        assert!(energy(&o, &c).unwrap().abs() < 1e-14);
        let g = InitialCondition::GreatCircle.sphere_field(64, 0).unwrap();
        assert!((energy(&o, &g).unwrap() - std::f64::consts::PI).abs() < 1e-13);
        let t = InitialCondition::TiltedCircle { a: 0.6, c: 0.8 }.sphere_field(64, 0).unwrap();
        assert!((energy(&o, &t).unwrap() - 0.36 * std::f64::consts::PI).abs() < 1e-13);
    }

    #[test]
    fn stationary_great_circle() {
        let o = ops(32);
        let g = InitialCondition::GreatCircle.sphere_field(32, 0).unwrap();
        for scheme in [Scheme::Rk4, Scheme::ImplicitMidpoint] {
            let next = step(&o, &g, 1e-2, scheme).unwrap();
            assert!(sup_distance(next.values(), g.values()) < 1e-12);
        }
    }

    #[test]
    fn implicit_midpoint_tracks_exact_solution() {
        let n = 32;
        let o = ops(n);
        let ic = InitialCondition::TiltedCircle { a: 0.6, c: 0.8 };
        let f = ic.sphere_field(n, 0).unwrap();
        let end = integrate(&o, &f, 1e-2, 100, Scheme::ImplicitMidpoint).unwrap();
        let exact = ic.exact_samples(n, 1.0, 0).unwrap();
        assert!(sup_distance(end.values(), &exact) < 1e-4);
        assert!(end.constraint_defect() < 1e-14);
    }

    #[test]
    fn time_reversal() {
        let n = 64;
        let o = ops(n);
        let f = InitialCondition::RandomBandLimited { bandwidth: 3, seed: Some(8) }.sphere_field(n, 0).unwrap();
        let fwd = integrate(&o, &f, 1e-3, 200, Scheme::Rk4).unwrap();
        let back = integrate(&o, &fwd, -1e-3, 200, Scheme::Rk4).unwrap();
        assert!(sup_distance(back.values(), f.values()) < 1e-8);
    }

    #[test]
    fn hyperbolic_renormalization_failure_is_surfaced() {
        let o = ops(8);
        let mut values = vec![Vec3::new(1.0, 0.0, 0.0); 8];
        values[3] = Vec3::new(-1.0, 0.0, 0.0);
        let bad = HyperbolicField::from_parts_unchecked(values, 0.0);
        let err = step(&o, &bad, 1e-3, Scheme::Rk4).unwrap_err();
        assert!(matches!(err, EvolutionError::Constraint(FieldError::ConstraintRestoration { index: 3, .. })));
    }

    #[test]
    fn run_records_and_validates() {
        let f = InitialCondition::TiltedCircle { a: 0.6, c: 0.8 }.sphere_field(32, 0).unwrap();
        let settings = RunSettings { dt: 0.01, t_final: 0.1, record_interval: 3, scheme: Scheme::Rk4, lax: None };
        let (recs, end) = run(f.clone(), &settings).unwrap();
        let times: Vec<f64> = recs.iter().map(|r| r.time).collect();
        assert_eq!(times.len(), 5);
        assert!(times.windows(2).all(|w| w[1] > w[0]));
        assert!((end.time() - 0.1).abs() < 1e-15);
        let bad = RunSettings { dt: -0.1, ..settings.clone() };
        assert!(matches!(run(f.clone(), &bad), Err(EvolutionError::InvalidTimeStep(_))));
        let bad = RunSettings { record_interval: 0, ..settings };
        assert!(matches!(run(f, &bad), Err(EvolutionError::InvalidRecordInterval)));
    }
}
