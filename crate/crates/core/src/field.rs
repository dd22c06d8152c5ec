//! Constrained vector fields sampled on the periodic grid.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{eta_dot, Target, Vec3};

/// Defect accepted by the checked constructors.
pub const CONSTRUCTION_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldError {
    #[error("field must have an even number of samples, at least 4 (got {0})")]
    InvalidSize(usize),
    #[error("non-finite value at sample {0}")]
    NonFinite(usize),
    #[error("sample {index} violates the {target} constraint (defect {defect:.3e})")]
    ConstraintViolation { index: usize, target: Target, defect: f64 },
    #[error("sample {index} cannot be restored to the upper pseudosphere sheet (first component {first}, η-norm² {eta_norm_sq})")]
    ConstraintRestoration { index: usize, first: f64, eta_norm_sq: f64 },
}

/// A vector field that lives on a constraint manifold (𝕊² or ℍ²).
pub trait ConstrainedField: Clone + Sized {
    const TARGET: Target;

    fn values(&self) -> &[Vec3];
    fn time(&self) -> f64;

    /// Wrap samples without checking the constraint.
    fn from_parts_unchecked(values: Vec<Vec3>, time: f64) -> Self;

    /// Map a vector back onto the constraint manifold.
    fn project(v: Vec3) -> Option<Vec3>;

    /// Pointwise deviation from the constraint for one sample.
    fn pointwise_defect(v: Vec3) -> f64;

    fn len(&self) -> usize {
        self.values().len()
    }

    fn is_empty(&self) -> bool {
        self.values().is_empty()
    }

    /// Checked constructor: rejects samples farther than
    /// [`CONSTRUCTION_TOLERANCE`] from the constraint.
    fn new(values: Vec<Vec3>, time: f64) -> Result<Self, FieldError> {
        check_size(values.len())?;
        for (index, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(FieldError::NonFinite(index));
            }
            let defect = Self::pointwise_defect(*v);
            if defect > CONSTRUCTION_TOLERANCE {
                return Err(FieldError::ConstraintViolation { index, target: Self::TARGET, defect });
            }
        }
        Ok(Self::from_parts_unchecked(values, time))
    }

    /// Project every sample onto the constraint manifold.
    fn normalized(values: Vec<Vec3>, time: f64) -> Result<Self, FieldError> {
        check_size(values.len())?;
        let projected = project_all::<Self>(&values)?;
        Ok(Self::from_parts_unchecked(projected, time))
    }

    fn constraint_defect(&self) -> f64 {
        self.values().iter().map(|v| Self::pointwise_defect(*v)).fold(0.0, f64::max)
    }

    /// `∫ S dx` by the trapezoid rule.
    fn total_spin(&self) -> Vec3 {
        let h = 2.0 * PI / self.len() as f64;
        self.values().iter().fold(Vec3::ZERO, |acc, v| acc + *v) * h
    }

    fn component(&self, c: usize) -> Vec<f64> {
        self.values().iter().map(|v| v[c]).collect()
    }
}

pub(crate) fn check_size(n: usize) -> Result<(), FieldError> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(FieldError::InvalidSize(n));
    }
    Ok(())
}

pub(crate) fn project_all<F: ConstrainedField>(values: &[Vec3]) -> Result<Vec<Vec3>, FieldError> {
    values
        .iter()
        .enumerate()
        .map(|(index, v)| {
            if !v.is_finite() {
                return Err(FieldError::NonFinite(index));
            }
            F::project(*v).ok_or(FieldError::ConstraintRestoration {
                index,
                first: v[0],
                eta_norm_sq: eta_dot(*v, *v),
            })
        })
        .collect()
}

/// 𝕊²-valued field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinField {
    values: Vec<Vec3>,
    time: f64,
}

impl ConstrainedField for SpinField {
    const TARGET: Target = Target::Sphere;

    fn values(&self) -> &[Vec3] {
        &self.values
    }

    fn time(&self) -> f64 {
        self.time
    }

    fn from_parts_unchecked(values: Vec<Vec3>, time: f64) -> Self {
        SpinField { values, time }
    }

    fn project(v: Vec3) -> Option<Vec3> {
        let norm = v.norm();
        (norm > 0.0).then(|| v * (1.0 / norm))
    }

    fn pointwise_defect(v: Vec3) -> f64 {
        (v.norm() - 1.0).abs()
    }
}

/// ℍ²-valued field: `S·_η S = −1` with `S₁ > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicField {
    values: Vec<Vec3>,
    time: f64,
}

impl ConstrainedField for HyperbolicField {
    const TARGET: Target = Target::Hyperbolic;

    fn values(&self) -> &[Vec3] {
        &self.values
    }

    fn time(&self) -> f64 {
        self.time
    }

    fn from_parts_unchecked(values: Vec<Vec3>, time: f64) -> Self {
        HyperbolicField { values, time }
    }

    /// Rescale by `1/√(−S·_η S)`. Fails off the upper sheet.
    fn project(v: Vec3) -> Option<Vec3> {
        let q = -eta_dot(v, v);
        if v[0] <= 0.0 || q <= 0.0 {
            return None;
        }
        Some(v * (1.0 / q.sqrt()))
    }

    fn pointwise_defect(v: Vec3) -> f64 {
        if v[0] <= 0.0 {
            return f64::INFINITY;
        }
        (eta_dot(v, v) + 1.0).abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_constructor_checks_norm() {
        let ok = vec![Vec3::new(0.0, 0.0, 1.0); 4];
        assert!(SpinField::new(ok, 0.0).is_ok());
        let bad = vec![Vec3::new(0.0, 0.0, 1.1); 4];
        assert!(matches!(SpinField::new(bad.clone(), 0.0), Err(FieldError::ConstraintViolation { .. })));
        let fixed = SpinField::normalized(bad, 0.0).unwrap();
        assert!(fixed.constraint_defect() < 1e-15);
        assert!(matches!(SpinField::new(vec![Vec3::ZERO; 3], 0.0), Err(FieldError::InvalidSize(3))));
    }

    #[test]
    fn hyperbolic_projection_keeps_sheet() {
        let v = Vec3::new(2.0, 0.5, -0.3);
        let p = HyperbolicField::project(v).unwrap();
        assert!((eta_dot(p, p) + 1.0).abs() < 1e-15);
        assert!(p[0] > 0.0);
        assert!(HyperbolicField::project(Vec3::new(-2.0, 0.5, 0.0)).is_none());
        // spacelike vector
        assert!(HyperbolicField::project(Vec3::new(0.5, 2.0, 0.0)).is_none());
        let err = HyperbolicField::normalized(vec![Vec3::new(-1.0, 0.0, 0.0); 4], 0.0).unwrap_err();
        assert!(matches!(err, FieldError::ConstraintRestoration { index: 0, .. }));
    }

    #[test]
    fn total_spin_of_constant() {
        let f = SpinField::new(vec![Vec3::new(0.0, 0.0, 1.0); 8], 0.0).unwrap();
        let s = f.total_spin();
        assert!((s[2] - 2.0 * PI).abs() < 1e-14);
    }
}
