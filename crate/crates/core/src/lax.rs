//! Lax operators `L_S = [H, μ_S]` and
//! `B_S = −(i/2)(μ_S|∇| + |∇|μ_S) + (i/2)μ_{|∇|S}` as finite matrices.
//!
//! The basis is `e^{inx} ⊗ C²` with modes ascending `−M..=M` and the spinor
//! index fastest, so block `(m, n)` occupies rows `2(m+M)..2(m+M)+2`. With
//! `Ŝ(k)` the componentwise Fourier coefficients and `A(·)` the Pauli (sphere)
//! or ρ-map (hyperbolic), the blocks are
//!
//! ```text
//! L[m, n] = −i (sgn m − sgn n) A(Ŝ(m − n))
//! B[m, n] = −(i/2) (|m| + |n| − |m − n|) A(Ŝ(m − n))
//! ```
//!
//! `L` only couples modes of opposite sign (Hankel structure).

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::evolution;
use crate::field::{ConstrainedField, SpinField};
use crate::geometry::{Target, Vec3};
use crate::spectral::{FourierCoeffs, SpectralError, SpectralOps};

pub const DEFAULT_RANK_TOLERANCE: f64 = 1e-8;
/// Relative coefficient threshold used to measure the bandwidth of a field.
pub const BANDWIDTH_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LaxError {
    #[error("truncation M = {m} too large for grid N = {n} (need M ≤ N/2 − 1)")]
    TruncationTooLarge { m: usize, n: usize },
    #[error("truncation M must be positive")]
    ZeroTruncation,
    #[error("field bandwidth {bandwidth} exceeds M/2 for truncation M = {m}")]
    BandwidthTooLarge { bandwidth: usize, m: usize },
    #[error("rank tolerance must lie in (0, 1), got {0}")]
    InvalidRankTolerance(f64),
    #[error("non-finite matrix entries")]
    NonFinite,
    #[error("Hermitian eigensolver failed to converge (dimension {dimension})")]
    EigenFailure { dimension: usize },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LaxKind {
    L,
    B,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LaxMatrix {
    pub entries: DMatrix<Complex64>,
    pub truncation: usize,
    pub target: Target,
    pub kind: LaxKind,
}

impl LaxMatrix {
    pub fn dimension(&self) -> usize {
        self.entries.nrows()
    }

    /// Row/column index of `(mode, spinor)`.
    pub fn index(&self, mode: i64, spinor: usize) -> usize {
        basis_index(self.truncation, mode, spinor)
    }

    /// 2×2 block coupling output mode `m` to input mode `n`.
    pub fn block(&self, m: i64, n: i64) -> nalgebra::Matrix2<Complex64> {
        let (r, c) = (self.index(m, 0), self.index(n, 0));
        self.entries.fixed_view::<2, 2>(r, c).into_owned()
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `max |A − A*|` (Hermiticity defect).
    pub fn hermitian_defect(&self) -> f64 {
        max_entry(&(&self.entries - self.entries.adjoint()))
    }

    /// `max |A + A*|` (anti-Hermiticity defect).
    pub fn anti_hermitian_defect(&self) -> f64 {
        max_entry(&(&self.entries + self.entries.adjoint()))
    }
}

pub fn basis_index(truncation: usize, mode: i64, spinor: usize) -> usize {
    2 * (mode + truncation as i64) as usize + spinor
}

pub(crate) fn max_entry(m: &DMatrix<Complex64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// Componentwise Fourier coefficients of a vector field.
pub fn vector_coefficients(ops: &SpectralOps, values: &[Vec3]) -> Result<[FourierCoeffs; 3], SpectralError> {
    let comp = |c: usize| -> Vec<f64> { values.iter().map(|v| v[c]).collect() };
    Ok([ops.fft_real(&comp(0))?, ops.fft_real(&comp(1))?, ops.fft_real(&comp(2))?])
}

/// Largest mode carrying a coefficient above `BANDWIDTH_TOLERANCE` relative to
/// the largest coefficient.
pub fn field_bandwidth(coeffs: &[FourierCoeffs; 3]) -> usize {
    let scale = coeffs
        .iter()
        .flat_map(|c| c.as_fft_order().iter().map(|z| z.norm()))
        .fold(0.0, f64::max);
    if scale == 0.0 {
        return 0;
    }
    coeffs.iter().map(|c| c.bandwidth(BANDWIDTH_TOLERANCE * scale)).max().unwrap_or(0)
}

/// Generic block assembly: block `(m, n)` is `weight(m, n) · A(Ŝ(m − n))`.
pub fn assemble<W>(target: Target, coeffs: &[FourierCoeffs; 3], truncation: usize, weight: W) -> DMatrix<Complex64>
where
    W: Fn(i64, i64) -> Complex64,
{
    let mm = truncation as i64;
    let dim = 2 * (2 * truncation + 1);
    let mut out = DMatrix::<Complex64>::zeros(dim, dim);
    for m in -mm..=mm {
        for n in -mm..=mm {
            let w = weight(m, n);
            if w == Complex64::new(0.0, 0.0) {
                continue;
            }
            let k = m - n;
            let s = [coeffs[0].band_limited(k), coeffs[1].band_limited(k), coeffs[2].band_limited(k)];
            if s.iter().all(|z| z.norm() == 0.0) {
                continue;
            }
            let block = target.matrix_map(s) * w;
            let (r, c) = (basis_index(truncation, m, 0), basis_index(truncation, n, 0));
            out.fixed_view_mut::<2, 2>(r, c).copy_from(&block);
        }
    }
    out
}

fn sgn(n: i64) -> f64 {
    n.signum() as f64
}

pub fn l_weight(m: i64, n: i64) -> Complex64 {
    Complex64::new(0.0, -(sgn(m) - sgn(n)))
}

pub fn b_weight(m: i64, n: i64) -> Complex64 {
    let w = (m.abs() + n.abs() - (m - n).abs()) as f64;
    Complex64::new(0.0, -0.5 * w)
}

fn check_truncation(n: usize, m: usize) -> Result<(), LaxError> {
    if m == 0 {
        return Err(LaxError::ZeroTruncation);
    }
    if m + 1 > n / 2 {
        return Err(LaxError::TruncationTooLarge { m, n });
    }
    Ok(())
}

/// `L` assembled from arbitrary (not necessarily constrained) samples.
pub fn build_l_from_values(target: Target, values: &[Vec3], truncation: usize) -> Result<DMatrix<Complex64>, LaxError> {
    check_truncation(values.len(), truncation)?;
    let ops = SpectralOps::new(values.len())?;
    let coeffs = vector_coefficients(&ops, values)?;
    Ok(assemble(target, &coeffs, truncation, l_weight))
}

pub fn build_l<F: ConstrainedField>(field: &F, truncation: usize) -> Result<LaxMatrix, LaxError> {
    let entries = build_l_from_values(F::TARGET, field.values(), truncation)?;
    if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(LaxError::NonFinite);
    }
    Ok(LaxMatrix { entries, truncation, target: F::TARGET, kind: LaxKind::L })
}

pub fn build_b<F: ConstrainedField>(field: &F, truncation: usize) -> Result<LaxMatrix, LaxError> {
    check_truncation(field.len(), truncation)?;
    let ops = SpectralOps::new(field.len())?;
    let coeffs = vector_coefficients(&ops, field.values())?;
    let entries = assemble(F::TARGET, &coeffs, truncation, b_weight);
    Ok(LaxMatrix { entries, truncation, target: F::TARGET, kind: LaxKind::B })
}

/// Max-magnitude entry of `dL/dt − c[B, L]` over the central block
/// `|m|, |n| ≤ M − b`, with `c = 1` (sphere) or `c = i` (hyperbolic) and
/// `dL/dt = [H, μ_{∂ₜS}]` taken from the evolution right-hand side.
pub fn lax_residual<F: ConstrainedField>(field: &F, truncation: usize) -> Result<f64, LaxError> {
    check_truncation(field.len(), truncation)?;
    let ops = SpectralOps::new(field.len())?;
    let coeffs = vector_coefficients(&ops, field.values())?;
    let bandwidth = field_bandwidth(&coeffs);
    if 2 * bandwidth > truncation {
        return Err(LaxError::BandwidthTooLarge { bandwidth, m: truncation });
    }
    let target = F::TARGET;
    let l = assemble(target, &coeffs, truncation, l_weight);
    let b = assemble(target, &coeffs, truncation, b_weight);
    let rate = evolution::rhs_values(&ops, target, field.values())?;
    let rate_coeffs = vector_coefficients(&ops, &rate)?;
    let dl = assemble(target, &rate_coeffs, truncation, l_weight);

    let mut commutator = &b * &l - &l * &b;
    if target == Target::Hyperbolic {
        commutator *= Complex64::new(0.0, 1.0);
    }
    let diff = dl - commutator;
    let window = (truncation - bandwidth) as i64;
    let mut worst = 0.0_f64;
    for m in -window..=window {
        for n in -window..=window {
            for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                let z = diff[(basis_index(truncation, m, i), basis_index(truncation, n, j))];
                worst = worst.max(z.norm());
            }
        }
    }
    Ok(worst)
}

/// Trace powers carried by a [`SpectrumReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TracePowers {
    /// `Tr(|L|^p)` for `p = 1..=P`, from singular values.
    pub abs: Vec<f64>,
    /// `Tr(L^k)` for `k = 1..=K` as `[re, im]`; reported for non-Hermitian (hyperbolic) matrices.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    /// Ascending; empty for the hyperbolic target.
    pub eigenvalues: Vec<f64>,
    /// Descending.
    pub singular_values: Vec<f64>,
    pub rank: usize,
    pub trace_powers: TracePowers,
    pub truncation: usize,
}

pub fn numerical_rank(singular_values: &[f64], rank_tolerance: f64) -> usize {
    let largest = singular_values.iter().cloned().fold(0.0, f64::max);
    if largest == 0.0 {
        return 0;
    }
    singular_values.iter().filter(|&&s| s > rank_tolerance * largest).count()
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Result<Vec<f64>, LaxError> {
    let dimension = m.nrows();
    let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, 10_000)
        .ok_or(LaxError::EigenFailure { dimension })?;
    let mut values: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Descending singular values.
pub fn singular_values(m: &DMatrix<Complex64>) -> Vec<f64> {
    let mut sv: Vec<f64> = m.singular_values().iter().cloned().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

pub fn spectrum(lax: &LaxMatrix, rank_tolerance: f64, p_max: usize, k_max: usize) -> Result<SpectrumReport, LaxError> {
    if !(rank_tolerance > 0.0 && rank_tolerance < 1.0) {
        return Err(LaxError::InvalidRankTolerance(rank_tolerance));
    }
    if lax.entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(LaxError::NonFinite);
    }
    let hermitian = lax.target == Target::Sphere && lax.kind == LaxKind::L;
    let eigenvalues = if hermitian { hermitian_eigenvalues(&lax.entries)? } else { Vec::new() };
    let sv = singular_values(&lax.entries);
    let abs = (1..=p_max).map(|p| sv.iter().map(|s| s.powi(p as i32)).sum()).collect();
    let power = (!hermitian).then(|| {
        let mut acc = lax.entries.clone();
        (1..=k_max)
            .map(|k| {
                if k > 1 {
                    acc = &acc * &lax.entries;
                }
                let t = acc.trace();
                [t.re, t.im]
            })
            .collect()
    });
    Ok(SpectrumReport {
        eigenvalues,
        rank: numerical_rank(&sv, rank_tolerance),
        singular_values: sv,
        trace_powers: TracePowers { abs, power },
        truncation: lax.truncation,
    })
}

/// `Tr(|L_S|²)` by direct double quadrature of the kernel of `[H, μ_S]`:
///
/// ```text
/// Tr(|L_S|²) = (1/2π²) ∬ |S(x) − S(y)|² cot²((x − y)/2) dx dy
/// ```
///
/// The `y` nodes sit on the half-shifted grid (trigonometric interpolation of
/// the samples), so the removable diagonal singularity is never evaluated.
pub fn kernel_trace_oracle(field: &SpinField) -> Result<f64, LaxError> {
    let n = field.len();
    let ops = SpectralOps::new(n)?;
    let h = ops.spacing();
    let shifted: Vec<Vec<f64>> =
        (0..3).map(|c| ops.shift(&field.component(c), 0.5 * h)).collect::<Result<_, _>>()?;
    let ys: Vec<Vec3> = (0..n).map(|j| Vec3::new(shifted[0][j], shifted[1][j], shifted[2][j])).collect();
    let cot_sq: Vec<f64> = (0..n)
        .map(|d| {
            // x_k − y_j = (k − j − ½) h
            let u = (d as f64 - 0.5) * h;
            let c = 1.0 / (0.5 * u).tan();
            c * c
        })
        .collect();
    let mut total = 0.0;
    for (k, sx) in field.values().iter().enumerate() {
        for (j, sy) in ys.iter().enumerate() {
            let d = (k + n - j) % n;
            total += (*sx - *sy).norm_sq() * cot_sq[d];
        }
    }
    Ok(total * h * h / (2.0 * PI * PI))
}

/// Closed form of the periodic trace identity under the `−i·sgn(n)` Hilbert symbol:
/// `Tr(|L_S|²) = (8/π) E[S] − 4 + |∫S dx|² / π²`.
pub fn periodic_trace_closed_form(energy: f64, total_spin: Vec3) -> f64 {
    8.0 / PI * energy - 4.0 + total_spin.norm_sq() / (PI * PI)
}
