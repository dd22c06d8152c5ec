//! Traveling solitary waves `S(t, x) = Q(x − vt)` of the real-line problem.
//!
//! Profiles are built from finite Blaschke products
//! `B(x) = Π (x − z_k)/(x − z̄_k)` with `Im z_k > 0`:
//!
//! ```text
//! Q(x) = (α Re B(x), α Im B(x), v),   α = √(1 − v²)
//! ```
//!
//! and solve `Q ∧ |∇|Q − v ∂ₓQ = 0`. Real-line singular integrals are
//! evaluated by quadrature on a truncated domain; the periodic tools are reused
//! through the Cayley map `x = tan(θ/2)`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix4, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{cross, Target, Vec3};
use crate::lax::{self, LaxError};
use crate::spectral::{grid_points, SpectralOps};

#[derive(Debug, Error)]
pub enum SolitonError {
    #[error("velocity must satisfy |v| < 1, got {0}")]
    Velocity(f64),
    #[error("zero {index} = {re} + {im}i must lie in the open upper half-plane")]
    Zero { index: usize, re: f64, im: f64 },
    #[error("cannot parse '{0}' as a complex number (expected forms like 'i', '2i', '0.5+1.5i')")]
    Parse(String),
    #[error("quadrature needs a positive half-width and at least 2 intervals")]
    Quadrature,
    #[error(transparent)]
    Lax(#[from] LaxError),
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Half-width of the truncated real-line domain used by default.
pub const DEFAULT_HALF_WIDTH: f64 = 200.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlaschkeProfile {
    velocity: f64,
    zeros: Vec<Complex64>,
    alpha: f64,
}

impl BlaschkeProfile {
    pub fn new(velocity: f64, zeros: Vec<Complex64>) -> Result<Self, SolitonError> {
        if !(velocity.abs() < 1.0) {
            return Err(SolitonError::Velocity(velocity));
        }
        for (index, z) in zeros.iter().enumerate() {
            if !(z.im > 0.0 && z.re.is_finite() && z.im.is_finite()) {
                return Err(SolitonError::Zero { index, re: z.re, im: z.im });
            }
        }
        Ok(BlaschkeProfile { velocity, zeros, alpha: (1.0 - velocity * velocity).sqrt() })
    }

    /// Degree-one profile with its zero at `i`.
    pub fn degree_one(velocity: f64) -> Result<Self, SolitonError> {
        Self::new(velocity, vec![I])
    }

    pub fn velocity(&self) -> f64 {
        self.velocity
    }

    pub fn zeros(&self) -> &[Complex64] {
        &self.zeros
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn degree(&self) -> usize {
        self.zeros.len()
    }

    /// `Q(∞) = (α, 0, v)`.
    pub fn limit(&self) -> Vec3 {
        Vec3::new(self.alpha, 0.0, self.velocity)
    }
}

pub fn blaschke_eval(profile: &BlaschkeProfile, x: f64) -> Complex64 {
    let x = Complex64::new(x, 0.0);
    profile.zeros.iter().fold(Complex64::new(1.0, 0.0), |b, z| b * (x - z) / (x - z.conj()))
}

/// `B'(x) = B(x) Σ_k [1/(x − z_k) − 1/(x − z̄_k)]`.
pub fn blaschke_derivative(profile: &BlaschkeProfile, x: f64) -> Complex64 {
    let xc = Complex64::new(x, 0.0);
    let log_deriv: Complex64 = profile.zeros.iter().map(|z| 1.0 / (xc - z) - 1.0 / (xc - z.conj())).sum();
    blaschke_eval(profile, x) * log_deriv
}

pub fn profile_eval(profile: &BlaschkeProfile, x: f64) -> Vec3 {
    let b = blaschke_eval(profile, x);
    Vec3::new(profile.alpha * b.re, profile.alpha * b.im, profile.velocity)
}

pub fn profile_derivative(profile: &BlaschkeProfile, x: f64) -> Vec3 {
    let d = blaschke_derivative(profile, x);
    Vec3::new(profile.alpha * d.re, profile.alpha * d.im, 0.0)
}

/// `|∇|Q` in closed form: `B` extends analytically to the upper half-plane,
/// so `|∇|B = −i B'`.
pub fn profile_halfwave(profile: &BlaschkeProfile, x: f64) -> Vec3 {
    let d = -I * blaschke_derivative(profile, x);
    Vec3::new(profile.alpha * d.re, profile.alpha * d.im, 0.0)
}

/// `E = (1 − v²) π m`.
pub fn profile_energy(profile: &BlaschkeProfile) -> f64 {
    profile.alpha * profile.alpha * PI * profile.degree() as f64
}

/// Composite Simpson rule with `n` intervals (rounded up to even).
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = (n.max(2) + 1) & !1;
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|k| f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 }).sum();
    (f(a) + f(b) + inner) * h / 3.0
}

/// `∫_ℝ f` as Simpson on `[−X, X]` plus the tail of a `c/x²` decay fitted at `±X`.
pub fn real_line_integral<F: Fn(f64) -> f64>(f: F, half_width: f64, intervals: usize) -> f64 {
    let core = simpson(&f, -half_width, half_width, intervals);
    core + half_width * (f(half_width) + f(-half_width))
}

/// Energy `(1/4π) ∬ |Q(x) − Q(y)|²/(x − y)² dx dy` restricted to `[−X, X]²`.
///
/// With `x = tan(θ/2)` the integrand becomes
/// `α² |b(θ) − b(φ)|² / (4 sin²((θ − φ)/2))`, `b(θ) = B(tan(θ/2))`, which is
/// smooth across the diagonal (limit `4α²|b'(θ)|²`). The truncation drops the
/// strips `|θ| > 2 atan X`, an `O(1/X)` relative deficit.
pub fn profile_energy_quadrature(profile: &BlaschkeProfile, half_width: f64, intervals: usize) -> Result<f64, SolitonError> {
    if !(half_width > 0.0) || intervals < 2 {
        return Err(SolitonError::Quadrature);
    }
    let n = (intervals + 1) & !1;
    let theta_max = 2.0 * half_width.atan();
    let h = 2.0 * theta_max / n as f64;
    let nodes: Vec<f64> = (0..=n).map(|k| -theta_max + k as f64 * h).collect();
    let weight = |k: usize| if k == 0 || k == n { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
    let b: Vec<Complex64> = nodes.iter().map(|&t| blaschke_eval(profile, (t / 2.0).tan())).collect();
    let db: Vec<f64> = nodes
        .iter()
        .map(|&t| {
            let c = (t / 2.0).cos();
            (blaschke_derivative(profile, (t / 2.0).tan()) / (2.0 * c * c)).norm_sqr()
        })
        .collect();
    let mut total = 0.0;
    for i in 0..=n {
        let mut row = 0.0;
        for j in 0..=n {
            let value = if i == j {
                4.0 * db[i]
            } else {
                let s = ((nodes[i] - nodes[j]) / 2.0).sin();
                (b[i] - b[j]).norm_sqr() / (s * s)
            };
            row += weight(j) * value;
        }
        total += weight(i) * row;
    }
    let alpha2 = profile.alpha * profile.alpha;
    Ok(alpha2 * total * (h / 3.0) * (h / 3.0) / (16.0 * PI))
}

/// Settings for the real-line singular-integral quadratures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineQuadrature {
    /// Integration stops at `u = half_width`.
    pub half_width: f64,
    /// Below this offset the integrand is replaced by its Taylor limit.
    pub inner_cutoff: f64,
    /// Simpson intervals in `s = ln u`.
    pub intervals: usize,
}

impl Default for LineQuadrature {
    fn default() -> Self {
        LineQuadrature { half_width: DEFAULT_HALF_WIDTH, inner_cutoff: 1e-4, intervals: 6000 }
    }
}

impl LineQuadrature {
    fn log_integral<G: Fn(f64) -> f64>(&self, g: G) -> f64 {
        simpson(|s| g(s.exp()), self.inner_cutoff.ln(), self.half_width.ln(), self.intervals)
    }

    /// `|∇|f(x) = (1/π) ∫₀^∞ [2f(x) − f(x + u) − f(x − u)] / u² du`.
    ///
    /// `far` is the common limit of `f` at `±∞`; the tail beyond the half-width
    /// is integrated assuming `f` has settled to it, an `O(|x|/X³)` error for
    /// profiles approaching the limit like `1/x`.
    pub fn halfwave<F: Fn(f64) -> f64>(&self, f: F, x: f64, far: f64) -> f64 {
        let fx = f(x);
        let g = |u: f64| 2.0 * fx - f(x + u) - f(x - u);
        let core = self.log_integral(|u| g(u) / u);
        let inner = g(self.inner_cutoff) / self.inner_cutoff;
        let tail = 2.0 * (fx - far) / self.half_width;
        (core + inner + tail) / PI
    }

    /// `Hf(x) = (1/π) p.v.∫ f(y)/(x − y) dy = (1/π) ∫₀^∞ [f(x − u) − f(x + u)] / u du`
    /// for `f` decaying at infinity. Beyond the half-width `f` is modelled as
    /// `c/y`, with `c` read off at `x ± X`, and that tail is integrated exactly.
    pub fn hilbert<F: Fn(f64) -> f64>(&self, f: F, x: f64) -> f64 {
        let g = |u: f64| f(x - u) - f(x + u);
        let core = self.log_integral(g);
        let inner = g(self.inner_cutoff);
        let big = self.half_width;
        let c = 0.5 * ((x + big) * f(x + big) + (x - big) * f(x - big));
        // ∫_X^∞ [1/(x − u) − 1/(x + u)] du/u = ln((X − x)/(X + x))/x
        let tail_kernel = if x.abs() < 1e-12 * big { -2.0 / big } else { ((big - x) / (big + x)).ln() / x };
        (core + inner + c * tail_kernel) / PI
    }
}

/// Max over `xs` of `|Q ∧ |∇|Q − w ∂ₓQ|` for the profile tested against velocity `w`.
///
/// `w = v` is the traveling-wave equation itself; `w ≠ v` is a profile whose
/// third component disagrees with the velocity and must not pass.
pub fn residual_with_velocity(
    profile: &BlaschkeProfile,
    w: f64,
    xs: &[f64],
    method: ResidualMethod,
) -> f64 {
    let far = profile.limit();
    xs.iter()
        .map(|&x| {
            let q = profile_eval(profile, x);
            let hq = match method {
                ResidualMethod::ClosedForm => profile_halfwave(profile, x),
                ResidualMethod::Quadrature(quad) => Vec3::new(
                    quad.halfwave(|y| profile_eval(profile, y)[0], x, far[0]),
                    quad.halfwave(|y| profile_eval(profile, y)[1], x, far[1]),
                    0.0,
                ),
            };
            (cross(q, hq) - profile_derivative(profile, x) * w).max_abs()
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResidualMethod {
    /// `|∇|B = −iB'`.
    ClosedForm,
    /// Truncated-domain quadrature of the singular integral.
    Quadrature(LineQuadrature),
}

/// Max-norm of `Q ∧ |∇|Q − v ∂ₓQ` over `xs`: closed form up to degree one,
/// quadrature beyond.
pub fn profile_residual(profile: &BlaschkeProfile, xs: &[f64]) -> f64 {
    let method = if profile.degree() <= 1 {
        ResidualMethod::ClosedForm
    } else {
        ResidualMethod::Quadrature(LineQuadrature::default())
    };
    residual_with_velocity(profile, profile.velocity, xs, method)
}

/// `count` equally spaced points on `[−half_width, half_width]`.
pub fn sample_grid(half_width: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![0.0];
    }
    (0..count).map(|k| -half_width + 2.0 * half_width * k as f64 / (count - 1) as f64).collect()
}

/// `φ(x) = √(2/π) / (1 + x²)`.
pub fn phi(x: f64) -> f64 {
    (2.0 / PI).sqrt() / (1.0 + x * x)
}

/// `ψ(x) = √(1/2π) · 2x / (1 + x²)`.
pub fn psi(x: f64) -> f64 {
    (0.5 / PI).sqrt() * 2.0 * x / (1.0 + x * x)
}

/// `f(x) = (x² − 1)/(1 + x²)`, the first Blaschke component at `z = i`.
pub fn f_component(x: f64) -> f64 {
    (x * x - 1.0) / (1.0 + x * x)
}

/// `g(x) = −2x/(1 + x²)`.
pub fn g_component(x: f64) -> f64 {
    -2.0 * x / (1.0 + x * x)
}

/// The degree-one Lax matrix on its four-dimensional range, in the basis
/// `(φ ⊕ 0, ψ ⊕ 0, 0 ⊕ φ, 0 ⊕ ψ)`:
///
/// ```text
/// M = α [[0, 0, i, 1], [0, 0, 1, −i], [−i, 1, 0, 0], [1, i, 0, 0]]
/// ```
///
/// With `Hf(x) = (1/π) p.v.∫ f(y)/(x − y) dy` the commutators are
/// `[H, f]u = −⟨ψ, u⟩φ − ⟨φ, u⟩ψ` and `[H, g]u = ⟨φ, u⟩φ − ⟨ψ, u⟩ψ`
/// (see [`commutator_check`]), so `[H, μ_Q]` restricted to the range is `−M`.
/// Both have spectrum `{−2α, 0, 0, 2α}` and `Tr(MM*) = 8α²`.
#[derive(Debug, Clone, PartialEq)]
pub struct RankFourLax {
    pub velocity: f64,
    pub alpha: f64,
    pub matrix: Matrix4<Complex64>,
    /// Ascending.
    pub eigenvalues: [f64; 4],
}

impl RankFourLax {
    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// `Tr(M M*)`.
    pub fn trace_sq(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn hermitian_defect(&self) -> f64 {
        (self.matrix - self.matrix.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

pub fn rank_four_lax(v: f64) -> Result<RankFourLax, SolitonError> {
    if !(v.abs() < 1.0) {
        return Err(SolitonError::Velocity(v));
    }
    let alpha = (1.0 - v * v).sqrt();
    let one = Complex64::new(1.0, 0.0);
    #[rustfmt::skip]
    let base = Matrix4::new(
        ZERO, ZERO, I,   one,
        ZERO, ZERO, one, -I,
        -I,   one,  ZERO, ZERO,
        one,  I,    ZERO, ZERO,
    );
    let matrix = base * Complex64::new(alpha, 0.0);
    let eig = SymmetricEigen::new(matrix);
    let mut eigenvalues = [eig.eigenvalues[0], eig.eigenvalues[1], eig.eigenvalues[2], eig.eigenvalues[3]];
    eigenvalues.sort_by(f64::total_cmp);
    Ok(RankFourLax { velocity: v, alpha, matrix, eigenvalues })
}

/// `[H, m]u = H(mu) − m Hu` at `x` by quadrature.
pub fn commutator_quadrature<M, U>(quad: &LineQuadrature, m: M, u: U, x: f64) -> f64
where
    M: Fn(f64) -> f64,
    U: Fn(f64) -> f64,
{
    quad.hilbert(|y| m(y) * u(y), x) - m(x) * quad.hilbert(&u, x)
}

/// Largest deviation over `xs` of the quadrature commutators from
/// `[H, f]φ = −ψ`, `[H, f]ψ = −φ`, `[H, g]φ = φ` and `[H, g]ψ = −ψ`.
pub fn commutator_check(quad: &LineQuadrature, xs: &[f64]) -> f64 {
    xs.iter()
        .map(|&x| {
            let (p, q) = (phi(x), psi(x));
            [
                commutator_quadrature(quad, f_component, phi, x) + q,
                commutator_quadrature(quad, f_component, psi, x) + p,
                commutator_quadrature(quad, g_component, phi, x) - p,
                commutator_quadrature(quad, g_component, psi, x) + q,
            ]
            .iter()
            .fold(0.0_f64, |m, e| m.max(e.abs()))
        })
        .fold(0.0, f64::max)
}

/// Real-line Lax operator `[H, μ_Q]` of a profile, transported to the circle by
/// `x = tan(θ/2)` and truncated to modes `|k| ≤ truncation`.
///
/// The transport is unitary and turns multiplication by `Q` into multiplication
/// by `q(θ) = Q(tan(θ/2))`, while the real-line Hilbert transform becomes
/// `−i` on modes `k ≥ 0` and `+i` on `k < 0`. Block `(k, l)` is therefore
/// `−i(s(k) − s(l)) σ·q̂(k − l)` with `s = +1` on `k ≥ 0` and `−1` below.
/// `samples` grid points resolve `q̂`; it must exceed `2·truncation + 2`.
pub fn real_line_lax(profile: &BlaschkeProfile, truncation: usize, samples: usize) -> Result<DMatrix<Complex64>, SolitonError> {
    if truncation == 0 {
        return Err(LaxError::ZeroTruncation.into());
    }
    if truncation + 1 > samples / 2 {
        return Err(LaxError::TruncationTooLarge { m: truncation, n: samples }.into());
    }
    let ops = SpectralOps::new(samples).map_err(LaxError::from)?;
    let values: Vec<Vec3> = grid_points(samples)
        .iter()
        .map(|&t| {
            let c = (t / 2.0).cos();
            if c.abs() < 1e-15 {
                profile.limit()
            } else {
                profile_eval(profile, (t / 2.0).sin() / c)
            }
        })
        .collect();
    let coeffs = lax::vector_coefficients(&ops, &values).map_err(LaxError::from)?;
    let s = |k: i64| if k >= 0 { 1.0 } else { -1.0 };
    Ok(lax::assemble(Target::Sphere, &coeffs, truncation, |k, l| Complex64::new(0.0, -(s(k) - s(l)))))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolitonReport {
    pub velocity: f64,
    pub degree: usize,
    pub energy: f64,
    pub residual_max: f64,
    /// All four eigenvalues of the rank-four matrix for degree one; the
    /// non-negligible eigenvalues of the transported real-line operator otherwise.
    pub lax_eigenvalues: Vec<f64>,
    pub trace_sq: f64,
}

/// Truncation and sampling of the transported operator in [`soliton_report`].
pub const REPORT_TRUNCATION: usize = 48;
pub const REPORT_SAMPLES: usize = 512;

pub fn soliton_report(profile: &BlaschkeProfile) -> Result<SolitonReport, SolitonError> {
    let xs = sample_grid(20.0, 401);
    let residual_max = profile_residual(profile, &xs);
    let (lax_eigenvalues, trace_sq) = match profile.degree() {
        0 => (Vec::new(), 0.0),
        1 if profile.zeros()[0] == I => {
            let r = rank_four_lax(profile.velocity())?;
            (r.eigenvalues.to_vec(), r.trace_sq())
        }
        _ => {
            let l = real_line_lax(profile, REPORT_TRUNCATION, REPORT_SAMPLES)?;
            let eig = lax::hermitian_eigenvalues(&l)?;
            let top = eig.iter().map(|e| e.abs()).fold(0.0, f64::max);
            let kept = eig.into_iter().filter(|e| e.abs() > lax::DEFAULT_RANK_TOLERANCE * top).collect();
            (kept, l.iter().map(|z| z.norm_sqr()).sum())
        }
    };
    Ok(SolitonReport {
        velocity: profile.velocity(),
        degree: profile.degree(),
        energy: profile_energy(profile),
        residual_max,
        lax_eigenvalues,
        trace_sq,
    })
}

/// Parse `i`, `-2i`, `1.5`, `0.5+2i`, `-1-0.25i`, `1e-3+1i` and friends.
pub fn parse_complex(text: &str) -> Result<Complex64, SolitonError> {
    let err = || SolitonError::Parse(text.to_string());
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(err());
    }
    let Some(body) = s.strip_suffix('i') else {
        return s.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| err());
    };
    // split at the last sign that is not the leading sign or part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => other.parse::<f64>().map_err(|_| err())?,
    };
    let re = re.parse::<f64>().map_err(|_| err())?;
    Ok(Complex64::new(re, im))
}

/// Comma-separated list of [`parse_complex`] values.
pub fn parse_zeros(text: &str) -> Result<Vec<Complex64>, SolitonError> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',').map(parse_complex).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(BlaschkeProfile::new(1.0, vec![]), Err(SolitonError::Velocity(_))));
        assert!(matches!(BlaschkeProfile::new(-1.2, vec![]), Err(SolitonError::Velocity(_))));
        assert!(matches!(BlaschkeProfile::new(0.0, vec![c(0.0, -1.0)]), Err(SolitonError::Zero { index: 0, .. })));
        assert!(matches!(BlaschkeProfile::new(0.0, vec![I, c(1.0, 0.0)]), Err(SolitonError::Zero { index: 1, .. })));
        assert!(rank_four_lax(1.0).is_err());
    }

    #[test]
    fn empty_product_is_one() {
        let p = BlaschkeProfile::new(0.3, vec![]).unwrap();
        for x in [-3.0, 0.0, 7.5] {
            assert_eq!(blaschke_eval(&p, x), c(1.0, 0.0));
        }
        assert_eq!(profile_energy(&p), 0.0);
        assert_eq!(profile_residual(&p, &sample_grid(10.0, 50)), 0.0);
    }

    #[test]
    fn degree_one_matches_rational_components() {
        let p = BlaschkeProfile::degree_one(0.0).unwrap();
        for x in sample_grid(30.0, 301) {
            let b = blaschke_eval(&p, x);
            let expect = c(x * x - 1.0, -2.0 * x) / (1.0 + x * x);
            assert!((b - expect).norm() < 1e-15);
            assert!((b.re - f_component(x)).abs() < 1e-15 && (b.im - g_component(x)).abs() < 1e-15);
        }
        let q = profile_eval(&p, 0.0);
        assert!((q - Vec3::new(-1.0, 0.0, 0.0)).max_abs() < 1e-15);
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let p = BlaschkeProfile::new(0.2, vec![c(0.3, 0.7), c(-1.0, 2.0)]).unwrap();
        for x in [-2.0, 0.1, 3.3] {
            let h = 1e-6;
            let fd = (blaschke_eval(&p, x + h) - blaschke_eval(&p, x - h)) / (2.0 * h);
            assert!((fd - blaschke_derivative(&p, x)).norm() < 1e-8);
        }
    }

    #[test]
    fn degree_one_halfwave_partial_fractions() {
        // |∇|f = −2(1 − x²)/(1 + x²)² = g' and |∇|g = −4x/(1 + x²)² = −f'
        let p = BlaschkeProfile::degree_one(0.0).unwrap();
        for x in sample_grid(10.0, 101) {
            let d = 1.0 + x * x;
            let hq = profile_halfwave(&p, x);
            assert!((hq[0] + 2.0 * (1.0 - x * x) / (d * d)).abs() < 1e-15);
            assert!((hq[1] + 4.0 * x / (d * d)).abs() < 1e-15);
        }
    }

    #[test]
    fn degree_one_residual_vanishes() {
        let p = BlaschkeProfile::degree_one(0.5).unwrap();
        assert!(profile_residual(&p, &sample_grid(50.0, 1000)) <= 1e-12);
    }

    #[test]
    fn mismatched_velocity_is_detected() {
        let p = BlaschkeProfile::degree_one(0.5).unwrap();
        let r = residual_with_velocity(&p, 0.45, &sample_grid(10.0, 201), ResidualMethod::ClosedForm);
        assert!(r > 1e-2, "{r}");
    }

    #[test]
    fn quadrature_halfwave_matches_closed_form() {
        let quad = LineQuadrature::default();
        let p = BlaschkeProfile::degree_one(0.0).unwrap();
        for x in [-5.0, -0.5, 0.0, 0.7, 3.0] {
            let q = quad.halfwave(f_component, x, 1.0);
            let expect = profile_halfwave(&p, x)[0];
            assert!((q - expect).abs() < 1e-6, "x = {x}: {q} vs {expect}");
        }
    }

    #[test]
    fn quadrature_hilbert_closed_forms() {
        // H[1/(1 + x²)] = x/(1 + x²) and H[x/(1 + x²)] = −1/(1 + x²)
        let quad = LineQuadrature::default();
        for x in [-4.0, 0.0, 0.3, 2.0] {
            assert!((quad.hilbert(phi, x) - psi(x)).abs() < 1e-6);
            assert!((quad.hilbert(psi, x) + phi(x)).abs() < 1e-6);
        }
    }

    #[test]
    fn higher_degree_residual_by_quadrature() {
        let p = BlaschkeProfile::new(0.3, vec![c(0.0, 1.0), c(1.5, 0.5)]).unwrap();
        let xs = sample_grid(8.0, 41);
        assert!(profile_residual(&p, &xs) < 1e-5);
        assert!(residual_with_velocity(&p, 0.3, &xs, ResidualMethod::ClosedForm) < 1e-13);
    }

    #[test]
    fn energy_values() {
        assert!((profile_energy(&BlaschkeProfile::degree_one(0.0).unwrap()) - PI).abs() < 1e-15);
        let p = BlaschkeProfile::new(0.5, vec![I, c(1.0, 2.0)]).unwrap();
        assert!((profile_energy(&p) - 1.5 * PI).abs() < 1e-14);
    }

    #[test]
    fn energy_quadrature_within_one_percent() {
        let profiles = [
            BlaschkeProfile::degree_one(0.0).unwrap(),
            BlaschkeProfile::new(0.5, vec![I, c(1.0, 2.0)]).unwrap(),
            BlaschkeProfile::new(0.2, vec![c(-1.0, 0.5), I, c(2.0, 1.0)]).unwrap(),
        ];
        for p in &profiles {
            let exact = profile_energy(p);
            let q = profile_energy_quadrature(p, DEFAULT_HALF_WIDTH, 800).unwrap();
            assert!((q - exact).abs() <= 0.01 * exact, "m = {}: {q} vs {exact}", p.degree());
            assert!(q < exact);
        }
    }

    #[test]
    fn orthonormal_basis() {
        let ip = |a: &dyn Fn(f64) -> f64, b: &dyn Fn(f64) -> f64| {
            real_line_integral(|x| a(x) * b(x), DEFAULT_HALF_WIDTH, 200_000)
        };
        assert!((ip(&phi, &phi) - 1.0).abs() <= 1e-6);
        assert!((ip(&psi, &psi) - 1.0).abs() <= 1e-6);
        assert!(ip(&phi, &psi).abs() <= 1e-6);
    }

    #[test]
    fn rank_four_structure() {
        let r = rank_four_lax(0.0).unwrap();
        let expect = [-2.0, 0.0, 0.0, 2.0];
        for (a, b) in r.eigenvalues.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(r.hermitian_defect() == 0.0);
        assert!(r.trace().norm() == 0.0);
        assert!((r.trace_sq() - 8.0).abs() < 1e-14);
    }

    #[test]
    fn commutator_formulas_by_quadrature() {
        let err = commutator_check(&LineQuadrature::default(), &sample_grid(10.0, 41));
        assert!(err <= 1e-4, "{err}");
    }

    #[test]
    fn transported_lax_degree_one_matches_rank_four() {
        for v in [0.0, 0.6] {
            let p = BlaschkeProfile::degree_one(v).unwrap();
            let l = real_line_lax(&p, 8, 64).unwrap();
            let eig = lax::hermitian_eigenvalues(&l).unwrap();
            let alpha = p.alpha();
            assert!((eig[0] + 2.0 * alpha).abs() < 1e-12);
            assert!((eig[eig.len() - 1] - 2.0 * alpha).abs() < 1e-12);
            assert!(eig[1..eig.len() - 1].iter().all(|e| e.abs() < 1e-12));
            let tr: f64 = l.iter().map(|z| z.norm_sqr()).sum();
            assert!((tr - 8.0 * alpha * alpha).abs() < 1e-12);
        }
    }

    #[test]
    fn transported_lax_trace_tracks_energy() {
        // Tr|L|² = (8/π) E = 8(1 − v²) m
        let p = BlaschkeProfile::new(0.4, vec![c(0.5, 1.0), c(-1.0, 0.8)]).unwrap();
        let l = real_line_lax(&p, 48, 512).unwrap();
        let tr: f64 = l.iter().map(|z| z.norm_sqr()).sum();
        let expect = 8.0 / PI * profile_energy(&p);
        assert!((tr - expect).abs() < 1e-8 * expect, "{tr} vs {expect}");
    }

    #[test]
    fn report_for_degree_one() {
        let r = soliton_report(&BlaschkeProfile::degree_one(0.6).unwrap()).unwrap();
        assert_eq!(r.lax_eigenvalues.len(), 4);
        assert!((r.trace_sq - 8.0 * 0.64).abs() < 1e-12);
        assert!(r.residual_max < 1e-12);
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(serde_json::from_str::<SolitonReport>(&json).unwrap(), r);
    }

    #[test]
    fn parses_complex_numbers() {
        assert_eq!(parse_complex("i").unwrap(), I);
        assert_eq!(parse_complex("-2i").unwrap(), c(0.0, -2.0));
        assert_eq!(parse_complex("0.5+2i").unwrap(), c(0.5, 2.0));
        assert_eq!(parse_complex("-1-0.25i").unwrap(), c(-1.0, -0.25));
        assert_eq!(parse_complex("1e-3+1e1i").unwrap(), c(1e-3, 10.0));
        assert_eq!(parse_complex(" 3 ").unwrap(), c(3.0, 0.0));
        assert!(parse_complex("abc").is_err());
        assert_eq!(parse_zeros("i, 1+2i").unwrap(), vec![I, c(1.0, 2.0)]);
        assert!(parse_zeros("").unwrap().is_empty());
    }

    proptest! {
        #[test]
        fn blaschke_has_unit_modulus(
            x in -1e3..1e3f64,
            zeros in prop::collection::vec((-5.0..5.0f64, 0.05..5.0f64), 0..5),
        ) {
            let p = BlaschkeProfile::new(0.0, zeros.iter().map(|&(a, b)| c(a, b)).collect()).unwrap();
            prop_assert!((blaschke_eval(&p, x).norm() - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn profile_is_unit_with_fixed_third_component(x in -1e3..1e3f64, v in -0.99..0.99f64, a in -3.0..3.0f64, b in 0.1..3.0f64) {
            let p = BlaschkeProfile::new(v, vec![c(a, b)]).unwrap();
            let q = profile_eval(&p, x);
            prop_assert!((q.norm() - 1.0).abs() <= 1e-12);
            prop_assert_eq!(q[2], v);
        }

        #[test]
        fn closed_form_residual_vanishes_for_any_degree(
            v in -0.95..0.95f64,
            zeros in prop::collection::vec((-3.0..3.0f64, 0.2..3.0f64), 1..4),
        ) {
            let p = BlaschkeProfile::new(v, zeros.iter().map(|&(a, b)| c(a, b)).collect()).unwrap();
            let r = residual_with_velocity(&p, v, &sample_grid(10.0, 21), ResidualMethod::ClosedForm);
            prop_assert!(r < 1e-12);
        }

        #[test]
        fn rank_four_eigenvalues_scale_with_alpha(v in -0.99..0.99f64) {
            let r = rank_four_lax(v).unwrap();
            let e = r.eigenvalues;
            prop_assert!((e[0] + e[3]).abs() < 1e-12 && (e[1] + e[2]).abs() < 1e-12);
            prop_assert!((e[3] - 2.0 * r.alpha).abs() < 1e-12);
            prop_assert!((r.trace_sq() - 8.0 * r.alpha * r.alpha).abs() < 1e-12);
        }
    }
}
