//! Classical Haldane-Shastry chain on `x_k = 2πk/N`:
//!
//! ```text
//! H = Σ_{j<k} (1 − S_j·S_k) / sin²((x_j − x_k)/2)
//! dS_k/dt = S_k ∧ Σ_{j≠k} (S_k − S_j) / sin²((x_j − x_k)/2)
//! ```
//!
//! The lattice sum is a circular convolution with `w_d = 1/sin²(πd/N)`, which
//! [`ChainForce`] evaluates with FFTs in `O(N log N)`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::evolution::{self, sup_distance, EvolutionError};
use crate::field::{project_all, ConstrainedField, FieldError, SpinField};
use crate::geometry::{cross, Vec3};
use crate::initial::{InitialCondition, InitialError};
use crate::integrate::{advance, Scheme, StepError};
use crate::spectral::{SpectralError, SpectralOps};

#[derive(Debug, Error)]
pub enum ChainError {
    #[error("chain needs at least 2 sites, got {0}")]
    TooFewSites(usize),
    #[error("chain has {actual} sites but the force plan was built for {expected}")]
    SizeMismatch { expected: usize, actual: usize },
    #[error("site {index} is not a unit vector (defect {defect:.3e})")]
    NotUnit { index: usize, defect: f64 },
    #[error("time step must be finite and non-zero, got {0}")]
    InvalidTimeStep(f64),
    #[error("final time must be positive and finite, got {0}")]
    InvalidFinalTime(f64),
    #[error("record interval must be at least 1")]
    InvalidRecordInterval,
    #[error("implicit solver did not converge after {iterations} iterations (last update {update:.3e})")]
    NonConvergence { iterations: usize, update: f64 },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Initial(#[from] InitialError),
    #[error(transparent)]
    Evolution(#[from] EvolutionError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

impl From<StepError<ChainError>> for ChainError {
    fn from(e: StepError<ChainError>) -> Self {
        match e {
            StepError::InvalidTimeStep(dt) => ChainError::InvalidTimeStep(dt),
            StepError::NonConvergence { iterations, update } => ChainError::NonConvergence { iterations, update },
            StepError::Rhs(e) => e,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinChain {
    sites: Vec<Vec3>,
    time: f64,
}

impl SpinChain {
    pub fn new(sites: Vec<Vec3>, time: f64) -> Result<Self, ChainError> {
        if sites.len() < 2 {
            return Err(ChainError::TooFewSites(sites.len()));
        }
        for (index, s) in sites.iter().enumerate() {
            let defect = (s.norm() - 1.0).abs();
            if !(defect <= 1e-12) {
                return Err(ChainError::NotUnit { index, defect });
            }
        }
        Ok(SpinChain { sites, time })
    }

    /// Sample a field on the lattice.
    pub fn from_field(field: &SpinField) -> Self {
        SpinChain { sites: field.values().to_vec(), time: field.time() }
    }

    pub fn sites(&self) -> &[Vec3] {
        &self.sites
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn constraint_defect(&self) -> f64 {
        self.sites.iter().map(|s| (s.norm() - 1.0).abs()).fold(0.0, f64::max)
    }

    pub fn total_spin(&self) -> Vec3 {
        self.sites.iter().fold(Vec3::ZERO, |a, s| a + *s)
    }
}

/// `w_d = 1/sin²(πd/N)` for `d = 0..N` with `w_0 = 0`.
pub fn kernel(n: usize) -> Vec<f64> {
    (0..n)
        .map(|d| {
            if d == 0 {
                0.0
            } else {
                let s = (PI * d as f64 / n as f64).sin();
                1.0 / (s * s)
            }
        })
        .collect()
}

pub fn chain_energy(chain: &SpinChain) -> f64 {
    let n = chain.len();
    let w = kernel(n);
    let s = chain.sites();
    let mut e = 0.0;
    for j in 0..n {
        for k in j + 1..n {
            e += (1.0 - s[j].dot(s[k])) * w[k - j];
        }
    }
    e
}

/// Neumaier-compensated running sum of 3-vectors.
#[derive(Debug, Clone, Copy, Default)]
struct CompensatedSum {
    sum: [f64; 3],
    carry: [f64; 3],
}

impl CompensatedSum {
    fn add(&mut self, v: Vec3) {
        for c in 0..3 {
            let (s, t) = (self.sum[c], v[c]);
            let u = s + t;
            self.carry[c] += if s.abs() >= t.abs() { (s - u) + t } else { (t - u) + s };
            self.sum[c] = u;
        }
    }

    fn value(&self) -> Vec3 {
        Vec3::new(self.sum[0] + self.carry[0], self.sum[1] + self.carry[1], self.sum[2] + self.carry[2])
    }
}

/// Force on raw site values by the O(N²) double loop.
pub fn rhs_direct_values(sites: &[Vec3]) -> Vec<Vec3> {
    let n = sites.len();
    let w = kernel(n);
    (0..n)
        .map(|k| {
            let mut field = CompensatedSum::default();
            for j in 0..n {
                if j != k {
                    field.add((sites[k] - sites[j]) * w[(k + n - j) % n]);
                }
            }
            cross(sites[k], field.value())
        })
        .collect()
}

pub fn chain_rhs_direct(chain: &SpinChain) -> Vec<Vec3> {
    rhs_direct_values(chain.sites())
}

/// Neighbours closer than this are summed directly by [`ChainForce`].
pub const NEAR_FIELD_RADIUS: usize = 32;

/// FFT plans and kernel data for one chain length.
///
/// The effective field `h_k = Σ_{j≠k} w_{k−j} (S_k − S_j)` is split by lattice
/// distance. Pairs with `min(d, N − d) ≤ NEAR_FIELD_RADIUS` carry almost all of
/// the kernel weight and are summed directly. The remaining far kernel is
/// smooth and small, so its contribution goes through the FFT as the Fourier
/// multiplier `W_far − ŵ_far(p)` with little rounding.
#[derive(Clone)]
pub struct ChainForce {
    n: usize,
    near: Vec<(usize, f64)>,
    far_symbol: Option<Vec<f64>>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for ChainForce {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ChainForce").field("n", &self.n).field("near", &self.near.len()).finish()
    }
}

impl ChainForce {
    pub fn new(n: usize) -> Result<Self, ChainError> {
        if n < 2 {
            return Err(ChainError::TooFewSites(n));
        }
        let w = kernel(n);
        let is_near = |d: usize| d.min(n - d) <= NEAR_FIELD_RADIUS;
        let near = (1..n).filter(|&d| is_near(d)).map(|d| (d, w[d])).collect();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let far: Vec<f64> = (0..n).map(|d| if d == 0 || is_near(d) { 0.0 } else { w[d] }).collect();
        let far_symbol = far.iter().any(|&x| x != 0.0).then(|| {
            let total: f64 = far.iter().sum();
            let mut buf: Vec<Complex64> = far.iter().map(|&x| Complex64::new(x, 0.0)).collect();
            forward.process(&mut buf);
            // the far kernel is real and even, so its transform is real
            buf.iter().map(|z| (total - z.re) / n as f64).collect()
        });
        Ok(ChainForce { n, near, far_symbol, forward, inverse })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `W = Σ_{d=1}^{N−1} w_d = (N² − 1)/3`.
    pub fn kernel_sum(&self) -> f64 {
        (self.n * self.n - 1) as f64 / 3.0
    }

    /// Effective field `Σ_{j≠k} w_{k−j} (S_k − S_j)` at every site.
    pub fn local_field(&self, sites: &[Vec3]) -> Result<Vec<Vec3>, ChainError> {
        let n = self.n;
        if sites.len() != n {
            return Err(ChainError::SizeMismatch { expected: n, actual: sites.len() });
        }
        let mut far = vec![Vec3::ZERO; n];
        if let Some(symbol) = &self.far_symbol {
            // x and y packed into one complex transform; the symbol is real and even
            let mut xy: Vec<Complex64> = sites.iter().map(|s| Complex64::new(s[0], s[1])).collect();
            let mut z: Vec<Complex64> = sites.iter().map(|s| Complex64::new(s[2], 0.0)).collect();
            for buf in [&mut xy, &mut z] {
                self.forward.process(buf);
                buf.iter_mut().zip(symbol).for_each(|(c, w)| *c *= *w);
                self.inverse.process(buf);
            }
            far = xy.iter().zip(&z).map(|(a, b)| Vec3::new(a.re, a.im, b.re)).collect();
        }
        Ok((0..n)
            .map(|k| {
                let mut h = CompensatedSum::default();
                h.add(far[k]);
                for &(d, w) in &self.near {
                    h.add((sites[k] - sites[(k + n - d) % n]) * w);
                }
                h.value()
            })
            .collect())
    }

    /// Same force as [`rhs_direct_values`] in `O(N log N)`.
    pub fn rhs_values(&self, sites: &[Vec3]) -> Result<Vec<Vec3>, ChainError> {
        let h = self.local_field(sites)?;
        Ok(sites.iter().zip(&h).map(|(s, h)| cross(*s, *h)).collect())
    }

    pub fn rhs(&self, chain: &SpinChain) -> Result<Vec<Vec3>, ChainError> {
        self.rhs_values(chain.sites())
    }
}

pub fn chain_rhs_fft(chain: &SpinChain) -> Result<Vec<Vec3>, ChainError> {
    ChainForce::new(chain.len())?.rhs(chain)
}

pub fn chain_step(force: &ChainForce, chain: &SpinChain, dt: f64, scheme: Scheme) -> Result<SpinChain, ChainError> {
    chain_step_scaled(force, chain, dt, 1.0, scheme)
}

/// Step of `dS/dt = rate · F(S)`; `rate = 1/(2N)` gives the continuum time scale.
fn chain_step_scaled(force: &ChainForce, chain: &SpinChain, dt: f64, rate: f64, scheme: Scheme) -> Result<SpinChain, ChainError> {
    let next = advance(chain.sites(), dt, scheme, |u| {
        force.rhs_values(u).map(|f| f.into_iter().map(|v| v * rate).collect())
    })?;
    let sites = project_all::<SpinField>(&next)?;
    Ok(SpinChain { sites, time: chain.time + dt })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainDiagnostics {
    pub time: f64,
    pub energy: f64,
    pub total_spin: Vec3,
    pub constraint_defect: f64,
}

impl ChainDiagnostics {
    pub fn of(chain: &SpinChain) -> Self {
        ChainDiagnostics {
            time: chain.time(),
            energy: chain_energy(chain),
            total_spin: chain.total_spin(),
            constraint_defect: chain.constraint_defect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainRunSettings {
    pub dt: f64,
    pub t_final: f64,
    pub record_interval: usize,
    pub scheme: Scheme,
}

pub fn chain_run(initial: SpinChain, settings: &ChainRunSettings) -> Result<(Vec<ChainDiagnostics>, SpinChain), ChainError> {
    if !(settings.dt.is_finite() && settings.dt > 0.0) {
        return Err(ChainError::InvalidTimeStep(settings.dt));
    }
    if !(settings.t_final.is_finite() && settings.t_final > 0.0) {
        return Err(ChainError::InvalidFinalTime(settings.t_final));
    }
    if settings.record_interval == 0 {
        return Err(ChainError::InvalidRecordInterval);
    }
    let force = ChainForce::new(initial.len())?;
    let steps = ((settings.t_final / settings.dt).round() as usize).max(1);
    let dt = settings.t_final / steps as f64;
    let mut chain = initial;
    let mut out = vec![ChainDiagnostics::of(&chain)];
    for i in 1..=steps {
        chain = chain_step(&force, &chain, dt, settings.scheme)?;
        chain.time = i as f64 * dt;
        if i % settings.record_interval == 0 || i == steps {
            out.push(ChainDiagnostics::of(&chain));
        }
    }
    Ok((out, chain))
}

/// Continuum rescaling: chain time `τ` and field time `t` are related by `t = 2N τ`.
pub fn continuum_rate(n: usize) -> f64 {
    1.0 / (2.0 * n as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub n: usize,
    pub error: f64,
}

/// Deviation of the rescaled chain from the field equation at time `t_final`.
///
/// The chain is integrated in its own time `τ = t/(2N)`, with `dt` given in
/// field time. The reference is the family's closed-form solution when it has
/// one, otherwise a pseudo-spectral solve on the same lattice.
pub fn continuum_compare(
    initial: &InitialCondition,
    sizes: &[usize],
    t_final: f64,
    dt: f64,
    seed: u64,
) -> Result<Vec<CompareRow>, ChainError> {
    if !(t_final.is_finite() && t_final > 0.0) {
        return Err(ChainError::InvalidFinalTime(t_final));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(ChainError::InvalidTimeStep(dt));
    }
    let steps = ((t_final / dt).round() as usize).max(1);
    let dt = t_final / steps as f64;
    sizes
        .iter()
        .map(|&n| {
            let field = initial.sphere_field(n, seed)?;
            let force = ChainForce::new(n)?;
            let rate = continuum_rate(n);
            let mut chain = SpinChain::from_field(&field);
            // stepping dS/dt = F/(2N) in field time equals stepping the chain in τ
            for _ in 0..steps {
                chain = chain_step_scaled(&force, &chain, dt, rate, Scheme::Rk4)?;
            }
            let reference = match initial.exact_samples(n, t_final, seed).filter(|_| !matches!(initial, InitialCondition::RandomBandLimited { .. })) {
                Some(exact) => exact,
                None => {
                    let ops = SpectralOps::new(n)?;
                    evolution::integrate(&ops, &field, dt, steps, Scheme::Rk4)?.values().to_vec()
                }
            };
            Ok(CompareRow { n, error: sup_distance(chain.sites(), &reference) })
        })
        .collect()
}

/// `max|dS/dτ| / (2N · max|S ∧ |∇|S|)` on the lattice sampling of a field.
pub fn rescaling_ratio(field: &SpinField) -> Result<f64, ChainError> {
    let n = field.len();
    let chain = SpinChain::from_field(field);
    let chain_rate = ChainForce::new(n)?.rhs(&chain)?;
    let ops = SpectralOps::new(n)?;
    let pde_rate = evolution::hwm_rhs(&ops, field)?;
    let top = chain_rate.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let bottom = pde_rate.iter().map(|v| v.norm()).fold(0.0, f64::max);
    Ok(top / (2.0 * n as f64 * bottom))
}

/// Least-squares fit of `c` in `dS/dτ ≈ c · 2N · S ∧ |∇|S`.
pub fn fitted_rescaling(field: &SpinField) -> Result<f64, ChainError> {
    let n = field.len();
    let chain_rate = ChainForce::new(n)?.rhs(&SpinChain::from_field(field))?;
    let ops = SpectralOps::new(n)?;
    let pde_rate: Vec<Vec3> = evolution::hwm_rhs(&ops, field)?.into_iter().map(|v| v * (2.0 * n as f64)).collect();
    let num: f64 = chain_rate.iter().zip(&pde_rate).map(|(a, b)| a.dot(*b)).sum();
    let den: f64 = pde_rate.iter().map(|b| b.norm_sq()).sum();
    Ok(num / den)
}

/// Wall-clock comparison of the two force evaluations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub n: usize,
    pub direct_seconds: f64,
    pub fft_seconds: f64,
    pub speedup: f64,
    /// Largest difference between the two forces.
    pub max_difference: f64,
}

/// Best-of-`repeats` timings of [`rhs_direct_values`] and [`ChainForce::rhs_values`]
/// on a random chain of each size. Plan construction is excluded.
pub fn benchmark_forces(sizes: &[usize], repeats: usize, seed: u64) -> Result<Vec<BenchRow>, ChainError> {
    use rand::{Rng, SeedableRng};
    use std::time::Instant;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    sizes
        .iter()
        .map(|&n| {
            let sites: Vec<Vec3> = (0..n)
                .map(|_| {
                    let v = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    v * (1.0 / v.norm())
                })
                .collect();
            let force = ChainForce::new(n)?;
            let (mut direct_seconds, mut fft_seconds) = (f64::INFINITY, f64::INFINITY);
            let (mut direct, mut fast) = (Vec::new(), Vec::new());
            for _ in 0..repeats.max(1) {
                let t = Instant::now();
                direct = std::hint::black_box(rhs_direct_values(&sites));
                direct_seconds = direct_seconds.min(t.elapsed().as_secs_f64());
                let t = Instant::now();
                fast = std::hint::black_box(force.rhs_values(&sites)?);
                fft_seconds = fft_seconds.min(t.elapsed().as_secs_f64());
            }
            Ok(BenchRow {
                n,
                direct_seconds,
                fft_seconds,
                speedup: direct_seconds / fft_seconds,
                max_difference: sup_distance(&direct, &fast),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_chain(n: usize, seed: u64) -> SpinChain {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sites = (0..n)
            .map(|_| {
                let v = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                v * (1.0 / v.norm())
            })
            .collect();
        SpinChain::new(sites, 0.0).unwrap()
    }

    #[test]
    fn energy_examples() {
        let aligned = SpinChain::new(vec![Vec3::new(0.0, 0.0, 1.0); 16], 0.0).unwrap();
        assert_eq!(chain_energy(&aligned), 0.0);
        let pair = SpinChain::new(vec![Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0)], 0.0).unwrap();
        assert!((chain_energy(&pair) - 1.0).abs() < 1e-15);
        let anti = SpinChain::new(vec![Vec3::new(1.0, 0.0, 0.0), Vec3::new(-1.0, 0.0, 0.0)], 0.0).unwrap();
        assert!((chain_energy(&anti) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn rhs_pair_example() {
        let pair = SpinChain::new(vec![Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0)], 0.0).unwrap();
        let d = chain_rhs_direct(&pair);
        assert!((d[0] - Vec3::new(0.0, 0.0, -1.0)).max_abs() < 1e-15);
        assert!((d[1] - Vec3::new(0.0, 0.0, 1.0)).max_abs() < 1e-15);
        let f = chain_rhs_fft(&pair).unwrap();
        assert!(sup_distance(&d, &f) < 1e-14);
    }

    #[test]
    fn aligned_chain_has_no_force() {
        let aligned = SpinChain::new(vec![Vec3::new(0.6, 0.0, 0.8); 32], 0.0).unwrap();
        assert!(chain_rhs_direct(&aligned).iter().all(|v| v.max_abs() == 0.0));
        assert!(chain_rhs_fft(&aligned).unwrap().iter().all(|v| v.max_abs() < 1e-12));
    }

    #[test]
    fn fft_matches_direct() {
        for n in [8, 64, 512] {
            let c = random_chain(n, n as u64);
            let err = sup_distance(&chain_rhs_direct(&c), &chain_rhs_fft(&c).unwrap());
            assert!(err <= 1e-10, "N = {n}: {err}");
        }
        // forces grow like N², so larger chains are compared relative to their size
        for n in [33, 1000, 2048] {
            let c = random_chain(n, n as u64);
            let direct = chain_rhs_direct(&c);
            let scale = direct.iter().map(|v| v.norm()).fold(0.0, f64::max);
            let err = sup_distance(&direct, &chain_rhs_fft(&c).unwrap());
            assert!(err <= 1e-14 * scale, "N = {n}: {err} of {scale}");
        }
    }

    #[test]
    fn total_spin_rate_vanishes_and_force_is_tangent() {
        let c = random_chain(33 * 2, 4);
        let d = chain_rhs_direct(&c);
        let total = d.iter().fold(Vec3::ZERO, |a, v| a + *v);
        assert!(total.max_abs() < 1e-10);
        for (s, v) in c.sites().iter().zip(&d) {
            assert!(s.dot(*v).abs() < 1e-11);
        }
    }

    #[test]
    fn pair_interaction_is_antisymmetric() {
        // the (j, k) pair alone changes S_j and S_k by opposite amounts
        let c = random_chain(2, 10);
        let d = chain_rhs_direct(&c);
        assert!((d[0] + d[1]).max_abs() < 1e-15);
    }

    #[test]
    fn rejects_invalid_chains() {
        assert!(matches!(SpinChain::new(vec![Vec3::new(0.0, 0.0, 1.0)], 0.0), Err(ChainError::TooFewSites(1))));
        assert!(matches!(
            SpinChain::new(vec![Vec3::new(0.0, 0.0, 2.0); 4], 0.0),
            Err(ChainError::NotUnit { index: 0, .. })
        ));
        let force = ChainForce::new(8).unwrap();
        assert!(matches!(force.rhs(&random_chain(4, 1)), Err(ChainError::SizeMismatch { .. })));
    }

    #[test]
    fn discrete_symbol_is_two_p_times_n_minus_p() {
        // Σ_{d=1}^{N−1} (1 − cos(2πpd/N))/sin²(πd/N) = 2p(N − p)
        let n = 32;
        let w = kernel(n);
        for p in 0..n {
            let s: f64 = (1..n).map(|d| w[d] * (1.0 - (2.0 * PI * (p * d) as f64 / n as f64).cos())).sum();
            assert!((s - 2.0 * (p * (n - p)) as f64).abs() < 1e-9 * s.max(1.0), "p = {p}");
        }
    }

    #[test]
    fn aligned_chain_stays_fixed() {
        let aligned = SpinChain::new(vec![Vec3::new(0.0, 0.0, 1.0); 16], 0.0).unwrap();
        let settings = ChainRunSettings { dt: 1e-3, t_final: 0.1, record_interval: 10, scheme: Scheme::Rk4 };
        let (_, end) = chain_run(aligned.clone(), &settings).unwrap();
        assert!(sup_distance(end.sites(), aligned.sites()) < 1e-14);
    }

    #[test]
    fn constant_compare_is_exact() {
        let rows = continuum_compare(&InitialCondition::Constant { value: Some([0.0, 0.0, 1.0]) }, &[16, 32], 0.5, 1e-2, 0).unwrap();
        assert!(rows.iter().all(|r| r.error < 1e-14));
    }

    #[test]
    fn tilted_circle_rescaling_ratio() {
        // p = 1: chain symbol 2(N − 1) against 2N
        for n in [32, 256] {
            let f = InitialCondition::TiltedCircle { a: 0.6, c: 0.8 }.sphere_field(n, 0).unwrap();
            let r = rescaling_ratio(&f).unwrap();
            let expect = (n as f64 - 1.0) / n as f64;
            assert!((r - expect).abs() < 1e-12, "{r} vs {expect}");
            assert!((fitted_rescaling(&f).unwrap() - expect).abs() < 1e-12);
        }
    }
}
