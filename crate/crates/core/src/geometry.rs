//! Three-vector algebra for the sphere and pseudosphere targets, together
//! with the two 2×2 matrix representations (Pauli for 𝔰𝔲(2), ρ-matrices
//! for 𝔰𝔲(1,1)).

use std::ops::{Add, AddAssign, Index, Mul, Neg, Sub};

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Hermitian, traceless image of a real vector under `X ↦ X·σ`.
pub type PauliImage = Matrix2<Complex64>;
/// Image of a vector under `X ↦ X·ρ`.
pub type Su11Image = Matrix2<Complex64>;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Vec3(pub [f64; 3]);

impl From<[f64; 3]> for Vec3 {
    fn from(a: [f64; 3]) -> Self {
        Vec3(a)
    }
}

impl From<Vec3> for [f64; 3] {
    fn from(v: Vec3) -> Self {
        v.0
    }
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3([0.0; 3]);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3([x, y, z])
    }

    pub fn dot(self, other: Vec3) -> f64 {
        self.0[0] * other.0[0] + self.0[1] * other.0[1] + self.0[2] * other.0[2]
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn max_abs(self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, c| m.max(c.abs()))
    }

    pub fn is_finite(self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }
}

impl Index<usize> for Vec3 {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3([-self.0[0], -self.0[1], -self.0[2]])
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3([self.0[0] * s, self.0[1] * s, self.0[2] * s])
    }
}

impl Mul<Vec3> for f64 {
    type Output = Vec3;
    fn mul(self, v: Vec3) -> Vec3 {
        v * self
    }
}

/// Euclidean cross product `a ∧ b`.
pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    let [a1, a2, a3] = a.0;
    let [b1, b2, b3] = b.0;
    Vec3([a2 * b3 - a3 * b2, a3 * b1 - a1 * b3, a1 * b2 - a2 * b1])
}

/// Minkowski inner product with signature (−, +, +).
pub fn eta_dot(a: Vec3, b: Vec3) -> f64 {
    -a.0[0] * b.0[0] + a.0[1] * b.0[1] + a.0[2] * b.0[2]
}

/// `η(a ∧ b)`: the Euclidean cross product with its first component negated.
pub fn eta_cross(a: Vec3, b: Vec3) -> Vec3 {
    let c = cross(a, b);
    Vec3([-c.0[0], c.0[1], c.0[2]])
}

/// `a·σ = [[a₃, a₁ − i a₂], [a₁ + i a₂, −a₃]]`.
pub fn pauli_map(a: Vec3) -> PauliImage {
    pauli_map_complex(a.0.map(Complex64::from))
}

/// `a·ρ = [[i a₁, a₂ + i a₃], [a₂ − i a₃, −i a₁]]`.
pub fn su11_map(a: Vec3) -> Su11Image {
    su11_map_complex(a.0.map(Complex64::from))
}

/// Pauli map extended complex-linearly; used on Fourier coefficients of a field.
pub fn pauli_map_complex(a: [Complex64; 3]) -> PauliImage {
    let [a1, a2, a3] = a;
    Matrix2::new(a3, a1 - I * a2, a1 + I * a2, -a3)
}

/// ρ-map extended complex-linearly.
pub fn su11_map_complex(a: [Complex64; 3]) -> Su11Image {
    let [a1, a2, a3] = a;
    Matrix2::new(I * a1, a2 + I * a3, a2 - I * a3, -I * a1)
}

/// Target manifold of a spin field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    /// Unit sphere 𝕊², matrix representation via Pauli matrices.
    Sphere,
    /// Upper sheet of the pseudosphere ℍ², matrix representation via ρ-matrices.
    Hyperbolic,
}

impl Target {
    pub fn matrix_map(self, a: [Complex64; 3]) -> Matrix2<Complex64> {
        match self {
            Target::Sphere => pauli_map_complex(a),
            Target::Hyperbolic => su11_map_complex(a),
        }
    }

    /// Target-appropriate inner product.
    pub fn inner(self, a: Vec3, b: Vec3) -> f64 {
        match self {
            Target::Sphere => a.dot(b),
            Target::Hyperbolic => eta_dot(a, b),
        }
    }

    /// Target-appropriate cross product.
    pub fn wedge(self, a: Vec3, b: Vec3) -> Vec3 {
        match self {
            Target::Sphere => cross(a, b),
            Target::Hyperbolic => eta_cross(a, b),
        }
    }

    /// Value of `inner(s, s)` on the constraint manifold.
    pub fn constraint_value(self) -> f64 {
        match self {
            Target::Sphere => 1.0,
            Target::Hyperbolic => -1.0,
        }
    }
}

impl std::fmt::Display for Target {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Target::Sphere => write!(f, "sphere"),
            Target::Hyperbolic => write!(f, "hyperbolic"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const TOL: f64 = 1e-13;

    fn max_entry_diff(a: &Matrix2<Complex64>, b: &Matrix2<Complex64>) -> f64 {
        (a - b).iter().fold(0.0_f64, |m, z| m.max(z.norm()))
    }

    fn vec3() -> impl Strategy<Value = Vec3> {
        prop::array::uniform3(-1.0..1.0_f64).prop_map(Vec3)
    }

    #[test]
    fn cross_basis() {
        let e1 = Vec3::new(1.0, 0.0, 0.0);
        let e2 = Vec3::new(0.0, 1.0, 0.0);
        assert_eq!(cross(e1, e2), Vec3::new(0.0, 0.0, 1.0));
        assert_eq!(cross(e2, e1), Vec3::new(0.0, 0.0, -1.0));
        assert_eq!(cross(e1, e1), Vec3::ZERO);
    }

    #[test]
    fn eta_products() {
        let e1 = Vec3::new(1.0, 0.0, 0.0);
        let e2 = Vec3::new(0.0, 1.0, 0.0);
        let e3 = Vec3::new(0.0, 0.0, 1.0);
        assert_eq!(eta_dot(e1, e1), -1.0);
        assert_eq!(eta_dot(e2, e2), 1.0);
        assert_eq!(eta_dot(Vec3::new(1.0, 1.0, 0.0), Vec3::new(1.0, 0.0, 1.0)), -1.0);
        assert_eq!(eta_cross(e1, e2), e3);
        assert_eq!(eta_cross(e2, e3), Vec3::new(-1.0, 0.0, 0.0));
        assert_eq!(eta_cross(e2, e2), Vec3::ZERO);
    }

    #[test]
    fn pauli_basis_products() {
        let s3 = pauli_map(Vec3::new(0.0, 0.0, 1.0));
        assert_eq!(s3, Matrix2::new(1.0.into(), 0.0.into(), 0.0.into(), (-1.0).into()));
        let prod = pauli_map(Vec3::new(1.0, 0.0, 0.0)) * pauli_map(Vec3::new(0.0, 1.0, 0.0));
        assert!(max_entry_diff(&prod, &(s3 * I)) < TOL);
    }

    #[test]
    fn rho_one_squares_to_minus_identity() {
        let r1 = su11_map(Vec3::new(1.0, 0.0, 0.0));
        let id = Matrix2::<Complex64>::identity();
        assert!(max_entry_diff(&(r1 * r1), &(-id)) < TOL);
        // ρ₁ is the diagonal generator
        assert_eq!(r1[(0, 1)], Complex64::new(0.0, 0.0));
    }

    proptest! {
        #[test]
        fn pauli_product_rule(a in vec3(), b in vec3()) {
            let lhs = pauli_map(a) * pauli_map(b);
            let rhs = Matrix2::identity() * Complex64::from(a.dot(b)) + pauli_map(cross(a, b)) * I;
            prop_assert!(max_entry_diff(&lhs, &rhs) < TOL);
        }

        #[test]
        fn su11_product_rule(a in vec3(), b in vec3()) {
            let lhs = su11_map(a) * su11_map(b);
            let rhs = Matrix2::identity() * Complex64::from(eta_dot(a, b)) + su11_map(eta_cross(a, b));
            prop_assert!(max_entry_diff(&lhs, &rhs) < TOL);
        }

        #[test]
        fn pauli_image_hermitian_traceless(a in vec3()) {
            let m = pauli_map(a);
            prop_assert!(max_entry_diff(&m, &m.adjoint()) < TOL);
            prop_assert!(m.trace().norm() < TOL);
        }

        #[test]
        fn unit_vectors_square_to_identity(a in vec3()) {
            prop_assume!(a.norm() > 1e-3);
            let u = a * (1.0 / a.norm());
            let m = pauli_map(u);
            prop_assert!(max_entry_diff(&(m * m), &Matrix2::identity()) < TOL);
            // and a non-unit vector does not
            let w = u * 1.5;
            let mw = pauli_map(w);
            prop_assert!(max_entry_diff(&(mw * mw), &Matrix2::identity()) > 0.1);
        }

        #[test]
        fn pseudo_unit_vectors_square_to_minus_identity(x2 in -3.0..3.0_f64, x3 in -3.0..3.0_f64) {
            let x1 = (1.0 + x2 * x2 + x3 * x3).sqrt();
            let s = Vec3::new(x1, x2, x3);
            prop_assert!((eta_dot(s, s) + 1.0).abs() < 1e-12);
            let m = su11_map(s);
            // entries scale with |s|², so compare relative to that
            let scale = 1.0 + s.norm_sq();
            prop_assert!(max_entry_diff(&(m * m), &(-Matrix2::identity())) < TOL * scale);
        }

        #[test]
        fn eta_cross_antisymmetric_and_eta_orthogonal(a in vec3(), b in vec3()) {
            prop_assert_eq!(eta_cross(a, b), -eta_cross(b, a));
            prop_assert!(eta_dot(a, eta_cross(a, b)).abs() < TOL);
            prop_assert!(eta_dot(b, eta_cross(a, b)).abs() < TOL);
        }

        #[test]
        fn cross_orthogonal(a in vec3(), b in vec3()) {
            let c = cross(a, b);
            prop_assert!(c.dot(a).abs() < TOL && c.dot(b).abs() < TOL);
            prop_assert_eq!(c, -cross(b, a));
        }
    }
}
