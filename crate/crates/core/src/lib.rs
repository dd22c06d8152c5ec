//! Numerical toolkit for the half-wave maps equation on the circle, its
//! hyperbolic-target analogue, the classical Haldane-Shastry spin chain and
//! the traveling solitary waves of the real-line problem.

pub mod chain;
pub mod config;
pub mod evolution;
pub mod field;
pub mod geometry;
pub mod initial;
pub mod integrate;
pub mod lax;
pub mod runner;
pub mod soliton;
pub mod spectral;

pub use field::{ConstrainedField, HyperbolicField, SpinField};
pub use geometry::{Target, Vec3};
pub use initial::InitialCondition;
pub use integrate::Scheme;
pub use spectral::SpectralOps;
