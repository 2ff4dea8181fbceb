//! Simulator for a single photon in an interferometer whose arm ends on a
//! movable mirror, and for measurement as spontaneous superposition
//! breaking.
//!
//! The numerical core is generic over the real scalar type ([`Real`],
//! implemented for `f32` and `f64`). The aliases at the crate root fix the
//! scalar to `f64`, which is what the tolerances in the test suite assume.

pub mod cli;
pub mod error;
pub mod hilbert;
pub mod measurement;
pub mod mirror_model;
pub mod propagator;
pub mod scalar;

pub use error::{Error, Result};
pub use mirror_model::VerdictLabel;
pub use scalar::Real;

pub type Complex64 = num_complex::Complex<f64>;

pub type StateVector = hilbert::StateVector<f64>;
pub type DensityMatrix = hilbert::DensityMatrix<f64>;
pub type Operator = hilbert::Operator<f64>;
pub type HamiltonianSpec = propagator::HamiltonianSpec<f64>;
pub type Propagator = propagator::Propagator<f64>;
pub type PointerBasis = measurement::PointerBasis<f64>;
pub type BranchOutcome = measurement::BranchOutcome<f64>;
pub type ModelParams = mirror_model::ModelParams<f64>;
pub type VisibilityCurve = mirror_model::VisibilityCurve<f64>;
pub type Verdict = mirror_model::Verdict<f64>;
