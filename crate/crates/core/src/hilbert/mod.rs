//! Dense complex linear algebra over truncated Fock spaces and their
//! composites.

mod density;
mod fock;
mod operator;
mod state;

use nalgebra::DMatrix;
use num_complex::Complex;

pub use density::DensityMatrix;
pub use fock::{
    annihilation, coherent_state, cutoff_adequate, default_cutoff, min_cutoff, moments,
    number_operator, quadrature_observables,
};
pub use operator::{Operator, OperatorKind};
pub use state::{orthonormality_defect, StateVector};

pub(crate) use operator::unitarity_defect_of;
pub(crate) use state::require_orthonormal;

use crate::error::{Error, Result};
use crate::scalar::{cr, Real};

pub fn overlap<T: Real>(a: &StateVector<T>, b: &StateVector<T>) -> Result<Complex<T>> {
    a.overlap(b)
}

pub fn tensor_product<T: Real>(a: &StateVector<T>, b: &StateVector<T>) -> StateVector<T> {
    a.tensor(b)
}

pub fn purity<T: Real>(rho: &DensityMatrix<T>) -> T {
    rho.purity()
}

pub fn trace_distance<T: Real>(a: &DensityMatrix<T>, b: &DensityMatrix<T>) -> Result<T> {
    a.trace_distance(b)
}

/// Reduction of a two-subsystem state onto one of its factors.
pub trait PartialTrace<T: Real> {
    /// Traces out every subsystem except `keep` (0 or 1).
    fn partial_trace(&self, keep: usize) -> Result<DensityMatrix<T>>;
}

pub fn partial_trace<T: Real, S: PartialTrace<T>>(state: &S, keep: usize) -> Result<DensityMatrix<T>> {
    state.partial_trace(keep)
}

fn check_keep(dims: &[usize], keep: usize) -> Result<()> {
    if dims.len() != 2 || keep > 1 {
        return Err(Error::DimensionMismatch {
            expected: vec![0, 0],
            found: dims.to_vec(),
        });
    }
    Ok(())
}

impl<T: Real> PartialTrace<T> for StateVector<T> {
    fn partial_trace(&self, keep: usize) -> Result<DensityMatrix<T>> {
        check_keep(self.dims(), keep)?;
        let m = self.bipartite_matrix()?;
        let reduced = if keep == 0 {
            &m * m.adjoint()
        } else {
            let mt = m.transpose();
            &mt * mt.adjoint()
        };
        Ok(DensityMatrix::from_parts_unchecked(
            vec![self.dims()[keep]],
            reduced,
        ))
    }
}

impl<T: Real> PartialTrace<T> for DensityMatrix<T> {
    fn partial_trace(&self, keep: usize) -> Result<DensityMatrix<T>> {
        check_keep(self.dims(), keep)?;
        let (d0, d1) = (self.dims()[0], self.dims()[1]);
        let rho = self.entries();
        let reduced = if keep == 0 {
            DMatrix::from_fn(d0, d0, |i, k| {
                (0..d1).fold(cr(T::zero()), |acc, j| acc + rho[(i * d1 + j, k * d1 + j)])
            })
        } else {
            DMatrix::from_fn(d1, d1, |j, l| {
                (0..d0).fold(cr(T::zero()), |acc, i| acc + rho[(i * d1 + j, i * d1 + l)])
            })
        };
        Ok(DensityMatrix::from_parts_unchecked(
            vec![self.dims()[keep]],
            reduced,
        ))
    }
}
