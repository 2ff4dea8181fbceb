use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex;

use super::state::StateVector;
use crate::error::{Error, Result};
use crate::scalar::{abs2, cr, Real};

/// Hermitian, unit-trace, positive semidefinite matrix.
///
/// `dims` carries the subsystem structure the same way [`StateVector`] does.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T: Real> {
    dims: Vec<usize>,
    entries: DMatrix<Complex<T>>,
}

impl<T: Real> DensityMatrix<T> {
    /// Validating constructor: hermiticity, unit trace and eigenvalues
    /// `>= -tol` are all checked.
    pub fn new(dims: Vec<usize>, entries: DMatrix<Complex<T>>) -> Result<Self> {
        let dim: usize = dims.iter().product();
        if entries.nrows() != dim || entries.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: vec![dim, dim],
                found: vec![entries.nrows(), entries.ncols()],
            });
        }
        let defect = hermiticity_defect(&entries);
        if defect > T::tol() {
            return Err(Error::InvalidDensityMatrix(format!(
                "hermiticity defect {:e}",
                defect.as_f64()
            )));
        }
        let trace = entries.trace();
        if (trace.re - T::one()).abs() > T::tol() || trace.im.abs() > T::tol() {
            return Err(Error::InvalidDensityMatrix(format!(
                "trace {} + {}i",
                trace.re.as_f64(),
                trace.im.as_f64()
            )));
        }
        let rho = Self::from_parts_unchecked(dims, entries);
        let min_eig = rho.eigenvalues().iter().copied().fold(T::one(), |a, b| a.min(b));
        if min_eig < -T::tol() {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {:e}",
                min_eig.as_f64()
            )));
        }
        Ok(rho)
    }

    /// `|psi><psi|`.
    pub fn from_pure(psi: &StateVector<T>) -> Self {
        let v = psi.as_vector();
        Self::from_parts_unchecked(psi.dims().to_vec(), v * v.adjoint())
    }

    /// `sum_n w_n |psi_n><psi_n|`. Weights must sum to one.
    pub fn mixture(weights: &[T], states: &[StateVector<T>]) -> Result<Self> {
        if weights.len() != states.len() || states.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: vec![weights.len()],
                found: vec![states.len()],
            });
        }
        let total = weights.iter().fold(T::zero(), |a, &b| a + b);
        if (total - T::one()).abs() > T::tol() || weights.iter().any(|w| *w < T::zero()) {
            return Err(Error::NotNormalized {
                norm: total.as_f64(),
            });
        }
        let dims = states[0].dims().to_vec();
        let mut entries = DMatrix::zeros(states[0].dim(), states[0].dim());
        for (w, psi) in weights.iter().zip(states) {
            if psi.dims() != dims.as_slice() {
                return Err(Error::DimensionMismatch {
                    expected: dims,
                    found: psi.dims().to_vec(),
                });
            }
            let v = psi.as_vector();
            entries += (v * v.adjoint()) * cr(*w);
        }
        Ok(Self::from_parts_unchecked(dims, entries))
    }

    pub(crate) fn from_parts_unchecked(dims: Vec<usize>, entries: DMatrix<Complex<T>>) -> Self {
        Self { dims, entries }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex<T>> {
        &self.entries
    }

    pub fn element(&self, row: usize, col: usize) -> Complex<T> {
        self.entries[(row, col)]
    }

    pub fn trace(&self) -> Complex<T> {
        self.entries.trace()
    }

    /// `Tr(rho^2)`, computed as the squared Frobenius norm of a hermitian matrix.
    pub fn purity(&self) -> T {
        self.entries.iter().fold(T::zero(), |acc, z| acc + abs2(*z))
    }

    /// Real eigenvalues in the order returned by the hermitian eigensolver.
    pub fn eigenvalues(&self) -> Vec<T> {
        SymmetricEigen::new(self.entries.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect()
    }

    /// Half the trace norm of `self - other`.
    pub fn trace_distance(&self, other: &Self) -> Result<T> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: vec![self.dim()],
                found: vec![other.dim()],
            });
        }
        let diff = &self.entries - &other.entries;
        let eig = SymmetricEigen::new(diff).eigenvalues;
        Ok(eig.iter().fold(T::zero(), |acc, l| acc + l.abs()) * T::lit(0.5))
    }
}

pub(crate) fn hermiticity_defect<T: Real>(m: &DMatrix<Complex<T>>) -> T {
    let n = m.nrows();
    let mut defect = T::zero();
    for i in 0..n {
        for j in i..n {
            defect = defect.max(abs2(m[(i, j)] - m[(j, i)].conj()).sqrt());
        }
    }
    defect
}
