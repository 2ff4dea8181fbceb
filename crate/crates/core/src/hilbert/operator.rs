use nalgebra::DMatrix;
use num_complex::Complex;

use super::density::hermiticity_defect;
use super::state::StateVector;
use crate::error::{Error, Result};
use crate::scalar::{abs2, cr, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OperatorKind {
    Hermitian,
    Unitary,
    General,
}

/// Dense square operator tagged with the structure it was validated for.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator<T: Real> {
    entries: DMatrix<Complex<T>>,
    kind: OperatorKind,
}

impl<T: Real> Operator<T> {
    pub fn hermitian(entries: DMatrix<Complex<T>>) -> Result<Self> {
        require_square(&entries)?;
        let defect = hermiticity_defect(&entries);
        if defect > T::tol() {
            return Err(Error::NotHermitian {
                defect: defect.as_f64(),
            });
        }
        Ok(Self {
            entries,
            kind: OperatorKind::Hermitian,
        })
    }

    pub fn unitary(entries: DMatrix<Complex<T>>) -> Result<Self> {
        require_square(&entries)?;
        let defect = unitarity_defect_of(&entries);
        if defect > T::tol() {
            return Err(Error::NotUnitary {
                defect: defect.as_f64(),
            });
        }
        Ok(Self {
            entries,
            kind: OperatorKind::Unitary,
        })
    }

    pub fn general(entries: DMatrix<Complex<T>>) -> Result<Self> {
        require_square(&entries)?;
        Ok(Self {
            entries,
            kind: OperatorKind::General,
        })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn entries(&self) -> &DMatrix<Complex<T>> {
        &self.entries
    }

    pub fn is_hermitian(&self) -> bool {
        self.kind == OperatorKind::Hermitian
    }

    pub fn hermiticity_defect(&self) -> T {
        hermiticity_defect(&self.entries)
    }

    pub(crate) fn require_hermitian(&self) -> Result<()> {
        if self.is_hermitian() {
            return Ok(());
        }
        let defect = self.hermiticity_defect();
        if defect > T::tol() {
            return Err(Error::NotHermitian {
                defect: defect.as_f64(),
            });
        }
        Ok(())
    }

    /// `A|psi>` as a raw amplitude vector (not renormalized).
    pub fn apply(&self, psi: &StateVector<T>) -> Result<nalgebra::DVector<Complex<T>>> {
        if psi.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: vec![self.dim()],
                found: psi.dims().to_vec(),
            });
        }
        Ok(&self.entries * psi.as_vector())
    }

    /// `<psi|A|psi>`.
    pub fn expectation(&self, psi: &StateVector<T>) -> Result<Complex<T>> {
        let applied = self.apply(psi)?;
        Ok(psi.as_vector().dotc(&applied))
    }
}

fn require_square<T: Real>(m: &DMatrix<Complex<T>>) -> Result<()> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::DimensionMismatch {
            expected: vec![m.nrows(), m.nrows()],
            found: vec![m.nrows(), m.ncols()],
        });
    }
    Ok(())
}

/// `max |U^dagger U - I|` entrywise.
pub(crate) fn unitarity_defect_of<T: Real>(u: &DMatrix<Complex<T>>) -> T {
    let gram = u.adjoint() * u;
    let mut defect = T::zero();
    for i in 0..gram.nrows() {
        for j in 0..gram.ncols() {
            let target = if i == j { cr(T::one()) } else { cr(T::zero()) };
            defect = defect.max(abs2(gram[(i, j)] - target).sqrt());
        }
    }
    defect
}
