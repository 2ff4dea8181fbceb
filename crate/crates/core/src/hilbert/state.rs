use nalgebra::DVector;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{abs2, cr, Real};

/// Pure state over a product of subsystems.
///
/// Amplitudes are stored row-major in subsystem order, so the first
/// subsystem index varies slowest. The constructors enforce unit norm.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T: Real> {
    dims: Vec<usize>,
    amps: DVector<Complex<T>>,
}

impl<T: Real> StateVector<T> {
    /// Builds a state from amplitudes that must already be normalized.
    pub fn new(dims: Vec<usize>, amps: Vec<Complex<T>>) -> Result<Self> {
        check_dims(&dims, amps.len())?;
        let state = Self {
            dims,
            amps: DVector::from_vec(amps),
        };
        let norm = state.norm();
        if (norm - T::one()).abs() > T::tol() {
            return Err(Error::NotNormalized { norm: norm.as_f64() });
        }
        Ok(state)
    }

    /// Builds a state and rescales it to unit norm.
    pub fn normalized(dims: Vec<usize>, amps: Vec<Complex<T>>) -> Result<Self> {
        check_dims(&dims, amps.len())?;
        let amps = DVector::from_vec(amps);
        let norm = amps.iter().fold(T::zero(), |acc, z| acc + abs2(*z)).sqrt();
        if norm <= T::zero() {
            return Err(Error::NotNormalized { norm: 0.0 });
        }
        Ok(Self {
            dims,
            amps: amps.map(|z| z.unscale(norm)),
        })
    }

    /// Computational basis vector at flat `index`.
    pub fn basis(dims: Vec<usize>, index: usize) -> Result<Self> {
        let len: usize = dims.iter().product();
        if index >= len {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} out of range for dimension {len}"
            )));
        }
        let mut amps = vec![Complex::new(T::zero(), T::zero()); len];
        amps[index] = cr(T::one());
        Self::new(dims, amps)
    }

    /// Fock number state `|n>` on the truncated space `0..=n_max`.
    pub fn fock(n_max: usize, n: usize) -> Result<Self> {
        Self::basis(vec![n_max + 1], n)
    }

    pub(crate) fn from_parts_unchecked(dims: Vec<usize>, amps: DVector<Complex<T>>) -> Self {
        debug_assert_eq!(dims.iter().product::<usize>(), amps.len());
        Self { dims, amps }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Complex<T>] {
        self.amps.as_slice()
    }

    pub fn as_vector(&self) -> &DVector<Complex<T>> {
        &self.amps
    }

    pub fn amp(&self, index: usize) -> Complex<T> {
        self.amps[index]
    }

    pub fn norm(&self) -> T {
        self.amps
            .iter()
            .fold(T::zero(), |acc, z| acc + abs2(*z))
            .sqrt()
    }

    /// `<self|other>`.
    pub fn overlap(&self, other: &Self) -> Result<Complex<T>> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch {
                expected: self.dims.clone(),
                found: other.dims.clone(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(other.amps.iter())
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| {
                acc + a.conj() * b
            }))
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &Self) -> Result<T> {
        self.overlap(other).map(abs2)
    }

    /// Kronecker product; the result has `self`'s subsystems first.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        let inner = other.dim();
        let amps = DVector::from_fn(self.dim() * inner, |idx, _| {
            self.amps[idx / inner] * other.amps[idx % inner]
        });
        Self { dims, amps }
    }

    /// Multiplies every amplitude by `phase`, which should have unit modulus.
    pub fn with_phase(&self, phase: Complex<T>) -> Self {
        Self {
            dims: self.dims.clone(),
            amps: self.amps.map(|z| z * phase),
        }
    }

    /// Amplitudes as a `dims[0] x rest` matrix, row `i` holding the
    /// components paired with the first subsystem's basis state `i`.
    pub(crate) fn bipartite_matrix(&self) -> Result<nalgebra::DMatrix<Complex<T>>> {
        if self.dims.len() != 2 {
            return Err(Error::DimensionMismatch {
                expected: vec![0, 0],
                found: self.dims.clone(),
            });
        }
        let (rows, cols) = (self.dims[0], self.dims[1]);
        Ok(nalgebra::DMatrix::from_fn(rows, cols, |i, j| {
            self.amps[i * cols + j]
        }))
    }
}

fn check_dims(dims: &[usize], len: usize) -> Result<()> {
    let product: usize = dims.iter().product();
    if dims.is_empty() || dims.contains(&0) || product != len {
        return Err(Error::DimensionMismatch {
            expected: dims.to_vec(),
            found: vec![len],
        });
    }
    Ok(())
}

/// Largest entry of `|G - I|` where `G` is the Gram matrix of `basis`.
pub fn orthonormality_defect<T: Real>(basis: &[StateVector<T>]) -> Result<T> {
    let mut defect = T::zero();
    for (i, a) in basis.iter().enumerate() {
        for (j, b) in basis.iter().enumerate().skip(i) {
            let g = a.overlap(b)?;
            let target = if i == j { cr(T::one()) } else { cr(T::zero()) };
            defect = defect.max(abs2(g - target).sqrt());
        }
    }
    Ok(defect)
}

pub(crate) fn require_orthonormal<T: Real>(basis: &[StateVector<T>]) -> Result<()> {
    let defect = orthonormality_defect(basis)?;
    if defect > T::tol() {
        return Err(Error::BasisNotOrthonormal {
            defect: defect.as_f64(),
        });
    }
    Ok(())
}
