//! Unitary evolution under a time-independent Hamiltonian, and the
//! single-photon optomechanical Hamiltonian used to cross-check the
//! closed-form photon + mirror state.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::hilbert::{
    annihilation, require_orthonormal, unitarity_defect_of, Operator, StateVector,
};
use crate::scalar::{abs2, cis, cr, Real};

/// Parameters of `H = omega_p 1 + omega_m b^dagger b - k omega_m P_A (b + b^dagger)`
/// (in units of hbar). `P_A` projects the photon onto arm A, arm B is free.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HamiltonianSpec<T: Real> {
    pub omega_p: T,
    pub omega_m: T,
    pub k: T,
    pub n_max: usize,
}

impl<T: Real> HamiltonianSpec<T> {
    pub fn new(omega_p: T, omega_m: T, k: T, n_max: usize) -> Result<Self> {
        let spec = Self {
            omega_p,
            omega_m,
            k,
            n_max,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_m > T::zero()) {
            return Err(Error::InvalidArgument("omega_m must be positive".into()));
        }
        if !(self.k >= T::zero()) {
            return Err(Error::InvalidArgument("k must be non-negative".into()));
        }
        if self.n_max < 1 {
            return Err(Error::InvalidArgument("n_max must be at least 1".into()));
        }
        Ok(())
    }
}

/// Hamiltonian on the `2 (n_max + 1)` dimensional (photon, mirror) space,
/// photon index slowest with arm B = 0 and arm A = 1.
pub fn build_hamiltonian<T: Real>(spec: &HamiltonianSpec<T>) -> Result<Operator<T>> {
    spec.validate()?;
    let d = spec.n_max + 1;
    let b = annihilation::<T>(spec.n_max);
    let mut h = DMatrix::from_element(2 * d, 2 * d, cr(T::zero()));
    for arm in 0..2 {
        let off = arm * d;
        for n in 0..d {
            h[(off + n, off + n)] = cr(spec.omega_p + spec.omega_m * T::from_usize(n).unwrap());
        }
    }
    let g = cr(-spec.k * spec.omega_m);
    for i in 0..d {
        for j in 0..d {
            let x = b[(i, j)] + b[(j, i)].conj();
            if x != cr(T::zero()) {
                h[(d + i, d + j)] += g * x;
            }
        }
    }
    Operator::hermitian(h)
}

/// Cached spectral decomposition `H = V diag(E) V^dagger`; each evolution
/// time then costs two matrix-vector products.
#[derive(Clone, Debug)]
pub struct Propagator<T: Real> {
    energies: Vec<T>,
    vectors: DMatrix<Complex<T>>,
}

impl<T: Real> Propagator<T> {
    pub fn new(h: &Operator<T>) -> Result<Self> {
        h.require_hermitian()?;
        let eig = SymmetricEigen::new(h.entries().clone());
        Ok(Self {
            energies: eig.eigenvalues.iter().copied().collect(),
            vectors: eig.eigenvectors,
        })
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &[T] {
        &self.energies
    }

    /// `U(t) = exp(-i H t)`.
    pub fn unitary(&self, t: T) -> DMatrix<Complex<T>> {
        let mut scaled = self.vectors.clone();
        for (col, e) in self.energies.iter().enumerate() {
            let phase = cis(-*e * t);
            scaled.column_mut(col).iter_mut().for_each(|z| *z *= phase);
        }
        scaled * self.vectors.adjoint()
    }

    pub fn evolve(&self, t: T, psi0: &StateVector<T>) -> Result<StateVector<T>> {
        if psi0.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: vec![self.dim()],
                found: psi0.dims().to_vec(),
            });
        }
        if t == T::zero() {
            return Ok(psi0.clone());
        }
        let mut coeffs = self.vectors.adjoint() * psi0.as_vector();
        for (z, e) in coeffs.iter_mut().zip(&self.energies) {
            *z *= cis(-*e * t);
        }
        Ok(StateVector::from_parts_unchecked(
            psi0.dims().to_vec(),
            &self.vectors * coeffs,
        ))
    }
}

/// `exp(-i H t) psi0` by spectral decomposition of `H`.
pub fn evolve<T: Real>(h: &Operator<T>, t: T, psi0: &StateVector<T>) -> Result<StateVector<T>> {
    if psi0.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: vec![h.dim()],
            found: psi0.dims().to_vec(),
        });
    }
    Propagator::new(h)?.evolve(t, psi0)
}

/// `max |U^dagger U - I|` for `U = exp(-i H t)`.
pub fn unitarity_defect<T: Real>(h: &Operator<T>, t: T) -> Result<T> {
    let u = Propagator::new(h)?.unitary(t);
    Ok(unitarity_defect_of(&u))
}

/// Largest change of an expansion-coefficient magnitude `|(psi_n, psi)|`
/// when the basis and the state are evolved together.
pub fn coefficient_conservation<T: Real>(
    h: &Operator<T>,
    basis: &[StateVector<T>],
    psi0: &StateVector<T>,
    t: T,
) -> Result<T> {
    require_orthonormal(basis)?;
    let prop = Propagator::new(h)?;
    let evolved = prop.evolve(t, psi0)?;
    let mut worst = T::zero();
    for phi in basis {
        let before = abs2(phi.overlap(psi0)?).sqrt();
        let after = abs2(prop.evolve(t, phi)?.overlap(&evolved)?).sqrt();
        worst = worst.max((after - before).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;
    use std::f64::consts::PI;

    fn diag_h(values: &[f64]) -> Operator<f64> {
        let n = values.len();
        Operator::hermitian(DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                cr(values[i])
            } else {
                cr(0.0)
            }
        }))
        .unwrap()
    }

    fn arm_superposition(n_max: usize) -> StateVector<f64> {
        let mut amps = vec![cr(0.0); 2 * (n_max + 1)];
        amps[0] = cr(std::f64::consts::FRAC_1_SQRT_2);
        amps[n_max + 1] = cr(std::f64::consts::FRAC_1_SQRT_2);
        StateVector::new(vec![2, n_max + 1], amps).unwrap()
    }

    #[test]
    fn zero_time_is_identity() {
        let h = diag_h(&[0.0, 1.0, 2.5]);
        let psi = StateVector::normalized(vec![3], vec![cr(1.0), c(0.5, 0.5), cr(-1.0)]).unwrap();
        assert_eq!(evolve(&h, 0.0, &psi).unwrap(), psi);
        assert!(unitarity_defect(&h, 0.0).unwrap() < 1e-14);
    }

    #[test]
    fn eigenstate_picks_up_phase() {
        let energies = [0.0, 1.0, 2.5, 4.0];
        let h = diag_h(&energies);
        let t = 1.7;
        for n in 0..energies.len() {
            let psi = StateVector::basis(vec![4], n).unwrap();
            let out = evolve(&h, t, &psi).unwrap();
            let expected = cis(-energies[n] * t);
            assert!((out.amp(n) - expected).norm() < 1e-12);
            assert!((out.fidelity(&psi).unwrap() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn uncoupled_hamiltonian_is_block_diagonal() {
        let spec = HamiltonianSpec::new(0.3, 1.0, 0.0, 8).unwrap();
        let h = build_hamiltonian(&spec).unwrap();
        let d = 9;
        for i in 0..d {
            for j in 0..d {
                assert_eq!(h.entries()[(i, d + j)], cr(0.0));
                assert_eq!(h.entries()[(d + i, j)], cr(0.0));
            }
        }
        assert!(h.hermiticity_defect() <= 1e-12);
    }

    #[test]
    fn full_period_returns_initial_state() {
        let spec = HamiltonianSpec::new(0.0, 1.0, 1.0, 40).unwrap();
        let h = build_hamiltonian(&spec).unwrap();
        let psi0 = arm_superposition(40);
        let out = evolve(&h, 2.0 * PI, &psi0).unwrap();
        assert!(out.fidelity(&psi0).unwrap() >= 1.0 - 1e-6);
    }

    #[test]
    fn large_coupling_stays_unitary() {
        let spec = HamiltonianSpec::new(0.0, 1.0, 2.0, 60).unwrap();
        let h = build_hamiltonian(&spec).unwrap();
        assert!(unitarity_defect(&h, 10.0).unwrap() <= 1e-9);
    }

    #[test]
    fn computational_basis_coefficients_conserved_at_half_period() {
        let spec = HamiltonianSpec::new(0.0, 1.0, 1.0, 26).unwrap();
        let h = build_hamiltonian(&spec).unwrap();
        let psi0 = arm_superposition(26);
        let basis: Vec<_> = (0..h.dim())
            .map(|i| StateVector::basis(vec![2, 27], i).unwrap())
            .collect();
        assert_eq!(coefficient_conservation(&h, &basis, &psi0, 0.0).unwrap(), 0.0);
        assert!(coefficient_conservation(&h, &basis, &psi0, PI).unwrap() <= 1e-9);
    }

    #[test]
    fn rejects_non_orthonormal_basis_and_bad_dims() {
        let h = diag_h(&[0.0, 1.0]);
        let a = StateVector::basis(vec![2], 0).unwrap();
        let err = coefficient_conservation(&h, &[a.clone(), a.clone()], &a, 1.0).unwrap_err();
        assert!(matches!(err, Error::BasisNotOrthonormal { .. }));
        let wrong = StateVector::basis(vec![3], 0).unwrap();
        assert!(matches!(
            evolve(&h, 1.0, &wrong),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn evolve_rejects_general_operator() {
        let m = DMatrix::from_fn(2, 2, |i, j| if i < j { cr(1.0) } else { cr(0.0) });
        let op = Operator::general(m).unwrap();
        let psi = StateVector::basis(vec![2], 0).unwrap();
        assert!(matches!(
            evolve(&op, 1.0, &psi),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn spec_validation() {
        assert!(HamiltonianSpec::new(0.0, 0.0, 1.0, 4).is_err());
        assert!(HamiltonianSpec::new(0.0, 1.0, -1.0, 4).is_err());
        assert!(HamiltonianSpec::new(0.0, 1.0, 1.0, 0).is_err());
    }
}
