//! Truncated single-mode Fock space: ladder operators, quadratures,
//! coherent states and moments.

use nalgebra::DMatrix;
use num_complex::Complex;

use super::operator::Operator;
use super::state::StateVector;
use crate::error::{Error, Result};
use crate::scalar::{abs2, c, cr, Real};

/// Smallest cutoff satisfying the coherent-state adequacy bound
/// `|alpha|^2 + 6|alpha| <= n_max`.
pub fn min_cutoff(alpha_abs: f64) -> usize {
    (alpha_abs * alpha_abs + 6.0 * alpha_abs).ceil().max(1.0) as usize
}

/// Default cutoff for states displaced by at most `alpha_max`: the
/// adequacy bound plus ten levels of headroom.
pub fn default_cutoff(alpha_max: f64) -> usize {
    (alpha_max * alpha_max + 6.0 * alpha_max + 10.0).ceil() as usize
}

pub fn cutoff_adequate(alpha_abs: f64, n_max: usize) -> bool {
    n_max >= 1 && alpha_abs * alpha_abs + 6.0 * alpha_abs <= n_max as f64
}

/// Coherent state `|alpha>` truncated to `0..=n_max` and renormalized.
pub fn coherent_state<T: Real>(alpha: Complex<T>, n_max: usize) -> Result<StateVector<T>> {
    let alpha_abs = abs2(alpha).sqrt().as_f64();
    if !cutoff_adequate(alpha_abs, n_max) {
        return Err(Error::CutoffTooSmall {
            alpha_abs,
            n_max,
            required: min_cutoff(alpha_abs),
        });
    }
    let mut amps = Vec::with_capacity(n_max + 1);
    let mut term = cr(T::one());
    amps.push(term);
    for n in 1..=n_max {
        term = term * alpha / cr(T::from_usize(n).unwrap().sqrt());
        amps.push(term);
    }
    StateVector::normalized(vec![n_max + 1], amps)
}

/// Annihilation operator `b` with `b|n> = sqrt(n)|n-1>`.
pub fn annihilation<T: Real>(n_max: usize) -> DMatrix<Complex<T>> {
    let d = n_max + 1;
    DMatrix::from_fn(d, d, |i, j| {
        if j == i + 1 {
            cr(T::from_usize(j).unwrap().sqrt())
        } else {
            cr(T::zero())
        }
    })
}

pub fn number_operator<T: Real>(n_max: usize) -> Operator<T> {
    let d = n_max + 1;
    let m = DMatrix::from_fn(d, d, |i, j| {
        if i == j {
            cr(T::from_usize(i).unwrap())
        } else {
            cr(T::zero())
        }
    });
    Operator::hermitian(m).expect("diagonal real matrix is hermitian")
}

/// Position- and momentum-like quadratures `X = (b + b^dagger)/sqrt 2`,
/// `P = i(b^dagger - b)/sqrt 2`. The vacuum has `Var(X) = Var(P) = 1/2`.
pub fn quadrature_observables<T: Real>(n_max: usize) -> Result<(Operator<T>, Operator<T>)> {
    if n_max < 1 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    let b = annihilation::<T>(n_max);
    let bd = b.adjoint();
    let s = cr(T::lit(std::f64::consts::FRAC_1_SQRT_2));
    let x = (&b + &bd) * s;
    let p = (&bd - &b) * (c(T::zero(), T::one()) * s);
    Ok((Operator::hermitian(x)?, Operator::hermitian(p)?))
}

/// Mean and standard deviation of a hermitian observable in `psi`.
pub fn moments<T: Real>(psi: &StateVector<T>, observable: &Operator<T>) -> Result<(T, T)> {
    observable.require_hermitian()?;
    let applied = observable.apply(psi)?;
    let mean = psi.as_vector().dotc(&applied).re;
    // <A^2> = ||A psi||^2 for hermitian A
    let second = applied.iter().fold(T::zero(), |acc, z| acc + abs2(*z));
    let var = (second - mean * mean).max(T::zero());
    Ok((mean, var.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_displacement_is_vacuum() {
        let s = coherent_state::<f64>(cr(0.0), 10).unwrap();
        assert_eq!(s.amp(0), cr(1.0));
        assert!(s.amps()[1..].iter().all(|z| *z == cr(0.0)));
    }

    #[test]
    fn mean_photon_number_matches_poisson_mean() {
        let s = coherent_state::<f64>(cr(2.0), 40).unwrap();
        // brute-force sum of n |a_n|^2 over the truncated series
        let mean: f64 = s
            .amps()
            .iter()
            .enumerate()
            .map(|(n, z)| n as f64 * z.norm_sqr())
            .sum();
        assert!((mean - 4.0).abs() < 1e-8);
        let (m, _) = moments(&s, &number_operator(40)).unwrap();
        assert!((m - 4.0).abs() < 1e-8);
    }

    #[test]
    fn cutoff_too_small() {
        let err = coherent_state::<f64>(cr(2.0), 5).unwrap_err();
        assert_eq!(
            err,
            Error::CutoffTooSmall {
                alpha_abs: 2.0,
                n_max: 5,
                required: 16
            }
        );
    }

    #[test]
    fn coherent_overlaps() {
        let a = coherent_state::<f64>(cr(0.0), 40).unwrap();
        let b = coherent_state::<f64>(cr(2.0), 40).unwrap();
        let ov = a.overlap(&b).unwrap();
        assert!((ov.re - (-2.0f64).exp()).abs() < 1e-6);
        assert!(ov.im.abs() < 1e-12);
    }

    #[test]
    fn quadrature_examples() {
        let (x, p) = quadrature_observables::<f64>(40).unwrap();
        let vac = StateVector::fock(40, 0).unwrap();
        let (mean, dev) = moments(&vac, &x).unwrap();
        assert_eq!(mean, 0.0);
        assert!((dev * dev - 0.5).abs() < 1e-8);
        let (pm, pd) = moments(&vac, &p).unwrap();
        assert_eq!(pm, 0.0);
        assert!((pd - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);

        let coh = coherent_state::<f64>(cr(2.0), 40).unwrap();
        let (mean, _) = moments(&coh, &x).unwrap();
        assert!((mean - 2.0 * 2f64.sqrt()).abs() < 1e-6);
        assert!(quadrature_observables::<f64>(0).is_err());
    }

    #[test]
    fn coherent_five_moments() {
        let (x, _) = quadrature_observables::<f64>(80).unwrap();
        let s = coherent_state::<f64>(cr(5.0), 80).unwrap();
        let (mean, dev) = moments(&s, &x).unwrap();
        assert!((mean - 5.0 * 2f64.sqrt()).abs() < 1e-8);
        assert!((dev - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-8);
    }

    #[test]
    fn fock_one_is_number_eigenstate() {
        let s = StateVector::<f64>::fock(6, 1).unwrap();
        let (mean, dev) = moments(&s, &number_operator(6)).unwrap();
        assert_eq!((mean, dev), (1.0, 0.0));
    }

    #[test]
    fn moments_requires_hermitian() {
        let b = annihilation::<f64>(4);
        let op = Operator::general(b).unwrap();
        let s = StateVector::fock(4, 0).unwrap();
        assert!(matches!(moments(&s, &op), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn cutoff_rules() {
        assert_eq!(default_cutoff(2.0), 26);
        assert_eq!(default_cutoff(4.0), 50);
        assert!(cutoff_adequate(2.0, 16));
        assert!(!cutoff_adequate(2.0, 15));
    }
}
