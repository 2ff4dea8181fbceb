//! Von Neumann premeasurement, wave-packet criteria and Born-weighted
//! selfdecoherence sampling.
//!
//! A correlated object + pointer state `sum_n c_n |o_n> (x) |p_n>` keeps
//! evolving unitarily. When the pointer packets `p_n` weakly interfere the
//! superposition is broken spontaneously: exactly one branch `n` is selected
//! with probability `|c_n|^2`. The sampler here is that selection and
//! nothing more; it never modifies the unitary dynamics that produced the
//! state.

use nalgebra::DVector;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hilbert::{moments, require_orthonormal, DensityMatrix, Operator, StateVector};
use crate::scalar::{abs2, cr, modulus, Real};

/// Default "much greater than" factor for the wave-packet ratio.
pub const DEFAULT_PACKET_THRESHOLD: f64 = 10.0;
/// Coherent-state overlap at one width of separation is `e^{-1/2} ~ 0.6065`.
pub const DEFAULT_OVERLAP_TOL: f64 = 0.61;

/// Standard deviations at or below this are treated as zero spread.
const DEVIATION_FLOOR: f64 = 1e-12;

/// Pointer packets together with their phase-space centers.
///
/// Centers are complex displacements in units where the ground-state packet
/// has width 1.
#[derive(Clone, Debug, PartialEq)]
pub struct PointerBasis<T: Real> {
    packets: Vec<StateVector<T>>,
    centers: Vec<Complex<T>>,
    width: T,
}

impl<T: Real> PointerBasis<T> {
    pub fn new(packets: Vec<StateVector<T>>, centers: Vec<Complex<T>>, width: T) -> Result<Self> {
        if packets.len() != centers.len() || packets.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: vec![packets.len()],
                found: vec![centers.len()],
            });
        }
        let dims = packets[0].dims().to_vec();
        for p in &packets {
            if p.dims() != dims.as_slice() {
                return Err(Error::DimensionMismatch {
                    expected: dims,
                    found: p.dims().to_vec(),
                });
            }
            let norm = p.norm();
            if (norm - T::one()).abs() > T::tol() {
                return Err(Error::NotNormalized { norm: norm.as_f64() });
            }
        }
        if !(width > T::zero()) {
            return Err(Error::InvalidArgument("packet width must be positive".into()));
        }
        Ok(Self {
            packets,
            centers,
            width,
        })
    }

    pub fn packets(&self) -> &[StateVector<T>] {
        &self.packets
    }

    pub fn centers(&self) -> &[Complex<T>] {
        &self.centers
    }

    pub fn width(&self) -> T {
        self.width
    }

    pub fn len(&self) -> usize {
        self.packets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.packets.is_empty()
    }

    pub fn pointer_dims(&self) -> &[usize] {
        self.packets[0].dims()
    }
}

/// Result of one spontaneous breaking event.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchOutcome<T: Real> {
    pub index: usize,
    pub object_state: StateVector<T>,
    pub pointer_state: StateVector<T>,
    pub weight: T,
}

impl<T: Real> BranchOutcome<T> {
    /// The post-breaking product state `object (x) pointer`.
    pub fn product(&self) -> StateVector<T> {
        self.object_state.tensor(&self.pointer_state)
    }
}

/// `sum_n c_n object_basis[n] (x) pointer_basis.packets[n]`.
///
/// `ready_index` selects the pointer's ready state, the packet the device
/// occupies before the interaction (see [`ready_state`]).
pub fn premeasure<T: Real>(
    coeffs: &[Complex<T>],
    object_basis: &[StateVector<T>],
    pointer_basis: &PointerBasis<T>,
    ready_index: usize,
) -> Result<StateVector<T>> {
    if coeffs.len() != object_basis.len() || coeffs.len() != pointer_basis.len() {
        return Err(Error::DimensionMismatch {
            expected: vec![coeffs.len()],
            found: vec![object_basis.len(), pointer_basis.len()],
        });
    }
    if ready_index >= pointer_basis.len() {
        return Err(Error::InvalidArgument(format!(
            "ready index {ready_index} out of range for {} packets",
            pointer_basis.len()
        )));
    }
    let total = coeffs.iter().fold(T::zero(), |acc, z| acc + abs2(*z));
    if (total - T::one()).abs() > T::tol() {
        return Err(Error::NotNormalized {
            norm: total.as_f64(),
        });
    }
    require_orthonormal(object_basis)?;

    let first = object_basis[0].tensor(&pointer_basis.packets()[0]);
    let dims = vec![object_basis[0].dim(), pointer_basis.packets()[0].dim()];
    let mut amps = DVector::from_element(first.dim(), cr(T::zero()));
    for ((c, o), p) in coeffs.iter().zip(object_basis).zip(pointer_basis.packets()) {
        if *c == cr(T::zero()) {
            continue;
        }
        amps += o.tensor(p).as_vector() * *c;
    }
    // orthonormal object states keep the sum at unit norm for any pointers
    StateVector::new(dims, amps.iter().copied().collect())
}

/// Uncorrelated pre-interaction state `psi_object (x) packets[ready_index]`.
pub fn ready_state<T: Real>(
    object: &StateVector<T>,
    pointer_basis: &PointerBasis<T>,
    ready_index: usize,
) -> Result<StateVector<T>> {
    let ready = pointer_basis.packets().get(ready_index).ok_or_else(|| {
        Error::InvalidArgument(format!("ready index {ready_index} out of range"))
    })?;
    Ok(object.tensor(ready))
}

/// Trace distance between the pure correlated state and the Born mixture of
/// its branches.
pub fn differs_from_mixture<T: Real>(
    correlated: &StateVector<T>,
    branches: &[StateVector<T>],
    weights: &[T],
) -> Result<T> {
    for b in branches {
        if b.dims() != correlated.dims() {
            return Err(Error::DimensionMismatch {
                expected: correlated.dims().to_vec(),
                found: b.dims().to_vec(),
            });
        }
    }
    let mixture = DensityMatrix::mixture(weights, branches)?;
    DensityMatrix::from_pure(correlated).trace_distance(&mixture)
}

/// `|<A>| / Delta A`. Zero mean gives 0; a nonzero mean with vanishing
/// spread gives `+inf`.
pub fn wave_packet_ratio<T: Real>(psi: &StateVector<T>, observable: &Operator<T>) -> Result<T> {
    let (mean, dev) = moments(psi, observable)?;
    if mean == T::zero() {
        return Ok(T::zero());
    }
    if dev <= T::lit(DEVIATION_FLOOR) {
        return Ok(T::lit(f64::INFINITY));
    }
    Ok(mean.abs() / dev)
}

/// True iff every observable's wave-packet ratio reaches `threshold`, up to
/// a relative slack of the scalar tolerance (ratios landing exactly on the
/// threshold are computed a few ulps short).
pub fn is_wave_packet<T: Real>(
    psi: &StateVector<T>,
    observables: &[Operator<T>],
    threshold: T,
) -> Result<bool> {
    if !(threshold > T::one()) {
        return Err(Error::InvalidArgument(
            "wave-packet threshold must exceed 1".into(),
        ));
    }
    let floor = threshold * (T::one() - T::tol());
    for a in observables {
        if wave_packet_ratio(psi, a)? < floor {
            return Ok(false);
        }
    }
    Ok(true)
}

/// First packet pair violating the weak-interference conditions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InterferingPair<T: Real> {
    pub first: usize,
    pub second: usize,
    pub overlap: T,
    pub separation: T,
}

pub fn interfering_pair<T: Real>(
    basis: &PointerBasis<T>,
    overlap_tol: T,
) -> Result<Option<InterferingPair<T>>> {
    for i in 0..basis.len() {
        for j in (i + 1)..basis.len() {
            let separation = modulus(basis.centers[i] - basis.centers[j]);
            let overlap = modulus(basis.packets[i].overlap(&basis.packets[j])?);
            if separation < basis.width || overlap > overlap_tol {
                return Ok(Some(InterferingPair {
                    first: i,
                    second: j,
                    overlap,
                    separation,
                }));
            }
        }
    }
    Ok(None)
}

/// Every pair of packets is separated by at least one width and overlaps
/// by at most `overlap_tol`.
pub fn is_weakly_interfering<T: Real>(basis: &PointerBasis<T>, overlap_tol: T) -> bool {
    matches!(interfering_pair(basis, overlap_tol), Ok(None))
}

/// Pointer components `(<o_n| (x) 1) psi`, unnormalized.
fn branch_components<T: Real>(
    correlated: &StateVector<T>,
    object_basis: &[StateVector<T>],
) -> Result<Vec<DVector<Complex<T>>>> {
    require_orthonormal(object_basis)?;
    let m = correlated.bipartite_matrix()?;
    let mut out = Vec::with_capacity(object_basis.len());
    for o in object_basis {
        if o.dim() != m.nrows() {
            return Err(Error::DimensionMismatch {
                expected: vec![m.nrows()],
                found: o.dims().to_vec(),
            });
        }
        // row vector o^dagger M, transposed into a pointer-space column
        let comp = (o.as_vector().adjoint() * &m).transpose();
        out.push(comp);
    }
    Ok(out)
}

/// Born weights `w_n = ||(<o_n| (x) 1) psi||^2`.
pub fn born_weights<T: Real>(
    correlated: &StateVector<T>,
    object_basis: &[StateVector<T>],
) -> Result<Vec<T>> {
    Ok(branch_components(correlated, object_basis)?
        .iter()
        .map(|v| v.iter().fold(T::zero(), |acc, z| acc + abs2(*z)))
        .collect())
}

/// Prepared sampler for repeated breaking events on one correlated state.
#[derive(Clone, Debug)]
pub struct Selfdecoherence<T: Real> {
    objects: Vec<StateVector<T>>,
    pointers: Vec<Option<StateVector<T>>>,
    weights: Vec<T>,
    cumulative: Vec<f64>,
}

impl<T: Real> Selfdecoherence<T> {
    /// Checks the weak-interference hypothesis and computes Born weights.
    pub fn new(
        correlated: &StateVector<T>,
        object_basis: &[StateVector<T>],
        pointer_basis: &PointerBasis<T>,
        overlap_tol: T,
    ) -> Result<Self> {
        if pointer_basis.len() < 2 {
            return Err(Error::InvalidArgument(
                "selfdecoherence needs at least two pointer packets".into(),
            ));
        }
        if let Some(pair) = interfering_pair(pointer_basis, overlap_tol)? {
            return Err(Error::PacketsInterfere {
                first: pair.first,
                second: pair.second,
                overlap: pair.overlap.as_f64(),
                separation: pair.separation.as_f64(),
                width: pointer_basis.width().as_f64(),
            });
        }
        let components = branch_components(correlated, object_basis)?;
        let weights: Vec<T> = components
            .iter()
            .map(|v| v.iter().fold(T::zero(), |acc, z| acc + abs2(*z)))
            .collect();
        let total: f64 = weights.iter().map(|w| w.as_f64()).sum();
        if total <= 0.0 {
            return Err(Error::NotNormalized { norm: total });
        }
        let pointer_dims = vec![correlated.dims()[1]];
        let pointers = components
            .into_iter()
            .zip(&weights)
            .map(|(v, w)| {
                if *w > T::zero() {
                    StateVector::normalized(pointer_dims.clone(), v.iter().copied().collect()).ok()
                } else {
                    None
                }
            })
            .collect();
        let mut acc = 0.0;
        let cumulative = weights
            .iter()
            .map(|w| {
                acc += w.as_f64() / total;
                acc
            })
            .collect();
        Ok(Self {
            objects: object_basis.to_vec(),
            pointers,
            weights,
            cumulative,
        })
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Draws a branch index with probability proportional to its weight.
    pub fn draw_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let last = self
            .weights
            .iter()
            .rposition(|w| *w > T::zero())
            .unwrap_or(0);
        self.cumulative
            .iter()
            .zip(&self.weights)
            .position(|(c, w)| *w > T::zero() && u < *c)
            .unwrap_or(last)
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> BranchOutcome<T> {
        let index = self.draw_index(rng);
        BranchOutcome {
            index,
            object_state: self.objects[index].clone(),
            pointer_state: self.pointers[index]
                .clone()
                .expect("selected branch has nonzero weight"),
            weight: self.weights[index],
        }
    }

    /// Branch indices of `draws` successive breaking events from one seed.
    pub fn sample_indices(&self, draws: usize, seed: u64) -> Vec<usize> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..draws).map(|_| self.draw_index(&mut rng)).collect()
    }

    pub fn sample_counts(&self, draws: usize, seed: u64) -> Vec<u64> {
        let mut counts = vec![0u64; self.weights.len()];
        for i in self.sample_indices(draws, seed) {
            counts[i] += 1;
        }
        counts
    }
}

/// One seeded spontaneous breaking of `correlated`.
pub fn selfdecohere<T: Real>(
    correlated: &StateVector<T>,
    object_basis: &[StateVector<T>],
    pointer_basis: &PointerBasis<T>,
    overlap_tol: T,
    seed: u64,
) -> Result<BranchOutcome<T>> {
    let sampler = Selfdecoherence::new(correlated, object_basis, pointer_basis, overlap_tol)?;
    Ok(sampler.draw(&mut ChaCha8Rng::seed_from_u64(seed)))
}

/// Pearson statistic of observed counts against expected weights; branches
/// with zero weight are skipped.
pub fn chi_square<T: Real>(counts: &[u64], weights: &[T]) -> f64 {
    let n: u64 = counts.iter().sum();
    let total: f64 = weights.iter().map(|w| w.as_f64()).sum();
    counts
        .iter()
        .zip(weights)
        .filter(|(_, w)| w.as_f64() > 0.0)
        .map(|(c, w)| {
            let expected = n as f64 * w.as_f64() / total;
            (*c as f64 - expected).powi(2) / expected
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{coherent_state, quadrature_observables, PartialTrace};
    use crate::scalar::c;

    fn qubit(i: usize) -> StateVector<f64> {
        StateVector::basis(vec![2], i).unwrap()
    }

    fn orthogonal_pointers() -> PointerBasis<f64> {
        let p0 = StateVector::fock(3, 0).unwrap();
        let p1 = StateVector::fock(3, 1).unwrap();
        PointerBasis::new(vec![p0, p1], vec![cr(0.0), cr(5.0)], 1.0).unwrap()
    }

    fn coherent_pointers(a: f64, b: f64) -> PointerBasis<f64> {
        let n = 40;
        PointerBasis::new(
            vec![
                coherent_state(cr(a), n).unwrap(),
                coherent_state(cr(b), n).unwrap(),
            ],
            vec![cr(a), cr(b)],
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn single_branch_is_product() {
        let obj = [qubit(0), qubit(1)];
        let psi = premeasure(&[cr(1.0), cr(0.0)], &obj, &orthogonal_pointers(), 0).unwrap();
        let rho = psi.partial_trace(0).unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-12);
        let ready = ready_state(&qubit(0), &orthogonal_pointers(), 0).unwrap();
        assert_eq!(psi, ready);
    }

    #[test]
    fn premeasure_purity_examples() {
        let obj = [qubit(0), qubit(1)];
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let psi = premeasure(&[cr(h), cr(h)], &obj, &orthogonal_pointers(), 0).unwrap();
        assert!((psi.partial_trace(0).unwrap().purity() - 0.5).abs() < 1e-10);
        let psi = premeasure(&[cr(0.6), cr(0.8)], &obj, &orthogonal_pointers(), 0).unwrap();
        let expected = 0.6f64.powi(4) + 0.8f64.powi(4);
        assert!((psi.partial_trace(0).unwrap().purity() - expected).abs() < 1e-10);
        let w = born_weights(&psi, &obj).unwrap();
        assert!((w[0] - 0.36).abs() < 1e-10 && (w[1] - 0.64).abs() < 1e-10);
    }

    #[test]
    fn premeasure_errors() {
        let obj = [qubit(0), qubit(1)];
        let p = orthogonal_pointers();
        assert!(matches!(
            premeasure(&[cr(0.6), cr(0.6)], &obj, &p, 0),
            Err(Error::NotNormalized { .. })
        ));
        assert!(matches!(
            premeasure(&[cr(1.0)], &obj, &p, 0),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            premeasure(&[cr(1.0), cr(0.0)], &[qubit(0), qubit(0)], &p, 0),
            Err(Error::BasisNotOrthonormal { .. })
        ));
    }

    #[test]
    fn mixture_gap_examples() {
        let obj = [qubit(0), qubit(1)];
        let p = orthogonal_pointers();
        let single = premeasure(&[cr(1.0), cr(0.0)], &obj, &p, 0).unwrap();
        let d = differs_from_mixture(&single, &[single.clone()], &[1.0]).unwrap();
        assert!(d.abs() < 1e-10);

        let branches: Vec<_> = obj
            .iter()
            .zip(p.packets())
            .map(|(o, q)| o.tensor(q))
            .collect();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let equal = premeasure(&[cr(h), cr(h)], &obj, &p, 0).unwrap();
        let d = differs_from_mixture(&equal, &branches, &[0.5, 0.5]).unwrap();
        assert!((d - 0.5).abs() < 1e-8);

        // eigenvalues of the difference are +-0.6*0.8 on the coherence block
        let uneven = premeasure(&[cr(0.6), cr(0.8)], &obj, &p, 0).unwrap();
        let d = differs_from_mixture(&uneven, &branches, &[0.36, 0.64]).unwrap();
        assert!((d - 0.48).abs() < 1e-10);
        assert!(d > 0.4);
    }

    #[test]
    fn wave_packet_ratios() {
        let n = 80;
        let (x, p) = quadrature_observables::<f64>(n).unwrap();
        let coh = coherent_state(cr(5.0), n).unwrap();
        assert!((wave_packet_ratio(&coh, &x).unwrap() - 10.0).abs() < 1e-4);
        let vac = StateVector::fock(n, 0).unwrap();
        assert_eq!(wave_packet_ratio(&vac, &x).unwrap(), 0.0);

        let minus = coherent_state(cr(-5.0), n).unwrap();
        let cat = StateVector::normalized(
            vec![n + 1],
            coh.amps().iter().zip(minus.amps()).map(|(a, b)| a + b).collect(),
        )
        .unwrap();
        assert!(wave_packet_ratio(&cat, &x).unwrap() < 1e-6);

        let diag = coherent_state(c(5.0, 5.0), 120).unwrap();
        let (x2, p2) = quadrature_observables::<f64>(120).unwrap();
        let family = [x2, p2];
        assert!(is_wave_packet(&diag, &family, 10.0).unwrap());
        assert!(!is_wave_packet(&vac, &[x.clone(), p.clone()], 10.0).unwrap());
        assert!(!is_wave_packet(&coh, &[x.clone(), p], 10.0).unwrap());
        assert!(is_wave_packet(&coh, &[x], 1.0).is_err());
    }

    #[test]
    fn zero_spread_gives_infinite_ratio() {
        let s = StateVector::<f64>::fock(4, 2).unwrap();
        let n = crate::hilbert::number_operator(4);
        assert!(wave_packet_ratio(&s, &n).unwrap().is_infinite());
    }

    #[test]
    fn weak_interference_examples() {
        assert!(is_weakly_interfering(&coherent_pointers(0.0, 2.0), 0.61));
        assert!(!is_weakly_interfering(&coherent_pointers(0.0, 0.5), 0.61));
        assert!(!is_weakly_interfering(&coherent_pointers(1.0, 1.0), 0.61));
    }

    #[test]
    fn sampler_respects_certain_branch() {
        let obj = [qubit(0), qubit(1)];
        let p = orthogonal_pointers();
        let psi = premeasure(&[cr(1.0), cr(0.0)], &obj, &p, 0).unwrap();
        for seed in 0..50 {
            let out = selfdecohere(&psi, &obj, &p, 0.61, seed).unwrap();
            assert_eq!(out.index, 0);
            assert_eq!(out.weight, 1.0);
        }
    }

    #[test]
    fn sampler_is_deterministic_per_seed() {
        let obj = [qubit(0), qubit(1)];
        let p = coherent_pointers(0.0, 3.0);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let psi = premeasure(&[cr(h), cr(h)], &obj, &p, 0).unwrap();
        let a = selfdecohere(&psi, &obj, &p, 0.61, 7).unwrap();
        let b = selfdecohere(&psi, &obj, &p, 0.61, 7).unwrap();
        assert_eq!(a, b);
        assert!((a.product().norm() - 1.0).abs() < 1e-12);
        assert!((a.pointer_state.fidelity(&p.packets()[a.index]).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn interfering_packets_are_rejected() {
        let obj = [qubit(0), qubit(1)];
        let p = coherent_pointers(0.0, 0.3);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let psi = premeasure(&[cr(h), cr(h)], &obj, &p, 0).unwrap();
        let err = selfdecohere(&psi, &obj, &p, 0.61, 1).unwrap_err();
        match err {
            Error::PacketsInterfere { first, second, .. } => assert_eq!((first, second), (0, 1)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn chi_square_of_exact_counts_is_zero() {
        assert_eq!(chi_square(&[50, 50], &[0.5, 0.5]), 0.0);
        assert_eq!(chi_square(&[1, 0], &[1.0, 0.0]), 0.0);
    }
}
