//! Single photon in a Michelson interferometer whose arm A ends on a
//! movable mirror.
//!
//! The joint state is known in closed form:
//!
//! ```text
//! |psi(t)> = e^{-i w_p t}/sqrt 2 ( |B>|0> + f(t) |A>|beta(t)> )
//! f(t)     = exp(i k^2 (w_m t - sin w_m t))
//! beta(t)  = k (1 - e^{-i w_m t})
//! ```
//!
//! so the photon's fringe visibility `|<0|beta(t)>| = exp(-k^2 (1 - cos w_m t))`
//! collapses near half a mirror period and revives fully at every period.
//! An exponential dephasing channel stands in for any additional
//! environmental (absolute) decoherence, which would suppress the revival.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{coherent_state, default_cutoff, DensityMatrix, PartialTrace, StateVector};
use crate::measurement::PointerBasis;
use crate::propagator::HamiltonianSpec;
use crate::scalar::{arg, c, cis, cr, modulus, Real};

/// Photon arm indices in the composite (photon, mirror) space.
pub const ARM_B: usize = 0;
pub const ARM_A: usize = 1;

pub const DEFAULT_REVIVAL_TOL: f64 = 0.01;
pub const DEFAULT_SUPPRESSION_TOL: f64 = 0.2;
pub const DEFAULT_WINDOW_THRESHOLD: f64 = 0.5;

/// Experiment parameters. `gamma` is the dephasing rate in absolute
/// inverse time units.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams<T: Real> {
    pub k: T,
    pub omega_m: T,
    pub omega_p: T,
    pub n_max: usize,
    pub gamma: T,
}

impl<T: Real> ModelParams<T> {
    /// Parameters with `omega_p = 0`, `gamma = 0` and the default cutoff
    /// for a maximal displacement of `2k`.
    pub fn new(k: T, omega_m: T) -> Result<Self> {
        let n_max = default_cutoff(2.0 * k.as_f64().max(0.0));
        let params = Self {
            k,
            omega_m,
            omega_p: T::zero(),
            n_max,
            gamma: T::zero(),
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_omega_p(mut self, omega_p: T) -> Self {
        self.omega_p = omega_p;
        self
    }

    pub fn with_gamma(mut self, gamma: T) -> Result<Self> {
        self.gamma = gamma;
        self.validate()?;
        Ok(self)
    }

    pub fn with_n_max(mut self, n_max: usize) -> Result<Self> {
        self.n_max = n_max;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_m > T::zero()) {
            return Err(Error::InvalidArgument("omega_m must be positive".into()));
        }
        if !(self.k >= T::zero()) {
            return Err(Error::InvalidArgument("k must be non-negative".into()));
        }
        if !(self.gamma >= T::zero()) {
            return Err(Error::InvalidArgument("gamma must be non-negative".into()));
        }
        let alpha_max = 2.0 * self.k.as_f64();
        if !crate::hilbert::cutoff_adequate(alpha_max, self.n_max) {
            return Err(Error::CutoffTooSmall {
                alpha_abs: alpha_max,
                n_max: self.n_max,
                required: crate::hilbert::min_cutoff(alpha_max),
            });
        }
        Ok(())
    }

    /// Mirror period `T_m = 2 pi / omega_m`.
    pub fn period(&self) -> T {
        T::two_pi() / self.omega_m
    }

    pub fn dims(&self) -> Vec<usize> {
        vec![2, self.n_max + 1]
    }

    pub fn hamiltonian_spec(&self) -> Result<HamiltonianSpec<T>> {
        HamiltonianSpec::new(self.omega_p, self.omega_m, self.k, self.n_max)
    }
}

/// Sampled interference record over a time grid.
#[derive(Clone, Debug, PartialEq)]
pub struct VisibilityCurve<T: Real> {
    pub times: Vec<T>,
    pub visibility: Vec<T>,
    /// Argument of the arm-A phase factor `f(t)`, wrapped to `(-pi, pi]`.
    pub phase: Vec<T>,
    pub mirror_purity: Vec<T>,
    /// `<0|beta(t)>`.
    pub overlap: Vec<Complex<T>>,
}

impl<T: Real> VisibilityCurve<T> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Index and value of the smallest visibility sample.
    pub fn minimum(&self) -> Option<(usize, T)> {
        self.visibility
            .iter()
            .copied()
            .enumerate()
            .fold(None, |best, (i, v)| match best {
                Some((_, b)) if b <= v => best,
                _ => Some((i, v)),
            })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerdictLabel {
    RelativeDecoherence,
    AbsoluteDecoherence,
    Inconclusive,
}

impl std::fmt::Display for VerdictLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Self::RelativeDecoherence => "RelativeDecoherence",
            Self::AbsoluteDecoherence => "AbsoluteDecoherence",
            Self::Inconclusive => "Inconclusive",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Verdict<T: Real> {
    pub label: VerdictLabel,
    pub mid_visibility: T,
    pub revival_visibility: T,
}

/// `(|B> + |A>)/sqrt 2 (x) |0>`.
pub fn initial_state<T: Real>(params: &ModelParams<T>) -> StateVector<T> {
    let d = params.n_max + 1;
    let h = cr(T::lit(std::f64::consts::FRAC_1_SQRT_2));
    let mut amps = nalgebra::DVector::from_element(2 * d, cr(T::zero()));
    amps[ARM_B * d] = h;
    amps[ARM_A * d] = h;
    StateVector::from_parts_unchecked(params.dims(), amps)
}

/// `f(t) = exp(i k^2 (omega_m t - sin omega_m t))`.
pub fn kerr_phase<T: Real>(params: &ModelParams<T>, t: T) -> Complex<T> {
    let wt = params.omega_m * t;
    cis(params.k * params.k * (wt - wt.sin()))
}

/// `beta(t) = k (1 - e^{-i omega_m t})`, the arm-A mirror displacement.
pub fn mirror_displacement<T: Real>(params: &ModelParams<T>, t: T) -> Complex<T> {
    let wt = params.omega_m * t;
    c(params.k * (T::one() - wt.cos()), params.k * wt.sin())
}

pub fn joint_state<T: Real>(params: &ModelParams<T>, t: T) -> Result<StateVector<T>> {
    let mirror = coherent_state(mirror_displacement(params, t), params.n_max)?;
    let d = params.n_max + 1;
    let global = cis(-params.omega_p * t) * cr(T::lit(std::f64::consts::FRAC_1_SQRT_2));
    let arm_a = global * kerr_phase(params, t);
    let mut amps = nalgebra::DVector::from_element(2 * d, cr(T::zero()));
    amps[ARM_B * d] = global;
    for (n, z) in mirror.amps().iter().enumerate() {
        amps[ARM_A * d + n] = arm_a * z;
    }
    Ok(StateVector::from_parts_unchecked(params.dims(), amps))
}

/// Twice the modulus of the photon coherence `rho_BA`.
fn photon_visibility<T: Real>(photon: &DensityMatrix<T>) -> T {
    T::lit(2.0) * modulus(photon.element(ARM_B, ARM_A))
}

/// Visibility of the photon fringes without the dephasing channel.
fn coherent_visibility<T: Real>(params: &ModelParams<T>, t: T) -> Result<T> {
    let photon = joint_state(params, t)?.partial_trace(0)?;
    Ok(photon_visibility(&photon))
}

pub fn visibility<T: Real>(params: &ModelParams<T>, t: T) -> Result<T> {
    let photon = joint_state(params, t)?.partial_trace(0)?;
    let photon = apply_dephasing(&photon, params.gamma, t);
    Ok(photon_visibility(&photon).min(T::one()))
}

/// Uniform grid over `[t_start, t_end]`, endpoints included.
pub fn time_grid<T: Real>(t_start: T, t_end: T, samples: usize) -> Result<Vec<T>> {
    if samples < 2 {
        return Err(Error::InvalidArgument("need at least two samples".into()));
    }
    if !(t_end > t_start) {
        return Err(Error::InvalidArgument("t_end must exceed t_start".into()));
    }
    let span = t_end - t_start;
    let last = T::from_usize(samples - 1).unwrap();
    Ok((0..samples)
        .map(|i| {
            if i == samples - 1 {
                t_end
            } else {
                t_start + span * T::from_usize(i).unwrap() / last
            }
        })
        .collect())
}

pub fn visibility_curve<T: Real>(
    params: &ModelParams<T>,
    t_start: T,
    t_end: T,
    samples: usize,
) -> Result<VisibilityCurve<T>> {
    let times = time_grid(t_start, t_end, samples)?;
    let vacuum = StateVector::fock(params.n_max, 0)?;
    let mut curve = VisibilityCurve {
        times: Vec::with_capacity(samples),
        visibility: Vec::with_capacity(samples),
        phase: Vec::with_capacity(samples),
        mirror_purity: Vec::with_capacity(samples),
        overlap: Vec::with_capacity(samples),
    };
    for t in times {
        let psi = joint_state(params, t)?;
        let photon = psi.partial_trace(0)?;
        let mirror = psi.partial_trace(1)?;
        let packet = coherent_state(mirror_displacement(params, t), params.n_max)?;
        curve.times.push(t);
        curve.visibility.push(photon_visibility(&photon).min(T::one()));
        curve.phase.push(arg(kerr_phase(params, t)));
        curve.mirror_purity.push(mirror.purity());
        curve.overlap.push(vacuum.overlap(&packet)?);
    }
    Ok(apply_dephasing(&curve, params.gamma, T::zero()))
}

/// Half-width of the correlation window: the first time the (unitary)
/// visibility falls to `threshold`, located by bisection to `1e-10 T_m`.
pub fn correlation_window<T: Real>(params: &ModelParams<T>, threshold: T) -> Result<T> {
    if !(threshold > T::zero() && threshold <= T::one()) {
        return Err(Error::InvalidArgument(
            "threshold must lie in (0, 1]".into(),
        ));
    }
    if threshold == T::one() {
        return Ok(T::zero());
    }
    let period = params.period();
    let mut lo = T::zero();
    let mut hi = period * T::lit(0.5);
    let floor = coherent_visibility(params, hi)?;
    if floor > threshold {
        return Err(Error::Unreachable {
            min_visibility: floor.as_f64(),
            threshold: threshold.as_f64(),
        });
    }
    let tol = period * T::lit(1e-10);
    while hi - lo > tol {
        let mid = (lo + hi) * T::lit(0.5);
        if coherent_visibility(params, mid)? > threshold {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) * T::lit(0.5))
}

/// Packets can be told apart: `k^2 >= 1`.
pub fn distinguishability_ok<T: Real>(params: &ModelParams<T>) -> bool {
    params.k * params.k >= T::one()
}

/// The two occupied mirror packets `{|0>, |beta(t)>}` with unit width.
pub fn pointer_set<T: Real>(params: &ModelParams<T>, t: T) -> Result<PointerBasis<T>> {
    let beta = mirror_displacement(params, t);
    PointerBasis::new(
        vec![
            StateVector::fock(params.n_max, 0)?,
            coherent_state(beta, params.n_max)?,
        ],
        vec![cr(T::zero()), beta],
        T::one(),
    )
}

/// Photon arm basis `{|B>, |A>}`.
pub fn arm_basis<T: Real>() -> [StateVector<T>; 2] {
    [
        StateVector::basis(vec![2], ARM_B).expect("qubit basis"),
        StateVector::basis(vec![2], ARM_A).expect("qubit basis"),
    ]
}

/// Exponential loss of the which-arm coherence.
pub trait Dephase<T: Real>: Sized {
    /// Applies a factor `exp(-gamma * elapsed)` to the coherence. For a
    /// curve each sample's elapsed time is `t + times[i]`; for a density
    /// matrix it is `t`.
    fn dephase(&self, gamma: T, t: T) -> Self;
}

pub fn apply_dephasing<T: Real, D: Dephase<T>>(target: &D, gamma: T, t: T) -> D {
    target.dephase(gamma, t)
}

impl<T: Real> Dephase<T> for VisibilityCurve<T> {
    fn dephase(&self, gamma: T, t: T) -> Self {
        let mut out = self.clone();
        if gamma == T::zero() {
            return out;
        }
        for (v, ti) in out.visibility.iter_mut().zip(&self.times) {
            *v *= (-gamma * (t + *ti)).exp();
        }
        out
    }
}

/// Off-diagonal blocks of the first subsystem (the photon arm) are damped;
/// any remaining subsystems are left untouched.
impl<T: Real> Dephase<T> for DensityMatrix<T> {
    fn dephase(&self, gamma: T, t: T) -> Self {
        if gamma == T::zero() {
            return self.clone();
        }
        let factor = cr((-gamma * t).exp());
        let inner: usize = self.dims().iter().skip(1).product();
        let mut entries = self.entries().clone();
        for i in 0..entries.nrows() {
            for j in 0..entries.ncols() {
                if i / inner != j / inner {
                    entries[(i, j)] *= factor;
                }
            }
        }
        DensityMatrix::from_parts_unchecked(self.dims().to_vec(), entries)
    }
}

/// Absolute-vs-relative decoherence protocol: the fringes must first vanish
/// at half a period and the verdict then rests on whether they return after
/// a full period.
pub fn discriminate<T: Real>(
    params: &ModelParams<T>,
    revival_tol: T,
    suppression_tol: T,
) -> Result<Verdict<T>> {
    if !distinguishability_ok(params) {
        return Err(Error::PreconditionFailed(format!(
            "k^2 = {} < 1: mirror packets are not distinguishable",
            (params.k * params.k).as_f64()
        )));
    }
    let unit = |x: T| x > T::zero() && x < T::one();
    if !unit(revival_tol) || !unit(suppression_tol) {
        return Err(Error::InvalidArgument(
            "tolerances must lie in (0, 1)".into(),
        ));
    }
    let period = params.period();
    let mid = visibility(params, period * T::lit(0.5))?;
    let revival = visibility(params, period)?;
    let label = if mid > suppression_tol {
        VerdictLabel::Inconclusive
    } else if revival >= T::one() - revival_tol {
        VerdictLabel::RelativeDecoherence
    } else {
        VerdictLabel::AbsoluteDecoherence
    };
    Ok(Verdict {
        label,
        mid_visibility: mid,
        revival_visibility: revival,
    })
}
