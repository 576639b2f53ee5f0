//! Evaluable wavefunctions built from finite plane-wave superpositions.
//!
//! Plane waves are not square integrable, so the overall normalization is
//! left at the `(2π)^{-3/2}` convention. Every downstream consumer uses
//! densities only through ratios (velocities, rates) or after
//! renormalizing over a finite box.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::spinor::{helicity_spinor, pauli, DiracSpinor, Handedness, SpinorError, ThreeMomentum, Vec3, WeylSpinor};

/// `(2π)^{-3/2}`
pub fn plane_wave_norm() -> f64 {
    (2.0 * PI).powf(-1.5)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateError {
    #[error(transparent)]
    Spinor(#[from] SpinorError),
    #[error("wavefunction needs at least one mode")]
    NoModes,
    #[error("mixed handedness in mode list: mode {index} is {found}, expected {expected}")]
    MixedHandedness { index: usize, expected: Handedness, found: Handedness },
    #[error("massless zig-zag degenerate (m = {0})")]
    MasslessDegenerate(f64),
    #[error("finite-difference step must be positive, got {0}")]
    NonPositiveStep(f64),
    #[error("mode amplitude is not finite")]
    NonFiniteAmplitude,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnergySign {
    Positive,
    Negative,
}

impl EnergySign {
    pub fn sign(self) -> f64 {
        match self {
            EnergySign::Positive => 1.0,
            EnergySign::Negative => -1.0,
        }
    }
}

/// One plane-wave solution of a Weyl equation.
///
/// `handedness` names the equation (the `ψ_R` or `ψ_L` field). The helicity
/// of the spinor agrees with it for positive energy and is opposite for
/// negative energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub p: ThreeMomentum,
    pub amplitude: Complex64,
    pub energy_sign: EnergySign,
    pub handedness: Handedness,
}

impl Mode {
    pub fn new(p: ThreeMomentum, amplitude: Complex64, energy_sign: EnergySign, handedness: Handedness) -> Self {
        Self { p, amplitude, energy_sign, handedness }
    }

    /// Positive-energy mode with amplitude `modulus·e^{i phase}`.
    pub fn positive(p: ThreeMomentum, modulus: f64, phase: f64, handedness: Handedness) -> Self {
        Self::new(p, Complex64::from_polar(modulus, phase), EnergySign::Positive, handedness)
    }

    pub fn helicity(&self) -> Handedness {
        match self.energy_sign {
            EnergySign::Positive => self.handedness,
            EnergySign::Negative => self.handedness.flipped(),
        }
    }

    pub fn energy(&self) -> f64 {
        self.energy_sign.sign() * self.p.magnitude()
    }

    pub fn spinor(&self) -> Result<WeylSpinor, SpinorError> {
        helicity_spinor(&self.p, self.helicity())
    }
}

#[derive(Debug, Clone, Copy)]
struct Prepared {
    k: Vec3,
    omega: f64,
    coef: WeylSpinor,
}

impl Prepared {
    fn phase(&self, t: f64, x: &Vec3) -> Complex64 {
        let (s, c) = (self.k.dot(x) - self.omega * t).sin_cos();
        Complex64::new(c, s)
    }
}

/// Superposition of plane-wave solutions of one Weyl equation.
#[derive(Debug, Clone)]
pub struct WeylWavefunction {
    handedness: Handedness,
    modes: Vec<Mode>,
    normalization: f64,
    prepared: Vec<Prepared>,
}

impl WeylWavefunction {
    pub fn new(modes: Vec<Mode>) -> Result<Self, StateError> {
        let first = modes.first().ok_or(StateError::NoModes)?;
        let handedness = first.handedness;
        let mut prepared = Vec::with_capacity(modes.len());
        let norm = plane_wave_norm();
        for (index, mode) in modes.iter().enumerate() {
            if mode.handedness != handedness {
                return Err(StateError::MixedHandedness { index, expected: handedness, found: mode.handedness });
            }
            if !mode.amplitude.is_finite() {
                return Err(StateError::NonFiniteAmplitude);
            }
            let u = mode.spinor()?;
            prepared.push(Prepared { k: mode.p.as_vec3(), omega: mode.energy(), coef: u * (mode.amplitude * norm) });
        }
        Ok(Self { handedness, modes, normalization: 1.0, prepared })
    }

    /// Overall real prefactor applied on evaluation (default 1).
    pub fn with_normalization(mut self, normalization: f64) -> Self {
        self.normalization = normalization;
        self
    }

    pub fn handedness(&self) -> Handedness {
        self.handedness
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    pub fn evaluate(&self, t: f64, x: &Vec3) -> WeylSpinor {
        let sum = self.prepared.iter().fold(WeylSpinor::ZERO, |acc, m| acc + m.coef * m.phase(t, x));
        sum * self.normalization
    }

    /// `ψ†ψ`
    pub fn density(&self, t: f64, x: &Vec3) -> f64 {
        self.evaluate(t, x).norm_sqr()
    }

    /// `a·self + b·other`, as a single mode list.
    pub fn superpose(&self, a: Complex64, other: &WeylWavefunction, b: Complex64) -> Result<Self, StateError> {
        let mut modes = Vec::with_capacity(self.modes.len() + other.modes.len());
        for (wf, c) in [(self, a), (other, b)] {
            modes.extend(wf.modes.iter().map(|m| Mode { amplitude: m.amplitude * c * wf.normalization, ..*m }));
        }
        WeylWavefunction::new(modes)
    }
}

/// Amplitudes of the positive- and negative-energy Weyl components of a
/// massive electron of momentum magnitude `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZigzagCoefficients {
    /// `E_p = sqrt(p² + m²)`
    pub energy: f64,
    /// Positive-energy weight `N_c`.
    pub n_c: f64,
    /// Negative-energy weight `N_ζ`.
    pub n_zeta: f64,
}

/// Coefficients of the `E_p` eigenvector of `[[p, m], [m, -p]]`.
///
/// `N_ζ = sqrt((E-p)/2E)`, `N_c = m/sqrt(2E(E-p))`. Both are evaluated
/// through `E - p = m²/(E + p)`, so `N_c = sqrt((E+p)/2E)` with no
/// cancellation at large `p/m`.
pub fn zigzag_coefficients(p_mag: f64, m: f64) -> Result<ZigzagCoefficients, StateError> {
    if !(m > 0.0) || !m.is_finite() {
        return Err(StateError::MasslessDegenerate(m));
    }
    let p = p_mag.abs();
    let energy = p.hypot(m);
    let e_minus_p = m * m / (energy + p);
    Ok(ZigzagCoefficients {
        energy,
        n_c: ((energy + p) / (2.0 * energy)).sqrt(),
        n_zeta: (e_minus_p / (2.0 * energy)).sqrt(),
    })
}

/// Which Weyl field carries which coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CoefficientLabeling {
    /// `Ψ_R ∝ N_c`, `Ψ_L ∝ N_ζ`: the only assignment that solves the Dirac
    /// equation, since it gives `Ψ_R/Ψ_L = m/(E_p - p)`.
    #[default]
    DiracConsistent,
    /// `Ψ_L ∝ N_c`, `Ψ_R ∝ N_ζ`. Kept so the mismatch can be exhibited.
    Swapped,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZigzagMode {
    pub p: ThreeMomentum,
    pub alpha: Complex64,
    pub coefficients: ZigzagCoefficients,
}

#[derive(Debug, Clone, Copy)]
struct PreparedZigzag {
    k: Vec3,
    energy: f64,
    left: WeylSpinor,
    // (ratio_j - ratio_0)·left_j; zero for every mode sharing the
    // reference ratio, so single-momentum states have Δ ≡ 0 exactly.
    delta: WeylSpinor,
}

/// `(Ψ_L, Ψ_R)` together with `Im(Ψ_L†Ψ_R)` evaluated without cancellation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZigzagSample {
    pub spinor: DiracSpinor,
    /// `Im(Ψ_L†Ψ_R)`; exactly zero for momentum eigenstates.
    pub im_overlap: f64,
}

/// Right-handed massive electron as a superposition of positive- and
/// negative-energy right-handed Weyl particles.
///
/// `Ψ_L(t,x) = (2π)^{-3/2} Σ N_ζ(p) u_R(p) α(p) e^{-iE_p t + ip·x}` and
/// `Ψ_R(t,x) = (2π)^{-3/2} Σ N_c(p) u_R(p) α(p) e^{-iE_p t + ip·x}`.
#[derive(Debug, Clone)]
pub struct ZigzagState {
    mass: f64,
    modes: Vec<ZigzagMode>,
    labeling: CoefficientLabeling,
    ratio: f64,
    prepared: Vec<PreparedZigzag>,
}

/// Build a zig-zag electron state. Zero-momentum modes are rejected because
/// their helicity spinor is undefined.
pub fn make_zigzag_state(m: f64, modes: &[(ThreeMomentum, Complex64)]) -> Result<ZigzagState, StateError> {
    ZigzagState::with_labeling(m, modes, CoefficientLabeling::DiracConsistent)
}

impl ZigzagState {
    pub fn new(m: f64, modes: &[(ThreeMomentum, Complex64)]) -> Result<Self, StateError> {
        make_zigzag_state(m, modes)
    }

    pub fn with_labeling(
        m: f64,
        modes: &[(ThreeMomentum, Complex64)],
        labeling: CoefficientLabeling,
    ) -> Result<Self, StateError> {
        if !(m > 0.0) || !m.is_finite() {
            return Err(StateError::MasslessDegenerate(m));
        }
        if modes.is_empty() {
            return Err(StateError::NoModes);
        }
        let norm = plane_wave_norm();
        let mut out = Vec::with_capacity(modes.len());
        let mut prepared = Vec::with_capacity(modes.len());
        let mut ratio = None;
        for &(p, alpha) in modes {
            if !alpha.is_finite() {
                return Err(StateError::NonFiniteAmplitude);
            }
            let u = helicity_spinor(&p, Handedness::R)?;
            let coefficients = zigzag_coefficients(p.magnitude(), m)?;
            let (wl, wr) = match labeling {
                CoefficientLabeling::DiracConsistent => (coefficients.n_zeta, coefficients.n_c),
                CoefficientLabeling::Swapped => (coefficients.n_c, coefficients.n_zeta),
            };
            let r = wr / wl;
            let reference = *ratio.get_or_insert(r);
            let left = u * (alpha * norm) * wl;
            prepared.push(PreparedZigzag {
                k: p.as_vec3(),
                energy: coefficients.energy,
                left,
                delta: left * (r - reference),
            });
            out.push(ZigzagMode { p, alpha, coefficients });
        }
        Ok(Self { mass: m, modes: out, labeling, ratio: ratio.expect("nonempty"), prepared })
    }

    /// Same modes with the coefficient labels exchanged.
    pub fn with_swapped_coefficients(&self) -> Self {
        let labeling = match self.labeling {
            CoefficientLabeling::DiracConsistent => CoefficientLabeling::Swapped,
            CoefficientLabeling::Swapped => CoefficientLabeling::DiracConsistent,
        };
        let modes: Vec<_> = self.modes.iter().map(|m| (m.p, m.alpha)).collect();
        Self::with_labeling(self.mass, &modes, labeling).expect("modes already validated")
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn modes(&self) -> &[ZigzagMode] {
        &self.modes
    }

    pub fn labeling(&self) -> CoefficientLabeling {
        self.labeling
    }

    /// `(Ψ_L, Ψ_R)` at `(t, x)`.
    pub fn evaluate(&self, t: f64, x: &Vec3) -> DiracSpinor {
        self.sample(t, x).spinor
    }

    /// `(Ψ_L, Ψ_R)` and `Im(Ψ_L†Ψ_R)` at `(t, x)`.
    ///
    /// `Ψ_R` is assembled as `r₀Ψ_L + Δ`, where `r₀` is the `Ψ_R/Ψ_L`
    /// weight ratio of the first mode. Then `Im(Ψ_L†Ψ_R) = Im(Ψ_L†Δ)`.
    pub fn sample(&self, t: f64, x: &Vec3) -> ZigzagSample {
        let mut left = WeylSpinor::ZERO;
        let mut delta = WeylSpinor::ZERO;
        for m in &self.prepared {
            let (s, c) = (m.k.dot(x) - m.energy * t).sin_cos();
            let phase = Complex64::new(c, s);
            left = left + m.left * phase;
            delta = delta + m.delta * phase;
        }
        let right = left * self.ratio + delta;
        ZigzagSample { spinor: DiracSpinor::new(left, right), im_overlap: left.inner(&delta).im }
    }

    /// `ρ_S = Ψ_L†Ψ_L + Ψ_R†Ψ_R`
    pub fn density(&self, t: f64, x: &Vec3) -> f64 {
        self.evaluate(t, x).density()
    }
}

/// Anything that yields a Dirac spinor `(Ψ_L, Ψ_R)` on spacetime.
pub trait DiracField {
    fn dirac_spinor(&self, t: f64, x: &Vec3) -> DiracSpinor;
}

impl DiracField for ZigzagState {
    fn dirac_spinor(&self, t: f64, x: &Vec3) -> DiracSpinor {
        self.evaluate(t, x)
    }
}

impl<F> DiracField for F
where
    F: Fn(f64, &Vec3) -> DiracSpinor,
{
    fn dirac_spinor(&self, t: f64, x: &Vec3) -> DiracSpinor {
        self(t, x)
    }
}

/// Norm of `(iγ^μ∂_μ - m)Ψ` at `(t, x)` using central differences of
/// step `h` in every coordinate. In the Weyl representation the two rows are
/// `i(∂_t + σ·∇)Ψ_R - mΨ_L` and `i(∂_t - σ·∇)Ψ_L - mΨ_R`.
pub fn dirac_residual<D: DiracField + ?Sized>(wf: &D, m: f64, t: f64, x: &Vec3, h: f64) -> Result<f64, StateError> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(StateError::NonPositiveStep(h));
    }
    let inv = 1.0 / (2.0 * h);
    let diff = |a: DiracSpinor, b: DiracSpinor| DiracSpinor::new((a.left - b.left) * inv, (a.right - b.right) * inv);
    let dt = diff(wf.dirac_spinor(t + h, x), wf.dirac_spinor(t - h, x));
    let sigma = pauli();
    let mut sigma_grad_l = WeylSpinor::ZERO;
    let mut sigma_grad_r = WeylSpinor::ZERO;
    for (axis, s) in sigma.iter().enumerate() {
        let mut step = Vec3::zeros();
        step[axis] = h;
        let d = diff(wf.dirac_spinor(t, &(x + step)), wf.dirac_spinor(t, &(x - step)));
        sigma_grad_l = sigma_grad_l + WeylSpinor::apply(s, &d.left);
        sigma_grad_r = sigma_grad_r + WeylSpinor::apply(s, &d.right);
    }
    let here = wf.dirac_spinor(t, x);
    let i = Complex64::new(0.0, 1.0);
    let top = (dt.right + sigma_grad_r) * i - here.left * m;
    let bottom = (dt.left - sigma_grad_l) * i - here.right * m;
    Ok((top.norm_sqr() + bottom.norm_sqr()).sqrt())
}
