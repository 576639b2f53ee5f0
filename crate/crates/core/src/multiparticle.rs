//! Two right-handed Weyl particles sharing a 2×2 spin array `Ψ_{a₁a₂}(x₁, x₂)`.
//!
//! With `ρ = Σ|Ψ_{b₁b₂}|²` the velocities are
//! `v₁ = Σ Ψ*_{a₁a₂} σ_{a₁b₁} Ψ_{b₁a₂}/ρ` and
//! `v₂ = Σ Ψ*_{a₁a₂} σ_{a₂b₂} Ψ_{a₁b₂}/ρ`. Writing `Ψ_{ij} = R_{ij}e^{iθ_{ij}}`,
//! `1 - |v₁|² = 4|Ψ₁₁Ψ₂₂ - Ψ₁₂Ψ₂₁|²/ρ²`, which vanishes for product states.

use num_complex::Complex64;
use thiserror::Error;

use crate::dynamics::DENSITY_FLOOR;
use crate::spinor::{pauli, Handedness, Mat2, Vec3, WeylSpinor};
use crate::states::{Mode, StateError, WeylWavefunction};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TwoParticleError {
    #[error("velocity undefined: two-particle density vanishes")]
    ZeroDensity,
    #[error("identical modes give a vanishing antisymmetric state")]
    IdenticalModes,
    #[error("only right-handed two-particle states are supported")]
    NotRightHanded,
    #[error("two-particle state needs at least one term")]
    NoTerms,
    #[error(transparent)]
    State(#[from] StateError),
}

/// `Σ_k c_k φ_k(x₁) ⊗ χ_k(x₂)` over right-handed single-particle factors.
#[derive(Debug, Clone)]
pub struct TwoWeylWavefunction {
    terms: Vec<(Complex64, WeylWavefunction, WeylWavefunction)>,
}

fn outer(a: &WeylSpinor, b: &WeylSpinor) -> Mat2 {
    Mat2::new(a.c1 * b.c1, a.c1 * b.c2, a.c2 * b.c1, a.c2 * b.c2)
}

impl TwoWeylWavefunction {
    pub fn from_terms(terms: Vec<(Complex64, WeylWavefunction, WeylWavefunction)>) -> Result<Self, TwoParticleError> {
        if terms.is_empty() {
            return Err(TwoParticleError::NoTerms);
        }
        if terms.iter().any(|(_, a, b)| a.handedness() != Handedness::R || b.handedness() != Handedness::R) {
            return Err(TwoParticleError::NotRightHanded);
        }
        Ok(Self { terms })
    }

    pub fn product(first: WeylWavefunction, second: WeylWavefunction) -> Result<Self, TwoParticleError> {
        Self::from_terms(vec![(Complex64::new(1.0, 0.0), first, second)])
    }

    /// Spin array with rows indexed by particle 1 and columns by particle 2.
    pub fn evaluate(&self, t: f64, x1: &Vec3, x2: &Vec3) -> Mat2 {
        self.terms.iter().fold(Mat2::zeros(), |acc, (c, a, b)| acc + outer(&a.evaluate(t, x1), &b.evaluate(t, x2)) * *c)
    }

    pub fn density(&self, t: f64, x1: &Vec3, x2: &Vec3) -> f64 {
        spin_array_density(&self.evaluate(t, x1, x2))
    }
}

/// `(a(x₁)b(x₂) - b(x₁)a(x₂))/√2` for two right-handed modes.
pub fn antisymmetrize(a: &Mode, b: &Mode) -> Result<TwoWeylWavefunction, TwoParticleError> {
    if a.p == b.p && a.energy_sign == b.energy_sign && a.handedness == b.handedness {
        return Err(TwoParticleError::IdenticalModes);
    }
    let wa = WeylWavefunction::new(vec![*a])?;
    let wb = WeylWavefunction::new(vec![*b])?;
    let c = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    TwoWeylWavefunction::from_terms(vec![(c, wa.clone(), wb.clone()), (-c, wb, wa)])
}

pub fn spin_array_density(m: &Mat2) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum()
}

/// `(v₁, v₂)` for a spin array.
pub fn spin_array_velocities(m: &Mat2) -> Result<(Vec3, Vec3), TwoParticleError> {
    let rho = spin_array_density(m);
    if !(rho > DENSITY_FLOOR) {
        return Err(TwoParticleError::ZeroDensity);
    }
    let mut v1 = Vec3::zeros();
    let mut v2 = Vec3::zeros();
    for (k, s) in pauli().iter().enumerate() {
        let mut a = Complex64::new(0.0, 0.0);
        let mut b = Complex64::new(0.0, 0.0);
        for i in 0..2 {
            for j in 0..2 {
                for l in 0..2 {
                    // σ on the first index, then on the second
                    a += m[(i, j)].conj() * s[(i, l)] * m[(l, j)];
                    b += m[(i, j)].conj() * s[(j, l)] * m[(i, l)];
                }
            }
        }
        v1[k] = a.re / rho;
        v2[k] = b.re / rho;
    }
    Ok((v1, v2))
}

/// `1 - |v₁|²` from the polar form of the spin array:
/// `(4/ρ²)(R₁₁²R₂₂² + R₂₁²R₁₂² - 2cos(θ₁₁+θ₂₂-θ₁₂-θ₂₁)R₁₁R₂₂R₁₂R₂₁)`.
pub fn spin_array_speed_defect(m: &Mat2) -> Result<f64, TwoParticleError> {
    let rho = spin_array_density(m);
    if !(rho > DENSITY_FLOOR) {
        return Err(TwoParticleError::ZeroDensity);
    }
    let r = |i, j| m[(i, j)].norm();
    let th = |i, j| m[(i, j)].arg();
    let (r11, r12, r21, r22) = (r(0, 0), r(0, 1), r(1, 0), r(1, 1));
    let phase = th(0, 0) + th(1, 1) - th(0, 1) - th(1, 0);
    let cross = r11 * r22 * r12 * r21;
    Ok(4.0 / (rho * rho) * ((r11 * r22).powi(2) + (r21 * r12).powi(2) - 2.0 * phase.cos() * cross))
}

pub fn two_weyl_velocities(
    wf: &TwoWeylWavefunction,
    t: f64,
    x1: &Vec3,
    x2: &Vec3,
) -> Result<(Vec3, Vec3), TwoParticleError> {
    spin_array_velocities(&wf.evaluate(t, x1, x2))
}

pub fn speed_defect(wf: &TwoWeylWavefunction, t: f64, x1: &Vec3, x2: &Vec3) -> Result<f64, TwoParticleError> {
    spin_array_speed_defect(&wf.evaluate(t, x1, x2))
}
