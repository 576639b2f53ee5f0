use crate::spinor::{DiracSpinor, Handedness, Vec3, WeylSpinor};
use crate::states::{DiracField, WeylWavefunction, ZigzagState};

use super::{Branch, DynamicsError, DENSITY_FLOOR};

/// `±ψ†σψ/ψ†ψ`; unit norm for any nonzero spinor.
pub fn weyl_velocity(psi: &WeylSpinor, chi: Handedness) -> Result<Vec3, DynamicsError> {
    let rho = psi.norm_sqr();
    if !(rho > DENSITY_FLOOR) {
        return Err(DynamicsError::Node);
    }
    Ok(psi.spin_expectation() * (chi.sign() / rho))
}

/// `(ψ_R†σψ_R - ψ_L†σψ_L)/(ψ_L†ψ_L + ψ_R†ψ_R)`; never faster than light.
pub fn dirac_velocity(psi_l: &WeylSpinor, psi_r: &WeylSpinor) -> Result<Vec3, DynamicsError> {
    let rho = psi_l.norm_sqr() + psi_r.norm_sqr();
    if !(rho > DENSITY_FLOOR) {
        return Err(DynamicsError::Node);
    }
    Ok((psi_r.spin_expectation() - psi_l.spin_expectation()) / rho)
}

/// A time-dependent velocity field on space.
pub trait VelocityField {
    fn velocity(&self, t: f64, x: &Vec3) -> Result<Vec3, DynamicsError>;
}

impl<F> VelocityField for F
where
    F: Fn(f64, &Vec3) -> Result<Vec3, DynamicsError>,
{
    fn velocity(&self, t: f64, x: &Vec3) -> Result<Vec3, DynamicsError> {
        self(t, x)
    }
}

/// Guidance of a single Weyl particle by its own wavefunction.
#[derive(Debug, Clone, Copy)]
pub struct WeylGuidance<'a>(pub &'a WeylWavefunction);

impl VelocityField for WeylGuidance<'_> {
    fn velocity(&self, t: f64, x: &Vec3) -> Result<Vec3, DynamicsError> {
        weyl_velocity(&self.0.evaluate(t, x), self.0.handedness())
    }
}

/// Conventional Dirac guidance: both Weyl components traced together.
#[derive(Debug, Clone, Copy)]
pub struct DiracGuidance<'a, D: ?Sized>(pub &'a D);

impl<D: DiracField + ?Sized> VelocityField for DiracGuidance<'_, D> {
    fn velocity(&self, t: f64, x: &Vec3) -> Result<Vec3, DynamicsError> {
        let DiracSpinor { left, right } = self.0.dirac_spinor(t, x);
        dirac_velocity(&left, &right)
    }
}

/// Guidance of a zig-zag beable that stays on one branch.
#[derive(Debug, Clone, Copy)]
pub struct BranchGuidance<'a> {
    pub state: &'a ZigzagState,
    pub branch: Branch,
}

impl BranchGuidance<'_> {
    pub(crate) fn from_spinor(psi: &DiracSpinor, branch: Branch) -> Result<Vec3, DynamicsError> {
        match branch {
            Branch::Zig => weyl_velocity(&psi.left, Handedness::L),
            Branch::Zag => weyl_velocity(&psi.right, Handedness::R),
        }
    }
}

impl VelocityField for BranchGuidance<'_> {
    fn velocity(&self, t: f64, x: &Vec3) -> Result<Vec3, DynamicsError> {
        Self::from_spinor(&self.state.evaluate(t, x), self.branch)
    }
}
