//! Two-component spinor algebra in the Weyl representation.
//!
//! Everything here is a pure value computation at full double precision.
//! Tolerances belong to callers and tests.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Matrix2, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Spatial 3-vector (positions, velocities), natural units.
pub type Vec3 = Vector3<f64>;

/// Complex 2x2 matrix acting on Weyl spinors.
pub type Mat2 = Matrix2<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpinorError {
    #[error("helicity undefined at p = 0")]
    ZeroMomentum,
    #[error("momentum component is not finite")]
    NonFinite,
}

/// Which Weyl equation a spinor obeys, or equivalently the sign of the
/// helicity operator on positive-energy solutions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Handedness {
    R,
    L,
}

impl Handedness {
    /// +1 for `R`, -1 for `L`.
    pub fn sign(self) -> f64 {
        match self {
            Handedness::R => 1.0,
            Handedness::L => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Handedness::R => Handedness::L,
            Handedness::L => Handedness::R,
        }
    }
}

impl fmt::Display for Handedness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Handedness::R => f.write_str("R"),
            Handedness::L => f.write_str("L"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ThreeMomentum {
    pub px: f64,
    pub py: f64,
    pub pz: f64,
}

impl ThreeMomentum {
    pub const fn new(px: f64, py: f64, pz: f64) -> Self {
        Self { px, py, pz }
    }

    pub fn magnitude(&self) -> f64 {
        self.as_vec3().norm()
    }

    pub fn as_vec3(&self) -> Vec3 {
        Vec3::new(self.px, self.py, self.pz)
    }

    pub fn dot(&self, x: &Vec3) -> f64 {
        self.px * x.x + self.py * x.y + self.pz * x.z
    }

    pub fn is_finite(&self) -> bool {
        self.px.is_finite() && self.py.is_finite() && self.pz.is_finite()
    }
}

impl From<Vec3> for ThreeMomentum {
    fn from(v: Vec3) -> Self {
        Self::new(v.x, v.y, v.z)
    }
}

impl From<[f64; 3]> for ThreeMomentum {
    fn from(v: [f64; 3]) -> Self {
        Self::new(v[0], v[1], v[2])
    }
}

/// A two-component complex amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct WeylSpinor {
    pub c1: Complex64,
    pub c2: Complex64,
}

impl WeylSpinor {
    pub const ZERO: WeylSpinor = WeylSpinor { c1: ZERO, c2: ZERO };

    pub const fn new(c1: Complex64, c2: Complex64) -> Self {
        Self { c1, c2 }
    }

    pub fn from_real(a: f64, b: f64) -> Self {
        Self::new(Complex64::new(a, 0.0), Complex64::new(b, 0.0))
    }

    /// `ψ†ψ`
    pub fn norm_sqr(&self) -> f64 {
        self.c1.norm_sqr() + self.c2.norm_sqr()
    }

    /// `self† other`
    pub fn inner(&self, other: &WeylSpinor) -> Complex64 {
        self.c1.conj() * other.c1 + self.c2.conj() * other.c2
    }

    /// `ψ†σ⃗ψ`, the spin expectation (unnormalized).
    pub fn spin_expectation(&self) -> Vec3 {
        let z = self.c1.conj() * self.c2;
        Vec3::new(2.0 * z.re, 2.0 * z.im, self.c1.norm_sqr() - self.c2.norm_sqr())
    }

    pub fn apply(m: &Mat2, psi: &WeylSpinor) -> WeylSpinor {
        WeylSpinor::new(m[(0, 0)] * psi.c1 + m[(0, 1)] * psi.c2, m[(1, 0)] * psi.c1 + m[(1, 1)] * psi.c2)
    }

    pub fn is_finite(&self) -> bool {
        self.c1.is_finite() && self.c2.is_finite()
    }
}

impl Add for WeylSpinor {
    type Output = WeylSpinor;
    fn add(self, rhs: WeylSpinor) -> WeylSpinor {
        WeylSpinor::new(self.c1 + rhs.c1, self.c2 + rhs.c2)
    }
}

impl Sub for WeylSpinor {
    type Output = WeylSpinor;
    fn sub(self, rhs: WeylSpinor) -> WeylSpinor {
        WeylSpinor::new(self.c1 - rhs.c1, self.c2 - rhs.c2)
    }
}

impl Neg for WeylSpinor {
    type Output = WeylSpinor;
    fn neg(self) -> WeylSpinor {
        WeylSpinor::new(-self.c1, -self.c2)
    }
}

impl Mul<Complex64> for WeylSpinor {
    type Output = WeylSpinor;
    fn mul(self, rhs: Complex64) -> WeylSpinor {
        WeylSpinor::new(self.c1 * rhs, self.c2 * rhs)
    }
}

impl Mul<f64> for WeylSpinor {
    type Output = WeylSpinor;
    fn mul(self, rhs: f64) -> WeylSpinor {
        WeylSpinor::new(self.c1 * rhs, self.c2 * rhs)
    }
}

/// Dirac 4-spinor in the Weyl representation, ordered `(ψ_L, ψ_R)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DiracSpinor {
    pub left: WeylSpinor,
    pub right: WeylSpinor,
}

impl DiracSpinor {
    pub const fn new(left: WeylSpinor, right: WeylSpinor) -> Self {
        Self { left, right }
    }

    /// `ψ_L†ψ_L + ψ_R†ψ_R`
    pub fn density(&self) -> f64 {
        self.left.norm_sqr() + self.right.norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.density().sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FourCurrent {
    pub j0: f64,
    pub jx: f64,
    pub jy: f64,
    pub jz: f64,
}

impl FourCurrent {
    pub const fn new(j0: f64, jx: f64, jy: f64, jz: f64) -> Self {
        Self { j0, jx, jy, jz }
    }

    pub fn spatial(&self) -> Vec3 {
        Vec3::new(self.jx, self.jy, self.jz)
    }
}

/// The Pauli matrices `[σ₁, σ₂, σ₃]`.
pub fn pauli() -> [Mat2; 3] {
    [Mat2::new(ZERO, ONE, ONE, ZERO), Mat2::new(ZERO, -I, I, ZERO), Mat2::new(ONE, ZERO, ZERO, -ONE)]
}

/// `px σ₁ + py σ₂ + pz σ₃`
pub fn sigma_dot(p: &ThreeMomentum) -> Mat2 {
    Mat2::new(
        Complex64::new(p.pz, 0.0),
        Complex64::new(p.px, -p.py),
        Complex64::new(p.px, p.py),
        Complex64::new(-p.pz, 0.0),
    )
}

/// Unit helicity eigenspinor: `(σ·p̂) u_R = u_R`, `(σ·p̂) u_L = -u_L`.
///
/// Uses the phase convention `u_R ∝ (|p| + σ·p)(1,0)ᵀ` and
/// `u_L ∝ (|p| - σ·p)(0,1)ᵀ` for every direction. When `pz < 0` the
/// factor `|p| + pz` is formed as `(px² + py²)/(|p| - pz)`, so there is
/// no cancellation. On the negative z axis itself the convention has no
/// limit; there we return `u_R = (0, 1)`, `u_L = (-1, 0)`.
pub fn helicity_spinor(p: &ThreeMomentum, chi: Handedness) -> Result<WeylSpinor, SpinorError> {
    if !p.is_finite() {
        return Err(SpinorError::NonFinite);
    }
    let mag = p.magnitude();
    if mag == 0.0 {
        return Err(SpinorError::ZeroMomentum);
    }
    let rho2 = p.px * p.px + p.py * p.py;
    let plus = if p.pz >= 0.0 { mag + p.pz } else { rho2 / (mag - p.pz) };
    if plus <= 0.0 {
        return Ok(match chi {
            Handedness::R => WeylSpinor::from_real(0.0, 1.0),
            Handedness::L => WeylSpinor::from_real(-1.0, 0.0),
        });
    }
    let n = 1.0 / (2.0 * mag * plus).sqrt();
    let spinor = match chi {
        Handedness::R => WeylSpinor::new(Complex64::new(plus * n, 0.0), Complex64::new(p.px * n, p.py * n)),
        Handedness::L => WeylSpinor::new(Complex64::new(-p.px * n, p.py * n), Complex64::new(plus * n, 0.0)),
    };
    Ok(spinor)
}

/// `j^μ = ψ†σ^μψ` for `R`, `ψ†σ̃^μψ` for `L`.
pub fn weyl_current(psi: &WeylSpinor, chi: Handedness) -> FourCurrent {
    let s = psi.spin_expectation() * chi.sign();
    FourCurrent::new(psi.norm_sqr(), s.x, s.y, s.z)
}

/// `g_{μν} j^μ j^ν` with signature `(+, -, -, -)`.
pub fn minkowski_norm(j: &FourCurrent) -> f64 {
    j.j0 * j.j0 - j.jx * j.jx - j.jy * j.jy - j.jz * j.jz
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    fn mat_close(a: &Mat2, b: &Mat2, tol: f64) -> bool {
        (0..2).all(|i| (0..2).all(|j| close(a[(i, j)], b[(i, j)], tol)))
    }

    /// Literal transcription of the textbook formula with
    /// `N = 1/sqrt(2|p|(|p|+pz))`, valid away from the negative z axis.
    fn naive_helicity(p: &ThreeMomentum, chi: Handedness) -> WeylSpinor {
        let mag = p.magnitude();
        let n = 1.0 / (2.0 * mag * (mag + p.pz)).sqrt();
        match chi {
            Handedness::R => WeylSpinor::new(Complex64::new((mag + p.pz) * n, 0.0), Complex64::new(p.px * n, p.py * n)),
            Handedness::L => {
                WeylSpinor::new(Complex64::new(-p.px * n, p.py * n), Complex64::new((mag + p.pz) * n, 0.0))
            }
        }
    }

    #[test]
    fn sigma_dot_examples() {
        let [s1, _, s3] = pauli();
        assert!(mat_close(&sigma_dot(&ThreeMomentum::new(0.0, 0.0, 1.0)), &s3, 1e-15));
        assert!(mat_close(&sigma_dot(&ThreeMomentum::new(1.0, 0.0, 0.0)), &s1, 1e-15));
        assert!(mat_close(&sigma_dot(&ThreeMomentum::default()), &Mat2::zeros(), 1e-15));
    }

    #[test]
    fn helicity_examples() {
        let z = ThreeMomentum::new(0.0, 0.0, 1.0);
        assert_eq!(helicity_spinor(&z, Handedness::R).unwrap(), WeylSpinor::from_real(1.0, 0.0));
        assert_eq!(helicity_spinor(&z, Handedness::L).unwrap(), WeylSpinor::from_real(0.0, 1.0));

        let x = ThreeMomentum::new(1.0, 0.0, 0.0);
        let u = helicity_spinor(&x, Handedness::R).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(close(u.c1, Complex64::new(h, 0.0), 1e-15));
        assert!(close(u.c2, Complex64::new(h, 0.0), 1e-15));
        let su = WeylSpinor::apply(&sigma_dot(&x), &u);
        assert!((su - u).norm_sqr() < 1e-30);
    }

    #[test]
    fn zero_momentum_rejected() {
        let err = helicity_spinor(&ThreeMomentum::default(), Handedness::R).unwrap_err();
        assert_eq!(err, SpinorError::ZeroMomentum);
        assert_eq!(err.to_string(), "helicity undefined at p = 0");
        assert_eq!(
            helicity_spinor(&ThreeMomentum::new(f64::NAN, 0.0, 1.0), Handedness::L),
            Err(SpinorError::NonFinite)
        );
    }

    #[test]
    fn negative_z_axis_is_an_eigenvector() {
        let p = ThreeMomentum::new(0.0, 0.0, -2.5);
        for chi in [Handedness::R, Handedness::L] {
            let u = helicity_spinor(&p, chi).unwrap();
            let su = WeylSpinor::apply(&sigma_dot(&p), &u) * (1.0 / p.magnitude());
            assert!((su - u * chi.sign()).norm_sqr() < 1e-30);
        }
    }

    #[test]
    fn stable_branch_keeps_the_phase_convention() {
        // p2 of the three-mode example state has pz < 0.
        let p = ThreeMomentum::new(-1.0, -2.0, -1.0);
        for chi in [Handedness::R, Handedness::L] {
            let a = helicity_spinor(&p, chi).unwrap();
            let b = naive_helicity(&p, chi);
            assert!((a - b).norm_sqr() < 1e-28, "{chi}: {a:?} vs {b:?}");
        }
    }

    #[test]
    fn current_examples() {
        let j = weyl_current(&WeylSpinor::from_real(1.0, 0.0), Handedness::R);
        assert_eq!(j, FourCurrent::new(1.0, 0.0, 0.0, 1.0));
        let j = weyl_current(&WeylSpinor::from_real(0.0, 1.0), Handedness::R);
        assert_eq!(j, FourCurrent::new(1.0, 0.0, 0.0, -1.0));
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let j = weyl_current(&WeylSpinor::from_real(h, h), Handedness::R);
        assert!((j.j0 - 1.0).abs() < 1e-15 && (j.jx - 1.0).abs() < 1e-15);
        assert!(j.jy.abs() < 1e-15 && j.jz.abs() < 1e-15);
    }

    #[test]
    fn minkowski_examples() {
        assert_eq!(minkowski_norm(&FourCurrent::new(1.0, 0.0, 0.0, 1.0)), 0.0);
        assert_eq!(minkowski_norm(&FourCurrent::new(1.0, 0.0, 0.0, 0.0)), 1.0);
        assert_eq!(minkowski_norm(&FourCurrent::new(2.0, 1.0, 1.0, 1.0)), 1.0);
    }

    #[test]
    fn helicity_orthonormal() {
        let p = ThreeMomentum::new(0.3, -0.7, 0.2);
        let ur = helicity_spinor(&p, Handedness::R).unwrap();
        let ul = helicity_spinor(&p, Handedness::L).unwrap();
        assert!((ur.norm_sqr() - 1.0).abs() < 1e-15);
        assert!((ul.norm_sqr() - 1.0).abs() < 1e-15);
        assert!(ul.inner(&ur).norm() < 1e-15);
    }

    fn momentum() -> impl Strategy<Value = ThreeMomentum> {
        // direction from a Gaussian-ish cube, magnitude log-uniform on [1e-3, 1e3]
        (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, -3.0f64..3.0)
            .prop_filter("nonzero direction", |(x, y, z, _)| x * x + y * y + z * z > 1e-6)
            .prop_map(|(x, y, z, e)| {
                let v = Vec3::new(x, y, z).normalize() * 10f64.powf(e);
                ThreeMomentum::from(v)
            })
    }

    proptest! {
        #[test]
        fn helicity_eigen_equation(p in momentum()) {
            let mag = p.magnitude();
            let s = sigma_dot(&p);
            for chi in [Handedness::R, Handedness::L] {
                let u = helicity_spinor(&p, chi).unwrap();
                let su = WeylSpinor::apply(&s, &u) * (1.0 / mag);
                prop_assert!((su - u * chi.sign()).norm_sqr().sqrt() < 1e-12);
                prop_assert!((u.norm_sqr() - 1.0).abs() < 1e-12);
            }
        }

        // u_R carries spin along p̂ and u_L against it, so both helicity
        // spinors give |ψ†σψ| = 1 with opposite orientation.
        #[test]
        fn spin_expectation_tracks_direction(p in momentum()) {
            let phat = p.as_vec3() / p.magnitude();
            let ur = helicity_spinor(&p, Handedness::R).unwrap();
            let ul = helicity_spinor(&p, Handedness::L).unwrap();
            prop_assert!((ur.spin_expectation() - phat).norm() < 1e-12);
            prop_assert!((ul.spin_expectation() + phat).norm() < 1e-12);
        }

        #[test]
        fn clifford_square(p in momentum()) {
            let s = sigma_dot(&p);
            let sq = s * s;
            let m2 = p.magnitude().powi(2);
            let id = Mat2::identity() * Complex64::new(m2, 0.0);
            prop_assert!(mat_close(&sq, &id, 1e-12 * m2.max(1.0)));
            prop_assert!((s[(0, 0)] + s[(1, 1)]).norm() == 0.0);
            prop_assert!(mat_close(&s, &s.adjoint(), 1e-15));
        }

        #[test]
        fn currents_are_lightlike(
            a in -1.0f64..1.0, b in -1.0f64..1.0, c in -1.0f64..1.0, d in -1.0f64..1.0
        ) {
            let psi = WeylSpinor::new(Complex64::new(a, b), Complex64::new(c, d));
            prop_assume!(psi.norm_sqr() > 1e-6);
            let psi = psi * (1.0 / psi.norm_sqr().sqrt());
            for chi in [Handedness::R, Handedness::L] {
                prop_assert!(minkowski_norm(&weyl_current(&psi, chi)).abs() < 1e-12);
            }
        }
    }
}
