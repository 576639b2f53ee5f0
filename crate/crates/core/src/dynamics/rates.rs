use crate::spinor::{DiracSpinor, Vec3};
use crate::states::ZigzagState;

use super::{Branch, DynamicsError, DENSITY_FLOOR};

fn rate_from(im_overlap: f64, psi: &DiracSpinor, m: f64, from: Branch) -> Result<f64, DynamicsError> {
    // Im(Ψ_R†Ψ_L) = -Im(Ψ_L†Ψ_R), so only one direction is ever open.
    let (flux, rho) = match from {
        Branch::Zag => (im_overlap, psi.right.norm_sqr()),
        Branch::Zig => (-im_overlap, psi.left.norm_sqr()),
    };
    if !(rho > DENSITY_FLOOR) {
        return Err(DynamicsError::ZeroBranchDensity(from));
    }
    Ok(2.0 * m * flux.max(0.0) / rho)
}

/// Jump rate out of `from` for a bare spinor pair.
///
/// ZAG→ZIG is `2m[Im(Ψ_L†Ψ_R)]⁺/Ψ_R†Ψ_R`, ZIG→ZAG is
/// `2m[Im(Ψ_R†Ψ_L)]⁺/Ψ_L†Ψ_L`. Jumps keep the position.
pub fn jump_rate(psi: &DiracSpinor, m: f64, from: Branch) -> Result<f64, DynamicsError> {
    rate_from(psi.left.inner(&psi.right).im, psi, m, from)
}

/// Jump rate out of `from` at `(t, x)` for a zig-zag state.
pub fn zigzag_jump_rate(state: &ZigzagState, t: f64, x: &Vec3, from: Branch) -> Result<f64, DynamicsError> {
    let sample = state.sample(t, x);
    rate_from(sample.im_overlap, &sample.spinor, state.mass(), from)
}

pub(crate) fn rate_for_sample(
    sample: &crate::states::ZigzagSample,
    m: f64,
    from: Branch,
) -> Result<f64, DynamicsError> {
    rate_from(sample.im_overlap, &sample.spinor, m, from)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spinor::{ThreeMomentum, WeylSpinor};
    use crate::states::make_zigzag_state;
    use num_complex::Complex64;

    #[test]
    fn eigenstate_rate_is_exactly_zero() {
        let state = make_zigzag_state(10.0, &[(ThreeMomentum::new(-1.0, -2.0, -1.0), Complex64::from_polar(0.5, 4.0))])
            .unwrap();
        for i in 0..200 {
            let s = i as f64;
            let x = Vec3::new((0.37 * s).sin() * 5.0, (1.1 * s).cos() * 5.0, 0.01 * s);
            for b in [Branch::Zig, Branch::Zag] {
                assert_eq!(zigzag_jump_rate(&state, 0.13 * s, &x, b).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn sign_selects_direction() {
        let i = Complex64::new(0.0, 1.0);
        // Ψ_L = (1,0), Ψ_R = (-i,0): Ψ_L†Ψ_R = -i, Im < 0
        let psi = DiracSpinor::new(WeylSpinor::from_real(1.0, 0.0), WeylSpinor::new(-i, Complex64::new(0.0, 0.0)));
        assert_eq!(jump_rate(&psi, 3.0, Branch::Zag).unwrap(), 0.0);
        assert_eq!(jump_rate(&psi, 3.0, Branch::Zig).unwrap(), 6.0);
    }

    #[test]
    fn zero_from_density_is_an_error() {
        let psi = DiracSpinor::new(WeylSpinor::ZERO, WeylSpinor::from_real(1.0, 0.0));
        assert_eq!(jump_rate(&psi, 1.0, Branch::Zig), Err(DynamicsError::ZeroBranchDensity(Branch::Zig)));
        assert_eq!(jump_rate(&psi, 1.0, Branch::Zag).unwrap(), 0.0);
    }

    #[test]
    fn structured_and_direct_rates_agree() {
        let state = make_zigzag_state(
            10.0,
            &[
                (ThreeMomentum::new(1.0, 0.0, 1.0), Complex64::new(1.0, 0.0)),
                (ThreeMomentum::new(-1.0, -2.0, -1.0), Complex64::from_polar(1.0, 4.0)),
                (ThreeMomentum::new(1.0, -1.0, 1.0), Complex64::from_polar(1.0, 9.0)),
            ],
        )
        .unwrap();
        let mut open = 0;
        for k in 0..500 {
            let s = k as f64 * 0.1;
            let x = Vec3::new(s.sin(), (0.7 * s).cos(), 0.3 * s);
            let psi = state.evaluate(s, &x);
            let mut product = 1.0;
            for b in [Branch::Zig, Branch::Zag] {
                let a = zigzag_jump_rate(&state, s, &x, b).unwrap();
                let d = jump_rate(&psi, 10.0, b).unwrap();
                assert!((a - d).abs() <= 1e-10 * (1.0 + d), "{a} vs {d}");
                product *= a;
                if a > 0.0 {
                    open += 1;
                }
            }
            assert_eq!(product, 0.0);
        }
        assert!(open > 100);
    }
}
