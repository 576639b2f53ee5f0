//! Built-in states and initial conditions.
//!
//! The three-mode state superposes positive-energy plane waves with momenta
//! (1,0,1), (-1,-2,-1), (1,-1,1), equal weights and relative phases 1,
//! e^{4i}, e^{9i}. Its density and velocity field are periodic with periods
//! (π, 2π, π), because every momentum difference is an integer vector with
//! even x and z components.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::ensemble::BoxRegion;
use crate::spinor::{Handedness, ThreeMomentum, Vec3};
use crate::states::{make_zigzag_state, Mode, WeylWavefunction, ZigzagState};

pub const THREE_MODE_MOMENTA: [[f64; 3]; 3] = [[1.0, 0.0, 1.0], [-1.0, -2.0, -1.0], [1.0, -1.0, 1.0]];
pub const THREE_MODE_PHASES: [f64; 3] = [0.0, 4.0, 9.0];

/// Starting points of the seven Weyl trajectories: the isolated one first,
/// then the couple, then the remaining four.
pub const WEYL_STARTS: [[f64; 3]; 7] = [
    [0.0, 0.0, 0.0],
    [-1.0, 0.0, 0.0],
    [0.0, 0.0, -1.0],
    [0.0, 0.0, 1.0],
    [0.0, 1.0, 0.0],
    [1.0, 0.0, 0.0],
    [0.0, -1.0, 0.0],
];

pub const ZIGZAG_START: [f64; 3] = [0.0, 1.0, 0.0];
pub const ZIGZAG_MASS: f64 = 10.0;
pub const RUN_SPAN: (f64, f64) = (0.0, 50.0);

/// `(p, α)` pairs of the three-mode superposition, amplitudes `e^{iφ}/√3`.
pub fn three_mode_terms() -> Vec<(ThreeMomentum, Complex64)> {
    THREE_MODE_MOMENTA
        .iter()
        .zip(THREE_MODE_PHASES)
        .map(|(&p, phase)| (ThreeMomentum::from(p), Complex64::from_polar(1.0 / 3f64.sqrt(), phase)))
        .collect()
}

/// Right-handed Weyl wavefunction of the three-mode superposition.
pub fn three_mode_weyl() -> WeylWavefunction {
    let modes =
        three_mode_terms().into_iter().map(|(p, a)| Mode::positive(p, a.norm(), a.arg(), Handedness::R)).collect();
    WeylWavefunction::new(modes).expect("fixed modes are valid")
}

/// Zig-zag electron of mass 10 in the three-mode superposition.
pub fn three_mode_zigzag() -> ZigzagState {
    make_zigzag_state(ZIGZAG_MASS, &three_mode_terms()).expect("fixed modes are valid")
}

/// One period cell of the three-mode state, as a torus.
pub fn three_mode_cell() -> BoxRegion {
    BoxRegion::periodic(Vec3::zeros(), Vec3::new(PI, 2.0 * PI, PI)).expect("valid box")
}

/// The lower octant of [`three_mode_cell`].
pub fn three_mode_octant() -> BoxRegion {
    BoxRegion::new(Vec3::zeros(), Vec3::new(PI / 2.0, PI, PI / 2.0)).expect("valid box")
}
