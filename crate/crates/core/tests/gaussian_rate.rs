//! Jump rate of a slow Gaussian packet.
//!
//! For `|φ|² ∝ exp(-z²/2σ²)` the exact rate out of the branch that loses
//! density on `z > 0` is `z/σ²` at leading order in `p/m`.

use num_complex::Complex64;
use zigzag_core::dynamics::{zigzag_jump_rate, Branch};
use zigzag_core::spinor::{ThreeMomentum, Vec3};
use zigzag_core::states::{make_zigzag_state, ZigzagState};

const MASS: f64 = 1000.0;
const CENTRAL_MOMENTUM: f64 = 20.0;
const WIDTH: f64 = 1.0;
const MODES: usize = 2001;

fn packet() -> ZigzagState {
    let dp = 1.0 / (2.0 * WIDTH);
    let span = 8.0 * dp;
    let step = 2.0 * span / (MODES - 1) as f64;
    let terms: Vec<_> = (0..MODES)
        .map(|k| {
            let p = CENTRAL_MOMENTUM - span + k as f64 * step;
            let a = (-(p - CENTRAL_MOMENTUM).powi(2) / (4.0 * dp * dp)).exp();
            (ThreeMomentum::from([0.0, 0.0, p]), Complex64::new(a, 0.0))
        })
        .collect();
    make_zigzag_state(MASS, &terms).unwrap()
}

fn rate(state: &ZigzagState, z: f64) -> f64 {
    let x = Vec3::new(0.0, 0.0, z * WIDTH);
    let a = zigzag_jump_rate(state, 0.0, &x, Branch::Zig).unwrap();
    let b = zigzag_jump_rate(state, 0.0, &x, Branch::Zag).unwrap();
    assert!(a == 0.0 || b == 0.0);
    a + b
}

#[test]
fn rate_is_linear_in_z_with_unit_slope() {
    let state = packet();
    for k in 0..=18 {
        let z = 0.2 + 0.1 * k as f64;
        let got = rate(&state, z);
        let want = z / (WIDTH * WIDTH);
        println!("z = {z:.1}: rate {got:.6} vs {want:.6}");
        assert!((got - want).abs() < 0.1 * want, "z = {z}: {got} vs {want}");
    }
}

#[test]
fn only_one_branch_jumps_on_each_side() {
    let state = packet();
    let x = |z: f64| Vec3::new(0.0, 0.0, z);
    let right = zigzag_jump_rate(&state, 0.0, &x(1.0), Branch::Zag).unwrap();
    let left = zigzag_jump_rate(&state, 0.0, &x(-1.0), Branch::Zag).unwrap();
    let right_other = zigzag_jump_rate(&state, 0.0, &x(1.0), Branch::Zig).unwrap();
    let left_other = zigzag_jump_rate(&state, 0.0, &x(-1.0), Branch::Zig).unwrap();
    assert!((right > 0.0 && left == 0.0) || (right == 0.0 && left > 0.0));
    assert!((right_other > 0.0) != (right > 0.0));
    assert!((left_other > 0.0) != (left > 0.0));
}
