//! C ABI over `zigzag-core`.
//!
//! Objects cross the boundary as opaque handles created by `*_new` and
//! released by the matching `*_free`. Every fallible call returns a
//! [`ZzStatus`]; on failure [`zz_last_error`] describes the problem for the
//! calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use num_complex::Complex64;
use zigzag_core::dynamics::{
    dirac_velocity, integrate_deterministic, simulate_zigzag, weyl_velocity, zigzag_jump_rate, Branch, DynamicsError,
    JumpEvent, Trajectory, WeylGuidance,
};
use zigzag_core::run::run_scenario;
use zigzag_core::scenario::Scenario;
use zigzag_core::spinor::{Handedness, ThreeMomentum, Vec3};
use zigzag_core::states::{make_zigzag_state, zigzag_coefficients, EnergySign, Mode, WeylWavefunction, ZigzagState};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZzStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Node = 3,
    Config = 4,
    Runtime = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZzBranch {
    Zig = 0,
    Zag = 1,
}

impl From<ZzBranch> for Branch {
    fn from(b: ZzBranch) -> Self {
        match b {
            ZzBranch::Zig => Branch::Zig,
            ZzBranch::Zag => Branch::Zag,
        }
    }
}

/// Weyl wavefunction handle.
pub struct ZzWeylState {
    inner: WeylWavefunction,
}

/// Zig-zag electron handle.
pub struct ZzZigzagState {
    inner: ZigzagState,
}

/// Recorded trajectory handle, with jump events for zig-zag runs.
pub struct ZzTrajectory {
    trajectory: Trajectory,
    jumps: Vec<JumpEvent>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl ToString) {
    let text = message.to_string().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn fail(status: ZzStatus, message: impl ToString) -> ZzStatus {
    set_error(message);
    status
}

fn dynamics_status(e: &DynamicsError) -> ZzStatus {
    match e {
        DynamicsError::Node | DynamicsError::NodeHit { .. } | DynamicsError::ZeroBranchDensity(_) => ZzStatus::Node,
        _ => ZzStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> ZzStatus) -> ZzStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => {
            if s == ZzStatus::Ok {
                LAST_ERROR.with(|e| *e.borrow_mut() = None);
            }
            s
        }
        Err(_) => fail(ZzStatus::Panic, "internal panic"),
    }
}

unsafe fn read3(p: *const f64) -> Vec3 {
    let s = std::slice::from_raw_parts(p, 3);
    Vec3::new(s[0], s[1], s[2])
}

unsafe fn write3(p: *mut f64, v: &Vec3) {
    let s = std::slice::from_raw_parts_mut(p, 3);
    s.copy_from_slice(v.as_slice());
}

/// Message for the last failed call on this thread, or NULL. Valid until the
/// next call on the same thread.
#[no_mangle]
pub extern "C" fn zz_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// `E_p`, `N_c` and `N_ζ` for momentum magnitude `p` and mass `m`.
///
/// # Safety
/// The output pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn zz_zigzag_coefficients(
    p: f64,
    m: f64,
    energy: *mut f64,
    n_c: *mut f64,
    n_zeta: *mut f64,
) -> ZzStatus {
    guard(|| {
        if energy.is_null() || n_c.is_null() || n_zeta.is_null() {
            return fail(ZzStatus::NullPointer, "null output pointer");
        }
        match zigzag_coefficients(p, m) {
            Ok(c) => {
                *energy = c.energy;
                *n_c = c.n_c;
                *n_zeta = c.n_zeta;
                ZzStatus::Ok
            }
            Err(e) => fail(ZzStatus::InvalidArgument, e),
        }
    })
}

/// Build a Weyl wavefunction from `n` plane waves.
///
/// `momenta` holds `3n` doubles; `modulus` and `phase` hold `n` doubles;
/// `negative_energy` holds `n` flags (nonzero for negative energy) or is
/// NULL for all positive. `left_handed` selects the ψ_L equation.
///
/// # Safety
/// Arrays must hold the stated number of elements; `out` must be valid for
/// writes.
#[no_mangle]
pub unsafe extern "C" fn zz_weyl_state_new(
    momenta: *const f64,
    modulus: *const f64,
    phase: *const f64,
    negative_energy: *const u8,
    n: usize,
    left_handed: bool,
    out: *mut *mut ZzWeylState,
) -> ZzStatus {
    guard(|| {
        if momenta.is_null() || modulus.is_null() || phase.is_null() || out.is_null() {
            return fail(ZzStatus::NullPointer, "null argument");
        }
        let chi = if left_handed { Handedness::L } else { Handedness::R };
        let modes = (0..n)
            .map(|i| {
                let p = read3(momenta.add(3 * i));
                let sign = if !negative_energy.is_null() && *negative_energy.add(i) != 0 {
                    EnergySign::Negative
                } else {
                    EnergySign::Positive
                };
                Mode::new(ThreeMomentum::from(p), Complex64::from_polar(*modulus.add(i), *phase.add(i)), sign, chi)
            })
            .collect();
        match WeylWavefunction::new(modes) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(ZzWeylState { inner }));
                ZzStatus::Ok
            }
            Err(e) => fail(ZzStatus::InvalidArgument, e),
        }
    })
}

/// # Safety
/// `state` must come from [`zz_weyl_state_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn zz_weyl_state_free(state: *mut ZzWeylState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Spinor at `(t, x)` as `re[2]`, `im[2]`.
///
/// # Safety
/// `x` must hold 3 doubles, `re` and `im` 2 each.
#[no_mangle]
pub unsafe extern "C" fn zz_weyl_evaluate(
    state: *const ZzWeylState,
    t: f64,
    x: *const f64,
    re: *mut f64,
    im: *mut f64,
) -> ZzStatus {
    guard(|| {
        if state.is_null() || x.is_null() || re.is_null() || im.is_null() {
            return fail(ZzStatus::NullPointer, "null argument");
        }
        let psi = (*state).inner.evaluate(t, &read3(x));
        *re = psi.c1.re;
        *re.add(1) = psi.c2.re;
        *im = psi.c1.im;
        *im.add(1) = psi.c2.im;
        ZzStatus::Ok
    })
}

/// Guidance velocity at `(t, x)`.
///
/// # Safety
/// `x` and `v` must hold 3 doubles.
#[no_mangle]
pub unsafe extern "C" fn zz_weyl_velocity(state: *const ZzWeylState, t: f64, x: *const f64, v: *mut f64) -> ZzStatus {
    guard(|| {
        if state.is_null() || x.is_null() || v.is_null() {
            return fail(ZzStatus::NullPointer, "null argument");
        }
        let s = &(*state).inner;
        match weyl_velocity(&s.evaluate(t, &read3(x)), s.handedness()) {
            Ok(vel) => {
                write3(v, &vel);
                ZzStatus::Ok
            }
            Err(e) => fail(dynamics_status(&e), e),
        }
    })
}

/// Fixed-step RK4 trajectory of a Weyl particle.
///
/// # Safety
/// `x0` must hold 3 doubles; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn zz_weyl_integrate(
    state: *const ZzWeylState,
    x0: *const f64,
    t0: f64,
    t1: f64,
    dt: f64,
    out: *mut *mut ZzTrajectory,
) -> ZzStatus {
    guard(|| {
        if state.is_null() || x0.is_null() || out.is_null() {
            return fail(ZzStatus::NullPointer, "null argument");
        }
        match integrate_deterministic(&WeylGuidance(&(*state).inner), read3(x0), t0, t1, dt) {
            Ok(trajectory) => {
                *out = Box::into_raw(Box::new(ZzTrajectory { trajectory, jumps: Vec::new() }));
                ZzStatus::Ok
            }
            Err(e) => fail(dynamics_status(&e), e),
        }
    })
}

/// Zig-zag electron of mass `m` from `n` positive-energy modes.
///
/// # Safety
/// `momenta` holds `3n` doubles, `modulus` and `phase` `n` each.
#[no_mangle]
pub unsafe extern "C" fn zz_zigzag_state_new(
    m: f64,
    momenta: *const f64,
    modulus: *const f64,
    phase: *const f64,
    n: usize,
    out: *mut *mut ZzZigzagState,
) -> ZzStatus {
    guard(|| {
        if momenta.is_null() || modulus.is_null() || phase.is_null() || out.is_null() {
            return fail(ZzStatus::NullPointer, "null argument");
        }
        let terms: Vec<_> = (0..n)
            .map(|i| {
                (ThreeMomentum::from(read3(momenta.add(3 * i))), Complex64::from_polar(*modulus.add(i), *phase.add(i)))
            })
            .collect();
        match make_zigzag_state(m, &terms) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(ZzZigzagState { inner }));
                ZzStatus::Ok
            }
            Err(e) => fail(ZzStatus::InvalidArgument, e),
        }
    })
}

/// # Safety
/// `state` must come from [`zz_zigzag_state_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn zz_zigzag_state_free(state: *mut ZzZigzagState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Rate of leaving branch `from` at `(t, x)`.
///
/// # Safety
/// `x` must hold 3 doubles; `rate` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn zz_zigzag_jump_rate(
    state: *const ZzZigzagState,
    t: f64,
    x: *const f64,
    from: ZzBranch,
    rate: *mut f64,
) -> ZzStatus {
    guard(|| {
        if state.is_null() || x.is_null() || rate.is_null() {
            return fail(ZzStatus::NullPointer, "null argument");
        }
        match zigzag_jump_rate(&(*state).inner, t, &read3(x), from.into()) {
            Ok(r) => {
                *rate = r;
                ZzStatus::Ok
            }
            Err(e) => fail(dynamics_status(&e), e),
        }
    })
}

/// Conventional Dirac velocity of the electron at `(t, x)`.
///
/// # Safety
/// `x` and `v` must hold 3 doubles.
#[no_mangle]
pub unsafe extern "C" fn zz_dirac_velocity(
    state: *const ZzZigzagState,
    t: f64,
    x: *const f64,
    v: *mut f64,
) -> ZzStatus {
    guard(|| {
        if state.is_null() || x.is_null() || v.is_null() {
            return fail(ZzStatus::NullPointer, "null argument");
        }
        let psi = (*state).inner.evaluate(t, &read3(x));
        match dirac_velocity(&psi.left, &psi.right) {
            Ok(vel) => {
                write3(v, &vel);
                ZzStatus::Ok
            }
            Err(e) => fail(dynamics_status(&e), e),
        }
    })
}

/// Zig-zag jump-process trajectory, reproducible per `seed`.
///
/// # Safety
/// `x0` must hold 3 doubles; `out` must be valid for writes.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn zz_zigzag_simulate(
    state: *const ZzZigzagState,
    x0: *const f64,
    branch0: ZzBranch,
    t0: f64,
    t1: f64,
    dt: f64,
    seed: u64,
    out: *mut *mut ZzTrajectory,
) -> ZzStatus {
    guard(|| {
        if state.is_null() || x0.is_null() || out.is_null() {
            return fail(ZzStatus::NullPointer, "null argument");
        }
        match simulate_zigzag(&(*state).inner, read3(x0), branch0.into(), t0, t1, dt, seed) {
            Ok((trajectory, jumps)) => {
                *out = Box::into_raw(Box::new(ZzTrajectory { trajectory, jumps }));
                ZzStatus::Ok
            }
            Err(e) => fail(dynamics_status(&e), e),
        }
    })
}

/// Number of samples, or 0 for NULL.
///
/// # Safety
/// `tr` must be NULL or a live trajectory handle.
#[no_mangle]
pub unsafe extern "C" fn zz_trajectory_len(tr: *const ZzTrajectory) -> usize {
    tr.as_ref().map_or(0, |t| t.trajectory.samples.len())
}

/// Number of jump events, or 0 for NULL.
///
/// # Safety
/// `tr` must be NULL or a live trajectory handle.
#[no_mangle]
pub unsafe extern "C" fn zz_trajectory_jump_count(tr: *const ZzTrajectory) -> usize {
    tr.as_ref().map_or(0, |t| t.jumps.len())
}

/// Sample `index`: time, position, branch (-1 for deterministic movers, else
/// a [`ZzBranch`] value) and speed.
///
/// # Safety
/// `x` must hold 3 doubles; the other outputs must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn zz_trajectory_sample(
    tr: *const ZzTrajectory,
    index: usize,
    t: *mut f64,
    x: *mut f64,
    branch: *mut i32,
    speed: *mut f64,
) -> ZzStatus {
    guard(|| {
        if tr.is_null() || t.is_null() || x.is_null() || branch.is_null() || speed.is_null() {
            return fail(ZzStatus::NullPointer, "null argument");
        }
        let tr = &*tr;
        let Some(s) = tr.trajectory.samples.get(index) else {
            return fail(ZzStatus::InvalidArgument, format!("sample index {index} out of range"));
        };
        *t = s.t;
        write3(x, &s.x);
        *branch = match s.branch {
            None => -1,
            Some(Branch::Zig) => ZzBranch::Zig as i32,
            Some(Branch::Zag) => ZzBranch::Zag as i32,
        };
        *speed = s.speed;
        ZzStatus::Ok
    })
}

/// Jump `index`: time and position.
///
/// # Safety
/// `x` must hold 3 doubles; `t` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn zz_trajectory_jump(
    tr: *const ZzTrajectory,
    index: usize,
    t: *mut f64,
    x: *mut f64,
) -> ZzStatus {
    guard(|| {
        if tr.is_null() || t.is_null() || x.is_null() {
            return fail(ZzStatus::NullPointer, "null argument");
        }
        let tr = &*tr;
        let Some(j) = tr.jumps.get(index) else {
            return fail(ZzStatus::InvalidArgument, format!("jump index {index} out of range"));
        };
        *t = j.t;
        write3(x, &j.x);
        ZzStatus::Ok
    })
}

/// # Safety
/// `tr` must come from a simulate/integrate call and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn zz_trajectory_free(tr: *mut ZzTrajectory) {
    if !tr.is_null() {
        drop(Box::from_raw(tr));
    }
}

/// Parse a TOML scenario and run it into `out_dir`.
///
/// # Safety
/// Both arguments must be NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn zz_run_scenario(config: *const c_char, out_dir: *const c_char) -> ZzStatus {
    guard(|| {
        if config.is_null() || out_dir.is_null() {
            return fail(ZzStatus::NullPointer, "null argument");
        }
        let (Ok(text), Ok(dir)) = (CStr::from_ptr(config).to_str(), CStr::from_ptr(out_dir).to_str()) else {
            return fail(ZzStatus::InvalidArgument, "arguments must be UTF-8");
        };
        let scenario = match Scenario::parse(text) {
            Ok(s) => s,
            Err(e) => return fail(ZzStatus::Config, e),
        };
        match run_scenario(&scenario, Path::new(dir)) {
            Ok(_) => ZzStatus::Ok,
            Err(e) if e.exit_code() == 1 => fail(ZzStatus::Config, e),
            Err(e) => fail(ZzStatus::Runtime, e),
        }
    })
}
