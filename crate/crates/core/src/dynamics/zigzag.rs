use rand::Rng;

use crate::spinor::Vec3;
use crate::states::ZigzagState;

use super::integrate::{at_node, rk4_step, step_times};
use super::rates::rate_for_sample;
use super::rng::{exp1, stream_rng};
use super::{
    Branch, BranchGuidance, DynamicsError, Trajectory, TrajectoryMeta, TrajectorySample, VelocityField,
    COARSE_STEP_HAZARD,
};

/// Branch flip at fixed position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpEvent {
    pub t: f64,
    pub x: Vec3,
    pub from: Branch,
    pub to: Branch,
}

/// A two-branch velocity field with jump rates between the branches.
pub trait BranchField {
    /// Velocity on `branch` and the rate of leaving it.
    fn motion(&self, t: f64, x: &Vec3, branch: Branch) -> Result<(Vec3, f64), DynamicsError>;

    fn branch_velocity(&self, t: f64, x: &Vec3, branch: Branch) -> Result<Vec3, DynamicsError> {
        self.motion(t, x, branch).map(|(v, _)| v)
    }
}

impl BranchField for ZigzagState {
    fn motion(&self, t: f64, x: &Vec3, branch: Branch) -> Result<(Vec3, f64), DynamicsError> {
        let s = self.sample(t, x);
        let v = BranchGuidance::from_spinor(&s.spinor, branch)?;
        Ok((v, rate_for_sample(&s, self.mass(), branch)?))
    }

    fn branch_velocity(&self, t: f64, x: &Vec3, branch: Branch) -> Result<Vec3, DynamicsError> {
        BranchGuidance::from_spinor(&self.evaluate(t, x), branch)
    }
}

struct OnBranch<'a, F: ?Sized> {
    field: &'a F,
    branch: Branch,
}

impl<F: BranchField + ?Sized> VelocityField for OnBranch<'_, F> {
    fn velocity(&self, t: f64, x: &Vec3) -> Result<Vec3, DynamicsError> {
        self.field.branch_velocity(t, x, self.branch)
    }
}

enum Event {
    Sample(TrajectorySample),
    Jump(JumpEvent),
}

/// Final state of a zig-zag run.
#[derive(Debug, Clone, PartialEq)]
pub struct ZigzagEndpoint {
    pub x: Vec3,
    pub branch: Branch,
    pub jumps: usize,
    pub warnings: Vec<String>,
}

#[derive(Default)]
struct CoarseSteps {
    count: usize,
    first_t: f64,
    worst: f64,
}

impl CoarseSteps {
    fn check(&mut self, t: f64, hazard: f64) {
        if hazard > COARSE_STEP_HAZARD {
            if self.count == 0 {
                self.first_t = t;
            }
            self.count += 1;
            self.worst = self.worst.max(hazard);
        }
    }

    fn warnings(&self) -> Vec<String> {
        if self.count == 0 {
            return Vec::new();
        }
        vec![format!(
            "rate resolution: sigma*dt exceeded {COARSE_STEP_HAZARD} at {} evaluations (first at t = {}, max {:.3})",
            self.count, self.first_t, self.worst
        )]
    }
}

#[allow(clippy::too_many_arguments)]
fn run<F, R, S>(
    field: &F,
    x0: Vec3,
    branch0: Branch,
    t0: f64,
    t1: f64,
    dt: f64,
    rng: &mut R,
    mut sink: S,
) -> Result<ZigzagEndpoint, DynamicsError>
where
    F: BranchField + ?Sized,
    R: Rng + ?Sized,
    S: FnMut(Event),
{
    let times = step_times(t0, t1, dt)?;
    let mut coarse = CoarseSteps::default();
    let (mut t, mut x, mut branch) = (t0, x0, branch0);
    let (mut v, mut rate) = field.motion(t, &x, branch).map_err(|e| at_node(e, t))?;
    coarse.check(t, rate * dt);
    let mut budget = exp1(rng);
    let mut hazard = 0.0;
    let mut jumps = 0;
    sink(Event::Sample(TrajectorySample { t, x, branch: Some(branch), speed: v.norm() }));

    for &target in &times[1..] {
        loop {
            let h = target - t;
            if h <= 1e-12 * dt {
                t = target;
                break;
            }
            let mover = OnBranch { field, branch };
            let x1 = rk4_step(&mover, t, &x, &v, h)?;
            let (v1, rate1) = field.motion(target, &x1, branch).map_err(|e| at_node(e, target))?;
            coarse.check(target, rate1 * dt);
            let increment = 0.5 * h * (rate + rate1);
            if hazard + increment < budget {
                hazard += increment;
                (t, x, v, rate) = (target, x1, v1, rate1);
                sink(Event::Sample(TrajectorySample { t, x, branch: Some(branch), speed: v.norm() }));
                break;
            }

            // Hazard along the step is r0·s + (r1-r0)s²/(2h); solve for the
            // fraction θ at which it reaches the remaining budget.
            let a = 0.5 * (rate1 - rate) * h;
            let b = rate * h;
            let c = budget - hazard;
            let root = (b * b + 4.0 * a * c).max(0.0).sqrt();
            let theta = (2.0 * c / (b + root)).clamp(0.0, 1.0);
            let (tj, xj, vj) = if theta >= 1.0 {
                (target, x1, v1)
            } else {
                let tj = t + theta * h;
                let xj = rk4_step(&mover, t, &x, &v, theta * h)?;
                let vj = mover.velocity(tj, &xj).map_err(|e| at_node(e, tj))?;
                (tj, xj, vj)
            };
            if tj > t {
                sink(Event::Sample(TrajectorySample { t: tj, x: xj, branch: Some(branch), speed: vj.norm() }));
            }
            let to = branch.other();
            sink(Event::Jump(JumpEvent { t: tj, x: xj, from: branch, to }));
            jumps += 1;
            branch = to;
            let (vn, rn) = field.motion(tj, &xj, branch).map_err(|e| at_node(e, tj))?;
            coarse.check(tj, rn * dt);
            (t, x, v, rate) = (tj, xj, vn, rn);
            hazard = 0.0;
            budget = exp1(rng);
        }
    }
    Ok(ZigzagEndpoint { x, branch, jumps, warnings: coarse.warnings() })
}

/// Piecewise-deterministic zig-zag trajectory drawing from `rng`.
///
/// Between jumps the position follows RK4 along the active branch. The
/// cumulative jump hazard is accumulated by the trapezoid rule and compared
/// against an `Exp(1)` budget; on crossing, the jump time is located inside
/// the step, a sample with the pre-jump branch and a [`JumpEvent`] are
/// recorded, and integration continues on the other branch.
#[allow(clippy::too_many_arguments)]
pub fn simulate_zigzag_with_rng<F, R>(
    field: &F,
    x0: Vec3,
    branch0: Branch,
    t0: f64,
    t1: f64,
    dt: f64,
    rng: &mut R,
) -> Result<(Trajectory, Vec<JumpEvent>), DynamicsError>
where
    F: BranchField + ?Sized,
    R: Rng + ?Sized,
{
    let mut samples = Vec::new();
    let mut jumps = Vec::new();
    let end = run(field, x0, branch0, t0, t1, dt, rng, |e| match e {
        Event::Sample(s) => samples.push(s),
        Event::Jump(j) => jumps.push(j),
    })?;
    let meta = TrajectoryMeta { dt, warnings: end.warnings, ..Default::default() };
    Ok((Trajectory { samples, meta }, jumps))
}

/// [`simulate_zigzag_with_rng`] on stream 0 of `seed`.
#[allow(clippy::too_many_arguments)]
pub fn simulate_zigzag<F>(
    field: &F,
    x0: Vec3,
    branch0: Branch,
    t0: f64,
    t1: f64,
    dt: f64,
    seed: u64,
) -> Result<(Trajectory, Vec<JumpEvent>), DynamicsError>
where
    F: BranchField + ?Sized,
{
    let mut rng = stream_rng(seed, 0);
    let (mut tr, jumps) = simulate_zigzag_with_rng(field, x0, branch0, t0, t1, dt, &mut rng)?;
    tr.meta.seed = Some(seed);
    Ok((tr, jumps))
}

/// Endpoint of a zig-zag run without recording samples.
#[allow(clippy::too_many_arguments)]
pub fn advance_zigzag<F, R>(
    field: &F,
    x0: Vec3,
    branch0: Branch,
    t0: f64,
    t1: f64,
    dt: f64,
    rng: &mut R,
) -> Result<ZigzagEndpoint, DynamicsError>
where
    F: BranchField + ?Sized,
    R: Rng + ?Sized,
{
    run(field, x0, branch0, t0, t1, dt, rng, |_| {})
}
