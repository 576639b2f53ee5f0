use crate::spinor::Vec3;

use super::{Branch, DynamicsError, VelocityField};

/// One recorded point of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    pub x: Vec3,
    /// `None` for deterministic movers.
    pub branch: Option<Branch>,
    pub speed: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrajectoryMeta {
    pub dt: f64,
    pub seed: Option<u64>,
    pub scenario: String,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
    pub meta: TrajectoryMeta,
}

impl Trajectory {
    pub fn last(&self) -> Option<&TrajectorySample> {
        self.samples.last()
    }

    pub fn endpoint(&self) -> Option<Vec3> {
        self.samples.last().map(|s| s.x)
    }
}

pub(crate) fn check_span(t0: f64, t1: f64, dt: f64) -> Result<(), DynamicsError> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(DynamicsError::InvalidStep(dt));
    }
    if !(t1 > t0) || !t0.is_finite() || !t1.is_finite() {
        return Err(DynamicsError::InvalidSpan { t0, t1 });
    }
    Ok(())
}

/// Step boundaries `t0, t0+dt, t0+2dt, …, t1`; the last step is shortened
/// to land on `t1`. A remainder below `1e-9·dt` is absorbed.
pub fn step_times(t0: f64, t1: f64, dt: f64) -> Result<Vec<f64>, DynamicsError> {
    check_span(t0, t1, dt)?;
    let span = (t1 - t0) / dt;
    let mut n = span.floor() as usize;
    if span - n as f64 > 1e-9 {
        n += 1;
    }
    let n = n.max(1);
    let mut out: Vec<f64> = (0..n).map(|k| t0 + k as f64 * dt).collect();
    out.push(t1);
    Ok(out)
}

pub(crate) fn at_node(e: DynamicsError, t: f64) -> DynamicsError {
    match e {
        DynamicsError::Node | DynamicsError::ZeroBranchDensity(_) => DynamicsError::NodeHit { t },
        other => other,
    }
}

/// Classical RK4 step of size `h` from `(t, x)` given `k1 = v(t, x)`.
pub(crate) fn rk4_step<F>(field: &F, t: f64, x: &Vec3, k1: &Vec3, h: f64) -> Result<Vec3, DynamicsError>
where
    F: VelocityField + ?Sized,
{
    let half = 0.5 * h;
    let tm = t + half;
    let k2 = field.velocity(tm, &(x + k1 * half)).map_err(|e| at_node(e, tm))?;
    let k3 = field.velocity(tm, &(x + k2 * half)).map_err(|e| at_node(e, tm))?;
    let k4 = field.velocity(t + h, &(x + k3 * h)).map_err(|e| at_node(e, t + h))?;
    Ok(x + (k1 + (k2 + k3) * 2.0 + k4) * (h / 6.0))
}

fn run<F, S>(field: &F, x0: Vec3, t0: f64, t1: f64, dt: f64, mut sink: S) -> Result<Vec3, DynamicsError>
where
    F: VelocityField + ?Sized,
    S: FnMut(f64, &Vec3, &Vec3),
{
    let times = step_times(t0, t1, dt)?;
    let mut x = x0;
    let mut v = field.velocity(t0, &x).map_err(|e| at_node(e, t0))?;
    sink(t0, &x, &v);
    for w in times.windows(2) {
        let (t, next) = (w[0], w[1]);
        x = rk4_step(field, t, &x, &v, next - t)?;
        v = field.velocity(next, &x).map_err(|e| at_node(e, next))?;
        sink(next, &x, &v);
    }
    Ok(x)
}

/// Fixed-step RK4 trajectory of `dx/dt = v(t, x)` from `x0` at `t0` to `t1`,
/// with a sample at every step boundary.
pub fn integrate_deterministic<F>(field: &F, x0: Vec3, t0: f64, t1: f64, dt: f64) -> Result<Trajectory, DynamicsError>
where
    F: VelocityField + ?Sized,
{
    let mut samples = Vec::new();
    run(field, x0, t0, t1, dt, |t, x, v| samples.push(TrajectorySample { t, x: *x, branch: None, speed: v.norm() }))?;
    Ok(Trajectory { samples, meta: TrajectoryMeta { dt, ..Default::default() } })
}

/// Endpoint of [`integrate_deterministic`] without recording samples.
pub fn advance_deterministic<F>(field: &F, x0: Vec3, t0: f64, t1: f64, dt: f64) -> Result<Vec3, DynamicsError>
where
    F: VelocityField + ?Sized,
{
    run(field, x0, t0, t1, dt, |_, _, _| {})
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::WeylGuidance;
    use crate::spinor::{Handedness, ThreeMomentum};
    use crate::states::{Mode, WeylWavefunction};

    fn constant(_: f64, _: &Vec3) -> Result<Vec3, DynamicsError> {
        Ok(Vec3::new(0.0, 0.0, 1.0))
    }

    fn rotation(_: f64, x: &Vec3) -> Result<Vec3, DynamicsError> {
        Ok(Vec3::new(-x.y, x.x, 0.0))
    }

    #[test]
    fn step_grid() {
        assert_eq!(step_times(0.0, 1.0, 0.25).unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let t = step_times(0.0, 1.0, 0.3).unwrap();
        assert_eq!(t.len(), 5);
        assert_eq!(*t.last().unwrap(), 1.0);
        assert!(t.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(step_times(0.0, 50.0, 1e-3).unwrap().len(), 50_001);
        assert!(matches!(step_times(1.0, 1.0, 0.1), Err(DynamicsError::InvalidSpan { .. })));
        assert!(matches!(step_times(0.0, 1.0, 0.0), Err(DynamicsError::InvalidStep(_))));
    }

    #[test]
    fn constant_field_line() {
        let tr = integrate_deterministic(&constant, Vec3::zeros(), 0.0, 50.0, 1e-2).unwrap();
        assert!((tr.endpoint().unwrap() - Vec3::new(0.0, 0.0, 50.0)).norm() < 1e-9);
        assert!(tr.samples.windows(2).all(|w| w[1].t > w[0].t));
        assert!(tr.samples.iter().all(|s| s.speed == 1.0 && s.branch.is_none()));
    }

    #[test]
    fn single_mode_is_luminal_line() {
        let p = ThreeMomentum::new(1.0, -2.0, 0.5);
        let wf = WeylWavefunction::new(vec![Mode::positive(p, 1.0, 0.3, Handedness::R)]).unwrap();
        let x0 = Vec3::new(0.2, 0.1, -0.4);
        let tr = integrate_deterministic(&WeylGuidance(&wf), x0, 0.0, 10.0, 1e-2).unwrap();
        let phat = p.as_vec3() / p.magnitude();
        for s in &tr.samples {
            assert!((s.x - (x0 + phat * s.t)).norm() < 1e-10);
            assert!((s.speed - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn fourth_order_on_rotation() {
        let t1: f64 = 2.0;
        let exact = Vec3::new(t1.cos(), t1.sin(), 0.0);
        let err =
            |dt: f64| (advance_deterministic(&rotation, Vec3::new(1.0, 0.0, 0.0), 0.0, t1, dt).unwrap() - exact).norm();
        let order = (err(0.1) / err(0.05)).log2();
        assert!((order - 4.0).abs() < 0.15, "order {order}");
    }

    #[test]
    fn node_aborts_with_time() {
        let f = |t: f64, _: &Vec3| if t > 0.5 { Err(DynamicsError::Node) } else { Ok(Vec3::zeros()) };
        match integrate_deterministic(&f, Vec3::zeros(), 0.0, 1.0, 0.1) {
            Err(DynamicsError::NodeHit { t }) => {
                assert!(t > 0.5 && t <= 0.6 + 1e-12);
                assert!(DynamicsError::NodeHit { t }.to_string().starts_with("trajectory hit node at t"));
            }
            other => panic!("{other:?}"),
        }
    }
}
