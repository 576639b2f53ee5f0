use rayon::prelude::*;

use crate::dynamics::rng::{mix_seed, stream_rng, StreamRng};
use crate::dynamics::{advance_deterministic, advance_zigzag, Branch, BranchField, DynamicsError, VelocityField};
use crate::spinor::Vec3;

use super::entropy::{bootstrap_h_std, cell_probabilities, h_from_counts, histogram, CellRule, HValue};
use super::{BoxRegion, DensityField, EnsembleError, EnsembleFrame, Grid};

/// Advances one particle from `t0` to `t1`.
pub trait Mover: Sync {
    fn advance(
        &self,
        x: Vec3,
        branch: Option<Branch>,
        t0: f64,
        t1: f64,
        rng: &mut StreamRng,
    ) -> Result<(Vec3, Option<Branch>), DynamicsError>;
}

/// Leaves every particle where it is.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityMover;

impl Mover for IdentityMover {
    fn advance(
        &self,
        x: Vec3,
        branch: Option<Branch>,
        _: f64,
        _: f64,
        _: &mut StreamRng,
    ) -> Result<(Vec3, Option<Branch>), DynamicsError> {
        Ok((x, branch))
    }
}

/// RK4 along a velocity field.
#[derive(Debug, Clone, Copy)]
pub struct DeterministicMover<'a, F: ?Sized> {
    pub field: &'a F,
    pub dt: f64,
}

impl<F: VelocityField + Sync + ?Sized> Mover for DeterministicMover<'_, F> {
    fn advance(
        &self,
        x: Vec3,
        branch: Option<Branch>,
        t0: f64,
        t1: f64,
        _: &mut StreamRng,
    ) -> Result<(Vec3, Option<Branch>), DynamicsError> {
        Ok((advance_deterministic(self.field, x, t0, t1, self.dt)?, branch))
    }
}

/// Zig-zag jump process; every particle needs a branch label.
#[derive(Debug, Clone, Copy)]
pub struct ZigzagMover<'a, F: ?Sized> {
    pub field: &'a F,
    pub dt: f64,
}

impl<F: BranchField + Sync + ?Sized> Mover for ZigzagMover<'_, F> {
    fn advance(
        &self,
        x: Vec3,
        branch: Option<Branch>,
        t0: f64,
        t1: f64,
        rng: &mut StreamRng,
    ) -> Result<(Vec3, Option<Branch>), DynamicsError> {
        let b = branch.ok_or(DynamicsError::MissingBranch)?;
        let end = advance_zigzag(self.field, x, b, t0, t1, self.dt, rng)?;
        Ok((end.x, Some(end.branch)))
    }
}

/// Move every particle of `frame` to `t1`. Particle `i` draws from stream
/// `i` of `seed`. Trajectories that hit a node are dropped and counted;
/// more than 1% of them is an error. On periodic regions positions are
/// wrapped back into the box.
pub fn evolve_ensemble<M: Mover + ?Sized>(
    mover: &M,
    frame: &EnsembleFrame,
    t1: f64,
    seed: u64,
    region: Option<&BoxRegion>,
) -> Result<EnsembleFrame, EnsembleError> {
    if frame.is_empty() {
        return Err(EnsembleError::EmptyFrame);
    }
    if t1 == frame.t {
        return Ok(frame.clone());
    }
    let results: Vec<Result<(Vec3, Option<Branch>), DynamicsError>> = (0..frame.len())
        .into_par_iter()
        .map(|i| {
            let branch = frame.branches.as_ref().map(|b| b[i]);
            let mut rng = stream_rng(seed, i as u64);
            mover.advance(frame.positions[i], branch, frame.t, t1, &mut rng)
        })
        .collect();
    let mut positions = Vec::with_capacity(frame.len());
    let mut branches = Vec::with_capacity(frame.len());
    let mut hits = 0;
    for r in results {
        match r {
            Ok((x, b)) => {
                positions.push(region.map_or(x, |g| g.wrap(&x)));
                branches.extend(b);
            }
            Err(DynamicsError::NodeHit { .. }) => hits += 1,
            Err(e) => return Err(e.into()),
        }
    }
    if hits * 100 > frame.len() {
        return Err(EnsembleError::TooManyNodes { excluded: hits, n: frame.len() });
    }
    Ok(EnsembleFrame {
        t: t1,
        branches: frame.branches.as_ref().map(|_| branches),
        positions,
        excluded: frame.excluded + hits,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HPoint {
    pub t: f64,
    pub h: HValue,
    /// Bootstrap standard deviation of `h.corrected`.
    pub std: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct HCurve {
    pub points: Vec<HPoint>,
}

impl HCurve {
    /// Checkpoints at which H rose by more than `k` combined standard
    /// deviations from the previous one.
    pub fn increases_beyond(&self, k: f64) -> Vec<usize> {
        self.points
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[1].h.corrected - w[0].h.corrected > k * w[0].std.hypot(w[1].std))
            .map(|(i, _)| i + 1)
            .collect()
    }
}

/// Coarse-grained H of the evolving ensemble at each checkpoint.
///
/// The segment ending at checkpoint `k` uses seed `mix(seed, k)`. Returns
/// the curve and the final frame.
#[allow(clippy::too_many_arguments)]
pub fn h_curve<M, D>(
    mover: &M,
    frame0: &EnsembleFrame,
    grid: &Grid,
    density: &D,
    checkpoints: &[f64],
    rule: CellRule,
    seed: u64,
    bootstrap_reps: usize,
) -> Result<(HCurve, EnsembleFrame), EnsembleError>
where
    M: Mover + ?Sized,
    D: DensityField + ?Sized,
{
    if checkpoints.first().is_none_or(|&t| t < frame0.t) || checkpoints.windows(2).any(|w| w[1] <= w[0]) {
        return Err(EnsembleError::BadCheckpoints);
    }
    let mut frame = frame0.clone();
    let mut curve = HCurve::default();
    for (k, &t) in checkpoints.iter().enumerate() {
        frame = evolve_ensemble(mover, &frame, t, mix_seed(seed, k as u64), Some(&grid.region))?;
        let probs = cell_probabilities(&|x: &Vec3| density.density(t, x), grid, rule)?;
        let counts = histogram(&frame.positions, grid)?;
        let h = h_from_counts(&counts, &probs)?;
        let std = bootstrap_h_std(&counts, &probs, bootstrap_reps, mix_seed(seed ^ 0x4853, k as u64))?;
        curve.points.push(HPoint { t, h, std });
    }
    Ok((curve, frame))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::WeylGuidance;
    use crate::ensemble::sample_density;
    use crate::spinor::{Handedness, ThreeMomentum};
    use crate::states::{Mode, WeylWavefunction};

    #[test]
    fn identity_leaves_frame() {
        let frame = EnsembleFrame::new(0.0, vec![Vec3::new(1.0, 2.0, 3.0), Vec3::zeros()]);
        let out = evolve_ensemble(&IdentityMover, &frame, 4.0, 0, None).unwrap();
        assert_eq!(out.positions, frame.positions);
        assert_eq!(out.t, 4.0);
    }

    #[test]
    fn single_mode_translates_rigidly() {
        let p = ThreeMomentum::new(0.0, 3.0, 4.0);
        let wf = WeylWavefunction::new(vec![Mode::positive(p, 1.0, 0.0, Handedness::R)]).unwrap();
        let region = BoxRegion::cube(1.0).unwrap();
        let frame = EnsembleFrame::new(0.0, sample_density(&|_: &Vec3| 1.0, &region, 200, 1).unwrap());
        let mover = DeterministicMover { field: &WeylGuidance(&wf), dt: 0.1 };
        let out = evolve_ensemble(&mover, &frame, 2.0, 0, None).unwrap();
        let shift = Vec3::new(0.0, 0.6, 0.8) * 2.0;
        for (a, b) in frame.positions.iter().zip(&out.positions) {
            assert!((b - a - shift).norm() < 1e-12);
        }
    }

    #[test]
    fn node_hits_are_counted_or_fatal() {
        let frame = EnsembleFrame::new(0.0, (0..1000).map(|i| Vec3::new(i as f64, 0.0, 0.0)).collect());
        let few = |_: f64, x: &Vec3| if x.x < 5.0 { Err(DynamicsError::Node) } else { Ok(Vec3::zeros()) };
        let out = evolve_ensemble(&DeterministicMover { field: &few, dt: 0.5 }, &frame, 1.0, 0, None).unwrap();
        assert_eq!((out.len(), out.excluded), (995, 5));
        let many = |_: f64, x: &Vec3| if x.x < 50.0 { Err(DynamicsError::Node) } else { Ok(Vec3::zeros()) };
        assert_eq!(
            evolve_ensemble(&DeterministicMover { field: &many, dt: 0.5 }, &frame, 1.0, 0, None),
            Err(EnsembleError::TooManyNodes { excluded: 50, n: 1000 })
        );
    }

    #[test]
    fn translation_keeps_h_constant() {
        // uniform density on a torus, ensemble concentrated in one half,
        // translated by whole cells: H stays ln 2
        let grid = Grid::new(BoxRegion::periodic(Vec3::zeros(), Vec3::repeat(2.0)).unwrap(), 0.5).unwrap();
        let xs = sample_density(&|x: &Vec3| if x.x < 1.0 { 1.0 } else { 0.0 }, &grid.region, 20_000, 2).unwrap();
        let v = |_: f64, _: &Vec3| Ok(Vec3::new(0.5, -0.5, 0.0));
        let mover = DeterministicMover { field: &v, dt: 0.5 };
        let uniform = |_: f64, _: &Vec3| 1.0;
        let (curve, _) = h_curve(
            &mover,
            &EnsembleFrame::new(0.0, xs),
            &grid,
            &uniform,
            &[0.0, 1.0, 2.0, 4.0],
            CellRule::MidpointCorners,
            7,
            20,
        )
        .unwrap();
        let h0 = curve.points[0].h.raw;
        assert!((h0 - 2f64.ln()).abs() < 0.01);
        assert!(curve.points.iter().all(|p| (p.h.raw - h0).abs() < 1e-12));
        assert!(curve.increases_beyond(2.0).is_empty());
        assert!(matches!(
            h_curve(
                &mover,
                &EnsembleFrame::new(1.0, vec![Vec3::zeros()]),
                &grid,
                &uniform,
                &[0.5],
                CellRule::MidpointCorners,
                0,
                1
            ),
            Err(EnsembleError::BadCheckpoints)
        ));
    }
}
