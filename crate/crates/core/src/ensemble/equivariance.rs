use crate::dynamics::rng::mix_seed;
use crate::dynamics::{Branch, WeylGuidance};
use crate::spinor::Vec3;
use crate::states::{WeylWavefunction, ZigzagState};

use super::entropy::{
    bootstrap_h_std, cell_probabilities, h_from_counts, histogram, l1_distance, noise_floor, CellRule, HValue,
};
use super::evolve::{evolve_ensemble, DeterministicMover, ZigzagMover};
use super::sample::{assign_branches, sample_density};
use super::{BoxRegion, EnsembleError, EnsembleFrame, Grid};

/// Cell rule used for the reference probabilities in histogram distances.
pub const REFERENCE_RULE: CellRule = CellRule::GaussLegendre(4);

/// The guiding state of an ensemble.
#[derive(Debug, Clone, Copy)]
pub enum EnsembleDynamics<'a> {
    Weyl(&'a WeylWavefunction),
    Zigzag(&'a ZigzagState),
}

impl EnsembleDynamics<'_> {
    pub fn density(&self, t: f64, x: &Vec3) -> f64 {
        match self {
            EnsembleDynamics::Weyl(w) => w.density(t, x),
            EnsembleDynamics::Zigzag(z) => z.density(t, x),
        }
    }

    /// `Ψ_L†Ψ_L` for ZIG, `Ψ_R†Ψ_R` for ZAG.
    pub fn branch_density(&self, branch: Branch, t: f64, x: &Vec3) -> f64 {
        match self {
            EnsembleDynamics::Weyl(w) => w.density(t, x),
            EnsembleDynamics::Zigzag(z) => {
                let s = z.evaluate(t, x);
                match branch {
                    Branch::Zig => s.left.norm_sqr(),
                    Branch::Zag => s.right.norm_sqr(),
                }
            }
        }
    }

    /// `n` positions drawn from the density at `t` over `region`, with
    /// zig-zag branches drawn from the local branch densities.
    pub fn equilibrium_frame(
        &self,
        t: f64,
        region: &BoxRegion,
        n: usize,
        seed: u64,
    ) -> Result<EnsembleFrame, EnsembleError> {
        let positions = sample_density(&|x: &Vec3| self.density(t, x), region, n, seed)?;
        let mut frame = EnsembleFrame::new(t, positions);
        if let EnsembleDynamics::Zigzag(z) = self {
            frame.branches = Some(assign_branches(z, t, &frame.positions, seed));
        }
        Ok(frame)
    }

    pub fn evolve(
        &self,
        frame: &EnsembleFrame,
        t1: f64,
        dt: f64,
        seed: u64,
        wrap: Option<&BoxRegion>,
    ) -> Result<EnsembleFrame, EnsembleError> {
        match self {
            EnsembleDynamics::Weyl(w) => {
                evolve_ensemble(&DeterministicMover { field: &WeylGuidance(w), dt }, frame, t1, seed, wrap)
            }
            EnsembleDynamics::Zigzag(z) => evolve_ensemble(&ZigzagMover { field: *z, dt }, frame, t1, seed, wrap),
        }
    }
}

/// Histogram distance of one branch's particles to its own density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchReport {
    pub branch: Branch,
    pub count: usize,
    pub l1: f64,
    pub floor: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckpointReport {
    pub t: f64,
    /// L1 distance between the histogram and the cell probabilities of the
    /// density at `t`.
    pub l1: f64,
    /// Mean L1 distance of exact draws of the same size.
    pub floor: f64,
    pub h: HValue,
    pub h_std: f64,
    pub branches: Vec<BranchReport>,
    pub excluded: usize,
}

fn branch_report(
    dynamics: &EnsembleDynamics,
    frame: &EnsembleFrame,
    grid: &Grid,
    branch: Branch,
    reps: usize,
    seed: u64,
) -> Result<BranchReport, EnsembleError> {
    let labels = frame.branches.as_ref().expect("zig-zag frames carry branches");
    let positions: Vec<Vec3> =
        frame.positions.iter().zip(labels).filter(|(_, b)| **b == branch).map(|(x, _)| *x).collect();
    let probs = cell_probabilities(&|x: &Vec3| dynamics.branch_density(branch, frame.t, x), grid, REFERENCE_RULE)?;
    let counts = histogram(&positions, grid)?;
    Ok(BranchReport {
        branch,
        count: positions.len(),
        l1: l1_distance(&counts, &probs),
        floor: noise_floor(&probs, positions.len() as u64, reps, seed).mean,
    })
}

/// Evolve `frame0` through `checkpoints` and compare the ensemble with the
/// density at each one. Returns the reports and the frames.
#[allow(clippy::too_many_arguments)]
pub fn equivariance_checkpoints(
    dynamics: &EnsembleDynamics,
    frame0: &EnsembleFrame,
    grid: &Grid,
    checkpoints: &[f64],
    dt: f64,
    seed: u64,
    reps: usize,
) -> Result<(Vec<CheckpointReport>, Vec<EnsembleFrame>), EnsembleError> {
    if checkpoints.first().is_none_or(|&t| t < frame0.t) || checkpoints.windows(2).any(|w| w[1] <= w[0]) {
        return Err(EnsembleError::BadCheckpoints);
    }
    let mut frame = frame0.clone();
    let mut reports = Vec::new();
    let mut frames = Vec::new();
    for (k, &t) in checkpoints.iter().enumerate() {
        frame = dynamics.evolve(&frame, t, dt, mix_seed(seed, k as u64), Some(&grid.region))?;
        let density = |x: &Vec3| dynamics.density(t, x);
        let counts = histogram(&frame.positions, grid)?;
        let reference = cell_probabilities(&density, grid, REFERENCE_RULE)?;
        let coarse = cell_probabilities(&density, grid, CellRule::MidpointCorners)?;
        let stat_seed = mix_seed(seed ^ 0x6571_7569, k as u64);
        let mut branches = Vec::new();
        if frame.branches.is_some() {
            for b in [Branch::Zig, Branch::Zag] {
                branches.push(branch_report(dynamics, &frame, grid, b, reps, stat_seed)?);
            }
        }
        reports.push(CheckpointReport {
            t,
            l1: l1_distance(&counts, &reference),
            floor: noise_floor(&reference, frame.len() as u64, reps, stat_seed).mean,
            h: h_from_counts(&counts, &coarse)?,
            h_std: bootstrap_h_std(&counts, &coarse, reps, stat_seed)?,
            branches,
            excluded: frame.excluded,
        });
        frames.push(frame.clone());
    }
    Ok((reports, frames))
}
