use rand::Rng;
use rayon::prelude::*;

use crate::dynamics::rng::{mix_seed, stream_rng};
use crate::dynamics::Branch;
use crate::spinor::Vec3;
use crate::states::{WeylWavefunction, ZigzagState};

use super::{BoxRegion, EnsembleError};

/// Time-dependent probability density on space.
pub trait DensityField: Sync {
    fn density(&self, t: f64, x: &Vec3) -> f64;
}

impl DensityField for WeylWavefunction {
    fn density(&self, t: f64, x: &Vec3) -> f64 {
        WeylWavefunction::density(self, t, x)
    }
}

impl DensityField for ZigzagState {
    fn density(&self, t: f64, x: &Vec3) -> f64 {
        ZigzagState::density(self, t, x)
    }
}

impl<F> DensityField for F
where
    F: Fn(f64, &Vec3) -> f64 + Sync,
{
    fn density(&self, t: f64, x: &Vec3) -> f64 {
        self(t, x)
    }
}

/// Positions (and zig-zag branches) of an ensemble at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleFrame {
    pub t: f64,
    pub positions: Vec<Vec3>,
    pub branches: Option<Vec<Branch>>,
    /// Trajectories dropped so far because they hit a node.
    pub excluded: usize,
}

impl EnsembleFrame {
    pub fn new(t: f64, positions: Vec<Vec3>) -> Self {
        Self { t, positions, branches: None, excluded: 0 }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

const SCAN_POINTS: usize = 33;
const BOUND_MARGIN: f64 = 1.25;
// 20 times the expected proposal count at the minimum acceptable rate 1e-6
const MAX_PROPOSALS: u64 = 20_000_000;

enum Draw {
    Accepted(Vec3),
    Exceeded(f64),
    GaveUp,
}

fn draw_one<D>(density: &D, region: &BoxRegion, bound: f64, seed: u64, index: u64) -> Draw
where
    D: Fn(&Vec3) -> f64 + Sync + ?Sized,
{
    let mut rng = stream_rng(seed, index);
    for _ in 0..MAX_PROPOSALS {
        let u = Vec3::new(rng.random(), rng.random(), rng.random());
        let x = region.at(&u);
        let d = density(&x);
        if d > bound {
            return Draw::Exceeded(d);
        }
        if rng.random::<f64>() * bound < d {
            return Draw::Accepted(x);
        }
    }
    Draw::GaveUp
}

/// `n` independent draws from `density` restricted to `region`, by rejection
/// against a bound found from a lattice scan. If a proposal ever exceeds the
/// bound, the bound is raised and the whole pass is repeated, so the result
/// depends only on `seed`.
pub fn sample_density<D>(density: &D, region: &BoxRegion, n: usize, seed: u64) -> Result<Vec<Vec3>, EnsembleError>
where
    D: Fn(&Vec3) -> f64 + Sync + ?Sized,
{
    if n == 0 {
        return Err(EnsembleError::EmptyFrame);
    }
    let step = 1.0 / (SCAN_POINTS - 1) as f64;
    let scan: Vec<f64> = (0..SCAN_POINTS.pow(3))
        .into_par_iter()
        .map(|c| {
            let (i, j, k) = (c / (SCAN_POINTS * SCAN_POINTS), (c / SCAN_POINTS) % SCAN_POINTS, c % SCAN_POINTS);
            density(&region.at(&Vec3::new(i as f64 * step, j as f64 * step, k as f64 * step)))
        })
        .collect();
    let peak = scan.iter().copied().fold(0.0, f64::max);
    if !(peak > 0.0) || !peak.is_finite() {
        return Err(EnsembleError::ZeroDensity);
    }
    let mut bound = BOUND_MARGIN * peak;
    let acceptance = scan.iter().sum::<f64>() / scan.len() as f64 / bound;
    if acceptance < 1e-6 {
        return Err(EnsembleError::BoundTooLoose(acceptance));
    }
    loop {
        let draws: Vec<Draw> =
            (0..n as u64).into_par_iter().map(|i| draw_one(density, region, bound, seed, i)).collect();
        let mut exceeded = 0.0f64;
        let mut out = Vec::with_capacity(n);
        for d in draws {
            match d {
                Draw::Accepted(x) => out.push(x),
                Draw::Exceeded(v) => exceeded = exceeded.max(v),
                Draw::GaveUp => return Err(EnsembleError::BoundTooLoose(1.0 / MAX_PROPOSALS as f64)),
            }
        }
        if exceeded == 0.0 {
            return Ok(out);
        }
        bound = BOUND_MARGIN * exceeded;
    }
}

/// Zig-zag branch labels drawn with `P(ZAG) = Ψ_R†Ψ_R/ρ` at each position.
pub fn assign_branches(state: &ZigzagState, t: f64, positions: &[Vec3], seed: u64) -> Vec<Branch> {
    let seed = mix_seed(seed, 0x6272_616e_6368);
    positions
        .par_iter()
        .enumerate()
        .map(|(i, x)| {
            let psi = state.evaluate(t, x);
            let p_zag = psi.right.norm_sqr() / psi.density();
            if stream_rng(seed, i as u64).random::<f64>() < p_zag {
                Branch::Zag
            } else {
                Branch::Zig
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn moments(xs: &[Vec3]) -> (Vec3, Vec3) {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<Vec3>() / n;
        let var = xs.iter().map(|x| (x - mean).component_mul(&(x - mean))).sum::<Vec3>() / (n - 1.0);
        (mean, var)
    }

    #[test]
    fn uniform_density_is_centred() {
        let region = BoxRegion::new(Vec3::new(-1.0, 0.0, 2.0), Vec3::new(3.0, 1.0, 5.0)).unwrap();
        let n = 50_000;
        let xs = sample_density(&|_: &Vec3| 1.0, &region, n, 4).unwrap();
        let (mean, _) = moments(&xs);
        let c = region.center();
        let l = region.lengths();
        for k in 0..3 {
            let sigma = l[k] / 12f64.sqrt();
            assert!((mean[k] - c[k]).abs() < 3.0 * sigma / (n as f64).sqrt());
        }
        assert!(xs.iter().all(|x| region.contains(x)));
    }

    #[test]
    fn gaussian_covariance() {
        let s = [0.7, 1.0, 1.3];
        let g = move |x: &Vec3| (-(0..3).map(|k| x[k] * x[k] / (2.0 * s[k] * s[k])).sum::<f64>()).exp();
        let xs = sample_density(&g, &BoxRegion::cube(8.0).unwrap(), 100_000, 9).unwrap();
        let (_, var) = moments(&xs);
        for k in 0..3 {
            assert!((var[k] / (s[k] * s[k]) - 1.0).abs() < 0.03, "axis {k}: {}", var[k]);
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let f = |x: &Vec3| 1.0 + x.x * x.x;
        let r = BoxRegion::cube(1.0).unwrap();
        assert_eq!(sample_density(&f, &r, 500, 1).unwrap(), sample_density(&f, &r, 500, 1).unwrap());
        assert_ne!(sample_density(&f, &r, 500, 1).unwrap(), sample_density(&f, &r, 500, 2).unwrap());
    }

    #[test]
    fn narrow_peak_between_scan_points_raises_bound() {
        // spike narrower than the scan lattice: the pass restarts with a
        // larger bound instead of under-sampling the spike
        let f = |x: &Vec3| 1.0 + 50.0 * (-((x - Vec3::repeat(0.013)).norm_squared()) / 2e-4).exp();
        let xs = sample_density(&f, &BoxRegion::cube(1.0).unwrap(), 2000, 3).unwrap();
        assert_eq!(xs.len(), 2000);
    }

    #[test]
    fn sampling_errors() {
        let r = BoxRegion::cube(1.0).unwrap();
        assert_eq!(sample_density(&|_: &Vec3| 0.0, &r, 10, 0), Err(EnsembleError::ZeroDensity));
        let f = |x: &Vec3| if x.norm() < 1e-3 { 1.0 } else { 0.0 };
        assert!(matches!(sample_density(&f, &r, 4, 0), Err(EnsembleError::BoundTooLoose(_))));
        assert_eq!(sample_density(&|_: &Vec3| 1.0, &r, 0, 0), Err(EnsembleError::EmptyFrame));
        assert_eq!(EnsembleError::ZeroDensity.to_string(), "density identically zero on box");
    }
}
