use rand::Rng;
use rayon::prelude::*;

use crate::dynamics::rng::stream_rng;
use crate::spinor::Vec3;

use super::{EnsembleError, Grid};

/// How the density is averaged over a cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CellRule {
    /// Equal-weight mean of the cell midpoint and its eight corners.
    #[default]
    MidpointCorners,
    /// Tensor Gauss–Legendre rule with the given number of nodes per axis.
    GaussLegendre(usize),
}

/// Gauss–Legendre nodes and weights on `[0, 1]`.
fn gauss_legendre_unit(order: usize) -> Vec<(f64, f64)> {
    let n = order.max(1);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let k = k as f64;
                (p0, p1) = (p1, ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k);
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((0.5 * (1.0 - x), 0.5 * w));
    }
    out
}

/// Probability of each cell under `density`, renormalized over the box.
pub fn cell_probabilities<D>(density: &D, grid: &Grid, rule: CellRule) -> Result<Vec<f64>, EnsembleError>
where
    D: Fn(&Vec3) -> f64 + Sync + ?Sized,
{
    let w = grid.widths();
    let [nx, ny, nz] = grid.cells;
    let raw: Vec<f64> = match rule {
        CellRule::MidpointCorners => {
            let corner_index = |i: usize, j: usize, k: usize| (i * (ny + 1) + j) * (nz + 1) + k;
            let corners: Vec<f64> = (0..(nx + 1) * (ny + 1) * (nz + 1))
                .into_par_iter()
                .map(|c| {
                    let (i, j, k) = (c / ((ny + 1) * (nz + 1)), (c / (nz + 1)) % (ny + 1), c % (nz + 1));
                    density(&(grid.region.lo + Vec3::new(i as f64 * w.x, j as f64 * w.y, k as f64 * w.z)))
                })
                .collect();
            (0..grid.len())
                .into_par_iter()
                .map(|c| {
                    let [i, j, k] = grid.unflat(c);
                    let mut sum = density(&(grid.cell_lo(c) + w * 0.5));
                    for (di, dj, dk) in (0..8).map(|b| (b >> 2, (b >> 1) & 1, b & 1)) {
                        sum += corners[corner_index(i + di, j + dj, k + dk)];
                    }
                    sum / 9.0
                })
                .collect()
        }
        CellRule::GaussLegendre(order) => {
            let nodes = gauss_legendre_unit(order);
            (0..grid.len())
                .into_par_iter()
                .map(|c| {
                    let lo = grid.cell_lo(c);
                    let mut sum = 0.0;
                    for &(u, wu) in &nodes {
                        for &(v, wv) in &nodes {
                            for &(s, ws) in &nodes {
                                sum += wu * wv * ws * density(&(lo + Vec3::new(u * w.x, v * w.y, s * w.z)));
                            }
                        }
                    }
                    sum
                })
                .collect()
        }
    };
    let total: f64 = raw.iter().sum();
    if !(total > 0.0) || !total.is_finite() {
        return Err(EnsembleError::ZeroDensity);
    }
    Ok(raw.into_iter().map(|r| r / total).collect())
}

/// Particle counts per cell. Positions are wrapped first on periodic boxes.
pub fn histogram(positions: &[Vec3], grid: &Grid) -> Result<Vec<u64>, EnsembleError> {
    let mut counts = vec![0u64; grid.len()];
    for (index, x) in positions.iter().enumerate() {
        let c = grid.cell_of(&grid.region.wrap(x)).ok_or(EnsembleError::OutsideGrid { index })?;
        counts[c] += 1;
    }
    Ok(counts)
}

/// Coarse-grained H with its finite-sample bias removed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HValue {
    /// `Σ f ln(f/P)` over nonempty cells.
    pub raw: f64,
    /// `raw - (K - 1)/(2n)` with `K` nonempty cells: the leading bias of the
    /// plug-in estimator when the ensemble is in equilibrium.
    pub corrected: f64,
    pub nonempty: usize,
    pub n: u64,
}

pub fn h_from_counts(counts: &[u64], probs: &[f64]) -> Result<HValue, EnsembleError> {
    let n: u64 = counts.iter().sum();
    if n == 0 {
        return Err(EnsembleError::EmptyFrame);
    }
    let nf = n as f64;
    let mut raw = 0.0;
    let mut nonempty = 0;
    for (cell, (&c, &p)) in counts.iter().zip(probs).enumerate() {
        if c == 0 {
            continue;
        }
        if !(p > 0.0) {
            return Err(EnsembleError::SupportMismatch { cell });
        }
        nonempty += 1;
        let f = c as f64 / nf;
        raw += f * (f / p).ln();
    }
    Ok(HValue { raw, corrected: raw - (nonempty as f64 - 1.0) / (2.0 * nf), nonempty, n })
}

/// `H = ∫ρ̄ ln(ρ̄/P̄)` over the grid cells, with `ρ̄` the ensemble histogram
/// and `P̄` the cell-averaged `density`.
pub fn coarse_grained_h<D>(
    positions: &[Vec3],
    density: &D,
    grid: &Grid,
    rule: CellRule,
) -> Result<HValue, EnsembleError>
where
    D: Fn(&Vec3) -> f64 + Sync + ?Sized,
{
    let counts = histogram(positions, grid)?;
    h_from_counts(&counts, &cell_probabilities(density, grid, rule)?)
}

/// `Σ|count/n - P|`
pub fn l1_distance(counts: &[u64], probs: &[f64]) -> f64 {
    let n = counts.iter().sum::<u64>().max(1) as f64;
    counts.iter().zip(probs).map(|(&c, &p)| (c as f64 / n - p).abs()).sum()
}

/// `n` categorical draws from `probs`, tallied.
pub fn multinomial_counts<R: Rng + ?Sized>(probs: &[f64], n: u64, rng: &mut R) -> Vec<u64> {
    let mut cumulative = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for &p in probs {
        acc += p;
        cumulative.push(acc);
    }
    let total = acc;
    let mut counts = vec![0u64; probs.len()];
    for _ in 0..n {
        let u = rng.random::<f64>() * total;
        let c = cumulative.partition_point(|&q| q <= u).min(probs.len() - 1);
        counts[c] += 1;
    }
    counts
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseFloor {
    pub mean: f64,
    pub std: f64,
}

/// L1 distance between an exact `probs` and the histogram of `n` exact
/// draws from it, averaged over `reps` parametric bootstrap replicates.
pub fn noise_floor(probs: &[f64], n: u64, reps: usize, seed: u64) -> NoiseFloor {
    let l1: Vec<f64> = (0..reps as u64)
        .into_par_iter()
        .map(|r| l1_distance(&multinomial_counts(probs, n, &mut stream_rng(seed, r)), probs))
        .collect();
    mean_std(&l1)
}

/// Standard deviation of the bias-corrected H under resampling of the
/// particles themselves.
pub fn bootstrap_h_std(counts: &[u64], probs: &[f64], reps: usize, seed: u64) -> Result<f64, EnsembleError> {
    let n: u64 = counts.iter().sum();
    let empirical: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    let hs: Result<Vec<f64>, _> = (0..reps as u64)
        .into_par_iter()
        .map(|r| {
            h_from_counts(&multinomial_counts(&empirical, n, &mut stream_rng(seed, r)), probs).map(|h| h.corrected)
        })
        .collect();
    Ok(mean_std(&hs?).std)
}

fn mean_std(xs: &[f64]) -> NoiseFloor {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 { xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    NoiseFloor { mean, std: var.sqrt() }
}
