//! Monte Carlo ensembles of beable positions: equilibrium sampling, parallel
//! evolution, histograms and the coarse-grained H-function.
//!
//! Relaxation times are expected to scale with a power of the
//! coarse-graining length; the exponent is not fitted here, only the decay of
//! H is measured.

use thiserror::Error;

use crate::dynamics::DynamicsError;

mod entropy;
mod equivariance;
mod evolve;
mod grid;
mod sample;

pub use entropy::{
    bootstrap_h_std, cell_probabilities, coarse_grained_h, h_from_counts, histogram, l1_distance, multinomial_counts,
    noise_floor, CellRule, HValue, NoiseFloor,
};
pub use equivariance::{equivariance_checkpoints, BranchReport, CheckpointReport, EnsembleDynamics, REFERENCE_RULE};
pub use evolve::{evolve_ensemble, h_curve, DeterministicMover, HCurve, HPoint, IdentityMover, Mover, ZigzagMover};
pub use grid::{BoxRegion, Grid};
pub use sample::{assign_branches, sample_density, DensityField, EnsembleFrame};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EnsembleError {
    #[error("invalid box: lower corner must be below upper corner on every axis")]
    InvalidBox,
    #[error("cell size must be positive, got {0}")]
    InvalidCellSize(f64),
    #[error("ensemble needs at least one particle")]
    EmptyFrame,
    #[error("density identically zero on box")]
    ZeroDensity,
    #[error("bound too loose: acceptance rate {0:e} below 1e-6")]
    BoundTooLoose(f64),
    #[error("{excluded} of {n} trajectories hit a node (more than 1%)")]
    TooManyNodes { excluded: usize, n: usize },
    #[error("support mismatch: cell {cell} holds samples but the density average vanishes")]
    SupportMismatch { cell: usize },
    #[error("particle {index} lies outside the grid box")]
    OutsideGrid { index: usize },
    #[error("checkpoints must be increasing and not before the frame time")]
    BadCheckpoints,
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}
