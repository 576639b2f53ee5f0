//! Guidance velocities, zig-zag jump rates, deterministic trajectory
//! integration and the piecewise-deterministic zig-zag process.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

mod integrate;
mod rates;
pub mod rng;
mod velocity;
mod zigzag;

pub use integrate::{
    advance_deterministic, integrate_deterministic, step_times, Trajectory, TrajectoryMeta, TrajectorySample,
};
pub use rates::{jump_rate, zigzag_jump_rate};
pub use velocity::{dirac_velocity, weyl_velocity, BranchGuidance, DiracGuidance, VelocityField, WeylGuidance};
pub use zigzag::{advance_zigzag, simulate_zigzag, simulate_zigzag_with_rng, BranchField, JumpEvent, ZigzagEndpoint};

/// Densities at or below this value count as a node of the guiding field.
pub const DENSITY_FLOOR: f64 = 1e-300;

/// Hazard accumulated over one step above which the step is flagged as too
/// coarse to resolve the jump process.
pub const COARSE_STEP_HAZARD: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("velocity undefined at node")]
    Node,
    #[error("trajectory hit node at t = {t}")]
    NodeHit { t: f64 },
    #[error("jump rate undefined: {0} density vanishes")]
    ZeroBranchDensity(Branch),
    #[error("invalid time span: t0 = {t0}, t1 = {t1}")]
    InvalidSpan { t0: f64, t1: f64 },
    #[error("time step must be positive, got {0}")]
    InvalidStep(f64),
    #[error("zig-zag motion needs a branch label")]
    MissingBranch,
}

/// Active component of a zig-zag beable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Branch {
    /// Guided by `Ψ_L` with `v = -Ψ_L†σΨ_L/Ψ_L†Ψ_L`.
    Zig,
    /// Guided by `Ψ_R` with `v = Ψ_R†σΨ_R/Ψ_R†Ψ_R`.
    Zag,
}

impl Branch {
    pub fn other(self) -> Branch {
        match self {
            Branch::Zig => Branch::Zag,
            Branch::Zag => Branch::Zig,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Zig => "ZIG",
            Branch::Zag => "ZAG",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Branch {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ZIG" | "zig" | "L" => Ok(Branch::Zig),
            "ZAG" | "zag" | "R" => Ok(Branch::Zag),
            other => Err(format!("unknown branch `{other}`")),
        }
    }
}
