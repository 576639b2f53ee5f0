//! Pilot-wave dynamics of relativistic fermions.
//!
//! Weyl, Dirac and zig-zag wavefunctions built from plane-wave
//! superpositions, deterministic guidance trajectories, the stochastic
//! zig-zag jump process, Monte Carlo ensemble diagnostics and two-particle
//! velocity fields.

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod ensemble;
pub mod io;
pub mod multiparticle;
pub mod presets;
pub mod run;
pub mod scenario;
pub mod spinor;
pub mod states;
