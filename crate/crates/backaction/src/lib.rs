//! Monte Carlo simulation and analysis of variable-strength QND qubit
//! readout through a phase-preserving amplification chain.
//!
//! The crate simulates scaled heterodyne outcomes of dispersive qubit
//! measurement, applies the outcome-conditioned back-action map to the
//! qubit Bloch vector, and reproduces the standard analyses: quantum-jump
//! records with relaxation-time estimation, conditional tomograms over the
//! outcome plane, and the back-action/dephasing summary curves.
//!
//! Everything is deterministic under a `(master_seed, stream_id)`
//! randomness contract and parallelizes over trials with bit-reproducible
//! aggregation; see [`rng`] and [`runner`].

pub mod bloch;
pub mod fit;
pub mod map;
pub mod math;
pub mod params;
pub mod record;
pub mod rng;
pub mod runner;
pub mod sampler;
pub mod svg;
pub mod tomography;
pub mod update;

pub use bloch::{BlochVector, RotationAxis};
pub use params::{
    apparent_strength, dispersive_angle, AmpParams, CavityParams, DriveParams, Outcome,
    QubitParams, StrengthParams,
};
pub use rng::SeedPlan;
pub use update::{update_general, update_plus_y};
