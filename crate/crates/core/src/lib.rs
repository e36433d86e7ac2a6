//! Ensemble annealed sampling of lattice Gibbs densities and functional
//! hierarchical tensor density estimation by sketching.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod ais;
pub mod diagnostics;
pub mod ensemble;
pub mod error;
pub mod fht;
pub mod kernels;
pub mod lattice;
pub mod potential;
pub mod quadrature;
pub mod rng;
pub mod schedule;
pub mod sketch;

pub use ais::{
    ais_run, ais_weighted, AisEvent, AisParams, BirthDeath, LevelReport, WeightedSample,
};
pub use ensemble::ParticleEnsemble;
pub use error::{Error, Result};
pub use fht::{build_tree, DimensionTree, FhtModel, FourierBasis, SiteOrder};
pub use kernels::{KernelParams, MalaChain, ScaledTarget};
pub use lattice::{build_potential, Geometry, GinzburgLandau, GradVector, PotentialSpec};
pub use potential::Potential;
pub use rng::SeedPath;
pub use schedule::{make_schedule, AnnealingSchedule, ScheduleKind};
