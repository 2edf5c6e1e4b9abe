//! Laboratory for p-random q-proportion Bulgarian solitaire.
//!
//! Real-valued code is generic over [`Real`] (`f32` or `f64`); the aliases
//! at the crate root fix the scalar to `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod exact;
pub mod montecarlo;
pub mod oracle;
pub mod partition;
pub mod proportion;
pub mod rng;
pub mod scalar;
pub mod shape;

pub use dynamics::{
    advance_random, candidates, play, step_deterministic, step_random, triangular_start, Dynamics, MoveOutcome,
    SigmaRule, SnapshotPolicy, SolitaireParams, Trajectory,
};
pub use error::{Error, Result};
pub use exact::{
    enumerate_partitions, enumerate_partitions_capped, stationary, stationary_shape_mass, total_variation,
    transition_row, SolveMethod, StateIndex,
};
pub use montecarlo::{
    deviation_timeseries, make_schedule, regime_scan, run_chain, run_chains, sample_state_counts, RegimePoint,
    RegimeRow, RegimeRunConfig,
};
pub use oracle::{
    check_domination, chernoff_bound, exhaustive_domination, run_qprocess, run_threshold, run_union, BernoulliMatrix,
    DominationReport, QProcessState, ThresholdProcessState, UnionProcess,
};
pub use partition::{boundary, ord, Configuration, Partition, WeakComposition};
pub use proportion::Proportion;
pub use rng::RngStream;
pub use scalar::Real;
pub use shape::{rescaled_boundary, shape_eval, Profile, ScaleMode, StepProfile};

pub type LimitShape = shape::LimitShape<f64>;
pub type Scaling = shape::Scaling<f64>;
pub type ScalingFactor = shape::ScalingFactor<f64>;
pub type DeviationReport = shape::DeviationReport<f64>;
pub type TransitionKernel = exact::TransitionKernel<f64>;
pub type Schedule = montecarlo::Schedule<f64>;
pub type ChainConfig = montecarlo::ChainConfig<f64>;
pub type ChainStats = montecarlo::ChainStats<f64>;
pub type StationaryDistribution = exact::StationaryDistribution<f64>;
