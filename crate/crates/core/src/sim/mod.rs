//! Simulated single-qubit tomography experiments with SPAM noise, seeded
//! binomial sampling, and replication sweeps.
//!
//! The simulated gate is `X_{pi/2}` followed by depolarization. SPAM noise is
//! either depolarization of preparations and measurements or a coherent
//! rotation of every prepared state toward its orthogonal partner.

mod design;
mod noise;
mod sampling;
mod sweep;

pub use design::{ExperimentDesign, Shots};
pub use noise::{target_gate, true_frames, NoiseModel, SpamNoise, TrueFrames, DEFAULT_GATE_GAMMA};
pub use sampling::{
    effect_label, exact_prob_matrices, sample_dataset, sample_outcomes, OutcomeTable, SampledData,
    PROB_TOL,
};
pub use sweep::{
    run_replication, simulate, sweep, Aggregate, EstimatorOutcome, EstimatorSpec, Replication,
    Summary, SweepConfig, SweepKind, SweepRecord, SweepResult,
};
