//! Gaussian-process bandit optimization under adversarially corrupted
//! observations.
//!
//! The crate provides:
//!
//! - kernels on a discretized domain ([`kernels`]),
//! - incremental GP regression with corrupted observations ([`posterior`]),
//! - exploration-coefficient schedules, intersected confidence bounds,
//!   suboptimal sets and potential-maximizer sets ([`confidence`]),
//! - the selection policies: a vanilla GP-UCB baseline, enlarged-bound UCB
//!   for a known corruption budget, the randomized fast/slow pair, and the
//!   layered policy for unknown budgets ([`policies`]),
//! - adaptive corruption strategies with exact budget accounting
//!   ([`adversary`]),
//! - and a deterministic round loop with regret accounting and run-long
//!   structural audits ([`simulator`]).
//!
//! The numeric core is generic over [`scalar::Scalar`]; the aliases at the
//! crate root fix `f64`, which is what the CLI and the acceptance suite use.
//! Single-precision aliases live in [`single`].

pub mod adversary;
pub mod confidence;
pub mod kernels;
pub mod policies;
pub mod posterior;
pub mod scalar;
pub mod simulator;

use thiserror::Error as ThisError;

/// Errors surfaced by the numeric core.
#[derive(Debug, ThisError)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite input")]
    NonFiniteInput,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("histories do not match: {0}")]
    HistoryMismatch(String),
    #[error("empty trace")]
    EmptyTrace,
    #[error("internal invariant violated: {0}")]
    InternalInvariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

// Double-precision aliases; the concrete types the rest of the workspace
// builds against.
pub type DomainGrid = kernels::DomainGrid<f64>;
pub type Kernel = kernels::Kernel<f64>;
pub type GridKernel = kernels::GridKernel<f64>;
pub type Posterior = posterior::Posterior<f64>;
pub type Observation = posterior::Observation<f64>;
pub type BetaSchedule = confidence::BetaSchedule<f64>;
pub type BetaVariant = confidence::BetaVariant<f64>;
pub type Snapshot = confidence::Snapshot<f64>;
pub type IntersectedBounds = confidence::IntersectedBounds<f64>;
pub type MaximizerSets = confidence::MaximizerSets;
pub type PolicyState = policies::PolicyState<f64>;
pub type CorruptionLedger = adversary::CorruptionLedger<f64>;
pub type CorruptionFunction = adversary::CorruptionFunction<f64>;
pub type AdversaryStrategy = adversary::AdversaryStrategy<f64>;
pub type Objective = simulator::Objective<f64>;
pub type ExperimentSetup = simulator::ExperimentSetup<f64>;
pub type RunOutput = simulator::RunOutput<f64>;

/// Single-precision aliases for the numeric core.
pub mod single {
    pub type DomainGrid = crate::kernels::DomainGrid<f32>;
    pub type Kernel = crate::kernels::Kernel<f32>;
    pub type GridKernel = crate::kernels::GridKernel<f32>;
    pub type Posterior = crate::posterior::Posterior<f32>;
    pub type BetaSchedule = crate::confidence::BetaSchedule<f32>;
    pub type IntersectedBounds = crate::confidence::IntersectedBounds<f32>;
}
