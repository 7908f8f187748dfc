//! Finite knowledge models, common knowledge, and agreement theorems.
//!
//! Agents share a finite world set and each holds a partition of it. The
//! crate computes knowledge, mutual knowledge and common knowledge, and
//! checks that agents who share a prior cannot hold commonly known posteriors
//! that differ. The check runs over three kinds of measure:
//!
//! - [`classical`]: probability measures and scalar posteriors;
//! - [`quantum`]: density-operator-valued measures and conditional states;
//! - [`gpt`]: state-valued measures over a convex cone with a unit functional.
//!
//! [`generators`] builds seeded random instances, and [`scenario`] holds the
//! file format and the command runners used by the `aumann` binary.

pub mod agreement;
pub mod classical;
pub mod error;
pub mod event;
pub mod generators;
pub mod gpt;
pub mod hermitian;
pub mod instance;
pub mod knowledge;
pub mod quantum;
pub mod scenario;
pub mod search;
pub mod tolerance;

pub use agreement::{AgreementVerdict, ConditionalLayer, VerdictStatus};
pub use classical::ProbabilityMeasure;
pub use error::{Error, Result};
pub use event::Event;
pub use gpt::{ConeKind, ConeSpace, Effect, GptState, Svm};
pub use hermitian::HermitianMatrix;
pub use instance::{Instance, LayerKind, Measure, Targets, Value, Verdict};
pub use knowledge::{KnowledgeModel, Partition};
pub use quantum::{DensityOperator, Dovm, Povm};
