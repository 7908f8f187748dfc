use thiserror::Error;

/// Errors raised by the model, measure and cone layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("agent index {agent} out of range ({n_agents} agents)")]
    AgentOutOfRange { agent: usize, n_agents: usize },

    #[error("world index {world} out of range ({n_worlds} worlds)")]
    WorldOutOfRange { world: usize, n_worlds: usize },

    #[error("event is over {found} worlds, expected {expected}")]
    UniverseMismatch { expected: usize, found: usize },

    #[error("a knowledge model needs at least one world")]
    NoWorlds,

    #[error("a knowledge model needs at least one agent")]
    NoAgents,

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("event {event} is not a union of cells of agent {agent}")]
    NotCellUnion { agent: usize, event: String },

    #[error("invalid probability measure: {0}")]
    InvalidMeasure(String),

    #[error("conditioning on an event of negligible mass {mass:e}")]
    ConditioningOnNull { mass: f64 },

    #[error("matrix is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("trace is {trace}, expected 1")]
    BadTrace { trace: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid density-operator-valued measure: {0}")]
    InvalidDovm(String),

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("invalid cone: {0}")]
    InvalidCone(String),

    #[error("vector is not in the cone")]
    NotInCone,

    #[error("functional is not an effect of the cone")]
    InvalidEffect,

    #[error("invalid state-valued measure: {0}")]
    InvalidSvm(String),

    #[error("common-knowledge iteration did not stabilise within {max_iters} steps")]
    FixpointNotReached { max_iters: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
