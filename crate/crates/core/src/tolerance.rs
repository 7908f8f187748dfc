//! Numerical tolerances used across the crate.

/// Default absolute tolerance for posterior/state equality and null mass in verdicts.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Mass at or below which an event is treated as null when conditioning.
pub const NULL_MASS: f64 = 1e-12;

/// Allowed deviation of probability weights (and traces) from summing to one.
pub const NORMALIZATION: f64 = 1e-9;

/// Allowed deviation from Hermiticity before symmetrising is refused.
pub const HERMITIAN: f64 = 1e-12;

/// Most negative eigenvalue still accepted as positive semidefinite.
pub const PSD: f64 = 1e-9;

/// Eigenvalues at or below this are outside the support in pseudo-inverses.
pub const SUPPORT: f64 = 1e-12;

/// Residual tolerance of polyhedral cone membership.
pub const CONE_RESIDUAL: f64 = 1e-8;
