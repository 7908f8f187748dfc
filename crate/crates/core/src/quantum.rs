//! Density-operator-valued measures (DOVMs) and the quantum agreement check.
//!
//! A DOVM assigns a positive semidefinite operator to every event, additively,
//! with a density operator on the whole world set. Over a finite world set it
//! is determined by its atoms, one operator per world. Conditioning on `Λ`
//! normalises `ρ(Λ)` by its trace.

use crate::agreement::{self, AgreementVerdict, ConditionalLayer};
use crate::error::{Error, Result};
use crate::event::Event;
use crate::hermitian::{self, HermitianMatrix};
use crate::knowledge::KnowledgeModel;
use crate::tolerance;

/// A positive semidefinite, unit-trace Hermitian matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    matrix: HermitianMatrix,
}

impl DensityOperator {
    pub fn new(matrix: HermitianMatrix) -> Result<Self> {
        let trace = matrix.trace();
        if (trace - 1.0).abs() > tolerance::NORMALIZATION {
            return Err(Error::BadTrace { trace });
        }
        let min = matrix.min_eigenvalue();
        if min < -tolerance::PSD {
            return Err(Error::NotPsd {
                min_eigenvalue: min,
            });
        }
        Ok(Self { matrix })
    }

    /// The maximally mixed state `I/d`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: HermitianMatrix::identity(dim).scale(1.0 / dim as f64),
        }
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> HermitianMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

impl AsRef<HermitianMatrix> for DensityOperator {
    fn as_ref(&self) -> &HermitianMatrix {
        &self.matrix
    }
}

fn check_psd(m: &HermitianMatrix, what: impl FnOnce(f64) -> Error) -> Result<()> {
    let min = m.min_eigenvalue();
    if min < -tolerance::PSD {
        return Err(what(min));
    }
    Ok(())
}

fn check_dims<'a>(dim: usize, items: impl IntoIterator<Item = &'a HermitianMatrix>) -> Result<()> {
    for m in items {
        if m.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: m.dim(),
            });
        }
    }
    Ok(())
}

/// A DOVM over `0..n_worlds`, stored as one atom per world.
#[derive(Clone, Debug, PartialEq)]
pub struct Dovm {
    dim: usize,
    atoms: Vec<HermitianMatrix>,
}

impl Dovm {
    pub fn new(atoms: Vec<HermitianMatrix>) -> Result<Self> {
        let dim = atoms
            .first()
            .map(HermitianMatrix::dim)
            .ok_or_else(|| Error::InvalidDovm("no worlds".into()))?;
        if dim == 0 {
            return Err(Error::InvalidDovm("zero-dimensional Hilbert space".into()));
        }
        check_dims(dim, &atoms)?;
        for (w, atom) in atoms.iter().enumerate() {
            check_psd(atom, |min| {
                Error::InvalidDovm(format!("atom of world {w} has eigenvalue {min:e}"))
            })?;
        }
        let total = hermitian::sum(dim, &atoms);
        DensityOperator::new(total)
            .map_err(|e| Error::InvalidDovm(format!("total is not a density operator: {e}")))?;
        Ok(Self { dim, atoms })
    }

    /// Atoms `p(w)·|w⟩⟨w|` in dimension `n_worlds`: a classical measure as a DOVM.
    pub fn diagonal(weights: &[f64]) -> Result<Self> {
        let n = weights.len();
        Self::new(
            (0..n)
                .map(|w| {
                    let mut d = vec![0.0; n];
                    d[w] = weights[w];
                    HermitianMatrix::from_real_diagonal(&d)
                })
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_worlds(&self) -> usize {
        self.atoms.len()
    }

    pub fn atoms(&self) -> &[HermitianMatrix] {
        &self.atoms
    }

    /// `ρ(Λ)`, the sum of atoms over `lam`.
    pub fn value(&self, lam: &Event) -> HermitianMatrix {
        hermitian::sum(self.dim, lam.iter().map(|w| &self.atoms[w]))
    }

    /// `ρ(Ω)`.
    pub fn total(&self) -> HermitianMatrix {
        hermitian::sum(self.dim, &self.atoms)
    }

    /// `ρ(Λ)/Tr ρ(Λ)`.
    pub fn conditional_state(&self, lam: &Event) -> Result<DensityOperator> {
        let value = self.value(lam);
        let trace = value.trace();
        if trace <= tolerance::NULL_MASS {
            return Err(Error::ConditioningOnNull { mass: trace });
        }
        Ok(DensityOperator {
            matrix: value.scale(1.0 / trace),
        })
    }

    /// The POVM `E(Λ) = ρ(Ω)^{-1/2} ρ(Λ) ρ(Ω)^{-1/2}`, with the inverse
    /// square root taken on the support of `ρ(Ω)`. Its effects sum to the
    /// projector onto that support.
    pub fn to_povm(&self) -> Povm {
        let root = self.total().pinv_sqrt();
        Povm {
            dim: self.dim,
            effects: self.atoms.iter().map(|a| root.sandwich(a)).collect(),
        }
    }
}

/// Positive semidefinite effects, one per world.
#[derive(Clone, Debug, PartialEq)]
pub struct Povm {
    dim: usize,
    effects: Vec<HermitianMatrix>,
}

impl Povm {
    /// Requires PSD effects summing to the identity within `1e-9`.
    pub fn new(effects: Vec<HermitianMatrix>) -> Result<Self> {
        let dim = effects
            .first()
            .map(HermitianMatrix::dim)
            .ok_or_else(|| Error::InvalidPovm("no outcomes".into()))?;
        check_dims(dim, &effects)?;
        for (w, effect) in effects.iter().enumerate() {
            check_psd(effect, |min| {
                Error::InvalidPovm(format!("effect of world {w} has eigenvalue {min:e}"))
            })?;
        }
        let deviation = hermitian::sum(dim, &effects).max_abs_diff(&HermitianMatrix::identity(dim));
        if deviation > tolerance::NORMALIZATION {
            return Err(Error::InvalidPovm(format!(
                "effects sum to identity only within {deviation:e}"
            )));
        }
        Ok(Self { dim, effects })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_worlds(&self) -> usize {
        self.effects.len()
    }

    pub fn effects(&self) -> &[HermitianMatrix] {
        &self.effects
    }

    pub fn total(&self) -> HermitianMatrix {
        hermitian::sum(self.dim, &self.effects)
    }

    /// The DOVM `ρ(Λ) = σ^{1/2} E(Λ) σ^{1/2}`.
    pub fn to_dovm(&self, sigma: &DensityOperator) -> Result<Dovm> {
        if sigma.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: sigma.dim(),
            });
        }
        let root = sigma.matrix().psd_sqrt()?;
        Dovm::new(self.effects.iter().map(|e| root.sandwich(e)).collect())
    }
}

pub fn dovm_value(rho: &Dovm, lam: &Event) -> HermitianMatrix {
    rho.value(lam)
}

pub fn conditional_state(rho: &Dovm, lam: &Event) -> Result<DensityOperator> {
    rho.conditional_state(lam)
}

pub fn dovm_to_povm(rho: &Dovm) -> Povm {
    rho.to_povm()
}

pub fn povm_to_dovm(effects: &Povm, sigma: &DensityOperator) -> Result<Dovm> {
    effects.to_dovm(sigma)
}

impl ConditionalLayer for Dovm {
    type Posterior = HermitianMatrix;

    fn n_worlds(&self) -> usize {
        self.atoms.len()
    }

    fn mass(&self, event: &Event) -> f64 {
        event.iter().fold(0.0, |acc, w| acc + self.atoms[w].trace())
    }

    fn conditional_unchecked(&self, event: &Event) -> HermitianMatrix {
        let value = self.value(event);
        let trace = value.trace();
        value.scale(1.0 / trace)
    }

    /// Trace-norm distance.
    fn distance(&self, a: &HermitianMatrix, b: &HermitianMatrix) -> f64 {
        a.trace_distance(b)
    }
}

fn targets_as_matrices<T: AsRef<HermitianMatrix>>(sigmas: &[T]) -> Vec<HermitianMatrix> {
    sigmas.iter().map(|s| s.as_ref().clone()).collect()
}

/// `⋂_i {w | ‖ρ_{|Q_i(w)} − σ_i‖_tr ≤ tol}`, skipping zero-trace cells.
pub fn quantum_agreement_event<T: AsRef<HermitianMatrix>>(
    model: &KnowledgeModel,
    rho: &Dovm,
    sigmas: &[T],
    tol: f64,
) -> Result<Event> {
    agreement::agreement_event(model, rho, &targets_as_matrices(sigmas), tol)
}

/// Verdict with trace-norm distances between each `σ_i` and `ρ_{|C(E)}`.
pub fn verify_quantum_aumann<T: AsRef<HermitianMatrix>>(
    model: &KnowledgeModel,
    rho: &Dovm,
    sigmas: &[T],
    tol: f64,
) -> Result<AgreementVerdict<HermitianMatrix>> {
    agreement::verify(model, rho, &targets_as_matrices(sigmas), tol)
}

pub fn psd_sqrt(m: &HermitianMatrix) -> Result<HermitianMatrix> {
    m.psd_sqrt()
}
