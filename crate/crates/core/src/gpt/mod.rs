//! Generalized probabilistic theories over finite-dimensional cones.
//!
//! A theory is a pointed convex cone `V⁺` in `ℝ^d` with a unit functional
//! `u`. States are cone elements with `u = 1`; effects are functionals `φ`
//! with `0 ≤ φ ≤ u` on the cone. A state-valued measure (SVM) assigns a cone
//! element to each event, additively, with a state on the whole world set.
//!
//! The PSD cone is not finitely generated, so cones carry a kind tag and
//! each kind has its own membership and effect tests.

pub mod basis;
mod embed;
pub mod nnls;

pub use embed::{
    embed_classical, embed_classical_hypothesis, embed_quantum, hypothesis_state,
};

use nalgebra::{DMatrix, DVector};

use crate::agreement::{self, AgreementVerdict, ConditionalLayer};
use crate::error::{Error, Result};
use crate::event::Event;
use crate::knowledge::KnowledgeModel;
use crate::tolerance;

#[derive(Clone, Debug, PartialEq)]
pub enum ConeKind {
    /// The nonnegative orthant, generated by the standard basis.
    Simplex,
    /// Positive semidefinite `k×k` Hermitian matrices in the basis of [`basis`].
    PsdCone { matrix_dim: usize },
    /// The cone spanned by finitely many generators.
    Polyhedral { generators: Vec<Vec<f64>> },
}

/// A cone with its unit functional and an optional list of observables.
#[derive(Clone, Debug, PartialEq)]
pub struct ConeSpace {
    dim: usize,
    kind: ConeKind,
    unit: Vec<f64>,
    observables: Vec<Effect>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl ConeSpace {
    /// `ℝ^dim_+` with `u` the sum of coordinates.
    pub fn simplex(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidCone("dimension must be positive".into()));
        }
        Ok(Self {
            dim,
            kind: ConeKind::Simplex,
            unit: vec![1.0; dim],
            observables: Vec::new(),
        })
    }

    /// PSD matrices of size `matrix_dim` with the trace as unit.
    pub fn psd(matrix_dim: usize) -> Result<Self> {
        if matrix_dim == 0 {
            return Err(Error::InvalidCone("matrix dimension must be positive".into()));
        }
        Ok(Self {
            dim: matrix_dim * matrix_dim,
            kind: ConeKind::PsdCone { matrix_dim },
            unit: basis::trace_coordinates(matrix_dim),
            observables: Vec::new(),
        })
    }

    /// The cone spanned by `generators`. Every generator must be nonzero with
    /// `u(g) > 0`, and the cone must be pointed.
    pub fn polyhedral(generators: Vec<Vec<f64>>, unit: Vec<f64>) -> Result<Self> {
        let dim = unit.len();
        if dim == 0 {
            return Err(Error::InvalidCone("dimension must be positive".into()));
        }
        if generators.is_empty() {
            return Err(Error::InvalidCone("no generators".into()));
        }
        for (k, g) in generators.iter().enumerate() {
            if g.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: g.len(),
                });
            }
            if g.iter().any(|x| !x.is_finite()) || g.iter().all(|&x| x == 0.0) {
                return Err(Error::InvalidCone(format!("generator {k} is zero or not finite")));
            }
            if dot(&unit, g) <= 0.0 {
                return Err(Error::InvalidCone(format!(
                    "unit functional is not positive on generator {k}"
                )));
            }
        }
        let cone = Self {
            dim,
            kind: ConeKind::Polyhedral { generators },
            unit,
            observables: Vec::new(),
        };
        if let ConeKind::Polyhedral { generators } = &cone.kind {
            for (k, g) in generators.iter().enumerate() {
                let negated: Vec<f64> = g.iter().map(|x| -x).collect();
                if cone.contains(&negated, tolerance::CONE_RESIDUAL)? {
                    return Err(Error::InvalidCone(format!(
                        "not pointed: the negation of generator {k} lies in the cone"
                    )));
                }
            }
        }
        Ok(cone)
    }

    /// Attaches observables; each must be a valid effect.
    pub fn with_observables(mut self, observables: Vec<Effect>) -> Result<Self> {
        for phi in &observables {
            if !self.effect_valid(phi, tolerance::PSD) {
                return Err(Error::InvalidEffect);
            }
        }
        self.observables = observables;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &ConeKind {
        &self.kind
    }

    pub fn unit(&self) -> &[f64] {
        &self.unit
    }

    pub fn observables(&self) -> &[Effect] {
        &self.observables
    }

    pub fn unit_value(&self, v: &[f64]) -> f64 {
        dot(&self.unit, v)
    }

    /// Tolerance used when validating measures on this cone.
    pub fn membership_tol(&self) -> f64 {
        match self.kind {
            ConeKind::Polyhedral { .. } => tolerance::CONE_RESIDUAL,
            _ => tolerance::PSD,
        }
    }

    fn check_len(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: v.len(),
            });
        }
        Ok(())
    }

    /// Whether `v` lies in the cone, up to `tol`.
    ///
    /// Simplex: every coordinate is at least `-tol`. PSD: the matrix with
    /// coordinates `v` has smallest eigenvalue at least `-tol`. Polyhedral:
    /// the nonnegative least-squares fit by the generators leaves a residual
    /// of at most `tol · max(1, ‖v‖)`.
    pub fn contains(&self, v: &[f64], tol: f64) -> Result<bool> {
        self.check_len(v)?;
        if v.iter().any(|x| !x.is_finite()) {
            return Ok(false);
        }
        Ok(match &self.kind {
            ConeKind::Simplex => v.iter().all(|&x| x >= -tol),
            ConeKind::PsdCone { matrix_dim } => {
                basis::devectorize(v, *matrix_dim)?.min_eigenvalue() >= -tol
            }
            ConeKind::Polyhedral { generators } => {
                let a = DMatrix::from_fn(self.dim, generators.len(), |r, c| generators[c][r]);
                let b = DVector::from_column_slice(v);
                let scale = b.norm().max(1.0);
                nnls::nnls(&a, &b).residual <= tol * scale
            }
        })
    }

    /// Whether `0 ≤ φ ≤ u` on the cone, up to `tol`. Checked on normalised
    /// generators for finitely generated cones and through eigenvalues for
    /// the PSD cone.
    pub fn effect_valid(&self, phi: &Effect, tol: f64) -> bool {
        let f = phi.functional();
        if f.len() != self.dim || f.iter().any(|x| !x.is_finite()) {
            return false;
        }
        let in_range = |x: f64| x >= -tol && x <= 1.0 + tol;
        match &self.kind {
            ConeKind::Simplex => f.iter().all(|&x| in_range(x)),
            ConeKind::PsdCone { matrix_dim } => match basis::devectorize(f, *matrix_dim) {
                Ok(m) => m.eigenvalues().into_iter().all(in_range),
                Err(_) => false,
            },
            ConeKind::Polyhedral { generators } => generators
                .iter()
                .all(|g| in_range(dot(f, g) / dot(&self.unit, g))),
        }
    }
}

pub fn cone_membership(cone: &ConeSpace, v: &[f64], tol: f64) -> Result<bool> {
    cone.contains(v, tol)
}

pub fn effect_valid(cone: &ConeSpace, phi: &Effect, tol: f64) -> bool {
    cone.effect_valid(phi, tol)
}

/// A linear functional, given by its coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Effect {
    functional: Vec<f64>,
}

impl Effect {
    /// An unchecked functional; see [`ConeSpace::effect_valid`].
    pub fn new(functional: Vec<f64>) -> Self {
        Self { functional }
    }

    pub fn checked(cone: &ConeSpace, functional: Vec<f64>) -> Result<Self> {
        let phi = Self { functional };
        if !cone.effect_valid(&phi, tolerance::PSD) {
            return Err(Error::InvalidEffect);
        }
        Ok(phi)
    }

    pub fn functional(&self) -> &[f64] {
        &self.functional
    }

    pub fn apply(&self, v: &[f64]) -> f64 {
        dot(&self.functional, v)
    }
}

/// An element of the cone.
#[derive(Clone, Debug, PartialEq)]
pub struct ConeElement {
    coords: Vec<f64>,
}

impl ConeElement {
    pub fn new(cone: &ConeSpace, coords: Vec<f64>) -> Result<Self> {
        if !cone.contains(&coords, cone.membership_tol())? {
            return Err(Error::NotInCone);
        }
        Ok(Self { coords })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }
}

impl AsRef<[f64]> for ConeElement {
    fn as_ref(&self) -> &[f64] {
        &self.coords
    }
}

/// A normalised cone element, `u(μ) = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct GptState {
    element: ConeElement,
}

impl GptState {
    pub fn new(cone: &ConeSpace, coords: Vec<f64>) -> Result<Self> {
        let element = ConeElement::new(cone, coords)?;
        let u = cone.unit_value(&element.coords);
        if (u - 1.0).abs() > tolerance::NORMALIZATION {
            return Err(Error::InvalidSvm(format!("state has unit value {u}")));
        }
        Ok(Self { element })
    }

    pub fn coords(&self) -> &[f64] {
        &self.element.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.element.coords
    }
}

impl AsRef<[f64]> for GptState {
    fn as_ref(&self) -> &[f64] {
        self.coords()
    }
}

/// A state-valued measure over `0..n_worlds`, stored as one atom per world.
#[derive(Clone, Debug, PartialEq)]
pub struct Svm {
    cone: ConeSpace,
    atoms: Vec<Vec<f64>>,
}

impl Svm {
    pub fn new(cone: ConeSpace, atoms: Vec<Vec<f64>>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidSvm("no worlds".into()));
        }
        let tol = cone.membership_tol();
        for (w, atom) in atoms.iter().enumerate() {
            if !cone.contains(atom, tol)? {
                return Err(Error::InvalidSvm(format!("atom of world {w} is not in the cone")));
            }
        }
        let svm = Self { cone, atoms };
        let total = svm.total();
        let u = svm.cone.unit_value(&total);
        if (u - 1.0).abs() > tolerance::NORMALIZATION {
            return Err(Error::InvalidSvm(format!("total has unit value {u}")));
        }
        Ok(svm)
    }

    pub fn cone(&self) -> &ConeSpace {
        &self.cone
    }

    pub fn n_worlds(&self) -> usize {
        self.atoms.len()
    }

    pub fn atoms(&self) -> &[Vec<f64>] {
        &self.atoms
    }

    /// `μ(Λ)`, the coordinate-wise sum of atoms over `lam`.
    pub fn value(&self, lam: &Event) -> Vec<f64> {
        let mut v = vec![0.0; self.cone.dim];
        for w in lam {
            for (acc, x) in v.iter_mut().zip(&self.atoms[w]) {
                *acc += x;
            }
        }
        v
    }

    pub fn total(&self) -> Vec<f64> {
        self.value(&Event::full(self.atoms.len()))
    }

    /// `μ(Λ)/u[μ(Λ)]`.
    pub fn conditional_state(&self, lam: &Event) -> Result<GptState> {
        let value = self.value(lam);
        let mass = self.cone.unit_value(&value);
        if mass <= tolerance::NULL_MASS {
            return Err(Error::ConditioningOnNull { mass });
        }
        Ok(GptState {
            element: ConeElement {
                coords: value.into_iter().map(|x| x / mass).collect(),
            },
        })
    }
}

impl ConditionalLayer for Svm {
    type Posterior = Vec<f64>;

    fn n_worlds(&self) -> usize {
        self.atoms.len()
    }

    fn mass(&self, event: &Event) -> f64 {
        event.iter().fold(0.0, |acc, w| acc + self.cone.unit_value(&self.atoms[w]))
    }

    fn conditional_unchecked(&self, event: &Event) -> Vec<f64> {
        let value = self.value(event);
        let mass = self.cone.unit_value(&value);
        value.into_iter().map(|x| x / mass).collect()
    }

    /// Coordinate max-norm; infinite for mismatched lengths.
    fn distance(&self, a: &Vec<f64>, b: &Vec<f64>) -> f64 {
        if a.len() != b.len() {
            return f64::INFINITY;
        }
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }
}

pub fn svm_value(mu: &Svm, lam: &Event) -> Vec<f64> {
    mu.value(lam)
}

pub fn gpt_conditional_state(mu: &Svm, lam: &Event) -> Result<GptState> {
    mu.conditional_state(lam)
}

fn targets_as_vectors<T: AsRef<[f64]>>(targets: &[T]) -> Vec<Vec<f64>> {
    targets.iter().map(|t| t.as_ref().to_vec()).collect()
}

/// `⋂_i {w | ‖μ_{|Q_i(w)} − μ_i‖_∞ ≤ tol}`, skipping cells with `u = 0`.
pub fn gpt_agreement_event<T: AsRef<[f64]>>(
    model: &KnowledgeModel,
    mu: &Svm,
    targets: &[T],
    tol: f64,
) -> Result<Event> {
    agreement::agreement_event(model, mu, &targets_as_vectors(targets), tol)
}

pub fn verify_gpt_aumann<T: AsRef<[f64]>>(
    model: &KnowledgeModel,
    mu: &Svm,
    targets: &[T],
    tol: f64,
) -> Result<AgreementVerdict<Vec<f64>>> {
    agreement::verify(model, mu, &targets_as_vectors(targets), tol)
}
