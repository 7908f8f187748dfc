//! Layer-independent agreement verification.
//!
//! All three agreement theorems share one shape: every agent conditions a
//! measure on its own cell, the worlds at which each agent's conditional
//! equals a declared target form the event `E`, and whenever `C(E)` carries
//! positive mass every target must equal the conditional on `C(E)`. A
//! [`ConditionalLayer`] supplies the mass, conditioning and distance for one
//! kind of measure; [`agreement_event`] and [`verify`] do the rest.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::event::Event;
use crate::knowledge::KnowledgeModel;
use crate::tolerance;

/// A measure that can be conditioned on events.
pub trait ConditionalLayer {
    /// The conditional object compared against agents' targets.
    type Posterior: Clone;

    fn n_worlds(&self) -> usize;

    /// Total weight of the event: probability, trace, or unit-functional value.
    fn mass(&self, event: &Event) -> f64;

    /// The conditional on `event`; only called when the mass exceeds the null threshold.
    fn conditional_unchecked(&self, event: &Event) -> Self::Posterior;

    fn distance(&self, a: &Self::Posterior, b: &Self::Posterior) -> f64;

    fn conditional(&self, event: &Event) -> Result<Self::Posterior> {
        let mass = self.mass(event);
        if mass <= tolerance::NULL_MASS {
            return Err(Error::ConditioningOnNull { mass });
        }
        Ok(self.conditional_unchecked(event))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum VerdictStatus {
    Holds,
    VacuousEmptyCommonKnowledge,
    VacuousNullCommonKnowledge,
    /// Targets disagree with the pooled conditional. The theorems rule this out.
    Violated,
}

impl VerdictStatus {
    pub fn is_vacuous(self) -> bool {
        matches!(
            self,
            VerdictStatus::VacuousEmptyCommonKnowledge | VerdictStatus::VacuousNullCommonKnowledge
        )
    }
}

/// Outcome of checking one agreement instance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AgreementVerdict<P> {
    /// `E`: worlds where every agent's cell conditional matches its target.
    pub agreement_event: Event,
    /// `C(E)`.
    pub common_event: Event,
    /// The agents' declared targets.
    pub posteriors: Vec<P>,
    pub common_mass: f64,
    /// The conditional on `C(E)`, when `C(E)` has positive mass.
    pub pooled_posterior: Option<P>,
    /// Largest target-to-pooled distance, when the verdict is not vacuous.
    pub max_deviation: Option<f64>,
    pub status: VerdictStatus,
}

/// Worlds of `agent` whose cell conditional lies within `tol` of `target`.
/// Worlds in null cells are excluded.
pub fn matching_worlds<L: ConditionalLayer>(
    model: &KnowledgeModel,
    layer: &L,
    agent: usize,
    target: &L::Posterior,
    tol: f64,
) -> Result<Event> {
    let partition = model.partition(agent)?;
    let mut matched = model.empty_event();
    for cell in partition.cells() {
        if layer.mass(cell) <= tolerance::NULL_MASS {
            continue;
        }
        let posterior = layer.conditional_unchecked(cell);
        if layer.distance(&posterior, target) <= tol {
            matched.union_with(cell);
        }
    }
    Ok(matched)
}

/// The event `E = ⋂_i {w | conditional on Q_i(w) = target_i}`.
pub fn agreement_event<L: ConditionalLayer>(
    model: &KnowledgeModel,
    layer: &L,
    targets: &[L::Posterior],
    tol: f64,
) -> Result<Event> {
    check_layer(model, layer, targets.len())?;
    let mut event = model.full_event();
    for (agent, target) in targets.iter().enumerate() {
        event.intersect_with(&matching_worlds(model, layer, agent, target, tol)?);
        if event.is_empty() {
            break;
        }
    }
    Ok(event)
}

fn check_layer<L: ConditionalLayer>(
    model: &KnowledgeModel,
    layer: &L,
    n_targets: usize,
) -> Result<()> {
    if layer.n_worlds() != model.n_worlds() {
        return Err(Error::UniverseMismatch {
            expected: model.n_worlds(),
            found: layer.n_worlds(),
        });
    }
    if n_targets != model.n_agents() {
        return Err(Error::DimensionMismatch {
            expected: model.n_agents(),
            found: n_targets,
        });
    }
    Ok(())
}

/// Builds `E`, computes `C(E)` and compares every target with the conditional on `C(E)`.
pub fn verify<L: ConditionalLayer>(
    model: &KnowledgeModel,
    layer: &L,
    targets: &[L::Posterior],
    tol: f64,
) -> Result<AgreementVerdict<L::Posterior>> {
    let agreement_event = agreement_event(model, layer, targets, tol)?;
    let common_event = model.common_knowledge(&agreement_event)?;
    Ok(judge(layer, targets, agreement_event, common_event, tol))
}

/// Verdict for an already computed `E` and `C(E)`.
pub fn judge<L: ConditionalLayer>(
    layer: &L,
    targets: &[L::Posterior],
    agreement_event: Event,
    common_event: Event,
    tol: f64,
) -> AgreementVerdict<L::Posterior> {
    let common_mass = layer.mass(&common_event);
    let mut verdict = AgreementVerdict {
        agreement_event,
        common_event,
        posteriors: targets.to_vec(),
        common_mass,
        pooled_posterior: None,
        max_deviation: None,
        status: VerdictStatus::VacuousEmptyCommonKnowledge,
    };
    if verdict.common_event.is_empty() {
        return verdict;
    }
    if common_mass <= tol || common_mass <= tolerance::NULL_MASS {
        verdict.status = VerdictStatus::VacuousNullCommonKnowledge;
        return verdict;
    }
    let pooled = layer.conditional_unchecked(&verdict.common_event);
    let deviation = targets
        .iter()
        .map(|t| layer.distance(t, &pooled))
        .fold(0.0, f64::max);
    verdict.status = if deviation <= tol {
        VerdictStatus::Holds
    } else {
        VerdictStatus::Violated
    };
    verdict.pooled_posterior = Some(pooled);
    verdict.max_deviation = Some(deviation);
    verdict
}
