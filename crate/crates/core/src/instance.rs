//! A knowledge model paired with a measure of any layer and the agents' targets.

use serde::Serialize;

use crate::agreement::{self, AgreementVerdict, ConditionalLayer, VerdictStatus};
use crate::classical::ProbabilityMeasure;
use crate::error::{Error, Result};
use crate::event::Event;
use crate::gpt::Svm;
use crate::hermitian::HermitianMatrix;
use crate::knowledge::{FixpointTrace, KnowledgeModel};
use crate::quantum::Dovm;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LayerKind {
    Classical,
    Quantum,
    Gpt,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Measure {
    Classical(ProbabilityMeasure),
    Quantum(Dovm),
    Gpt(Svm),
}

impl Measure {
    pub fn kind(&self) -> LayerKind {
        match self {
            Measure::Classical(_) => LayerKind::Classical,
            Measure::Quantum(_) => LayerKind::Quantum,
            Measure::Gpt(_) => LayerKind::Gpt,
        }
    }

    pub fn n_worlds(&self) -> usize {
        match self {
            Measure::Classical(m) => m.n_worlds(),
            Measure::Quantum(m) => m.n_worlds(),
            Measure::Gpt(m) => m.n_worlds(),
        }
    }
}

/// One target per agent: scalar posteriors, density matrices, or state coordinates.
#[derive(Clone, Debug, PartialEq)]
pub enum Targets {
    Classical(Vec<f64>),
    Quantum(Vec<HermitianMatrix>),
    Gpt(Vec<Vec<f64>>),
}

impl Targets {
    pub fn kind(&self) -> LayerKind {
        match self {
            Targets::Classical(_) => LayerKind::Classical,
            Targets::Quantum(_) => LayerKind::Quantum,
            Targets::Gpt(_) => LayerKind::Gpt,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Targets::Classical(t) => t.len(),
            Targets::Quantum(t) => t.len(),
            Targets::Gpt(t) => t.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A conditional of any layer.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Scalar(f64),
    Matrix(HermitianMatrix),
    Vector(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "layer", rename_all = "lowercase")]
pub enum Verdict {
    Classical(AgreementVerdict<f64>),
    Quantum(#[serde(serialize_with = "serialize_quantum")] AgreementVerdict<HermitianMatrix>),
    Gpt(AgreementVerdict<Vec<f64>>),
}

fn serialize_quantum<S: serde::Serializer>(
    v: &AgreementVerdict<HermitianMatrix>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    let pairs = AgreementVerdict {
        agreement_event: v.agreement_event.clone(),
        common_event: v.common_event.clone(),
        posteriors: v.posteriors.iter().map(HermitianMatrix::to_pairs).collect(),
        common_mass: v.common_mass,
        pooled_posterior: v.pooled_posterior.as_ref().map(HermitianMatrix::to_pairs),
        max_deviation: v.max_deviation,
        status: v.status,
    };
    pairs.serialize(s)
}

macro_rules! on_verdict {
    ($self:expr, $v:ident => $body:expr) => {
        match $self {
            Verdict::Classical($v) => $body,
            Verdict::Quantum($v) => $body,
            Verdict::Gpt($v) => $body,
        }
    };
}

impl Verdict {
    pub fn status(&self) -> VerdictStatus {
        on_verdict!(self, v => v.status)
    }

    pub fn agreement_event(&self) -> &Event {
        on_verdict!(self, v => &v.agreement_event)
    }

    pub fn common_event(&self) -> &Event {
        on_verdict!(self, v => &v.common_event)
    }

    pub fn common_mass(&self) -> f64 {
        on_verdict!(self, v => v.common_mass)
    }

    pub fn max_deviation(&self) -> Option<f64> {
        on_verdict!(self, v => v.max_deviation)
    }

    pub fn pooled_posterior(&self) -> Option<Value> {
        match self {
            Verdict::Classical(v) => v.pooled_posterior.map(Value::Scalar),
            Verdict::Quantum(v) => v.pooled_posterior.clone().map(Value::Matrix),
            Verdict::Gpt(v) => v.pooled_posterior.clone().map(Value::Vector),
        }
    }
}

/// Everything needed to run one agreement check.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub model: KnowledgeModel,
    pub measure: Measure,
    /// The proposition whose posterior classical agents report.
    pub hypothesis: Option<Event>,
    pub targets: Targets,
}

impl Instance {
    pub fn new(
        model: KnowledgeModel,
        measure: Measure,
        hypothesis: Option<Event>,
        targets: Targets,
    ) -> Result<Self> {
        if measure.n_worlds() != model.n_worlds() {
            return Err(Error::UniverseMismatch {
                expected: model.n_worlds(),
                found: measure.n_worlds(),
            });
        }
        if measure.kind() != targets.kind() {
            return Err(Error::InvalidParameter(format!(
                "{:?} targets for a {:?} measure",
                targets.kind(),
                measure.kind()
            )));
        }
        if targets.len() != model.n_agents() {
            return Err(Error::DimensionMismatch {
                expected: model.n_agents(),
                found: targets.len(),
            });
        }
        if let Some(h) = &hypothesis {
            model.check_event(h)?;
        }
        if measure.kind() == LayerKind::Classical && hypothesis.is_none() {
            return Err(Error::InvalidParameter(
                "classical agreement needs a hypothesis".into(),
            ));
        }
        Ok(Self {
            model,
            measure,
            hypothesis,
            targets,
        })
    }

    pub fn layer(&self) -> LayerKind {
        self.measure.kind()
    }

    /// The agreement event `E` for this instance.
    pub fn agreement_event(&self, tol: f64) -> Result<Event> {
        let model = &self.model;
        match (&self.measure, &self.targets) {
            (Measure::Classical(mu), Targets::Classical(q)) => {
                let h = self.hypothesis()?;
                agreement::agreement_event(model, &mu.with_hypothesis(h), q, tol)
            }
            (Measure::Quantum(rho), Targets::Quantum(s)) => {
                agreement::agreement_event(model, rho, s, tol)
            }
            (Measure::Gpt(mu), Targets::Gpt(t)) => agreement::agreement_event(model, mu, t, tol),
            _ => Err(self.mismatch()),
        }
    }

    /// Runs the agreement check with the default fixpoint bound.
    pub fn verify(&self, tol: f64) -> Result<Verdict> {
        Ok(self.verify_traced(tol, self.model.n_worlds() + 1)?.0)
    }

    /// Runs the agreement check, bounding the common-knowledge iteration by
    /// `max_iters` and returning the mutual-knowledge trace of `E`.
    pub fn verify_traced(&self, tol: f64, max_iters: usize) -> Result<(Verdict, FixpointTrace)> {
        let e = self.agreement_event(tol)?;
        let trace = self.model.common_knowledge_trace(&e, max_iters)?;
        let common = trace.common.clone();
        let verdict = match (&self.measure, &self.targets) {
            (Measure::Classical(mu), Targets::Classical(q)) => {
                let h = self.hypothesis()?;
                Verdict::Classical(agreement::judge(&mu.with_hypothesis(h), q, e, common, tol))
            }
            (Measure::Quantum(rho), Targets::Quantum(s)) => {
                Verdict::Quantum(agreement::judge(rho, s, e, common, tol))
            }
            (Measure::Gpt(mu), Targets::Gpt(t)) => {
                Verdict::Gpt(agreement::judge(mu, t, e, common, tol))
            }
            _ => return Err(self.mismatch()),
        };
        Ok((verdict, trace))
    }

    /// Total weight of `event` under the measure.
    pub fn mass(&self, event: &Event) -> Result<f64> {
        self.model.check_event(event)?;
        Ok(match &self.measure {
            Measure::Classical(mu) => mu.probability(event),
            Measure::Quantum(rho) => rho.mass(event),
            Measure::Gpt(mu) => mu.mass(event),
        })
    }

    /// The conditional on `event`: `P(H|event)` for classical instances, the
    /// conditional state otherwise.
    pub fn conditional(&self, event: &Event) -> Result<Value> {
        self.model.check_event(event)?;
        match &self.measure {
            Measure::Classical(mu) => {
                Ok(Value::Scalar(mu.with_hypothesis(self.hypothesis()?).conditional(event)?))
            }
            Measure::Quantum(rho) => Ok(Value::Matrix(rho.conditional(event)?)),
            Measure::Gpt(mu) => Ok(Value::Vector(mu.conditional(event)?)),
        }
    }

    fn hypothesis(&self) -> Result<&Event> {
        self.hypothesis.as_ref().ok_or_else(|| {
            Error::InvalidParameter("classical agreement needs a hypothesis".into())
        })
    }

    fn mismatch(&self) -> Error {
        Error::InvalidParameter(format!(
            "{:?} targets for a {:?} measure",
            self.targets.kind(),
            self.measure.kind()
        ))
    }
}
