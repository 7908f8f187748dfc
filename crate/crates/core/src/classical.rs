//! Classical probability over a knowledge model.

use crate::agreement::{self, AgreementVerdict, ConditionalLayer};
use crate::error::{Error, Result};
use crate::event::Event;
use crate::knowledge::KnowledgeModel;
use crate::tolerance;

/// Nonnegative weights on worlds summing to one.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityMeasure {
    weights: Vec<f64>,
}

impl ProbabilityMeasure {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidMeasure("no worlds".into()));
        }
        if let Some((w, x)) = weights
            .iter()
            .enumerate()
            .find(|(_, x)| !x.is_finite() || **x < 0.0)
        {
            return Err(Error::InvalidMeasure(format!("weight {x} at world {w}")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > tolerance::NORMALIZATION {
            return Err(Error::InvalidMeasure(format!("weights sum to {total}")));
        }
        Ok(Self { weights })
    }

    pub fn uniform(n_worlds: usize) -> Result<Self> {
        Self::new(vec![1.0 / n_worlds as f64; n_worlds])
    }

    /// Scales nonnegative weights to sum to one.
    pub fn normalized(weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !total.is_finite() || total <= 0.0 {
            return Err(Error::InvalidMeasure(format!("weights sum to {total}")));
        }
        Self::new(weights.into_iter().map(|x| x / total).collect())
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn n_worlds(&self) -> usize {
        self.weights.len()
    }

    pub fn probability(&self, event: &Event) -> f64 {
        event.iter().fold(0.0, |acc, w| acc + self.weights[w])
    }

    /// `P(h | lam)`.
    pub fn conditional(&self, h: &Event, lam: &Event) -> Result<f64> {
        let mass = self.probability(lam);
        if mass <= tolerance::NULL_MASS {
            return Err(Error::ConditioningOnNull { mass });
        }
        Ok(self.probability(&h.intersection(lam)) / mass)
    }

    /// Pairs the measure with a hypothesis, yielding the scalar-posterior layer.
    pub fn with_hypothesis<'a>(&'a self, h: &'a Event) -> HypothesisLayer<'a> {
        HypothesisLayer {
            measure: self,
            hypothesis: h,
        }
    }
}

/// A probability measure and the hypothesis whose posterior the agents report.
#[derive(Clone, Copy, Debug)]
pub struct HypothesisLayer<'a> {
    pub measure: &'a ProbabilityMeasure,
    pub hypothesis: &'a Event,
}

impl ConditionalLayer for HypothesisLayer<'_> {
    type Posterior = f64;

    fn n_worlds(&self) -> usize {
        self.measure.n_worlds()
    }

    fn mass(&self, event: &Event) -> f64 {
        self.measure.probability(event)
    }

    fn conditional_unchecked(&self, event: &Event) -> f64 {
        self.measure.probability(&self.hypothesis.intersection(event)) / self.mass(event)
    }

    fn distance(&self, a: &f64, b: &f64) -> f64 {
        (a - b).abs()
    }
}

fn check(model: &KnowledgeModel, mu: &ProbabilityMeasure, h: &Event) -> Result<()> {
    model.check_event(h)?;
    if mu.n_worlds() != model.n_worlds() {
        return Err(Error::UniverseMismatch {
            expected: model.n_worlds(),
            found: mu.n_worlds(),
        });
    }
    Ok(())
}

/// `⋂_i {w | |P(h | Q_i(w)) − q_i| ≤ tol}`, skipping worlds in null cells.
pub fn agreement_event(
    model: &KnowledgeModel,
    mu: &ProbabilityMeasure,
    h: &Event,
    q: &[f64],
    tol: f64,
) -> Result<Event> {
    check(model, mu, h)?;
    agreement::agreement_event(model, &mu.with_hypothesis(h), q, tol)
}

/// Entry `w` is `P(h | Q_agent(w))`, or `None` when that cell has zero mass.
pub fn posterior_function(
    model: &KnowledgeModel,
    mu: &ProbabilityMeasure,
    agent: usize,
    h: &Event,
) -> Result<Vec<Option<f64>>> {
    check(model, mu, h)?;
    let partition = model.partition(agent)?;
    let per_cell: Vec<Option<f64>> = partition
        .cells()
        .iter()
        .map(|cell| mu.conditional(h, cell).ok())
        .collect();
    Ok((0..model.n_worlds())
        .map(|w| per_cell[partition.cell_index(w)])
        .collect())
}

pub fn verify_aumann(
    model: &KnowledgeModel,
    mu: &ProbabilityMeasure,
    h: &Event,
    q: &[f64],
    tol: f64,
) -> Result<AgreementVerdict<f64>> {
    check(model, mu, h)?;
    agreement::verify(model, &mu.with_hypothesis(h), q, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agreement::VerdictStatus;

    fn ev(n: usize, ws: &[usize]) -> Event {
        Event::from_worlds(n, ws.iter().copied())
    }

    fn model_b() -> KnowledgeModel {
        KnowledgeModel::from_cells(
            4,
            &[
                vec![vec![0, 1], vec![2, 3]],
                vec![vec![0, 1], vec![2], vec![3]],
            ],
        )
        .unwrap()
    }

    fn model_a() -> KnowledgeModel {
        KnowledgeModel::from_cells(
            5,
            &[
                vec![vec![0, 1], vec![2, 3], vec![4]],
                vec![vec![0], vec![1, 2], vec![3, 4]],
            ],
        )
        .unwrap()
    }

    #[test]
    fn measure_validation() {
        assert!(ProbabilityMeasure::new(vec![0.5, 0.6]).is_err());
        assert!(ProbabilityMeasure::new(vec![-0.1, 1.1]).is_err());
        assert!(ProbabilityMeasure::new(vec![f64::NAN, 1.0]).is_err());
        assert!(ProbabilityMeasure::new(vec![]).is_err());
        assert!(ProbabilityMeasure::new(vec![0.0, 1.0]).is_ok());
        assert!(ProbabilityMeasure::normalized(vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn probability_examples() {
        let uniform = ProbabilityMeasure::uniform(4).unwrap();
        assert_eq!(uniform.probability(&ev(4, &[0, 1])), 0.5);
        assert_eq!(uniform.probability(&Event::empty(4)), 0.0);
        let mu = ProbabilityMeasure::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        assert!((mu.probability(&ev(4, &[1, 3])) - 0.6).abs() < 1e-15);
    }

    #[test]
    fn conditional_examples() {
        let uniform = ProbabilityMeasure::uniform(4).unwrap();
        let lam = ev(4, &[0, 1]);
        assert_eq!(uniform.conditional(&lam, &lam).unwrap(), 1.0);
        assert_eq!(uniform.conditional(&ev(4, &[0, 2]), &lam).unwrap(), 0.5);
        let mu = ProbabilityMeasure::new(vec![0.5, 0.5, 0.0, 0.0]).unwrap();
        assert!(matches!(
            mu.conditional(&ev(4, &[2]), &ev(4, &[2, 3])),
            Err(Error::ConditioningOnNull { .. })
        ));
    }

    #[test]
    fn agreement_event_examples() {
        let b = model_b();
        let mu = ProbabilityMeasure::uniform(4).unwrap();
        let h = ev(4, &[0, 2]);
        assert_eq!(
            agreement_event(&b, &mu, &h, &[0.5, 0.5], 1e-9).unwrap(),
            ev(4, &[0, 1])
        );
        assert!(agreement_event(&b, &mu, &h, &[1.5, 0.5], 1e-9)
            .unwrap()
            .is_empty());
        assert_eq!(
            agreement_event(&b, &mu, &Event::full(4), &[1.0, 1.0], 1e-9).unwrap(),
            Event::full(4)
        );
        assert!(matches!(
            agreement_event(&b, &mu, &h, &[0.5], 1e-9),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn null_cells_are_excluded() {
        let b = model_b();
        // Agent 2's cell {3} is null; its posterior is undefined and never matches.
        let mu = ProbabilityMeasure::new(vec![0.25, 0.25, 0.5, 0.0]).unwrap();
        let h = ev(4, &[0, 2, 3]);
        let f = posterior_function(&b, &mu, 1, &h).unwrap();
        assert_eq!(f, vec![Some(0.5), Some(0.5), Some(1.0), None]);
        let e = agreement_event(&b, &mu, &h, &[1.0, 0.0], 1e-9).unwrap();
        assert!(e.is_empty());
    }

    #[test]
    fn posterior_function_examples() {
        let b = model_b();
        let mu = ProbabilityMeasure::uniform(4).unwrap();
        assert_eq!(
            posterior_function(&b, &mu, 1, &ev(4, &[0, 2])).unwrap(),
            vec![Some(0.5), Some(0.5), Some(1.0), Some(0.0)]
        );
        assert!(posterior_function(&b, &mu, 0, &Event::empty(4))
            .unwrap()
            .iter()
            .all(|p| *p == Some(0.0)));
        assert!(posterior_function(&b, &mu, 0, &Event::full(4))
            .unwrap()
            .iter()
            .all(|p| *p == Some(1.0)));
        assert!(posterior_function(&b, &mu, 2, &Event::full(4)).is_err());
    }

    #[test]
    fn verify_worked_example_holds() {
        let b = model_b();
        let mu = ProbabilityMeasure::uniform(4).unwrap();
        let v = verify_aumann(&b, &mu, &ev(4, &[0, 2]), &[0.5, 0.5], 1e-9).unwrap();
        assert_eq!(v.status, VerdictStatus::Holds);
        assert_eq!(v.common_event, ev(4, &[0, 1]));
        assert_eq!(v.pooled_posterior, Some(0.5));
        assert_eq!(v.max_deviation, Some(0.0));
    }

    #[test]
    fn verify_empty_common_knowledge_is_vacuous() {
        let a = model_a();
        let mu = ProbabilityMeasure::uniform(5).unwrap();
        let v = verify_aumann(&a, &mu, &ev(5, &[0, 1]), &[1.0, 1.0], 1e-9).unwrap();
        // Agent 1 has posterior 1 on {0,1}; agent 2 on {0}. E = {0}, C(E) = ∅.
        assert_eq!(v.agreement_event, ev(5, &[0]));
        assert_eq!(v.status, VerdictStatus::VacuousEmptyCommonKnowledge);
        assert_eq!(v.pooled_posterior, None);
    }

    #[test]
    fn verify_null_common_knowledge_is_vacuous() {
        // One agent, trivial partition on a null region only reachable via tolerance.
        let m = KnowledgeModel::from_cells(3, &[vec![vec![0], vec![1, 2]]]).unwrap();
        let mu = ProbabilityMeasure::new(vec![1.0 - 5e-10, 5e-10, 0.0]).unwrap();
        let v = verify_aumann(&m, &mu, &ev(3, &[1]), &[1.0], 1e-9).unwrap();
        assert_eq!(v.common_event, ev(3, &[1, 2]));
        assert_eq!(v.status, VerdictStatus::VacuousNullCommonKnowledge);
    }

    #[test]
    fn single_agent_holds_with_pooled_equal_to_target() {
        let m = KnowledgeModel::from_cells(4, &[vec![vec![0, 1], vec![2, 3]]]).unwrap();
        let mu = ProbabilityMeasure::new(vec![0.1, 0.3, 0.2, 0.4]).unwrap();
        let h = ev(4, &[1, 2]);
        let q = mu.conditional(&h, &ev(4, &[0, 1])).unwrap();
        let v = verify_aumann(&m, &mu, &h, &[q], 1e-9).unwrap();
        assert_eq!(v.status, VerdictStatus::Holds);
        assert_eq!(v.common_event, ev(4, &[0, 1]));
        assert!((v.pooled_posterior.unwrap() - q).abs() <= 1e-15);
    }
}
