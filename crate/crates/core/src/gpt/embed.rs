//! Classical and quantum measures viewed as state-valued measures.

use super::{basis, ConeSpace, Svm};
use crate::classical::ProbabilityMeasure;
use crate::error::Result;
use crate::event::Event;
use crate::quantum::Dovm;

/// Atoms `p(w)·e_w` over the simplex of dimension `n_worlds`. Conditional
/// states are the conditional distributions.
pub fn embed_classical(mu: &ProbabilityMeasure) -> Result<Svm> {
    let n = mu.n_worlds();
    let atoms = mu
        .weights()
        .iter()
        .enumerate()
        .map(|(w, &p)| {
            let mut atom = vec![0.0; n];
            atom[w] = p;
            atom
        })
        .collect();
    Svm::new(ConeSpace::simplex(n)?, atoms)
}

/// Coarse-grains a measure onto the two outcomes "in `h`" and "not in `h`":
/// atom `w` is `p(w)·(1, 0)` if `w ∈ h`, else `p(w)·(0, 1)`. Conditional
/// states are `(P(h|Λ), 1 − P(h|Λ))`, so agreement on these states is
/// agreement on the posterior of `h`.
pub fn embed_classical_hypothesis(mu: &ProbabilityMeasure, h: &Event) -> Result<Svm> {
    let atoms = mu
        .weights()
        .iter()
        .enumerate()
        .map(|(w, &p)| if h.contains(w) { vec![p, 0.0] } else { vec![0.0, p] })
        .collect();
    Svm::new(ConeSpace::simplex(2)?, atoms)
}

/// The two-outcome state of a scalar posterior `q`.
pub fn hypothesis_state(q: f64) -> Vec<f64> {
    vec![q, 1.0 - q]
}

/// Vectorises every atom in the orthonormal Hermitian basis; the unit is the trace.
pub fn embed_quantum(rho: &Dovm) -> Result<Svm> {
    let atoms = rho.atoms().iter().map(basis::vectorize).collect();
    Svm::new(ConeSpace::psd(rho.dim())?, atoms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::HermitianMatrix;

    #[test]
    fn classical_examples() {
        let mu = embed_classical(&ProbabilityMeasure::uniform(2).unwrap()).unwrap();
        assert_eq!(mu.atoms(), &[vec![0.5, 0.0], vec![0.0, 0.5]]);
        let mu = embed_classical(&ProbabilityMeasure::new(vec![0.1, 0.9]).unwrap()).unwrap();
        assert_eq!(mu.atoms(), &[vec![0.1, 0.0], vec![0.0, 0.9]]);
    }

    #[test]
    fn hypothesis_embedding_conditionals_are_posteriors() {
        let p = ProbabilityMeasure::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let h = Event::from_worlds(4, [0, 3]);
        let mu = embed_classical_hypothesis(&p, &h).unwrap();
        let lam = Event::from_worlds(4, [0, 1, 3]);
        let state = mu.conditional_state(&lam).unwrap();
        let q = p.conditional(&h, &lam).unwrap();
        assert!((state.coords()[0] - q).abs() < 1e-15);
        assert!((state.coords()[1] - (1.0 - q)).abs() < 1e-15);
    }

    #[test]
    fn quantum_examples() {
        let rho = Dovm::new(vec![
            HermitianMatrix::from_real_diagonal(&[0.5, 0.0]),
            HermitianMatrix::from_real_diagonal(&[0.0, 0.5]),
        ])
        .unwrap();
        let mu = embed_quantum(&rho).unwrap();
        assert_eq!(mu.atoms(), &[vec![0.5, 0.0, 0.0, 0.0], vec![0.0, 0.5, 0.0, 0.0]]);
        for atom in mu.atoms() {
            assert_eq!(mu.cone().unit_value(atom), 0.5);
        }
    }
}
