//! Seeded random models, measures and agreement instances.
//!
//! Every generator is a pure function of a [`Seed`] and its size parameters.
//! The stream is ChaCha8 (`rand_chacha::ChaCha8Rng`) keyed by
//! `SeedableRng::seed_from_u64(seed)`, which is platform independent, so
//! golden values stay valid across machines.
//!
//! Independent random partitions almost never have a non-trivial meet, so
//! common knowledge of posteriors is usually empty. [`gen_planted_scenario`]
//! instead plants a region `M0` that is a cell of every agent and sets every
//! target to the conditional on `M0`; `M0` is then contained in `C(E)` and
//! carries positive mass. [`gen_random_scenario`] keeps everything
//! independent and exercises the vacuous branches.

use nalgebra::{Complex, DMatrix};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::classical::ProbabilityMeasure;
use crate::error::{Error, Result};
use crate::event::Event;
use crate::gpt::{self, basis, ConeSpace, Svm};
use crate::hermitian::{self, HermitianMatrix};
use crate::instance::{Instance, Measure, Targets};
use crate::knowledge::{KnowledgeModel, Partition};
use crate::quantum::{DensityOperator, Dovm, Povm};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Seed(pub u64);

impl Seed {
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

/// Which cone a GPT scenario lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GptCone {
    /// Classical scenario on the two-outcome simplex `(h, not h)`. With the
    /// same seed and sizes it embeds exactly the classical scenario.
    Simplex,
    /// Quantum scenario embedded in the PSD cone; seed-matched like `Simplex`.
    Psd,
    /// Native scenario on a random polyhedral cone of dimension `dim`.
    Polyhedral,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Layer {
    Classical,
    Quantum,
    Gpt(GptCone),
}

impl Layer {
    /// The smallest `dim` accepted for this layer.
    pub fn min_dim(self) -> usize {
        match self {
            Layer::Classical | Layer::Gpt(GptCone::Simplex) => 0,
            Layer::Quantum | Layer::Gpt(GptCone::Psd) => 1,
            Layer::Gpt(GptCone::Polyhedral) => 2,
        }
    }
}

/// Sizes of a generated scenario. `dim` is the Hilbert-space dimension for
/// quantum and PSD scenarios and the ambient dimension for polyhedral ones;
/// it is ignored otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenParams {
    pub n_worlds: usize,
    pub n_agents: usize,
    pub dim: usize,
}

/// A generated instance, with the planted shared cell when there is one.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioBundle {
    pub instance: Instance,
    pub planted_cell: Option<Event>,
}

fn random_partition<R: Rng>(rng: &mut R, n_worlds: usize, max_cells: usize) -> Partition {
    let labels: Vec<usize> = (0..n_worlds).map(|_| rng.random_range(0..max_cells)).collect();
    Partition::from_labels(&labels)
}

pub fn gen_partition(seed: Seed, n_worlds: usize, max_cells: usize) -> Result<Partition> {
    if max_cells == 0 || max_cells > n_worlds {
        return Err(Error::InvalidParameter(format!(
            "max_cells must lie in 1..={n_worlds}, got {max_cells}"
        )));
    }
    Ok(random_partition(&mut seed.rng(), n_worlds, max_cells))
}

/// Independent random partitions, each with a random number of labels.
pub fn gen_model(seed: Seed, n_worlds: usize, n_agents: usize) -> Result<KnowledgeModel> {
    random_model(&mut seed.rng(), n_worlds, n_agents)
}

fn random_model<R: Rng>(rng: &mut R, n_worlds: usize, n_agents: usize) -> Result<KnowledgeModel> {
    if n_worlds == 0 || n_agents == 0 {
        return Err(Error::InvalidParameter("need at least one world and one agent".into()));
    }
    let partitions = (0..n_agents)
        .map(|_| {
            let max_cells = rng.random_range(1..=n_worlds);
            random_partition(rng, n_worlds, max_cells)
        })
        .collect();
    KnowledgeModel::new(n_worlds, partitions)
}

/// A random event; each world is included with probability one half.
pub fn gen_event(seed: Seed, n_worlds: usize) -> Event {
    random_event(&mut seed.rng(), n_worlds)
}

fn random_event<R: Rng>(rng: &mut R, n_worlds: usize) -> Event {
    Event::from_worlds(n_worlds, (0..n_worlds).filter(|_| rng.random_bool(0.5)))
}

/// Exponential weights, normalised; with `zero_rate > 0` some worlds get no mass.
fn random_weights<R: Rng>(rng: &mut R, n_worlds: usize, zero_rate: f64) -> Vec<f64> {
    loop {
        let raw: Vec<f64> = (0..n_worlds)
            .map(|_| {
                if rng.random_bool(zero_rate) {
                    0.0
                } else {
                    Exp1.sample(rng)
                }
            })
            .collect();
        let total: f64 = raw.iter().sum();
        if total > 0.0 {
            return raw.into_iter().map(|x| x / total).collect();
        }
    }
}

pub fn gen_measure(seed: Seed, n_worlds: usize) -> Result<ProbabilityMeasure> {
    ProbabilityMeasure::new(random_weights(&mut seed.rng(), n_worlds, 0.0))
}

fn ginibre<R: Rng>(rng: &mut R, dim: usize) -> DMatrix<Complex<f64>> {
    DMatrix::from_fn(dim, dim, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex::new(re, im)
    })
}

fn random_psd<R: Rng>(rng: &mut R, dim: usize) -> HermitianMatrix {
    let g = ginibre(rng, dim);
    HermitianMatrix::symmetrized(&g * g.adjoint())
}

fn random_density<R: Rng>(rng: &mut R, dim: usize) -> Result<DensityOperator> {
    let m = random_psd(rng, dim);
    DensityOperator::new(m.scale(1.0 / m.trace()))
}

/// Ginibre density operator `G G† / Tr(G G†)`; full rank with probability one.
pub fn gen_density(seed: Seed, dim: usize) -> Result<DensityOperator> {
    if dim == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    random_density(&mut seed.rng(), dim)
}

fn random_povm<R: Rng>(rng: &mut R, n_worlds: usize, dim: usize) -> Result<Povm> {
    let raw: Vec<HermitianMatrix> = (0..n_worlds).map(|_| random_psd(rng, dim)).collect();
    let root = hermitian::sum(dim, &raw).pinv_sqrt();
    Povm::new(raw.iter().map(|a| root.sandwich(a)).collect())
}

/// A random POVM with Ginibre atoms `A_w`, normalised as `S^{-1/2} A_w S^{-1/2}`.
pub fn gen_povm(seed: Seed, n_worlds: usize, dim: usize) -> Result<Povm> {
    if dim == 0 || n_worlds == 0 {
        return Err(Error::InvalidParameter("need positive dimension and worlds".into()));
    }
    random_povm(&mut seed.rng(), n_worlds, dim)
}

fn random_dovm<R: Rng>(rng: &mut R, n_worlds: usize, dim: usize) -> Result<Dovm> {
    let povm = random_povm(rng, n_worlds, dim)?;
    let sigma = random_density(rng, dim)?;
    povm.to_dovm(&sigma)
}

/// A random POVM combined with a random state through `σ^{1/2} E σ^{1/2}`.
pub fn gen_dovm(seed: Seed, model: &KnowledgeModel, dim: usize) -> Result<Dovm> {
    if dim == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    random_dovm(&mut seed.rng(), model.n_worlds(), dim)
}

/// Generators `(1, x)` with `x` uniform in `[-1, 1]^{dim-1}` and unit `e_0`.
fn random_polyhedral_cone<R: Rng>(rng: &mut R, dim: usize) -> Result<ConeSpace> {
    let n_generators = rng.random_range(dim..=2 * dim);
    let generators = (0..n_generators)
        .map(|_| {
            let mut g = vec![1.0];
            g.extend((1..dim).map(|_| rng.random_range(-1.0..=1.0)));
            g
        })
        .collect();
    let mut unit = vec![0.0; dim];
    unit[0] = 1.0;
    ConeSpace::polyhedral(generators, unit)
}

/// Atoms are random nonnegative combinations of generators, scaled to unit total.
fn random_polyhedral_svm<R: Rng>(
    rng: &mut R,
    n_worlds: usize,
    dim: usize,
    zero_rate: f64,
) -> Result<Svm> {
    let cone = random_polyhedral_cone(rng, dim)?;
    let gpt::ConeKind::Polyhedral { generators } = cone.kind().clone() else {
        unreachable!("constructed as polyhedral")
    };
    let weights = random_weights(rng, n_worlds, zero_rate);
    let atoms = weights
        .iter()
        .map(|&mass| {
            let coeffs: Vec<f64> = generators
                .iter()
                .map(|_| if rng.random_bool(0.5) { Exp1.sample(rng) } else { 0.0 })
                .collect();
            let mut atom = vec![0.0; dim];
            for (c, g) in coeffs.iter().zip(&generators) {
                for (a, x) in atom.iter_mut().zip(g) {
                    *a += c * x;
                }
            }
            let u = cone.unit_value(&atom);
            if u > 0.0 {
                atom.iter_mut().for_each(|a| *a *= mass / u);
                atom
            } else {
                // No generator drawn: fall back to the first one.
                generators[0].iter().map(|x| x * mass / generators[0][0]).collect()
            }
        })
        .collect();
    Svm::new(cone, atoms)
}

/// A random polyhedral-cone SVM.
pub fn gen_polyhedral_svm(seed: Seed, n_worlds: usize, dim: usize) -> Result<Svm> {
    if dim < 2 || n_worlds == 0 {
        return Err(Error::InvalidParameter("polyhedral cones need dim >= 2".into()));
    }
    random_polyhedral_svm(&mut seed.rng(), n_worlds, dim, 0.0)
}

/// A model in which a random region `M0` is a cell of every agent.
fn planted_model<R: Rng>(
    rng: &mut R,
    n_worlds: usize,
    n_agents: usize,
) -> Result<(KnowledgeModel, Event)> {
    let mut worlds: Vec<usize> = (0..n_worlds).collect();
    worlds.shuffle(rng);
    let size = rng.random_range(1..n_worlds);
    let planted = Event::from_worlds(n_worlds, worlds[..size].iter().copied());
    let rest = &worlds[size..];
    let partitions = (0..n_agents)
        .map(|_| {
            let max_cells = rng.random_range(1..=rest.len());
            // Label n_worlds is reserved for the planted cell.
            let mut labels = vec![n_worlds; n_worlds];
            for &w in rest {
                labels[w] = rng.random_range(0..max_cells);
            }
            Partition::from_labels(&labels)
        })
        .collect();
    Ok((KnowledgeModel::new(n_worlds, partitions)?, planted))
}

fn check_params(layer: Layer, params: GenParams) -> Result<()> {
    if params.n_worlds < 2 {
        return Err(Error::InvalidParameter("need at least two worlds".into()));
    }
    if params.n_agents == 0 {
        return Err(Error::InvalidParameter("need at least one agent".into()));
    }
    if params.dim < layer.min_dim() {
        return Err(Error::InvalidParameter(format!(
            "dimension {} too small for {layer:?}",
            params.dim
        )));
    }
    Ok(())
}

/// Classical measure that is positive on `planted` and may vanish elsewhere.
fn planted_weights<R: Rng>(rng: &mut R, planted: &Event) -> Vec<f64> {
    let n = planted.n_worlds();
    let raw: Vec<f64> = (0..n)
        .map(|w| {
            if !planted.contains(w) && rng.random_bool(0.2) {
                0.0
            } else {
                Exp1.sample(rng)
            }
        })
        .collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

/// A scenario with a cell `M0` shared by all agents and every target equal to
/// the conditional on `M0`. Its verdict is never vacuous.
pub fn gen_planted_scenario(seed: Seed, layer: Layer, params: GenParams) -> Result<ScenarioBundle> {
    check_params(layer, params)?;
    let mut rng = seed.rng();
    let rng = &mut rng;
    let (model, planted) = planted_model(rng, params.n_worlds, params.n_agents)?;
    let agents = params.n_agents;
    let (measure, hypothesis, targets) = match layer {
        Layer::Classical | Layer::Gpt(GptCone::Simplex) => {
            let mu = ProbabilityMeasure::new(planted_weights(rng, &planted))?;
            let h = random_event(rng, params.n_worlds);
            let q = mu.conditional(&h, &planted)?;
            classical_parts(layer, mu, h, vec![q; agents])?
        }
        Layer::Quantum | Layer::Gpt(GptCone::Psd) => {
            let rho = random_dovm(rng, params.n_worlds, params.dim)?;
            let sigma = rho.conditional_state(&planted)?.into_matrix();
            quantum_parts(layer, rho, vec![sigma; agents])?
        }
        Layer::Gpt(GptCone::Polyhedral) => {
            let svm = random_polyhedral_svm(rng, params.n_worlds, params.dim, 0.2)?;
            // Planted worlds must carry mass; rebuild with positive atoms there if needed.
            let svm = if svm.conditional_state(&planted).is_ok() {
                svm
            } else {
                random_polyhedral_svm(rng, params.n_worlds, params.dim, 0.0)?
            };
            let state = svm.conditional_state(&planted)?.into_coords();
            (Measure::Gpt(svm), None, Targets::Gpt(vec![state; agents]))
        }
    };
    Ok(ScenarioBundle {
        instance: Instance::new(model, measure, hypothesis, targets)?,
        planted_cell: Some(planted),
    })
}

/// An unconstrained scenario: independent partitions and a random measure.
/// Each agent's target is the conditional on one of its own cells chosen at
/// random (or an arbitrary value when that cell is null), so non-vacuous
/// instances occur but are rare.
pub fn gen_random_scenario(seed: Seed, layer: Layer, params: GenParams) -> Result<ScenarioBundle> {
    check_params(layer, params)?;
    let mut rng = seed.rng();
    let rng = &mut rng;
    let n = params.n_worlds;
    let model = random_model(rng, n, params.n_agents)?;
    let pick_cells: Vec<Event> = (0..params.n_agents)
        .map(|agent| {
            let w = rng.random_range(0..n);
            model.partitions()[agent].cell(w).clone()
        })
        .collect();
    let (measure, hypothesis, targets) = match layer {
        Layer::Classical | Layer::Gpt(GptCone::Simplex) => {
            let mu = ProbabilityMeasure::new(random_weights(rng, n, 0.2))?;
            let h = random_event(rng, n);
            let q = pick_cells
                .iter()
                .map(|c| mu.conditional(&h, c).unwrap_or_else(|_| rng.random()))
                .collect();
            classical_parts(layer, mu, h, q)?
        }
        Layer::Quantum | Layer::Gpt(GptCone::Psd) => {
            let rho = random_dovm(rng, n, params.dim)?;
            let fallback = DensityOperator::maximally_mixed(params.dim).into_matrix();
            let s = pick_cells
                .iter()
                .map(|c| {
                    rho.conditional_state(c)
                        .map(DensityOperator::into_matrix)
                        .unwrap_or_else(|_| fallback.clone())
                })
                .collect();
            quantum_parts(layer, rho, s)?
        }
        Layer::Gpt(GptCone::Polyhedral) => {
            let svm = random_polyhedral_svm(rng, n, params.dim, 0.2)?;
            let t = conditional_targets(&svm, &pick_cells, params.dim);
            (Measure::Gpt(svm), None, Targets::Gpt(t))
        }
    };
    Ok(ScenarioBundle {
        instance: Instance::new(model, measure, hypothesis, targets)?,
        planted_cell: None,
    })
}

type Parts = (Measure, Option<Event>, Targets);

/// Classical parts, or their image under the two-outcome simplex embedding.
fn classical_parts(layer: Layer, mu: ProbabilityMeasure, h: Event, q: Vec<f64>) -> Result<Parts> {
    if layer == Layer::Classical {
        return Ok((Measure::Classical(mu), Some(h), Targets::Classical(q)));
    }
    let svm = gpt::embed_classical_hypothesis(&mu, &h)?;
    let t = q.into_iter().map(gpt::hypothesis_state).collect();
    Ok((Measure::Gpt(svm), Some(h), Targets::Gpt(t)))
}

/// Quantum parts, or their image in the PSD cone.
fn quantum_parts(layer: Layer, rho: Dovm, sigma: Vec<HermitianMatrix>) -> Result<Parts> {
    if layer == Layer::Quantum {
        return Ok((Measure::Quantum(rho), None, Targets::Quantum(sigma)));
    }
    let svm = gpt::embed_quantum(&rho)?;
    let t = sigma.iter().map(basis::vectorize).collect();
    Ok((Measure::Gpt(svm), None, Targets::Gpt(t)))
}

fn conditional_targets(svm: &Svm, cells: &[Event], dim: usize) -> Vec<Vec<f64>> {
    cells
        .iter()
        .map(|c| {
            svm.conditional_state(c)
                .map(|s| s.into_coords())
                .unwrap_or_else(|_| vec![0.0; dim])
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_parameters() {
        assert!(gen_partition(Seed(1), 4, 0).is_err());
        assert!(gen_partition(Seed(1), 4, 5).is_err());
        let p = gen_partition(Seed(1), 4, 1).unwrap();
        assert!(p.same_as(&Partition::trivial(4)));
    }

    #[test]
    fn discrete_partition_is_reachable() {
        let hit = (0..200).any(|s| {
            gen_partition(Seed(s), 3, 3)
                .unwrap()
                .same_as(&Partition::discrete(3))
        });
        assert!(hit);
    }

    #[test]
    fn density_examples() {
        let one = gen_density(Seed(3), 1).unwrap();
        assert!((one.matrix().entry(0, 0).re - 1.0).abs() < 1e-15);
        for s in 0..20 {
            let rho = gen_density(Seed(s), 3).unwrap();
            assert!((rho.matrix().trace() - 1.0).abs() < 1e-12);
            assert!(rho.matrix().min_eigenvalue() >= 0.0);
        }
        assert!(gen_density(Seed(0), 0).is_err());
    }

    #[test]
    fn single_world_dovm_is_the_state() {
        let model = KnowledgeModel::new(1, vec![Partition::trivial(1)]).unwrap();
        let rho = gen_dovm(Seed(9), &model, 2).unwrap();
        assert_eq!(rho.n_worlds(), 1);
        assert!((rho.atoms()[0].trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn planted_cell_is_a_cell_of_every_agent() {
        for s in 0..50 {
            let b = gen_planted_scenario(
                Seed(s),
                Layer::Classical,
                GenParams {
                    n_worlds: 6,
                    n_agents: 3,
                    dim: 0,
                },
            )
            .unwrap();
            let m0 = b.planted_cell.unwrap();
            for p in b.instance.model.partitions() {
                assert!(p.cells().contains(&m0));
            }
        }
    }

    #[test]
    fn parameter_checks() {
        let p = GenParams {
            n_worlds: 1,
            n_agents: 1,
            dim: 2,
        };
        assert!(gen_planted_scenario(Seed(0), Layer::Classical, p).is_err());
        let p = GenParams {
            n_worlds: 3,
            n_agents: 1,
            dim: 1,
        };
        assert!(gen_planted_scenario(Seed(0), Layer::Gpt(GptCone::Polyhedral), p).is_err());
        assert!(gen_planted_scenario(Seed(0), Layer::Quantum, GenParams { dim: 0, ..p }).is_err());
    }
}
