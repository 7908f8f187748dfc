//! Seeded sweeps over generated scenarios, sharded across threads.
//!
//! Each seed determines both the scenario sizes and the scenario itself, so a
//! sweep over a seed range is reproducible regardless of thread count. Workers
//! share nothing; their counters are merged by addition.

use std::ops::Range;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::agreement::VerdictStatus;
use crate::error::Result;
use crate::generators::{gen_planted_scenario, gen_random_scenario, GenParams, Layer, Seed};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Planted,
    Random,
}

/// Upper bounds on generated sizes. Worlds are drawn from `2..=max_worlds`,
/// agents from `1..=max_agents` and dimensions from `min..=max_dim` where
/// `min` is the smallest dimension the layer accepts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_worlds: usize,
    pub max_agents: usize,
    pub max_dim: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    pub layer: Layer,
    pub mode: Mode,
    pub seeds: Range<u64>,
    pub limits: Limits,
    pub tol: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SearchStats {
    pub scenarios: u64,
    pub holds: u64,
    pub vacuous_empty: u64,
    pub vacuous_null: u64,
    pub violations: u64,
    /// Generation or verification failures; always a bug.
    pub errors: u64,
    /// Largest deviation among non-vacuous verdicts.
    pub max_deviation: f64,
    /// Seeds that produced a violation or an error, capped at ten.
    pub failing_seeds: Vec<u64>,
}

const MAX_FAILING_SEEDS: usize = 10;

impl SearchStats {
    pub fn non_vacuous(&self) -> u64 {
        self.holds + self.violations
    }

    fn merge(mut self, other: SearchStats) -> SearchStats {
        self.scenarios += other.scenarios;
        self.holds += other.holds;
        self.vacuous_empty += other.vacuous_empty;
        self.vacuous_null += other.vacuous_null;
        self.violations += other.violations;
        self.errors += other.errors;
        self.max_deviation = self.max_deviation.max(other.max_deviation);
        self.failing_seeds.extend(other.failing_seeds);
        self.failing_seeds.sort_unstable();
        self.failing_seeds.truncate(MAX_FAILING_SEEDS);
        self
    }
}

/// The sizes used for `seed`. Drawn from a stream independent of the
/// scenario's own stream.
pub fn params_for(seed: u64, layer: Layer, limits: Limits) -> GenParams {
    let mut rng = Seed(seed ^ 0x9e37_79b9_7f4a_7c15).rng();
    let min_dim = layer.min_dim();
    GenParams {
        n_worlds: rng.random_range(2..=limits.max_worlds.max(2)),
        n_agents: rng.random_range(1..=limits.max_agents.max(1)),
        dim: rng.random_range(min_dim..=limits.max_dim.max(min_dim)),
    }
}

fn run_one(config: &SearchConfig, seed: u64) -> SearchStats {
    let mut stats = SearchStats {
        scenarios: 1,
        ..SearchStats::default()
    };
    let outcome = (|| -> Result<_> {
        let params = params_for(seed, config.layer, config.limits);
        let bundle = match config.mode {
            Mode::Planted => gen_planted_scenario(Seed(seed), config.layer, params)?,
            Mode::Random => gen_random_scenario(Seed(seed), config.layer, params)?,
        };
        bundle.instance.verify(config.tol)
    })();
    match outcome {
        Err(_) => {
            stats.errors = 1;
            stats.failing_seeds.push(seed);
        }
        Ok(verdict) => {
            match verdict.status() {
                VerdictStatus::Holds => stats.holds = 1,
                VerdictStatus::VacuousEmptyCommonKnowledge => stats.vacuous_empty = 1,
                VerdictStatus::VacuousNullCommonKnowledge => stats.vacuous_null = 1,
                VerdictStatus::Violated => {
                    stats.violations = 1;
                    stats.failing_seeds.push(seed);
                }
            }
            if let Some(d) = verdict.max_deviation() {
                stats.max_deviation = d;
            }
        }
    }
    stats
}

/// Generates and verifies one scenario per seed in parallel.
pub fn run_search(config: &SearchConfig) -> SearchStats {
    config
        .seeds
        .clone()
        .into_par_iter()
        .map(|seed| run_one(config, seed))
        .reduce(SearchStats::default, SearchStats::merge)
}
