//! Scenario files, reports, and the runners behind the `aumann` commands.
//!
//! A scenario is a JSON document naming its worlds and agents:
//!
//! ```json
//! {
//!   "version": 1,
//!   "worlds": ["a", "b"],
//!   "agents": [{ "name": "ann", "partition": [["a", "b"]] }],
//!   "measure": { "classical": { "weights": [0.5, 0.5] } },
//!   "hypothesis": ["a"],
//!   "targets": [0.5]
//! }
//! ```
//!
//! `measure` is one of `classical {weights}`, `quantum {dim, atoms}`,
//! `povm {dim, effects, state}` or `gpt {cone, unit, atoms}`. Matrices are
//! row lists of `[re, im]` pairs; GPT vectors are coordinates (for PSD cones,
//! in the orthonormal Hermitian basis of [`crate::gpt::basis`]). Targets are
//! reals, matrices or vectors to match the measure, one per agent.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value as Json;

use crate::agreement::VerdictStatus;
use crate::classical::ProbabilityMeasure;
use crate::error::Error;
use crate::event::Event;
use crate::generators::{gen_planted_scenario, gen_random_scenario, GenParams, Layer, Seed};
use crate::gpt::{ConeKind, ConeSpace, Svm};
use crate::hermitian::HermitianMatrix;
use crate::instance::{Instance, LayerKind, Measure, Targets, Value, Verdict};
use crate::knowledge::{KnowledgeModel, Partition};
use crate::quantum::{DensityOperator, Dovm, Povm};
use crate::search::SearchStats;
use crate::tolerance;

pub const FORMAT_VERSION: u32 = 1;

/// A matrix as rows of `[re, im]` pairs.
pub type MatrixSpec = Vec<Vec<[f64; 2]>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub version: u32,
    pub worlds: Vec<String>,
    pub agents: Vec<AgentSpec>,
    pub measure: MeasureSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hypothesis: Option<Vec<String>>,
    pub targets: TargetsSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentSpec {
    pub name: String,
    pub partition: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum MeasureSpec {
    Classical {
        weights: Vec<f64>,
    },
    Quantum {
        dim: usize,
        atoms: Vec<MatrixSpec>,
    },
    Povm {
        dim: usize,
        effects: Vec<MatrixSpec>,
        state: MatrixSpec,
    },
    Gpt {
        cone: ConeSpec,
        unit: Vec<f64>,
        atoms: Vec<Vec<f64>>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConeKindSpec {
    Simplex,
    Psd,
    Polyhedral,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeSpec {
    pub kind: ConeKindSpec,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix_dim: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TargetsSpec {
    Reals(Vec<f64>),
    Matrices(Vec<MatrixSpec>),
    Vectors(Vec<Vec<f64>>),
}

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid scenario at `{path}`: {message}")]
    Validation { path: String, message: String },
    #[error("{context}: {source}")]
    Compute {
        context: String,
        #[source]
        source: Error,
    },
}

impl ScenarioError {
    fn invalid(path: impl Into<String>, message: impl ToString) -> Self {
        ScenarioError::Validation {
            path: path.into(),
            message: message.to_string(),
        }
    }

    fn compute(context: impl Into<String>, source: Error) -> Self {
        ScenarioError::Compute {
            context: context.into(),
            source,
        }
    }
}

pub type ScenarioResult<T> = std::result::Result<T, ScenarioError>;

/// A validated scenario: the file, its names, and the compiled instance.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub file: ScenarioFile,
    pub instance: Instance,
}

impl Scenario {
    pub fn world_names(&self) -> &[String] {
        &self.file.worlds
    }

    pub fn agent_names(&self) -> Vec<&str> {
        self.file.agents.iter().map(|a| a.name.as_str()).collect()
    }

    /// World names of `event`, sorted.
    pub fn names(&self, event: &Event) -> Vec<String> {
        let mut names: Vec<String> = event.iter().map(|w| self.file.worlds[w].clone()).collect();
        names.sort();
        names
    }
}

fn decode(text: &str) -> ScenarioResult<ScenarioFile> {
    let mut de = serde_json::Deserializer::from_str(text);
    let file: ScenarioFile = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        match inner.classify() {
            serde_json::error::Category::Data => ScenarioError::invalid(path, inner),
            _ => ScenarioError::Syntax {
                line: inner.line(),
                column: inner.column(),
                message: inner.to_string(),
            },
        }
    })?;
    de.end().map_err(|e| ScenarioError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    Ok(file)
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> ScenarioResult<ScenarioFile> {
    Ok(load_scenario(text)?.file)
}

/// Parses, validates and compiles a scenario document.
pub fn load_scenario(text: &str) -> ScenarioResult<Scenario> {
    compile(decode(text)?)
}

fn index_names(names: &[String], path: &str) -> ScenarioResult<HashMap<String, usize>> {
    let mut index = HashMap::new();
    for (i, name) in names.iter().enumerate() {
        if index.insert(name.clone(), i).is_some() {
            return Err(ScenarioError::invalid(
                format!("{path}[{i}]"),
                format!("duplicate name `{name}`"),
            ));
        }
    }
    Ok(index)
}

fn resolve(
    worlds: &HashMap<String, usize>,
    n: usize,
    names: &[String],
    path: &str,
) -> ScenarioResult<Event> {
    let mut event = Event::empty(n);
    for (k, name) in names.iter().enumerate() {
        let &w = worlds.get(name).ok_or_else(|| {
            ScenarioError::invalid(format!("{path}[{k}]"), format!("unknown world `{name}`"))
        })?;
        event.insert(w);
    }
    Ok(event)
}

fn matrix(spec: &MatrixSpec, dim: usize, path: &str) -> ScenarioResult<HermitianMatrix> {
    let m = HermitianMatrix::from_pairs(spec).map_err(|e| ScenarioError::invalid(path, e))?;
    if m.dim() != dim {
        return Err(ScenarioError::invalid(
            path,
            format!("expected a {dim}x{dim} matrix, found {0}x{0}", m.dim()),
        ));
    }
    Ok(m)
}

fn count(found: usize, expected: usize, path: &str, what: &str) -> ScenarioResult<()> {
    if found != expected {
        return Err(ScenarioError::invalid(
            path,
            format!("expected {expected} {what}, found {found}"),
        ));
    }
    Ok(())
}

fn canonical_unit(found: &[f64], expected: &[f64]) -> ScenarioResult<()> {
    let matches = found.len() == expected.len()
        && found
            .iter()
            .zip(expected)
            .all(|(a, b)| (a - b).abs() <= tolerance::HERMITIAN);
    if !matches {
        return Err(ScenarioError::invalid(
            "measure.gpt.unit",
            format!("this cone's unit is {expected:?}"),
        ));
    }
    Ok(())
}

fn compile_cone(spec: &ConeSpec, unit: &[f64]) -> ScenarioResult<ConeSpace> {
    let path = "measure.gpt.cone";
    let cone = match spec.kind {
        ConeKindSpec::Simplex => {
            let cone = ConeSpace::simplex(spec.dim).map_err(|e| ScenarioError::invalid(path, e))?;
            canonical_unit(unit, cone.unit())?;
            cone
        }
        ConeKindSpec::Psd => {
            let k = spec.matrix_dim.ok_or_else(|| {
                ScenarioError::invalid(format!("{path}.matrix_dim"), "required for psd cones")
            })?;
            let cone = ConeSpace::psd(k).map_err(|e| ScenarioError::invalid(path, e))?;
            count(spec.dim, k * k, &format!("{path}.dim"), "coordinates (matrix_dim squared)")?;
            canonical_unit(unit, cone.unit())?;
            cone
        }
        ConeKindSpec::Polyhedral => {
            let generators = spec.generators.clone().ok_or_else(|| {
                ScenarioError::invalid(format!("{path}.generators"), "required for polyhedral cones")
            })?;
            for (g, gen) in generators.iter().enumerate() {
                count(gen.len(), spec.dim, &format!("{path}.generators[{g}]"), "coordinates")?;
            }
            count(unit.len(), spec.dim, "measure.gpt.unit", "coordinates")?;
            ConeSpace::polyhedral(generators, unit.to_vec())
                .map_err(|e| ScenarioError::invalid(path, e))?
        }
    };
    if spec.kind != ConeKindSpec::Polyhedral && spec.generators.is_some() {
        return Err(ScenarioError::invalid(
            format!("{path}.generators"),
            "only polyhedral cones take generators",
        ));
    }
    Ok(cone)
}

fn compile_measure(spec: &MeasureSpec, n: usize) -> ScenarioResult<Measure> {
    match spec {
        MeasureSpec::Classical { weights } => {
            let path = "measure.classical.weights";
            count(weights.len(), n, path, "weights")?;
            let mu = ProbabilityMeasure::new(weights.clone())
                .map_err(|e| ScenarioError::invalid(path, e))?;
            Ok(Measure::Classical(mu))
        }
        MeasureSpec::Quantum { dim, atoms } => {
            let path = "measure.quantum.atoms";
            count(atoms.len(), n, path, "atoms")?;
            let atoms = atoms
                .iter()
                .enumerate()
                .map(|(w, a)| matrix(a, *dim, &format!("{path}[{w}]")))
                .collect::<ScenarioResult<Vec<_>>>()?;
            let rho = Dovm::new(atoms).map_err(|e| ScenarioError::invalid(path, e))?;
            Ok(Measure::Quantum(rho))
        }
        MeasureSpec::Povm {
            dim,
            effects,
            state,
        } => {
            let path = "measure.povm.effects";
            count(effects.len(), n, path, "effects")?;
            let effects = effects
                .iter()
                .enumerate()
                .map(|(w, a)| matrix(a, *dim, &format!("{path}[{w}]")))
                .collect::<ScenarioResult<Vec<_>>>()?;
            let povm = Povm::new(effects).map_err(|e| ScenarioError::invalid(path, e))?;
            let spath = "measure.povm.state";
            let sigma = DensityOperator::new(matrix(state, *dim, spath)?)
                .map_err(|e| ScenarioError::invalid(spath, e))?;
            let rho = povm
                .to_dovm(&sigma)
                .map_err(|e| ScenarioError::invalid("measure.povm", e))?;
            Ok(Measure::Quantum(rho))
        }
        MeasureSpec::Gpt { cone, unit, atoms } => {
            let cone = compile_cone(cone, unit)?;
            let path = "measure.gpt.atoms";
            count(atoms.len(), n, path, "atoms")?;
            for (w, a) in atoms.iter().enumerate() {
                count(a.len(), cone.dim(), &format!("{path}[{w}]"), "coordinates")?;
            }
            let mu = Svm::new(cone, atoms.clone()).map_err(|e| ScenarioError::invalid(path, e))?;
            Ok(Measure::Gpt(mu))
        }
    }
}

fn compile_targets(spec: &TargetsSpec, measure: &Measure, agents: usize) -> ScenarioResult<Targets> {
    let path = "targets";
    let targets = match (measure, spec) {
        (Measure::Classical(_), TargetsSpec::Reals(q)) => Targets::Classical(q.clone()),
        (Measure::Quantum(rho), TargetsSpec::Matrices(ms)) => Targets::Quantum(
            ms.iter()
                .enumerate()
                .map(|(i, m)| matrix(m, rho.dim(), &format!("{path}[{i}]")))
                .collect::<ScenarioResult<_>>()?,
        ),
        (Measure::Gpt(mu), TargetsSpec::Vectors(vs)) => {
            for (i, v) in vs.iter().enumerate() {
                count(v.len(), mu.cone().dim(), &format!("{path}[{i}]"), "coordinates")?;
            }
            Targets::Gpt(vs.clone())
        }
        // An empty list parses as reals; report it by count instead.
        (_, TargetsSpec::Reals(q)) if q.is_empty() => {
            return Err(ScenarioError::invalid(path, format!("expected {agents} targets, found 0")))
        }
        (m, _) => {
            let expected = match m.kind() {
                LayerKind::Classical => "reals",
                LayerKind::Quantum => "matrices",
                LayerKind::Gpt => "coordinate vectors",
            };
            return Err(ScenarioError::invalid(
                path,
                format!("a {:?} measure takes {expected}", m.kind()).to_lowercase(),
            ));
        }
    };
    count(targets.len(), agents, path, "targets (one per agent)")?;
    Ok(targets)
}

/// Validates a decoded file and builds its instance.
pub fn compile(file: ScenarioFile) -> ScenarioResult<Scenario> {
    if file.version != FORMAT_VERSION {
        return Err(ScenarioError::invalid(
            "version",
            format!("unsupported version {}, expected {FORMAT_VERSION}", file.version),
        ));
    }
    let n = file.worlds.len();
    if n == 0 {
        return Err(ScenarioError::invalid("worlds", "at least one world is required"));
    }
    if file.agents.is_empty() {
        return Err(ScenarioError::invalid("agents", "at least one agent is required"));
    }
    let worlds = index_names(&file.worlds, "worlds")?;
    let agent_names: Vec<String> = file.agents.iter().map(|a| a.name.clone()).collect();
    index_names(&agent_names, "agents")?;

    let mut partitions = Vec::with_capacity(file.agents.len());
    for (i, agent) in file.agents.iter().enumerate() {
        let path = format!("agents[{i}].partition");
        let cells = agent
            .partition
            .iter()
            .enumerate()
            .map(|(c, names)| resolve(&worlds, n, names, &format!("{path}[{c}]")))
            .collect::<ScenarioResult<Vec<_>>>()?;
        partitions.push(Partition::new(n, cells).map_err(|e| ScenarioError::invalid(path, e))?);
    }
    let model = KnowledgeModel::new(n, partitions).map_err(|e| ScenarioError::invalid("agents", e))?;

    let measure = compile_measure(&file.measure, n)?;
    let hypothesis = file
        .hypothesis
        .as_ref()
        .map(|names| resolve(&worlds, n, names, "hypothesis"))
        .transpose()?;
    if measure.kind() == LayerKind::Classical && hypothesis.is_none() {
        return Err(ScenarioError::invalid("hypothesis", "required for classical measures"));
    }
    let targets = compile_targets(&file.targets, &measure, model.n_agents())?;
    if let Some(tol) = file.tolerance {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(ScenarioError::invalid("tolerance", "must be positive and finite"));
        }
    }
    let instance = Instance::new(model, measure, hypothesis, targets)
        .map_err(|e| ScenarioError::invalid("(root)", e))?;
    Ok(Scenario { file, instance })
}

fn measure_spec(measure: &Measure) -> MeasureSpec {
    match measure {
        Measure::Classical(mu) => MeasureSpec::Classical {
            weights: mu.weights().to_vec(),
        },
        Measure::Quantum(rho) => MeasureSpec::Quantum {
            dim: rho.dim(),
            atoms: rho.atoms().iter().map(HermitianMatrix::to_pairs).collect(),
        },
        Measure::Gpt(mu) => {
            let cone = mu.cone();
            let (kind, generators, matrix_dim) = match cone.kind() {
                ConeKind::Simplex => (ConeKindSpec::Simplex, None, None),
                ConeKind::PsdCone { matrix_dim } => (ConeKindSpec::Psd, None, Some(*matrix_dim)),
                ConeKind::Polyhedral { generators } => {
                    (ConeKindSpec::Polyhedral, Some(generators.clone()), None)
                }
            };
            MeasureSpec::Gpt {
                cone: ConeSpec {
                    kind,
                    dim: cone.dim(),
                    generators,
                    matrix_dim,
                },
                unit: cone.unit().to_vec(),
                atoms: mu.atoms().to_vec(),
            }
        }
    }
}

/// A scenario file for `instance`, naming worlds `w0, w1, …` and agents
/// `agent0, agent1, …`.
pub fn scenario_from_instance(instance: &Instance, tolerance: Option<f64>) -> ScenarioFile {
    let worlds: Vec<String> = (0..instance.model.n_worlds()).map(|w| format!("w{w}")).collect();
    let names = |e: &Event| e.iter().map(|w| worlds[w].clone()).collect::<Vec<_>>();
    let agents = instance
        .model
        .partitions()
        .iter()
        .enumerate()
        .map(|(i, p)| AgentSpec {
            name: format!("agent{i}"),
            partition: p.cells().iter().map(names).collect(),
        })
        .collect();
    let targets = match &instance.targets {
        Targets::Classical(q) => TargetsSpec::Reals(q.clone()),
        Targets::Quantum(s) => TargetsSpec::Matrices(s.iter().map(HermitianMatrix::to_pairs).collect()),
        Targets::Gpt(v) => TargetsSpec::Vectors(v.clone()),
    };
    ScenarioFile {
        version: FORMAT_VERSION,
        measure: measure_spec(&instance.measure),
        hypothesis: instance.hypothesis.as_ref().map(names),
        agents,
        targets,
        tolerance,
        worlds,
    }
}

/// Writes JSON with two-space indentation, keeping arrays of scalars on one line.
fn write_json(out: &mut String, value: &Json, indent: usize) {
    let pad = "  ".repeat(indent);
    match value {
        Json::Array(items) if items.is_empty() => out.push_str("[]"),
        Json::Array(items)
            if items.iter().all(|v| !v.is_array() && !v.is_object())
                || items.iter().all(is_pair) =>
        {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_json(out, item, indent);
            }
            out.push(']');
        }
        Json::Array(items) => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad);
                out.push_str("  ");
                write_json(out, item, indent + 1);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad);
            out.push(']');
        }
        Json::Object(map) if map.is_empty() => out.push_str("{}"),
        Json::Object(map) => {
            out.push_str("{\n");
            for (i, (key, item)) in map.iter().enumerate() {
                let _ = write!(out, "{pad}  {}: ", Json::String(key.clone()));
                write_json(out, item, indent + 1);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad);
            out.push('}');
        }
        scalar => out.push_str(&scalar.to_string()),
    }
}

/// Matrix rows of `[re, im]` pairs stay on one line.
fn is_pair(v: &Json) -> bool {
    matches!(v, Json::Array(p) if p.len() == 2 && p.iter().all(Json::is_number))
}

/// Renders any serialisable value in the scenario layout.
pub fn to_json_text<T: Serialize>(value: &T) -> String {
    let json = serde_json::to_value(value).expect("plain data always serialises");
    let mut out = String::new();
    write_json(&mut out, &json, 0);
    out.push('\n');
    out
}

/// Canonical text of a scenario file. Numbers use the shortest decimal form
/// that reads back to the same double.
pub fn serialize_scenario(file: &ScenarioFile) -> String {
    to_json_text(file)
}

/// A conditional or target in report form.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ValueOut {
    Scalar(f64),
    Matrix(MatrixSpec),
    Vector(Vec<f64>),
}

impl From<&Value> for ValueOut {
    fn from(v: &Value) -> Self {
        match v {
            Value::Scalar(x) => ValueOut::Scalar(*x),
            Value::Matrix(m) => ValueOut::Matrix(m.to_pairs()),
            Value::Vector(x) => ValueOut::Vector(x.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellReport {
    pub worlds: Vec<String>,
    pub mass: f64,
    /// Absent for null cells.
    pub conditional: Option<ValueOut>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AgentReport {
    pub name: String,
    pub target: ValueOut,
    /// `K_i(E)`.
    pub knows: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cells: Option<Vec<CellReport>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Timings {
    pub parse_us: u128,
    pub verify_us: u128,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub layer: LayerKind,
    pub tolerance: f64,
    pub worlds: Vec<String>,
    pub agreement_event: Vec<String>,
    pub agents: Vec<AgentReport>,
    /// `M_1, M_2, …` up to the first repeated level.
    pub mutual_knowledge: Vec<Vec<String>>,
    pub common_knowledge: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub meet: Option<Vec<Vec<String>>>,
    pub common_mass: f64,
    pub pooled_posterior: Option<ValueOut>,
    pub max_deviation: Option<f64>,
    pub status: VerdictStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
    #[serde(skip)]
    pub verdict: Verdict,
}

impl Report {
    /// 1 for a violated verdict, 0 otherwise.
    pub fn exit_code(&self) -> i32 {
        i32::from(self.status == VerdictStatus::Violated)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RunOptions {
    /// Overrides the file's tolerance.
    pub tol: Option<f64>,
    /// Bound on the common-knowledge iteration; defaults to `n_worlds + 1`.
    pub max_iters: Option<usize>,
    pub timings: bool,
}

fn target_values(targets: &Targets) -> Vec<ValueOut> {
    match targets {
        Targets::Classical(q) => q.iter().map(|&x| ValueOut::Scalar(x)).collect(),
        Targets::Quantum(s) => s.iter().map(|m| ValueOut::Matrix(m.to_pairs())).collect(),
        Targets::Gpt(v) => v.iter().cloned().map(ValueOut::Vector).collect(),
    }
}

fn build_report(text: &str, opts: RunOptions, detailed: bool) -> ScenarioResult<Report> {
    let started = Instant::now();
    let scenario = load_scenario(text)?;
    let parsed = started.elapsed();
    let tol = opts
        .tol
        .or(scenario.file.tolerance)
        .unwrap_or(tolerance::DEFAULT_TOL);
    let instance = &scenario.instance;
    let model = &instance.model;
    let max_iters = opts.max_iters.unwrap_or(model.n_worlds() + 1);
    let started = Instant::now();
    let (verdict, trace) = instance
        .verify_traced(tol, max_iters)
        .map_err(|e| ScenarioError::compute("agreement check", e))?;
    let verified = started.elapsed();

    let e = verdict.agreement_event();
    let targets = target_values(&instance.targets);
    let mut agents = Vec::with_capacity(model.n_agents());
    for (i, name) in scenario.agent_names().into_iter().enumerate() {
        let knows = model
            .know(i, e)
            .map_err(|err| ScenarioError::compute(format!("knowledge of {name}"), err))?;
        let cells = detailed
            .then(|| {
                model.partitions()[i]
                    .cells()
                    .iter()
                    .map(|cell| {
                        let mass = instance.mass(cell)?;
                        let conditional = match instance.conditional(cell) {
                            Ok(v) => Some(ValueOut::from(&v)),
                            Err(Error::ConditioningOnNull { .. }) => None,
                            Err(err) => return Err(err),
                        };
                        Ok(CellReport {
                            worlds: scenario.names(cell),
                            mass,
                            conditional,
                        })
                    })
                    .collect::<crate::error::Result<Vec<_>>>()
            })
            .transpose()
            .map_err(|err| ScenarioError::compute(format!("cell conditionals of {name}"), err))?;
        agents.push(AgentReport {
            name: name.to_string(),
            target: targets[i].clone(),
            knows: scenario.names(&knows),
            cells,
        });
    }
    let meet = detailed.then(|| {
        model
            .meet_partition()
            .cells()
            .iter()
            .map(|c| scenario.names(c))
            .collect()
    });
    Ok(Report {
        layer: instance.layer(),
        tolerance: tol,
        worlds: scenario.file.worlds.clone(),
        agreement_event: scenario.names(e),
        agents,
        mutual_knowledge: trace.levels.iter().map(|l| scenario.names(l)).collect(),
        common_knowledge: scenario.names(verdict.common_event()),
        meet,
        common_mass: verdict.common_mass(),
        pooled_posterior: verdict.pooled_posterior().as_ref().map(ValueOut::from),
        max_deviation: verdict.max_deviation(),
        status: verdict.status(),
        timings: opts.timings.then_some(Timings {
            parse_us: parsed.as_micros(),
            verify_us: verified.as_micros(),
        }),
        verdict,
    })
}

/// Knowledge structure, per-cell conditionals and the agreement verdict.
pub fn run_analyze(text: &str, opts: RunOptions) -> ScenarioResult<Report> {
    build_report(text, opts, true)
}

/// The agreement verdict with its common-knowledge trace.
pub fn run_agree(text: &str, opts: RunOptions) -> ScenarioResult<Report> {
    build_report(text, opts, false)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// `quantum` measure to `povm` measure with the state `ρ(Ω)`.
    DovmToPovm,
    /// `povm` measure to `quantum` measure.
    PovmToDovm,
}

/// Rewrites the measure of a quantum scenario between its DOVM and POVM
/// forms. Everything else in the file is kept.
pub fn run_convert(text: &str, direction: Direction) -> ScenarioResult<String> {
    let scenario = load_scenario(text)?;
    let Measure::Quantum(rho) = &scenario.instance.measure else {
        return Err(ScenarioError::invalid("measure", "conversion needs a quantum or povm measure"));
    };
    let mut file = scenario.file.clone();
    file.measure = match (direction, &scenario.file.measure) {
        (Direction::DovmToPovm, MeasureSpec::Quantum { dim, .. }) => {
            let total = rho.total();
            if total.min_eigenvalue() <= tolerance::SUPPORT {
                return Err(ScenarioError::invalid(
                    "measure.quantum.atoms",
                    "the total state is not full rank, so no POVM sums to the identity",
                ));
            }
            MeasureSpec::Povm {
                dim: *dim,
                effects: rho.to_povm().effects().iter().map(HermitianMatrix::to_pairs).collect(),
                state: total.to_pairs(),
            }
        }
        (Direction::PovmToDovm, MeasureSpec::Povm { dim, .. }) => MeasureSpec::Quantum {
            dim: *dim,
            atoms: rho.atoms().iter().map(HermitianMatrix::to_pairs).collect(),
        },
        (Direction::DovmToPovm, _) => {
            return Err(ScenarioError::invalid("measure", "dovm2povm needs a quantum measure"))
        }
        (Direction::PovmToDovm, _) => {
            return Err(ScenarioError::invalid("measure", "povm2dovm needs a povm measure"))
        }
    };
    let converted = serialize_scenario(&file);
    // The output must itself be a valid scenario.
    load_scenario(&converted)?;
    Ok(converted)
}

/// Generates a scenario file; planted unless `random` is set.
pub fn run_gen(
    layer: Layer,
    seed: u64,
    params: GenParams,
    random: bool,
    tol: Option<f64>,
) -> ScenarioResult<String> {
    let bundle = if random {
        gen_random_scenario(Seed(seed), layer, params)
    } else {
        gen_planted_scenario(Seed(seed), layer, params)
    }
    .map_err(|e| ScenarioError::compute("generation", e))?;
    Ok(serialize_scenario(&scenario_from_instance(&bundle.instance, tol)))
}

fn fmt_names(names: &[String]) -> String {
    format!("{{{}}}", names.join(", "))
}

fn fmt_value(v: &ValueOut, indent: &str) -> String {
    match v {
        ValueOut::Scalar(x) => format!(" {x:.6}"),
        ValueOut::Vector(xs) => {
            let parts: Vec<String> = xs.iter().map(|x| format!("{x:.6}")).collect();
            format!(" ({})", parts.join(", "))
        }
        ValueOut::Matrix(rows) => rows
            .iter()
            .map(|row| {
                let parts: Vec<String> = row
                    .iter()
                    .map(|[re, im]| format!("{re:.6}{im:+.6}i"))
                    .collect();
                format!("\n{indent}[{}]", parts.join(", "))
            })
            .collect(),
    }
}

fn status_text(status: VerdictStatus) -> &'static str {
    match status {
        VerdictStatus::Holds => "holds",
        VerdictStatus::VacuousEmptyCommonKnowledge => "vacuous (common knowledge is empty)",
        VerdictStatus::VacuousNullCommonKnowledge => "vacuous (common knowledge has zero mass)",
        VerdictStatus::Violated => "VIOLATED",
    }
}

/// Human-readable report: sorted world-name lists and six decimals.
/// Matrices print one row per line.
pub fn render_report(report: &Report) -> String {
    let mut out = String::new();
    let layer = format!("{:?}", report.layer).to_lowercase();
    let _ = writeln!(out, "layer: {layer}");
    let _ = writeln!(out, "tolerance: {:e}", report.tolerance);
    let _ = writeln!(out, "agreement event E: {}", fmt_names(&report.agreement_event));
    let _ = writeln!(out, "agents:");
    for agent in &report.agents {
        let _ = writeln!(out, "  {}", agent.name);
        let _ = writeln!(out, "    target:{}", fmt_value(&agent.target, "      "));
        let _ = writeln!(out, "    K(E): {}", fmt_names(&agent.knows));
        if let Some(cells) = &agent.cells {
            let _ = writeln!(out, "    cells:");
            for cell in cells {
                let cond = cell
                    .conditional
                    .as_ref()
                    .map_or(" null cell".to_string(), |v| fmt_value(v, "        "));
                let _ = writeln!(
                    out,
                    "      {} mass {:.6}:{cond}",
                    fmt_names(&cell.worlds),
                    cell.mass
                );
            }
        }
    }
    if let Some(meet) = &report.meet {
        let cells: Vec<String> = meet.iter().map(|c| fmt_names(c)).collect();
        let _ = writeln!(out, "meet partition: {}", cells.join(" "));
    }
    let _ = writeln!(out, "mutual knowledge:");
    for (m, level) in report.mutual_knowledge.iter().enumerate() {
        let _ = writeln!(out, "  M{}: {}", m + 1, fmt_names(level));
    }
    let _ = writeln!(out, "common knowledge C(E): {}", fmt_names(&report.common_knowledge));
    let _ = writeln!(out, "mass of C(E): {:.6}", report.common_mass);
    if let Some(pooled) = &report.pooled_posterior {
        let _ = writeln!(out, "pooled posterior:{}", fmt_value(pooled, "  "));
    }
    if let Some(d) = report.max_deviation {
        let _ = writeln!(out, "max deviation: {d:.6e}");
    }
    let _ = writeln!(out, "verdict: {}", status_text(report.status));
    if let Some(t) = &report.timings {
        let _ = writeln!(out, "timings: parse {} us, verify {} us", t.parse_us, t.verify_us);
    }
    out
}

pub fn render_stats(stats: &SearchStats) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "scenarios: {}", stats.scenarios);
    let _ = writeln!(out, "holds: {}", stats.holds);
    let _ = writeln!(out, "vacuous (empty): {}", stats.vacuous_empty);
    let _ = writeln!(out, "vacuous (null): {}", stats.vacuous_null);
    let _ = writeln!(out, "violations: {}", stats.violations);
    let _ = writeln!(out, "errors: {}", stats.errors);
    let _ = writeln!(out, "max deviation: {:.6e}", stats.max_deviation);
    if !stats.failing_seeds.is_empty() {
        let _ = writeln!(out, "failing seeds: {:?}", stats.failing_seeds);
    }
    out
}
