use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use aumann_core::scenario::{
    self, parse_scenario, serialize_scenario, Direction, MeasureSpec, RunOptions, ScenarioError,
};
use aumann_core::VerdictStatus;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn aumann(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aumann"))
        .args(args)
        .current_dir(fixtures())
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn valid_files() -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = fs::read_dir(fixtures())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    assert!(files.len() >= 7);
    files
}

#[test]
fn fixtures_are_in_canonical_form() {
    for path in valid_files() {
        let text = fs::read_to_string(&path).unwrap();
        let file = parse_scenario(&text).unwrap();
        assert_eq!(serialize_scenario(&file), text, "{}", path.display());
        assert_eq!(parse_scenario(&serialize_scenario(&file)).unwrap(), file);
    }
}

#[test]
fn model_b_agree_golden() {
    let out = aumann(&["agree", "model_b.json"]);
    assert_eq!(out.status.code(), Some(0));
    let expected = fs::read_to_string(fixtures().join("expected/model_b.agree.txt")).unwrap();
    assert_eq!(stdout(&out), expected);
    assert!(expected.contains("pooled posterior: 0.500000"));
    assert!(expected.contains("verdict: holds"));
}

#[test]
fn model_b_analyze_json_golden() {
    let out = aumann(&["analyze", "model_b.json", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let expected = fs::read_to_string(fixtures().join("expected/model_b.analyze.json")).unwrap();
    assert_eq!(stdout(&out), expected);
    let json: serde_json::Value = serde_json::from_str(&expected).unwrap();
    assert_eq!(json["pooled_posterior"], 0.5);
    assert_eq!(json["status"], "Holds");
    assert_eq!(json["common_knowledge"], serde_json::json!(["w0", "w1"]));
}

#[test]
fn quantum_analyze_golden() {
    let out = aumann(&["analyze", "quantum_planted.json"]);
    assert_eq!(out.status.code(), Some(0));
    let expected =
        fs::read_to_string(fixtures().join("expected/quantum_planted.analyze.txt")).unwrap();
    assert_eq!(stdout(&out), expected);
}

#[test]
fn exit_codes_on_valid_corpus() {
    for path in valid_files() {
        let name = path.file_name().unwrap().to_str().unwrap();
        for cmd in ["agree", "analyze"] {
            let out = aumann(&[cmd, name]);
            assert_eq!(out.status.code(), Some(0), "{cmd} {name}");
        }
    }
}

#[test]
fn exit_codes_on_invalid_corpus() {
    let dir = fixtures().join("invalid");
    let mut n = 0;
    for entry in fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let rel = format!("invalid/{}", path.file_name().unwrap().to_str().unwrap());
        for cmd in ["agree", "analyze"] {
            let out = aumann(&[cmd, &rel]);
            assert_eq!(out.status.code(), Some(2), "{cmd} {rel}");
            assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: "));
        }
        n += 1;
    }
    assert!(n >= 6);
    assert_eq!(aumann(&["agree", "missing.json"]).status.code(), Some(2));
    assert_eq!(aumann(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(aumann(&["agree", "model_b.json", "--tol", "-1"]).status.code(), Some(2));
}

#[test]
fn invalid_files_report_where() {
    let read = |name: &str| fs::read_to_string(fixtures().join("invalid").join(name)).unwrap();
    match parse_scenario(&read("syntax.json")) {
        Err(ScenarioError::Syntax { line, column, .. }) => assert_eq!((line, column), (3, 3)),
        other => panic!("{other:?}"),
    }
    let path_of = |name: &str| match parse_scenario(&read(name)) {
        Err(ScenarioError::Validation { path, .. }) => path,
        other => panic!("{name}: {other:?}"),
    };
    assert_eq!(path_of("unknown_world.json"), "agents[0].partition[1][1]");
    assert_eq!(path_of("bad_weights.json"), "measure.classical.weights");
    assert_eq!(path_of("not_a_partition.json"), "agents[1].partition");
    assert_eq!(path_of("target_count.json"), "targets");
    assert_eq!(path_of("version.json"), "version");
}

#[test]
fn vacuous_file_exits_zero() {
    let text = fs::read_to_string(fixtures().join("vacuous_empty.json")).unwrap();
    let report = scenario::run_agree(&text, RunOptions::default()).unwrap();
    assert_eq!(report.status, VerdictStatus::VacuousEmptyCommonKnowledge);
    assert_eq!(report.exit_code(), 0);
}

#[test]
fn report_matches_direct_library_call() {
    for path in valid_files() {
        let text = fs::read_to_string(&path).unwrap();
        let scenario = scenario::load_scenario(&text).unwrap();
        let direct = scenario.instance.verify(1e-9).unwrap();
        let report = scenario::run_agree(&text, RunOptions::default()).unwrap();
        assert_eq!(report.verdict, direct, "{}", path.display());
        assert_eq!(report.status, direct.status());
        assert_eq!(report.common_mass.to_bits(), direct.common_mass().to_bits());
    }
}

fn max_matrix_gap(a: &MeasureSpec, b: &MeasureSpec) -> f64 {
    let (MeasureSpec::Quantum { atoms: x, .. }, MeasureSpec::Quantum { atoms: y, .. }) = (a, b)
    else {
        panic!("quantum measures expected")
    };
    assert_eq!(x.len(), y.len());
    x.iter()
        .flatten()
        .flatten()
        .zip(y.iter().flatten().flatten())
        .map(|(p, q)| (p[0] - q[0]).abs().max((p[1] - q[1]).abs()))
        .fold(0.0, f64::max)
}

#[test]
fn convert_round_trip_both_directions() {
    let text = fs::read_to_string(fixtures().join("quantum_planted.json")).unwrap();
    let povm = scenario::run_convert(&text, Direction::DovmToPovm).unwrap();
    let back = scenario::run_convert(&povm, Direction::PovmToDovm).unwrap();
    let a = parse_scenario(&text).unwrap();
    let b = parse_scenario(&back).unwrap();
    assert!(max_matrix_gap(&a.measure, &b.measure) <= 1e-8);
    assert_eq!(a.targets, b.targets);
    assert_eq!(a.agents, b.agents);

    let povm_text = fs::read_to_string(fixtures().join("povm_planted.json")).unwrap();
    let again = scenario::run_convert(
        &scenario::run_convert(&povm_text, Direction::PovmToDovm).unwrap(),
        Direction::DovmToPovm,
    )
    .unwrap();
    let (p, q) = (parse_scenario(&povm_text).unwrap(), parse_scenario(&again).unwrap());
    let (MeasureSpec::Povm { effects: e1, .. }, MeasureSpec::Povm { effects: e2, .. }) =
        (&p.measure, &q.measure)
    else {
        panic!("povm measures expected")
    };
    let gap = e1
        .iter()
        .flatten()
        .flatten()
        .zip(e2.iter().flatten().flatten())
        .map(|(x, y)| (x[0] - y[0]).abs().max((x[1] - y[1]).abs()))
        .fold(0.0, f64::max);
    assert!(gap <= 1e-8);
}

#[test]
fn convert_rejects_wrong_direction_and_rank_deficiency() {
    let out = aumann(&["convert", "model_b.json", "--direction", "dovm2povm"]);
    assert_eq!(out.status.code(), Some(2));
    let out = aumann(&["convert", "quantum_planted.json", "--direction", "povm2dovm"]);
    assert_eq!(out.status.code(), Some(2));
    // Pure atoms on one basis vector: the total has rank one.
    let deficient = r#"{
        "version": 1,
        "worlds": ["a", "b"],
        "agents": [{"name": "x", "partition": [["a"], ["b"]]}],
        "measure": {"quantum": {"dim": 2, "atoms": [
            [[[0.5, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]],
            [[[0.5, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]]
        ]}},
        "targets": [[[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]]]
    }"#;
    assert!(scenario::run_agree(deficient, RunOptions::default()).is_ok());
    assert!(matches!(
        scenario::run_convert(deficient, Direction::DovmToPovm),
        Err(ScenarioError::Validation { .. })
    ));
}

#[test]
fn gen_is_deterministic_and_valid() {
    let a = aumann(&["gen", "--layer", "gpt-polyhedral", "--seed", "3", "--worlds", "4", "--dim", "3"]);
    let b = aumann(&["gen", "--layer", "gpt-polyhedral", "--seed", "3", "--worlds", "4", "--dim", "3"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
    let expected = fs::read_to_string(fixtures().join("gpt_polyhedral.json")).unwrap();
    assert_eq!(stdout(&a), expected);
    let out = aumann(&["gen", "--layer", "quantum", "--seed", "1", "--random", "--worlds", "6"]);
    assert_eq!(out.status.code(), Some(0));
    parse_scenario(&stdout(&out)).unwrap();
    assert_eq!(aumann(&["gen", "--layer", "classical", "--worlds", "1"]).status.code(), Some(2));
}

#[test]
fn search_reports_zero_violations() {
    let out = aumann(&["search", "--layer", "classical", "--seeds", "500", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["scenarios"], 500);
    assert_eq!(json["violations"], 0);
    assert_eq!(json["errors"], 0);
}

#[test]
fn max_iters_bound_is_enforced() {
    // MODEL-B reaches its fixpoint at the first level, so one step suffices
    // and zero steps cannot confirm it.
    assert_eq!(aumann(&["agree", "model_b.json", "--max-iters", "1"]).status.code(), Some(0));
    assert_eq!(aumann(&["agree", "model_b.json", "--max-iters", "0"]).status.code(), Some(2));
}

#[test]
fn timings_are_opt_in() {
    let plain = stdout(&aumann(&["agree", "model_b.json", "--json"]));
    assert!(!plain.contains("timings"));
    let timed = stdout(&aumann(&["agree", "model_b.json", "--json", "--timings"]));
    assert!(timed.contains("\"timings\""));
}

#[test]
fn stdin_input() {
    let text = fs::read_to_string(fixtures().join("model_b.json")).unwrap();
    let mut child = Command::new(env!("CARGO_BIN_EXE_aumann"))
        .args(["agree", "-"])
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    use std::io::Write;
    child.stdin.take().unwrap().write_all(text.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("pooled posterior: 0.500000"));
}

#[test]
fn output_file_option() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("gen.json");
    let out = aumann(&["gen", "--layer", "classical", "--seed", "9", "-o", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    parse_scenario(&fs::read_to_string(target).unwrap()).unwrap();
}
