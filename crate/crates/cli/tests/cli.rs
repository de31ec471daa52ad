use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use bentlab::json::{ChoiJson, EnsembleJson, StateJson};
use bentlab::posmaps::ChoiMap;
use bentlab::qmat::{max_entangled, BipartiteState, ComplexMatrix};
use bentlab::sepcert::decomposition_b;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bentlab")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn write_json<T: serde::Serialize>(dir: &Path, name: &str, v: &T) -> String {
    let p = dir.join(name);
    fs::write(&p, serde_json::to_string(v).unwrap()).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn verify_corner_b_passes() {
    let o = run(&["verify", "--point", "B", "--d", "3"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    assert_eq!(v["report"]["passed"], true);
    assert_eq!(v["label"], "SeparablePPT");
    assert!(v["meta"]["build"].is_string());
    assert!(v["meta"]["wall_time_s"].is_number());
}

#[test]
fn verify_npt_point_is_negative() {
    let o = run(&["verify", "--point", "C", "--d", "3"]);
    assert_eq!(code(&o), 2);
    assert!(stdout_json(&o)["reason"].is_string());
}

#[test]
fn verify_rejects_bad_input() {
    assert_eq!(code(&run(&["verify", "--point", "Z", "--d", "3"])), 1);
    assert_eq!(code(&run(&["verify", "--b", "0.5", "--c", "0.5", "--d", "3"])), 1);
    assert_eq!(code(&run(&["verify", "--point", "B", "--d", "2"])), 1);
}

#[test]
fn verify_reads_ensemble_files() {
    let dir = tempfile::tempdir().unwrap();
    let good = EnsembleJson::from(&decomposition_b(3).unwrap());
    let path = write_json(dir.path(), "good.json", &good);
    assert_eq!(code(&run(&["verify", "--point", "B", "--d", "3", "--in", &path])), 0);

    let mut bad = good.clone();
    bad.members[2].w *= 1.5;
    let total: f64 = bad.members.iter().map(|m| m.w).sum();
    bad.members.iter_mut().for_each(|m| m.w /= total);
    let path = write_json(dir.path(), "bad.json", &bad);
    let o = run(&["verify", "--point", "B", "--d", "3", "--in", &path]);
    assert_eq!(code(&o), 2);
    assert_eq!(stdout_json(&o)["report"]["passed"], false);
}

#[test]
fn threshold_at_c_zero() {
    let o = run(&["threshold", "--d", "3", "--c", "0", "--n", "1", "--restarts", "16", "--seed", "7"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    assert!((v["eps0"].as_f64().unwrap() - 1.0 / 42.0).abs() < 2e-4);
    assert_eq!(v["meta"]["seed"], 7);
}

#[test]
fn stochastic_commands_require_a_seed() {
    let o = run(&["threshold", "--d", "3", "--c", "0"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("--seed"));
    assert_eq!(code(&run(&["fscan", "--d", "3", "--c", "0", "--eps-grid", "0:0.01:0.01"])), 1);
    assert_eq!(code(&run(&["region-map", "--d", "3", "--grid", "2x2", "--f1"])), 1);
}

#[test]
fn fscan_csv_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let args = [
            "fscan",
            "--d",
            "3",
            "--c",
            "0",
            "--eps-grid",
            "0:0.04:0.01",
            "--restarts",
            "8",
            "--seed",
            "7",
            "--out",
            p.to_str().unwrap(),
        ];
        assert_eq!(code(&run(&args)), 0);
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "eps,minValue,converged");
    assert_eq!(lines.len(), 7);
    assert!(lines[6].starts_with("# bentlab ") && lines[6].ends_with("seed=7"));
    let value = |row: &str| row.split(',').nth(1).unwrap().parse::<f64>().unwrap();
    // sign change between 0.02 and 0.03, near 1/42
    assert!(value(lines[3]) > 0.0 && value(lines[4]) < 0.0);
}

#[test]
fn region_map_labels_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let args = [
            "region-map",
            "--d",
            "3",
            "--grid",
            "5x5",
            "--f1",
            "--restarts",
            "8",
            "--seed",
            "1",
            "--out",
            p.to_str().unwrap(),
        ];
        assert_eq!(code(&run(&args)), 0);
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    assert_eq!(text.lines().count(), 27);
    assert!(text.contains("NPT1_OneCopyDistillable") && text.contains("Unphysical"));

    let o = run(&["region-map", "--d", "3", "--grid", "6x6", "--b-range", "0:0.16666", "--c-range", "0:0.16666"]);
    let text = String::from_utf8(o.stdout).unwrap();
    let labels: Vec<&str> =
        text.lines().skip(1).filter(|l| !l.starts_with('#')).map(|l| l.split(',').nth(2).unwrap()).collect();
    assert_eq!(labels.len(), 36);
    assert!(labels.iter().all(|&l| l == "SeparablePPT"));
}

#[test]
fn region_map_empty_grid_is_header_only() {
    let o = run(&["region-map", "--d", "3", "--grid", "0x0"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("b,c,label,"));
    assert!(lines[1].starts_with('#'));
}

#[test]
fn region_map_rejects_unphysical_ranges() {
    assert_eq!(code(&run(&["region-map", "--d", "3", "--grid", "2x2", "--b-range", "0:0.9"])), 1);
}

#[test]
fn two_pos_transpose_map() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_json(dir.path(), "t.json", &ChoiJson::from(&ChoiMap::transpose(3).unwrap()));
    for extra in [&[][..], &["--maxent"][..]] {
        let mut args = vec!["two-pos", "--map", &path, "--k", "2", "--restarts", "8", "--seed", "7"];
        args.extend_from_slice(extra);
        let o = run(&args);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        let v = stdout_json(&o);
        assert_eq!(v["result"], "ViolationFound");
        assert!(v["margin"].as_f64().unwrap() < -0.1);
    }
    let path = write_json(dir.path(), "id.json", &ChoiJson::from(&ChoiMap::identity(3).unwrap()));
    let o = run(&["two-pos", "--map", &path, "--restarts", "8", "--seed", "7"]);
    assert_eq!(stdout_json(&o)["result"], "NoViolationFound");
}

#[test]
fn reduce_writes_params_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let psi = max_entangled(3, 0).unwrap().projector();
    let mixed = &psi.matrix().scale_real(0.7) + &ComplexMatrix::identity(9).scale_real(0.3 / 9.0);
    let rho = BipartiteState::normalized(mixed, 3, 3).unwrap();
    let input = write_json(dir.path(), "rho.json", &StateJson::from(&rho));
    let out = dir.path().join("params.json");
    let trace = dir.path().join("trace.csv");
    let o = run(&["reduce", "--in", &input, "--out", out.to_str().unwrap(), "--trace", trace.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["npt"], true);
    assert!(v["params"]["b"].as_f64().unwrap() > 1.0 / 6.0);
    let t = fs::read_to_string(trace).unwrap();
    let lines: Vec<&str> = t.lines().collect();
    assert_eq!(lines[0], "stage,TrHrho,trace,minEig");
    assert_eq!(lines.len(), 8);
    assert!(lines[6].starts_with("permutation_symmetrize,"));
}

#[test]
fn reduce_ppt_input_is_negative() {
    let dir = tempfile::tempdir().unwrap();
    let rho = BipartiteState::normalized(ComplexMatrix::identity(9).scale_real(1.0 / 9.0), 3, 3).unwrap();
    let input = write_json(dir.path(), "rho.json", &StateJson::from(&rho));
    let o = run(&["reduce", "--in", &input]);
    assert_eq!(code(&o), 2);
    assert_eq!(stdout_json(&o)["npt"], false);
}

#[test]
fn missing_file_is_an_error() {
    let o = run(&["reduce", "--in", "/nonexistent/rho.json"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("/nonexistent/rho.json"));
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(code(&run(&["fscan", "--d", "3", "--c", "0", "--seed", "1"])), 1);
    assert_eq!(code(&run(&["no-such-command"])), 1);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn fscan_single_eps() {
    let o = run(&["fscan", "--d", "3", "--c", "0", "--eps", "0.03", "--restarts", "8", "--seed", "1"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 3);
}
