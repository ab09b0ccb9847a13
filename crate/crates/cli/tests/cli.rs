//! End-to-end tests of the binary: JSON schemas, pipelines between
//! subcommands, exit codes, and byte determinism.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn octospec(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_octospec"))
        .args(args)
        .current_dir(dir)
        .env_remove("OCTOSPEC_DEFAULT_TOL")
        .output()
        .expect("binary runs")
}

fn parse_stdout(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn signs_table_schema() {
    let tmp = TempDir::new().unwrap();
    let out = octospec(&["signs", "--level", "2", "--format", "json"], tmp.path());
    let doc = parse_stdout(&out);
    assert_eq!(doc["v"], 2);
    let table = doc["table"].as_array().unwrap();
    assert_eq!(table.len(), 4);
    // i_1 i_2 = i_3 and i_2 i_1 = −i_3.
    assert_eq!(table[1][2]["s"], 1);
    assert_eq!(table[1][2]["l"], 3);
    assert_eq!(table[2][1]["s"], -1);
    assert_eq!(table[2][1]["l"], 3);
    // The identity row passes every unit through.
    for k in 0..4 {
        assert_eq!(table[0][k]["s"], 1);
        assert_eq!(table[0][k]["l"], k);
    }
}

#[test]
fn spectral_pipeline_round_trips() {
    let tmp = TempDir::new().unwrap();
    let pvm = tmp.path().join("pvm.json");
    let op = tmp.path().join("op.json");
    let rec = tmp.path().join("rec.json");
    let out = octospec(
        &[
            "generate", "pvm", "--level", "2", "--dim", "3", "--atoms", "2", "--seed", "11",
            "--out", pvm.to_str().unwrap(),
        ],
        tmp.path(),
    );
    assert!(out.status.success());
    let out = octospec(
        &["spectral", "synth", "--in", pvm.to_str().unwrap(), "--out", op.to_str().unwrap()],
        tmp.path(),
    );
    assert!(out.status.success());
    let op_doc = read_json(&op);
    assert_eq!(op_doc["n"], 12); // d·2^v = 3·4
    let out = octospec(
        &[
            "spectral", "recover", "--in", op.to_str().unwrap(), "--level", "2", "--out",
            rec.to_str().unwrap(),
        ],
        tmp.path(),
    );
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let original = read_json(&pvm);
    let recovered = read_json(&rec);
    let zs = |doc: &Value| -> Vec<Vec<f64>> {
        let mut v: Vec<Vec<f64>> = doc["atoms"]
            .as_array()
            .unwrap()
            .iter()
            .map(|a| {
                a["z"]["c"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
            })
            .collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    };
    let (zo, zr) = (zs(&original), zs(&recovered));
    assert_eq!(zo.len(), zr.len());
    for (a, b) in zo.iter().zip(&zr) {
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= 1e-9, "{x} vs {y}");
        }
    }
}

#[test]
fn check_suite_on_generated_triple() {
    let tmp = TempDir::new().unwrap();
    let triple = tmp.path().join("t.json");
    let real = tmp.path().join("real.json");
    assert!(octospec(
        &[
            "generate", "triple", "--level", "3", "--dim", "4", "--atoms", "3", "--seed", "2",
            "--out", triple.to_str().unwrap(),
        ],
        tmp.path(),
    )
    .status
    .success());
    assert!(octospec(
        &[
            "generate", "triple", "--level", "2", "--dim", "3", "--atoms", "2", "--seed", "3",
            "--real-only", "--out", real.to_str().unwrap(),
        ],
        tmp.path(),
    )
    .status
    .success());

    let t = triple.to_str().unwrap();
    for sub in ["theorem5", "lemma2", "lemma7", "property-p"] {
        let out = octospec(&["check", sub, "--in", t, "--format", "json"], tmp.path());
        let doc = parse_stdout(&out);
        assert_eq!(doc["pass"], true, "{sub}: {doc}");
        assert_eq!(doc["suite"], sub);
    }
    let out = octospec(
        &["check", "theorem5", "--in", t, "--format", "json"],
        tmp.path(),
    );
    let doc = parse_stdout(&out);
    assert_eq!(doc["convention"], "span-omit-1-comp");
    assert_eq!(doc["residuals"]["eq2_per_l"].as_array().unwrap().len(), 8);

    let out = octospec(
        &["check", "corollary6", "--in", real.to_str().unwrap(), "--format", "json"],
        tmp.path(),
    );
    let doc = parse_stdout(&out);
    assert_eq!(doc["residuals"]["applicable"], true);
    assert_eq!(doc["pass"], true);
}

#[test]
fn stone_pipeline_and_aliasing() {
    let tmp = TempDir::new().unwrap();
    let spec = tmp.path().join("spec.json");
    let samples = tmp.path().join("samples.json");
    assert!(octospec(
        &[
            "generate", "semigroup", "--level", "2", "--dim", "3", "--m", "0", "--n", "1",
            "--atoms", "1", "--seed", "4", "--out", spec.to_str().unwrap(),
        ],
        tmp.path(),
    )
    .status
    .success());

    let out = octospec(
        &["stone", "verify", "--in", spec.to_str().unwrap(), "--tol", "1e-9", "--format", "json"],
        tmp.path(),
    );
    let doc = parse_stdout(&out);
    assert_eq!(doc["pass"], true, "{doc}");

    let out = octospec(
        &[
            "stone", "build", "--in", spec.to_str().unwrap(), "--h", "0.35", "--count", "6",
            "--out", samples.to_str().unwrap(),
        ],
        tmp.path(),
    );
    assert!(out.status.success());
    let out = octospec(
        &["stone", "recover", "--in", samples.to_str().unwrap(), "--level", "2", "--format", "json"],
        tmp.path(),
    );
    let doc = parse_stdout(&out);
    assert_eq!(doc["pass"], true, "{doc}");
    assert_eq!(doc["aliasing"], false);
    assert_eq!(doc["atoms"].as_array().unwrap().len(), 1);

    // The generated single-atom spec rotates at speed b; sampling at
    // h = π(1−5e−4)/b violates the branch condition and must exit 1 with
    // an aliasing report, not fold the angle back silently.
    let spec_doc = read_json(&spec);
    let b = spec_doc["atoms"][0]["b"][0].as_f64().unwrap().abs();
    let h_bad = std::f64::consts::PI * (1.0 - 5e-4) / b;
    let alias = tmp.path().join("alias.json");
    assert!(octospec(
        &[
            "stone", "build", "--in", spec.to_str().unwrap(), "--h", &format!("{h_bad}"),
            "--count", "6", "--out", alias.to_str().unwrap(),
        ],
        tmp.path(),
    )
    .status
    .success());
    let out = octospec(
        &["stone", "recover", "--in", alias.to_str().unwrap(), "--level", "2", "--format", "json"],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["aliasing"], true);
}

#[test]
fn eval_accepts_points_and_rejects_outside() {
    let tmp = TempDir::new().unwrap();
    let spec = tmp.path().join("spec.json");
    assert!(octospec(
        &[
            "generate", "semigroup", "--level", "1", "--dim", "2", "--m", "1", "--n", "2",
            "--atoms", "1", "--seed", "8", "--out", spec.to_str().unwrap(),
        ],
        tmp.path(),
    )
    .status
    .success());
    let out = octospec(
        &["stone", "eval", "--in", spec.to_str().unwrap(), "--x", "1,0.5", "--format", "json"],
        tmp.path(),
    );
    let doc = parse_stdout(&out);
    assert_eq!(doc["n"], 4); // d·2^v = 2·2
    // Discrete coordinate 0 must be an integer: 0.5 is not in Ω.
    let out = octospec(
        &["stone", "eval", "--in", spec.to_str().unwrap(), "--x", "0.5,0.5"],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    // Negative coordinates are rejected too.
    let out = octospec(
        &["stone", "eval", "--in", spec.to_str().unwrap(), "--x", "1,-0.5"],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exit_codes_and_report_hygiene() {
    let tmp = TempDir::new().unwrap();
    let missing_out = tmp.path().join("never.json");
    // Unreadable input: exit 2 and nothing written to --out.
    let out = octospec(
        &["check", "lemma7", "--in", "no-such-file.json", "--out", missing_out.to_str().unwrap()],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(!missing_out.exists());

    // A strict default tolerance from the environment flips the verdict
    // to exit 1, and the report is still written.
    let triple = tmp.path().join("t.json");
    assert!(octospec(
        &[
            "generate", "triple", "--level", "2", "--dim", "3", "--atoms", "2", "--seed", "1",
            "--out", triple.to_str().unwrap(),
        ],
        tmp.path(),
    )
    .status
    .success());
    let strict = tmp.path().join("strict.json");
    let out = Command::new(env!("CARGO_BIN_EXE_octospec"))
        .args([
            "check",
            "theorem5",
            "--in",
            triple.to_str().unwrap(),
            "--out",
            strict.to_str().unwrap(),
        ])
        .current_dir(tmp.path())
        .env("OCTOSPEC_DEFAULT_TOL", "1e-30")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let doc = read_json(&strict);
    assert_eq!(doc["pass"], false);
    let tol = doc["tolerance"].as_f64().unwrap();
    assert!((tol / 1e-30 - 1.0).abs() < 1e-9, "tolerance {tol} not from the environment");

    // Unknown conventions and suites never run anything.
    let out = octospec(
        &["check", "theorem5", "--in", triple.to_str().unwrap(), "--convention", "nonsense"],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    let out = octospec(&["report", "--suite", "nonsense"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn report_bytes_are_deterministic() {
    let tmp = TempDir::new().unwrap();
    let a = tmp.path().join("a.json");
    let b = tmp.path().join("b.json");
    for path in [&a, &b] {
        let out = octospec(
            &[
                "report", "--suite", "algebra", "--seeds", "3", "--no-timestamp", "--out",
                path.to_str().unwrap(),
            ],
            tmp.path(),
        );
        assert!(out.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    // With timestamps the report carries one.
    let out = octospec(&["report", "--suite", "algebra", "--seeds", "3", "--format", "json"], tmp.path());
    let doc = parse_stdout(&out);
    assert!(doc["timestamp"].as_u64().is_some());
}

#[test]
fn calibration_store_feeds_checks() {
    let tmp = TempDir::new().unwrap();
    let store = tmp.path().join("conventions.json");
    let out = octospec(
        &[
            "calibrate", "--seeds", "10", "--tol", "1e-11", "--store", store.to_str().unwrap(),
            "--format", "json", "--no-timestamp",
        ],
        tmp.path(),
    );
    let doc = parse_stdout(&out);
    assert_eq!(doc["pass"], true);
    let stored = read_json(&store);
    assert_eq!(stored["winner"], "span-omit-1-comp");
    assert_eq!(stored["ranking"].as_array().unwrap().len(), 24);

    let triple = tmp.path().join("t.json");
    assert!(octospec(
        &[
            "generate", "triple", "--level", "2", "--dim", "3", "--atoms", "2", "--seed", "6",
            "--out", triple.to_str().unwrap(),
        ],
        tmp.path(),
    )
    .status
    .success());
    let out = octospec(
        &[
            "check", "theorem5", "--in", triple.to_str().unwrap(), "--convention", "calibrated",
            "--store", store.to_str().unwrap(), "--format", "json",
        ],
        tmp.path(),
    );
    let doc = parse_stdout(&out);
    assert_eq!(doc["convention"], stored["winner"]);
    assert_eq!(doc["pass"], true);
}
