//! Exit-code contract and file plumbing of the `mecm` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn mecm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mecm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn data(file: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(file)
        .display()
        .to_string()
}

fn write(dir: &TempDir, name: &str, contents: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

#[test]
fn help_and_version_succeed() {
    assert_eq!(code(&mecm(&["--help"])), 0);
    assert_eq!(code(&mecm(&["--version"])), 0);
    assert_eq!(code(&mecm(&["cluster", "--help"])), 0);
}

#[test]
fn argument_errors_exit_one() {
    assert_eq!(code(&mecm(&["--bogus"])), 1);
    assert_eq!(code(&mecm(&["cluster"])), 1); // missing required flags
    assert_eq!(code(&mecm(&["frobnicate"])), 1);
}

#[test]
fn validation_errors_exit_one() {
    let dir = TempDir::new().unwrap();
    let out_path = dir.path().join("out.csv");
    let out_str = out_path.display().to_string();

    // Missing input file.
    let out = mecm(&["dissim", "--graph", "no-such-file", "--out", &out_str]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("no-such-file"));

    // Malformed edge line carries its line number.
    let bad = write(&dir, "bad.edges", "a b\nq\n");
    let out = mecm(&["dissim", "--graph", bad.to_str().unwrap(), "--out", &out_str]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains(":2"), "stderr: {}", stderr(&out));

    // Self-loop rejected.
    let loopy = write(&dir, "loop.edges", "a a\n");
    let out = mecm(&["dissim", "--graph", loopy.to_str().unwrap(), "--out", &out_str]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("self-loop"));

    // Wrong --init arity.
    let d = write(&dir, "d.csv", "0,1,2\n1,0,3\n2,3,0\n");
    let json = dir.path().join("r.json").display().to_string();
    let out = mecm(&[
        "cluster", "--dissim", d.to_str().unwrap(), "--method", "mecm", "--c", "2", "--init",
        "1", "--out", &json,
    ]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("--init"));

    // Random strategy demands a seed.
    let g = write(&dir, "g.edges", "a b\nb c\nc a\n");
    let out = mecm(&[
        "detect", "--graph", g.to_str().unwrap(), "--cmax", "2", "--init-strategy", "random",
        "--out", &json,
    ]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("--seed"));

    // Exactly one of --init/--seed.
    let out = mecm(&[
        "cluster", "--dissim", d.to_str().unwrap(), "--method", "mcm", "--c", "2", "--out",
        &json,
    ]);
    assert_eq!(code(&out), 1);

    // ecm needs coordinates.
    let out = mecm(&[
        "cluster", "--dissim", d.to_str().unwrap(), "--method", "ecm", "--c", "2", "--seed",
        "1", "--out", &json,
    ]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("--objects"));
}

#[test]
fn numeric_failures_exit_two() {
    let dir = TempDir::new().unwrap();
    let split = write(&dir, "split.edges", "a b\nc d\n");
    let json = dir.path().join("r.json").display().to_string();
    let out = mecm(&[
        "detect", "--graph", split.to_str().unwrap(), "--cmax", "2", "--out", &json,
    ]);
    assert_eq!(code(&out), 2, "stderr: {}", stderr(&out));
    assert!(stderr(&out).contains("disconnected"), "stderr: {}", stderr(&out));
}

#[test]
fn dissim_and_centrality_emit_manifested_csv() {
    let dir = TempDir::new().unwrap();
    let mfpt = dir.path().join("mfpt.csv");
    let out = mecm(&[
        "dissim", "--graph", &data("karate.edges"), "--kind", "mfpt", "--out",
        mfpt.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let contents = std::fs::read_to_string(&mfpt).unwrap();
    assert!(contents.starts_with("# manifest: "));
    assert!(contents.contains("\"kind\":\"mfpt\""));
    assert_eq!(contents.lines().filter(|l| !l.starts_with('#')).count(), 34);

    let esc = dir.path().join("esc.csv");
    let out = mecm(&[
        "centrality", "--graph", &data("karate.edges"), "--out", esc.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let contents = std::fs::read_to_string(&esc).unwrap();
    assert!(contents.contains("id,score"));
    assert_eq!(contents.lines().filter(|l| !l.starts_with('#')).count(), 35);
}

#[test]
fn cluster_eval_pipeline_round_trips() {
    let dir = TempDir::new().unwrap();
    let pts = dir.path().join("pts.csv").display().to_string();
    let labels = dir.path().join("ref.csv").display().to_string();
    let out = mecm(&[
        "generate", "gauss-mix", "--means", "0,0,10,10", "--std", "0.5", "--counts", "12,12",
        "--seed", "4", "--out", &pts, "--labels-out", &labels,
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));

    // One starting prototype per blob; `mcm` instead exercises the seeded
    // random initialization.
    for (method, extra) in [
        ("mecm", vec!["--init", "1,13"]),
        ("mcm", vec!["--seed", "9"]),
        ("mfcm", vec!["--init", "1,13"]),
        ("ecm", vec!["--init", "1,13", "--tol", "1e-6"]),
    ] {
        let json = dir.path().join(format!("{method}.json"));
        let json_str = json.display().to_string();
        let mut args = vec![
            "cluster", "--objects", &pts, "--method", method, "--c", "2", "--out", &json_str,
        ];
        args.extend(extra);
        let out = mecm(&args);
        assert_eq!(code(&out), 0, "{method} stderr: {}", stderr(&out));

        let doc: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
        assert_eq!(doc["method"], method);
        assert_eq!(doc["objects"].as_array().unwrap().len(), 24);
        match method {
            "ecm" => {
                assert!(doc["centers"].is_array());
                assert!(doc["prototypes"].as_array().unwrap().is_empty());
            }
            "mfcm" => {
                assert!(doc["objects"][0]["memberships"].is_array());
                assert_eq!(doc["prototypes"].as_array().unwrap().len(), 2);
            }
            _ => assert_eq!(doc["prototypes"].as_array().unwrap().len(), 2),
        }

        // Well-separated blobs: every method recovers the reference exactly.
        let out = mecm(&["eval", "--pred", &json_str, "--ref", &labels]);
        assert_eq!(code(&out), 0, "{method} eval stderr: {}", stderr(&out));
        let stdout = String::from_utf8_lossy(&out.stdout).into_owned();
        let mut lines = stdout.lines();
        assert_eq!(lines.next().unwrap(), "method,P,R,RI,EP,ER,ERI,NMI,VI,Q");
        let row = lines.next().unwrap();
        assert_eq!(row, format!("{method},1,1,1,1,1,1,1,0,"));
    }
}

#[test]
fn eval_mirrors_row_to_file_with_modularity() {
    let dir = TempDir::new().unwrap();
    let json = dir.path().join("k.json").display().to_string();
    let out = mecm(&[
        "detect", "--graph", &data("karate_weighted.edges"), "--cmin", "2", "--cmax", "2",
        "--alpha", "1.5", "--delta", "100", "--eta", "0.9", "--gamma", "0.6", "--out", &json,
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));

    let metrics = dir.path().join("metrics.csv");
    let metrics_str = metrics.display().to_string();
    let out = mecm(&[
        "eval", "--pred", &json, "--ref", &data("karate.labels"), "--graph",
        &data("karate_weighted.edges"), "--out", &metrics_str,
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let stdout = String::from_utf8_lossy(&out.stdout).into_owned();
    let row = stdout.lines().nth(1).unwrap().to_string();
    assert!(row.starts_with("mecm,1,1,1,1,1,1,1,0,0.4"), "row: {row}");

    let mirrored = std::fs::read_to_string(&metrics).unwrap();
    assert!(mirrored.starts_with("# manifest: "));
    assert!(mirrored.ends_with(&format!("{row}\n")));
}

#[test]
fn generated_circle_files_reload() {
    let dir = TempDir::new().unwrap();
    let pts = dir.path().join("circ.csv").display().to_string();
    let labels = dir.path().join("circ.labels").display().to_string();
    let out = mecm(&[
        "generate", "circles", "--r", "30", "--centers", "0,0,30,30", "--n", "100", "--seed",
        "7", "--out", &pts, "--labels-out", &labels,
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let body = std::fs::read_to_string(&pts).unwrap();
    assert_eq!(body.lines().filter(|l| !l.starts_with('#')).count(), 200);
    let lab = std::fs::read_to_string(&labels).unwrap();
    assert_eq!(lab.lines().filter(|l| !l.starts_with('#')).count(), 201);
    assert!(lab.contains("1,1\n") && lab.contains("200,2\n"));
}
