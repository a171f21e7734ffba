//! CLI end-to-end acceptance: the bundled fixture corpus verifies clean
//! and the reports are reproducible bit for bit under a fixed seed.

use std::path::PathBuf;
use std::process::Command;

fn fixtures() -> Vec<PathBuf> {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .canonicalize()
        .expect("fixtures directory");
    let mut out: Vec<PathBuf> = std::fs::read_dir(root)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().map(|x| x == "json").unwrap_or(false))
        .collect();
    out.sort();
    out
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_lpalg"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn criterion_13_cli_end_to_end() {
    let fixtures = fixtures();
    assert!(fixtures.len() >= 8, "fixture corpus present");
    let mut args: Vec<String> = vec!["verify".into()];
    args.push("--model".into());
    for f in &fixtures {
        args.push(f.display().to_string());
    }
    for extra in ["--suite", "all", "--seed", "7", "--jobs", "1"] {
        args.push(extra.into());
    }
    let argv: Vec<&str> = args.iter().map(|s| s.as_str()).collect();
    let (code1, out1, err1) = run(&argv);
    assert_eq!(code1, 0, "verify failed: {} {}", out1, err1);
    let (code2, out2, _) = run(&argv);
    assert_eq!(code2, 0);
    assert_eq!(out1, out2, "reports differ between identical runs");
    println!(
        "criterion 13: PASS — verify over {} fixtures exits 0 and reproduces bit-for-bit under --seed 7 --jobs 1",
        fixtures.len()
    );
}

#[test]
fn exit_codes_schema_and_check_failures() {
    let dir = std::env::temp_dir().join("lpalg-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let bad_schema = dir.join("bad_schema.json");
    std::fs::write(
        &bad_schema,
        r#"{ "kind": "graph", "vertices": 2, "edges": [[0, 7]] }"#,
    )
    .unwrap();
    let (code, _, err) = run(&["verify", "--model", bad_schema.to_str().unwrap()]);
    assert_eq!(code, 2, "schema errors exit 2: {err}");

    let bad_cocycle = dir.join("bad_cocycle.json");
    std::fs::write(
        &bad_cocycle,
        r#"{ "kind": "groupoid", "groupoid": { "group": "Z2" }, "cocycle": { "values": [[1, 1, "2"]] } }"#,
    )
    .unwrap();
    let (code, out, _) = run(&["verify", "--model", bad_cocycle.to_str().unwrap()]);
    assert_eq!(code, 1, "axiom failures exit 1");
    assert!(out.contains("modulus"), "witness names the failing value: {out}");
}

#[test]
fn norm_rows_match_closed_forms() {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    let pair2 = root.join("pair2.json");
    let (code, out, _) = run(&[
        "norm",
        "--model",
        pair2.to_str().unwrap(),
        "--element",
        "ones",
        "--p",
        "1,2,inf",
        "--format",
        "json",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let rows = v["models"][0]["norms"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    for row in rows {
        assert_eq!(row["lower"], "2.000000000000e0");
        assert_eq!(row["upper"], "2.000000000000e0");
        assert_eq!(row["projective"], "4");
    }
    // delta element: every norm is 1
    let (code, out, _) = run(&[
        "norm",
        "--model",
        pair2.to_str().unwrap(),
        "--element",
        "delta:1",
        "--p",
        "1,2,inf",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    for row in v["models"][0]["norms"].as_array().unwrap() {
        assert_eq!(row["lower"], "1.000000000000e0");
        assert_eq!(row["projective"], "1");
    }
}

#[test]
fn subcommands_cover_their_kinds() {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    for (cmd, fixture) in [
        ("rep", "pair3.json"),
        ("tight", "graph_twoedges.json"),
        ("tight", "semigroup_diamond.json"),
        ("graph", "graph_line.json"),
        ("crossprod", "partial_z2.json"),
    ] {
        let path = root.join(fixture);
        let (code, out, err) = run(&[cmd, "--model", path.to_str().unwrap()]);
        assert_eq!(code, 0, "{cmd} on {fixture}: {out} {err}");
    }
}
