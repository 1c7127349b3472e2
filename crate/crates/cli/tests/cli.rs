//! End-to-end tests of the `formreg` binary: exit codes, file formats, and
//! the regularize → verify report cycle.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_formreg"))
}

fn write(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

#[test]
fn regularize_zero_matrix_text_summary() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "zero.mat", "real exact 3 3\n0 0 0\n0 0 0\n0 0 0\n");
    let out = bin().arg("regularize").arg(&input).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("blocks: 1, 1, 1"), "{text}");
    assert!(text.contains("regular part: 0x0"), "{text}");
    assert!(text.contains("m-sequence: 3, 0"), "{text}");
}

#[test]
fn regularize_jordan_three_reports_expected_structure() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "j3.mat", "real exact 3 3\n0 1 0\n0 0 1\n0 0 0\n");
    let out = bin().arg("regularize").arg(&input).arg("--json").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["blocks"], serde_json::json!([3]));
    assert_eq!(report["m_sequence"], serde_json::json!([1, 1, 1, 0]));
    assert_eq!(report["schema"], serde_json::json!(1));
}

#[test]
fn regularize_identity_keeps_input_as_regular_part() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "id.mat", "real exact 2 2\n1 0\n0 1\n");
    let out = bin().arg("regularize").arg(&input).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("blocks: (empty)"), "{text}");
    assert!(text.contains("regular part: 2x2"), "{text}");
}

#[test]
fn regularize_near_singular_float_exits_ill_conditioned() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "near.mat", "real float 2 2\n1 0\n0 1e-7\n");
    let out = bin().arg("regularize").arg(&input).output().unwrap();
    assert_eq!(out.status.code(), Some(2), "{}", stdout(&out));
    assert!(stdout(&out).contains("ill-conditioned"));
}

#[test]
fn regularize_rejects_sesquilinear_over_reals() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "r.mat", "real exact 1 1\n1\n");
    let out = bin()
        .arg("regularize")
        .arg(&input)
        .args(["--form", "sesquilinear"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("invalid form"));
}

#[test]
fn regularize_backend_override_converts_exact_to_float() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "q.mat", "real exact 2 2\n0 1/2\n0 0\n");
    let out = bin()
        .arg("regularize")
        .arg(&input)
        .args(["--backend", "float", "--json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["arithmetic"], "float");
    assert_eq!(report["blocks"], serde_json::json!([2]));
}

#[test]
fn compare_distinguishes_zero_from_jordan() {
    let dir = tempfile::tempdir().unwrap();
    let zero = write(dir.path(), "z2.mat", "real exact 2 2\n0 0\n0 0\n");
    let j2 = write(dir.path(), "j2.mat", "real exact 2 2\n0 1\n0 0\n");
    let out = bin().arg("compare").arg(&zero).arg(&j2).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(stdout(&out).contains("singular summands differ"), "{}", stdout(&out));
}

#[test]
fn compare_identical_files_is_equivalent() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.mat", "complex exact 2 2\n1+1i 0\n0 2\n");
    let out = bin()
        .arg("compare")
        .arg(&a)
        .arg(&a)
        .args(["--form", "sesquilinear"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("equivalent"));
}

#[test]
fn compare_with_witness_upgrades_to_equivalent() {
    let dir = tempfile::tempdir().unwrap();
    let one = write(dir.path(), "one.mat", "real exact 1 1\n1\n");
    let four = write(dir.path(), "four.mat", "real exact 1 1\n4\n");
    let two = write(dir.path(), "two.mat", "real exact 1 1\n2\n");

    let out = bin().arg("compare").arg(&one).arg(&four).output().unwrap();
    assert_eq!(out.status.code(), Some(4), "{}", stdout(&out));
    assert!(stdout(&out).contains("reduced to regular parts"));

    let out = bin()
        .arg("compare")
        .arg(&one)
        .arg(&four)
        .args(["--witness"])
        .arg(&two)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("equivalent"));
}

#[test]
fn compare_rejects_mixed_specs() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.mat", "real exact 1 1\n1\n");
    let b = write(dir.path(), "b.mat", "complex exact 1 1\n1\n");
    let out = bin().arg("compare").arg(&a).arg(&b).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("mixed scalar specs"));
}

#[test]
fn synthesize_writes_jordan_block_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("instance.mat");
    let out = bin()
        .args(["synthesize", "--regular-size", "0", "--blocks", "2", "--scramble", "none"])
        .arg("--out")
        .arg(&out_path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let contents = std::fs::read_to_string(&out_path).unwrap();
    assert_eq!(contents, "real exact 2 2\n0 1\n0 0\n");
    let sidecar: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(format!("{}.truth.json", out_path.display())).unwrap())
            .unwrap();
    assert_eq!(sidecar["generator"], "chacha12");
    assert_eq!(sidecar["blocks"], serde_json::json!([2]));
    assert_eq!(sidecar["m_sequence"], serde_json::json!([1, 1]));
}

#[test]
fn synthesize_three_ones_is_the_zero_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("z3.mat");
    let out = bin()
        .args(["synthesize", "--regular-size", "0", "--blocks", "1,1,1", "--scramble", "none"])
        .arg("--out")
        .arg(&out_path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        std::fs::read_to_string(&out_path).unwrap(),
        "real exact 3 3\n0 0 0\n0 0 0\n0 0 0\n"
    );
}

#[test]
fn synthesize_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "synthesize",
        "--regular-size",
        "2",
        "--blocks",
        "2,1",
        "--scramble",
        "general",
        "--seed",
        "17",
    ];
    let p1 = dir.path().join("one.mat");
    let p2 = dir.path().join("two.mat");
    assert_eq!(bin().args(args).arg("--out").arg(&p1).output().unwrap().status.code(), Some(0));
    assert_eq!(bin().args(args).arg("--out").arg(&p2).output().unwrap().status.code(), Some(0));
    assert_eq!(
        std::fs::read(&p1).unwrap(),
        std::fs::read(&p2).unwrap(),
        "same seed must give byte-identical instances"
    );
}

#[test]
fn synthesize_env_seed_overrides_flag() {
    let dir = tempfile::tempdir().unwrap();
    let flag_seed = dir.path().join("flag.mat");
    let env_seed = dir.path().join("env.mat");
    let base = [
        "synthesize",
        "--regular-size",
        "2",
        "--blocks",
        "1",
        "--scramble",
        "general",
        "--seed",
        "1",
    ];
    bin().args(base).arg("--out").arg(&flag_seed).output().unwrap();
    bin()
        .args(base)
        .arg("--out")
        .arg(&env_seed)
        .env("FORMREG_SEED", "2")
        .output()
        .unwrap();
    assert_ne!(std::fs::read(&flag_seed).unwrap(), std::fs::read(&env_seed).unwrap());
    let sidecar: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(format!("{}.truth.json", env_seed.display())).unwrap(),
    )
    .unwrap();
    assert_eq!(sidecar["seed"], serde_json::json!(2));
}

#[test]
fn synthesize_unitary_scramble_requires_float() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("u.mat");
    let out = bin()
        .args(["synthesize", "--blocks", "2", "--scramble", "unitary", "--arithmetic", "exact"])
        .arg("--out")
        .arg(&out_path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("unsupported"));
}

#[test]
fn verify_accepts_fresh_report_and_rejects_wrong_input() {
    let dir = tempfile::tempdir().unwrap();
    let j3 = write(dir.path(), "j3.mat", "real exact 3 3\n0 1 0\n0 0 1\n0 0 0\n");
    let other = write(dir.path(), "other.mat", "real exact 3 3\n1 0 0\n0 1 0\n0 0 1\n");
    let report = dir.path().join("report.json");

    let out = bin()
        .arg("regularize")
        .arg(&j3)
        .arg("--out")
        .arg(&report)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));

    let out = bin().arg("verify").arg(&j3).arg(&report).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("verification passed"));

    let out = bin().arg("verify").arg(&other).arg(&report).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("wrong input for this report"));
}

#[test]
fn verify_names_monotonicity_on_forged_m_sequence() {
    let dir = tempfile::tempdir().unwrap();
    let j3 = write(dir.path(), "j3.mat", "real exact 3 3\n0 1 0\n0 0 1\n0 0 0\n");
    let report_path = dir.path().join("report.json");
    bin()
        .arg("regularize")
        .arg(&j3)
        .arg("--out")
        .arg(&report_path)
        .output()
        .unwrap();

    let mut report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    report["trace"]["steps"][0]["m1"] = serde_json::json!(1);
    report["trace"]["steps"][0]["m2"] = serde_json::json!(2);
    std::fs::write(&report_path, serde_json::to_string_pretty(&report).unwrap()).unwrap();

    let out = bin().arg("verify").arg(&j3).arg(&report_path).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("m-monotonicity"), "{}", stdout(&out));
}

#[test]
fn report_round_trips_through_files_for_float_complex() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(
        dir.path(),
        "c.mat",
        "complex float 2 2\n0 1\n0+1i 0\n",
    );
    let report = dir.path().join("report.json");
    let out = bin()
        .arg("regularize")
        .arg(&input)
        .args(["--form", "sesquilinear"])
        .arg("--out")
        .arg(&report)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let out = bin().arg("verify").arg(&input).arg(&report).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
}

#[test]
fn synthesized_instances_regularize_back_to_their_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let instance = dir.path().join("inst.mat");
    bin()
        .args([
            "synthesize",
            "--regular-size",
            "2",
            "--blocks",
            "3,1",
            "--scramble",
            "general",
            "--seed",
            "11",
        ])
        .arg("--out")
        .arg(&instance)
        .output()
        .unwrap();
    let out = bin().arg("regularize").arg(&instance).arg("--json").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let sidecar: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(format!("{}.truth.json", instance.display())).unwrap(),
    )
    .unwrap();
    assert_eq!(report["blocks"], sidecar["blocks"]);
    assert_eq!(report["m_sequence"], sidecar["m_sequence"]);
}
