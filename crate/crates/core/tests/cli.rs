//! The command-line tool end to end: reproducibility, provenance and exit
//! codes.

use std::path::Path;
use std::process::{Command, Output};

fn zipf_urn(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_zipf-urn"));
    cmd.args(args);
    if let Some(t) = threads {
        cmd.env("ZIPF_URN_THREADS", t);
    }
    cmd.output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn simulate_is_reproducible_per_seed() {
    let run = |seed: &str| zipf_urn(&["simulate", "--theta", "0.6", "--n", "20000", "--seed", seed], None).stdout;
    let a = run("3");
    assert!(a.starts_with(b"urn_index,count\n"));
    assert_eq!(a, run("3"));
    assert_ne!(a, run("4"));
}

#[test]
fn study_output_does_not_depend_on_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, threads: &str| {
        let out = dir.path().join(name);
        let o = zipf_urn(
            &["study-normality", "--theta", "0.6", "--n", "5000", "-m", "120", "--format", "csv", "--output", path(&out)],
            Some(threads),
        );
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        out
    };
    let one = run("one.csv", "1");
    let two = run("two.csv", "3");
    assert_eq!(std::fs::read(&one).unwrap(), std::fs::read(&two).unwrap());

    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("one.csv.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "study-normality");
    assert_eq!(manifest["config"]["replications"], 120);
    assert_eq!(manifest["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn covariance_study_writes_rows_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cov.csv");
    let o = zipf_urn(
        &["study-covariance", "--theta", "0.5", "--n", "2000", "-m", "200", "--grid", "1", "--format", "csv", "--output", path(&out)],
        None,
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    // header plus c_00, c_01, c_11 at (1, 1)
    assert_eq!(text.lines().count(), 4);
    assert!(dir.path().join("cov.csv.manifest.json").exists());
}

#[test]
fn estimate_from_text_and_counts_agree() {
    let dir = tempfile::tempdir().unwrap();
    let text = dir.path().join("corpus.txt");
    std::fs::write(&text, "the cat and the dog and the bird saw a cat\n".repeat(3)).unwrap();
    let counts = dir.path().join("counts.csv");
    std::fs::write(&counts, "token,count\nthe,9\nand,6\ncat,6\ndog,3\nbird,3\nsaw,3\na,3\n").unwrap();
    let a = zipf_urn(&["estimate", "--text", path(&text), "--estimators", "ratio-r1,log-ratio"], None);
    let b = zipf_urn(&["estimate", "--counts", path(&counts), "--estimators", "ratio-r1,log-ratio"], None);
    assert!(a.status.success() && b.status.success());
    let ja: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    let jb: serde_json::Value = serde_json::from_slice(&b.stdout).unwrap();
    assert_eq!(ja["snapshot"], jb["snapshot"]);
    assert_eq!(ja["estimates"], jb["estimates"]);
}

#[test]
fn eval_asymptotics_reports_published_and_indicator_variances() {
    let o = zipf_urn(&["eval-asymptotics", "--theta", "0.5"], None);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().any(|l| l == "sigma0_sq,,0.8687184335"));
    assert!(text.lines().any(|l| l == "sigma0_sq_indicator,,0.1616116524"));
    assert!(text.lines().any(|l| l == "sigma_k_sq,1,1.172660196"));
}

#[test]
fn exit_codes_separate_usage_from_data_errors() {
    assert_eq!(zipf_urn(&["estimate"], None).status.code(), Some(2));
    assert_eq!(zipf_urn(&["simulate", "--n", "10", "--theta", "1.5"], None).status.code(), Some(2));
    assert_eq!(zipf_urn(&["estimate", "--occupancy", "/nonexistent/counts.csv"], None).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "urn_index,count\n1,0\n").unwrap();
    let o = zipf_urn(&["estimate", "--occupancy", path(&bad)], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    let o = zipf_urn(&["study-normality", "-m", "50", "--output", path(&dir.path().join("x.json"))], None);
    assert_eq!(o.status.code(), Some(2));
}
