use std::fs;
use std::path::Path;
use std::process::Command;

fn suplab(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_suplab"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn run_with(sub: &str, doc: &str, dir: &Path, seed: &str) -> (i32, String) {
    let cfg = dir.join("study.toml");
    fs::write(&cfg, doc).unwrap();
    let out = dir.join("out");
    suplab(&[
        sub,
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--seed",
        seed,
    ])
}

const SMALL_VERIFY: &str = "[mesh]\ncells = 32\n[study]\nnorm_instances = 40\ninequality_instances = 12\njensen_trials = 300\ncontract_trials = 200\n";

#[test]
fn verify_writes_a_passing_report() {
    let dir = tempfile::tempdir().unwrap();
    let (code, err) = run_with("verify", SMALL_VERIFY, dir.path(), "5");
    assert_eq!(code, 0, "{err}");
    let text = fs::read_to_string(dir.path().join("out/verify.csv")).unwrap();
    let mut lines = text.lines();
    let comment = lines.next().unwrap();
    assert!(comment.starts_with("# config_hash=") && comment.ends_with(" seed=5"));
    assert_eq!(
        lines.next().unwrap(),
        "suite,relation,instances,failures,min_slack,expect,pass,detail"
    );
    assert!(text.contains("jensen/distance_to_sphere"));
    let manifest = fs::read_to_string(dir.path().join("out/manifest.csv")).unwrap();
    assert!(manifest.contains("verify.csv,"));
}

#[test]
fn unknown_key_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let (code, err) = run_with("norms", "[mesh]\ncels = 10\n", dir.path(), "1");
    assert_eq!(code, 2);
    assert!(err.contains("mesh.cels"), "{err}");
    assert!(!dir.path().join("out").exists());
}

#[test]
fn contract_failures_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let (code, err) = run_with("gamma-study", "[exponents]\nbeta = 0.5\n", dir.path(), "1");
    assert_eq!(code, 2);
    assert!(err.contains("pn2"), "{err}");

    let doc = "[density]\ncoefficient = \"inverse_linear\"\nalpha = 0.9\n";
    let (code, err) = run_with("gamma-study", doc, dir.path(), "1");
    assert_eq!(code, 2);
    assert!(err.contains("H2 growth") && err.contains("cell"), "{err}");
}

#[test]
fn kind_must_match_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let (code, err) = run_with("norms", "[study]\nkind = \"norm_gamma\"\n", dir.path(), "1");
    assert_eq!(code, 2);
    assert!(err.contains("study.kind"), "{err}");
}

#[test]
fn dichotomy_band_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let (code, err) = run_with("dichotomy", "[study]\nprobe_scale = 1.05\n", dir.path(), "1");
    assert_eq!(code, 2);
    assert!(err.contains("ill-posed"), "{err}");
}

#[test]
fn divergence_sentinel_run_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let doc = "[mesh]\ncells = 50\n[exponents]\nschedule = [10, 20, 30]\n[study]\nprobe_scale = 2.0\n";
    let (code, err) = run_with("dichotomy", doc, dir.path(), "1");
    assert_eq!(code, 0, "{err}");
}

#[test]
fn failing_verdict_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    // 2^30/30 stays below the divergence threshold under p_n = n.
    let doc = "[mesh]\ncells = 50\n[exponents]\nprofile = \"constant\"\nschedule = [10, 20, 30]\n[study]\nprobe_scale = 2.0\n";
    let (code, err) = run_with("dichotomy", doc, dir.path(), "1");
    assert_eq!(code, 1, "{err}");
    let verdicts = fs::read_to_string(dir.path().join("out/dichotomy_verdicts.csv")).unwrap();
    assert!(verdicts.contains("diverges,false"));
}

#[test]
fn identical_runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let doc = "[mesh]\ncells = 40\n[exponents]\nschedule = [4, 8, 16]\n";
    assert_eq!(run_with("gamma-study", doc, a.path(), "9").0, 0);
    assert_eq!(run_with("gamma-study", doc, b.path(), "9").0, 0);
    for f in ["gamma_study.csv", "gamma_study_verdicts.csv", "solver_trace.csv", "manifest.csv"] {
        let x = fs::read(a.path().join("out").join(f)).unwrap();
        let y = fs::read(b.path().join("out").join(f)).unwrap();
        assert_eq!(x, y, "{f}");
    }
    let leftovers: Vec<_> = fs::read_dir(a.path().join("out"))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(".tmp"))
        .collect();
    assert!(leftovers.is_empty(), "{leftovers:?}");
}

#[test]
fn seed_changes_the_verify_report() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert_eq!(run_with("verify", SMALL_VERIFY, a.path(), "1").0, 0);
    assert_eq!(run_with("verify", SMALL_VERIFY, b.path(), "2").0, 0);
    let x = fs::read(a.path().join("out/verify.csv")).unwrap();
    let y = fs::read(b.path().join("out/verify.csv")).unwrap();
    assert_ne!(x, y);
}

#[test]
fn missing_config_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let (code, err) = suplab(&["norms", "--config", "/nonexistent.toml", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("io"), "{err}");
}
