use std::f64::consts::FRAC_1_SQRT_2;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use envarkit::formats::StateFile;
use envarkit_core::BipartiteState;
use serde_json::Value;
use tempfile::TempDir;

fn envarkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_envarkit"))
        .args(args)
        .env_remove("ENVARKIT_SEED")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn report(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&o.stdout),
            String::from_utf8_lossy(&o.stderr)
        )
    })
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_state(dir: &Path, name: &str, psi: &BipartiteState) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, StateFile::from_state(psi).write()).unwrap();
    path
}

fn uneven() -> BipartiteState {
    BipartiteState::from_real_rows(
        &[vec![(1.0f64 / 3.0).sqrt(), 0.0], vec![0.0, (2.0f64 / 3.0).sqrt()]],
        false,
    )
    .unwrap()
}

struct Fixture {
    _dir: TempDir,
    bell: String,
    product: String,
    uneven: String,
    max4: String,
    root: PathBuf,
}

fn fixture() -> Fixture {
    let dir = TempDir::new().unwrap();
    let root = dir.path().to_path_buf();
    let s = |p: PathBuf| p.to_str().unwrap().to_string();
    Fixture {
        bell: s(write_state(&root, "bell.json", &BipartiteState::bell())),
        product: s(write_state(&root, "product.json", &BipartiteState::product_basis(2, 2, 0, 0))),
        uneven: s(write_state(&root, "uneven.json", &uneven())),
        max4: s(write_state(&root, "max4.json", &BipartiteState::maximally_entangled(4))),
        root,
        _dir: dir,
    }
}

#[test]
fn schmidt_of_bell_and_product() {
    let f = fixture();
    let o = envarkit(&["schmidt", &f.bell]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("0.7071067811865476"), "{text}");
    let r = report(&o);
    assert_eq!(r["lambda"], serde_json::json!([FRAC_1_SQRT_2, FRAC_1_SQRT_2]));
    assert_eq!(r["even"], true);
    assert_eq!(r["rank"], 2);

    let r = report(&envarkit(&["schmidt", &f.product]));
    assert_eq!(r["rank"], 1);
    assert_eq!(r["even"], true);
}

#[test]
fn malformed_and_unnormalized_input_exit_2() {
    let f = fixture();
    let bad = f.root.join("bad.json");
    std::fs::write(&bad, "{\"dim_s\": 2, \"amps\": [").unwrap();
    let o = envarkit(&["schmidt", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("ParseError"), "{}", stderr(&o));

    let loose = f.root.join("loose.json");
    std::fs::write(&loose, r#"{"dim_s": 1, "dim_e": 2, "amps": [[[1, 0], [1, 0]]]}"#).unwrap();
    let o = envarkit(&["schmidt", loose.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("NotNormalized"), "{}", stderr(&o));
    assert_eq!(code(&envarkit(&["schmidt", "--normalize", loose.to_str().unwrap()])), 0);

    let missing = f.root.join("missing.json");
    assert_eq!(code(&envarkit(&["schmidt", missing.to_str().unwrap()])), 2);
}

#[test]
fn envariance_verdicts() {
    let f = fixture();
    let o = envarkit(&["envariance", &f.bell, "swap:1,2"]);
    assert_eq!(code(&o), 0);
    let r = report(&o);
    assert_eq!(r["envariant"], true);
    assert!(r["residual"].as_f64().unwrap() <= 1e-9);
    assert!(r["oracle_residual"].as_f64().unwrap() <= 1e-9);
    assert!(r["counter"].is_array());

    let o = envarkit(&["envariance", &f.uneven, "swap:1,2"]);
    assert_eq!(code(&o), 1);
    let r = report(&o);
    assert_eq!(r["envariant"], false);
    assert!(r["counter"].is_null());
    let expected = (2.0 - 4.0 * 2f64.sqrt() / 3.0).sqrt();
    assert!((r["oracle_residual"].as_f64().unwrap() - expected).abs() <= 1e-12);

    let o = envarkit(&["envariance", &f.bell, "phase:0.7,-0.3"]);
    assert_eq!(code(&o), 0);
    assert_eq!(report(&o)["envariant"], true);

    let o = envarkit(&["envariance", &f.uneven, "phase:1.1"]);
    assert_eq!(report(&o)["envariant"], true);

    assert_eq!(code(&envarkit(&["envariance", &f.bell, "swap:1,3"])), 2);
    assert_eq!(code(&envarkit(&["envariance", &f.bell, "twist:1,2"])), 2);
}

#[test]
fn derivation_reports() {
    let f = fixture();
    let o = envarkit(&["derive", &f.bell]);
    assert_eq!(code(&o), 0);
    let r = report(&o);
    assert_eq!(r["probabilities"], serde_json::json!(["1/2", "1/2"]));
    assert_eq!(r["classes"].as_array().unwrap().len(), 1);
    let trace = r["trace"].as_array().unwrap();
    for rule in ["pairing", "env_locality", "sys_locality", "state_function"] {
        assert!(trace.iter().any(|m| m["rule"] == rule), "{rule} missing");
    }
    assert!(r["classes"][0]
        .as_array()
        .unwrap()
        .iter()
        .any(|t| t == "p(S:1; swapE(1,2)·swapS(1,2)·psi)"));

    let o = envarkit(&["derive", &f.bell, "--disable", "pairing"]);
    assert_eq!(code(&o), 1);
    let r = report(&o);
    assert!(r["probabilities"].is_null());
    assert_eq!(r["error"], "IncompleteDerivation");

    let r = report(&envarkit(&["derive", &f.max4]));
    assert_eq!(r["probabilities"], serde_json::json!(["1/4", "1/4", "1/4", "1/4"]));

    let r = report(&envarkit(&["derive", &f.max4, "--swaps", "1-2,1-3,1-4"]));
    assert_eq!(r["probabilities"], serde_json::json!(["1/4", "1/4", "1/4", "1/4"]));

    let o = envarkit(&["derive", &f.bell, "--ablate"]);
    assert_eq!(code(&o), 0);
    let runs = report(&o)["ablations"].as_array().unwrap().clone();
    assert_eq!(runs.len(), 4);
    assert!(runs.iter().all(|r| r["probabilities"].is_null()));

    let o = envarkit(&["derive", &f.uneven]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("UnevenCoefficients"));
    assert_eq!(code(&envarkit(&["derive", &f.bell, "--disable", "magic"])), 2);
}

#[test]
fn finegrain_reports() {
    let o = envarkit(&["finegrain", "1/3,2/3"]);
    assert_eq!(code(&o), 0);
    let r = report(&o);
    assert_eq!(r["probabilities"][0]["exact"], "1/3");
    assert_eq!(r["probabilities"][1]["exact"], "2/3");
    assert!((r["probabilities"][0]["decimal"].as_f64().unwrap() - 1.0 / 3.0).abs() <= 1e-15);
    assert!(r["derivation_merges"].as_u64().unwrap() > 0);
    assert!((r["schmidt_weights"][1].as_f64().unwrap() - 2.0 / 3.0).abs() <= 1e-9);

    let r = report(&envarkit(&["finegrain", "1/2,1/2"]));
    assert_eq!(r["probabilities"][0]["exact"], "1/2");
    assert_eq!(r["probabilities"][1]["exact"], "1/2");

    let r = report(&envarkit(&["finegrain", "5/8,3/8"]));
    assert_eq!(r["grain"], 8);

    let o = envarkit(&["finegrain", "1/3,1/3"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("WeightMismatch"), "{}", stderr(&o));
}

#[test]
fn gleason_audits() {
    let o = envarkit(&["gleason", "quadratic", "3", "1000"]);
    assert_eq!(code(&o), 0);
    assert_eq!(report(&o)["verdict"], "CONSISTENT");

    let o = envarkit(&["gleason", "power:4", "3", "1000"]);
    assert_eq!(code(&o), 1);
    let r = report(&o);
    assert_eq!(r["verdict"], "VIOLATED");
    assert!(r["max_dev"].as_f64().unwrap() >= 0.1);
    assert_eq!(r["kind"], "power:4");

    let o = envarkit(&["gleason", "quadratic", "2", "10"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("dimension greater than two"), "{}", stderr(&o));
}

#[test]
fn reports_are_deterministic() {
    let a = envarkit(&["gleason", "quadratic", "4", "50", "--seed", "17"]);
    let b = envarkit(&["gleason", "quadratic", "4", "50", "--seed", "17"]);
    assert_eq!(a.stdout, b.stdout);
    let c = envarkit(&["gleason", "quadratic", "4", "50", "--seed", "18"]);
    assert_ne!(a.stdout, c.stdout);

    let with_env = Command::new(env!("CARGO_BIN_EXE_envarkit"))
        .args(["gleason", "quadratic", "4", "50"])
        .env("ENVARKIT_SEED", "17")
        .output()
        .unwrap();
    assert_eq!(with_env.stdout, a.stdout);
    let flag_wins = Command::new(env!("CARGO_BIN_EXE_envarkit"))
        .args(["gleason", "quadratic", "4", "50", "--seed", "18"])
        .env("ENVARKIT_SEED", "17")
        .output()
        .unwrap();
    assert_eq!(flag_wins.stdout, c.stdout);

    let f = fixture();
    let x = envarkit(&["derive", &f.max4]);
    let y = envarkit(&["derive", &f.max4]);
    assert_eq!(x.stdout, y.stdout);
}

#[test]
fn out_flag_and_text_format() {
    let f = fixture();
    let path = f.root.join("report.json");
    let o = envarkit(&["schmidt", &f.bell, "--out", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let saved: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(saved["rank"], 2);

    let o = envarkit(&["schmidt", &f.bell, "--format", "text"]);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("even: true"), "{text}");
    assert!(text.contains("rank: 2"), "{text}");
}

#[test]
fn state_files_round_trip_through_the_cli() {
    let f = fixture();
    let path = f.root.join("random.json");
    let o = envarkit(&["state", "random:3,2", "--seed", "4", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(&path).unwrap();
    let psi = StateFile::parse(&text).unwrap().to_state(false).unwrap();
    assert_eq!(StateFile::from_state(&psi).write(), text);
    let r = report(&envarkit(&["schmidt", path.to_str().unwrap()]));
    assert_eq!(r["rank"], 2);
    assert_eq!(r["even"], false);
}

#[test]
fn tolerance_override() {
    let f = fixture();
    let r = report(&envarkit(&["schmidt", &f.uneven, "--tol", "0.5"]));
    assert_eq!(r["even"], true);
    let o = envarkit(&["gleason", "power:4", "3", "100", "--tol", "10"]);
    assert_eq!(code(&o), 0);
    assert_eq!(code(&envarkit(&["schmidt", &f.bell, "--tol", "-1"])), 2);
}
