use std::path::{Path, PathBuf};
use std::process::Command;

fn workdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("vortexlab-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(dir: &Path, sub: &str, config: &str, extra: &[&str]) -> (i32, String) {
    let cfg = dir.join("config.json");
    std::fs::write(&cfg, config).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_vortexlab"))
        .arg(sub)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .args(extra)
        .env_remove("VORTEXLAB_THREADS")
        .output()
        .unwrap();
    (out.status.code().unwrap(), String::from_utf8_lossy(&out.stderr).into_owned())
}

const TOY: &str = r#"{"dims": [2, 2], "model": {"kind": "toy"}, "beta": 0.6, "kappa": 0.4,
    "loop": {"corner": [0, 0], "axes": [0, 1], "extent": [1, 1]}"#;

#[test]
fn exit_codes_are_distinct() {
    let dir = workdir("codes");
    let (code, _) = run(&dir, "exact", &format!("{TOY}, \"seed\": 1}}"), &[]);
    assert_eq!(code, 0);
    let (code, err) = run(&dir, "exact", &format!("{TOY}, \"seed\": 1, \"sweeps\": 5}}"), &[]);
    assert_eq!(code, 2, "{err}");
    let (code, _) = run(&dir, "exact", &format!("{TOY}}}"), &[]);
    assert_eq!(code, 4);
    let big = r#"{"dims": [4, 4, 4], "model": {"kind": "toy"}, "beta": 1.0, "kappa": 1.0, "seed": 1}"#;
    let (code, err) = run(&dir, "exact", big, &[]);
    assert_eq!(code, 3, "{err}");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn seed_flag_and_outputs() {
    let dir = workdir("outputs");
    let cfg = format!(r#"{TOY}, "schedule": {{"burn_in": 10, "samples": 40, "thin": 1, "chains": 2}}}}"#);
    let (code, err) = run(&dir, "sample", &cfg, &["--seed", "5", "--threads", "2"]);
    assert_eq!(code, 0, "{err}");
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.join("out/sample.json")).unwrap()).unwrap();
    assert_eq!(report["config"]["seed"], 5);
    assert_eq!(report["tool"]["name"], "vortexlab");
    let csv = std::fs::read_to_string(dir.join("out/sample_series.csv")).unwrap();
    assert!(csv.starts_with("chain,sample,wilson_re,wilson_im,minimal_on_loop,energy\n"));
    assert_eq!(csv.lines().count(), 1 + 2 * 40);
    let meta: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.join("out/run_meta.json")).unwrap()).unwrap();
    assert_eq!(meta["threads"], 2);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn predict_wires_the_closed_forms() {
    let dir = workdir("predict");
    let cfg = r#"{"dims": [5, 5, 5, 5], "model": {"kind": "toy"}, "beta": 2.0, "kappa": 0.1, "seed": 2,
        "loop": {"corner": [0, 0, 2, 2], "axes": [0, 1], "extent": [4, 4]},
        "schedule": {"burn_in": 10, "samples": 20, "thin": 1, "chains": 1}}"#;
    let (code, err) = run(&dir, "predict", cfg, &[]);
    assert_eq!(code, 0, "{err}");
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.join("out/predict.json")).unwrap()).unwrap();
    let r = &report["results"];
    assert_eq!(r["loop_length"], 16);
    let phi = r["phi_minimal"].as_f64().unwrap();
    let lambda = r["lambda"].as_f64().unwrap();
    assert_eq!(lambda, 16.0 * phi);
    let expected = (-2.0 * lambda).exp();
    assert!((r["scalar_moment"][0].as_f64().unwrap() - expected).abs() < 1e-15);
    std::fs::remove_dir_all(&dir).unwrap();
}
