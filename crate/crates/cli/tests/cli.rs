use std::path::Path;
use std::process::{Command, Output};

fn blowup(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blowup")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn write_config(dir: &Path, eps: &str, output: &Path) -> std::path::PathBuf {
    let path = dir.join("sweep.toml");
    let text = format!(
        r#"
eps_list = [{eps}]
refinement_levels = 2
output = "{}"

[base]
n = 1
p = 2.0
t_max = 60.0
trace_stride = 100
"#,
        output.display()
    );
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn exponents_text_and_json() {
    let out = blowup(&["exponents", "--n", "3"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("p_0(n)   2.414213562373095"));
    let v = json(&blowup(&["exponents", "--n", "3", "--format", "json"]));
    assert!((v["p0"].as_f64().unwrap() - (1.0 + 2f64.sqrt())).abs() < 1e-12);
    assert_eq!(v["law_nonzero_moment"]["case_tag"], "critical");
}

#[test]
fn exponents_above_the_strauss_exponent() {
    let v = json(&blowup(&["exponents", "--n", "3", "--p", "3", "--format", "json"]));
    assert_eq!(v["global_existence"], true);
    assert!(v["law_nonzero_moment"].is_null());
}

#[test]
fn verify_step_passes_on_default_samples() {
    let out = blowup(&["verify-step", "--n", "3", "--j", "2"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&blowup(&["verify-step", "--n", "2", "--j", "2", "--format", "json"]));
    assert_eq!(v["status"], "passed");
    assert_eq!(v["points"].as_array().unwrap().len(), 5);
}

#[test]
fn random_samples_are_reproducible() {
    let args = ["verify-step", "--n", "3", "--j", "1", "--samples", "4", "--seed", "11", "--format", "json"];
    let a = blowup(&args);
    let b = blowup(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let c = blowup(&["verify-step", "--n", "3", "--j", "1", "--samples", "4", "--seed", "12", "--format", "json"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(code(&blowup(&["fit", "--input", "missing.jsonl", "--model", "power"])), 64);
    let out = blowup(&["exponents", "--n", "3", "--bogus"]);
    assert_eq!(code(&out), 64);
    assert!(String::from_utf8_lossy(&out.stderr).contains("--bogus"));
    assert_eq!(code(&blowup(&["verify-step", "--n", "3", "--j", "1", "--samples", "2"])), 64);
    assert_eq!(code(&blowup(&["bound", "--n", "3", "--m", "1", "--delta", "0.05"])), 64);
    assert_eq!(code(&blowup(&["simulate", "--n", "4", "--p", "2", "--eps", "1"])), 64);
    assert_eq!(code(&blowup(&[])), 64);
    assert_eq!(code(&blowup(&["--help"])), 0);
}

#[test]
fn bound_reports_constants() {
    let v = json(&blowup(&["bound", "--n", "3", "--m", "1e-3", "--format", "json"]));
    let eps0 = v["eps_zero"].as_f64().unwrap();
    assert!(eps0 > 0.0);
    let v = json(&blowup(&["bound", "--n", "3", "--m", "1e-3", "--eps", &eps0.to_string(), "--format", "json"]));
    let k = v["constants"]["k"].as_f64().unwrap();
    let b = v["bound"]["bound"].as_f64().unwrap();
    assert!((b - 16.0 * k * k).abs() < 1e-8 * b);
    assert_eq!(v["m_source"], "given");
}

#[test]
fn simulate_emits_a_record_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    let out = blowup(&[
        "simulate",
        "--n",
        "1",
        "--p",
        "2",
        "--eps",
        "0.4",
        "--tmax",
        "50",
        "--format",
        "json",
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["blew_up"], true);
    assert!(v["t_h"].as_f64().unwrap() < 50.0);
    let csv = std::fs::read_to_string(&trace).unwrap();
    assert!(csv.starts_with("t,max_abs_u\n0,0\n"));
}

#[test]
fn sweep_then_fit() {
    let dir = tempfile::tempdir().unwrap();
    let records = dir.path().join("records.jsonl");
    let config = write_config(dir.path(), "0.4, 0.3, 0.2, 0.15", &records);
    let a = blowup(&["sweep", "--config", config.to_str().unwrap(), "--quiet", "--format", "json"]);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    assert!(a.stderr.is_empty());
    assert_eq!(json(&a)["entries"].as_array().unwrap().len(), 4);

    let csv = dir.path().join("points.csv");
    let fit = blowup(&[
        "fit",
        "--input",
        records.to_str().unwrap(),
        "--model",
        "power",
        "--format",
        "json",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&fit), 0, "{}", String::from_utf8_lossy(&fit.stdout));
    let v = json(&fit);
    assert_eq!(v["predicted"], 0.5);
    assert_eq!(v["verdict"], "pass");
    assert!(std::fs::read_to_string(&csv).unwrap().starts_with("eps,T_h,uncertainty\n0.4,"));

    // Same prediction given explicitly; a wrong one fails the verdict.
    let explicit =
        blowup(&["fit", "--input", records.to_str().unwrap(), "--model", "power", "--predicted-from", "1,2,1"]);
    assert_eq!(code(&explicit), 0);
    let wrong = blowup(&["fit", "--input", records.to_str().unwrap(), "--model", "power", "--predicted-from", "1,2,0"]);
    assert_eq!(code(&wrong), 1);
}

#[test]
fn sweep_stdout_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "0.4, 0.3", &dir.path().join("records.jsonl"));
    let args = ["sweep", "--config", config.to_str().unwrap(), "--format", "json", "--quiet"];
    let a = blowup(&args);
    let b = blowup(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn fit_with_too_few_points_is_inconclusive() {
    let dir = tempfile::tempdir().unwrap();
    let records = dir.path().join("records.jsonl");
    let config = write_config(dir.path(), "0.4, 0.3", &records);
    assert_eq!(code(&blowup(&["sweep", "--config", config.to_str().unwrap(), "--quiet"])), 0);
    assert_eq!(code(&blowup(&["fit", "--input", records.to_str().unwrap(), "--model", "power"])), 2);
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sweep.toml");
    std::fs::write(&config, "eps_list = [0.4]\n[base]\nn = 1\np = 2.0\nt_max = 30.0\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_blowup"))
        .args(["sweep", "--config", config.to_str().unwrap(), "--quiet"])
        .env("BLOWUP_OUTPUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert!(dir.path().join("sweep.jsonl").is_file());
}
