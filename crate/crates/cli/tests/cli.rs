use std::path::PathBuf;
use std::process::{Command, Output};

fn qdchain(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdchain")).args(args).env("QDCHAIN_WORKERS", "1").output().expect("binary runs")
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qdchain-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(qdchain(&["--help"]).status.code(), Some(0));
    assert_eq!(qdchain(&["sweep", "--preset", "bogus", "--hgrid", "0.5"]).status.code(), Some(1));
    assert_eq!(qdchain(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(qdchain(&["derive", "--input", "/nonexistent/table.csv"]).status.code(), Some(1));

    // Far from h_f the discord curves never cross.
    let out = tmp("no_cross.csv");
    let o = qdchain(&[
        "sweep", "--preset", "xy", "--gamma", "0.7", "--family", "closed_form", "--rmax", "3", "--hgrid", "1.2:1.6:0.1",
        "--observables", "discord", "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(qdchain(&["detect", "factorization", "--input", out.to_str().unwrap()]).status.code(), Some(3));
}

#[test]
fn sweep_output_is_reproducible() {
    let args = [
        "sweep", "--preset", "ising", "--sites", "6", "--family", "thermal,broken", "--rmax", "2", "--hgrid", "0.5,1.0",
        "--hx", "1e-3",
    ];
    let a = qdchain(&args);
    let b = qdchain(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.starts_with("# config_sha256 = "));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 1 + 2 * 2 * 2);

    let json = qdchain(&[&args[..], &["--format", "json"]].concat());
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 8);
}

#[test]
fn config_file_and_flags_combine() {
    let cfg = tmp("sweep.conf");
    std::fs::write(&cfg, "# closed form only\npreset = xy\ngamma = 0.5\nfamily = closed_form\nrmax = 2\nhgrid = 0.8\n").unwrap();
    let o = qdchain(&["sweep", "--config", cfg.to_str().unwrap(), "--hgrid", "1.5"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("# config: hgrid = 1.5"), "{text}");

    std::fs::write(&cfg, "preset = xy\ngamma = 0.5\nhgrid = 0.8\nrmax = two\n").unwrap();
    let o = qdchain(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 4"));
}

#[test]
fn detect_and_derive_pipeline() {
    let out = tmp("cross.csv");
    let o = qdchain(&[
        "sweep", "--preset", "xy", "--gamma", "0.7", "--family", "closed_form", "--rmax", "3", "--hgrid", "0.6:0.8:0.005",
        "--observables", "discord", "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let o = qdchain(&["detect", "factorization", "--input", out.to_str().unwrap()]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let mean = v["mean"].as_f64().unwrap();
    assert!((mean - 0.51f64.sqrt()).abs() < 5e-3, "{mean}");
    assert_eq!(v["common"].as_array().unwrap().len(), 3);

    let o = qdchain(&["derive", "--input", out.to_str().unwrap(), "--r", "1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("family,n_sites,r,h,value,derivative,step"));
    assert_eq!(text.lines().count(), 1 + 41);

}

#[test]
fn fit_factorization_law_from_table() {
    let data = tmp("law.csv");
    let hf = 0.51f64.sqrt();
    let ratio = 0.3f64 / 1.7;
    let mut text = String::from("gamma,r,h,discord\n");
    for r in 1..=3 {
        for k in -4i32..=4 {
            let h = hf + 0.01 * k as f64;
            text.push_str(&format!("0.7,{r},{h},{}\n", 0.4 * (h - hf).powi(2) * ratio.powi(r)));
        }
    }
    std::fs::write(&data, text).unwrap();
    let fit = qdchain(&["fit", "--input", data.to_str().unwrap(), "--model", "quadratic_factorization", "--format", "json"]);
    assert!(fit.status.success(), "{}", String::from_utf8_lossy(&fit.stderr));
    let v: serde_json::Value = serde_json::from_slice(&fit.stdout).unwrap();
    let c: Vec<f64> = v["coefficients"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert!((c[0] - 0.4).abs() < 1e-8 && (c[1] - 2.0).abs() < 1e-8 && (c[2] - ratio).abs() < 1e-8, "{c:?}");
}

#[test]
fn fit_generic_table() {
    let data = tmp("loglin.csv");
    let mut text = String::from("# synthetic\nn_sites,value\n");
    for n in [8, 16, 32, 64, 128] {
        text.push_str(&format!("{n},{}\n", -0.29161 * (n as f64).ln() - 0.22471));
    }
    std::fs::write(&data, text).unwrap();
    let o = qdchain(&["fit", "--input", data.to_str().unwrap(), "--model", "log_linear", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let c = v["coefficients"].as_array().unwrap();
    let (a, b) = (c[0].as_f64().unwrap(), c[1].as_f64().unwrap());
    assert!((a + 0.22471).abs() < 1e-10 && (b + 0.29161).abs() < 1e-10, "{a} {b}");
    assert_eq!(qdchain(&["fit", "--input", data.to_str().unwrap(), "--model", "cubic"]).status.code(), Some(1));
}

#[test]
fn report_is_json() {
    let o = qdchain(&["report", "--preset", "xy", "--gamma", "0.7", "--family", "closed_form", "--rmax", "1", "--hgrid", "0.714", "--fast"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["factorizing_field"].as_f64().unwrap() - 0.51f64.sqrt()).abs() < 1e-12);
    assert_eq!(v["critical_field"].as_f64(), Some(1.0));
    assert_eq!(v["points"].as_array().unwrap().len(), 1);
}
