use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn fup_lab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fup-lab"))
        .args(args)
        .current_dir(dir)
        .env_remove("FUP_LAB_THREADS")
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn fup_scan_writes_csv_fit_and_manifest() {
    let d = tempfile::tempdir().unwrap();
    let o = fup_lab(d.path(), &["fup-scan", "--cantor", "3:0,2", "--kmin", "2", "--kmax", "8"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(d.path().join("scan.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("k,N,norm,log_ratio,cauchy_schwarz_bound,volume_bound"));
    let norms: Vec<f64> = lines.map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect();
    assert_eq!(norms.len(), 7);
    assert!(norms.windows(2).all(|w| w[1] < w[0]));
    let m = json(&d.path().join("manifest.json"));
    assert_eq!(m["command"], "fup-scan");
    assert_eq!(m["config"]["command"]["fup-scan"]["kmax"], 8);
    assert_eq!(m["passed"], true);
    assert!(m["results"]["beta_fit"].as_f64().unwrap() > 0.0);
    assert!(m["version"].is_string() && m["wall_time_s"].is_number());
    assert!(d.path().join("scan.fit.json").exists());
}

#[test]
fn bad_alphabet_is_a_config_error() {
    let d = tempfile::tempdir().unwrap();
    let o = fup_lab(d.path(), &["gen", "cantor", "--base", "3", "--alphabet", "0,9", "--depth", "4"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("gen.cantor.alphabet"));
    let o = fup_lab(d.path(), &["fup-scan", "--cantor", "3:0,9"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("fup-scan.cantor.alphabet"));
}

#[test]
fn delta_out_of_range_is_a_config_error() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(
        fup_lab(d.path(), &["gen", "cantor", "--base", "3", "--alphabet", "0,2", "--depth", "4"]).status.code(),
        Some(0)
    );
    let o = fup_lab(d.path(), &["verify", "--set", "set.json", "--delta", "1.2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--delta"));
}

#[test]
fn verify_round_trip_and_assertion_failure() {
    let d = tempfile::tempdir().unwrap();
    fup_lab(d.path(), &["gen", "cantor", "--base", "3", "--alphabet", "0,2", "--depth", "5"]);
    let delta = (2f64.ln() / 3f64.ln()).to_string();
    let ok = fup_lab(d.path(), &["verify", "--set", "set.json", "--delta", &delta, "--cr", "2.4"]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(json(&d.path().join("certificate.json"))["verified"], true);
    // The measured upper ratio is 1, the lower about 1/2: C_R = 1.5 fails.
    let bad = fup_lab(d.path(), &["verify", "--set", "set.json", "--delta", &delta, "--cr", "1.5"]);
    assert_eq!(bad.status.code(), Some(1));
    assert_eq!(json(&d.path().join("manifest.json"))["passed"], false);
    let missing = fup_lab(d.path(), &["verify", "--set", "set.json"]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("verify.delta"));
}

#[test]
fn missing_input_file_is_a_config_error() {
    let d = tempfile::tempdir().unwrap();
    let o = fup_lab(d.path(), &["weight", "--y", "nope.json", "--delta", "0.6", "--cr", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("weight.y"));
}

#[test]
fn harmonic_output_is_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = [
        "harmonic", "check", "--domain", "slit-strip", "--r", "0.5", "--slit", "-1,0", "--t", "0.5", "--paths", "2e4",
        "--seed", "7", "--histogram", "hist.csv",
    ];
    let oa = fup_lab(a.path(), &args);
    let ob = fup_lab(b.path(), &args);
    assert_eq!(oa.status.code(), Some(0), "{}", String::from_utf8_lossy(&oa.stderr));
    assert_eq!(ob.status.code(), Some(0));
    for f in ["harmonic.json", "hist.csv"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    let h = json(&a.path().join("harmonic.json"));
    for key in ["estimates", "sigmas", "paper_bounds", "verdicts"] {
        assert!(h[key].is_object(), "{key}");
    }
    let m = json(&a.path().join("manifest.json"));
    assert_eq!(m["seeds"]["seed"], 7);
    assert!(m["seeds"]["substreams"]["harmonic.walk"].is_u64());
}

#[test]
fn outputs_do_not_depend_on_worker_count() {
    let dirs: Vec<_> = (0..2).map(|_| tempfile::tempdir().unwrap()).collect();
    for (d, threads) in dirs.iter().zip(["1", "3"]) {
        let o = Command::new(env!("CARGO_BIN_EXE_fup-lab"))
            .args(["fup-scan", "--cantor", "3:0,2", "--kmin", "2", "--kmax", "7"])
            .current_dir(d.path())
            .env("FUP_LAB_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0));
        assert_eq!(json(&d.path().join("manifest.json"))["threads"], threads.parse::<u64>().unwrap());
    }
    for f in ["scan.csv", "scan.fit.json"] {
        assert_eq!(fs::read(dirs[0].path().join(f)).unwrap(), fs::read(dirs[1].path().join(f)).unwrap());
    }
}

#[test]
fn iterate_emits_steps_with_bounds() {
    let d = tempfile::tempdir().unwrap();
    let o = fup_lab(
        d.path(),
        &["iterate", "--x", "cantor:3:0,2:5", "--y", "cantor:3:0,2:5", "--L", "3", "--T", "2", "--m", "3"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(d.path().join("steps.csv")).unwrap();
    assert!(csv.starts_with("m,norm,bound,bound_holds,ratio,step_cap,factor_norm\n"));
    assert!(csv.lines().count() >= 3);
    let r = json(&d.path().join("steps.json"));
    assert!(r["tau"].as_f64().unwrap() > 0.0);
}

#[test]
fn weight_and_uc_constant_report_bounds() {
    let d = tempfile::tempdir().unwrap();
    let o = fup_lab(d.path(), &["weight", "--y", "cantor:3:0,2:5", "--out", "w/weight.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let m = json(&d.path().join("w/manifest.json"));
    let r = &m["results"];
    assert!(r["log_integral"].as_f64().unwrap() <= r["paper_bounds"]["log_integral"].as_f64().unwrap());

    let o = fup_lab(d.path(), &["uc-constant", "--y", "cantor:3:0,2:4", "--c1", "0.25", "--out", "u/uc.json"]);
    assert_eq!(o.status.code(), Some(0));
    let c3 = json(&d.path().join("u/uc.json"))["constant"]["c3"].as_f64().unwrap();
    assert!(c3 > 0.0 && c3 <= 0.5);
}

#[test]
fn operator_norms_run() {
    let d = tempfile::tempdir().unwrap();
    let o = fup_lab(d.path(), &["hyperbolic-norm", "--synthetic", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let h = json(&d.path().join("hyperbolic.json"));
    assert!(h["norm"]["value"].as_f64().unwrap() > 0.0);

    let h = (1.0f64 / 27.0).to_string();
    let o = fup_lab(d.path(), &["phase-norm", "--x", "cantor:3:0,2:3", "--y", "cantor:3:0,2:3", "--h", &h]);
    assert_eq!(o.status.code(), Some(0));
    let p = json(&d.path().join("phase.json"));
    assert_eq!(p["dft_reference"]["n"], 27);

    let o = fup_lab(d.path(), &["phase-norm", "--x", "cantor:3:0,2:3", "--y", "cantor:3:0,2:3", "--h", &h, "--nodes-per-h", "2"]);
    assert_eq!(o.status.code(), Some(2));
}
