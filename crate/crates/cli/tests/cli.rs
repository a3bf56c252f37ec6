use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn rtmix(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rtmix")).args(args).output().expect("binary runs")
}

fn out_dir(tmp: &TempDir, name: &str) -> String {
    tmp.path().join(name).to_str().unwrap().to_string()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn csv_rows(path: &Path) -> Vec<Vec<f64>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect()
}

#[test]
fn default_profile_spans_the_reference_zone() {
    let tmp = TempDir::new().unwrap();
    let dir = out_dir(&tmp, "p");
    let o = rtmix(&["profile", "--out", &dir]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary = json(&Path::new(&dir).join("summary.json"));
    let prof = &summary["profiles"][0];
    assert!((prof["lower_edge"].as_f64().unwrap() + 0.5).abs() < 1e-12);
    assert!((prof["upper_edge"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    let text = std::fs::read_to_string(Path::new(&dir).join("profile_00.csv")).unwrap();
    assert_eq!(text.lines().next().unwrap(), "x2,rho,u2,e,S11,S22,P,E_sub");
    let rows = csv_rows(&Path::new(&dir).join("profile_00.csv"));
    assert_eq!(rows.len(), 401);
    assert_eq!(rows[0][1], 0.25);
    assert_eq!(rows[400][1], 4.0);
    assert!(rows.iter().all(|r| r[2] <= 0.0));
}

#[test]
fn profiles_at_two_times_collapse_in_similarity_variable() {
    let tmp = TempDir::new().unwrap();
    let dir = out_dir(&tmp, "p");
    let o = rtmix(&["profile", "--t", "0.5,1.0", "--epsilon", "0.01", "--out", &dir]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let a = csv_rows(&Path::new(&dir).join("profile_00.csv"));
    let b = csv_rows(&Path::new(&dir).join("profile_01.csv"));
    assert_eq!(a.len(), b.len());
    for (ra, rb) in a.iter().zip(&b) {
        // ζ = 2x₂/(gt²) with g = 1
        assert!((2.0 * ra[0] / 0.25 - 2.0 * rb[0]).abs() < 1e-12);
        assert!((ra[1] - rb[1]).abs() < 1e-12 * rb[1]);
        assert!((2.0 * ra[2] - rb[2]).abs() < 1e-12 * (1.0 + rb[2].abs()));
    }
}

#[test]
fn perturbation_below_threshold_fails_cleanly() {
    let tmp = TempDir::new().unwrap();
    let dir = out_dir(&tmp, "p");
    let o = rtmix(&["profile", "--rho-minus", "1", "--rho-plus", "4", "--epsilon", "0.01", "--out", &dir]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("critical ratio"));
    assert!(!Path::new(&dir).exists());
}

#[test]
fn invalid_setups_are_rejected_before_work() {
    for args in [
        vec!["critical", "--rho-minus", "4", "--rho-plus", "1"],
        vec!["profile", "--g", "-1"],
        vec!["profile", "--t", "0.5,abc"],
        vec!["verify", "--suites", "nonsense"],
    ] {
        assert_eq!(rtmix(&args).status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let tmp = TempDir::new().unwrap();
    let cfg = tmp.path().join("run.cfg");
    std::fs::write(&cfg, "# heavier setup\nrho_minus = 1\nrho_plus = 16\nt = 1.0\n").unwrap();
    let dir = out_dir(&tmp, "p");
    let o = rtmix(&["profile", "--config", cfg.to_str().unwrap(), "--g", "2", "--out", &dir]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary = json(&Path::new(&dir).join("summary.json"));
    assert_eq!(summary["setup"]["rho_plus"], 16.0);
    assert_eq!(summary["setup"]["g"], 2.0);
    // (c₋, c₊) = (½(1 − ¼)·2, ½(4 − 1)·2)
    assert!((summary["profiles"][0]["lower_edge"].as_f64().unwrap() + 0.75).abs() < 1e-12);
    assert!((summary["profiles"][0]["upper_edge"].as_f64().unwrap() - 3.0).abs() < 1e-12);

    std::fs::write(&cfg, "density = 3\n").unwrap();
    assert_eq!(rtmix(&["critical", "--config", cfg.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn reruns_are_bit_identical() {
    let tmp = TempDir::new().unwrap();
    let (a, b) = (out_dir(&tmp, "a"), out_dir(&tmp, "b"));
    for dir in [&a, &b] {
        assert!(rtmix(&["profile", "--t", "0.7,1.4", "--epsilon", "0.01", "--out", dir]).status.success());
    }
    for f in ["profile_00.csv", "profile_01.csv", "summary.json"] {
        let x = std::fs::read(Path::new(&a).join(f)).unwrap();
        let y = std::fs::read(Path::new(&b).join(f)).unwrap();
        assert_eq!(x, y, "{f}");
    }
}

#[test]
fn hull_histogram_is_deterministic() {
    let run = || rtmix(&["hull", "--random", "1000", "--seed", "7"]);
    let (a, b) = (run(), run());
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    let total: u64 = v["histogram"].as_object().unwrap().values().map(|c| c.as_u64().unwrap()).sum();
    assert_eq!(total, 1000);
}

#[test]
fn critical_ratio_is_printed() {
    let o = rtmix(&["critical"]);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(o.status.success());
    assert!(text.contains("3.44151844"), "{text}");
    assert!(text.contains("11.844"));
    assert!(text.contains("0.8442"));
}

#[test]
fn energy_command_matches_closed_form() {
    let o = rtmix(&["energy", "--t", "1.0"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("3.515625"));
}

#[test]
fn verify_subset_passes() {
    let o = rtmix(&["verify", "--suites", "critical,endpoints,admissibility,energy,subsolution"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn full_verify_fails_only_on_wave_mass_stability() {
    let tmp = TempDir::new().unwrap();
    let dir = out_dir(&tmp, "v");
    let o = rtmix(&["verify", "--out", &dir]);
    assert_eq!(o.status.code(), Some(2));
    let report = json(&Path::new(&dir).join("report.json"));
    let mut failed = Vec::new();
    for suite in report["suites"].as_array().unwrap() {
        for c in suite["checks"].as_array().unwrap() {
            if !c["passed"].as_bool().unwrap() {
                failed.push(c["name"].as_str().unwrap().to_string());
            }
        }
    }
    assert_eq!(failed.len(), 3, "{failed:?}");
    assert!(failed.iter().all(|n| n.ends_with("L² ratio variation")), "{failed:?}");
}

#[test]
fn wave_command_writes_decay_table() {
    let tmp = TempDir::new().unwrap();
    let dir = out_dir(&tmp, "w");
    let o = rtmix(&["wave", "--N", "8,16", "--grid", "5", "--out", &dir]);
    assert!(o.status.success() || o.status.code() == Some(2), "{}", String::from_utf8_lossy(&o.stderr));
    let decay = std::fs::read_to_string(Path::new(&dir).join("decay.csv")).unwrap();
    assert_eq!(decay.lines().count(), 1 + 3 * 2, "{decay}");
    let field = std::fs::read_to_string(Path::new(&dir).join("wave_muskat.csv")).unwrap();
    assert_eq!(field.lines().next().unwrap(), "x1,x2,t,rho,v1,v2,u1,u2,S11,S12,P");
}
