use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use rtmix_core::planewave::{build_wave, decay_study, WaveTestFunction, WaveVerifyOptions, DEFAULT_EPS};
use rtmix_core::relaxation::{membership, Region, K_TOL};
use rtmix_core::subsolution::admissibility::{critical_ratio, energy_conversion, energy_margin_predicted};
use rtmix_core::subsolution::verify::energy_margin;
use rtmix_core::subsolution::{
    admissibility_i, find_admissible_perturbation, PerturbationProfile, Subsolution, SubsolutionProfile,
};
use rtmix_core::suites::{hull_sample, run_suite, wave_directions, SuiteConfig, SuiteReport, SUITE_NAMES};
use rtmix_core::FluidSetup;

use crate::config::{parse_list, RunConfig};
use crate::output::{csv_line, Outputs};
use crate::EXIT_VERIFICATION;

const DEFAULT_OUT: &str = "rtmix_out";

fn out_dir(cfg: &RunConfig) -> PathBuf {
    cfg.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

fn setup_json(s: &FluidSetup) -> Value {
    json!({
        "rho_minus": s.rho_minus,
        "rho_plus": s.rho_plus,
        "g": s.g,
        "n": s.n,
        "atwood": s.atwood(),
        "ratio_r": s.ratio_r(),
        "t_ref": s.t_ref(),
    })
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

/// The unperturbed profile for `ε = 0`, otherwise the searched perturbation
/// shape at the requested `ε`.
fn build_profile(cfg: &RunConfig) -> Result<PerturbationProfile> {
    let s = &cfg.setup;
    if cfg.epsilon == 0.0 {
        return Ok(PerturbationProfile::unperturbed(s));
    }
    let shape = find_admissible_perturbation(s)?;
    Ok(shape.with_epsilon(cfg.epsilon))
}

fn initial_slice(sub: &Subsolution, grid: usize) -> SubsolutionProfile {
    let rows = (0..grid).map(|i| sub.point(-1.0 + 2.0 * i as f64 / (grid - 1) as f64, 0.0)).collect();
    SubsolutionProfile {
        setup: *sub.setup(),
        profile: sub.profile().clone(),
        t: 0.0,
        zeta_minus: sub.fan.zeta_minus,
        zeta_plus: sub.fan.zeta_plus,
        rows,
    }
}

pub fn profile(cfg: &RunConfig) -> Result<u8> {
    let s = cfg.setup;
    if s.n != 2 {
        bail!("profiles are constructed for n = 2, got n = {}", s.n);
    }
    let grid = cfg.grid.unwrap_or(401);
    let times = if cfg.times.is_empty() { vec![s.t_ref()] } else { cfg.times.clone() };
    let p = build_profile(cfg)?;
    let sub = Subsolution::new(&p, &s)?;
    let i = admissibility_i(&p, &s)?;
    if cfg.epsilon > 0.0 && !(i > 0.0) {
        bail!("epsilon = {} gives I = {i:e}, which is not admissible; try a smaller epsilon", cfg.epsilon);
    }
    let mut outputs = Outputs::default();
    let mut entries = Vec::new();
    for (k, &t) in times.iter().enumerate() {
        let table = if t == 0.0 { initial_slice(&sub, grid) } else { sub.tabulate(t, grid)? };
        let name = format!("profile_{k:02}.csv");
        outputs.add(name.clone(), table.to_csv());
        let (lo, hi) = sub.fan.edges(t);
        let margin = if t > 0.0 { energy_margin(&sub, t).0 } else { 0.0 };
        println!("t = {t}: mixing zone [{lo}, {hi}], energy margin {margin:e} -> {name}");
        entries.push(json!({
            "file": name,
            "t": t,
            "lower_edge": lo,
            "upper_edge": hi,
            "energy_margin": margin,
            "predicted_margin": energy_margin_predicted(i, &s, t),
        }));
    }
    let summary = json!({
        "setup": setup_json(&s),
        "epsilon": p.epsilon,
        "admissibility_i": i,
        "zeta_minus": sub.fan.zeta_minus,
        "zeta_plus": sub.fan.zeta_plus,
        "columns": SubsolutionProfile::CSV_HEADER,
        "profiles": entries,
    });
    outputs.add("summary.json", pretty(&summary));
    let dir = out_dir(cfg);
    outputs.commit(&dir)?;
    println!("wrote {} profiles and summary.json to {}", times.len(), dir.display());
    Ok(0)
}

fn report_json(reports: &[SuiteReport]) -> Value {
    let suites: Vec<Value> = reports
        .iter()
        .map(|r| {
            let checks: Vec<Value> = r
                .checks
                .iter()
                .map(|c| {
                    json!({
                        "name": c.name,
                        "passed": c.passed,
                        "measured": c.measured,
                        "bound": c.bound,
                        "note": c.note,
                    })
                })
                .collect();
            json!({ "name": r.name, "passed": r.passed(), "seconds": r.seconds, "checks": checks })
        })
        .collect();
    json!({ "passed": reports.iter().all(SuiteReport::passed), "suites": suites })
}

pub fn verify(cfg: &RunConfig, suites: Option<&str>) -> Result<u8> {
    let names: Vec<String> = match suites.or(cfg.extra.get("suites").map(String::as_str)) {
        Some(list) => parse_list::<String>(list, "suite")?,
        None => SUITE_NAMES.iter().map(|s| s.to_string()).collect(),
    };
    if let Some(bad) = names.iter().find(|n| !SUITE_NAMES.contains(&n.as_str())) {
        bail!("unknown suite '{bad}'; expected one of {}", SUITE_NAMES.join(", "));
    }
    let suite_cfg = SuiteConfig { setup: cfg.setup, seed: cfg.seed, ..SuiteConfig::default() };
    let mut reports = Vec::with_capacity(names.len());
    for name in &names {
        let r = run_suite(name, &suite_cfg)?;
        println!("{} {} ({:.2} s)", if r.passed() { "PASS" } else { "FAIL" }, r.name, r.seconds);
        for c in &r.checks {
            let note = c.note.as_deref().map(|n| format!("  [{n}]")).unwrap_or_default();
            println!(
                "  {} {}: measured {:e}, bound {:e}{note}",
                if c.passed { "ok  " } else { "FAIL" },
                c.name,
                c.measured,
                c.bound
            );
        }
        reports.push(r);
    }
    let all = reports.iter().all(SuiteReport::passed);
    if let Some(dir) = &cfg.out {
        let mut outputs = Outputs::default();
        outputs.add("report.json", pretty(&report_json(&reports)));
        outputs.commit(dir)?;
    }
    println!("{}", if all { "all suites passed" } else { "verification failed" });
    Ok(if all { 0 } else { EXIT_VERIFICATION })
}

pub fn wave(cfg: &RunConfig, freqs: Option<&str>) -> Result<u8> {
    if cfg.setup.n != 2 {
        bail!("plane waves are constructed for n = 2");
    }
    let freqs: Vec<u32> = match freqs.or(cfg.extra.get("N").map(String::as_str)) {
        Some(list) => parse_list(list, "frequency")?,
        None => vec![8, 16, 32, 64],
    };
    if freqs.is_empty() || freqs.contains(&0) {
        bail!("frequencies must be positive integers");
    }
    let grid = cfg.grid.unwrap_or(21);
    let tests = WaveTestFunction::family(4, cfg.seed);
    let opts = WaveVerifyOptions::default();
    let mut outputs = Outputs::default();
    let mut table = String::from("direction,case,N,residual,precutoff_error,proximity,l2_ratio,max_weak_pairing\n");
    println!("{:<10} {:<18} {:>4} {:>11} {:>11} {:>11} {:>8} {:>11}", "direction", "case", "N", "residual", "precutoff", "proximity", "L2", "weak");
    let top = *freqs.iter().max().expect("nonempty");
    for (label, zbar) in wave_directions() {
        let study = decay_study(&zbar, &freqs, DEFAULT_EPS, &tests, &opts)?;
        for r in &study.reports {
            let weak = r.weak_pairings.iter().copied().fold(0.0, f64::max);
            println!(
                "{label:<10} {:<18} {:>4} {:>11.3e} {:>11.3e} {:>11.4e} {:>8.4} {:>11.3e}",
                r.case.name(),
                r.n_freq,
                r.residual,
                r.precutoff_error,
                r.proximity,
                r.l2_ratio,
                weak
            );
            table.push_str(&format!("{label},{},{},", r.case.name(), r.n_freq));
            table.push_str(&csv_line(&[r.residual, r.precutoff_error, r.proximity, r.l2_ratio, weak]));
            table.push('\n');
        }
        println!("  proximity ratios {:?}, L2 variation {:.3}", study.proximity_ratios, study.l2_variation);
        let field = build_wave(&zbar, top, DEFAULT_EPS)?;
        let mut csv = String::from("x1,x2,t,rho,v1,v2,u1,u2,S11,S12,P\n");
        let h = 2.0 / (grid - 1) as f64;
        for i in 0..grid {
            for j in 0..grid {
                for k in 0..grid {
                    let p = [-1.0 + i as f64 * h, -1.0 + j as f64 * h, -1.0 + k as f64 * h];
                    let z = field.eval(p);
                    let vals = [p[0], p[1], p[2], z.rho, z.v[0], z.v[1], z.u[0], z.u[1], z.s.get(0, 0), z.s.get(0, 1), z.p];
                    csv.push_str(&csv_line(&vals));
                    csv.push('\n');
                }
            }
        }
        outputs.add(format!("wave_{label}.csv"), csv);
    }
    outputs.add("decay.csv", table);
    let dir = out_dir(cfg);
    outputs.commit(&dir)?;
    println!("wrote decay.csv and field samples at N = {top} to {}", dir.display());
    Ok(0)
}

pub fn hull(cfg: &RunConfig, random: Option<usize>, e: Option<f64>) -> Result<u8> {
    let count = match random {
        Some(c) => c,
        None => cfg.extra.get("random").map(|v| v.parse()).transpose().context("config key 'random'")?.unwrap_or(1000),
    };
    let e = match e {
        Some(e) => e,
        None => cfg.extra.get("e").map(|v| v.parse()).transpose().context("config key 'e'")?.unwrap_or(1.0),
    };
    if !(e > 0.0 && e.is_finite()) {
        bail!("energy e = {e} must be positive");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut counts = [0usize; 6];
    for k in 0..count {
        let z = hull_sample(k % 4, e, &mut rng, &cfg.setup);
        counts[membership(&z, e, &cfg.setup, K_TOL).region as usize] += 1;
    }
    let mut histogram = serde_json::Map::new();
    for r in Region::ALL {
        histogram.insert(r.name().to_string(), json!(counts[r as usize]));
    }
    let report = json!({ "samples": count, "seed": cfg.seed, "e": e, "histogram": histogram });
    print!("{}", pretty(&report));
    if let Some(dir) = &cfg.out {
        let mut outputs = Outputs::default();
        outputs.add("hull.json", pretty(&report));
        outputs.commit(dir)?;
    }
    Ok(0)
}

pub fn critical(_cfg: &RunConfig) -> Result<u8> {
    let r = critical_ratio();
    let r2 = r * r;
    println!("r*         = {r:.15}");
    println!("r*^2       = {r2:.12}");
    println!("Atwood(r*) = {:.12}", (r2 - 1.0) / (r2 + 1.0));
    println!("closed form (4 + 2 sqrt 10)/3 = {:.15}", (4.0 + 2.0 * 10f64.sqrt()) / 3.0);
    Ok(0)
}

pub fn energy(cfg: &RunConfig) -> Result<u8> {
    let times = if cfg.times.is_empty() { vec![1.0] } else { cfg.times.clone() };
    let mut ok = true;
    println!("{:>10} {:>22} {:>22} {:>10}", "t", "kinetic", "closed form", "rel err");
    for t in times {
        let c = energy_conversion(&cfg.setup, t);
        ok &= c.relative_error <= 1e-8;
        println!("{t:>10} {:>22.15e} {:>22.15e} {:>10.2e}", c.kinetic, c.closed_form, c.relative_error);
    }
    Ok(if ok { 0 } else { EXIT_VERIFICATION })
}
