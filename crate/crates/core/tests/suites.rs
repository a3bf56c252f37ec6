use nalgebra::DMatrix;
use rtmix_core::relaxation::mat_m;
use rtmix_core::subsolution::{
    find_admissible_perturbation, verify_subsolution, PerturbationProfile, Subsolution, VerifyOptions,
    WeakTestFunction,
};
use rtmix_core::suites::{run_suite, SuiteConfig, SUITE_NAMES};
use rtmix_core::{FluidSetup, Result, StateZ};

/// `M` with the stress entering with the wrong sign.
fn flipped_stress(z: &StateZ, s: &FluidSetup) -> Result<DMatrix<f64>> {
    Ok(mat_m(z, s)? + z.s.to_matrix() * 2.0)
}

fn quick() -> SuiteConfig {
    SuiteConfig { samples: 200, convexity_pairs: 1000, ..SuiteConfig::default() }
}

#[test]
fn sign_error_in_m_breaks_muskat_invariance() {
    let good = run_suite("hull", &quick()).unwrap();
    assert!(good.passed());
    let bad = run_suite("hull", &SuiteConfig { m_fn: flipped_stress, ..quick() }).unwrap();
    assert!(!bad.check("Muskat invariance of T±, M°, z̃").unwrap().passed);
}

#[test]
fn verdicts_do_not_depend_on_the_seed() {
    for name in ["hull", "cone", "frames", "endpoints", "critical", "energy"] {
        let a = run_suite(name, &SuiteConfig { seed: 7, ..quick() }).unwrap();
        let b = run_suite(name, &SuiteConfig { seed: 99, ..quick() }).unwrap();
        let verdicts = |r: &rtmix_core::suites::SuiteReport| r.checks.iter().map(|c| c.passed).collect::<Vec<_>>();
        assert_eq!(verdicts(&a), verdicts(&b), "{name}");
        assert!(a.passed(), "{name}: {:?}", a.failures().collect::<Vec<_>>());
    }
}

#[test]
fn unknown_suite_is_an_error() {
    assert!(run_suite("nonsense", &quick()).is_err());
    assert!(SUITE_NAMES.contains(&"subsolution"));
}

#[test]
fn subsolution_checks_hold_for_other_test_functions() {
    let s = FluidSetup::planar(0.25, 4.0, 1.0).unwrap();
    let opts = VerifyOptions::default();
    for profile in [PerturbationProfile::unperturbed(&s), find_admissible_perturbation(&s).unwrap()] {
        let sub = Subsolution::new(&profile, &s).unwrap();
        let tests = WeakTestFunction::family(&sub, 6, opts.t_max, 1234);
        let rep = verify_subsolution(&sub, &tests, &opts);
        let failed: Vec<_> = rep.checks.iter().filter(|c| !c.1).collect();
        assert!(failed.is_empty(), "ε = {}: {failed:?}", profile.epsilon);
    }
}

#[test]
fn other_supercritical_setups_admit_subsolutions() {
    for (mm, mp, g) in [(1.0, 16.0, 2.0), (0.5, 10.0, 9.81)] {
        let s = FluidSetup::planar(mm, mp, g).unwrap();
        let report = run_suite("subsolution", &SuiteConfig { setup: s, test_functions: 6, ..quick() }).unwrap();
        assert!(report.passed(), "{:?}", report.failures().collect::<Vec<_>>());
    }
}
