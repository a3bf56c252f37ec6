use std::sync::OnceLock;

use nalgebra::DVector;
use proptest::prelude::*;
use rtmix_core::subsolution::admissibility::{h2_quadratic, I_TOL};
use rtmix_core::subsolution::flux::{
    density_closed_form, etilde_jet, flux_g0_closed, growth_rates_atwood, momentum_closed_form,
};
use rtmix_core::subsolution::{
    admissibility_i, energy_conversion, entropy_density, find_admissible_perturbation, first_order_ibar, flux_g,
    growth_rates, h_functions, mixing_energy_e, reduced_inequality_sides, PerturbationProfile, RarefactionFan,
    Subsolution,
};
use rtmix_core::subsolution::assemble::{u_from_xi_eta, xi_eta_from_u};
use rtmix_core::{Error, FluidSetup};

fn quarter_four() -> FluidSetup {
    FluidSetup::planar(0.25, 4.0, 1.0).unwrap()
}

fn unperturbed() -> &'static Subsolution {
    static SUB: OnceLock<Subsolution> = OnceLock::new();
    SUB.get_or_init(|| {
        let s = quarter_four();
        Subsolution::new(&PerturbationProfile::unperturbed(&s), &s).unwrap()
    })
}

fn perturbed() -> &'static Subsolution {
    static SUB: OnceLock<Subsolution> = OnceLock::new();
    SUB.get_or_init(|| {
        let s = quarter_four();
        Subsolution::new(&find_admissible_perturbation(&s).unwrap(), &s).unwrap()
    })
}

#[test]
fn flux_vanishes_at_edges_with_known_slopes() {
    let s = quarter_four();
    let p = PerturbationProfile::unperturbed(&s);
    let lo = flux_g(s.rho_minus, &p, &s).unwrap();
    let hi = flux_g(s.rho_plus, &p, &s).unwrap();
    assert!(lo.g.abs() < 1e-15 && hi.g.abs() < 1e-15);
    assert!((lo.dg + 0.75).abs() < 1e-14);
    assert!((hi.dg - 3.0).abs() < 1e-14);
    let pert = perturbed().profile();
    assert!((flux_g(s.rho_minus, pert, &s).unwrap().dg + 0.75).abs() < 1e-12);
    assert!((flux_g(s.rho_plus, pert, &s).unwrap().dg - 3.0).abs() < 1e-12);
}

#[test]
fn unperturbed_flux_is_uniformly_convex() {
    let s = quarter_four();
    let p = PerturbationProfile::unperturbed(&s);
    let min = (0..1000)
        .map(|i| flux_g(0.25 + 3.75 * i as f64 / 999.0, &p, &s).unwrap().ddg)
        .fold(f64::INFINITY, f64::min);
    assert!(min > 0.0);
}

#[test]
fn mixing_energy_at_edges_and_midpoint() {
    let s = quarter_four();
    let p = PerturbationProfile::unperturbed(&s);
    assert!((etilde_jet(s.rho_plus, &p, &s).unwrap().v - 2.0).abs() < 1e-14);
    assert!((etilde_jet(s.rho_minus, &p, &s).unwrap().v - 0.125).abs() < 1e-14);
    assert!((etilde_jet(2.75, &p, &s).unwrap().v - 0.5).abs() < 1e-14);
    let t = 1.3;
    let e = mixing_energy_e(2.75, t, &p, &s).unwrap();
    assert!((e - 0.5 * t * t).abs() < 1e-13);
}

#[test]
fn density_at_interface_and_fan_edges() {
    let s = quarter_four();
    let p = PerturbationProfile::unperturbed(&s);
    assert!((entropy_density(0.0, 0.9, &p, &s).unwrap() - 2.75).abs() < 1e-10);
    assert!((density_closed_form(0.0, 0.9, &s) - 2.75).abs() < 1e-14);
    let fan = &unperturbed().fan;
    assert!((fan.density_at_zeta(fan.zeta_minus) - s.rho_minus).abs() < 1e-10);
    assert!((fan.density_at_zeta(fan.zeta_plus) - s.rho_plus).abs() < 1e-10);
    assert!(entropy_density(0.0, 0.0, &p, &s).is_err());
}

#[test]
fn momentum_at_interface() {
    let s = quarter_four();
    for t in [0.5, 1.0, 2.0] {
        let u2 = unperturbed().point(0.0, t).u2;
        assert!((u2 + 1.25 * t).abs() < 1e-12, "{u2}");
        assert!((momentum_closed_form(0.0, t, &s) + 1.25 * t).abs() < 1e-14);
    }
}

#[test]
fn growth_rate_reference_values() {
    let s = quarter_four();
    let (cm, cp) = growth_rates(&s, (4.0f64 / 3.0).sqrt());
    assert!((cm - 0.5).abs() < 1e-15 && (cp - 2.0).abs() < 1e-14);
    assert_eq!(growth_rates(&s, 0.0), (0.0, 0.0));
}

#[test]
fn outside_zone_is_at_rest() {
    let s = quarter_four();
    let t = 0.8;
    let (lo, hi) = unperturbed().fan.edges(t);
    for (x2, rho) in [(lo - 0.1, s.rho_minus), (hi + 0.3, s.rho_plus)] {
        for sub in [unperturbed(), perturbed()] {
            let p = sub.point(x2, t);
            assert_eq!((p.rho, p.u2, p.s11, p.s22), (rho, 0.0, 0.0, 0.0));
            assert!((p.e - 0.5 * rho * t * t).abs() < 1e-15);
        }
    }
}

#[test]
fn unperturbed_boundary_and_first_order_expansion() {
    for (mm, mp) in [(0.25, 4.0), (1.0, 16.0), (1.0, 2.0)] {
        let s = FluidSetup::planar(mm, mp, 1.0).unwrap();
        assert!(admissibility_i(&PerturbationProfile::unperturbed(&s), &s).unwrap().abs() < 1e-9);
    }
    let s = quarter_four();
    let p = perturbed().profile();
    let eps = 1e-3;
    let ibar = first_order_ibar(p, &s);
    let i = admissibility_i(&p.with_epsilon(eps), &s).unwrap();
    assert!(ibar > 0.0);
    assert!((i / eps / ibar - 1.0).abs() < 0.05, "I/ε = {}, Ī = {ibar}", i / eps);
}

#[test]
fn h2_criterion_at_reference_density() {
    let s = quarter_four();
    let rho_bar = (s.rho_plus + 2.0 * s.rho_minus) / 2.0;
    let q = h2_quadratic(rho_bar, &s);
    assert!((q + 2.0 / 3.0).abs() < 1e-12, "{q}");
    assert!(h_functions(rho_bar, &s).1 > 0.0);
}

#[test]
fn below_threshold_has_no_positive_h2() {
    let s = FluidSetup::planar(1.0, 4.0, 1.0).unwrap();
    for i in 1..1000 {
        let rho = 1.0 + 3.0 * i as f64 / 1000.0;
        assert!(h2_quadratic(rho, &s) >= 0.0);
        assert!(h_functions(rho, &s).1 <= I_TOL);
    }
    assert!(matches!(find_admissible_perturbation(&s), Err(Error::RatioBelowThreshold { .. })));
}

#[test]
fn perturbed_profile_respects_bounds() {
    let s = quarter_four();
    let sub = perturbed();
    let p = sub.profile();
    assert!(admissibility_i(p, &s).unwrap() > 0.0);
    assert!(sub.fan.min_ddg > 0.0);
    assert_eq!(p.xi2(s.rho_plus), 1.0);
    assert_eq!(p.eta2(s.rho_minus), -1.0);
    for i in 1..2000 {
        let rho = 0.25 + 3.75 * i as f64 / 2000.0;
        let (xi, eta) = (p.xi2(rho), p.eta2(rho));
        assert!(xi.abs() < 1.0 && eta.abs() < 1.0, "ρ = {rho}: ξ₂ = {xi}, η₂ = {eta}");
        let den = (rho - s.rho_minus) * s.rho_minus.sqrt() * xi - (s.rho_plus - rho) * s.rho_plus.sqrt() * eta;
        assert!(den > 0.0);
    }
}

#[test]
fn energy_conversion_limits() {
    let s = quarter_four();
    let c = energy_conversion(&s, 1.0);
    assert!((c.integral - 2.8125).abs() < 1e-10);
    assert!((c.kinetic - 0.3515625).abs() < 1e-10);
    assert_eq!(energy_conversion(&s, 0.0).kinetic, 0.0);
    let near = |d: f64| energy_conversion(&FluidSetup::planar(1.0, 1.0 + d, 1.0).unwrap(), 1.0);
    let (a, b) = (near(1e-2), near(1e-4));
    assert!(b.relative_error < 1e-6 && b.kinetic > 0.0);
    // (√ρ₊ − √ρ₋)³ scaling
    let slope = (a.kinetic / b.kinetic).log10() / 2.0;
    assert!((slope - 3.0).abs() < 0.01, "{slope}");
}

proptest! {
    #[test]
    fn growth_rate_families_agree(mm in 0.1f64..5.0, ratio in 1.01f64..50.0, g in 0.1f64..20.0, t in 0.0f64..3.0) {
        let s = FluidSetup::planar(mm, mm * ratio, g).unwrap();
        let (a, b) = (growth_rates(&s, t), growth_rates_atwood(&s, t));
        prop_assert!((a.0 - b.0).abs() <= 1e-12 * (1.0 + a.0) && (a.1 - b.1).abs() <= 1e-12 * (1.0 + a.1));
    }

    #[test]
    fn profiles_are_self_similar(x2 in -1.0f64..3.0, t in 0.2f64..2.0, lam in prop::sample::select(vec![0.5, 2.0])) {
        for sub in [unperturbed(), perturbed()] {
            let (a, b) = (sub.point(x2, t), sub.point(lam * lam * x2, lam * t));
            prop_assert!((a.rho - b.rho).abs() < 1e-12 * a.rho);
            prop_assert!((lam * a.u2 - b.u2).abs() < 1e-12 * (1.0 + b.u2.abs()));
        }
    }

    #[test]
    fn density_increases_with_height(x2 in -1.0f64..3.0, dx in 0.0f64..0.5, t in 0.2f64..2.0) {
        for sub in [unperturbed(), perturbed()] {
            prop_assert!(sub.point(x2, t).rho <= sub.point(x2 + dx, t).rho);
        }
    }

    #[test]
    fn momentum_is_downward(x2 in -1.0f64..3.0, t in 0.2f64..2.0) {
        for sub in [unperturbed(), perturbed()] {
            prop_assert!(sub.point(x2, t).u2 <= 0.0);
        }
    }

    #[test]
    fn inverse_flux_slope_is_consistent(frac in 0.001f64..0.999, t in 0.3f64..2.0) {
        let s = quarter_four();
        let fan: &RarefactionFan = &perturbed().fan;
        let (lo, hi) = fan.edges(t);
        let x2 = lo + frac * (hi - lo);
        let rho = fan.density(x2, t);
        prop_assert!((fan.flux(rho).dg - 2.0 * x2 / (s.g * t * t)).abs() < 1e-10);
    }

    #[test]
    fn unperturbed_density_matches_closed_form(frac in 0.001f64..0.999, t in 0.3f64..2.0) {
        let s = quarter_four();
        let (lo, hi) = unperturbed().fan.edges(t);
        let x2 = lo + frac * (hi - lo);
        let p = unperturbed().point(x2, t);
        prop_assert!((p.rho - density_closed_form(x2, t, &s)).abs() < 1e-10);
        prop_assert!((p.u2 - momentum_closed_form(x2, t, &s)).abs() < 1e-10 * (1.0 + t));
    }

    #[test]
    fn xi_eta_roundtrip(rho in 0.3f64..3.9, c in prop::collection::vec(-1.0f64..1.0, 4), e in 0.1f64..3.0, t in 0.0f64..2.0) {
        let s = quarter_four();
        let xi = DVector::from_vec(vec![c[0], c[1]]);
        let eta = DVector::from_vec(vec![c[2], c[3]]);
        let (v, u) = u_from_xi_eta(rho, &xi, &eta, e, t, &s);
        let (xi2, eta2) = xi_eta_from_u(rho, &v, &u, e, t, &s);
        prop_assert!((&xi2 - &xi).norm() < 1e-12 && (&eta2 - &eta).norm() < 1e-12);
    }

    #[test]
    fn reduced_inequality_splits_into_squares(rho in 0.26f64..3.99, u2 in -5.0f64..5.0, t in 0.0f64..2.0) {
        let (direct, split) = reduced_inequality_sides(rho, u2, t, &quarter_four());
        prop_assert!((direct - split).abs() <= 1e-12 * (1.0 + direct.abs()));
    }

    #[test]
    fn g0_matches_closed_form(rho in 0.25f64..4.0) {
        let s = quarter_four();
        let g = flux_g(rho, &PerturbationProfile::unperturbed(&s), &s).unwrap().g;
        prop_assert!((g - flux_g0_closed(rho, &s)).abs() < 1e-14);
    }
}
