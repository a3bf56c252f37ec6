//! Admissibility functionals, the critical density ratio and the search for
//! an admissible perturbation.

use crate::error::{Error, Result};
use crate::numeric::jet::Jet;
use crate::numeric::quad::integrate;
use crate::state::FluidSetup;

use super::flux::{check_edge_condition, flux_parts, Bump, PerturbationProfile, RarefactionFan};

/// Absolute tolerance of the admissibility quadratures.
pub const I_TOL: f64 = 1e-11;

/// `I = ∫(ẽ' − ¾G')G' dρ`; positive values certify strict admissibility.
pub fn admissibility_i(profile: &PerturbationProfile, setup: &FluidSetup) -> Result<f64> {
    check_edge_condition(profile, setup)?;
    let (mm, mp) = (setup.rho_minus, setup.rho_plus);
    let mut bad = None;
    let f = |rho: f64| {
        let p = flux_parts(Jet::<f64, 1>::variable(rho, 0), profile, setup);
        if !(p.q.v > 0.0) {
            bad.get_or_insert(rho);
        }
        let dg = p.g.g[0];
        (p.etilde.g[0] - 0.75 * dg) * dg
    };
    let r = integrate(f, mm, mp, I_TOL, 0.0);
    if let Some(rho) = bad {
        return Err(Error::DenominatorNonpositive { rho });
    }
    Ok(r.value[0])
}

/// `(H₁(ρ), H₂(ρ))`: the first-order change of `I` is `∫ξ̄H₁ + ∫η̄H₂`.
pub fn h_functions(rho: f64, setup: &FluidSetup) -> (f64, f64) {
    let (mm, mp) = (setup.rho_minus, setup.rho_plus);
    let p = flux_parts(Jet::<f64, 1>::variable(rho, 0), &PerturbationProfile::unperturbed(setup), setup);
    let q0 = p.q.v;
    let g0dd = p.g.h[0][0];
    let e0dd = p.etilde.h[0][0];
    let common = (mp - rho) * (rho - mm) / (q0 * q0) * (mp * mm).sqrt() * (mp - mm) * (1.5 * g0dd - e0dd);
    let k = mp * mm * (mp - mm).powi(2) / q0.powi(3) * g0dd;
    (common + k * mm.sqrt() * (rho - mm), common - k * mp.sqrt() * (mp - rho))
}

/// The quadratic whose negativity at `ρ̄` is equivalent to `H₂(ρ̄) > 0`.
pub fn h2_quadratic(rho_bar: f64, setup: &FluidSetup) -> f64 {
    let (mm, mp) = (setup.rho_minus, setup.rho_plus);
    rho_bar * rho_bar - (mp + 2.0 * mm) * rho_bar
        + 2.0 / 3.0 * mp.powf(1.5) * mm.sqrt()
        + 5.0 / 3.0 * mp * mm
        + mm * mm
}

/// First-order coefficient `Ī = ∫ξ̄H₁ + ∫η̄H₂` of `I(ε) = εĪ + O(ε²)`.
pub fn first_order_ibar(profile: &PerturbationProfile, setup: &FluidSetup) -> f64 {
    let f = |rho: f64| {
        let (h1, h2) = h_functions(rho, setup);
        profile.xi_bar(rho) * h1 + profile.eta_bar(rho) * h2
    };
    integrate(f, setup.rho_minus, setup.rho_plus, I_TOL, 0.0).value[0]
}

/// Minimum over `ρ̄` of the quadratic with `ρ₋ = 1`, `ρ₊ = r²`.
fn quadratic_min(r: f64) -> f64 {
    let r2 = r * r;
    -(r2 + 2.0).powi(2) / 4.0 + 2.0 / 3.0 * r2 * r + 5.0 / 3.0 * r2 + 1.0
}

/// Critical ratio `r*`: above it some `ρ̄` has `H₂(ρ̄) > 0`.
pub fn critical_ratio() -> f64 {
    let (mut lo, mut hi) = (1.0f64, 10.0f64);
    debug_assert!(quadratic_min(lo) > 0.0 && quadratic_min(hi) < 0.0);
    while hi - lo > f64::EPSILON * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if quadratic_min(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Knobs of [`find_admissible_perturbation`].
#[derive(Clone, Debug, PartialEq)]
pub struct PerturbationSearch {
    /// Amplitude of `ξ̄` (negative).
    pub xi_amplitude: f64,
    /// Amplitude of the broad positive floor added to `η̄`.
    pub eta_floor: f64,
    /// Initial `ε`, halved until admissible.
    pub epsilon_start: f64,
    pub max_halvings: usize,
    /// Factor applied to the `η̄` width on each shrink step.
    pub shrink: f64,
    pub max_shrinks: usize,
}

impl Default for PerturbationSearch {
    fn default() -> Self {
        Self {
            xi_amplitude: -0.01,
            eta_floor: 0.01,
            epsilon_start: 1e-2,
            max_halvings: 40,
            shrink: 0.7,
            max_shrinks: 60,
        }
    }
}

/// Builds `ξ̄ < 0 < η̄`, with `η̄` concentrated at `ρ̄ = (ρ₊+2ρ₋)/2`, and halves
/// `ε` until `G` is uniformly convex and `I > 0`.
pub fn find_admissible_perturbation(setup: &FluidSetup) -> Result<PerturbationProfile> {
    find_admissible_perturbation_with(setup, &PerturbationSearch::default())
}

pub fn find_admissible_perturbation_with(
    setup: &FluidSetup,
    opts: &PerturbationSearch,
) -> Result<PerturbationProfile> {
    let r = setup.ratio_r();
    let r_star = critical_ratio();
    if r <= r_star {
        return Err(Error::RatioBelowThreshold { r, r_star });
    }
    let (mm, mp) = (setup.rho_minus, setup.rho_plus);
    let mid = 0.5 * (mm + mp);
    let broad = 0.25 * (mp - mm);
    let rho_bar = 0.5 * (mp + 2.0 * mm);
    let bump_xi = Bump::new(setup, mid, broad, opts.xi_amplitude)?;
    let floor = Bump::new(setup, mid, broad, opts.eta_floor)?;
    let unit_xi = PerturbationProfile { epsilon: 0.0, bump_xi, bump_eta: Vec::new() };
    let cost = first_order_ibar(&unit_xi, setup).abs();
    let mut width = broad;
    let mut found = None;
    for _ in 0..opts.max_shrinks {
        let conc = Bump::new(setup, rho_bar, width, 1.0)?;
        let eta_only = PerturbationProfile {
            epsilon: 0.0,
            bump_xi: Bump::zero(setup),
            bump_eta: vec![conc, floor],
        };
        if first_order_ibar(&eta_only, setup) > 2.0 * cost {
            found = Some(PerturbationProfile { epsilon: 0.0, bump_xi, bump_eta: vec![conc, floor] });
            break;
        }
        width *= opts.shrink;
    }
    let base = found.ok_or_else(|| Error::SearchFailed("no eta width beats the xi cost".into()))?;
    let mut eps = opts.epsilon_start;
    for _ in 0..opts.max_halvings {
        let p = base.with_epsilon(eps);
        if bounded(&p, setup) && RarefactionFan::new(&p, setup).is_ok() {
            if let Ok(i) = admissibility_i(&p, setup) {
                if i > 0.0 {
                    return Ok(p);
                }
            }
        }
        eps *= 0.5;
    }
    Err(Error::SearchFailed(format!("no admissible epsilon after {} halvings", opts.max_halvings)))
}

/// `|ξ₂| ≤ 1` and `|η₂| ≤ 1` on a grid.
pub fn bounded(p: &PerturbationProfile, setup: &FluidSetup) -> bool {
    let (mm, mp) = (setup.rho_minus, setup.rho_plus);
    (0..=1000).all(|i| {
        let rho = mm + (mp - mm) * i as f64 / 1000.0;
        p.xi2(rho).abs() <= 1.0 && p.eta2(rho).abs() <= 1.0
    })
}

/// Kinetic energy released by time `t` in the unperturbed profile.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyConversion {
    /// `∫G₀'² dρ` by quadrature.
    pub integral: f64,
    /// `(g³t⁴/8)∫G₀'²`.
    pub kinetic: f64,
    pub closed_form: f64,
    pub relative_error: f64,
}

pub fn energy_conversion(setup: &FluidSetup, t: f64) -> EnergyConversion {
    let (mm, mp, g) = (setup.rho_minus, setup.rho_plus, setup.g);
    let p0 = PerturbationProfile::unperturbed(setup);
    let f = |rho: f64| flux_parts(Jet::<f64, 1>::variable(rho, 0), &p0, setup).g.g[0].powi(2);
    let integral = integrate(f, mm, mp, 1e-14, 1e-14).value[0];
    let scale = g.powi(3) * t.powi(4);
    let kinetic = scale / 8.0 * integral;
    let (sm, sp) = (mm.sqrt(), mp.sqrt());
    let closed_form = scale * (sp + sm) * (sp - sm).powi(3) / (24.0 * (mp * mm).sqrt());
    let relative_error =
        if closed_form == 0.0 { (kinetic - closed_form).abs() } else { (kinetic / closed_form - 1.0).abs() };
    EnergyConversion { integral, kinetic, closed_form, relative_error }
}

/// Energy released beyond the initial total at time `t`: `½g³t⁴·I`.
pub fn energy_margin_predicted(i: f64, setup: &FluidSetup, t: f64) -> f64 {
    0.5 * setup.g.powi(3) * t.powi(4) * i
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_ratio_closed_form() {
        let r = critical_ratio();
        assert!((r - (4.0 + 2.0 * 10f64.sqrt()) / 3.0).abs() < 1e-12);
    }

    #[test]
    fn unperturbed_i_vanishes() {
        let s = FluidSetup::planar(0.25, 4.0, 1.0).unwrap();
        let i = admissibility_i(&PerturbationProfile::unperturbed(&s), &s).unwrap();
        assert!(i.abs() < 1e-9, "{i}");
    }

    #[test]
    fn h2_sign_matches_quadratic() {
        let s = FluidSetup::planar(0.25, 4.0, 1.0).unwrap();
        let rho_bar = 2.25;
        assert!((h2_quadratic(rho_bar, &s) + 2.0 / 3.0).abs() < 1e-12);
        assert!(h_functions(rho_bar, &s).1 > 0.0);
    }
}
