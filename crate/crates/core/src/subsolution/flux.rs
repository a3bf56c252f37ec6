//! Perturbation profiles, the flux `G`, the mixing energy `ẽ` and the
//! entropy solution of `∂ₜy + ∂ₓG(y) = 0` with step data.

use crate::error::{Error, Result};
use crate::numeric::jet::{Jet, Real};
use crate::numeric::quad::{gk15, integrate};
use crate::state::FluidSetup;

/// Grid used to certify uniform convexity of `G`.
pub const CONVEXITY_SAMPLES: usize = 2001;
/// Tolerance of the `(G')⁻¹` solve, relative to `ρ₊`.
pub const INVERSE_TOL: f64 = 1e-14;

type J1 = Jet<f64, 1>;

fn var(x: f64) -> J1 {
    Jet::variable(x, 0)
}

/// Edge-vanishing bump `(ρ−ρ₋)²(ρ₊−ρ)² exp(−((ρ−c)/w)²/2)`, scaled to unit
/// sup norm and then multiplied by `amplitude`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bump {
    pub center: f64,
    pub width: f64,
    pub amplitude: f64,
    rho_minus: f64,
    rho_plus: f64,
    scale: f64,
}

impl Bump {
    pub fn new(setup: &FluidSetup, center: f64, width: f64, amplitude: f64) -> Result<Self> {
        let (a, b) = (setup.rho_minus, setup.rho_plus);
        if !(center > a && center < b) {
            return Err(Error::InvalidArgument(format!("bump center {center} outside ({a}, {b})")));
        }
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::InvalidArgument(format!("bump width {width} must be positive")));
        }
        let mut bump = Self { center, width, amplitude, rho_minus: a, rho_plus: b, scale: 1.0 };
        bump.scale = 1.0 / bump.raw_sup();
        Ok(bump)
    }

    /// Identically zero bump.
    pub fn zero(setup: &FluidSetup) -> Self {
        Self {
            center: 0.5 * (setup.rho_minus + setup.rho_plus),
            width: 1.0,
            amplitude: 0.0,
            rho_minus: setup.rho_minus,
            rho_plus: setup.rho_plus,
            scale: 0.0,
        }
    }

    fn raw<T: Real>(&self, rho: T) -> T {
        let p = (rho - self.rho_minus) * (rho * -1.0 + self.rho_plus);
        let z = (rho - self.center) / self.width;
        p * p * (z * z * -0.5).exp()
    }

    fn raw_sup(&self) -> f64 {
        // coarse scan, then golden-section refinement
        let (a, b) = (self.rho_minus, self.rho_plus);
        let m = 4096;
        let h = (b - a) / m as f64;
        let best = (1..m)
            .map(|i| a + i as f64 * h)
            .max_by(|x, y| self.raw(*x).total_cmp(&self.raw(*y)))
            .expect("nonempty grid");
        let (mut lo, mut hi) = ((best - h).max(a), (best + h).min(b));
        let r = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..80 {
            let x1 = hi - r * (hi - lo);
            let x2 = lo + r * (hi - lo);
            if self.raw(x1) < self.raw(x2) {
                lo = x1;
            } else {
                hi = x2;
            }
        }
        self.raw(0.5 * (lo + hi))
    }

    pub fn eval<T: Real>(&self, rho: T) -> T {
        if self.amplitude == 0.0 {
            return T::zero();
        }
        self.raw(rho) * (self.scale * self.amplitude)
    }
}

/// `ξ₂ = 1 + ε ξ̄`, `η₂ = −1 + ε η̄` with `ξ̄ ≤ 0 ≤ η̄` vanishing at `ρ±`.
/// `η̄` is a sum of bumps so it can be concentrated and still positive.
#[derive(Clone, Debug, PartialEq)]
pub struct PerturbationProfile {
    pub epsilon: f64,
    pub bump_xi: Bump,
    pub bump_eta: Vec<Bump>,
}

impl PerturbationProfile {
    /// `ξ₂ ≡ 1`, `η₂ ≡ −1`.
    pub fn unperturbed(setup: &FluidSetup) -> Self {
        Self { epsilon: 0.0, bump_xi: Bump::zero(setup), bump_eta: Vec::new() }
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Self {
        Self { epsilon, ..self.clone() }
    }

    pub fn xi_bar<T: Real>(&self, rho: T) -> T {
        self.bump_xi.eval(rho)
    }

    pub fn eta_bar<T: Real>(&self, rho: T) -> T {
        self.bump_eta.iter().fold(T::zero(), |acc, b| acc + b.eval(rho))
    }

    pub fn xi2<T: Real>(&self, rho: T) -> T {
        self.xi_bar(rho) * self.epsilon + 1.0
    }

    pub fn eta2<T: Real>(&self, rho: T) -> T {
        self.eta_bar(rho) * self.epsilon - 1.0
    }

    pub fn is_unperturbed(&self) -> bool {
        self.epsilon == 0.0
    }
}

/// `Q`, `G` and `ẽ` as functions of `ρ` in any [`Real`] arithmetic.
#[derive(Clone, Copy, Debug)]
pub struct FluxParts<T> {
    pub q: T,
    pub g: T,
    pub etilde: T,
}

pub fn flux_parts<T: Real>(rho: T, profile: &PerturbationProfile, setup: &FluidSetup) -> FluxParts<T> {
    let (mm, mp) = (setup.rho_minus, setup.rho_plus);
    let (sm, sp) = (mm.sqrt(), mp.sqrt());
    let xi = profile.xi2(rho);
    let eta = profile.eta2(rho);
    let below = rho - mm;
    let above = rho * -1.0 + mp;
    let q = below * xi * sm - above * eta * sp;
    let g = above * below * (xi * sm + eta * sp) / q;
    let etilde = q.square().recip() * (0.5 * mp * mm * (mp - mm).powi(2));
    FluxParts { q, g, etilde }
}

/// `G`, `G'`, `G''` at one density.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FluxValue {
    pub g: f64,
    pub dg: f64,
    pub ddg: f64,
}

fn check_range(rho: f64, setup: &FluidSetup) -> Result<()> {
    let tol = 1e-12 * setup.rho_plus;
    if rho < setup.rho_minus - tol || rho > setup.rho_plus + tol || !rho.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "density {rho} outside [{}, {}]",
            setup.rho_minus, setup.rho_plus
        )));
    }
    Ok(())
}

/// Flux `G(ρ)` with exact first and second derivatives.
pub fn flux_g(rho: f64, profile: &PerturbationProfile, setup: &FluidSetup) -> Result<FluxValue> {
    check_range(rho, setup)?;
    let p = flux_parts(var(rho), profile, setup);
    if !(p.q.v > 0.0) {
        return Err(Error::DenominatorNonpositive { rho });
    }
    Ok(FluxValue { g: p.g.v, dg: p.g.g[0], ddg: p.g.h[0][0] })
}

/// Unperturbed flux `G₀` in closed form.
pub fn flux_g0_closed(rho: f64, setup: &FluidSetup) -> f64 {
    let (mm, mp) = (setup.rho_minus, setup.rho_plus);
    let q0 = (rho - mm) * mm.sqrt() + (mp - rho) * mp.sqrt();
    (mp - rho) * (rho - mm) * (mm.sqrt() - mp.sqrt()) / q0
}

/// `ẽ(ρ)` with exact derivatives, as a jet.
pub fn etilde_jet(rho: f64, profile: &PerturbationProfile, setup: &FluidSetup) -> Result<J1> {
    check_range(rho, setup)?;
    let p = flux_parts(var(rho), profile, setup);
    if !(p.q.v > 0.0) {
        return Err(Error::DenominatorNonpositive { rho });
    }
    Ok(p.etilde)
}

/// Mixing-zone energy `e = g²t² ẽ(ρ)`.
pub fn mixing_energy_e(rho: f64, t: f64, profile: &PerturbationProfile, setup: &FluidSetup) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::InvalidArgument(format!("time t = {t} must be positive")));
    }
    let e = etilde_jet(rho, profile, setup)?;
    Ok((setup.g * t).powi(2) * e.v)
}

/// Checks `ẽ(ρ±) = ½ρ±`.
pub fn check_edge_condition(profile: &PerturbationProfile, setup: &FluidSetup) -> Result<()> {
    for rho in [setup.rho_minus, setup.rho_plus] {
        let got = etilde_jet(rho, profile, setup)?.v;
        let want = 0.5 * rho;
        if (got - want).abs() > 1e-12 * want {
            return Err(Error::EdgeConditionViolated { rho, got, want });
        }
    }
    Ok(())
}

/// Lower and upper mixing-zone growth `(c₋, c₊)`: the zone is `−c₋ < x₂ < c₊`.
pub fn growth_rates(setup: &FluidSetup, t: f64) -> (f64, f64) {
    let (mm, mp, g) = (setup.rho_minus, setup.rho_plus, setup.g);
    let gt2 = g * t * t;
    (0.5 * (1.0 - (mm / mp).sqrt()) * gt2, 0.5 * ((mp / mm).sqrt() - 1.0) * gt2)
}

/// The same rates written through the Atwood number.
pub fn growth_rates_atwood(setup: &FluidSetup, t: f64) -> (f64, f64) {
    let (mm, mp, g) = (setup.rho_minus, setup.rho_plus, setup.g);
    let (sm, sp) = (mm.sqrt(), mp.sqrt());
    let a = setup.atwood() * g * t * t;
    ((mp + mm) / (2.0 * sp * (sp + sm)) * a, (mp + mm) / (2.0 * sm * (sp + sm)) * a)
}

/// Closed-form unperturbed density inside the mixing zone.
pub fn density_closed_form(x2: f64, t: f64, setup: &FluidSetup) -> f64 {
    let (mm, mp, g) = (setup.rho_minus, setup.rho_plus, setup.g);
    let zeta = 2.0 * x2 / (g * t * t);
    mp + (mp * mm).sqrt() + mm - (mp.sqrt() + mm.sqrt()) * (mp * mm).powf(0.25) / (1.0 + zeta).sqrt()
}

/// Closed-form unperturbed relaxed momentum inside the mixing zone.
pub fn momentum_closed_form(x2: f64, t: f64, setup: &FluidSetup) -> f64 {
    let (mm, mp, g) = (setup.rho_minus, setup.rho_plus, setup.g);
    let s = (1.0 + 2.0 * x2 / (g * t * t)).sqrt();
    let q = (mp * mm).powf(0.25);
    g * t * (mp.sqrt() + mm.sqrt()) * (q / s + q * s - mp.sqrt() - mm.sqrt())
}

/// Closed-form unperturbed mixing energy.
pub fn energy_closed_form(x2: f64, t: f64, setup: &FluidSetup) -> f64 {
    let g = setup.g;
    0.5 * (g * t).powi(2) * (setup.rho_minus * setup.rho_plus).sqrt() * (1.0 + 2.0 * x2 / (g * t * t))
}

/// Tabulated cumulative integral `∫_{ρ₋}^{ρ} G'²`, refined by one GK15 panel
/// from the nearest node.
#[derive(Clone, Debug)]
struct SquareTable {
    nodes: Vec<f64>,
    cumulative: Vec<f64>,
}

/// The rarefaction fan of a perturbation profile: `G` is certified uniformly
/// convex and `(G')⁻¹` is available on `[G'(ρ₋), G'(ρ₊)]`.
#[derive(Clone, Debug)]
pub struct RarefactionFan {
    pub setup: FluidSetup,
    pub profile: PerturbationProfile,
    pub zeta_minus: f64,
    pub zeta_plus: f64,
    /// `min G''` over the convexity grid.
    pub min_ddg: f64,
    table: SquareTable,
}

impl RarefactionFan {
    pub fn new(profile: &PerturbationProfile, setup: &FluidSetup) -> Result<Self> {
        let (mm, mp) = (setup.rho_minus, setup.rho_plus);
        let m = CONVEXITY_SAMPLES - 1;
        let mut min_ddg = f64::INFINITY;
        for i in 0..=m {
            let rho = mm + (mp - mm) * i as f64 / m as f64;
            let f = flux_g(rho, profile, setup)?;
            if !(f.ddg > 0.0) {
                return Err(Error::ConvexityViolation { rho, value: f.ddg });
            }
            min_ddg = min_ddg.min(f.ddg);
        }
        let zeta_minus = flux_g(mm, profile, setup)?.dg;
        let zeta_plus = flux_g(mp, profile, setup)?.dg;
        let dg2 = |r: f64| flux_parts(var(r), profile, setup).g.g[0].powi(2);
        let nodes: Vec<f64> = (0..=512).map(|i| mm + (mp - mm) * i as f64 / 512.0).collect();
        let mut cumulative = vec![0.0; nodes.len()];
        for i in 1..nodes.len() {
            let r = integrate(&dg2, nodes[i - 1], nodes[i], 1e-16, 1e-15);
            cumulative[i] = cumulative[i - 1] + r.value[0];
        }
        Ok(Self {
            setup: *setup,
            profile: profile.clone(),
            zeta_minus,
            zeta_plus,
            min_ddg,
            table: SquareTable { nodes, cumulative },
        })
    }

    pub fn flux(&self, rho: f64) -> FluxValue {
        let p = flux_parts(var(rho), &self.profile, &self.setup);
        FluxValue { g: p.g.v, dg: p.g.g[0], ddg: p.g.h[0][0] }
    }

    pub fn etilde(&self, rho: f64) -> f64 {
        flux_parts(rho, &self.profile, &self.setup).etilde
    }

    /// `(G')⁻¹(ζ)` clamped to the density range outside the fan.
    pub fn density_at_zeta(&self, zeta: f64) -> f64 {
        let (mm, mp) = (self.setup.rho_minus, self.setup.rho_plus);
        if zeta <= self.zeta_minus {
            return mm;
        }
        if zeta >= self.zeta_plus {
            return mp;
        }
        let (mut lo, mut hi) = (mm, mp);
        let frac = (zeta - self.zeta_minus) / (self.zeta_plus - self.zeta_minus);
        let mut x = mm + frac * (mp - mm);
        for _ in 0..200 {
            let f = self.flux(x);
            let r = f.dg - zeta;
            if r > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let mut next = x - r / f.ddg;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            let step = (next - x).abs();
            x = next;
            if step <= INVERSE_TOL * mp || hi - lo <= INVERSE_TOL * mp {
                break;
            }
        }
        x
    }

    /// Entropy solution `ρ(x₂, t)` of the step problem.
    pub fn density(&self, x2: f64, t: f64) -> f64 {
        if t <= 0.0 {
            return initial_density(x2, &self.setup);
        }
        self.density_at_zeta(2.0 * x2 / (self.setup.g * t * t))
    }

    /// Lower and upper mixing-zone edges `½gt²G'(ρ±)`.
    pub fn edges(&self, t: f64) -> (f64, f64) {
        let h = 0.5 * self.setup.g * t * t;
        (h * self.zeta_minus, h * self.zeta_plus)
    }

    /// `∫_{ρ₋}^{ρ} G'(s)² ds`.
    pub fn dg_square_integral(&self, rho: f64) -> f64 {
        let t = &self.table;
        let (mm, mp) = (self.setup.rho_minus, self.setup.rho_plus);
        let rho = rho.clamp(mm, mp);
        let k = (((rho - mm) / (mp - mm) * 512.0).floor() as usize).min(511);
        let base = t.cumulative[k];
        if rho == t.nodes[k] {
            return base;
        }
        let (v, _) = gk15(
            &mut |r: f64| flux_parts(var(r), &self.profile, &self.setup).g.g[0].powi(2),
            t.nodes[k],
            rho,
        );
        base + v
    }

    /// `J(ρ) = ∫_{ρ₋}^{ρ} (sG'' + GG'' − 2G'²) ds`; the fan pressure is
    /// `S₂₂ + P = −½g²t²J(ρ)`.
    pub fn pressure_integral(&self, rho: f64) -> f64 {
        let mm = self.setup.rho_minus;
        let at = |r: f64| {
            let f = self.flux(r);
            r * f.dg - f.g + f.g * f.dg
        };
        at(rho) - at(mm) - 3.0 * self.dg_square_integral(rho)
    }
}

/// Step data: `ρ₋` below the interface, `ρ₊` above.
pub fn initial_density(x2: f64, setup: &FluidSetup) -> f64 {
    if x2 > 0.0 {
        setup.rho_plus
    } else {
        setup.rho_minus
    }
}

/// Entropy solution at one point; builds the fan on every call.
pub fn entropy_density(x2: f64, t: f64, profile: &PerturbationProfile, setup: &FluidSetup) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::InvalidArgument(format!("time t = {t} must be positive")));
    }
    Ok(RarefactionFan::new(profile, setup)?.density(x2, t))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quarter_four() -> FluidSetup {
        FluidSetup::planar(0.25, 4.0, 1.0).unwrap()
    }

    #[test]
    fn closed_form_flux_matches() {
        let s = quarter_four();
        let p = PerturbationProfile::unperturbed(&s);
        for i in 1..50 {
            let rho = 0.25 + 3.75 * i as f64 / 50.0;
            let f = flux_g(rho, &p, &s).unwrap();
            assert!((f.g - flux_g0_closed(rho, &s)).abs() < 1e-14);
        }
        assert!((flux_g(0.25, &p, &s).unwrap().dg + 0.75).abs() < 1e-14);
        assert!((flux_g(4.0, &p, &s).unwrap().dg - 3.0).abs() < 1e-14);
    }

    #[test]
    fn bump_has_unit_sup_and_vanishes_at_edges() {
        let s = quarter_four();
        let b = Bump::new(&s, 2.25, 0.3, -0.5).unwrap();
        assert_eq!(b.eval(0.25), 0.0);
        assert_eq!(b.eval(4.0), 0.0);
        let m = (0..=10000).map(|i| b.eval(0.25 + 3.75 * i as f64 / 1e4)).fold(0.0f64, f64::min);
        assert!(m >= -0.5 - 1e-12 && m < -0.5 + 1e-6, "{m}");
    }

    #[test]
    fn inverse_is_consistent() {
        let s = quarter_four();
        let fan = RarefactionFan::new(&PerturbationProfile::unperturbed(&s), &s).unwrap();
        for i in 1..100 {
            let z = fan.zeta_minus + (fan.zeta_plus - fan.zeta_minus) * i as f64 / 100.0;
            let rho = fan.density_at_zeta(z);
            assert!((fan.flux(rho).dg - z).abs() < 1e-12);
        }
    }

    #[test]
    fn square_table_matches_closed_form() {
        let s = quarter_four();
        let fan = RarefactionFan::new(&PerturbationProfile::unperturbed(&s), &s).unwrap();
        assert!((fan.dg_square_integral(4.0) - 2.8125).abs() < 1e-12);
    }
}
