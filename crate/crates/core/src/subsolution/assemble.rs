//! The self-similar subsolution `z(x₂, t)` and its tabulated profiles.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::relaxation::EnergyFunction;
use crate::state::{FluidSetup, StateZ, SymTraceless};

use super::flux::{initial_density, PerturbationProfile, RarefactionFan};

/// All fields of the subsolution at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SubsolutionPoint {
    pub x2: f64,
    pub t: f64,
    pub rho: f64,
    pub u2: f64,
    pub e: f64,
    pub s11: f64,
    pub s22: f64,
    pub p: f64,
    pub e_sub: f64,
    /// `S₂₂ + P`.
    pub pi: f64,
    pub in_fan: bool,
}

/// Pointwise evaluator of the subsolution built from a perturbation profile.
#[derive(Clone, Debug)]
pub struct Subsolution {
    pub fan: RarefactionFan,
}

impl Subsolution {
    pub fn new(profile: &PerturbationProfile, setup: &FluidSetup) -> Result<Self> {
        if setup.n != 2 {
            return Err(Error::Unsupported("the subsolution is constructed for n = 2".into()));
        }
        super::flux::check_edge_condition(profile, setup)?;
        Ok(Self { fan: RarefactionFan::new(profile, setup)? })
    }

    pub fn setup(&self) -> &FluidSetup {
        &self.fan.setup
    }

    pub fn profile(&self) -> &PerturbationProfile {
        &self.fan.profile
    }

    /// Stress amplitude `s` with `S = s·diag(−1, 1)`; zero at the fan edges.
    fn stress_amplitude(&self, rho: f64, u2: f64) -> f64 {
        let (mm, mp) = (self.setup().rho_minus, self.setup().rho_plus);
        let den = 2.0 * (mp - rho) * (rho - mm);
        if den <= 0.0 {
            return 0.0;
        }
        (mp + mm - rho) * u2 * u2 / den
    }

    pub fn point(&self, x2: f64, t: f64) -> SubsolutionPoint {
        let s = self.setup();
        let g = s.g;
        if t <= 0.0 {
            let rho = initial_density(x2, s);
            let pi = -rho * g * x2;
            return SubsolutionPoint {
                x2,
                t,
                rho,
                u2: 0.0,
                e: 0.0,
                s11: 0.0,
                s22: 0.0,
                p: pi,
                e_sub: rho * g * x2,
                pi,
                in_fan: false,
            };
        }
        let (lo, hi) = self.fan.edges(t);
        let gt = g * t;
        let (rho, u2, e, amp, pi, in_fan) = if x2 <= lo {
            let rho = s.rho_minus;
            (rho, 0.0, 0.5 * rho * gt * gt, 0.0, -rho * g * (x2 - lo), false)
        } else if x2 >= hi {
            let rho = s.rho_plus;
            let top = -0.5 * gt * gt * self.fan.pressure_integral(rho);
            (rho, 0.0, 0.5 * rho * gt * gt, 0.0, top - rho * g * (x2 - hi), false)
        } else {
            let rho = self.fan.density(x2, t);
            let u2 = gt * self.fan.flux(rho).g;
            let e = gt * gt * self.fan.etilde(rho);
            let pi = -0.5 * gt * gt * self.fan.pressure_integral(rho);
            (rho, u2, e, self.stress_amplitude(rho, u2), pi, true)
        };
        let e_sub = e - gt * u2 - 0.5 * rho * gt * gt + rho * g * x2;
        SubsolutionPoint {
            x2,
            t,
            rho,
            u2,
            e,
            s11: -amp + 0.0,
            s22: amp,
            p: pi - amp,
            e_sub,
            pi,
            in_fan,
        }
    }

    /// The state `(ρ, 0, u₂e₂, S, P)` at `(x₂, t)`.
    pub fn state(&self, x2: f64, t: f64) -> StateZ {
        let p = self.point(x2, t);
        StateZ {
            rho: p.rho,
            v: DVector::zeros(2),
            u: DVector::from_vec(vec![0.0, p.u2]),
            s: SymTraceless::diag2(p.s11),
            p: p.p,
        }
    }

    /// `e(x, t)` as an [`EnergyFunction`] of the lab frame position.
    pub fn energy_function(&self) -> EnergyFunction {
        let me = self.clone();
        let s = *self.setup();
        let bound_rho = s.rho_plus.max(me.fan.etilde(0.5 * (s.rho_minus + s.rho_plus)));
        EnergyFunction::new(move |x, t| me.point(x[x.len() - 1], t).e, bound_rho)
    }

    /// `∂ₜu₂ = g(G − 2G'²/G'')` inside the fan, zero outside.
    pub fn momentum_rate(&self, x2: f64, t: f64) -> f64 {
        let (lo, hi) = self.fan.edges(t);
        if t <= 0.0 || x2 <= lo || x2 >= hi {
            return 0.0;
        }
        let f = self.fan.flux(self.fan.density(x2, t));
        self.setup().g * (f.g - 2.0 * f.dg * f.dg / f.ddg)
    }

    /// Tabulates the profile at time `t` on `grid` points of `ζ = 2x₂/(gt²)`
    /// covering the fan with a quarter of its width on either side.
    pub fn tabulate(&self, t: f64, grid: usize) -> Result<SubsolutionProfile> {
        if !(t > 0.0) {
            return Err(Error::InvalidArgument(format!("time t = {t} must be positive")));
        }
        if grid < 2 {
            return Err(Error::InvalidArgument("profile grid needs at least 2 points".into()));
        }
        let (zm, zp) = (self.fan.zeta_minus, self.fan.zeta_plus);
        let pad = 0.25 * (zp - zm);
        let h = 0.5 * self.setup().g * t * t;
        let rows = (0..grid)
            .map(|i| {
                let zeta = zm - pad + (zp - zm + 2.0 * pad) * i as f64 / (grid - 1) as f64;
                self.point(h * zeta, t)
            })
            .collect();
        Ok(SubsolutionProfile {
            setup: *self.setup(),
            profile: self.profile().clone(),
            t,
            zeta_minus: zm,
            zeta_plus: zp,
            rows,
        })
    }
}

/// One time slice of the subsolution sampled in `ζ`.
#[derive(Clone, Debug, PartialEq)]
pub struct SubsolutionProfile {
    pub setup: FluidSetup,
    pub profile: PerturbationProfile,
    pub t: f64,
    pub zeta_minus: f64,
    pub zeta_plus: f64,
    pub rows: Vec<SubsolutionPoint>,
}

impl SubsolutionProfile {
    pub const CSV_HEADER: &'static str = "x2,rho,u2,e,S11,S22,P,E_sub";

    /// CSV text with the header above and 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let vals = [r.x2, r.rho, r.u2, r.e, r.s11, r.s22, r.p, r.e_sub];
            let line: Vec<String> = vals.iter().map(|v| format!("{v:.16e}")).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}

/// Builds the subsolution and tabulates it at one time.
pub fn assemble_subsolution(
    profile: &PerturbationProfile,
    setup: &FluidSetup,
    t: f64,
    grid: usize,
) -> Result<SubsolutionProfile> {
    Subsolution::new(profile, setup)?.tabulate(t, grid)
}

/// `(ξ, η)` from `(ρ, v, u)` and the energy, in the accelerated form used to
/// describe the hull interior.
pub fn xi_eta_from_u(
    rho: f64,
    v: &DVector<f64>,
    u: &DVector<f64>,
    e: f64,
    t: f64,
    setup: &FluidSetup,
) -> (DVector<f64>, DVector<f64>) {
    let n = v.len();
    let (mm, mp) = (setup.rho_minus, setup.rho_plus);
    let a = setup.g * t;
    let ne = n as f64 * e;
    let mut xi = u - v * mm;
    xi[n - 1] += (rho - mm) * a;
    xi *= (mp / ne).sqrt() / (rho - mm);
    let mut eta = u - v * mp;
    eta[n - 1] += (rho - mp) * a;
    eta *= (mm / ne).sqrt() / (mp - rho);
    (xi, eta)
}

/// Inverse of [`xi_eta_from_u`]: the velocity fixed by `(ξ, η, e)` and
/// `u = ρv + f`.
pub fn u_from_xi_eta(
    rho: f64,
    xi: &DVector<f64>,
    eta: &DVector<f64>,
    e: f64,
    t: f64,
    setup: &FluidSetup,
) -> (DVector<f64>, DVector<f64>) {
    let n = xi.len();
    let (mm, mp) = (setup.rho_minus, setup.rho_plus);
    let ne = n as f64 * e;
    let sq = ne.sqrt();
    let mut v = (xi * ((rho - mm) / mp.sqrt()) - eta * ((mp - rho) / mm.sqrt())) * (sq / (mp - mm));
    v[n - 1] -= setup.g * t;
    let f = xi * ((mp - rho) / (mp - mm) * (ne / mp).sqrt() * (rho - mm))
        + eta * ((rho - mm) / (mp - mm) * (ne / mm).sqrt() * (mp - rho));
    let u = &v * rho + f;
    (v, u)
}

/// Both sides of the reduced hull inequality for a state `(ρ, 0, u₂e₂, S, P)`:
/// `(ρ₊+ρ₋−ρ)u₂²/(2(ρ₊−ρ)(ρ−ρ₋)) + gtu₂ + ½ρg²t²` and its split into the two
/// weighted squares `(ρ₊−ρ)/(ρ₊−ρ₋)·(ρ₋/2)(u₂/(ρ−ρ₊)+gt)² + (ρ−ρ₋)/(ρ₊−ρ₋)·(ρ₊/2)(u₂/(ρ−ρ₋)+gt)²`.
pub fn reduced_inequality_sides(rho: f64, u2: f64, t: f64, setup: &FluidSetup) -> (f64, f64) {
    let (mm, mp) = (setup.rho_minus, setup.rho_plus);
    let gt = setup.g * t;
    let direct = (mp + mm - rho) * u2 * u2 / (2.0 * (mp - rho) * (rho - mm)) + gt * u2 + 0.5 * rho * gt * gt;
    let d = mp - mm;
    let split = (mp - rho) / d * 0.5 * mm * (u2 / (rho - mp) + gt).powi(2)
        + (rho - mm) / d * 0.5 * mp * (u2 / (rho - mm) + gt).powi(2);
    (direct, split)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subsolution::flux::{density_closed_form, energy_closed_form, momentum_closed_form};

    #[test]
    fn unperturbed_matches_closed_forms() {
        let s = FluidSetup::planar(0.25, 4.0, 1.0).unwrap();
        let sub = Subsolution::new(&PerturbationProfile::unperturbed(&s), &s).unwrap();
        let t = 1.3;
        let (lo, hi) = sub.fan.edges(t);
        for i in 1..40 {
            let x2 = lo + (hi - lo) * i as f64 / 40.0;
            let p = sub.point(x2, t);
            assert!((p.rho - density_closed_form(x2, t, &s)).abs() < 1e-11);
            assert!((p.u2 - momentum_closed_form(x2, t, &s)).abs() < 1e-11);
            assert!((p.e - energy_closed_form(x2, t, &s)).abs() < 1e-11);
        }
        let mid = sub.point(0.0, 1.0);
        assert!((mid.rho - 2.75).abs() < 1e-12);
        assert!((mid.u2 + 1.25).abs() < 1e-12);
    }

    #[test]
    fn xi_eta_roundtrip() {
        let s = FluidSetup::planar(1.0, 3.0, 2.0).unwrap();
        let xi = DVector::from_vec(vec![0.3, -0.5]);
        let eta = DVector::from_vec(vec![-0.2, 0.7]);
        let (v, u) = u_from_xi_eta(1.7, &xi, &eta, 2.5, 0.8, &s);
        let (x2, e2) = xi_eta_from_u(1.7, &v, &u, 2.5, 0.8, &s);
        assert!((x2 - xi).norm() < 1e-13 && (e2 - eta).norm() < 1e-13);
    }
}
