//! Verification of the assembled subsolution: hull classification, weak
//! residuals, energy margin and structural invariants.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::numeric::fit::loglog_slope;
use crate::numeric::quad::{composite_gl, integrate_vec_pieces, KahanSum};
use crate::relaxation::{membership_lab, Region, K_TOL};

use super::admissibility::{admissibility_i, energy_margin_predicted};
use super::assemble::Subsolution;
use super::flux::{growth_rates, initial_density};

/// `(1−s²)⁴` on `|s| < 1` with its derivative.
fn bump1(s: f64) -> (f64, f64) {
    if s.abs() >= 1.0 {
        return (0.0, 0.0);
    }
    let d = 1.0 - s * s;
    (d.powi(4), -8.0 * s * d.powi(3))
}

/// `C³` test function `B((x₂−c)/a)·B((t−τ)/b)` supported in
/// `[c−a, c+a] × [τ−b, τ+b]`, restricted to `t ≥ 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeakTestFunction {
    pub center_x2: f64,
    pub half_width_x2: f64,
    pub center_t: f64,
    pub half_width_t: f64,
}

impl WeakTestFunction {
    /// `(φ, ∂ₓ₂φ, ∂ₜφ)`.
    pub fn eval(&self, x2: f64, t: f64) -> (f64, f64, f64) {
        let (bx, dbx) = bump1((x2 - self.center_x2) / self.half_width_x2);
        let (bt, dbt) = bump1((t - self.center_t) / self.half_width_t);
        (bx * bt, dbx * bt / self.half_width_x2, bx * dbt / self.half_width_t)
    }

    pub fn t_range(&self) -> (f64, f64) {
        ((self.center_t - self.half_width_t).max(0.0), self.center_t + self.half_width_t)
    }

    pub fn x_range(&self) -> (f64, f64) {
        (self.center_x2 - self.half_width_x2, self.center_x2 + self.half_width_x2)
    }

    pub fn touches_initial_time(&self) -> bool {
        self.center_t - self.half_width_t < 0.0
    }

    /// `count` seeded test functions on `t ∈ [0, t_max]`; every other one has
    /// support reaching down to `t = 0`.
    pub fn family(sub: &Subsolution, count: usize, t_max: f64, seed: u64) -> Vec<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (lo, hi) = sub.fan.edges(t_max);
        let span = hi - lo;
        (0..count)
            .map(|k| {
                let half_width_t = rng.gen_range(0.2..0.45) * t_max;
                let center_t = if k % 2 == 0 {
                    rng.gen_range(0.0..0.5) * half_width_t
                } else {
                    rng.gen_range(half_width_t..t_max - half_width_t)
                };
                WeakTestFunction {
                    center_x2: lo + rng.gen_range(-0.2..1.2) * span,
                    half_width_x2: rng.gen_range(0.15..0.6) * span,
                    center_t,
                    half_width_t,
                }
            })
            .collect()
    }
}

/// Weak residuals against one test function, each with its absolute scale.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeakResidual {
    pub momentum: f64,
    pub mass: f64,
    pub conservation: f64,
    /// `v ≡ 0`, so this pairing vanishes identically.
    pub divergence: f64,
    pub momentum_scale: f64,
    pub mass_scale: f64,
    pub conservation_scale: f64,
}

impl WeakResidual {
    /// Largest residual relative to its scale.
    pub fn worst_ratio(&self) -> f64 {
        [
            self.momentum / self.momentum_scale,
            self.mass / self.mass_scale,
            self.conservation / self.conservation_scale,
        ]
        .into_iter()
        .map(|r| if r.is_finite() { r.abs() } else { 0.0 })
        .fold(0.0, f64::max)
    }
}

/// Gauss–Legendre order and panel count per piece of the weak-form rule.
const WEAK_GL_ORDER: usize = 16;
const WEAK_GL_PANELS: usize = 4;

/// Fixed composite Gauss–Legendre sum of `f` over consecutive pieces.
fn gl_pieces<const K: usize>(mut f: impl FnMut(f64) -> [f64; K], pts: &[f64]) -> [f64; K] {
    let mut acc = [KahanSum::default(); K];
    for w in pts.windows(2) {
        let (x, wt) = composite_gl(WEAK_GL_ORDER, WEAK_GL_PANELS, w[0], w[1]);
        for (xi, wi) in x.iter().zip(&wt) {
            let v = f(*xi);
            for k in 0..K {
                acc[k].add(wi * v[k]);
            }
        }
    }
    acc.map(|s| s.total())
}

/// Weak-form residuals of momentum, mass and the scalar conservation law.
pub fn weak_residual(sub: &Subsolution, tf: &WeakTestFunction) -> WeakResidual {
    let g = sub.setup().g;
    let (x0, x1) = tf.x_range();
    let (t0, t1) = tf.t_range();
    let inner = |t: f64| -> [f64; 6] {
        let (lo, hi) = sub.fan.edges(t);
        let mut pts = vec![x0];
        pts.extend([lo, hi].into_iter().filter(|&x| x > x0 && x < x1));
        pts.push(x1);
        gl_pieces(
            |x2: f64| {
                let (phi, px, pt) = tf.eval(x2, t);
                if phi == 0.0 && px == 0.0 && pt == 0.0 {
                    return [0.0; 6];
                }
                let p = sub.point(x2, t);
                let flux = if p.in_fan { g * t * sub.fan.flux(p.rho).g } else { 0.0 };
                let m = [p.u2 * pt, p.pi * px, -g * p.rho * phi];
                let c = [p.rho * pt, p.u2 * px];
                let l = [p.rho * pt, flux * px];
                [
                    m[0] + m[1] + m[2],
                    c[0] + c[1],
                    l[0] + l[1],
                    m.iter().map(|v| v.abs()).sum(),
                    c.iter().map(|v| v.abs()).sum(),
                    l.iter().map(|v| v.abs()).sum(),
                ]
            },
            &pts,
        )
    };
    let outer = gl_pieces(inner, &[t0, t1]);
    // initial-data pairing ∫ρ₀ψ(x, 0); the initial momentum vanishes
    let (init, init_abs) = if tf.touches_initial_time() {
        let mut pts = vec![x0];
        if x0 < 0.0 && x1 > 0.0 {
            pts.push(0.0);
        }
        pts.push(x1);
        let r = gl_pieces(
            |x2: f64| {
                let v = initial_density(x2, sub.setup()) * tf.eval(x2, 0.0).0;
                [v, v.abs()]
            },
            &pts,
        );
        (r[0], r[1])
    } else {
        (0.0, 0.0)
    };
    WeakResidual {
        momentum: outer[0],
        mass: outer[1] + init,
        conservation: outer[2] + init,
        divergence: 0.0,
        momentum_scale: outer[3],
        mass_scale: outer[4] + init_abs,
        conservation_scale: outer[5] + init_abs,
    }
}

/// Hull classification over a space-time grid.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct ClassificationSummary {
    pub fan_points: usize,
    pub fan_interior: usize,
    pub fan_closure: usize,
    /// Fan points within the edge layer, classified but not held to strictness.
    pub edge_points: usize,
    pub outside_points: usize,
    pub outside_in_k: usize,
    /// Smallest energy margin divided by `e` over fan points.
    pub min_relative_margin: f64,
    /// First few points that failed, as `(x₂, t, region)`.
    pub failures: Vec<(f64, f64, Region)>,
}

/// Energy released up to time `t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergySample {
    pub t: f64,
    /// `∫E_sub(x,0) − ∫E_sub(x,t)` by quadrature.
    pub margin: f64,
    /// `½g³t⁴I`.
    pub predicted: f64,
    /// `∫|E_sub(x,0)| + |E_sub(x,t)|` over the zone.
    pub scale: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyOptions {
    /// Classification times, as multiples of `t_ref`.
    pub times: Vec<f64>,
    /// Classification points per time slice.
    pub grid: usize,
    /// Energy-margin times, as multiples of `t_ref`.
    pub energy_times: Vec<f64>,
    pub test_functions: usize,
    /// Upper end of the test-function time window, as a multiple of `t_ref`.
    pub t_max: f64,
    pub seed: u64,
    pub weak_tol: f64,
    /// Relative width of the fan-edge layer excluded from the strictness test.
    pub edge_layer: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            times: vec![0.5, 1.0],
            grid: 401,
            energy_times: vec![0.25, 0.5, 1.0, 2.0],
            test_functions: 20,
            t_max: 1.0,
            seed: 20,
            weak_tol: 1e-7,
            edge_layer: 1e-3,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SubsolutionReport {
    pub perturbed: bool,
    pub admissibility_i: f64,
    pub classification: ClassificationSummary,
    pub weak: Vec<WeakResidual>,
    pub max_weak_ratio: f64,
    pub energy: Vec<EnergySample>,
    /// Fitted power of `t` in the energy margin (perturbed profiles only).
    pub margin_exponent: Option<f64>,
    /// `max |ρ(x₂,t) − ρ(λ²x₂, λt)|` for `λ ∈ {½, 2}`.
    pub self_similarity_error: f64,
    pub monotone: bool,
    /// `u₂ ≤ 0` in the zone and `u₂ = 0` outside.
    pub momentum_sign: bool,
    /// Distance of the computed zone edges from `−c₋` and `c₊`.
    pub endpoint_error: f64,
    pub checks: Vec<(String, bool)>,
}

impl SubsolutionReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }
}

/// Classifies the subsolution on a grid of `ζ` at each time.
pub fn classify_grid(sub: &Subsolution, times: &[f64], grid: usize, edge_layer: f64) -> ClassificationSummary {
    let s = *sub.setup();
    let e_fn = sub.energy_function();
    let mut out = ClassificationSummary { min_relative_margin: f64::INFINITY, ..Default::default() };
    let (zm, zp) = (sub.fan.zeta_minus, sub.fan.zeta_plus);
    let width = zp - zm;
    for &t in times {
        let prof = match sub.tabulate(t, grid) {
            Ok(p) => p,
            Err(_) => continue,
        };
        for row in &prof.rows {
            let z = sub.state(row.x2, t);
            let x = DVector::from_vec(vec![0.0, row.x2]);
            let rep = membership_lab(&z, &x, t, &e_fn, &s, K_TOL);
            let zeta = 2.0 * row.x2 / (s.g * t * t);
            let mut fail = false;
            if row.in_fan {
                let rel = rep.margins.min_energy() / row.e;
                if (zeta - zm).min(zp - zeta) <= edge_layer * width {
                    out.edge_points += 1;
                    fail = !rep.region.in_closure();
                } else {
                    out.fan_points += 1;
                    out.min_relative_margin = out.min_relative_margin.min(rel);
                    match rep.region {
                        Region::InteriorU => out.fan_interior += 1,
                        Region::ClosureU0 => out.fan_closure += 1,
                        _ => fail = true,
                    }
                }
            } else {
                out.outside_points += 1;
                if rep.region == Region::InK {
                    out.outside_in_k += 1;
                } else {
                    fail = true;
                }
            }
            if fail && out.failures.len() < 8 {
                out.failures.push((row.x2, t, rep.region));
            }
        }
    }
    out
}

/// Energy margin `∫E_sub(x,0) − ∫E_sub(x,t)` over the mixing zone.
pub fn energy_margin(sub: &Subsolution, t: f64) -> (f64, f64) {
    let g = sub.setup().g;
    let (lo, hi) = sub.fan.edges(t);
    let mut pts = vec![lo];
    if lo < 0.0 && hi > 0.0 {
        pts.push(0.0);
    }
    pts.push(hi);
    let r = integrate_vec_pieces(
        |x2: f64| {
            let e0 = initial_density(x2, sub.setup()) * g * x2;
            let et = sub.point(x2, t).e_sub;
            [e0 - et, e0.abs() + et.abs()]
        },
        &pts,
        1e-15,
        1e-14,
    );
    (r.value[0], r.value[1])
}

/// Runs every check on `sub` and gathers a report.
pub fn verify_subsolution(sub: &Subsolution, tests: &[WeakTestFunction], opts: &VerifyOptions) -> SubsolutionReport {
    let s = *sub.setup();
    let tr = s.t_ref();
    let perturbed = !sub.profile().is_unperturbed();
    let i = admissibility_i(sub.profile(), &s).unwrap_or(f64::NAN);
    let times: Vec<f64> = opts.times.iter().map(|k| k * tr).collect();
    let classification = classify_grid(sub, &times, opts.grid, opts.edge_layer);

    let weak: Vec<WeakResidual> = tests.iter().map(|tf| weak_residual(sub, tf)).collect();
    let max_weak_ratio = weak.iter().map(|w| w.worst_ratio()).fold(0.0, f64::max);

    let energy: Vec<EnergySample> = opts
        .energy_times
        .iter()
        .map(|k| {
            let t = k * tr;
            let (margin, scale) = energy_margin(sub, t);
            EnergySample { t, margin, predicted: energy_margin_predicted(i, &s, t), scale }
        })
        .collect();
    let margin_exponent = if perturbed && energy.iter().all(|e| e.margin > 0.0) && energy.len() >= 2 {
        let ts: Vec<f64> = energy.iter().map(|e| e.t).collect();
        let ms: Vec<f64> = energy.iter().map(|e| e.margin).collect();
        Some(loglog_slope(&ts, &ms))
    } else {
        None
    };

    let mut self_similarity_error = 0.0f64;
    let mut monotone = true;
    let mut momentum_sign = true;
    let mut endpoint_error = 0.0f64;
    for &t in &times {
        if let Ok(prof) = sub.tabulate(t, opts.grid) {
            monotone &= prof.rows.windows(2).all(|w| w[1].rho >= w[0].rho);
            momentum_sign &= prof.rows.iter().all(|r| if r.in_fan { r.u2 <= 0.0 } else { r.u2 == 0.0 });
            for r in prof.rows.iter().step_by(7) {
                for lam in [0.5, 2.0] {
                    let other = sub.fan.density(lam * lam * r.x2, lam * t);
                    self_similarity_error = self_similarity_error.max((other - r.rho).abs());
                }
            }
        }
        let (lo, hi) = sub.fan.edges(t);
        let (cm, cp) = growth_rates(&s, t);
        endpoint_error = endpoint_error.max((lo + cm).abs()).max((hi - cp).abs());
        // edge values of u₂ vanish
        momentum_sign &= sub.point(lo, t).u2 == 0.0 && sub.point(hi, t).u2 == 0.0;
    }

    let c = &classification;
    let mut checks = vec![
        ("outside points in K".to_string(), c.outside_in_k == c.outside_points),
        ("weak residuals".to_string(), max_weak_ratio <= opts.weak_tol),
        ("self-similarity".to_string(), self_similarity_error <= 1e-12),
        ("monotone density".to_string(), monotone),
        ("momentum sign".to_string(), momentum_sign),
        ("zone endpoints".to_string(), endpoint_error <= 1e-12 * (1.0 + s.g * tr * tr)),
    ];
    if perturbed {
        checks.push(("fan strictly inside U".into(), c.fan_interior == c.fan_points && c.failures.is_empty()));
        checks.push(("I > 0".into(), i > 0.0));
        checks.push(("energy margin > 0".into(), energy.iter().all(|e| e.margin > 0.0)));
        checks.push(("margin matches ½g³t⁴I".into(), energy.iter().all(|e| (e.margin - e.predicted).abs() <= 1e-6 * e.predicted.abs() + 1e-12 * e.scale)));
        checks.push(("margin exponent 4".into(), margin_exponent.is_some_and(|p| (p - 4.0).abs() <= 0.05)));
    } else {
        checks.push((
            "fan in closure".into(),
            c.fan_interior + c.fan_closure == c.fan_points && c.min_relative_margin >= -1e-8,
        ));
        checks.push(("energy margin zero".into(), energy.iter().all(|e| e.margin.abs() <= 1e-8 * e.scale)));
    }
    SubsolutionReport {
        perturbed,
        admissibility_i: i,
        classification,
        weak,
        max_weak_ratio,
        energy,
        margin_exponent,
        self_similarity_error,
        monotone,
        momentum_sign,
        endpoint_error,
        checks,
    }
}
