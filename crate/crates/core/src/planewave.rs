//! Localized plane waves of the linear system in two space dimensions,
//! built from potentials and cut off smoothly to the unit ball of `(x, t)`.
//!
//! Coordinates are ordered `(x₁, x₂, t)` and indexed `0, 1, 2`; the
//! perpendicular is `(a, b)^⊥ = (−b, a)`.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
pub use crate::numeric::fit::loglog_slope;
use crate::numeric::jet::{Dual, Jet, Real};
use crate::numeric::lowdisc::halton_ball3;
use crate::numeric::quad::{composite_gl, KahanSum};
use crate::state::{split_trace, StateZ};
use crate::wavecone::{in_cone, CONE_TOL};

/// Threshold below which the temporal frequency `c` counts as zero.
pub const C_ZERO_TOL: f64 = 1e-9;

/// Default width of the cutoff transition shell.
pub const DEFAULT_EPS: f64 = 0.48;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Trig {
    Cos,
    Sin,
}

/// `amp · trig(k·(x,t) + phase)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Mode {
    pub amp: f64,
    pub k: [f64; 3],
    pub phase: f64,
    pub trig: Trig,
}

/// `½ pᵀ H p + b·p + c` in `p = (x₁, x₂, t)`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Quadratic {
    pub h: [[f64; 3]; 3],
    pub b: [f64; 3],
    pub c: f64,
}

/// Smooth scalar potential on `(x₁, x₂, t)`: a sum of trigonometric modes plus
/// an optional quadratic. Evaluates generically so derivatives come out exact.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct ScalarField2D {
    pub modes: Vec<Mode>,
    pub quadratic: Option<Quadratic>,
}

fn dot3<T: Real>(x: &[T; 3], k: &[f64; 3]) -> T {
    x[0] * k[0] + x[1] * k[1] + x[2] * k[2]
}

impl ScalarField2D {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn mode(amp: f64, k: [f64; 3], trig: Trig) -> Self {
        Self { modes: vec![Mode { amp, k, phase: 0.0, trig }], quadratic: None }
    }

    pub fn quadratic(q: Quadratic) -> Self {
        Self { modes: Vec::new(), quadratic: Some(q) }
    }

    /// `amp · N⁻² S(k·p)` with `S = −cos`.
    fn profile_s(amp: f64, k: [f64; 3], n: f64) -> Self {
        Self::mode(-amp / (n * n), k, Trig::Cos)
    }

    /// `amp · N⁻¹ S'(k·p)` with `S' = sin`.
    fn profile_ds(amp: f64, k: [f64; 3], n: f64) -> Self {
        Self::mode(amp / n, k, Trig::Sin)
    }

    pub fn is_zero(&self) -> bool {
        self.modes.iter().all(|m| m.amp == 0.0) && self.quadratic.is_none()
    }

    pub fn eval<T: Real>(&self, x: &[T; 3]) -> T {
        let mut acc = T::zero();
        for m in &self.modes {
            if m.amp == 0.0 {
                continue;
            }
            let arg = dot3(x, &m.k) + m.phase;
            acc += match m.trig {
                Trig::Cos => arg.cos(),
                Trig::Sin => arg.sin(),
            } * m.amp;
        }
        if let Some(q) = &self.quadratic {
            for i in 0..3 {
                for j in 0..3 {
                    if q.h[i][j] != 0.0 {
                        acc += x[i] * x[j] * (0.5 * q.h[i][j]);
                    }
                }
            }
            acc += dot3(x, &q.b) + q.c;
        }
        acc
    }

    /// Value, gradient and Hessian at `p`.
    pub fn jet(&self, p: [f64; 3]) -> Jet<f64, 3> {
        self.eval(&seed2(p))
    }

    /// Like [`ScalarField2D::jet`] with third derivatives carried along.
    pub fn jet3(&self, p: [f64; 3]) -> Jet<Dual<f64, 3>, 3> {
        self.eval(&seed3(p))
    }
}

fn seed2(p: [f64; 3]) -> [Jet<f64, 3>; 3] {
    [Jet::variable(p[0], 0), Jet::variable(p[1], 1), Jet::variable(p[2], 2)]
}

fn seed3(p: [f64; 3]) -> [Jet<Dual<f64, 3>, 3>; 3] {
    [Jet::variable3(p[0], 0), Jet::variable3(p[1], 1), Jet::variable3(p[2], 2)]
}

/// Smooth radial cutoff: 1 on `|(x,t)| ≤ 1 − ε`, 0 on `|(x,t)| ≥ 1`, blended by
/// the transition `f(s)/(f(s)+f(1−s))`, `f(s) = exp(−1/s)`, `s = (1 − r)/ε`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cutoff {
    pub eps: f64,
}

impl Cutoff {
    pub fn eval<T: Real>(&self, x: &[T; 3]) -> T {
        let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        let rv = r2.value().sqrt();
        if rv <= 1.0 - self.eps {
            T::cst(1.0)
        } else if rv >= 1.0 {
            T::cst(0.0)
        } else {
            let s = (r2.sqrt() * -1.0 + 1.0) / self.eps;
            let f = (-s.recip()).exp();
            let g = (-((s * -1.0 + 1.0).recip())).exp();
            f / (f + g)
        }
    }
}

/// Pointwise values of `(μ, w, m, σ + q·id)` for `n = 2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinState<T> {
    pub mu: T,
    pub w: [T; 2],
    pub m: [T; 2],
    pub st: [[T; 2]; 2],
}

impl<T: Real> LinState<T> {
    pub fn zero() -> Self {
        let z = T::zero();
        Self { mu: z, w: [z; 2], m: [z; 2], st: [[z; 2]; 2] }
    }

    pub fn add(mut self, o: &Self) -> Self {
        self.mu += o.mu;
        for i in 0..2 {
            self.w[i] += o.w[i];
            self.m[i] += o.m[i];
            for j in 0..2 {
                self.st[i][j] += o.st[i][j];
            }
        }
        self
    }
}

impl LinState<f64> {
    pub fn to_state(&self) -> StateZ {
        let st = nalgebra::DMatrix::from_fn(2, 2, |i, j| self.st[i][j]);
        let (s, q) = split_trace(&st);
        StateZ {
            rho: self.mu,
            v: DVector::from_vec(self.w.to_vec()),
            u: DVector::from_vec(self.m.to_vec()),
            s,
            p: q,
        }
    }
}

impl LinState<Dual<f64, 3>> {
    pub fn values(&self) -> LinState<f64> {
        LinState {
            mu: self.mu.v,
            w: self.w.map(|x| x.v),
            m: self.m.map(|x| x.v),
            st: self.st.map(|r| r.map(|x| x.v)),
        }
    }

    /// Residuals `[∂ₜμ + div m, div w, (∂ₜm + div(σ+q))₁, (…)₂]`.
    pub fn residual(&self) -> [f64; 4] {
        let mass = self.mu.d[2] + self.m[0].d[0] + self.m[1].d[1];
        let divw = self.w[0].d[0] + self.w[1].d[1];
        let mom = |i: usize| self.m[i].d[2] + self.st[i][0].d[0] + self.st[i][1].d[1];
        [mass, divw, mom(0), mom(1)]
    }
}

/// `D(φ, ψ)`: `μ = div div φ`, `w = ∇^⊥ψ`, `m = −∂ₜ div φ`, `σ + q = ∂ₜₜφ`.
/// `phi` holds the entries `(φ₁₁, φ₁₂, φ₂₂)`.
pub fn potential_d<T: Real>(phi: &[Jet<T, 3>; 3], psi: &Jet<T, 3>) -> LinState<T> {
    let p = |i: usize, j: usize| &phi[i + j];
    let mut out = LinState::zero();
    for i in 0..2 {
        for j in 0..2 {
            out.mu += p(i, j).h[i][j];
            out.st[i][j] = p(i, j).h[2][2];
        }
        out.m[i] = -(p(i, 0).h[2][0] + p(i, 1).h[2][1]);
    }
    out.w = [-psi.g[1], psi.g[0]];
    out
}

/// `D̃(ω)` with `W = curl_{(x,t)} ω`: `m = −½∇^⊥W₃` and
/// `σ + q = [[∂₂W₁, ½(∂₂W₂ − ∂₁W₁)], [·, −∂₁W₂]]`.
pub fn potential_dtilde<T: Real>(omega: &[Jet<T, 3>; 3]) -> LinState<T> {
    let dw0 = |a: usize| omega[2].h[1][a] - omega[1].h[2][a];
    let dw1 = |a: usize| omega[0].h[2][a] - omega[2].h[0][a];
    let dw2 = |a: usize| omega[1].h[0][a] - omega[0].h[1][a];
    let mut out = LinState::zero();
    out.m = [dw2(1) * 0.5, dw2(0) * -0.5];
    let off = (dw1(1) - dw0(0)) * 0.5;
    out.st = [[dw0(1), off], [off, -dw1(0)]];
    out
}

/// `D̂(θ) = (0, 0, ∇^⊥θ, 0, 0)`.
pub fn potential_dhat<T: Real>(theta: &Jet<T, 3>) -> LinState<T> {
    let mut out = LinState::zero();
    out.m = [-theta.g[1], theta.g[0]];
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WaveCase {
    /// `c ≠ 0`.
    TimeOsc,
    /// `c = 0`, `ξ₁ ≠ 0`.
    SpaceOscXi1,
    /// `c = 0`, `ξ₁ = 0`; uses the `θ` correction.
    SpaceOscXi1Zero,
}

impl WaveCase {
    pub fn name(self) -> &'static str {
        match self {
            WaveCase::TimeOsc => "time_osc",
            WaveCase::SpaceOscXi1 => "space_osc_xi1",
            WaveCase::SpaceOscXi1Zero => "space_osc_xi1zero",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct WavePotentials {
    /// `(φ₁₁, φ₁₂, φ₂₂)`.
    pub phi: [ScalarField2D; 3],
    pub psi: ScalarField2D,
    pub omega: [ScalarField2D; 3],
    pub theta: ScalarField2D,
    /// `Θ` with `∂₂Θ = θ`; `D̃((2Θ, 0, 0)) = D̂(θ)` for time-independent `θ`,
    /// and the curl form survives multiplication by the cutoff.
    pub theta_omega: ScalarField2D,
}

/// Cut-off plane wave `z_N` supported in the closed unit ball of `(x, t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveField {
    pub case: WaveCase,
    pub zbar: StateZ,
    pub n_freq: u32,
    pub eps: f64,
    /// `N·(ξ, c)`.
    pub wave_vector: [f64; 3],
    pub potentials: WavePotentials,
    pub cutoff: Cutoff,
}

/// Builds the localized plane wave for a cone direction `zbar`.
pub fn build_wave(zbar: &StateZ, n_freq: u32, eps: f64) -> Result<WaveField> {
    if zbar.n() != 2 {
        return Err(Error::Unsupported("plane waves are constructed for n = 2 only".into()));
    }
    if n_freq < 1 {
        return Err(Error::InvalidArgument("frequency N must be at least 1".into()));
    }
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::InvalidArgument(format!("cutoff eps = {eps} must lie in (0, 1/2)")));
    }
    let cert = in_cone(zbar, CONE_TOL)?;
    let nf = n_freq as f64;
    let (mut xi, mut c) = ([cert.xi[0], cert.xi[1]], cert.c);
    let scale = (xi[0] * xi[0] + xi[1] * xi[1] + c * c).sqrt();
    let case = if c.abs() > C_ZERO_TOL * scale {
        WaveCase::TimeOsc
    } else {
        c = 0.0;
        let nx = xi[0].hypot(xi[1]);
        xi = [xi[0] / nx, xi[1] / nx];
        if xi[0].abs() > C_ZERO_TOL {
            WaveCase::SpaceOscXi1
        } else {
            xi = [0.0, xi[1].signum()];
            WaveCase::SpaceOscXi1Zero
        }
    };
    let k = [nf * xi[0], nf * xi[1], nf * c];
    let xi_perp = [-xi[1], xi[0]];
    let xi_norm = xi[0].hypot(xi[1]);
    let st = zbar.stress();
    let (wb, mb) = ([zbar.v[0], zbar.v[1]], [zbar.u[0], zbar.u[1]]);
    let wnorm = wb[0].hypot(wb[1]);
    let psi = if wnorm == 0.0 {
        ScalarField2D::zero()
    } else {
        let sgn = (xi_perp[0] * wb[0] + xi_perp[1] * wb[1]).signum();
        ScalarField2D::profile_ds(wnorm * sgn / xi_norm, k, nf)
    };
    let mut pots = WavePotentials { psi, ..Default::default() };
    match case {
        WaveCase::TimeOsc => {
            let c2 = c * c;
            pots.phi = [
                ScalarField2D::profile_s(st[(0, 0)] / c2, k, nf),
                ScalarField2D::profile_s(st[(0, 1)] / c2, k, nf),
                ScalarField2D::profile_s(st[(1, 1)] / c2, k, nf),
            ];
        }
        WaveCase::SpaceOscXi1 | WaveCase::SpaceOscXi1Zero => {
            let phi_d = ScalarField2D::profile_s(zbar.rho, k, nf);
            pots.phi = [phi_d.clone(), ScalarField2D::zero(), phi_d];
            let k2 = mb[0] * xi_perp[0] + mb[1] * xi_perp[1];
            let sp = [
                st[(0, 0)] * xi_perp[0] + st[(0, 1)] * xi_perp[1],
                st[(1, 0)] * xi_perp[0] + st[(1, 1)] * xi_perp[1],
            ];
            let k3 = xi_perp[0] * sp[0] + xi_perp[1] * sp[1];
            let a = k3;
            let b = if case == WaveCase::SpaceOscXi1 {
                (-2.0 * k2 + k3 * xi[1]) / xi[0]
            } else {
                let kappa = k2 - xi[1] * k3 / 2.0;
                pots.theta = ScalarField2D::profile_ds(kappa, k, nf);
                pots.theta_omega = ScalarField2D::profile_s(kappa / xi[1], k, nf);
                0.0
            };
            pots.omega = [
                ScalarField2D::profile_s(a, k, nf),
                ScalarField2D::profile_s(b, k, nf),
                ScalarField2D::profile_s(a, k, nf),
            ];
        }
    }
    Ok(WaveField {
        case,
        zbar: zbar.clone(),
        n_freq,
        eps,
        wave_vector: k,
        potentials: pots,
        cutoff: Cutoff { eps },
    })
}

impl WaveField {
    fn assemble<T: Real>(&self, x: &[Jet<T, 3>; 3], cut: bool) -> LinState<T> {
        let chi = if cut { self.cutoff.eval(x) } else { Jet::cst(1.0) };
        let f = |s: &ScalarField2D| if s.is_zero() { Jet::cst(0.0) } else { chi * s.eval(x) };
        let p = &self.potentials;
        let phi = [f(&p.phi[0]), f(&p.phi[1]), f(&p.phi[2])];
        let mut om0 = f(&p.omega[0]);
        if cut {
            om0 += f(&p.theta_omega) * 2.0;
        }
        let omega = [om0, f(&p.omega[1]), f(&p.omega[2])];
        let mut l = potential_d(&phi, &f(&p.psi)).add(&potential_dtilde(&omega));
        if !cut {
            l = l.add(&potential_dhat(&f(&p.theta)));
        }
        l
    }

    fn outside(p: [f64; 3]) -> bool {
        p[0] * p[0] + p[1] * p[1] + p[2] * p[2] >= 1.0
    }

    /// `z_N(x, t)`.
    pub fn eval(&self, p: [f64; 3]) -> StateZ {
        if Self::outside(p) {
            return StateZ::zeros(2);
        }
        self.assemble(&seed2(p), true).to_state()
    }

    /// `D(φ,ψ) + D̃(ω) + D̂(θ)` without the cutoff.
    pub fn eval_uncut(&self, p: [f64; 3]) -> StateZ {
        self.assemble(&seed2(p), false).to_state()
    }

    /// `z̄ · S''(N(ξ,c)·(x,t))`.
    pub fn plane_wave(&self, p: [f64; 3]) -> StateZ {
        let phase = dot3(&p, &self.wave_vector);
        &self.zbar * phase.cos()
    }

    /// Pointwise residual of the linear system for the cut-off field.
    pub fn strong_residual(&self, p: [f64; 3]) -> [f64; 4] {
        if Self::outside(p) {
            return [0.0; 4];
        }
        self.assemble(&seed3(p), true).residual()
    }

    /// Residual of the uncut potentials, which must vanish identically.
    pub fn strong_residual_uncut(&self, p: [f64; 3]) -> [f64; 4] {
        self.assemble(&seed3(p), false).residual()
    }
}

/// Gaussian-weighted test function `exp(−|p−c|²/w²)(1 + a·p)·weights`, paired
/// against the stored state components `(ρ, v₁, v₂, u₁, u₂, S₁₁, S₁₂, P)`.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveTestFunction {
    pub center: [f64; 3],
    pub width: f64,
    pub tilt: [f64; 3],
    pub weights: [f64; 8],
}

impl WaveTestFunction {
    pub fn scalar(&self, p: [f64; 3]) -> f64 {
        let d2: f64 = (0..3).map(|i| (p[i] - self.center[i]).powi(2)).sum();
        (-d2 / (self.width * self.width)).exp() * (1.0 + dot3(&p, &self.tilt))
    }

    /// `count` seeded test functions.
    pub fn family(count: usize, seed: u64) -> Vec<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| WaveTestFunction {
                center: [(); 3].map(|_| rng.gen_range(-0.3..0.3)),
                width: rng.gen_range(0.35..0.6),
                tilt: [(); 3].map(|_| rng.gen_range(-0.5..0.5)),
                weights: [(); 8].map(|_| rng.gen_range(-1.0..1.0)),
            })
            .collect()
    }
}

fn flat8(z: &StateZ) -> [f64; 8] {
    [z.rho, z.v[0], z.v[1], z.u[0], z.u[1], z.s.entries()[0], z.s.entries()[1], z.p]
}

fn reduced_norm2(z: &StateZ) -> f64 {
    z.rho * z.rho + z.v.norm_squared() + z.u.norm_squared() + z.s.norm().powi(2)
}

/// Distance from `z` to the segment `[−zbar, zbar]`.
pub fn distance_to_segment(z: &StateZ, zbar: &StateZ) -> f64 {
    let nb = zbar.dot(zbar);
    let t = if nb > 0.0 { (z.dot(zbar) / nb).clamp(-1.0, 1.0) } else { 0.0 };
    (z - &(zbar * t)).norm()
}

#[derive(Clone, Debug, PartialEq)]
pub struct WaveVerifyOptions {
    /// Points per axis of the tensor grid on `[−1, 1]³`.
    pub grid: usize,
    /// Extra low-discrepancy points in the ball for proximity.
    pub scatter: usize,
    /// Points for the strong-residual check.
    pub residual_points: usize,
    /// Points for the pre-cutoff comparison.
    pub precutoff_points: usize,
    /// Gauss–Legendre nodes per panel and axis.
    pub gl_order: usize,
    /// Frequency resolved by one panel; more panels are used above it.
    pub panel_frequency: u32,
}

impl Default for WaveVerifyOptions {
    fn default() -> Self {
        Self {
            grid: 64,
            scatter: 10_000,
            residual_points: 10_000,
            precutoff_points: 100,
            gl_order: 48,
            panel_frequency: 32,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WaveReport {
    pub case: WaveCase,
    pub n_freq: u32,
    /// `max |residual| / (‖z̄‖ N)` over the residual sample.
    pub residual: f64,
    /// Largest residual of the uncut potentials, same normalization.
    pub residual_uncut: f64,
    /// `max |z_N − z̄S''| / ‖z̄‖` on `|(x,t)| ≤ 1 − ε`.
    pub precutoff_error: f64,
    /// `max d(z_N, [−z̄, z̄])` over grid and scatter points.
    pub proximity: f64,
    /// `|∫ z_N · ψ|` per test function.
    pub weak_pairings: Vec<f64>,
    /// `∫ |π(z_N)|²`.
    pub l2_mass: f64,
    /// `l2_mass / |π(z̄)|²`.
    pub l2_ratio: f64,
}

/// Measures residuals, proximity to `[−z̄, z̄]`, weak pairings and `L²` mass.
pub fn verify_wave(
    field: &WaveField,
    tests: &[WaveTestFunction],
    opts: &WaveVerifyOptions,
) -> WaveReport {
    let zn = field.zbar.norm();
    let nf = field.n_freq as f64;
    let ball = halton_ball3(opts.residual_points, 1.0);
    let mut residual = 0.0f64;
    let mut residual_uncut = 0.0f64;
    for (i, p) in ball.iter().enumerate() {
        let r = field.strong_residual(*p);
        residual = residual.max(r.iter().fold(0.0f64, |a, x| a.max(x.abs())));
        if i < opts.precutoff_points {
            let r = field.strong_residual_uncut(*p);
            residual_uncut = residual_uncut.max(r.iter().fold(0.0f64, |a, x| a.max(x.abs())));
        }
    }
    let inner = halton_ball3(opts.precutoff_points, 1.0 - field.eps);
    let mut precutoff_error = 0.0f64;
    for p in &inner {
        let pw = field.plane_wave(*p);
        let e1 = (&field.eval(*p) - &pw).norm();
        let e2 = (&field.eval_uncut(*p) - &pw).norm();
        precutoff_error = precutoff_error.max(e1).max(e2);
    }
    let mut proximity = 0.0f64;
    let g = opts.grid.max(2);
    let h = 2.0 / (g - 1) as f64;
    for i in 0..g {
        for j in 0..g {
            for k in 0..g {
                let p = [-1.0 + i as f64 * h, -1.0 + j as f64 * h, -1.0 + k as f64 * h];
                if WaveField::outside(p) {
                    continue;
                }
                proximity = proximity.max(distance_to_segment(&field.eval(p), &field.zbar));
            }
        }
    }
    for p in halton_ball3(opts.scatter, 1.0) {
        proximity = proximity.max(distance_to_segment(&field.eval(p), &field.zbar));
    }
    let panels = field.n_freq.div_ceil(opts.panel_frequency).max(1) as usize;
    let (x, w) = composite_gl(opts.gl_order, panels, -1.0, 1.0);
    let mut pair: Vec<KahanSum> = vec![KahanSum::default(); tests.len()];
    let mut mass = KahanSum::default();
    for (a, wa) in x.iter().zip(&w) {
        for (b, wb) in x.iter().zip(&w) {
            if a * a + b * b >= 1.0 {
                continue;
            }
            for (c, wc) in x.iter().zip(&w) {
                let p = [*a, *b, *c];
                if WaveField::outside(p) {
                    continue;
                }
                let wt = wa * wb * wc;
                let z = field.eval(p);
                let f = flat8(&z);
                mass.add(wt * reduced_norm2(&z));
                for (acc, tf) in pair.iter_mut().zip(tests) {
                    let dotw: f64 = f.iter().zip(&tf.weights).map(|(u, v)| u * v).sum();
                    acc.add(wt * tf.scalar(p) * dotw);
                }
            }
        }
    }
    let l2_mass = mass.total();
    let pz = reduced_norm2(&field.zbar);
    WaveReport {
        case: field.case,
        n_freq: field.n_freq,
        residual: residual / (zn * nf),
        residual_uncut: residual_uncut / (zn * nf),
        precutoff_error: precutoff_error / zn,
        proximity,
        weak_pairings: pair.iter().map(|s| s.total().abs()).collect(),
        l2_mass,
        l2_ratio: l2_mass / pz,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecayStudy {
    pub case: WaveCase,
    pub reports: Vec<WaveReport>,
    /// `proximity(N) / proximity(2N)` for consecutive frequencies.
    pub proximity_ratios: Vec<f64>,
    /// Measured decay order of each weak pairing in `1/N`.
    pub weak_exponents: Vec<f64>,
    /// `max/min − 1` of the `L²` ratio across frequencies.
    pub l2_variation: f64,
    /// Same, leaving out the lowest frequency.
    pub l2_variation_tail: f64,
}

/// Runs [`verify_wave`] over a list of frequencies for one direction.
pub fn decay_study(
    zbar: &StateZ,
    freqs: &[u32],
    eps: f64,
    tests: &[WaveTestFunction],
    opts: &WaveVerifyOptions,
) -> Result<DecayStudy> {
    let mut reports = Vec::with_capacity(freqs.len());
    for &n in freqs {
        let field = build_wave(zbar, n, eps)?;
        reports.push(verify_wave(&field, tests, opts));
    }
    let proximity_ratios =
        reports.windows(2).map(|w| w[0].proximity / w[1].proximity).collect();
    let xs: Vec<f64> = freqs.iter().map(|&n| n as f64).collect();
    let weak_exponents = (0..tests.len())
        .map(|i| {
            let ys: Vec<f64> = reports.iter().map(|r| r.weak_pairings[i]).collect();
            -loglog_slope(&xs, &ys)
        })
        .collect();
    let spread = |rs: &[WaveReport]| {
        let (lo, hi) = rs
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(r.l2_ratio), hi.max(r.l2_ratio)));
        hi / lo - 1.0
    };
    Ok(DecayStudy {
        case: reports.first().map(|r| r.case).unwrap_or(WaveCase::TimeOsc),
        proximity_ratios,
        weak_exponents,
        l2_variation: spread(&reports),
        l2_variation_tail: spread(reports.get(1..).unwrap_or(&[])),
        reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::SymTraceless;
    use crate::wavecone::euler_direction;

    #[test]
    fn quadratic_in_time_gives_constant_stress() {
        // φ = t²·A, ψ = 0
        let a = [[1.5, -0.4], [-0.4, 0.3]];
        let q = |v: f64| {
            ScalarField2D::quadratic(Quadratic {
                h: [[0.0; 3], [0.0; 3], [0.0, 0.0, 2.0 * v]],
                ..Default::default()
            })
        };
        let phi = [q(a[0][0]), q(a[0][1]), q(a[1][1])];
        let p = [0.2, -0.3, 0.7];
        let j3 = [phi[0].jet3(p), phi[1].jet3(p), phi[2].jet3(p)];
        let l = potential_d(&j3, &ScalarField2D::zero().jet3(p));
        assert_eq!(l.residual(), [0.0; 4]);
        let v = l.values();
        assert_eq!(v.mu, 0.0);
        assert_eq!(v.m, [0.0, 0.0]);
        assert_eq!(v.st, [[3.0, -0.8], [-0.8, 0.6]]);
    }

    #[test]
    fn theta_x1_gives_constant_momentum() {
        let th = ScalarField2D::quadratic(Quadratic { b: [1.0, 0.0, 0.0], ..Default::default() });
        let l = potential_dhat(&th.jet3([0.1, 0.2, 0.3]));
        assert_eq!(l.values().m, [0.0, 1.0]);
        assert_eq!(l.residual(), [0.0; 4]);
    }

    #[test]
    fn cutoff_support() {
        let c = Cutoff { eps: 0.3 };
        assert_eq!(c.eval(&[0.69, 0.0, 0.0]), 1.0);
        assert_eq!(c.eval(&[0.0, 0.0, 1.0]), 0.0);
        let mid = c.eval(&[0.0, 0.85, 0.0]);
        assert!(mid > 0.0 && mid < 1.0);
    }

    #[test]
    fn euler_space_cases() {
        let w = DVector::from_vec(vec![0.0, 1.0]);
        let z = euler_direction(&w, &SymTraceless::diag2(0.4), 1.2).unwrap();
        assert_eq!(build_wave(&z, 8, 0.4).unwrap().case, WaveCase::SpaceOscXi1);
        let w = DVector::from_vec(vec![1.0, 0.0]);
        let z = euler_direction(&w, &SymTraceless::diag2(0.4), 1.2).unwrap();
        let f = build_wave(&z, 8, 0.4).unwrap();
        assert_eq!(f.case, WaveCase::SpaceOscXi1Zero);
        let p = [0.1, 0.33, -0.2];
        assert!((&f.eval_uncut(p) - &f.plane_wave(p)).norm() < 1e-13);
        assert!((&f.eval(p) - &f.plane_wave(p)).norm() < 1e-13);
    }
}
