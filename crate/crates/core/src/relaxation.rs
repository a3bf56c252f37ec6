//! Constraint sets `K`, the hull functionals `M`, `T±`, `Q`, and membership
//! predicates in the accelerated and lab frames.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector, Matrix2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::numeric::eig::lambda_max;
use crate::numeric::sphere::sphere_directions;
use crate::state::{outer, sym_outer, FluidSetup, ReducedState, StateZ, SymTraceless};

/// Default relative tolerance for the equality checks defining `K`.
pub const K_TOL: f64 = 1e-9;

/// Signature shared by [`mat_m`] and test doubles of it.
pub type MatrixFn = fn(&StateZ, &FluidSetup) -> Result<DMatrix<f64>>;

fn check_open_interval(mu: f64, setup: &FluidSetup) -> Result<()> {
    if mu > setup.rho_minus && mu < setup.rho_plus {
        Ok(())
    } else {
        Err(Error::BoundaryDensity { rho: mu })
    }
}

/// `M(z)` from the expanded quadratic form.
pub fn mat_m(z: &StateZ, setup: &FluidSetup) -> Result<DMatrix<f64>> {
    check_open_interval(z.rho, setup)?;
    let (mm, mp, mu) = (setup.rho_minus, setup.rho_plus, z.rho);
    let (w, m) = (&z.v, &z.u);
    let num = outer(w, w) * (mu * mm * mp) - sym_outer(m, w) * (mm * mp)
        + outer(m, m) * (mp + mm - mu);
    Ok(num / ((mp - mu) * (mu - mm)) - z.s.to_matrix())
}

/// `M(z)` from the factored form; algebraically equal to [`mat_m`].
pub fn mat_m_factored(z: &StateZ, setup: &FluidSetup) -> Result<DMatrix<f64>> {
    check_open_interval(z.rho, setup)?;
    let (mm, mp, mu) = (setup.rho_minus, setup.rho_plus, z.rho);
    let a = (&z.u - &z.v * mm) / (mu - mm);
    let b = (&z.u - &z.v * mp) / (mu - mp);
    Ok(outer(&a, &b) * (-mu) + outer(&a, &z.u) + outer(&z.u, &b) - z.s.to_matrix())
}

/// `(T₊, T₋)`.
pub fn t_pm(z: &StateZ, setup: &FluidSetup) -> Result<(f64, f64)> {
    check_open_interval(z.rho, setup)?;
    let n = z.n() as f64;
    let (mm, mp, mu) = (setup.rho_minus, setup.rho_plus, z.rho);
    let tp = mp / n * (&z.u - &z.v * mm).norm_squared() / (mu - mm).powi(2);
    let tm = mm / n * (&z.u - &z.v * mp).norm_squared() / (mu - mp).powi(2);
    Ok((tp, tm))
}

/// `Q(z) = λ_max(M(z))`.
pub fn q_of(z: &StateZ, setup: &FluidSetup) -> Result<f64> {
    q_with(mat_m, z, setup)
}

pub fn q_with(m_fn: MatrixFn, z: &StateZ, setup: &FluidSetup) -> Result<f64> {
    Ok(lambda_max(&m_fn(z, setup)?))
}

/// Residuals of `A'' = 2 A' A⁻¹ A'` for the 2×2 coefficient matrix `A(μ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AIdentityResidual {
    /// `‖A'' − 2A'A⁻¹A'‖_F`.
    pub absolute: f64,
    /// `absolute / ‖A''‖_F`.
    pub relative: f64,
    /// `det[(μ₊−μ)(μ−μ₋) A(μ)]`.
    pub scaled_det: f64,
}

/// Builds `A(μ)`, `A'(μ)`, `A''(μ)` in closed form and evaluates the identity.
pub fn verify_a_identity(mu: f64, setup: &FluidSetup) -> Result<AIdentityResidual> {
    check_open_interval(mu, setup)?;
    let (mm, mp) = (setup.rho_minus, setup.rho_plus);
    let num = Matrix2::new(mu * mm * mp, -mm * mp, -mm * mp, mp + mm - mu);
    let dnum = Matrix2::new(mm * mp, 0.0, 0.0, -1.0);
    let d = (mp - mu) * (mu - mm);
    let dd = mp + mm - 2.0 * mu;
    let ddd = -2.0;
    let a = num / d;
    let a1 = dnum / d - num * (dd / (d * d));
    let a2 = -dnum * (2.0 * dd / (d * d)) - num * (ddd / (d * d)) + num * (2.0 * dd * dd / (d * d * d));
    let ainv = a.try_inverse().ok_or(Error::BoundaryDensity { rho: mu })?;
    let r = a2 - a1 * ainv * a1 * 2.0;
    let absolute = r.norm();
    Ok(AIdentityResidual { absolute, relative: absolute / a2.norm(), scaled_det: num.determinant() })
}

/// Position-dependent energy `e(x, t) > 0` with a known upper bound.
#[derive(Clone)]
pub struct EnergyFunction {
    f: Arc<dyn Fn(&DVector<f64>, f64) -> f64 + Send + Sync>,
    bound: f64,
}

impl fmt::Debug for EnergyFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EnergyFunction").field("bound", &self.bound).finish_non_exhaustive()
    }
}

impl EnergyFunction {
    pub fn new(f: impl Fn(&DVector<f64>, f64) -> f64 + Send + Sync + 'static, bound: f64) -> Self {
        Self { f: Arc::new(f), bound }
    }

    pub fn constant(e: f64) -> Self {
        Self::new(move |_, _| e, e)
    }

    pub fn eval(&self, x: &DVector<f64>, t: f64) -> f64 {
        (self.f)(x, t)
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Region {
    InteriorU,
    ClosureU0,
    KprimePlus,
    KprimeMinus,
    InK,
    Outside,
}

impl Region {
    pub const ALL: [Region; 6] = [
        Region::InteriorU,
        Region::ClosureU0,
        Region::KprimePlus,
        Region::KprimeMinus,
        Region::InK,
        Region::Outside,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Region::InteriorU => "interior_U",
            Region::ClosureU0 => "closure_U0",
            Region::KprimePlus => "Kprime_plus",
            Region::KprimeMinus => "Kprime_minus",
            Region::InK => "in_K",
            Region::Outside => "outside",
        }
    }

    /// True for every region contained in the closed hull.
    pub fn in_closure(self) -> bool {
        self != Region::Outside
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Slack of each hull inequality; `None` where the functional is undefined.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Margins {
    pub t_plus: Option<f64>,
    pub t_minus: Option<f64>,
    pub q: Option<f64>,
    /// `min(μ − μ₋, μ₊ − μ)`; negative outside the density range.
    pub density: f64,
}

impl Margins {
    /// Smallest defined margin among the energy inequalities.
    pub fn min_energy(&self) -> f64 {
        [self.t_plus, self.t_minus, self.q].into_iter().flatten().fold(f64::INFINITY, f64::min)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HullReport {
    pub t_plus: Option<f64>,
    pub t_minus: Option<f64>,
    pub q: Option<f64>,
    pub region: Region,
    pub margins: Margins,
}

/// Frame-independent summary of a state used by the classifier.
struct HullData {
    mu: f64,
    /// `|m − μ± w|` when `μ` sits at a boundary density, else unused.
    kernel_defect: f64,
    /// `μ± w⊗w − σ − e·id`, boundary case only.
    k_defect: f64,
    /// `λ_max` of the boundary matrix (boundary) or of `M` (interior).
    q: f64,
    t_plus: f64,
    t_minus: f64,
}

enum Where {
    Below,
    AtMinus,
    Inside,
    AtPlus,
    Above,
}

fn locate(mu: f64, setup: &FluidSetup, tol: f64) -> Where {
    let (mm, mp) = (setup.rho_minus, setup.rho_plus);
    if (mu - mm).abs() <= tol * mm {
        Where::AtMinus
    } else if (mu - mp).abs() <= tol * mp {
        Where::AtPlus
    } else if mu < mm {
        Where::Below
    } else if mu > mp {
        Where::Above
    } else {
        Where::Inside
    }
}

fn classify(d: &HullData, e: f64, setup: &FluidSetup, n: usize, tol: f64) -> HullReport {
    let (mm, mp) = (setup.rho_minus, setup.rho_plus);
    let density = (d.mu - mm).min(mp - d.mu);
    let loc = locate(d.mu, setup, tol);
    let boundary = |mb: f64, plus: bool| {
        let kernel_ok = d.kernel_defect <= tol * (n as f64 * e * mb).sqrt();
        let (tp, tm) = if plus { (Some(d.t_plus), None) } else { (None, Some(d.t_minus)) };
        let region = if !kernel_ok {
            Region::Outside
        } else if d.k_defect <= tol * e {
            Region::InK
        } else if d.q <= e * (1.0 + tol) {
            if plus {
                Region::KprimePlus
            } else {
                Region::KprimeMinus
            }
        } else {
            Region::Outside
        };
        HullReport {
            t_plus: tp,
            t_minus: tm,
            q: Some(d.q),
            region,
            margins: Margins {
                t_plus: tp.map(|x| e - x),
                t_minus: tm.map(|x| e - x),
                q: Some(e - d.q),
                density,
            },
        }
    };
    match loc {
        Where::AtMinus => boundary(mm, false),
        Where::AtPlus => boundary(mp, true),
        Where::Below | Where::Above => HullReport {
            t_plus: None,
            t_minus: None,
            q: None,
            region: Region::Outside,
            margins: Margins { t_plus: None, t_minus: None, q: None, density },
        },
        Where::Inside => {
            let vals = [d.t_plus, d.t_minus, d.q];
            let region = if vals.iter().all(|&x| x < e) {
                Region::InteriorU
            } else if vals.iter().all(|&x| x <= e * (1.0 + tol)) {
                Region::ClosureU0
            } else {
                Region::Outside
            };
            HullReport {
                t_plus: Some(d.t_plus),
                t_minus: Some(d.t_minus),
                q: Some(d.q),
                region,
                margins: Margins {
                    t_plus: Some(e - d.t_plus),
                    t_minus: Some(e - d.t_minus),
                    q: Some(e - d.q),
                    density,
                },
            }
        }
    }
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |a, x| a.max(x.abs()))
}

/// Classifies an accelerated-frame state against the hull for energy `e`.
pub fn membership(z: &StateZ, e: f64, setup: &FluidSetup, tol: f64) -> HullReport {
    let n = z.n();
    let nf = n as f64;
    let id = DMatrix::<f64>::identity(n, n);
    let mut d = HullData {
        mu: z.rho,
        kernel_defect: 0.0,
        k_defect: 0.0,
        q: 0.0,
        t_plus: 0.0,
        t_minus: 0.0,
    };
    match locate(z.rho, setup, tol) {
        Where::AtMinus | Where::AtPlus => {
            let plus = matches!(locate(z.rho, setup, tol), Where::AtPlus);
            let mb = if plus { setup.rho_plus } else { setup.rho_minus };
            d.kernel_defect = (&z.u - &z.v * mb).norm();
            let x = outer(&z.v, &z.v) * mb - z.s.to_matrix();
            d.k_defect = max_abs(&(&x - &id * e));
            d.q = lambda_max(&x);
            d.t_plus = setup.rho_plus / nf * z.v.norm_squared();
            d.t_minus = setup.rho_minus / nf * z.v.norm_squared();
        }
        Where::Inside => {
            let (tp, tm) = t_pm(z, setup).expect("density inside the open interval");
            d.t_plus = tp;
            d.t_minus = tm;
            d.q = q_of(z, setup).expect("density inside the open interval");
        }
        Where::Below | Where::Above => {}
    }
    classify(&d, e, setup, n, tol)
}

/// `A(z)` for a lab-frame state: the matrix `M` evaluated on `(ρ, v, u, S)`.
pub fn mat_a(z: &StateZ, setup: &FluidSetup) -> Result<DMatrix<f64>> {
    mat_m(z, setup)
}

/// Classifies a lab-frame state at `(x, t)` through the lab-frame
/// inequalities. Reported `T±`, `Q` are in accelerated-frame units so that
/// margins are directly comparable with [`membership`].
pub fn membership_lab(
    z: &StateZ,
    x: &DVector<f64>,
    t: f64,
    e_fn: &EnergyFunction,
    setup: &FluidSetup,
    tol: f64,
) -> HullReport {
    let n = z.n();
    let nf = n as f64;
    let e = e_fn.eval(x, t);
    let a = setup.g * t;
    let (mm, mp, rho) = (setup.rho_minus, setup.rho_plus, z.rho);
    let id = DMatrix::<f64>::identity(n, n);
    let gravity = |un: f64, r: f64| (2.0 / nf) * a * un + r * a * a / nf;
    let mut d = HullData {
        mu: rho,
        kernel_defect: 0.0,
        k_defect: 0.0,
        q: 0.0,
        t_plus: 0.0,
        t_minus: 0.0,
    };
    let loc = locate(rho, setup, tol);
    match loc {
        Where::AtMinus | Where::AtPlus => {
            let plus = matches!(loc, Where::AtPlus);
            let rb = if plus { mp } else { mm };
            d.kernel_defect = (&z.u - &z.v * rb).norm();
            let shift = gravity(rb * z.v[n - 1], rb);
            let x = outer(&z.v, &z.v) * rb - z.s.to_matrix();
            d.k_defect = max_abs(&(&x - &id * (e - shift)));
            d.q = lambda_max(&x) + shift;
            let mut w = z.v.clone();
            w[n - 1] += a;
            d.t_plus = mp / nf * w.norm_squared();
            d.t_minus = mm / nf * w.norm_squared();
        }
        Where::Inside => {
            let mut cp = &z.u - &z.v * mm;
            cp[n - 1] += (rho - mm) * a;
            let mut cm = &z.u - &z.v * mp;
            cm[n - 1] += (rho - mp) * a;
            d.t_plus = mp / nf * cp.norm_squared() / (rho - mm).powi(2);
            d.t_minus = mm / nf * cm.norm_squared() / (rho - mp).powi(2);
            let am = mat_a(z, setup).expect("density inside the open interval");
            d.q = lambda_max(&am) + gravity(z.u[n - 1], rho);
        }
        Where::Below | Where::Above => {}
    }
    classify(&d, e, setup, n, tol)
}

/// A point of `K` (pressure dropped) at density `mu ∈ {μ₋, μ₊}` with velocity
/// direction `b`.
pub fn k_point(mu: f64, b: &DVector<f64>, e: f64) -> ReducedState {
    let n = b.len();
    let w = b * (n as f64 * e / mu).sqrt();
    let m = &w * mu;
    let sigma = outer(&w, &w) * mu - DMatrix::<f64>::identity(n, n) * e;
    ReducedState { rho: mu, v: w, u: m, s: SymTraceless::from_matrix(&sigma) }
}

/// `count` points of `K` alternating between `μ₋` and `μ₊`, with uniformly
/// distributed seeded directions.
pub fn sample_k(e: f64, setup: &FluidSetup, count: usize, seed: u64) -> Vec<ReducedState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = setup.n;
    (0..count)
        .map(|k| {
            let mu = if k % 2 == 0 { setup.rho_minus } else { setup.rho_plus };
            let b = loop {
                let v = DVector::from_fn(n, |_, _| StandardNormal.sample(&mut rng));
                let nv: f64 = v.norm();
                if nv > 1e-8 {
                    break v / nv;
                }
            };
            k_point(mu, &b, e)
        })
        .collect()
}

fn flatten(z: &ReducedState) -> Vec<f64> {
    let n = z.v.len();
    let mut out = vec![z.rho];
    out.extend(z.v.iter());
    out.extend(z.u.iter());
    // full-matrix Frobenius weighting of the stored entries
    for i in 0..n {
        for j in i..n {
            let f = if i == j { 1.0 } else { std::f64::consts::SQRT_2 };
            out.push(f * z.s.get(i, j));
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HausdorffEstimate {
    /// Sampled `d_H(K_{e1}/∼, K_{e2}/∼)`.
    pub distance: f64,
    /// `max |z − z'|` over direction-matched pairs; an upper bound for `distance`.
    pub matched_bound: f64,
    /// `max |w − w'|` over direction-matched pairs.
    pub velocity_gap: f64,
    /// `|e1−e2| + Σ± |√(e1/μ±) − √(e2/μ±)|`.
    pub modulus: f64,
    /// `distance / modulus` (0 when both vanish).
    pub constant: f64,
}

/// Sampled Hausdorff distance between the pressure-free constraint sets for
/// energies `e1` and `e2`, using `count` quasi-uniform directions per density.
pub fn hausdorff_k(e1: f64, e2: f64, setup: &FluidSetup, count: usize) -> HausdorffEstimate {
    let dirs = sphere_directions(setup.n, count, 0x5eed);
    let mut a = Vec::with_capacity(2 * count);
    let mut b = Vec::with_capacity(2 * count);
    let mut matched_bound = 0.0f64;
    let mut velocity_gap = 0.0f64;
    for mu in [setup.rho_minus, setup.rho_plus] {
        for dir in &dirs {
            let za = k_point(mu, dir, e1);
            let zb = k_point(mu, dir, e2);
            matched_bound = matched_bound.max((&za - &zb).norm());
            velocity_gap = velocity_gap.max((&za.v - &zb.v).norm());
            a.push(flatten(&za));
            b.push(flatten(&zb));
        }
    }
    let dist2 = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| (p - q).powi(2)).sum::<f64>();
    let directed = |from: &[Vec<f64>], to: &[Vec<f64>]| {
        from.iter()
            .map(|x| to.iter().map(|y| dist2(x, y)).fold(f64::INFINITY, f64::min))
            .fold(0.0f64, f64::max)
            .sqrt()
    };
    let distance = directed(&a, &b).max(directed(&b, &a));
    let modulus = (e1 - e2).abs()
        + [setup.rho_minus, setup.rho_plus]
            .iter()
            .map(|mu| ((e1 / mu).sqrt() - (e2 / mu).sqrt()).abs())
            .sum::<f64>();
    let constant = if modulus > 0.0 { distance / modulus } else { 0.0 };
    HausdorffEstimate { distance, matched_bound, velocity_gap, modulus, constant }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{to_acc, to_lab};

    fn setup() -> FluidSetup {
        FluidSetup::planar(0.25, 4.0, 1.0).unwrap()
    }

    fn st(rho: f64, v: [f64; 2], u: [f64; 2], s: [f64; 2], p: f64) -> StateZ {
        StateZ {
            rho,
            v: DVector::from_vec(v.to_vec()),
            u: DVector::from_vec(u.to_vec()),
            s: SymTraceless::from_entries(2, s.to_vec()).unwrap(),
            p,
        }
    }

    #[test]
    fn k_example_from_direct_substitution() {
        let s = FluidSetup::planar(1.0, 4.0, 1.0).unwrap();
        let z = st(4.0, [1.0, 0.0], [4.0, 0.0], [2.0, 0.0], 0.0);
        assert_eq!(membership(&z, 2.0, &s, K_TOL).region, Region::InK);
    }

    #[test]
    fn rest_state_is_interior() {
        let s = setup();
        let z = st(2.125, [0.0; 2], [0.0; 2], [0.0; 2], 0.3);
        let r = membership(&z, 0.1, &s, K_TOL);
        assert_eq!(r.region, Region::InteriorU);
        assert_eq!(r.margins.q, Some(0.1));
    }

    #[test]
    fn boundary_density_routes_to_kprime() {
        let s = setup();
        assert!(mat_m(&st(4.0, [0.0; 2], [0.0; 2], [0.0; 2], 0.0), &s).is_err());
        let z = st(4.0, [0.1, 0.0], [0.4, 0.0], [0.0, 0.0], 0.0);
        assert_eq!(membership(&z, 1.0, &s, K_TOL).region, Region::KprimePlus);
        let z = st(0.25, [0.1, 0.0], [0.4, 0.0], [0.0, 0.0], 0.0);
        assert_eq!(membership(&z, 1.0, &s, K_TOL).region, Region::Outside);
    }

    #[test]
    fn a_identity_at_midpoint() {
        let s = FluidSetup::planar(1.0, 2.0, 1.0).unwrap();
        let r = verify_a_identity(1.5, &s).unwrap();
        assert!(r.absolute <= 1e-10, "{r:?}");
        let mu: f64 = 1.5;
        assert!((r.scaled_det - 2.0 * (2.0 - mu) * (mu - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn lab_rest_state_interior() {
        let s = setup();
        let t = 0.7;
        let rho = 0.5 * (s.rho_minus + s.rho_plus);
        let z = st(rho, [0.0; 2], [0.0; 2], [0.0; 2], 0.0);
        let x = DVector::zeros(2);
        let bound = 0.5 * s.rho_plus * (s.g * t).powi(2);
        let e = EnergyFunction::constant(1.01 * bound);
        let lab = membership_lab(&z, &x, t, &e, &s, K_TOL);
        assert_eq!(lab.region, Region::InteriorU);
        let acc = membership(&to_acc(&z, t, &s), e.eval(&x, t), &s, K_TOL);
        assert_eq!(acc.region, lab.region);
        let back = to_lab(&to_acc(&z, t, &s), t, &s);
        assert!((&back - &z).norm() < 1e-14);
    }

    #[test]
    fn hausdorff_zero_for_equal_energy() {
        let h = hausdorff_k(1.0, 1.0, &setup(), 256);
        assert!(h.distance <= 1e-12);
    }
}
