//! Wave-cone membership and the distinguished cone directions: Muskat,
//! Euler and the segment joining two points of `K`.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::numeric::eig::jacobi_eigen;
use crate::numeric::sphere::sphere_directions;
use crate::relaxation::{k_point, membership, sample_k, K_TOL};
use crate::state::{outer, project, split_trace, FluidSetup, ReducedState, StateZ, SymTraceless};

/// Default singular-value threshold for kernel detection.
pub const CONE_TOL: f64 = 1e-9;

/// Kernel witness `(ξ, c)` of the cone matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ConeCertificate {
    pub xi: DVector<f64>,
    pub c: f64,
    pub smallest_singular_value: f64,
    pub nondegenerate: bool,
    /// `|A (ξ, c)|` for the unit kernel vector.
    pub residual: f64,
}

/// `[[σ̄+q̄·id, m̄], [m̄ᵀ, μ̄], [w̄ᵀ, 0]]`, of size `(n+2)×(n+1)`.
pub fn cone_matrix(z: &StateZ) -> DMatrix<f64> {
    let n = z.n();
    let stress = z.stress();
    DMatrix::from_fn(n + 2, n + 1, |i, j| match (i, j) {
        (i, j) if i < n && j < n => stress[(i, j)],
        (i, j) if i < n && j == n => z.u[i],
        (i, j) if i == n && j < n => z.u[j],
        (i, j) if i == n && j == n => z.rho,
        (_, j) if j < n => z.v[j],
        _ => 0.0,
    })
}

fn normalize_sign(v: &mut DVector<f64>) {
    let scale = v.amax();
    if let Some(first) = v.iter().copied().find(|x| x.abs() > 1e-12 * scale) {
        if first < 0.0 {
            v.neg_mut();
        }
    }
}

/// Tests `z̄ ∈ Λ` through the smallest singular value of the cone matrix.
pub fn in_cone(zbar: &StateZ, tol: f64) -> Result<ConeCertificate> {
    let n = zbar.n();
    let a = cone_matrix(zbar);
    let fro = a.norm();
    let mass = (zbar.rho * zbar.rho + zbar.u.norm_squared()).sqrt();
    let nondegenerate = mass > tol * zbar.norm() && mass > 0.0;
    if fro == 0.0 {
        return Err(Error::DegenerateDirection);
    }
    let svd = a.clone().svd(false, true);
    let vt = svd.v_t.expect("requested right singular vectors");
    let (imin, smin) = svd
        .singular_values
        .iter()
        .copied()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .expect("nonempty");
    if smin > tol * fro {
        return Err(Error::NotInCone { sigma_min: smin });
    }
    if !nondegenerate {
        return Err(Error::DegenerateDirection);
    }
    let mut k: DVector<f64> = vt.row(imin).transpose();
    normalize_sign(&mut k);
    let residual = (&a * &k).norm();
    Ok(ConeCertificate {
        xi: k.rows(0, n).into_owned(),
        c: k[n],
        smallest_singular_value: smin,
        nondegenerate,
        residual,
    })
}

/// The Muskat direction `z̃` attached to an interior state `z`.
pub fn muskat_direction(z: &StateZ, setup: &FluidSetup) -> Result<StateZ> {
    let (mm, mp, mu) = (setup.rho_minus, setup.rho_plus, z.rho);
    if !(mu > mm && mu < mp) {
        return Err(Error::BoundaryDensity { rho: mu });
    }
    let wt = (&z.u - &z.v * mu) / ((mp - mu) * (mu - mm));
    let mt = &z.v + &wt * (mp + mm - mu);
    let (s, q) = split_trace(&(outer(&mt, &mt) - outer(&wt, &wt) * (mp * mm)));
    Ok(StateZ { rho: 1.0, v: wt, u: mt, s, p: q })
}

/// Euler direction `(0, w̄, λw̄, σ̄, q̄)`, with `q̄` chosen so that the cone
/// matrix has a kernel vector `(ξ, c)` with `ξ ⊥ w̄`.
pub fn euler_direction(wbar: &DVector<f64>, sbar: &SymTraceless, lambda: f64) -> Result<StateZ> {
    let (z, _, _) = euler_direction_with_kernel(wbar, sbar, lambda)?;
    Ok(z)
}

/// [`euler_direction`] together with its kernel vector `(ξ, c)`.
pub fn euler_direction_with_kernel(
    wbar: &DVector<f64>,
    sbar: &SymTraceless,
    lambda: f64,
) -> Result<(StateZ, DVector<f64>, f64)> {
    let n = wbar.len();
    if sbar.n() != n {
        return Err(Error::DimensionMismatch { expected: n, got: sbar.n() });
    }
    let wn2 = wbar.norm_squared();
    if wn2 == 0.0 || !wn2.is_finite() {
        return Err(Error::InvalidArgument("euler direction needs w != 0".into()));
    }
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(Error::InvalidArgument("euler direction needs lambda != 0".into()));
    }
    let sigma = sbar.to_matrix();
    let xi = if n == 2 {
        DVector::from_vec(vec![-wbar[1], wbar[0]])
    } else {
        let what = wbar / wn2.sqrt();
        let proj = DMatrix::<f64>::identity(n, n) - outer(&what, &what);
        let b = &proj * &sigma * &proj;
        let (vals, vecs) = jacobi_eigen(&b);
        // drop the eigenvector along w̄, keep the largest |eigenvalue|
        let along = (0..n)
            .max_by(|&i, &j| {
                let a = vecs.column(i).dot(&what).abs();
                let b = vecs.column(j).dot(&what).abs();
                a.total_cmp(&b)
            })
            .expect("n >= 1");
        let mut best: Option<(f64, DVector<f64>)> = None;
        for i in (0..n).filter(|&i| i != along) {
            let mut v: DVector<f64> = vecs.column(i).into_owned();
            normalize_sign(&mut v);
            let better = match &best {
                None => true,
                Some((bv, bx)) => {
                    let (a, b) = (vals[i].abs(), bv.abs());
                    if (a - b).abs() > 1e-12 * a.max(b).max(1e-300) {
                        a > b
                    } else {
                        v.iter().zip(bx.iter()).find(|(p, q)| p != q).is_some_and(|(p, q)| p > q)
                    }
                }
            };
            if better {
                best = Some((vals[i], v));
            }
        }
        best.expect("n >= 2").1
    };
    let sxi = &sigma * &xi;
    let qbar = -xi.dot(&sxi) / xi.norm_squared();
    let c = -wbar.dot(&sxi) / (lambda * wn2);
    let z = StateZ { rho: 0.0, v: wbar.clone(), u: wbar * lambda, s: sbar.clone(), p: qbar };
    Ok((z, xi, c))
}

/// Direction joining two points of `K` with the pressure adjusted so the
/// difference lies in the cone.
pub fn connect_in_k(z1: &StateZ, z2: &StateZ, setup: &FluidSetup) -> Result<StateZ> {
    let n = z1.n() as f64;
    let e = z1.rho * z1.v.norm_squared() / n;
    if !(e > 0.0) {
        return Err(Error::NotInK);
    }
    for z in [z1, z2] {
        if membership(z, e, setup, K_TOL).region != crate::relaxation::Region::InK {
            return Err(Error::NotInK);
        }
    }
    let mut zbar = z2 - z1;
    zbar.p = 0.0;
    if zbar.rho.abs() <= K_TOL * setup.rho_plus {
        zbar.rho = 0.0;
        let lambda = z1.rho;
        if zbar.v.norm() == 0.0 {
            return Err(Error::DegenerateDirection);
        }
        return euler_direction(&zbar.v, &zbar.s, lambda);
    }
    Ok(zbar)
}

/// `‖μ̄(σ̄+q̄·id) − m̄⊗m̄ + μ₋μ₊ w̄⊗w̄‖_F`.
pub fn k_pair_identity_residual(zbar: &StateZ, setup: &FluidSetup) -> f64 {
    let lhs = zbar.stress() * zbar.rho;
    let rhs = outer(&zbar.u, &zbar.u) - outer(&zbar.v, &zbar.v) * (setup.rho_minus * setup.rho_plus);
    (lhs - rhs).norm()
}

/// Largest `s` such that `z ± s·d` stays in the closed hull at 64 interior
/// points and both endpoints.
pub fn segment_along(z: &StateZ, d: &StateZ, e: f64, setup: &FluidSetup) -> f64 {
    let ok = |s: f64| {
        (-64..=64).all(|k| {
            let p = z + &(d * (s * k as f64 / 64.0));
            membership(&p, e, setup, K_TOL).region.in_closure()
        })
    };
    if !ok(0.0) {
        return 0.0;
    }
    let mut hi = 1.0;
    let mut lo = 0.0;
    let mut grow = 0;
    while ok(hi) {
        lo = hi;
        hi *= 2.0;
        grow += 1;
        if grow > 60 {
            return lo;
        }
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * hi {
            break;
        }
    }
    lo
}

/// Sampled `d(π(z), K/∼)` over 2048 directions per density.
pub fn distance_to_k(z: &StateZ, e: f64, setup: &FluidSetup) -> f64 {
    let pz = project(z);
    let dirs = sphere_directions(setup.n, 2048, 0x5eed);
    let mut best = f64::INFINITY;
    for mu in [setup.rho_minus, setup.rho_plus] {
        for b in &dirs {
            best = best.min((&pz - &k_point(mu, b, e)).norm());
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq)]
pub struct SegmentSearch {
    /// `z̄ ∈ Λ` with `z ± z̄` in the closed hull.
    pub zbar: StateZ,
    /// `|π(z̄)|`.
    pub length: f64,
    /// Sampled `d(π(z), K/∼)`.
    pub distance_to_k: f64,
    /// `length / distance_to_k`.
    pub ratio: f64,
    /// `1 / (2 dim π(Z))`.
    pub bound: f64,
    pub candidates: usize,
    /// Set when the best candidate stays below `bound`.
    pub exhausted: bool,
}

/// Heuristic search for a long admissible segment through an interior point.
/// Candidates are the Muskat direction, Euler directions and connectors of
/// sampled `K`-pairs; `budget` caps the number of candidates.
pub fn find_segment(
    z: &StateZ,
    e: f64,
    setup: &FluidSetup,
    budget: usize,
    seed: u64,
) -> Result<SegmentSearch> {
    let n = setup.n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut candidates: Vec<StateZ> = Vec::new();
    if let Ok(d) = muskat_direction(z, setup) {
        candidates.push(d);
    }
    let mut k_seed = seed.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    while candidates.len() < budget {
        match candidates.len() % 3 {
            0 | 1 => {
                let w = DVector::from_fn(n, |_, _| StandardNormal.sample(&mut rng));
                let s = SymTraceless::from_matrix(&DMatrix::from_fn(n, n, |_, _| {
                    StandardNormal.sample(&mut rng)
                }));
                let lambda = match rng.gen_range(0..3) {
                    0 => setup.rho_minus,
                    1 => setup.rho_plus,
                    _ => rng.gen_range(setup.rho_minus..setup.rho_plus),
                };
                if let Ok(d) = euler_direction(&w, &s, lambda) {
                    candidates.push(d);
                }
            }
            _ => {
                k_seed = k_seed.wrapping_add(1);
                let pair = sample_k(e, setup, 2, k_seed);
                let z1 = pair[0].embed(0.0);
                let z2 = pair[1].embed(0.0);
                match connect_in_k(&z1, &z2, setup) {
                    Ok(d) => candidates.push(d),
                    Err(_) => candidates.push(StateZ::zeros(n)),
                }
            }
        }
    }
    let mut best: Option<(f64, StateZ)> = None;
    for d in &candidates {
        let len = project(d).norm();
        if len == 0.0 {
            continue;
        }
        let unit = d * (1.0 / len);
        let s = segment_along(z, &unit, e, setup);
        if s > 0.0 && best.as_ref().is_none_or(|(b, _)| s > *b) {
            best = Some((s, &unit * s));
        }
    }
    let (length, zbar) = best.ok_or(Error::SearchBudgetExhausted)?;
    let distance = distance_to_k(z, e, setup);
    let bound = 1.0 / (2.0 * ReducedState::dim(n) as f64);
    let ratio = if distance > 0.0 { length / distance } else { f64::INFINITY };
    Ok(SegmentSearch {
        zbar,
        length,
        distance_to_k: distance,
        ratio,
        bound,
        candidates: candidates.len(),
        exhausted: ratio < bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> FluidSetup {
        FluidSetup::planar(0.25, 4.0, 1.0).unwrap()
    }

    #[test]
    fn zero_is_not_in_cone() {
        assert_eq!(in_cone(&StateZ::zeros(2), CONE_TOL), Err(Error::DegenerateDirection));
    }

    #[test]
    fn euler_example_diag() {
        let s = 0.7;
        let w = DVector::from_vec(vec![1.0, 0.0]);
        let (z, xi, c) =
            euler_direction_with_kernel(&w, &SymTraceless::diag2(s), 1.3).unwrap();
        assert_eq!(xi, DVector::from_vec(vec![0.0, 1.0]));
        assert_eq!(z.p, s);
        assert_eq!(c, 0.0);
        let cert = in_cone(&z, CONE_TOL).unwrap();
        assert!(cert.residual < 1e-14);
        assert!(cert.c.abs() < 1e-14);
    }

    #[test]
    fn euler_zero_stress_gives_zero_pressure() {
        let w = DVector::from_vec(vec![0.3, -1.2]);
        let (z, _, c) = euler_direction_with_kernel(&w, &SymTraceless::zeros(2), 2.0).unwrap();
        assert_eq!((z.p, c), (0.0, 0.0));
        assert!(in_cone(&z, CONE_TOL).is_ok());
    }

    #[test]
    fn euler_in_three_dimensions() {
        let w = DVector::from_vec(vec![0.3, -1.2, 0.5]);
        let s = SymTraceless::from_entries(3, vec![0.4, 0.1, -0.3, 0.9, 0.2]).unwrap();
        let (z, xi, c) = euler_direction_with_kernel(&w, &s, 0.8).unwrap();
        assert!(xi.dot(&w).abs() < 1e-12);
        let mut k = xi.clone().insert_row(3, c);
        k /= k.norm();
        assert!((cone_matrix(&z) * k).norm() < 1e-12);
    }

    #[test]
    fn rest_state_muskat_segment_spans_density_gap() {
        let s = setup();
        let mut z = StateZ::zeros(2);
        z.rho = 1.0;
        let d = muskat_direction(&z, &s).unwrap();
        assert_eq!(d.rho, 1.0);
        assert!(project(&d).v.norm() == 0.0 && d.u.norm() == 0.0);
        let len = segment_along(&z, &d, 0.5, &s);
        assert!((len - 0.75).abs() <= K_TOL * s.rho_minus * 1.01, "{len}");
    }

    #[test]
    fn random_dense_matrix_is_not_in_cone() {
        let z = StateZ {
            rho: 0.4,
            v: DVector::from_vec(vec![1.0, 0.2]),
            u: DVector::from_vec(vec![-0.3, 0.8]),
            s: SymTraceless::from_entries(2, vec![0.6, 0.1]).unwrap(),
            p: 0.9,
        };
        assert!(matches!(in_cone(&z, CONE_TOL), Err(Error::NotInCone { .. })));
    }
}
