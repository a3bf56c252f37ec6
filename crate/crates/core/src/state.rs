//! State space, traceless symmetric matrices and the lab/accelerated frame
//! transforms.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Two fluid densities under gravity in dimension `n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FluidSetup {
    pub rho_minus: f64,
    pub rho_plus: f64,
    pub g: f64,
    pub n: usize,
}

impl FluidSetup {
    pub fn new(rho_minus: f64, rho_plus: f64, g: f64, n: usize) -> Result<Self> {
        if !(rho_minus.is_finite() && rho_plus.is_finite() && g.is_finite()) {
            return Err(Error::InvalidSetup("parameters must be finite".into()));
        }
        if !(rho_minus > 0.0) {
            return Err(Error::InvalidSetup(format!("rho_minus = {rho_minus} must be positive")));
        }
        if !(rho_minus < rho_plus) {
            return Err(Error::InvalidSetup(format!(
                "need rho_minus < rho_plus, got {rho_minus} >= {rho_plus}"
            )));
        }
        if !(g > 0.0) {
            return Err(Error::InvalidSetup(format!("g = {g} must be positive")));
        }
        if n < 2 {
            return Err(Error::InvalidSetup(format!("dimension n = {n} must be at least 2")));
        }
        Ok(Self { rho_minus, rho_plus, g, n })
    }

    /// Planar setup with `n = 2`.
    pub fn planar(rho_minus: f64, rho_plus: f64, g: f64) -> Result<Self> {
        Self::new(rho_minus, rho_plus, g, 2)
    }

    pub fn atwood(&self) -> f64 {
        (self.rho_plus - self.rho_minus) / (self.rho_plus + self.rho_minus)
    }

    pub fn ratio_r(&self) -> f64 {
        (self.rho_plus / self.rho_minus).sqrt()
    }

    /// Time at which the upper mixing-zone edge sits at `x₂ = ρ₋^{-1/2}`.
    pub fn t_ref(&self) -> f64 {
        (2.0 / (self.g * (self.rho_plus.sqrt() - self.rho_minus.sqrt()))).sqrt()
    }
}

/// Symmetric `n×n` matrix with zero trace, stored by its independent entries
/// (upper triangle row by row, last diagonal entry omitted).
#[derive(Clone, Debug, PartialEq)]
pub struct SymTraceless {
    n: usize,
    entries: Vec<f64>,
}

impl SymTraceless {
    pub fn dim(n: usize) -> usize {
        n * (n + 1) / 2 - 1
    }

    pub fn zeros(n: usize) -> Self {
        Self { n, entries: vec![0.0; Self::dim(n)] }
    }

    pub fn from_entries(n: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != Self::dim(n) {
            return Err(Error::DimensionMismatch { expected: Self::dim(n), got: entries.len() });
        }
        Ok(Self { n, entries })
    }

    /// Traceless part of the symmetric part of `m`.
    pub fn from_matrix(m: &DMatrix<f64>) -> Self {
        split_trace(m).0
    }

    /// `diag(-s, s)` for `n = 2`, the pattern used by the planar subsolution.
    pub fn diag2(s11: f64) -> Self {
        Self { n: 2, entries: vec![s11, 0.0] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    fn index(&self, i: usize, j: usize) -> usize {
        (0..i).map(|k| self.n - k).sum::<usize>() + (j - i)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        if i == self.n - 1 && j == self.n - 1 {
            -(0..self.n - 1).map(|k| self.entries[self.index(k, k)]).sum::<f64>()
        } else {
            self.entries[self.index(i, j)]
        }
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    /// Frobenius norm of the full matrix.
    pub fn norm(&self) -> f64 {
        self.to_matrix().norm()
    }

    fn zip(&self, o: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(self.n, o.n, "dimension mismatch");
        Self {
            n: self.n,
            entries: self.entries.iter().zip(&o.entries).map(|(a, b)| f(*a, *b)).collect(),
        }
    }
}

impl Add for &SymTraceless {
    type Output = SymTraceless;
    fn add(self, o: Self) -> SymTraceless {
        self.zip(o, |a, b| a + b)
    }
}

impl Sub for &SymTraceless {
    type Output = SymTraceless;
    fn sub(self, o: Self) -> SymTraceless {
        self.zip(o, |a, b| a - b)
    }
}

impl Mul<f64> for &SymTraceless {
    type Output = SymTraceless;
    fn mul(self, c: f64) -> SymTraceless {
        SymTraceless { n: self.n, entries: self.entries.iter().map(|a| a * c).collect() }
    }
}

/// Splits a square matrix into the traceless part of its symmetric part and
/// `trace / n`.
pub fn split_trace(m: &DMatrix<f64>) -> (SymTraceless, f64) {
    let n = m.nrows();
    let q = m.trace() / n as f64;
    let mut entries = Vec::with_capacity(SymTraceless::dim(n));
    for i in 0..n {
        for j in i..n {
            if i == n - 1 && j == n - 1 {
                continue;
            }
            let sym = 0.5 * (m[(i, j)] + m[(j, i)]);
            entries.push(if i == j { sym - q } else { sym });
        }
    }
    (SymTraceless { n, entries }, q)
}

pub fn outer(a: &DVector<f64>, b: &DVector<f64>) -> DMatrix<f64> {
    a * b.transpose()
}

/// `a⊗b + b⊗a`.
pub fn sym_outer(a: &DVector<f64>, b: &DVector<f64>) -> DMatrix<f64> {
    let ab = outer(a, b);
    &ab + ab.transpose()
}

pub fn unit(n: usize, k: usize) -> DVector<f64> {
    let mut e = DVector::zeros(n);
    e[k] = 1.0;
    e
}

/// One point `z = (ρ, v, u, S, P)` of the state space. In the accelerated
/// frame the same fields hold `(μ, w, m, σ, q)`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateZ {
    pub rho: f64,
    pub v: DVector<f64>,
    pub u: DVector<f64>,
    pub s: SymTraceless,
    pub p: f64,
}

/// `π(z) = (ρ, v, u, S)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedState {
    pub rho: f64,
    pub v: DVector<f64>,
    pub u: DVector<f64>,
    pub s: SymTraceless,
}

impl StateZ {
    pub fn zeros(n: usize) -> Self {
        Self {
            rho: 0.0,
            v: DVector::zeros(n),
            u: DVector::zeros(n),
            s: SymTraceless::zeros(n),
            p: 0.0,
        }
    }

    pub fn n(&self) -> usize {
        self.v.len()
    }

    /// `σ + q·id` as a full matrix.
    pub fn stress(&self) -> DMatrix<f64> {
        let n = self.n();
        self.s.to_matrix() + DMatrix::identity(n, n) * self.p
    }

    /// Euclidean norm over all stored components, with `S` measured in the
    /// full-matrix Frobenius norm.
    pub fn norm(&self) -> f64 {
        (self.rho * self.rho
            + self.v.norm_squared()
            + self.u.norm_squared()
            + self.s.norm().powi(2)
            + self.p * self.p)
            .sqrt()
    }

    /// Inner product matching [`StateZ::norm`].
    pub fn dot(&self, o: &StateZ) -> f64 {
        let (a, b) = (self.s.to_matrix(), o.s.to_matrix());
        self.rho * o.rho + self.v.dot(&o.v) + self.u.dot(&o.u) + a.dot(&b) + self.p * o.p
    }

    pub fn is_finite(&self) -> bool {
        self.rho.is_finite()
            && self.p.is_finite()
            && self.v.iter().chain(self.u.iter()).chain(self.s.entries()).all(|x| x.is_finite())
    }
}

impl ReducedState {
    pub fn embed(&self, p: f64) -> StateZ {
        StateZ { rho: self.rho, v: self.v.clone(), u: self.u.clone(), s: self.s.clone(), p }
    }

    pub fn norm(&self) -> f64 {
        (self.rho * self.rho + self.v.norm_squared() + self.u.norm_squared() + self.s.norm().powi(2))
            .sqrt()
    }

    /// Dimension of the reduced space for spatial dimension `n`.
    pub fn dim(n: usize) -> usize {
        1 + 2 * n + SymTraceless::dim(n)
    }
}

impl Add for &StateZ {
    type Output = StateZ;
    fn add(self, o: Self) -> StateZ {
        StateZ {
            rho: self.rho + o.rho,
            v: &self.v + &o.v,
            u: &self.u + &o.u,
            s: &self.s + &o.s,
            p: self.p + o.p,
        }
    }
}

impl Sub for &StateZ {
    type Output = StateZ;
    fn sub(self, o: Self) -> StateZ {
        StateZ {
            rho: self.rho - o.rho,
            v: &self.v - &o.v,
            u: &self.u - &o.u,
            s: &self.s - &o.s,
            p: self.p - o.p,
        }
    }
}

impl Mul<f64> for &StateZ {
    type Output = StateZ;
    fn mul(self, c: f64) -> StateZ {
        StateZ { rho: self.rho * c, v: &self.v * c, u: &self.u * c, s: &self.s * c, p: self.p * c }
    }
}

impl Neg for &StateZ {
    type Output = StateZ;
    fn neg(self) -> StateZ {
        self * -1.0
    }
}

impl Sub for &ReducedState {
    type Output = ReducedState;
    fn sub(self, o: Self) -> ReducedState {
        ReducedState { rho: self.rho - o.rho, v: &self.v - &o.v, u: &self.u - &o.u, s: &self.s - &o.s }
    }
}

pub fn project(z: &StateZ) -> ReducedState {
    ReducedState { rho: z.rho, v: z.v.clone(), u: z.u.clone(), s: z.s.clone() }
}

/// Accelerated-frame state `(μ, w, m, σ, q)` to lab-frame `(ρ, v, u, S, P)`.
pub fn to_lab(z: &StateZ, t: f64, setup: &FluidSetup) -> StateZ {
    let n = z.n();
    let a = setup.g * t;
    let en = unit(n, n - 1);
    let mu = z.rho;
    let b = sym_outer(&z.u, &en) * (-a) + outer(&en, &en) * (a * a * mu);
    let shift = b.trace() / n as f64;
    let (b0, _) = split_trace(&b);
    StateZ {
        rho: mu,
        v: &z.v - &en * a,
        u: &z.u - &en * (mu * a),
        s: &z.s + &b0,
        p: z.p + shift,
    }
}

/// Lab-frame state to the accelerated frame.
pub fn to_acc(z: &StateZ, t: f64, setup: &FluidSetup) -> StateZ {
    let n = z.n();
    let a = setup.g * t;
    let en = unit(n, n - 1);
    let rho = z.rho;
    let c = sym_outer(&z.u, &en) * a + outer(&en, &en) * (a * a * rho);
    let (c0, shift) = split_trace(&c);
    StateZ { rho, v: &z.v + &en * a, u: &z.u + &en * (rho * a), s: &z.s + &c0, p: z.p + shift }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> FluidSetup {
        FluidSetup::planar(0.25, 4.0, 1.0).unwrap()
    }

    #[test]
    fn symtraceless_is_traceless() {
        let s = SymTraceless::from_entries(3, vec![1.0, 2.0, 3.0, -4.0, 0.5]).unwrap();
        let m = s.to_matrix();
        assert_eq!(m.trace(), 0.0);
        assert_eq!(m, m.transpose());
        assert_eq!(s.get(2, 2), 3.0);
    }

    #[test]
    fn split_roundtrip() {
        let m = DMatrix::from_row_slice(2, 2, &[3.0, 1.0, 1.0, -0.5]);
        let (s, q) = split_trace(&m);
        let back = s.to_matrix() + DMatrix::identity(2, 2) * q;
        assert!((back - m).norm() < 1e-15);
    }

    #[test]
    fn rest_state_maps_to_lab_rest() {
        let s = setup();
        let t = 0.8;
        let mut z = StateZ::zeros(2);
        z.rho = 1.3;
        z.v[1] = s.g * t;
        z.u[1] = z.rho * s.g * t;
        let lab = to_lab(&z, t, &s);
        assert!(lab.v.norm() < 1e-15 && lab.u.norm() < 1e-15);
    }

    #[test]
    fn t_zero_is_identity() {
        let s = setup();
        let z = StateZ {
            rho: 2.0,
            v: DVector::from_vec(vec![0.1, -0.2]),
            u: DVector::from_vec(vec![0.4, 0.3]),
            s: SymTraceless::from_entries(2, vec![0.7, -0.1]).unwrap(),
            p: 1.5,
        };
        assert_eq!(to_lab(&z, 0.0, &s), z);
        assert_eq!(to_acc(&z, 0.0, &s), z);
    }

    #[test]
    fn setup_validation() {
        assert!(FluidSetup::planar(4.0, 0.25, 1.0).is_err());
        assert!(FluidSetup::planar(0.25, 4.0, 0.0).is_err());
        assert!(FluidSetup::new(0.25, 4.0, 1.0, 1).is_err());
        let s = setup();
        assert!((s.atwood() - 15.0 / 17.0).abs() < 1e-15);
        assert!((s.ratio_r() - 4.0).abs() < 1e-15);
        assert!((s.t_ref() - (4.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }
}
