//! Forward-mode derivative arithmetic.
//!
//! [`Dual`] carries a value and a gradient, [`Jet`] additionally carries the
//! full Hessian. Both are generic over a [`Real`] scalar so they nest:
//! `Jet<Dual<f64, 3>, 3>` yields third derivatives in three variables.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

/// Scalar abstraction shared by `f64`, [`Dual`] and [`Jet`].
pub trait Real:
    Copy
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
{
    fn cst(c: f64) -> Self;
    /// Underlying `f64` value, stripping all derivative parts.
    fn value(&self) -> f64;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn exp(self) -> Self;
    fn sqrt(self) -> Self;
    fn recip(self) -> Self;
    fn powi(self, k: i32) -> Self;

    fn zero() -> Self {
        Self::cst(0.0)
    }
    fn square(self) -> Self {
        self * self
    }
}

impl Real for f64 {
    fn cst(c: f64) -> Self {
        c
    }
    fn value(&self) -> f64 {
        *self
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn recip(self) -> Self {
        1.0 / self
    }
    fn powi(self, k: i32) -> Self {
        f64::powi(self, k)
    }
}

/// Value plus first derivatives in `N` variables.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual<T, const N: usize> {
    pub v: T,
    pub d: [T; N],
}

impl<T: Real, const N: usize> Dual<T, N> {
    pub fn constant(v: T) -> Self {
        Self { v, d: [T::zero(); N] }
    }

    pub fn variable(v: T, i: usize) -> Self {
        let mut d = [T::zero(); N];
        d[i] = T::cst(1.0);
        Self { v, d }
    }

    /// Applies a scalar function given its value and derivative at `self.v`.
    pub fn chain(self, f: T, df: T) -> Self {
        let mut d = self.d;
        for x in d.iter_mut() {
            *x = df * *x;
        }
        Self { v: f, d }
    }
}

impl<T: Real, const N: usize> Add for Dual<T, N> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut d = self.d;
        for i in 0..N {
            d[i] += o.d[i];
        }
        Self { v: self.v + o.v, d }
    }
}

impl<T: Real, const N: usize> Sub for Dual<T, N> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let mut d = self.d;
        for i in 0..N {
            d[i] -= o.d[i];
        }
        Self { v: self.v - o.v, d }
    }
}

impl<T: Real, const N: usize> Mul for Dual<T, N> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut d = [T::zero(); N];
        for i in 0..N {
            d[i] = self.v * o.d[i] + self.d[i] * o.v;
        }
        Self { v: self.v * o.v, d }
    }
}

impl<T: Real, const N: usize> Div for Dual<T, N> {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Self) -> Self {
        self * o.recip()
    }
}

impl<T: Real, const N: usize> Neg for Dual<T, N> {
    type Output = Self;
    fn neg(self) -> Self {
        let mut d = self.d;
        for x in d.iter_mut() {
            *x = -*x;
        }
        Self { v: -self.v, d }
    }
}

impl<T: Real, const N: usize> Real for Dual<T, N> {
    fn cst(c: f64) -> Self {
        Self::constant(T::cst(c))
    }
    fn value(&self) -> f64 {
        self.v.value()
    }
    fn sin(self) -> Self {
        self.chain(self.v.sin(), self.v.cos())
    }
    fn cos(self) -> Self {
        self.chain(self.v.cos(), -self.v.sin())
    }
    fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e)
    }
    fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        self.chain(s, (s * 2.0).recip())
    }
    fn recip(self) -> Self {
        let r = self.v.recip();
        self.chain(r, -(r * r))
    }
    fn powi(self, k: i32) -> Self {
        match k {
            0 => Self::cst(1.0),
            _ => self.chain(self.v.powi(k), self.v.powi(k - 1) * k as f64),
        }
    }
}

/// Value, gradient and symmetric Hessian in `N` variables.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet<T, const N: usize> {
    pub v: T,
    pub g: [T; N],
    pub h: [[T; N]; N],
}

impl<T: Real, const N: usize> Jet<T, N> {
    pub fn constant(v: T) -> Self {
        Self {
            v,
            g: [T::zero(); N],
            h: [[T::zero(); N]; N],
        }
    }

    pub fn variable(v: T, i: usize) -> Self {
        let mut j = Self::constant(v);
        j.g[i] = T::cst(1.0);
        j
    }

    /// Applies a scalar function given `f`, `f'`, `f''` at `self.v`.
    pub fn chain(self, f: T, df: T, ddf: T) -> Self {
        let mut out = Self::constant(f);
        for i in 0..N {
            out.g[i] = df * self.g[i];
            for j in 0..N {
                out.h[i][j] = df * self.h[i][j] + ddf * self.g[i] * self.g[j];
            }
        }
        out
    }

    fn map(self, f: impl Fn(T) -> T) -> Self {
        let mut out = self;
        out.v = f(out.v);
        for i in 0..N {
            out.g[i] = f(out.g[i]);
            for j in 0..N {
                out.h[i][j] = f(out.h[i][j]);
            }
        }
        out
    }

    fn zip(self, o: Self, f: impl Fn(T, T) -> T) -> Self {
        let mut out = self;
        out.v = f(self.v, o.v);
        for i in 0..N {
            out.g[i] = f(self.g[i], o.g[i]);
            for j in 0..N {
                out.h[i][j] = f(self.h[i][j], o.h[i][j]);
            }
        }
        out
    }
}

impl<const N: usize> Jet<Dual<f64, N>, N> {
    /// Seeds variable `i` for third-order differentiation.
    pub fn variable3(x: f64, i: usize) -> Self {
        let mut j = Self::constant(Dual::variable(x, i));
        j.g[i] = Dual::constant(1.0);
        j
    }

    /// `∂_i ∂_j ∂_k` of the represented function.
    pub fn third(&self, i: usize, j: usize, k: usize) -> f64 {
        self.h[i][j].d[k]
    }

    pub fn second(&self, i: usize, j: usize) -> f64 {
        self.h[i][j].v
    }

    pub fn first(&self, i: usize) -> f64 {
        self.g[i].v
    }
}

impl<T: Real, const N: usize> Add for Jet<T, N> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        self.zip(o, |a, b| a + b)
    }
}

impl<T: Real, const N: usize> Sub for Jet<T, N> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self.zip(o, |a, b| a - b)
    }
}

impl<T: Real, const N: usize> Mul for Jet<T, N> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut out = Self::constant(self.v * o.v);
        for i in 0..N {
            out.g[i] = self.v * o.g[i] + self.g[i] * o.v;
            for j in 0..N {
                out.h[i][j] = self.v * o.h[i][j]
                    + self.h[i][j] * o.v
                    + self.g[i] * o.g[j]
                    + self.g[j] * o.g[i];
            }
        }
        out
    }
}

impl<T: Real, const N: usize> Div for Jet<T, N> {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Self) -> Self {
        self * o.recip()
    }
}

impl<T: Real, const N: usize> Neg for Jet<T, N> {
    type Output = Self;
    fn neg(self) -> Self {
        self.map(|a| -a)
    }
}

impl<T: Real, const N: usize> Real for Jet<T, N> {
    fn cst(c: f64) -> Self {
        Self::constant(T::cst(c))
    }
    fn value(&self) -> f64 {
        self.v.value()
    }
    fn sin(self) -> Self {
        let (s, c) = (self.v.sin(), self.v.cos());
        self.chain(s, c, -s)
    }
    fn cos(self) -> Self {
        let (s, c) = (self.v.sin(), self.v.cos());
        self.chain(c, -s, -c)
    }
    fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }
    fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        let d = (s * 2.0).recip();
        self.chain(s, d, -(d / self.v) * 0.5)
    }
    fn recip(self) -> Self {
        let r = self.v.recip();
        let r2 = r * r;
        self.chain(r, -r2, r2 * r * 2.0)
    }
    fn powi(self, k: i32) -> Self {
        match k {
            0 => Self::cst(1.0),
            1 => self,
            _ => self.chain(
                self.v.powi(k),
                self.v.powi(k - 1) * k as f64,
                self.v.powi(k - 2) * (k * (k - 1)) as f64,
            ),
        }
    }
}

macro_rules! scalar_ops {
    ($ty:ident) => {
        impl<T: Real, const N: usize> Add<f64> for $ty<T, N> {
            type Output = Self;
            fn add(mut self, c: f64) -> Self {
                self.v = self.v + c;
                self
            }
        }
        impl<T: Real, const N: usize> Sub<f64> for $ty<T, N> {
            type Output = Self;
            fn sub(mut self, c: f64) -> Self {
                self.v = self.v - c;
                self
            }
        }
        impl<T: Real, const N: usize> Mul<f64> for $ty<T, N> {
            type Output = Self;
            fn mul(self, c: f64) -> Self {
                self * Self::cst(c)
            }
        }
        impl<T: Real, const N: usize> Div<f64> for $ty<T, N> {
            type Output = Self;
            fn div(self, c: f64) -> Self {
                self * Self::cst(1.0 / c)
            }
        }
        impl<T: Real, const N: usize> AddAssign for $ty<T, N> {
            fn add_assign(&mut self, o: Self) {
                *self = *self + o;
            }
        }
        impl<T: Real, const N: usize> SubAssign for $ty<T, N> {
            fn sub_assign(&mut self, o: Self) {
                *self = *self - o;
            }
        }
        impl<T: Real, const N: usize> MulAssign for $ty<T, N> {
            fn mul_assign(&mut self, o: Self) {
                *self = *self * o;
            }
        }
    };
}

scalar_ops!(Dual);
scalar_ops!(Jet);
