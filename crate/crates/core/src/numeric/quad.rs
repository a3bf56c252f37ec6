//! One-dimensional quadrature: adaptive Gauss–Kronrod (7/15), Gauss–Legendre
//! node generation and compensated summation.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    c: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.c
    }
}

pub fn kahan_sum<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    let mut s = KahanSum::default();
    for x in it {
        s.add(x);
    }
    s.total()
}

/// Single 15-point Kronrod panel on `[a, b]` for a `K`-valued integrand.
/// Returns the Kronrod estimate and `|Kronrod - Gauss|` per component.
pub fn gk15_vec<const K: usize>(
    f: &mut impl FnMut(f64) -> [f64; K],
    a: f64,
    b: f64,
) -> ([f64; K], [f64; K]) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut rk = [0.0; K];
    let mut rg = [0.0; K];
    let fc = f(c);
    for k in 0..K {
        rk[k] = WGK[7] * fc[k];
        rg[k] = WG[3] * fc[k];
    }
    for j in 0..7 {
        let x = h * XGK[j];
        let f1 = f(c - x);
        let f2 = f(c + x);
        for k in 0..K {
            let s = f1[k] + f2[k];
            rk[k] += WGK[j] * s;
            if j % 2 == 1 {
                rg[k] += WG[j / 2] * s;
            }
        }
    }
    let mut err = [0.0; K];
    for k in 0..K {
        rk[k] *= h;
        err[k] = (rk[k] - rg[k] * h).abs();
    }
    (rk, err)
}

pub fn gk15(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let (r, e) = gk15_vec(&mut |x| [f(x)], a, b);
    (r[0], e[0])
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult<const K: usize> {
    pub value: [f64; K],
    pub error: f64,
    pub converged: bool,
    pub panels: usize,
}

struct Panel<const K: usize> {
    a: f64,
    b: f64,
    val: [f64; K],
    err: f64,
}

impl<const K: usize> PartialEq for Panel<K> {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl<const K: usize> Eq for Panel<K> {}
impl<const K: usize> PartialOrd for Panel<K> {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl<const K: usize> Ord for Panel<K> {
    fn cmp(&self, o: &Self) -> Ordering {
        self.err.total_cmp(&o.err)
    }
}

fn norm_inf<const K: usize>(v: &[f64; K]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Globally adaptive GK15 for vector integrands. Stops when the summed error
/// estimate (max over components) is below `max(abs_tol, rel_tol * |I|_inf)`.
pub fn integrate_vec<const K: usize>(
    mut f: impl FnMut(f64) -> [f64; K],
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
) -> QuadResult<K> {
    if a == b {
        return QuadResult {
            value: [0.0; K],
            error: 0.0,
            converged: true,
            panels: 0,
        };
    }
    let mut heap = BinaryHeap::new();
    let (val, e) = gk15_vec(&mut f, a, b);
    heap.push(Panel {
        a,
        b,
        val,
        err: norm_inf(&e),
    });
    loop {
        let mut total = [KahanSum::default(); K];
        let mut err = 0.0;
        for p in heap.iter() {
            for k in 0..K {
                total[k].add(p.val[k]);
            }
            err += p.err;
        }
        let value = total.map(|s| s.total());
        let target = abs_tol.max(rel_tol * norm_inf(&value));
        let panels = heap.len();
        if err <= target || panels >= max_panels {
            return QuadResult {
                value,
                error: err,
                converged: err <= target,
                panels,
            };
        }
        let worst = heap.pop().expect("heap is never empty");
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a || m >= worst.b {
            heap.push(worst);
            return QuadResult {
                value,
                error: err,
                converged: false,
                panels,
            };
        }
        for (lo, hi) in [(worst.a, m), (m, worst.b)] {
            let (val, e) = gk15_vec(&mut f, lo, hi);
            heap.push(Panel {
                a: lo,
                b: hi,
                val,
                err: norm_inf(&e),
            });
        }
    }
}

pub fn integrate(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> QuadResult<1> {
    integrate_vec(|x| [f(x)], a, b, abs_tol, rel_tol, 4000)
}

/// Integrates over consecutive intervals `[pts[i], pts[i+1]]` and sums.
pub fn integrate_vec_pieces<const K: usize>(
    mut f: impl FnMut(f64) -> [f64; K],
    pts: &[f64],
    abs_tol: f64,
    rel_tol: f64,
) -> QuadResult<K> {
    let mut value = [KahanSum::default(); K];
    let mut error = 0.0;
    let mut converged = true;
    let mut panels = 0;
    let pieces = pts.len().saturating_sub(1).max(1);
    for w in pts.windows(2) {
        let r = integrate_vec(&mut f, w[0], w[1], abs_tol / pieces as f64, rel_tol, 2000);
        for k in 0..K {
            value[k].add(r.value[k]);
        }
        error += r.error;
        converged &= r.converged;
        panels += r.panels;
    }
    QuadResult {
        value: value.map(|s| s.total()),
        error,
        converged,
        panels,
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else if n == 1 { z } else { p1 };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * p - pm1) / (z * z - 1.0);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Composite Gauss–Legendre rule on `[a, b]` with `panels` equal panels.
pub fn composite_gl(n: usize, panels: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x0, w0) = gauss_legendre(n);
    let h = (b - a) / panels as f64;
    let mut x = Vec::with_capacity(n * panels);
    let mut w = Vec::with_capacity(n * panels);
    for p in 0..panels {
        let lo = a + p as f64 * h;
        for (xi, wi) in x0.iter().zip(&w0) {
            x.push(lo + 0.5 * h * (xi + 1.0));
            w.push(0.5 * h * wi);
        }
    }
    (x, w)
}
