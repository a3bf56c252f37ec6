//! Quasi-uniform direction sets on the unit sphere S^{n-1}.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// `count` unit vectors in R^n: equal angles for n = 2, a Fibonacci lattice
/// for n = 3, normalized seeded Gaussians otherwise.
pub fn sphere_directions(n: usize, count: usize, seed: u64) -> Vec<DVector<f64>> {
    match n {
        1 => (0..count)
            .map(|k| DVector::from_element(1, if k % 2 == 0 { 1.0 } else { -1.0 }))
            .collect(),
        2 => (0..count)
            .map(|k| {
                let a = std::f64::consts::TAU * k as f64 / count as f64;
                DVector::from_vec(vec![a.cos(), a.sin()])
            })
            .collect(),
        3 => {
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..count)
                .map(|k| {
                    let z = 1.0 - (2.0 * k as f64 + 1.0) / count as f64;
                    let r = (1.0 - z * z).sqrt();
                    let phi = golden * k as f64;
                    DVector::from_vec(vec![r * phi.cos(), r * phi.sin(), z])
                })
                .collect()
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..count)
                .map(|_| loop {
                    let v = DVector::from_fn(n, |_, _| StandardNormal.sample(&mut rng));
                    let nv: f64 = v.norm();
                    if nv > 1e-8 {
                        break v / nv;
                    }
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn directions_are_unit() {
        for n in 2..=5 {
            for d in sphere_directions(n, 64, 3) {
                assert!((d.norm() - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn fibonacci_is_balanced() {
        let dirs = sphere_directions(3, 2048, 0);
        let mean = dirs.iter().fold(DVector::zeros(3), |a, d| a + d) / 2048.0;
        assert!(mean.norm() < 1e-3);
    }
}
