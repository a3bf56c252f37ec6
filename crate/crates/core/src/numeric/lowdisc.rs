//! Halton low-discrepancy sequences.

const PRIMES: [u32; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

/// Radical inverse of `i` in base `b`.
pub fn radical_inverse(mut i: u64, b: u32) -> f64 {
    let b = b as u64;
    let inv = 1.0 / b as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % b) as f64;
        i /= b;
        f *= inv;
    }
    r
}

/// Point `i` of the `d`-dimensional Halton sequence in `[0,1)^d` (`d ≤ 8`).
pub fn halton(i: u64, d: usize) -> Vec<f64> {
    PRIMES[..d].iter().map(|&p| radical_inverse(i, p)).collect()
}

/// First `count` Halton points mapped to the unit ball of R³ (by rejection),
/// scaled to radius `radius`.
pub fn halton_ball3(count: usize, radius: f64) -> Vec<[f64; 3]> {
    let mut out = Vec::with_capacity(count);
    let mut i = 1u64;
    while out.len() < count {
        let h = halton(i, 3);
        let p = [2.0 * h[0] - 1.0, 2.0 * h[1] - 1.0, 2.0 * h[2] - 1.0];
        if p.iter().map(|x| x * x).sum::<f64>() < 1.0 {
            out.push(p.map(|x| x * radius));
        }
        i += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_two_sequence() {
        let v: Vec<f64> = (1..5).map(|i| radical_inverse(i, 2)).collect();
        assert_eq!(v, vec![0.5, 0.25, 0.75, 0.125]);
    }

    #[test]
    fn ball_points_inside() {
        let pts = halton_ball3(500, 0.9);
        assert_eq!(pts.len(), 500);
        assert!(pts.iter().all(|p| p.iter().map(|x| x * x).sum::<f64>() < 0.81));
    }
}
