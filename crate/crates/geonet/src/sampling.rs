//! Deterministic point generators shared by nets, tests and experiments.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard normal variate by Box–Muller.
pub fn gaussian<R: Rng>(r: &mut R) -> f64 {
    let u1: f64 = r.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = r.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

pub fn random_unit_vector<R: Rng>(r: &mut R, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| gaussian(r)).collect();
        let s = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if s > 1e-8 {
            return v.into_iter().map(|x| x / s).collect();
        }
    }
}

/// Uniformly random rotation of `R^3` (quaternion method), as a row-major matrix.
pub fn random_rotation3<R: Rng>(r: &mut R) -> [[f64; 3]; 3] {
    let q = random_unit_vector(r, 4);
    let (w, x, y, z) = (q[0], q[1], q[2], q[3]);
    [
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
        [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
        [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
    ]
}

pub fn rotate3(m: &[[f64; 3]; 3], p: [f64; 3]) -> [f64; 3] {
    [
        m[0][0] * p[0] + m[0][1] * p[1] + m[0][2] * p[2],
        m[1][0] * p[0] + m[1][1] * p[1] + m[1][2] * p[2],
        m[2][0] * p[0] + m[2][1] * p[1] + m[2][2] * p[2],
    ]
}

/// Point `k` of the `count`-point Fibonacci lattice on `S^2`.
pub fn fibonacci_point(k: usize, count: usize) -> [f64; 3] {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    let z = 1.0 - (2.0 * k as f64 + 1.0) / count as f64;
    let r = (1.0 - z * z).max(0.0).sqrt();
    let phi = golden * k as f64;
    [r * phi.cos(), r * phi.sin(), z]
}

pub fn fibonacci_sphere(count: usize) -> Vec<Vec<f64>> {
    (0..count).map(|k| fibonacci_point(k, count).to_vec()).collect()
}

/// `count` equispaced points on `S^1` starting at angle `offset`.
pub fn circle_points(count: usize, offset: f64) -> Vec<Vec<f64>> {
    (0..count)
        .map(|k| {
            let t = offset + std::f64::consts::TAU * k as f64 / count as f64;
            vec![t.cos(), t.sin()]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_is_orthogonal() {
        let m = random_rotation3(&mut rng(3));
        for i in 0..3 {
            for j in 0..3 {
                let d: f64 = (0..3).map(|k| m[i][k] * m[j][k]).sum();
                assert!((d - if i == j { 1.0 } else { 0.0 }).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn fibonacci_points_are_unit() {
        for p in fibonacci_sphere(100) {
            assert!((crate::norm(&p) - 1.0).abs() < 1e-12);
        }
    }
}
