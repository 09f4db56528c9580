use rand::Rng;
use vardir_geonet::sampling::random_unit_vector;
use vardir_geonet::{norm, Annulus};

/// Where samples are seeded and accepted.
#[derive(Clone, Debug, PartialEq)]
pub enum Region {
    /// `A_n(R) = {R^{-1} ≤ |x| < 2R}`.
    Annulus(f64),
    /// Axis-aligned box `[lo_i, hi_i]`.
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// Open ball `|x| < r`.
    Ball(f64),
    /// `A_n(r) ∩ {|x_n| < s}`, the annulus cut to a slab around `x_n = 0`.
    Slab { r: f64, s: f64 },
}

/// Points within this distance outside a region boundary still count as inside,
/// so that projected samples on a boundary sphere are not rejected by rounding.
pub const BOUNDARY_SLACK: f64 = 1e-9;

impl Region {
    pub fn cube(n: usize, half: f64) -> Self {
        Region::Box { lo: vec![-half; n], hi: vec![half; n] }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Region::Annulus(r) => {
                let a = Annulus { r: *r };
                let t = norm(x);
                t >= a.inner() - BOUNDARY_SLACK && t < a.outer() + BOUNDARY_SLACK
            }
            Region::Box { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(v, (l, h))| *v >= l - BOUNDARY_SLACK && *v <= h + BOUNDARY_SLACK),
            Region::Ball(r) => norm(x) < r + BOUNDARY_SLACK,
            Region::Slab { r, s } => {
                Region::Annulus(*r).contains(x) && x.last().is_some_and(|v| v.abs() < s + BOUNDARY_SLACK)
            }
        }
    }

    /// Uniform-ish seed point inside the region.
    pub fn seed_point<R: Rng>(&self, n: usize, rng: &mut R) -> Vec<f64> {
        match self {
            Region::Annulus(r) => {
                let a = Annulus { r: *r };
                let dir = random_unit_vector(rng, n);
                let t = rng.gen_range(a.inner()..a.outer());
                dir.into_iter().map(|v| v * t).collect()
            }
            Region::Box { lo, hi } => lo.iter().zip(hi).map(|(l, h)| rng.gen_range(*l..=*h)).collect(),
            Region::Ball(r) => {
                let dir = random_unit_vector(rng, n);
                let t = r * rng.gen::<f64>().powf(1.0 / n as f64);
                dir.into_iter().map(|v| v * t).collect()
            }
            Region::Slab { r, s } => {
                let a = Annulus { r: *r };
                let t = rng.gen_range(a.inner()..a.outer());
                let last = rng.gen_range(-s..*s).clamp(-t, t);
                let head = random_unit_vector(rng, n - 1);
                let scale = (t * t - last * last).sqrt();
                head.into_iter().map(|v| v * scale).chain(std::iter::once(last)).collect()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use vardir_geonet::sampling::rng;

    #[test]
    fn seeds_land_inside() {
        let mut r = rng(0);
        for reg in [Region::Annulus(1.0), Region::cube(3, 2.0), Region::Ball(0.5), Region::Slab { r: 1.0, s: 0.1 }] {
            for _ in 0..200 {
                let p = reg.seed_point(3, &mut r);
                assert!(reg.contains(&p), "{reg:?} {p:?}");
            }
        }
    }

    #[test]
    fn unit_sphere_is_inside_unit_annulus() {
        assert!(Region::Annulus(1.0).contains(&[1.0 - 1e-12, 0.0, 0.0]));
        assert!(!Region::Annulus(1.0).contains(&[0.9, 0.0, 0.0]));
    }
}
