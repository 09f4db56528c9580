use rayon::prelude::*;

use crate::error::GeoError;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Index and distance of the point of `v` closest to `p`; `None` when `v` is empty.
pub fn nearest<P: AsRef<[f64]>>(p: &[f64], v: &[P]) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, q) in v.iter().enumerate() {
        let d2: f64 = p.iter().zip(q.as_ref()).map(|(x, y)| (x - y) * (x - y)).sum();
        if best.map_or(true, |(_, b)| d2 < b) {
            best = Some((i, d2));
        }
    }
    best.map(|(i, d2)| (i, d2.sqrt()))
}

/// `sup_{u ∈ U} inf_{v ∈ V} |u − v|`.
///
/// Not symmetric: `asym_dist(U, V) = 0` whenever `U ⊂ V`.
pub fn asym_dist<P, Q>(u: &[P], v: &[Q]) -> Result<f64, GeoError>
where
    P: AsRef<[f64]> + Sync,
    Q: AsRef<[f64]> + Sync,
{
    if u.is_empty() {
        return Err(GeoError::EmptySet("U"));
    }
    if v.is_empty() {
        return Err(GeoError::EmptySet("V"));
    }
    let n = u[0].as_ref().len();
    for p in u.iter().map(|p| p.as_ref()).chain(v.iter().map(|q| q.as_ref())) {
        if p.len() != n {
            return Err(GeoError::DimensionMismatch { expected: n, got: p.len() });
        }
    }
    let worst = u
        .par_iter()
        .map(|p| nearest(p.as_ref(), v).map(|(_, d)| d).unwrap_or(f64::INFINITY))
        .reduce(|| 0.0, f64::max);
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_pair() {
        assert_eq!(asym_dist(&[vec![0.0, 0.0]], &[vec![3.0, 4.0]]).unwrap(), 5.0);
    }

    #[test]
    fn containment_and_asymmetry() {
        let u = vec![vec![0.0, 0.0]];
        let v = vec![vec![0.0, 0.0], vec![5.0, 0.0]];
        assert_eq!(asym_dist(&u, &v).unwrap(), 0.0);
        assert_eq!(asym_dist(&v, &u).unwrap(), 5.0);
    }

    #[test]
    fn farthest_member() {
        let u = vec![vec![0.0, 0.0], vec![1.0, 0.0]];
        assert_eq!(asym_dist(&u, &[vec![0.0, 0.0]]).unwrap(), 1.0);
    }

    #[test]
    fn empty_and_mismatched_inputs() {
        let empty: Vec<Vec<f64>> = vec![];
        assert!(matches!(asym_dist(&empty, &[vec![0.0]]), Err(GeoError::EmptySet("U"))));
        assert!(matches!(asym_dist(&[vec![0.0]], &empty), Err(GeoError::EmptySet("V"))));
        assert!(matches!(
            asym_dist(&[vec![0.0]], &[vec![0.0, 1.0]]),
            Err(GeoError::DimensionMismatch { expected: 1, got: 2 })
        ));
    }
}
