use std::io::{Read, Write};

use crate::distance::norm;
use crate::error::GeoError;

/// Finite set of distinct vectors in `R^dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectionSet {
    dim: usize,
    points: Vec<Vec<f64>>,
    normalized: bool,
}

const UNIT_TOL: f64 = 1e-12;

impl DirectionSet {
    /// Validates dimensions, distinctness, and (if `normalized`) unit length.
    pub fn new(dim: usize, points: Vec<Vec<f64>>, normalized: bool) -> Result<Self, GeoError> {
        if dim == 0 {
            return Err(GeoError::InvalidArgument("dimension must be positive".into()));
        }
        for p in &points {
            if p.len() != dim {
                return Err(GeoError::DimensionMismatch { expected: dim, got: p.len() });
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(GeoError::InvalidArgument("non-finite coordinate".into()));
            }
            if normalized && (norm(p) - 1.0).abs() > UNIT_TOL {
                return Err(GeoError::InvalidArgument(format!("vector of norm {} flagged normalized", norm(p))));
            }
        }
        let mut keys: Vec<Vec<u64>> = points.iter().map(|p| p.iter().map(|x| (x + 0.0).to_bits()).collect()).collect();
        keys.sort_unstable();
        if keys.windows(2).any(|w| w[0] == w[1]) {
            return Err(GeoError::InvalidArgument("duplicate direction".into()));
        }
        Ok(Self { dim, points, normalized })
    }

    /// Projects every point to the unit sphere, dropping duplicates created by it.
    pub fn normalize(&self) -> Result<Self, GeoError> {
        let mut seen = std::collections::HashSet::new();
        let mut pts = Vec::with_capacity(self.points.len());
        for p in &self.points {
            let r = norm(p);
            if r == 0.0 {
                return Err(GeoError::InvalidArgument("cannot normalize the zero vector".into()));
            }
            let q: Vec<f64> = p.iter().map(|x| x / r).collect();
            if seen.insert(q.iter().map(|x| (x + 0.0).to_bits()).collect::<Vec<_>>()) {
                pts.push(q);
            }
        }
        Self::new(self.dim, pts, true)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn subset(&self, idx: &[usize]) -> Self {
        Self { dim: self.dim, points: idx.iter().map(|&i| self.points[i].clone()).collect(), normalized: self.normalized }
    }

    /// One vector per row, shortest round-trip decimal for every coordinate.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), GeoError> {
        let mut wr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
        for p in &self.points {
            wr.write_record(p.iter().map(|x| format!("{x:?}")))?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R, normalized: bool) -> Result<Self, GeoError> {
        let mut rd = csv::ReaderBuilder::new().has_headers(false).from_reader(r);
        let mut points = Vec::new();
        for rec in rd.records() {
            let rec = rec?;
            let p = rec
                .iter()
                .map(|f| f.trim().parse::<f64>().map_err(|e| GeoError::InvalidArgument(format!("`{f}`: {e}"))))
                .collect::<Result<Vec<_>, _>>()?;
            points.push(p);
        }
        let dim = points.first().map_or(1, |p| p.len());
        Self::new(dim, points, normalized)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let pts = vec![vec![0.1, -0.2, 1.0 / 3.0], vec![1e-300, 5.0, -0.0]];
        let s = DirectionSet::new(3, pts, false).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let back = DirectionSet::read_csv(&buf[..], false).unwrap();
        for (a, b) in s.points().iter().zip(back.points()) {
            for (x, y) in a.iter().zip(b) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
    }

    #[test]
    fn rejects_duplicates_and_bad_norms() {
        assert!(DirectionSet::new(2, vec![vec![1.0, 0.0], vec![1.0, 0.0]], false).is_err());
        assert!(DirectionSet::new(2, vec![vec![2.0, 0.0]], true).is_err());
        let n = DirectionSet::new(2, vec![vec![2.0, 0.0], vec![1.0, 0.0], vec![0.0, 3.0]], false).unwrap().normalize().unwrap();
        assert_eq!(n.len(), 2);
        assert!(n.is_normalized());
    }
}
