use nalgebra::DMatrix;

use crate::error::PolyError;
use crate::system::PolySystem;

/// Default singular-value cutoff, relative to the largest singular value.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct RankInfo {
    pub rank: usize,
    /// Smallest singular value among the `rank` retained ones (0 when rank is 0).
    pub min_sv: f64,
    /// All singular values, descending.
    pub singular_values: Vec<f64>,
}

/// Rows are generator gradients at `x`.
pub fn jacobian_matrix(sys: &PolySystem<f64>, x: &[f64]) -> Result<DMatrix<f64>, PolyError> {
    let n = sys.nvars();
    let k = sys.len();
    let mut j = DMatrix::zeros(k, n);
    for (r, p) in sys.polys().iter().enumerate() {
        let (_, g) = p.evaluate_with_gradient(x)?;
        for c in 0..n {
            j[(r, c)] = g[c];
        }
    }
    Ok(j)
}

/// Numerical rank of the Jacobian at `x`: singular values above `tol * sigma_max` count.
pub fn jacobian_rank(sys: &PolySystem<f64>, x: &[f64], tol: f64) -> Result<RankInfo, PolyError> {
    if !(tol > 0.0) {
        return Err(PolyError::InvalidArgument(format!("rank tolerance must be positive, got {tol}")));
    }
    let j = jacobian_matrix(sys, x)?;
    let mut sv: Vec<f64> = j.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let top = sv.first().copied().unwrap_or(0.0);
    let rank = if top > 0.0 { sv.iter().take_while(|&&s| s > tol * top).count() } else { 0 };
    let min_sv = if rank > 0 { sv[rank - 1] } else { 0.0 };
    Ok(RankInfo { rank, min_sv, singular_values: sv })
}
