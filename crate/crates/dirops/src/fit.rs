use std::io::Write;

use serde::Serialize;

use crate::error::{DirOpError, Result};

/// Least-squares line through `(log N, log estimate)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root mean square of the log residuals.
    pub residual: f64,
    pub max_residual: f64,
    /// `log estimate - (intercept + slope·log N)` per point.
    pub residuals: Vec<f64>,
    pub series: Vec<(f64, f64)>,
}

impl GrowthFit {
    pub fn predict(&self, n: f64) -> f64 {
        (self.intercept + self.slope * n.ln()).exp()
    }

    /// Rows `n,estimate,fitted,log_residual`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["n", "estimate", "fitted", "log_residual"])?;
        for ((n, e), r) in self.series.iter().zip(&self.residuals) {
            out.write_record([n.to_string(), e.to_string(), self.predict(*n).to_string(), r.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }
}

pub fn growth_fit(series: &[(f64, f64)]) -> Result<GrowthFit> {
    if series.len() < 3 {
        return Err(DirOpError::InvalidArgument(format!("a growth fit needs at least 3 points, got {}", series.len())));
    }
    if series.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(DirOpError::InvalidArgument("N must be strictly increasing".into()));
    }
    if let Some((n, e)) = series.iter().find(|(n, e)| !(*n > 0.0) || !(*e > 0.0) || !e.is_finite()) {
        return Err(DirOpError::InvalidArgument(format!("non-positive entry ({n}, {e})")));
    }
    let xs: Vec<f64> = series.iter().map(|(n, _)| n.ln()).collect();
    let ys: Vec<f64> = series.iter().map(|(_, e)| e.ln()).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals: Vec<f64> = xs.iter().zip(&ys).map(|(x, y)| y - (intercept + slope * x)).collect();
    let residual = (residuals.iter().map(|r| r * r).sum::<f64>() / m).sqrt();
    let max_residual = residuals.iter().fold(0.0f64, |a, r| a.max(r.abs()));
    Ok(GrowthFit { slope, intercept, residual, max_residual, residuals, series: series.to_vec() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let s: Vec<(f64, f64)> = [8.0, 16.0, 32.0, 64.0].iter().map(|&n: &f64| (n, 3.0 * n.sqrt())).collect();
        let f = growth_fit(&s).unwrap();
        assert!((f.slope - 0.5).abs() < 1e-12);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-12);
        assert!(f.residual < 1e-12);
    }

    #[test]
    fn rejects_bad_series() {
        assert!(growth_fit(&[(1.0, 1.0), (2.0, 1.0)]).is_err());
        assert!(growth_fit(&[(1.0, 1.0), (2.0, 0.0), (3.0, 1.0)]).is_err());
        assert!(growth_fit(&[(1.0, 1.0), (3.0, 1.0), (2.0, 1.0)]).is_err());
    }
}
