use nalgebra::{DMatrix, DVector};
use vardir_poly::{jacobian_matrix, PolySystem};

#[derive(Clone, Debug)]
pub struct NewtonOptions {
    /// Accept once `max_j |P_j(x)| <= tol`.
    pub tol: f64,
    pub max_iter: usize,
    /// Steps longer than this are scaled down.
    pub max_step: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self { tol: crate::sample::SAMPLE_TOL, max_iter: 80, max_step: 0.5 }
    }
}

/// Gauss–Newton with minimum-norm steps `x ← x − J⁺ F(x)`.
///
/// For an underdetermined regular system the iterates converge to a point of the
/// zero set close to the orthogonal projection of `x0`. Returns `None` when the
/// residual target is not met within `max_iter` iterations.
pub fn newton_project(sys: &PolySystem<f64>, x0: &[f64], opts: &NewtonOptions) -> Option<Vec<f64>> {
    let mut x = x0.to_vec();
    for _ in 0..opts.max_iter {
        let f: Vec<f64> = sys.polys().iter().map(|p| p.eval(&x)).collect();
        let res = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if !res.is_finite() {
            return None;
        }
        if res <= opts.tol {
            return Some(x);
        }
        let j = jacobian_matrix(sys, &x).ok()?;
        let step = min_norm_solve(j, DVector::from_vec(f))?;
        let len = step.norm();
        if !len.is_finite() || len == 0.0 {
            return None;
        }
        let scale = if len > opts.max_step { opts.max_step / len } else { 1.0 };
        for (xi, si) in x.iter_mut().zip(step.iter()) {
            *xi -= scale * si;
        }
    }
    let res = sys.max_residual(&x);
    (res <= opts.tol).then_some(x)
}

fn min_norm_solve(j: DMatrix<f64>, f: DVector<f64>) -> Option<DVector<f64>> {
    let svd = j.svd(true, true);
    let top = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return None;
    }
    svd.solve(&f, top * 1e-12).ok()
}
