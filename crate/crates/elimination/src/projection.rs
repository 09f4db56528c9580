use num_traits::{One, Zero};
use vardir_geonet::asym_dist;
use vardir_poly::{ratio, Polynomial, PolySystem, Rational};
use vardir_variety::{project_or_nearest, sample_variety, Region, Tci, Variety, RANK_TOL};

use crate::error::ElimError;
use crate::groebner::{buchberger_with_budget, elimination_ideal, DEFAULT_BUDGET};

#[derive(Clone, Debug)]
pub struct ProjectionOptions {
    pub budget: usize,
    pub audit_samples: usize,
    pub seed: u64,
    /// `deg W + ct W` above this value sets [`ApproxProjection::over_budget`].
    pub complexity_budget: u32,
}

impl Default for ProjectionOptions {
    fn default() -> Self {
        Self { budget: DEFAULT_BUDGET, audit_samples: 200, seed: 0x9a0b, complexity_budget: 64 }
    }
}

#[derive(Clone, Debug)]
pub struct ApproxProjection {
    /// Zero set of the first elimination ideal, in the coordinates `x_1..x_{n-1}`.
    pub w: Variety,
    /// Shear `(δ_1, …, δ_{n-1})` applied to the first generator; all zero when none was needed.
    pub shear: Vec<Rational>,
    pub sheared: Tci,
    pub groebner_len: usize,
    pub groebner_degree: u32,
    pub degree: u32,
    pub count: usize,
    pub over_budget: bool,
    /// `dist(U, W × {0})` over the sampled `U`.
    pub audit: f64,
    pub u_count: usize,
}

fn shear_values() -> Vec<Rational> {
    let mut v = vec![Rational::zero()];
    for k in (1..=4).rev() {
        let d = ratio(1, 10i64.pow(k));
        v.push(d.clone());
        v.push(-d);
    }
    v
}

/// Whether the pure power `x_{n}^{deg p}` has a nonzero coefficient in `p`.
pub fn has_pure_top_power(p: &Polynomial<Rational>) -> bool {
    let n = p.nvars();
    let Some(d) = p.degree() else { return false };
    if d == 0 {
        return false;
    }
    let mut e = vec![0u32; n];
    e[n - 1] = d;
    !p.coeff_of(&e).is_zero()
}

/// `p(x_1 + δ_1 x_n, …, x_{n−1} + δ_{n−1} x_n, x_n)` in exact arithmetic.
pub fn shear_polynomial(p: &Polynomial<Rational>, delta: &[Rational]) -> Result<Polynomial<Rational>, ElimError> {
    let n = p.nvars();
    let xn: Polynomial<Rational> = Polynomial::variable(n, n - 1);
    let subs: Vec<Polynomial<Rational>> = (0..n)
        .map(|i| {
            let xi = Polynomial::variable(n, i);
            if i + 1 < n && !delta[i].is_zero() {
                &xi + &xn.scale(&delta[i])
            } else {
                xi
            }
        })
        .collect();
    Ok(p.compose(&subs)?)
}

fn next_tuple(idx: &mut [usize], base: usize) -> bool {
    for k in (0..idx.len()).rev() {
        idx[k] += 1;
        if idx[k] < base {
            return true;
        }
        idx[k] = 0;
    }
    false
}

fn sheared_tci(z: &Tci, opts: &ProjectionOptions) -> Result<(Tci, Vec<Rational>), ElimError> {
    let exact = z.variety().exact();
    let n = exact.nvars();
    if exact.polys().iter().any(has_pure_top_power) {
        return Ok((z.clone(), vec![Rational::zero(); n - 1]));
    }
    let values = shear_values();
    let mut idx = vec![0usize; n - 1];
    while next_tuple(&mut idx, values.len()) {
        let delta: Vec<Rational> = idx.iter().map(|&k| values[k].clone()).collect();
        let f = shear_polynomial(&exact.polys()[0], &delta)?;
        if !has_pure_top_power(&f) {
            continue;
        }
        let mut polys = exact.polys().to_vec();
        polys[0] = f;
        let v = Variety::new(PolySystem::new(polys)?, z.dim())?;
        if let Ok(t) = Tci::certify_in(v, &Region::Ball(4.0), 64, RANK_TOL, opts.seed) {
            return Ok((t, delta));
        }
    }
    Err(ElimError::NoShear)
}

/// Approximate projection of a TCI onto `{x_n = 0}`.
///
/// After an optional shear making some generator monic in `x_n`, the first
/// elimination ideal of the lex basis with `x_n` highest cuts out `W`. The audit
/// compares samples of `U = z ∩ {1 ≤ |x| < 2, |x_n| < s}` with `W × {0}`.
pub fn approx_projection(z: &Tci, s: f64) -> Result<ApproxProjection, ElimError> {
    approx_projection_with(z, s, &ProjectionOptions::default())
}

pub fn approx_projection_with(z: &Tci, s: f64, opts: &ProjectionOptions) -> Result<ApproxProjection, ElimError> {
    if !(s > 0.0 && s < 0.5) {
        return Err(ElimError::Input(format!("slab half-width must lie in (0, 1/2), got {s}")));
    }
    let n = z.variety().nvars();
    if n < 2 {
        return Err(ElimError::Input("projection needs at least two variables".into()));
    }
    let (sheared, shear) = sheared_tci(z, opts)?;
    let mut order = vec![n - 1];
    order.extend(0..n - 1);
    let gb = buchberger_with_budget(sheared.variety().exact(), &order, opts.budget)?;
    let elim = elimination_ideal(&gb, n - 1)?;
    let mut polys = elim.iter().map(|p| p.remove_variable(n - 1)).collect::<Result<Vec<_>, _>>()?;
    if polys.is_empty() {
        polys.push(Polynomial::zero(n - 1));
    }
    if polys.iter().any(|p| p.is_constant() && !p.is_zero()) {
        polys = vec![Polynomial::constant(n - 1, Rational::one())];
    }
    let w = Variety::new(PolySystem::new(polys)?, z.dim().min(n - 1))?;
    let degree = w.degree();
    let count = if w.exact().polys().iter().all(|p| p.is_zero()) { 0 } else { w.count() };

    let u = sample_variety(z.variety(), &Region::Slab { r: 1.0, s }, opts.audit_samples, opts.seed)?.points;
    let audit = if u.is_empty() {
        0.0
    } else {
        let heads: Vec<Vec<f64>> = u.iter().map(|x| x[..n - 1].to_vec()).collect();
        let fallback = sample_variety(&w, &Region::Ball(3.0), 2000, opts.seed ^ 0xf00)?.points;
        let targets: Vec<Vec<f64>> = project_or_nearest(w.generators(), &heads, &fallback)
            .into_iter()
            .map(|mut t| {
                t.push(0.0);
                t
            })
            .collect();
        asym_dist(&u, &targets).map_err(|e| ElimError::Input(e.to_string()))?
    };
    if !(audit < 2.0 * s) {
        return Err(ElimError::AuditFailed { audit, bound: 2.0 * s });
    }
    Ok(ApproxProjection {
        over_budget: degree + count as u32 > opts.complexity_budget,
        w,
        shear,
        sheared,
        groebner_len: gb.len(),
        groebner_degree: gb.max_degree(),
        degree,
        count,
        audit,
        u_count: u.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shear_of_xy_gains_pure_power() {
        let x: Polynomial<Rational> = Polynomial::variable(2, 0);
        let y: Polynomial<Rational> = Polynomial::variable(2, 1);
        let xy = &x * &y;
        assert!(!has_pure_top_power(&xy));
        let f = shear_polynomial(&xy, &[ratio(1, 10)]).unwrap();
        assert!(has_pure_top_power(&f));
        assert_eq!(f.coeff_of(&[0, 2]), ratio(1, 10));
    }

    #[test]
    fn grid_starts_at_zero_and_grows() {
        let g = shear_values();
        assert_eq!(g.len(), 9);
        assert!(g[0].is_zero());
        assert_eq!(g[1], ratio(1, 10000));
    }
}
