use vardir_dirops::pointwise::{maximal_ball_ratio, maximal_ball_ratio_cones, nikodym_ball_ratio, Ball};
use vardir_geonet::{build_net, DirectionSet, Manifold};
use vardir_variety::{curve_components, sphere_curve, CurveComponents, TraceOptions};

use super::record_fit;
use crate::config::{CurveGrowthParams, GrowthFitParams, NikodymParams, SphereGrowthParams, SyntheticSeries};
use crate::dag::{input, Plan, StepError, StepOutput};

/// `N^exponent·(log N)^log_power` at every `N`.
pub fn synthetic_series(s: &SyntheticSeries) -> Vec<(f64, f64)> {
    s.n_values.iter().map(|&n| n as f64).map(|n| (n, n.powf(s.exponent) * n.ln().powf(s.log_power))).collect()
}

/// `n` unit vectors equally spaced by arclength along a polyline; the closing
/// segment counts when `closed`.
pub fn equispaced_on_curve(line: &[[f64; 3]], closed: bool, n: usize) -> Vec<Vec<f64>> {
    let segs = if closed { line.len() } else { line.len().saturating_sub(1) };
    let seg = |j: usize| (line[j], line[(j + 1) % line.len()]);
    let mut cum = vec![0.0];
    for j in 0..segs {
        let (a, b) = seg(j);
        cum.push(cum[j] + ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt());
    }
    let total = cum[segs];
    // an open arc keeps both ends
    let step = if closed || n < 2 { total / n as f64 } else { total / (n - 1) as f64 };
    let mut j = 0;
    (0..n)
        .map(|k| {
            let s = (k as f64 * step).min(total);
            while j + 1 < segs && cum[j + 1] < s {
                j += 1;
            }
            let (a, b) = seg(j);
            let len = cum[j + 1] - cum[j];
            let t = if len > 0.0 { (s - cum[j]) / len } else { 0.0 };
            let p: Vec<f64> = (0..3).map(|i| a[i] + t * (b[i] - a[i])).collect();
            let l = p.iter().map(|x| x * x).sum::<f64>().sqrt();
            p.iter().map(|x| x / l).collect()
        })
        .collect()
}

fn in_window(out: &mut StepOutput, slope: f64, w: [f64; 2]) {
    out.check("slope-window", slope >= w[0] && slope <= w[1], format!("slope {slope:.4} against [{}, {}]", w[0], w[1]));
}

pub(super) fn sphere_plan(p: &SphereGrowthParams, seed: u64) -> Plan {
    let mut plan = Plan::new();
    let mut points = Vec::new();
    for &n in &p.n_values {
        let (c, samples) = (p.net_constant, p.samples);
        points.push(plan.add(format!("sphere N={n}"), &[], move |_| {
            let net = build_net(&Manifold::Sphere { n: 3 }, c / n as f64, seed)?.base;
            let r = maximal_ball_ratio(&Ball::centered(3, 1.0)?, &net, n as f64, samples, seed)?;
            let mut out = StepOutput::new();
            out.measure("n", n);
            out.measure("directions", net.len());
            out.measure("ratio", r.ratio);
            out.measure("std_err", r.std_err);
            out.measure("support_radius", r.support_radius);
            Ok(out.with_artifact((n as f64, r.ratio)))
        }));
    }
    let w = p.slope_window;
    plan.add("sphere fit", &points, move |inp| {
        let series = (0..inp.len()).map(|k| input::<(f64, f64)>(inp, k).copied()).collect::<Result<Vec<_>, _>>()?;
        let mut out = StepOutput::new();
        let fit = record_fit(&mut out, "sphere", &series)?;
        in_window(&mut out, fit.slope, w);
        Ok(out)
    });
    plan
}

pub(super) fn curve_plan(p: &CurveGrowthParams, seed: u64) -> Plan {
    let mut plan = Plan::new();
    let mut fits = Vec::new();
    for c in &p.curves {
        let (label, poly, resolution) = (c.label.clone(), c.poly.clone(), p.resolution);
        let trace = plan.add(format!("trace {label}"), &[], move |_| {
            let q = poly.parse(3)?;
            let degree = q.degree().unwrap_or(0);
            let opts = TraceOptions { resolution, ..TraceOptions::default() };
            let cc = curve_components(&sphere_curve(&q.to_f64())?, &opts)?;
            if cc.is_empty() {
                return Err(format!("curve `{label}` has no real points on the sphere").into());
            }
            let mut out = StepOutput::new();
            out.measure("degree", degree);
            out.measure("components", cc.len());
            out.measure("vertices", cc.components.iter().map(|c| c.len()).collect::<Vec<_>>());
            out.measure("closed", &cc.closed);
            let mut buf = Vec::new();
            cc.write_csv(&mut buf)?;
            out.file(format!("curve-{label}.csv"), buf);
            Ok(out.with_artifact((degree, cc)))
        });
        let mut points = Vec::new();
        for &n in &p.n_values {
            let samples = p.samples;
            points.push(plan.add(format!("curve {} N={n}", c.label), &[trace], move |inp| {
                let (_, cc) = input::<(u32, CurveComponents)>(inp, 0)?;
                let longest = (0..cc.len()).max_by_key(|&k| cc.components[k].len()).expect("nonempty");
                let dirs = equispaced_on_curve(&cc.components[longest], cc.closed[longest], n as usize);
                let v = DirectionSet::new(3, dirs, true)?;
                let r = maximal_ball_ratio_cones(&Ball::centered(3, 1.0)?, &v, n as f64, samples, seed)?;
                let mut out = StepOutput::new();
                out.measure("n", n);
                out.measure("ratio", r.ratio);
                out.measure("std_err", r.std_err);
                Ok(out.with_artifact((n as f64, r.ratio)))
            }));
        }
        let (label, slope_max) = (c.label.clone(), p.slope_max);
        let mut deps = vec![trace];
        deps.extend(&points);
        fits.push(plan.add(format!("curve fit {label}"), &deps, move |inp| {
            let degree = input::<(u32, CurveComponents)>(inp, 0)?.0;
            let series = (1..inp.len()).map(|k| input::<(f64, f64)>(inp, k).copied()).collect::<Result<Vec<_>, _>>()?;
            let mut out = StepOutput::new();
            let fit = record_fit(&mut out, &format!("curve-{label}"), &series)?;
            out.check("polylog-slope", fit.slope <= slope_max, format!("slope {:.4} against {slope_max}", fit.slope));
            Ok(out.with_artifact((degree, label, fit.series)))
        }));
    }
    plan.add("degree comparison", &fits, |inp| {
        let mut curves = (0..inp.len()).map(|k| input::<(u32, String, Vec<(f64, f64)>)>(inp, k)).collect::<Result<Vec<_>, _>>()?;
        curves.sort_by_key(|c| c.0);
        let mut out = StepOutput::new();
        let mut monotone = true;
        let mut rows = Vec::new();
        for w in curves.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            if lo.0 == hi.0 {
                continue;
            }
            for (a, b) in lo.2.iter().zip(&hi.2) {
                monotone &= b.1 > a.1;
                rows.push(serde_json::json!({ "n": a.0, "lower": lo.1, "higher": hi.1, "ratio": b.1 / a.1 }));
            }
        }
        out.measure("degrees", curves.iter().map(|c| (c.1.clone(), c.0)).collect::<Vec<_>>());
        out.measure("higher_over_lower", rows);
        // logged only: the degree dependence is not asserted
        out.measure("degree_monotone", monotone);
        Ok(out)
    });
    plan
}

pub(super) fn nikodym_plan(p: &NikodymParams, seed: u64) -> Plan {
    let mut plan = Plan::new();
    let mut points = Vec::new();
    for &delta in &p.deltas {
        let samples = p.samples;
        points.push(plan.add(format!("nikodym 1/delta={}", 1.0 / delta), &[], move |_| {
            let net = build_net(&Manifold::Sphere { n: 3 }, delta, seed)?.base;
            let r = nikodym_ball_ratio(&net, delta, samples, seed)?;
            let mut out = StepOutput::new();
            out.measure("delta", delta);
            out.measure("directions", net.len());
            out.measure("ratio", r.ratio);
            out.measure("std_err", r.std_err);
            Ok(out.with_artifact((1.0 / delta, r.ratio)))
        }));
    }
    let w = p.slope_window;
    plan.add("nikodym fit", &points, move |inp| {
        let series = (0..inp.len()).map(|k| input::<(f64, f64)>(inp, k).copied()).collect::<Result<Vec<_>, _>>()?;
        let mut out = StepOutput::new();
        let fit = record_fit(&mut out, "nikodym", &series)?;
        in_window(&mut out, fit.slope, w);
        Ok(out)
    });
    plan
}

pub(super) fn fit_plan(p: &GrowthFitParams) -> Plan {
    let mut plan = Plan::new();
    let p = p.clone();
    plan.add("fit", &[], move |_| -> Result<StepOutput, StepError> {
        let series = match (&p.series, &p.synthetic) {
            (Some(s), _) => s.clone(),
            (None, Some(s)) => synthetic_series(s),
            (None, None) => return Err("no series".into()),
        };
        let mut out = StepOutput::new();
        let fit = record_fit(&mut out, "series", &series)?;
        if let Some(expected) = p.expected_slope {
            let gap = (fit.slope - expected).abs();
            out.check("expected-slope", gap <= p.tolerance, format!("slope {} against {expected} (gap {gap:e})", fit.slope));
        }
        Ok(out)
    });
    plan
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equispaced_points_on_a_square_loop() {
        let sq = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, -1.0, 0.0]];
        let pts = equispaced_on_curve(&sq, true, 8);
        assert_eq!(pts.len(), 8);
        assert!((pts[0][0] - 1.0).abs() < 1e-15);
        // the second point is the midpoint of the first edge, normalized
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((pts[1][0] - h).abs() < 1e-12 && (pts[1][1] - h).abs() < 1e-12);
        assert!((pts[2][1] - 1.0).abs() < 1e-12);
        let open = equispaced_on_curve(&sq, false, 4);
        assert!((open[3][1] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn synthetic_power_series() {
        let s = SyntheticSeries { exponent: 0.5, log_power: 1.0, n_values: vec![4, 16] };
        let v = synthetic_series(&s);
        assert!((v[1].1 - 4.0 * 16f64.ln()).abs() < 1e-12);
    }
}
