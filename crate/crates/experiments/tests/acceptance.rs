//! One PASS/FAIL line per acceptance criterion. The scenario criteria run the
//! default configs shipped in `configs/`; the rest call the libraries directly.

use std::path::Path;
use std::time::Instant;

use vardir_dirops::{
    annulus_cutoff, band_operator, max_rough, max_smooth, opnorm_lower, random_band_limited, smooth_multiplier, GridShape, Interval, OperatorSpec,
    PsiProfile, TestFamily,
};
use vardir_experiments::report::Report;
use vardir_experiments::{run_scenario, RunOptions, ScenarioConfig, ScenarioName};
use vardir_geonet::sampling::{gaussian, random_unit_vector, rng};
use vardir_geonet::{build_net, DirectionSet, Manifold, Net};
use vardir_partition::{cluster_select, direction_items};
use vardir_poly::{monomials_up_to, FloatPoly};
use vardir_variety::{curve_components, plane_curve_crossings, sphere_curve, TraceOptions};

struct Outcome {
    id: u32,
    passed: bool,
    detail: String,
}

fn run_default(name: ScenarioName) -> (Report, f64) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(format!("{name}.json"));
    let cfg = ScenarioConfig::load(&path, Some(name)).unwrap();
    let start = Instant::now();
    let report = run_scenario(&cfg, &RunOptions::default()).unwrap();
    (report, start.elapsed().as_secs_f64())
}

fn each_check(report: &Report, prefix: &str, names: &[&str]) -> (usize, usize) {
    let mut total = 0;
    let mut bad = 0;
    for step in report.steps.iter().filter(|s| s.name.starts_with(prefix)) {
        for name in names {
            total += 1;
            bad += usize::from(!step.checks.iter().any(|c| c.name == *name && c.passed));
        }
    }
    (total, bad)
}

fn num(report: &Report, step: &str, key: &str) -> f64 {
    report.step(step).and_then(|s| s.measurements.get(key)).and_then(|v| v.as_f64()).unwrap_or(f64::NAN)
}

fn criteria_1_and_2() -> [Outcome; 2] {
    let (report, secs) = run_default(ScenarioName::PartitionAudit);
    let (total, bad) = each_check(&report, "partition ", &["conservation", "cell-size", "wall-proximity", "wall-rank"]);
    let partitions = report.steps.iter().filter(|s| s.name.starts_with("partition ")).count();
    let c1 = Outcome {
        id: 1,
        passed: partitions == 20 && total == 80 && bad == 0 && secs <= 300.0,
        detail: format!("{partitions} partitions, {bad} of {total} audits failed, {secs:.1} s"),
    };
    let (total, bad) = each_check(&report, "crossings ", &["crossing-budget"]);
    let c2 = Outcome {
        id: 2,
        passed: total == 20 && bad == 0,
        detail: format!(
            "{bad} of {total} budgets exceeded, max count {}, implied constant {:.2}",
            num(&report, "crossing summary", "max_count"),
            num(&report, "crossing summary", "max_implied_constant")
        ),
    };
    [c1, c2]
}

fn slope_criterion(id: u32, name: ScenarioName, fit_step: &str, limit_secs: f64) -> Outcome {
    let (report, secs) = run_default(name);
    let slope = num(&report, fit_step, "slope");
    Outcome {
        id,
        passed: report.passed() && secs <= limit_secs,
        detail: format!("slope {slope:.4}, {secs:.1} s, failed checks {:?}", report.summary.failed_checks),
    }
}

fn criterion_4() -> Outcome {
    let (report, secs) = run_default(ScenarioName::CurveGrowth);
    let slopes: Vec<String> = report
        .steps
        .iter()
        .filter(|s| s.name.starts_with("curve fit "))
        .map(|s| format!("{} {:.4}", &s.name["curve fit ".len()..], s.measurements["slope"].as_f64().unwrap_or(f64::NAN)))
        .collect();
    let monotone = report.step("degree comparison").and_then(|s| s.measurements.get("degree_monotone")).cloned();
    Outcome {
        id: 4,
        passed: report.passed() && slopes.len() == 2,
        detail: format!("slopes [{}], degree monotone {}, {secs:.1} s", slopes.join(", "), monotone.unwrap_or_default()),
    }
}

fn criterion_6() -> Outcome {
    let (report, _) = run_default(ScenarioName::ProjectionDemo);
    let audits: Vec<String> =
        ["latitude-circle", "saddle"].iter().map(|c| format!("{c} {:.3e}", num(&report, &format!("projection {c}"), "audit"))).collect();
    let (total, bad) = each_check(&report, "groebner ", &["s-pairs-reduce", "elimination-membership"]);
    Outcome {
        id: 6,
        passed: report.passed() && total == 6 && bad == 0,
        detail: format!("groebner checks {}/{total}, audits [{}]", total - bad, audits.join(", ")),
    }
}

fn criterion_7() -> Outcome {
    let psi = PsiProfile::default();
    let mut notes = Vec::new();

    let shape = GridShape::cube(2, 32, 8.0).unwrap();
    let mut parseval = 0.0f64;
    for seed in 0..10 {
        let f = random_band_limited(&shape, 15, seed).unwrap();
        let n = f.norm_l2();
        let v = [0.3 + 0.1 * seed as f64, -0.7];
        parseval = parseval
            .max(smooth_multiplier(&f, &v, 0.5, &psi).unwrap().norm_l2() / (psi.sup() * n))
            .max(annulus_cutoff(&f).unwrap().norm_l2() / n)
            .max(band_operator(&f, &v, Interval::new(-0.5, 0.5).unwrap()).unwrap().norm_l2() / n);
    }
    let parseval_ok = parseval <= 1.0 + 1e-10;
    notes.push(format!("worst norm ratio {parseval:.12}"));

    let big = GridShape::cube(2, 256, 8.0).unwrap();
    let mut g = rng(21);
    let mut worst = f64::NEG_INFINITY;
    for trial in 0..20 {
        let v: Vec<Vec<f64>> = (0..3).map(|_| random_unit_vector(&mut g, 2).iter().map(|c| 1.2 * c).collect()).collect();
        let set = DirectionSet::new(2, v, false).unwrap();
        let f = random_band_limited(&big, 3, 100 + trial).unwrap().map_real(|t| t * t).unwrap();
        let rough = max_rough(&f, &set, 1.0).unwrap();
        let smooth = max_smooth(&f, &set, 1.0, &psi).unwrap();
        let slack = 1e-3 * f.sup_norm();
        for k in 0..f.len() {
            worst = worst.max((rough.get(k).re - 0.5 * smooth.get(k).re) / slack);
        }
    }
    let domination_ok = worst <= 1.0;
    notes.push(format!("domination excess {worst:.3} slack units"));

    let small = GridShape::cube(2, 64, 8.0).unwrap();
    let v = DirectionSet::new(2, vec![vec![1.0, 0.0], vec![0.7, 0.9]], false).unwrap();
    let family = TestFamily { random: 2, band: 8, ..TestFamily::default() };
    let mut scale_gap = 0.0f64;
    for s in [0.25, 1.0, 4.0] {
        let at_s = opnorm_lower(&OperatorSpec::Smooth { directions: v.clone(), s, psi }, &small, &family, 2, 9).unwrap();
        let unit = opnorm_lower(&OperatorSpec::Smooth { directions: v.clone(), s: 1.0, psi }, &small.rescaled(s).unwrap(), &family, 2, 9).unwrap();
        scale_gap = scale_gap.max((at_s.estimate / unit.estimate - 1.0).abs());
    }
    let scaling_ok = scale_gap < 0.05;
    notes.push(format!("scaling gap {:.2}%", 100.0 * scale_gap));

    let f = random_band_limited(&small, 12, 2).unwrap();
    let u = [0.8, -0.6];
    let inside = Interval::new(-0.5, 2.0).unwrap();
    let b = band_operator(&f, &u, inside).unwrap();
    let bb = band_operator(&b, &u, inside).unwrap();
    let projection_ok = b.norm_l2() <= f.norm_l2() * (1.0 + 1e-12) && b.spectrum() == bb.spectrum();
    notes.push(format!("band projection idempotent {projection_ok}"));

    Outcome { id: 7, passed: parseval_ok && domination_ok && scaling_ok && projection_ok, detail: notes.join(", ") }
}

fn criterion_8() -> Outcome {
    let mut violations = 0;
    let mut worst = Vec::new();
    for degree in 1..=4u32 {
        let mut r = rng(300 + degree as u64);
        let mut monos = vec![vec![0, 0, 0]];
        monos.extend(monomials_up_to(3, degree));
        let p = FloatPoly::from_terms(3, monos.into_iter().map(|m| (gaussian(&mut r), m))).unwrap();
        let cc = curve_components(&sphere_curve(&p).unwrap(), &TraceOptions::default()).unwrap();
        let mut r = rng(900 + degree as u64);
        let mut most = 0;
        for _ in 0..500 {
            let xi = random_unit_vector(&mut r, 3);
            let a = gaussian(&mut r) * 0.5;
            let k = plane_curve_crossings(&cc, &xi, a);
            most = most.max(k);
            violations += usize::from(k > 2 * degree as usize);
        }
        worst.push(format!("D={degree}: {most}"));
    }
    Outcome { id: 8, passed: violations == 0, detail: format!("{violations} violations, max crossings [{}]", worst.join(", ")) }
}

fn nearest_top(net: &Net, target: [f64; 3]) -> usize {
    let l = target.iter().map(|t| t * t).sum::<f64>().sqrt();
    let dot = |i: usize| net.points()[i].iter().zip(&target).map(|(a, b)| a * b / l).sum::<f64>();
    (0..net.len()).max_by(|&i, &j| dot(i).total_cmp(&dot(j))).unwrap()
}

/// Arcs spread around the great circle perpendicular to `xi`.
fn crowded_family(xi: &[f64], arcs: usize) -> Vec<Vec<Vec<f64>>> {
    let helper = if xi[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let d: f64 = helper.iter().zip(xi).map(|(a, b)| a * b).sum();
    let mut u: Vec<f64> = (0..3).map(|q| helper[q] - d * xi[q]).collect();
    let l = u.iter().map(|t| t * t).sum::<f64>().sqrt();
    u.iter_mut().for_each(|t| *t /= l);
    let w = [xi[1] * u[2] - xi[2] * u[1], xi[2] * u[0] - xi[0] * u[2], xi[0] * u[1] - xi[1] * u[0]];
    (0..arcs)
        .map(|c| (0..8).map(|j| c as f64 * 0.2 + 0.3 * j as f64 / 7.0).map(|t| (0..3).map(|q| t.cos() * u[q] + t.sin() * w[q]).collect()).collect())
        .collect()
}

fn criterion_9() -> Outcome {
    let (s, threshold) = (0.02, 20);
    let mut notes = Vec::new();
    let mut ok = true;
    for (seed, targets) in [(9u64, vec![[0.0, 0.0, 1.0], [1.0, 0.0, 0.2]]), (4, vec![[0.3, -1.0, 0.1], [0.0, 0.6, 1.0], [1.0, 1.0, 0.0]])] {
        let net = build_net(&Manifold::Sphere { n: 3 }, 0.1, seed).unwrap();
        let mut items = Vec::new();
        for t in &targets {
            items.extend(crowded_family(&net.points()[nearest_top(&net, *t)], 30));
        }
        let crowded = items.len();
        let mut r = rng(77 + seed);
        let background: Vec<Vec<f64>> = (0..60).map(|_| random_unit_vector(&mut r, 3)).collect();
        items.extend(direction_items(&DirectionSet::new(3, background, true).unwrap()));
        let sel = cluster_select(&items, &net, s, threshold).unwrap();
        let counts = sel.remainder_band_counts(&items, &net).unwrap();
        let mut seen = vec![0; items.len()];
        sel.bad_clusters.values().flatten().chain(&sel.good_remainder).for_each(|&i| seen[i] += 1);
        let exact = seen.iter().all(|&k| k == 1);
        let under = counts.iter().all(|&c| c <= threshold);
        let sizes_ok = sel.bad_clusters.values().all(|c| c.len() > threshold);
        ok &= exact && under && sizes_ok && sel.omega_bad.len() == targets.len();
        notes.push(format!(
            "{} crowded arcs: {} bad tops, remainder max {}, exact cover {exact}",
            crowded,
            sel.omega_bad.len(),
            counts.iter().max().copied().unwrap_or(0)
        ));
    }
    Outcome { id: 9, passed: ok, detail: notes.join("; ") }
}

#[test]
fn acceptance() {
    let mut outcomes = Vec::new();
    outcomes.extend(criteria_1_and_2());
    outcomes.push(slope_criterion(3, ScenarioName::SphereGrowth, "sphere fit", 900.0));
    outcomes.push(criterion_4());
    outcomes.push(slope_criterion(5, ScenarioName::Nikodym, "nikodym fit", 600.0));
    outcomes.push(criterion_6());
    outcomes.push(criterion_7());
    outcomes.push(criterion_8());
    outcomes.push(criterion_9());
    for o in &outcomes {
        println!("criterion {}: {} ({})", o.id, if o.passed { "PASS" } else { "FAIL" }, o.detail);
    }
    let failed: Vec<u32> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    assert!(failed.is_empty(), "failed criteria {failed:?}");
}
