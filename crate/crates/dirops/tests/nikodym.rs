use std::f64::consts::PI;

use rand::Rng;
use vardir_dirops::pointwise::{nikodym_ball_at, Ball, DirectionIndex, TubeBallProfile};
use vardir_dirops::{nikodym_max, nikodym_max_with_argmax, random_band_limited, tube_average, DirOpError, GridFunction, GridShape, TubeFamily, TubeStencil};
use vardir_geonet::sampling::rng;
use vardir_geonet::{build_net, DirectionSet, Manifold};

fn family(points: Vec<Vec<f64>>, delta: f64) -> TubeFamily {
    TubeFamily::new(DirectionSet::new(points[0].len(), points, false).unwrap(), delta).unwrap()
}

#[test]
fn constant_function_has_unit_tube_averages() {
    let shape = GridShape::cube(3, 32, 4.0).unwrap();
    let f = GridFunction::constant(shape, 1.0);
    let tubes = family(vec![vec![1.0, 0.0, 0.0], vec![0.5, 0.6, 0.7], vec![0.0, -0.8, 0.7]], 0.25);
    let m = nikodym_max(&f, &tubes).unwrap();
    for k in 0..m.len() {
        assert!((m.get(k).re - 1.0).abs() < 1e-6);
    }
}

/// Indicator of the closed tube of half-length 1/2 and radius `rho` about
/// the line through `c` along `v`.
fn tube_indicator(shape: &GridShape, c: &[f64], v: &[f64], rho: f64) -> GridFunction {
    let l = v.iter().map(|t| t * t).sum::<f64>().sqrt();
    let u: Vec<f64> = v.iter().map(|t| t / l).collect();
    let (c, u) = (c.to_vec(), u);
    GridFunction::from_fn(shape.clone(), move |x| {
        let y: Vec<f64> = x.iter().zip(&c).map(|(a, b)| a - b).collect();
        let a: f64 = y.iter().zip(&u).map(|(p, q)| p * q).sum();
        let perp2 = y.iter().map(|t| t * t).sum::<f64>() - a * a;
        if a.abs() <= 0.5 + 1e-12 && perp2 <= rho * rho * (1.0 + 1e-9) {
            1.0
        } else {
            0.0
        }
    })
}

#[test]
fn a_tube_averages_itself_to_nearly_one() {
    let shape = GridShape::cube(3, 64, 4.0).unwrap();
    let centre = shape.ravel(&[32, 32, 32]);
    for (v, delta, floor) in [(vec![0.0, 1.0, 0.0], 0.125, 1.0), (vec![0.5, 0.6, 0.7], 0.5, 0.9), (vec![1.0, 1.0, 0.0], 0.375, 0.9)] {
        let f = tube_indicator(&shape, &[0.0; 3], &v, delta / 2.0);
        let tubes = family(vec![v.clone()], delta);
        let m = nikodym_max(&f, &tubes).unwrap();
        assert!(m.get(centre).re >= floor - 1e-12, "v = {v:?}: {}", m.get(centre).re);
        assert!(tube_average(&f, &tubes, 0).unwrap().get(centre).re >= floor - 1e-12);
    }
}

#[test]
fn under_resolved_or_long_tubes_are_rejected() {
    let shape = GridShape::cube(2, 32, 4.0).unwrap();
    let f = GridFunction::constant(shape.clone(), 1.0);
    let thin = family(vec![vec![1.0, 0.0]], 0.2);
    assert!(matches!(nikodym_max(&f, &thin), Err(DirOpError::Precondition(_))));
    let small = GridFunction::constant(GridShape::cube(2, 64, 1.5).unwrap(), 1.0);
    assert!(matches!(nikodym_max(&small, &family(vec![vec![1.0, 0.0]], 0.1)), Err(DirOpError::Precondition(_))));
    assert!(TubeFamily::new(DirectionSet::new(2, vec![vec![0.5, 0.0]], false).unwrap(), 0.3).is_err());
    assert!(TubeFamily::new(DirectionSet::new(2, vec![vec![1.0, 0.0]], false).unwrap(), 0.0).is_err());
}

#[test]
fn stencil_is_a_lattice_tube() {
    let shape = GridShape::cube(3, 64, 4.0).unwrap();
    let v = [0.3, -0.5, 0.81];
    let st = TubeStencil::new(&shape, &v, 1.0, 0.2);
    let offsets = st.offsets();
    let distinct: std::collections::BTreeSet<_> = offsets.iter().collect();
    assert!(distinct.len() as f64 >= 0.9 * offsets.len() as f64);
    let cyl = PI * 0.2 * 0.2 / (1.0 / 16.0f64).powi(3);
    let count = offsets.len() as f64;
    assert!((count / cyl - 1.0).abs() < 0.15, "{count} points against a volume of {cyl} cells");
}

#[test]
fn shifts_and_argmax_are_exact() {
    let shape = GridShape::cube(2, 64, 4.0).unwrap();
    let f = random_band_limited(&shape, 8, 17).unwrap();
    let tubes = family(vec![vec![1.0, 0.0], vec![0.6, 0.8], vec![-0.6, 0.8]], 0.25);
    let (m, arg) = nikodym_max_with_argmax(&f, &tubes).unwrap();
    let shifted = nikodym_max(&f.translate(&[5, -9]).unwrap(), &tubes).unwrap();
    assert_eq!(shifted.real_values().unwrap(), m.translate(&[5, -9]).unwrap().real_values().unwrap());
    for k in 0..m.len() {
        assert!((arg[k] as usize) < 3);
    }
}

#[test]
fn open_window_lookup_matches_a_scan_of_tube_positions() {
    let (b, rho) = (0.1, 0.05);
    let profile = TubeBallProfile::new(b, rho, 1.0).unwrap();
    let tube = PI * rho * rho;
    let mut g = rng(3);
    for _ in 0..300 {
        let a: f64 = g.gen_range(-0.7..0.7);
        let p: f64 = g.gen_range(0.0..0.2);
        // every tube through the point: axis offset e ≥ p - ρ, centre c ∈ [a - 1/2, a + 1/2]
        let e = (p - rho).max(0.0);
        let best = (0..=400)
            .map(|j| {
                let c = a - 0.5 + j as f64 / 400.0;
                profile.volume(e, c - 0.5, c + 0.5)
            })
            .fold(0.0, f64::max)
            / tube;
        let got = profile.best_average(a, p);
        assert!(got >= best - 2e-3 && got <= best + 2e-3 + 1e-3 * best, "a = {a}, p = {p}: {got} vs {best}");
    }
}

#[test]
fn grid_route_agrees_with_the_tube_ball_formula() {
    let delta = 0.25;
    let net = build_net(&Manifold::Sphere { n: 3 }, delta, 2).unwrap().base;
    let shape = GridShape::cube(3, 64, 4.0).unwrap();
    let f = GridFunction::from_fn(shape.clone(), |x| if x.iter().map(|t| t * t).sum::<f64>() <= delta * delta { 1.0 } else { 0.0 });
    let m = nikodym_max(&f, &TubeFamily::new(net.clone(), delta).unwrap()).unwrap();
    let ball = Ball::centered(3, delta).unwrap();
    let profile = TubeBallProfile::new(delta, delta / 2.0, 1.0).unwrap();
    let index = DirectionIndex::new(&net).unwrap();
    let mut scratch = Vec::new();
    let mut errs = Vec::new();
    for k in (0..shape.len()).step_by(5) {
        let x = shape.coord(k);
        let d = x.iter().map(|t| t * t).sum::<f64>().sqrt();
        if d < 0.9 {
            let exact = nikodym_ball_at(&ball, &profile, &index, &x, &mut scratch);
            errs.push((d, m.get(k).re, exact));
        }
    }
    // the ball is only four cells across its radius
    let mean = errs.iter().map(|e| (e.1 - e.2).abs()).sum::<f64>() / errs.len() as f64;
    let worst = errs.iter().map(|e| (e.1 - e.2).abs() / e.2).fold(0.0, f64::max);
    assert!(mean < 0.03, "mean deviation {mean}");
    assert!(worst < 0.35, "largest relative deviation {worst}");
    // near the ball a centred tube of the net holds |B_δ ∩ Cyl_{δ/2}|/(πδ²/4) = (16/3)(1 - (3/4)^{3/2})δ
    let floor = 16.0 / 3.0 * (1.0 - 0.75f64.powf(1.5)) * delta;
    for e in errs.iter().filter(|e| e.0 < 0.5 - delta) {
        assert!(e.1 >= 0.9 * floor && e.2 >= floor * (1.0 - 1e-3), "{e:?}");
    }
}
