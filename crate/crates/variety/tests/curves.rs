mod common;

use std::f64::consts::PI;

use common::{poly, z3};
use proptest::prelude::*;
use vardir_geonet::sampling::{gaussian, random_unit_vector, rng};
use vardir_geonet::{dist, dot};
use vardir_poly::{monomials_up_to, FloatPoly};
use vardir_variety::{
    curve_components, plane_crossing_points, plane_curve_crossings, sphere_curve, CurveComponents, TraceOptions,
};

fn random_poly(degree: u32, seed: u64) -> FloatPoly {
    let mut r = rng(seed);
    let mut monos = vec![vec![0, 0, 0]];
    monos.extend(monomials_up_to(3, degree));
    FloatPoly::from_terms(3, monos.into_iter().map(|m| (gaussian(&mut r), m))).unwrap()
}

fn trace(p: &FloatPoly) -> CurveComponents {
    curve_components(&sphere_curve(p).unwrap(), &TraceOptions::default()).unwrap()
}

/// Sign regions of `p` on a latitude–longitude grid, counted by flood fill.
fn sign_regions(p: &FloatPoly, rows: usize, cols: usize) -> usize {
    let sign: Vec<bool> = (0..rows * cols)
        .map(|k| {
            let (i, j) = (k / cols, k % cols);
            let th = (i as f64 + 0.5) * PI / rows as f64;
            let ph = j as f64 * 2.0 * PI / cols as f64;
            p.eval(&[th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()]) > 0.0
        })
        .collect();
    let mut seen = vec![false; rows * cols];
    let mut regions = 0;
    for start in 0..rows * cols {
        if seen[start] {
            continue;
        }
        regions += 1;
        seen[start] = true;
        let mut stack = vec![start];
        while let Some(k) = stack.pop() {
            let (i, j) = (k / cols, k % cols);
            let mut nb = vec![i * cols + (j + 1) % cols, i * cols + (j + cols - 1) % cols];
            if i > 0 {
                nb.push((i - 1) * cols + j);
            } else {
                nb.extend(0..cols);
            }
            if i + 1 < rows {
                nb.push((i + 1) * cols + j);
            } else {
                nb.extend((rows - 1) * cols..rows * cols);
            }
            for q in nb {
                if !seen[q] && sign[q] == sign[k] {
                    seen[q] = true;
                    stack.push(q);
                }
            }
        }
    }
    regions
}

fn check_invariants(cc: &CurveComponents, p: &FloatPoly) {
    for (comp, closed) in cc.components.iter().zip(&cc.closed) {
        assert!(*closed);
        let first = comp.first().unwrap();
        let last = comp.last().unwrap();
        assert!(dist(first, last) <= 1.5 * cc.resolution, "gap {}", dist(first, last));
        for q in comp {
            assert!(p.eval(q).abs() <= 1e-9);
            assert!((dot(q, q) - 1.0).abs() <= 1e-9);
        }
        for w in comp.windows(2) {
            assert!(dist(&w[0], &w[1]) <= 2.0 * cc.resolution);
        }
    }
    for a in 0..cc.len() {
        for b in a + 1..cc.len() {
            let gap = cc.components[a]
                .iter()
                .flat_map(|x| cc.components[b].iter().map(move |y| dist(x, y)))
                .fold(f64::INFINITY, f64::min);
            assert!(gap >= cc.merge_tol);
        }
    }
}

#[test]
fn equator_is_one_component() {
    let cc = trace(&z3());
    assert_eq!(cc.len(), 1);
    check_invariants(&cc, &z3());
    let length: f64 = cc.components[0].windows(2).map(|w| dist(&w[0], &w[1])).sum();
    assert!((length - 2.0 * PI).abs() < 0.01);
}

#[test]
fn two_latitudes() {
    let p = poly(3, &[(1.0, &[0, 0, 2]), (-0.25, &[0, 0, 0])]);
    let cc = trace(&p);
    assert_eq!(cc.len(), 2);
    check_invariants(&cc, &p);
    let mut heights: Vec<f64> = cc.components.iter().map(|c| c[0][2]).collect();
    heights.sort_by(f64::total_cmp);
    assert!((heights[0] + 0.5).abs() < 1e-9 && (heights[1] - 0.5).abs() < 1e-9);
}

#[test]
fn random_quartics_match_grid_oracle() {
    for seed in 0..4 {
        let p = random_poly(4, 100 + seed);
        let cc = trace(&p);
        check_invariants(&cc, &p);
        assert!(cc.len() <= 32);
        let oracle = sign_regions(&p, 600, 1200) - 1;
        assert_eq!(cc.len(), oracle, "seed {seed}");
    }
}

#[test]
fn equator_meets_meridian_plane_twice() {
    let cc = trace(&z3());
    let rep = plane_crossing_points(&cc, &[1.0, 0.0, 0.0], 0.0);
    assert_eq!(rep.count, 2);
    assert_eq!(rep.tangencies, 0);
    for q in &rep.points {
        assert!(q[0].abs() <= 1e-10);
        assert!((q[1].abs() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn distant_plane_misses() {
    let cc = trace(&z3());
    assert_eq!(plane_curve_crossings(&cc, &[0.0, 0.0, 1.0], 2.0), 0);
}

#[test]
fn cubic_against_random_planes() {
    let p = random_poly(3, 7);
    let cc = trace(&p);
    let mut r = rng(8);
    for _ in 0..50 {
        let xi = random_unit_vector(&mut r, 3);
        let a = 0.8 * (2.0 * gaussian(&mut r)).tanh();
        let rep = plane_crossing_points(&cc, &xi, a);
        assert!(rep.count <= 6);
        for q in &rep.points {
            assert!(p.eval(q).abs() <= 1e-8);
            assert!((dot(&xi, q) - a).abs() <= 1e-9);
        }
    }
}

#[test]
fn polyline_csv_has_one_row_per_vertex() {
    let cc = trace(&z3());
    let mut buf = Vec::new();
    cc.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().count(), 1 + cc.components[0].len());
    assert!(text.starts_with("component,index,x,y,z"));
}

#[test]
fn crossings_respect_bezout_over_500_planes() {
    for degree in 1..=4u32 {
        let p = random_poly(degree, 300 + degree as u64);
        let cc = trace(&p);
        let mut r = rng(900 + degree as u64);
        for _ in 0..500 {
            let xi = random_unit_vector(&mut r, 3);
            let a = gaussian(&mut r) * 0.5;
            assert!(plane_curve_crossings(&cc, &xi, a) <= 2 * degree as usize);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn tilted_great_circle_crossings(theta in 0.0f64..PI, phi in 0.0f64..(2.0 * PI), a in -1.2f64..1.2) {
        let n = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
        let plane = poly(3, &[(n[0], &[1, 0, 0]), (n[1], &[0, 1, 0]), (n[2], &[0, 0, 1])]);
        let cc = trace(&plane);
        prop_assert_eq!(cc.len(), 1);
        // A plane at distance |a| from the origin cuts a great circle twice iff the
        // line where it meets the circle's plane lies inside the unit disk.
        let xi = [0.0, 0.0, 1.0];
        let c = dot(&n, &xi);
        let reach = (1.0 - c * c).sqrt();
        let count = plane_curve_crossings(&cc, &xi, a);
        if a.abs() < reach - 1e-3 {
            prop_assert_eq!(count, 2);
        } else if a.abs() > reach + 1e-3 {
            prop_assert_eq!(count, 0);
        }
    }
}
