mod common;

use common::{poly, sphere3, variety, z3};
use proptest::prelude::*;
use vardir_geonet::norm;
use vardir_variety::{
    is_tci, perturb_tci, sample_variety, Perturbation, Region, Tci, TciCheck, RANK_TOL, SAMPLE_TOL,
};

#[test]
fn equator_is_transverse() {
    let v = variety(vec![sphere3(), z3()], 1);
    assert_eq!(is_tci(&v, 64, RANK_TOL, 1).unwrap().verdict(), Some(true));
}

#[test]
fn tangent_sphere_and_cylinder_fail_with_parallel_gradients() {
    let cyl = poly(3, &[(1.0, &[2, 0, 0]), (1.0, &[0, 2, 0]), (-1.0, &[0, 0, 0])]);
    let v = variety(vec![sphere3(), cyl], 1);
    let check = is_tci(&v, 64, RANK_TOL, 2).unwrap();
    let TciCheck::Failed { witness, min_sv, .. } = check.clone() else { panic!("expected a failure, got {check:?}") };
    assert!(min_sv < 1e-3, "min_sv {min_sv}");
    // Independent oracle: both gradients (2x,2y,2z) and (2x,2y,0) and their cross product.
    let (x, y, z) = (witness[0], witness[1], witness[2]);
    assert!(z.abs() < 1e-4, "witness {witness:?} should lie on the equator");
    assert!((x * x + y * y - 1.0).abs() < 1e-6);
    let g1 = [2.0 * x, 2.0 * y, 2.0 * z];
    let g2 = [2.0 * x, 2.0 * y, 0.0];
    let c = [g1[1] * g2[2] - g1[2] * g2[1], g1[2] * g2[0] - g1[0] * g2[2], g1[0] * g2[1] - g1[1] * g2[0]];
    assert!(norm(&c) < 1e-3);
}

#[test]
fn sphere_as_hypersurface_is_transverse() {
    let v = variety(vec![sphere3()], 2);
    assert_eq!(is_tci(&v, 64, RANK_TOL, 3).unwrap().verdict(), Some(true));
}

#[test]
fn empty_zero_set_is_indeterminate_not_false() {
    let v = variety(vec![poly(3, &[(1.0, &[2, 0, 0]), (1.0, &[0, 0, 0])])], 2);
    assert_eq!(is_tci(&v, 16, RANK_TOL, 4).unwrap().verdict(), None);
}

#[test]
fn wrong_generator_count_is_rejected() {
    let v = variety(vec![sphere3()], 1);
    assert!(is_tci(&v, 16, RANK_TOL, 4).is_err());
}

#[test]
fn sphere_samples_lie_on_the_sphere() {
    let v = variety(vec![sphere3()], 2);
    let out = sample_variety(&v, &Region::Annulus(1.0), 100, 7).unwrap();
    assert!(out.complete);
    assert_eq!(out.points.len(), 100);
    for p in &out.points {
        assert!((norm(p) - 1.0).abs() <= 1e-10);
    }
}

#[test]
fn equator_samples() {
    let v = variety(vec![sphere3(), z3()], 1);
    let out = sample_variety(&v, &Region::Annulus(1.0), 50, 8).unwrap();
    assert_eq!(out.points.len(), 50);
    for p in &out.points {
        assert!(p[2].abs() <= 1e-10);
        assert!((p[0] * p[0] + p[1] * p[1] - 1.0).abs() <= 1e-10);
    }
}

#[test]
fn saddle_section_samples_have_small_residuals() {
    let saddle = poly(3, &[(1.0, &[0, 0, 1]), (-1.0, &[1, 1, 0])]);
    let v = variety(vec![sphere3(), saddle], 1);
    let out = sample_variety(&v, &Region::Annulus(1.0), 200, 9).unwrap();
    assert_eq!(out.points.len(), 200);
    for p in &out.points {
        // Residuals recomputed by hand, independent of the polynomial evaluator.
        let (x, y, z) = (p[0], p[1], p[2]);
        assert!((x * x + y * y + z * z - 1.0).abs() <= 1e-8);
        assert!((z - x * y).abs() <= 1e-8);
    }
}

#[test]
fn sampling_is_deterministic() {
    let v = variety(vec![sphere3(), z3()], 1);
    let a = sample_variety(&v, &Region::Annulus(1.0), 30, 11).unwrap();
    let b = sample_variety(&v, &Region::Annulus(1.0), 30, 11).unwrap();
    assert_eq!(a.points, b.points);
}

#[test]
fn sampling_an_empty_set_reports_partial_result() {
    let v = variety(vec![poly(2, &[(1.0, &[2, 0]), (1.0, &[0, 2]), (1.0, &[0, 0])])], 1);
    let out = sample_variety(&v, &Region::Annulus(1.0), 5, 1).unwrap();
    assert!(!out.complete);
    assert!(out.points.is_empty());
}

fn sphere_tci() -> Tci {
    Tci::certify(variety(vec![sphere3()], 2), 64, RANK_TOL, 5).unwrap()
}

#[test]
fn concentric_shift_matches_closed_form() {
    let (moved, d) = perturb_tci(&sphere_tci(), &Perturbation::Shift(vec![0.02]), 1e-3, 1.0).unwrap();
    let expected = 1.0 - 0.98f64.sqrt();
    assert!((d - expected).abs() < 1e-6, "achieved {d}, expected {expected}");
    assert_eq!(moved.dim(), 2);
}

#[test]
fn zero_shift_is_identity() {
    let (_, d) = perturb_tci(&sphere_tci(), &Perturbation::Shift(vec![0.0]), 1e-3, 1.0).unwrap();
    assert!(d <= SAMPLE_TOL);
    let eq = Tci::certify(variety(vec![sphere3(), z3()], 1), 64, RANK_TOL, 6).unwrap();
    let (_, d) = perturb_tci(&eq, &Perturbation::Shift(vec![0.0, 0.0]), 1e-3, 1.0).unwrap();
    assert!(d <= SAMPLE_TOL);
}

#[test]
fn sheared_equator_stays_close() {
    let eq = Tci::certify(variety(vec![sphere3(), z3()], 1), 64, RANK_TOL, 6).unwrap();
    let mode = Perturbation::Shear { generator: 1, beta: vec![0.01, 0.0] };
    let (_, d) = perturb_tci(&eq, &mode, 1e-3, 1.0).unwrap();
    assert!(d <= 0.05, "achieved {d}");
}

#[test]
fn sheared_tilted_plane_stays_close() {
    let tilted = poly(3, &[(1.0, &[1, 0, 0]), (1.0, &[0, 0, 1])]);
    let eq = Tci::certify(variety(vec![sphere3(), tilted], 1), 64, RANK_TOL, 6).unwrap();
    let mode = Perturbation::Shear { generator: 1, beta: vec![0.01, 0.0] };
    let (_, d) = perturb_tci(&eq, &mode, 1e-3, 1.0).unwrap();
    assert!(d > 0.0 && d <= 0.05, "achieved {d}");
}

#[test]
fn shift_that_collapses_transversality_errors() {
    // x^2 + y^2 - 1 + 1 = x^2 + y^2 has the singular zero set {0}.
    let circle = Tci::certify(
        variety(vec![poly(2, &[(1.0, &[2, 0]), (1.0, &[0, 2]), (-1.0, &[0, 0])])], 1),
        32,
        RANK_TOL,
        1,
    )
    .unwrap();
    assert!(perturb_tci(&circle, &Perturbation::Shift(vec![1.0]), 1e-3, 1.0).is_err());
}

#[test]
fn geometric_shift_sequence_is_monotone() {
    let tci = sphere_tci();
    let mut last = f64::INFINITY;
    for k in 0..8 {
        let alpha = 0.1 * 0.5f64.powi(k);
        let (_, d) = perturb_tci(&tci, &Perturbation::Shift(vec![alpha]), 1e-3, 1.0).unwrap();
        assert!(d <= last + 2.0 * SAMPLE_TOL, "alpha {alpha}: {d} after {last}");
        last = d;
    }
    assert!(last < 1e-3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn samples_respect_residual_bound(a in -0.9f64..0.9, b in -0.9f64..0.9, seed in 0u64..1000) {
        let plane = poly(3, &[(1.0, &[0, 0, 1]), (-a, &[1, 0, 0]), (-b, &[0, 0, 0])]);
        let v = variety(vec![sphere3(), plane], 1);
        let out = sample_variety(&v, &Region::Annulus(1.0), 20, seed).unwrap();
        for p in &out.points {
            prop_assert!(v.residual(p) <= SAMPLE_TOL);
            prop_assert!(Region::Annulus(1.0).contains(p));
        }
    }
}
