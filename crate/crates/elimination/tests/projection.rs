use vardir_elimination::{approx_projection, has_pure_top_power};
use vardir_geonet::norm;
use vardir_poly::{ratio, Polynomial, PolySystem, Rational};
use vardir_variety::{sample_variety, Region, Tci, Variety, RANK_TOL};

type P = Polynomial<Rational>;

fn var(i: usize) -> P {
    Polynomial::variable(3, i)
}

fn sphere() -> P {
    &(&(&(&var(0) * &var(0)) + &(&var(1) * &var(1))) + &(&var(2) * &var(2))) - &Polynomial::constant(3, ratio(1, 1))
}

fn tci(second: P) -> Tci {
    Tci::certify(Variety::new(PolySystem::new(vec![sphere(), second]).unwrap(), 1).unwrap(), 64, RANK_TOL, 1).unwrap()
}

#[test]
fn latitude_circle_projects_to_smaller_circle() {
    let cst = ratio(1, 10);
    let z = tci(&var(2) - &Polynomial::constant(3, cst));
    let p = approx_projection(&z, 0.2).unwrap();
    assert_eq!(p.w.nvars(), 2);
    let x: P = Polynomial::variable(2, 0);
    let y: P = Polynomial::variable(2, 1);
    let expected = &(&(&x * &x) + &(&y * &y)) - &Polynomial::constant(2, ratio(99, 100));
    assert_eq!(p.w.exact().polys(), &[expected]);
    assert!((p.audit - 0.1).abs() < 1e-6, "audit {}", p.audit);
    assert!(p.audit < 0.4);
}

#[test]
fn equator_projects_onto_itself() {
    let p = approx_projection(&tci(var(2)), 0.05).unwrap();
    assert!(p.audit < 1e-8, "audit {}", p.audit);
    for w in p.w.exact().polys() {
        assert!(w.nvars() == 2);
    }
    let pts = sample_variety(&p.w, &Region::Ball(3.0), 50, 3).unwrap().points;
    for q in pts {
        assert!((norm(&q) - 1.0).abs() < 1e-9);
    }
}

#[test]
fn saddle_section_audit_below_twice_slab() {
    let z = tci(&var(2) - &(&var(0) * &var(1)));
    let p = approx_projection(&z, 0.1).unwrap();
    assert!(p.u_count >= 100, "U has {} points", p.u_count);
    assert!(p.audit < 0.2, "audit {}", p.audit);
    // Independent oracle: every U point projects into Z(W), so its distance to W is
    // at most |x_3| < s.
    let u = sample_variety(z.variety(), &Region::Slab { r: 1.0, s: 0.1 }, 200, 5).unwrap().points;
    for x in &u {
        for w in p.w.generators().polys() {
            assert!(w.eval(&x[..2]).abs() < 1e-8);
        }
        assert!(x[2].abs() < 0.1 + 1e-9);
    }
    assert!(!p.over_budget);
}

#[test]
fn shear_is_found_when_no_pure_power_exists() {
    // Neither xz − y nor yz + x − 1/2 contains z² with a nonzero coefficient.
    let a = &(&var(0) * &var(2)) - &var(1);
    let b = &(&var(1) * &var(2)) + &(&var(0) - &Polynomial::constant(3, ratio(1, 2)));
    assert!(!has_pure_top_power(&a) && !has_pure_top_power(&b));
    let z = Tci::certify(Variety::new(PolySystem::new(vec![a, b]).unwrap(), 1).unwrap(), 64, RANK_TOL, 2).unwrap();
    let p = approx_projection(&z, 0.25).unwrap();
    assert!(p.shear.iter().any(|d| *d != ratio(0, 1)));
    assert!(has_pure_top_power(&p.sheared.variety().exact().polys()[0]));
    assert!(p.audit < 0.5);
}

#[test]
fn slab_width_is_validated() {
    assert!(approx_projection(&tci(var(2)), 0.5).is_err());
    assert!(approx_projection(&tci(var(2)), 0.0).is_err());
}
