use std::collections::BTreeMap;

use proptest::prelude::*;
use vardir_elimination::{buchberger, elimination_ideal, ideal_membership, GroebnerBasis};
use vardir_poly::{ratio, Polynomial, PolySystem, Rational};

type P = Polynomial<Rational>;

fn var(n: usize, i: usize) -> P {
    Polynomial::variable(n, i)
}

fn c(n: usize, v: i64) -> P {
    Polynomial::constant(n, ratio(v, 1))
}

fn sys(polys: Vec<P>) -> PolySystem<Rational> {
    PolySystem::new(polys).unwrap()
}

/// Independent normal-form routine over a `BTreeMap` keyed by permuted exponents.
fn remainder(p: &P, basis: &[P], order: &[usize]) -> BTreeMap<Vec<u32>, Rational> {
    let key = |e: &[u32]| order.iter().map(|&v| e[v]).collect::<Vec<u32>>();
    let to_map = |q: &P| q.terms().iter().map(|t| (key(&t.exps), t.coeff.clone())).collect::<BTreeMap<_, _>>();
    let divisors: Vec<BTreeMap<Vec<u32>, Rational>> = basis.iter().map(to_map).collect();
    let mut work = to_map(p);
    let mut rem = BTreeMap::new();
    while let Some((lm, lc)) = work.iter().next_back().map(|(k, v)| (k.clone(), v.clone())) {
        let hit = divisors.iter().find(|d| {
            let (dl, _) = d.iter().next_back().unwrap();
            dl.iter().zip(&lm).all(|(a, b)| a <= b)
        });
        match hit {
            Some(d) => {
                let (dl, dc) = d.iter().next_back().unwrap();
                let shift: Vec<u32> = lm.iter().zip(dl).map(|(a, b)| a - b).collect();
                let f = &lc / dc;
                for (e, v) in d {
                    let k: Vec<u32> = e.iter().zip(&shift).map(|(a, b)| a + b).collect();
                    let entry = work.entry(k.clone()).or_insert_with(|| ratio(0, 1));
                    *entry -= &f * v;
                    if *entry == ratio(0, 1) {
                        work.remove(&k);
                    }
                }
            }
            None => {
                work.remove(&lm);
                rem.insert(lm, lc);
            }
        }
    }
    rem
}

fn s_poly(f: &P, g: &P, order: &[usize]) -> P {
    let lead = |q: &P| {
        q.terms().iter().max_by(|a, b| {
            let ka: Vec<u32> = order.iter().map(|&v| a.exps[v]).collect();
            let kb: Vec<u32> = order.iter().map(|&v| b.exps[v]).collect();
            ka.cmp(&kb)
        })
        .unwrap()
        .clone()
    };
    let (lf, lg) = (lead(f), lead(g));
    let n = f.nvars();
    let l: Vec<u32> = lf.exps.iter().zip(&lg.exps).map(|(a, b)| *a.max(b)).collect();
    let mf = Polynomial::monomial(n, ratio(1, 1) / &lf.coeff, l.iter().zip(&lf.exps).map(|(a, b)| a - b).collect()).unwrap();
    let mg = Polynomial::monomial(n, ratio(1, 1) / &lg.coeff, l.iter().zip(&lg.exps).map(|(a, b)| a - b).collect()).unwrap();
    &(&mf * f) - &(&mg * g)
}

fn assert_groebner(gb: &GroebnerBasis) {
    let b = gb.basis();
    for i in 0..b.len() {
        for j in i + 1..b.len() {
            assert!(remainder(&s_poly(&b[i], &b[j], gb.order()), b, gb.order()).is_empty());
        }
    }
    assert!(gb.s_pairs_reduce_to_zero());
}

#[test]
fn linear_ideal_is_its_own_basis() {
    let polys = vec![&var(2, 0) - &c(2, 1), &var(2, 1) - &c(2, 1)];
    let gb = buchberger(&sys(polys.clone()), &[0, 1]).unwrap();
    assert_eq!(gb.len(), 2);
    for p in &polys {
        assert!(gb.basis().contains(p));
    }
}

#[test]
fn unit_ideal_collapses_to_one() {
    // y·x² − x·(xy − 1) = x, then y·x − (xy − 1) = 1.
    let x = var(2, 0);
    let y = var(2, 1);
    let gb = buchberger(&sys(vec![&(&x * &y) - &c(2, 1), &x * &x]), &[0, 1]).unwrap();
    assert!(gb.is_unit());
    assert_eq!(gb.basis(), &[c(2, 1)]);
    assert!(ideal_membership(&x, &gb).unwrap());
}

fn saddle_sphere() -> (PolySystem<Rational>, P) {
    let (x, y, z) = (var(3, 0), var(3, 1), var(3, 2));
    let sphere = &(&(&(&x * &x) + &(&y * &y)) + &(&z * &z)) - &c(3, 1);
    let projected = &(&(&(&x * &x) + &(&y * &y)) + &(&(&x * &x) * &(&y * &y))) - &c(3, 1);
    (sys(vec![&z - &(&x * &y), sphere]), projected)
}

#[test]
fn saddle_sphere_eliminates_to_quartic() {
    let (ideal, projected) = saddle_sphere();
    let gb = buchberger(&ideal, &[2, 1, 0]).unwrap();
    assert_groebner(&gb);
    assert!(gb.basis().contains(&projected));
    assert!(ideal_membership(&projected, &gb).unwrap());
    // Independent oracle: the substitution z = xy turns the sphere into the quartic,
    // so the quartic is sphere − (z − xy)(z + xy).
    let (x, y, z) = (var(3, 0), var(3, 1), var(3, 2));
    let combo = &ideal.polys()[1] - &(&(&z - &(&x * &y)) * &(&z + &(&x * &y)));
    assert_eq!(combo, projected);
    assert_eq!(elimination_ideal(&gb, 2).unwrap(), vec![projected]);
}

#[test]
fn elimination_of_a_coordinate_plane_is_zero() {
    let gb = buchberger(&sys(vec![var(3, 2)]), &[2, 0, 1]).unwrap();
    assert!(elimination_ideal(&gb, 2).unwrap().is_empty());
}

#[test]
fn split_generators_eliminate_cleanly() {
    let (x, y, z) = (var(3, 0), var(3, 1), var(3, 2));
    let circle = &(&(&x * &x) + &(&y * &y)) - &c(3, 1);
    let height = &z - &Polynomial::constant(3, ratio(3, 7));
    let gb = buchberger(&sys(vec![circle.clone(), height]), &[2, 0, 1]).unwrap();
    assert_eq!(elimination_ideal(&gb, 2).unwrap(), vec![circle]);
}

#[test]
fn elimination_needs_dropped_variable_highest() {
    let gb = buchberger(&sys(vec![var(3, 2)]), &[0, 1, 2]).unwrap();
    assert!(elimination_ideal(&gb, 2).is_err());
}

#[test]
fn one_is_not_in_a_maximal_ideal() {
    let gb = buchberger(&sys(vec![var(2, 0), var(2, 1)]), &[0, 1]).unwrap();
    assert!(!ideal_membership(&c(2, 1), &gb).unwrap());
    assert!(ideal_membership(&(&var(2, 0) * &var(2, 1)), &gb).unwrap());
}

#[test]
fn serialized_basis_names_its_order() {
    let (ideal, _) = saddle_sphere();
    let gb = buchberger(&ideal, &[2, 1, 0]).unwrap();
    let text = gb.to_text();
    assert!(text.starts_with("order 3 2 1\n"));
    assert_eq!(GroebnerBasis::from_text(&text).unwrap(), gb);
}

fn small_poly(n: usize, coeffs: &[i64]) -> P {
    let monos: Vec<Vec<u32>> = match n {
        2 => vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![2, 0], vec![1, 1], vec![0, 2]],
        _ => unreachable!(),
    };
    Polynomial::from_terms(n, coeffs.iter().zip(monos).map(|(c, m)| (ratio(*c, 1), m))).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn random_ideals_give_groebner_bases(a in prop::collection::vec(-3i64..=3, 6), b in prop::collection::vec(-3i64..=3, 6), swap in any::<bool>()) {
        let f = small_poly(2, &a);
        let g = small_poly(2, &b);
        prop_assume!(!f.is_zero() && !g.is_zero());
        let order = if swap { [1, 0] } else { [0, 1] };
        let gb = buchberger(&sys(vec![f.clone(), g.clone()]), &order).unwrap();
        assert_groebner(&gb);
        prop_assert!(ideal_membership(&f, &gb).unwrap());
        prop_assert!(ideal_membership(&g, &gb).unwrap());
        // The reduced basis does not depend on generator order.
        let again = buchberger(&sys(vec![g.clone(), f.clone()]), &order).unwrap();
        prop_assert_eq!(again.basis(), gb.basis());
        for e in elimination_ideal(&gb, order[0]).unwrap() {
            prop_assert!(!e.depends_on(order[0]));
            prop_assert!(ideal_membership(&e, &gb).unwrap());
        }
    }
}
