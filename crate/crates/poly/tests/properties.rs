//! Property tests against independent oracles: a dense-array arithmetic model,
//! central finite differences, and the Veronese inner-product identity.

use num_traits::Zero;
use proptest::prelude::*;
use vardir_poly::{
    monomials_up_to, parse_system, ratio, veronese_lift, write_system, Polynomial, PolySystem, Rational,
};

const MAX_DEG: u32 = 5;

fn term_strategy(n: usize) -> impl Strategy<Value = (i64, i64, Vec<u32>)> {
    (-20i64..=20, 1i64..=9, prop::collection::vec(0u32..=MAX_DEG, n)).prop_map(|(a, b, mut e)| {
        // clamp to total degree <= MAX_DEG
        while e.iter().sum::<u32>() > MAX_DEG {
            let i = e.iter().position(|&x| x > 0).unwrap();
            e[i] -= 1;
        }
        (a, b, e)
    })
}

fn poly_strategy(n: usize) -> impl Strategy<Value = Polynomial<Rational>> {
    prop::collection::vec(term_strategy(n), 0..8).prop_map(move |ts| {
        Polynomial::from_terms(n, ts.into_iter().map(|(a, b, e)| (ratio(a, b), e))).unwrap()
    })
}

fn pair_strategy() -> impl Strategy<Value = (Polynomial<Rational>, Polynomial<Rational>)> {
    (1usize..=4).prop_flat_map(|n| (poly_strategy(n), poly_strategy(n)))
}

/// Dense coefficient tensor on the exponent box `[0, side)^n`.
struct Dense<T> {
    n: usize,
    side: usize,
    data: Vec<T>,
}

impl<T: Clone + Zero + std::ops::Add<Output = T> + std::ops::Mul<Output = T>> Dense<T> {
    fn from_poly<C: vardir_poly::Coeff>(p: &Polynomial<C>, side: usize, conv: impl Fn(&C) -> T) -> Self {
        let n = p.nvars();
        let mut data = vec![T::zero(); side.pow(n as u32)];
        for t in p.terms() {
            let idx = Self::index(&t.exps, side);
            data[idx] = data[idx].clone() + conv(&t.coeff);
        }
        Self { n, side, data }
    }

    fn index(e: &[u32], side: usize) -> usize {
        e.iter().fold(0, |acc, &x| acc * side + x as usize)
    }

    fn exps(mut idx: usize, n: usize, side: usize) -> Vec<u32> {
        let mut e = vec![0u32; n];
        for k in (0..n).rev() {
            e[k] = (idx % side) as u32;
            idx /= side;
        }
        e
    }

    fn add(&self, o: &Self) -> Self {
        let data = self.data.iter().zip(&o.data).map(|(a, b)| a.clone() + b.clone()).collect();
        Self { n: self.n, side: self.side, data }
    }

    fn mul(&self, o: &Self) -> Self {
        let mut data = vec![T::zero(); self.data.len()];
        for (i, a) in self.data.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let ei = Self::exps(i, self.n, self.side);
            for (j, b) in o.data.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let ej = Self::exps(j, self.n, self.side);
                let sum: Vec<u32> = ei.iter().zip(&ej).map(|(x, y)| x + y).collect();
                if sum.iter().any(|&x| x as usize >= self.side) {
                    continue;
                }
                let k = Self::index(&sum, self.side);
                data[k] = data[k].clone() + a.clone() * b.clone();
            }
        }
        Self { n: self.n, side: self.side, data }
    }

    fn get(&self, e: &[u32]) -> T {
        self.data[Self::index(e, self.side)].clone()
    }
}

const SIDE: usize = 2 * MAX_DEG as usize + 1;

fn assert_dense_eq_exact(p: &Polynomial<Rational>, d: &Dense<Rational>) {
    for (i, c) in d.data.iter().enumerate() {
        let e = Dense::<Rational>::exps(i, d.n, d.side);
        assert_eq!(&p.coeff_of(&e), c, "coefficient of {e:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn exact_arithmetic_matches_dense((a, b) in pair_strategy()) {
        let da = Dense::from_poly(&a, SIDE, |c: &Rational| c.clone());
        let db = Dense::from_poly(&b, SIDE, |c: &Rational| c.clone());
        assert_dense_eq_exact(&(&a + &b), &da.add(&db));
        assert_dense_eq_exact(&(&a * &b), &da.mul(&db));
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn float_arithmetic_matches_dense((a, b) in pair_strategy()) {
        let (fa, fb) = (a.to_f64(), b.to_f64());
        let da = Dense::from_poly(&fa, SIDE, |c: &f64| *c);
        let db = Dense::from_poly(&fb, SIDE, |c: &f64| *c);
        let sum = &fa + &fb;
        let prod = &fa * &fb;
        let (dsum, dprod) = (da.add(&db), da.mul(&db));
        let scale = 1.0 + fa.max_abs_coeff() * fb.max_abs_coeff() * 64.0;
        for (i, want) in dprod.data.iter().enumerate() {
            let e = Dense::<f64>::exps(i, da.n, SIDE);
            prop_assert!((prod.coeff_of(&e) - want).abs() <= 1e-12 * scale.max(want.abs()));
            let ws = dsum.get(&e);
            prop_assert!((sum.coeff_of(&e) - ws).abs() <= 1e-12 * ws.abs().max(1.0));
        }
    }

    #[test]
    fn gradient_matches_central_differences(
        p in (1usize..=4).prop_flat_map(poly_strategy),
        seed in prop::collection::vec(-1.0f64..1.0, 4),
    ) {
        let f = p.to_f64();
        let x: Vec<f64> = seed[..f.nvars()].to_vec();
        let (_, g) = f.evaluate_with_gradient(&x).unwrap();
        let h = 1e-5;
        for j in 0..f.nvars() {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[j] += h;
            xm[j] -= h;
            let fd = (f.eval(&xp) - f.eval(&xm)) / (2.0 * h);
            // relative error with a unit floor, so vanishing gradients are compared absolutely
            let rel = (fd - g[j]).abs() / g[j].abs().max(1.0);
            prop_assert!(rel <= 1e-6, "component {} fd {} exact {}", j, fd, g[j]);
        }
    }

    #[test]
    fn exact_gradient_is_derivative_evaluation(p in (1usize..=3).prop_flat_map(poly_strategy)) {
        let x: Vec<Rational> = (0..p.nvars()).map(|i| ratio(i as i64 * 2 - 1, 3)).collect();
        let (v, g) = p.evaluate_with_gradient(&x).unwrap();
        prop_assert_eq!(v, p.evaluate(&x).unwrap());
        for (j, gj) in g.iter().enumerate() {
            prop_assert_eq!(gj, &p.derivative(j).evaluate(&x).unwrap());
        }
    }

    #[test]
    fn veronese_inner_product(
        n in 1usize..=3,
        d in 1u32..=4,
        raw in prop::collection::vec(-3.0f64..3.0, 40),
        pt in prop::collection::vec(-1.5f64..1.5, 3),
    ) {
        let mons = monomials_up_to(n, d);
        let coeffs: Vec<f64> = (0..mons.len()).map(|k| raw[k % raw.len()]).collect();
        let p = Polynomial::from_terms(n, coeffs.iter().cloned().zip(mons.iter().cloned())).unwrap();
        let x = &pt[..n];
        let lift = veronese_lift(x, d);
        let inner: f64 = coeffs.iter().zip(&lift).map(|(c, l)| c * l).sum();
        let direct = p.eval(x);
        prop_assert!((inner - direct).abs() <= 1e-12 * (1.0 + direct.abs()) * mons.len() as f64);
    }

    #[test]
    fn text_round_trip((a, b) in pair_strategy()) {
        let sys = PolySystem::new(vec![a, b]).unwrap();
        let text = write_system(&sys);
        prop_assert_eq!(parse_system(&text).unwrap(), sys);
    }
}
