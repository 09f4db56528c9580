//! Sparse polynomials in permuted coordinates, terms sorted by descending lex order.
//!
//! Position 0 of an exponent vector is the highest variable, so the derived
//! `Ord` on `Vec<u32>` is exactly the lex order.

use num_traits::{One, Zero};
use vardir_poly::{Polynomial, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct LexPoly {
    pub terms: Vec<(Vec<u32>, Rational)>,
}

pub(crate) fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

pub(crate) fn lcm(a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

pub(crate) fn coprime(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| *x == 0 || *y == 0)
}

impl LexPoly {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn from_poly(p: &Polynomial<Rational>, order: &[usize]) -> Self {
        let mut terms: Vec<(Vec<u32>, Rational)> =
            p.terms().iter().map(|t| (order.iter().map(|&v| t.exps[v]).collect(), t.coeff.clone())).collect();
        terms.sort_by(|a, b| b.0.cmp(&a.0));
        Self { terms }
    }

    pub fn to_poly(&self, order: &[usize]) -> Polynomial<Rational> {
        let n = order.len();
        let terms = self.terms.iter().map(|(e, c)| {
            let mut exps = vec![0u32; n];
            for (k, &v) in order.iter().enumerate() {
                exps[v] = e[k];
            }
            (c.clone(), exps)
        });
        Polynomial::from_terms(n, terms).expect("arity is preserved")
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn lm(&self) -> &[u32] {
        &self.terms[0].0
    }

    pub fn lc(&self) -> &Rational {
        &self.terms[0].1
    }

    pub fn is_constant(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.iter().all(|&e| e == 0)
    }

    pub fn monic(mut self) -> Self {
        if let Some(lc) = self.terms.first().map(|t| t.1.clone()) {
            if !lc.is_one() {
                for t in &mut self.terms {
                    t.1 = &t.1 / &lc;
                }
            }
        }
        self
    }

    /// `self − c · x^m · g`.
    pub fn sub_scaled(&self, c: &Rational, m: &[u32], g: &LexPoly) -> LexPoly {
        let shifted = g.terms.iter().map(|(e, gc)| (e.iter().zip(m).map(|(a, b)| a + b).collect::<Vec<u32>>(), gc * c));
        let mut out = Vec::with_capacity(self.terms.len() + g.terms.len());
        let mut a = self.terms.iter().cloned().peekable();
        let mut b = shifted.peekable();
        loop {
            match (a.peek(), b.peek()) {
                (Some(x), Some(y)) => match x.0.cmp(&y.0) {
                    std::cmp::Ordering::Greater => out.push(a.next().unwrap()),
                    std::cmp::Ordering::Less => {
                        let (e, v) = b.next().unwrap();
                        out.push((e, -v));
                    }
                    std::cmp::Ordering::Equal => {
                        let (e, u) = a.next().unwrap();
                        let (_, v) = b.next().unwrap();
                        let d = u - v;
                        if !d.is_zero() {
                            out.push((e, d));
                        }
                    }
                },
                (Some(_), None) => out.push(a.next().unwrap()),
                (None, Some(_)) => {
                    let (e, v) = b.next().unwrap();
                    out.push((e, -v));
                }
                (None, None) => break,
            }
        }
        LexPoly { terms: out }
    }

    /// Complete remainder of multivariate division by `g`.
    pub fn reduce(&self, g: &[LexPoly]) -> LexPoly {
        let mut p = self.clone();
        let mut rem: Vec<(Vec<u32>, Rational)> = Vec::new();
        while let Some((lm, lc)) = p.terms.first().cloned() {
            match g.iter().find(|q| !q.is_zero() && divides(q.lm(), &lm)) {
                Some(q) => {
                    let m: Vec<u32> = lm.iter().zip(q.lm()).map(|(a, b)| a - b).collect();
                    let c = &lc / q.lc();
                    p = p.sub_scaled(&c, &m, q);
                }
                None => {
                    rem.push(p.terms.remove(0));
                }
            }
        }
        LexPoly { terms: rem }
    }

    pub fn s_poly(f: &LexPoly, g: &LexPoly) -> LexPoly {
        let l = lcm(f.lm(), g.lm());
        let mf: Vec<u32> = l.iter().zip(f.lm()).map(|(a, b)| a - b).collect();
        let mg: Vec<u32> = l.iter().zip(g.lm()).map(|(a, b)| a - b).collect();
        let left = LexPoly::zero().sub_scaled(&-(Rational::one() / f.lc()), &mf, f);
        left.sub_scaled(&(Rational::one() / g.lc()), &mg, g)
    }
}
