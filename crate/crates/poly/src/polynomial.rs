use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::coeff::{is_one, pow_coeff, rational_from_f64, Coeff, Rational};
use crate::error::PolyError;
use crate::monomial::{grlex_cmp, total_degree, Monomial};

#[derive(Clone, Debug, PartialEq)]
pub struct Term<C> {
    pub coeff: C,
    pub exps: Monomial,
}

/// Sparse polynomial in `nvars` variables.
///
/// Invariants: exponent vectors have length `nvars`, are pairwise distinct,
/// carry nonzero coefficients, and are sorted grlex-descending.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial<C> {
    nvars: usize,
    terms: Vec<Term<C>>,
}

impl<C: Coeff> Polynomial<C> {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: Vec::new() }
    }

    pub fn constant(nvars: usize, c: C) -> Self {
        Self::normalized(nvars, vec![Term { coeff: c, exps: vec![0; nvars] }])
    }

    /// The coordinate function `x_i` (0-based).
    pub fn variable(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable index {i} out of range for {nvars} variables");
        let mut exps = vec![0; nvars];
        exps[i] = 1;
        Self { nvars, terms: vec![Term { coeff: C::one(), exps }] }
    }

    pub fn monomial(nvars: usize, coeff: C, exps: Monomial) -> Result<Self, PolyError> {
        Self::from_terms(nvars, vec![(coeff, exps)])
    }

    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = (C, Monomial)>,
    {
        let mut out = Vec::new();
        for (coeff, exps) in terms {
            if exps.len() != nvars {
                return Err(PolyError::DimensionMismatch { expected: nvars, got: exps.len() });
            }
            out.push(Term { coeff, exps });
        }
        Ok(Self::normalized(nvars, out))
    }

    fn normalized(nvars: usize, mut terms: Vec<Term<C>>) -> Self {
        terms.sort_by(|a, b| grlex_cmp(&b.exps, &a.exps));
        let mut merged: Vec<Term<C>> = Vec::with_capacity(terms.len());
        for t in terms {
            match merged.last_mut() {
                Some(last) if last.exps == t.exps => {
                    last.coeff = last.coeff.clone() + t.coeff;
                }
                _ => merged.push(t),
            }
        }
        merged.retain(|t| !t.coeff.is_zero());
        Self { nvars, terms: merged }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[Term<C>] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` stands for the degree of the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.iter().map(|t| total_degree(&t.exps)).max()
    }

    pub fn is_constant(&self) -> bool {
        self.degree().map_or(true, |d| d == 0)
    }

    /// Leading term in grlex order.
    pub fn leading_term(&self) -> Option<&Term<C>> {
        self.terms.first()
    }

    pub fn coeff_of(&self, exps: &[u32]) -> C {
        self.terms
            .binary_search_by(|t| grlex_cmp(exps, &t.exps))
            .map(|i| self.terms[i].coeff.clone())
            .unwrap_or_else(|_| C::zero())
    }

    /// Maximum exponent of `var` over all terms.
    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.iter().map(|t| t.exps[var]).max().unwrap_or(0)
    }

    pub fn depends_on(&self, var: usize) -> bool {
        self.degree_in(var) > 0
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        let terms = self
            .terms
            .iter()
            .map(|t| Term { coeff: t.coeff.clone() * c.clone(), exps: t.exps.clone() })
            .collect();
        Self { nvars: self.nvars, terms }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::constant(self.nvars, C::one());
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    fn check_point<T>(&self, x: &[T]) -> Result<(), PolyError> {
        if x.len() != self.nvars {
            return Err(PolyError::DimensionMismatch { expected: self.nvars, got: x.len() });
        }
        Ok(())
    }

    fn power_table(&self, x: &[C]) -> Vec<Vec<C>> {
        (0..self.nvars)
            .map(|i| {
                let top = self.degree_in(i) as usize;
                let mut row = Vec::with_capacity(top + 1);
                row.push(C::one());
                for k in 1..=top {
                    let prev: C = row[k - 1].clone();
                    row.push(prev * x[i].clone());
                }
                row
            })
            .collect()
    }

    pub fn evaluate(&self, x: &[C]) -> Result<C, PolyError> {
        self.check_point(x)?;
        let pw = self.power_table(x);
        let mut acc = C::zero();
        for t in &self.terms {
            let mut m = t.coeff.clone();
            for (i, &e) in t.exps.iter().enumerate() {
                if e > 0 {
                    m = m * pw[i][e as usize].clone();
                }
            }
            acc = acc + m;
        }
        Ok(acc)
    }

    /// Value and gradient at `x`, computed term by term in the coefficient field.
    pub fn evaluate_with_gradient(&self, x: &[C]) -> Result<(C, Vec<C>), PolyError> {
        self.check_point(x)?;
        let n = self.nvars;
        let pw = self.power_table(x);
        let mut value = C::zero();
        let mut grad = vec![C::zero(); n];
        for t in &self.terms {
            let mut full = t.coeff.clone();
            for (i, &e) in t.exps.iter().enumerate() {
                if e > 0 {
                    full = full * pw[i][e as usize].clone();
                }
            }
            value = value + full;
            for j in 0..n {
                let ej = t.exps[j];
                if ej == 0 {
                    continue;
                }
                let mut d = t.coeff.clone() * C::from_i64(ej as i64);
                for (i, &e) in t.exps.iter().enumerate() {
                    let e = if i == j { e - 1 } else { e };
                    if e > 0 {
                        d = d * pw[i][e as usize].clone();
                    }
                }
                grad[j] = grad[j].clone() + d;
            }
        }
        Ok((value, grad))
    }

    pub fn derivative(&self, var: usize) -> Self {
        assert!(var < self.nvars, "variable index out of range");
        let terms = self
            .terms
            .iter()
            .filter(|t| t.exps[var] > 0)
            .map(|t| {
                let mut exps = t.exps.clone();
                let e = exps[var];
                exps[var] -= 1;
                Term { coeff: t.coeff.clone() * C::from_i64(e as i64), exps }
            })
            .collect();
        Self::normalized(self.nvars, terms)
    }

    pub fn gradient(&self) -> Vec<Self> {
        (0..self.nvars).map(|i| self.derivative(i)).collect()
    }

    /// Substitutes `subs[i]` for `x_i`. All substitutes share one target arity.
    pub fn compose(&self, subs: &[Polynomial<C>]) -> Result<Self, PolyError> {
        if subs.len() != self.nvars {
            return Err(PolyError::DimensionMismatch { expected: self.nvars, got: subs.len() });
        }
        let target = subs.first().map_or(0, |s| s.nvars);
        if let Some(bad) = subs.iter().position(|s| s.nvars != target) {
            return Err(PolyError::InconsistentVars { index: bad, expected: target, got: subs[bad].nvars });
        }
        let mut cache: Vec<Vec<Polynomial<C>>> = subs
            .iter()
            .map(|s| vec![Polynomial::constant(target, C::one()), s.clone()])
            .collect();
        let mut acc = Polynomial::zero(target);
        for t in &self.terms {
            let mut m = Polynomial::constant(target, t.coeff.clone());
            for (i, &e) in t.exps.iter().enumerate() {
                while cache[i].len() <= e as usize {
                    let next = cache[i].last().unwrap() * &subs[i];
                    cache[i].push(next);
                }
                if e > 0 {
                    m = &m * &cache[i][e as usize];
                }
            }
            acc = &acc + &m;
        }
        Ok(acc)
    }

    /// Drops variable `var`, which must not occur.
    pub fn remove_variable(&self, var: usize) -> Result<Self, PolyError> {
        if self.depends_on(var) {
            return Err(PolyError::InvalidArgument(format!("polynomial depends on x{}", var + 1)));
        }
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let mut exps = t.exps.clone();
                exps.remove(var);
                Term { coeff: t.coeff.clone(), exps }
            })
            .collect();
        Ok(Self::normalized(self.nvars - 1, terms))
    }

    /// Inserts a new variable at position `var` that does not occur.
    pub fn insert_variable(&self, var: usize) -> Self {
        assert!(var <= self.nvars);
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let mut exps = t.exps.clone();
                exps.insert(var, 0);
                Term { coeff: t.coeff.clone(), exps }
            })
            .collect();
        Self::normalized(self.nvars + 1, terms)
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Polynomial<D> {
        let terms = self
            .terms
            .iter()
            .map(|t| Term { coeff: f(&t.coeff), exps: t.exps.clone() })
            .collect();
        Polynomial::normalized(self.nvars, terms)
    }

    /// Divides by the leading coefficient (no-op on zero).
    pub fn monic(&self) -> Self {
        match self.terms.first() {
            Some(t) if !is_one(&t.coeff) => {
                let inv = C::one() / t.coeff.clone();
                self.scale(&inv)
            }
            _ => self.clone(),
        }
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.abs_f64()).fold(0.0, f64::max)
    }
}

impl Polynomial<Rational> {
    pub fn to_f64(&self) -> Polynomial<f64> {
        self.map_coeffs(|c| c.to_f64_lossy())
    }
}

impl Polynomial<f64> {
    /// Exact rational image of every float coefficient.
    pub fn to_rational(&self) -> Result<Polynomial<Rational>, PolyError> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            let c = rational_from_f64(t.coeff).ok_or(PolyError::NonFinite(t.coeff))?;
            terms.push((c, t.exps.clone()));
        }
        Polynomial::from_terms(self.nvars, terms)
    }

    /// Evaluation at a float point without allocation-heavy generic paths.
    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.nvars);
        self.terms
            .iter()
            .map(|t| {
                let mut m = t.coeff;
                for (xi, &e) in x.iter().zip(&t.exps) {
                    if e > 0 {
                        m *= xi.powi(e as i32);
                    }
                }
                m
            })
            .sum()
    }
}

/// Free-function form of [`Polynomial::evaluate_with_gradient`].
pub fn evaluate_with_gradient<C: Coeff>(p: &Polynomial<C>, x: &[C]) -> Result<(C, Vec<C>), PolyError> {
    p.evaluate_with_gradient(x)
}

fn combine<C: Coeff>(a: &Polynomial<C>, b: &Polynomial<C>, negate_b: bool) -> Polynomial<C> {
    assert_eq!(a.nvars, b.nvars, "polynomials live in different rings");
    let mut terms = Vec::with_capacity(a.terms.len() + b.terms.len());
    terms.extend(a.terms.iter().cloned());
    for t in &b.terms {
        let coeff = if negate_b { -t.coeff.clone() } else { t.coeff.clone() };
        terms.push(Term { coeff, exps: t.exps.clone() });
    }
    Polynomial::normalized(a.nvars, terms)
}

impl<C: Coeff> Add for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn add(self, rhs: Self) -> Polynomial<C> {
        combine(self, rhs, false)
    }
}

impl<C: Coeff> Sub for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn sub(self, rhs: Self) -> Polynomial<C> {
        combine(self, rhs, true)
    }
}

impl<C: Coeff> Mul for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn mul(self, rhs: Self) -> Polynomial<C> {
        assert_eq!(self.nvars, rhs.nvars, "polynomials live in different rings");
        let mut acc: HashMap<Monomial, C> = HashMap::with_capacity(self.terms.len() * rhs.terms.len());
        for a in &self.terms {
            for b in &rhs.terms {
                let exps: Monomial = a.exps.iter().zip(&b.exps).map(|(x, y)| x + y).collect();
                let c = a.coeff.clone() * b.coeff.clone();
                match acc.get_mut(&exps) {
                    Some(v) => *v = v.clone() + c,
                    None => {
                        acc.insert(exps, c);
                    }
                }
            }
        }
        let terms = acc.into_iter().map(|(exps, coeff)| Term { coeff, exps }).collect();
        Polynomial::normalized(self.nvars, terms)
    }
}

impl<C: Coeff> Neg for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn neg(self) -> Polynomial<C> {
        self.scale(&(-C::one()))
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl<C: Coeff> $tr for Polynomial<C> {
            type Output = Polynomial<C>;
            fn $m(self, rhs: Self) -> Polynomial<C> {
                (&self).$m(&rhs)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl<C: Coeff + fmt::Display> fmt::Display for Polynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, t) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            let vars: Vec<String> = t
                .exps
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| if e == 1 { format!("x{}", i + 1) } else { format!("x{}^{}", i + 1, e) })
                .collect();
            if vars.is_empty() {
                write!(f, "{}", t.coeff)?;
            } else if is_one(&t.coeff) {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "({})*{}", t.coeff, vars.join("*"))?;
            }
        }
        Ok(())
    }
}

/// Value of the bare monomial `x^exps`.
pub fn monomial_value<C: Coeff>(exps: &[u32], x: &[C]) -> C {
    exps.iter().zip(x).fold(C::one(), |acc, (&e, xi)| acc * pow_coeff(xi, e))
}
