use crate::coeff::{Coeff, Rational};
use crate::error::PolyError;
use crate::polynomial::Polynomial;

/// Nonempty list of polynomials in a common ring.
#[derive(Clone, Debug, PartialEq)]
pub struct PolySystem<C> {
    polys: Vec<Polynomial<C>>,
}

impl<C: Coeff> PolySystem<C> {
    pub fn new(polys: Vec<Polynomial<C>>) -> Result<Self, PolyError> {
        let first = polys.first().ok_or(PolyError::EmptySystem)?;
        let n = first.nvars();
        if let Some(i) = polys.iter().position(|p| p.nvars() != n) {
            return Err(PolyError::InconsistentVars { index: i, expected: n, got: polys[i].nvars() });
        }
        Ok(Self { polys })
    }

    pub fn polys(&self) -> &[Polynomial<C>] {
        &self.polys
    }

    pub fn into_polys(self) -> Vec<Polynomial<C>> {
        self.polys
    }

    pub fn nvars(&self) -> usize {
        self.polys[0].nvars()
    }

    /// Number of generators (the count `ct`).
    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Maximum generator degree; zero generators contribute nothing.
    pub fn degree(&self) -> u32 {
        self.polys.iter().filter_map(|p| p.degree()).max().unwrap_or(0)
    }

    pub fn push(&mut self, p: Polynomial<C>) -> Result<(), PolyError> {
        if p.nvars() != self.nvars() {
            return Err(PolyError::InconsistentVars { index: self.polys.len(), expected: self.nvars(), got: p.nvars() });
        }
        self.polys.push(p);
        Ok(())
    }

    pub fn evaluate(&self, x: &[C]) -> Result<Vec<C>, PolyError> {
        self.polys.iter().map(|p| p.evaluate(x)).collect()
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D + Copy) -> PolySystem<D> {
        PolySystem { polys: self.polys.iter().map(|p| p.map_coeffs(f)).collect() }
    }
}

impl PolySystem<Rational> {
    pub fn to_f64(&self) -> PolySystem<f64> {
        PolySystem { polys: self.polys.iter().map(|p| p.to_f64()).collect() }
    }
}

impl PolySystem<f64> {
    pub fn to_rational(&self) -> Result<PolySystem<Rational>, PolyError> {
        let polys = self.polys.iter().map(|p| p.to_rational()).collect::<Result<Vec<_>, _>>()?;
        Ok(PolySystem { polys })
    }

    /// Largest absolute generator value at `x`.
    pub fn max_residual(&self, x: &[f64]) -> f64 {
        self.polys.iter().map(|p| p.eval(x).abs()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_mixed() {
        assert_eq!(PolySystem::<f64>::new(vec![]), Err(PolyError::EmptySystem));
        let a = Polynomial::<f64>::variable(2, 0);
        let b = Polynomial::<f64>::variable(3, 0);
        assert!(matches!(PolySystem::new(vec![a, b]), Err(PolyError::InconsistentVars { index: 1, .. })));
    }

    #[test]
    fn count_and_degree() {
        let x = Polynomial::<f64>::variable(2, 0);
        let sys = PolySystem::new(vec![&x * &x, x.clone()]).unwrap();
        assert_eq!(sys.len(), 2);
        assert_eq!(sys.degree(), 2);
        assert_eq!(sys.max_residual(&[3.0, 0.0]), 9.0);
    }
}
