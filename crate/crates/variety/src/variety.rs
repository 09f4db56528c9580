use vardir_poly::{parse_system, write_system, PolySystem, Rational};

use crate::error::VarietyError;

/// Zero set of a generator list with a declared dimension `m`.
///
/// Generators are held exactly; a float image is cached for numerics.
#[derive(Clone, Debug, PartialEq)]
pub struct Variety {
    exact: PolySystem<Rational>,
    float: PolySystem<f64>,
    dim: usize,
}

impl Variety {
    pub fn new(exact: PolySystem<Rational>, dim: usize) -> Result<Self, VarietyError> {
        if dim > exact.nvars() {
            return Err(VarietyError::InvalidArgument(format!(
                "declared dimension {dim} exceeds ambient dimension {}",
                exact.nvars()
            )));
        }
        let float = exact.to_f64();
        Ok(Self { exact, float, dim })
    }

    /// Float generators are converted to their exact dyadic values.
    pub fn from_float(sys: PolySystem<f64>, dim: usize) -> Result<Self, VarietyError> {
        Self::new(sys.to_rational()?, dim)
    }

    pub fn generators(&self) -> &PolySystem<f64> {
        &self.float
    }

    pub fn exact(&self) -> &PolySystem<Rational> {
        &self.exact
    }

    pub fn nvars(&self) -> usize {
        self.exact.nvars()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn codim(&self) -> usize {
        self.nvars() - self.dim
    }

    /// `D`, the maximum generator degree.
    pub fn degree(&self) -> u32 {
        self.exact.degree()
    }

    /// `J`, the number of generators.
    pub fn count(&self) -> usize {
        self.exact.len()
    }

    pub fn residual(&self, x: &[f64]) -> f64 {
        self.float.max_residual(x)
    }
}

/// Header `dim m deg D`, then the generator blocks.
pub fn write_variety(v: &Variety) -> String {
    format!("dim {} deg {}\n{}", v.dim(), v.degree(), write_system(v.exact()))
}

pub fn read_variety(text: &str) -> Result<Variety, VarietyError> {
    let (head, body) = text.split_once('\n').unwrap_or((text, ""));
    let fields: Vec<&str> = head.split_whitespace().collect();
    let bad = |message: &str| VarietyError::Format { line: 1, message: message.to_string() };
    if fields.len() != 4 || fields[0] != "dim" || fields[2] != "deg" {
        return Err(bad("expected header `dim m deg D`"));
    }
    let dim: usize = fields[1].parse().map_err(|_| bad("dimension is not an integer"))?;
    let deg: u32 = fields[3].parse().map_err(|_| bad("degree is not an integer"))?;
    let sys = parse_system(body)?;
    let v = Variety::new(sys, dim)?;
    if v.degree() != deg {
        return Err(bad(&format!("header degree {deg} disagrees with generators ({})", v.degree())));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use vardir_poly::{ratio, Polynomial};

    #[test]
    fn file_round_trip() {
        let x: Polynomial<Rational> = Polynomial::variable(3, 0);
        let z: Polynomial<Rational> = Polynomial::variable(3, 2);
        let sys = PolySystem::new(vec![&(&x * &x) - &Polynomial::constant(3, ratio(1, 4)), z]).unwrap();
        let v = Variety::new(sys, 1).unwrap();
        let text = write_variety(&v);
        assert!(text.starts_with("dim 1 deg 2\n"));
        assert_eq!(read_variety(&text).unwrap(), v);
        assert_eq!((v.degree(), v.count(), v.codim()), (2, 2, 2));
    }

    #[test]
    fn header_is_checked() {
        assert!(matches!(read_variety("dim 1 deg 5\n1/1 1\n"), Err(VarietyError::Format { .. })));
        assert!(matches!(read_variety("dimension 1\n1/1 1\n"), Err(VarietyError::Format { .. })));
    }
}
