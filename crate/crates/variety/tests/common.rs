#![allow(dead_code)]

use vardir_poly::{FloatPoly, PolySystem};
use vardir_variety::Variety;

pub fn poly(n: usize, terms: &[(f64, &[u32])]) -> FloatPoly {
    FloatPoly::from_terms(n, terms.iter().map(|(c, e)| (*c, e.to_vec()))).unwrap()
}

pub fn sphere3() -> FloatPoly {
    poly(3, &[(1.0, &[2, 0, 0]), (1.0, &[0, 2, 0]), (1.0, &[0, 0, 2]), (-1.0, &[0, 0, 0])])
}

pub fn z3() -> FloatPoly {
    poly(3, &[(1.0, &[0, 0, 1])])
}

pub fn variety(polys: Vec<FloatPoly>, dim: usize) -> Variety {
    Variety::from_float(PolySystem::new(polys).unwrap(), dim).unwrap()
}
