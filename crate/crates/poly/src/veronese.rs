use crate::monomial::monomials_up_to;

/// `binom(n + d, d) - 1`, the number of nonconstant monomials of degree at most `d`.
pub fn veronese_dim(n: usize, d: u32) -> usize {
    let mut b: u128 = 1;
    for k in 1..=d as u128 {
        b = b * (n as u128 + k) / k;
    }
    (b - 1) as usize
}

/// Evaluates every monomial of degree `1..=d` at `x`, in the order of
/// [`monomials_up_to`].
pub fn veronese_lift(x: &[f64], d: u32) -> Vec<f64> {
    assert!(d >= 1, "lift degree must be at least 1");
    monomials_up_to(x.len(), d)
        .iter()
        .map(|m| m.iter().zip(x).fold(1.0, |acc, (&e, xi)| acc * xi.powi(e as i32)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(veronese_lift(&[2.0], 2), vec![2.0, 4.0]);
        assert_eq!(veronese_lift(&[1.0, 1.0], 1), vec![1.0, 1.0]);
        assert_eq!(veronese_lift(&[2.0, 3.0], 2), vec![2.0, 3.0, 4.0, 6.0, 9.0]);
    }

    #[test]
    fn dimension_formula() {
        for n in 1..5 {
            for d in 1..6 {
                assert_eq!(veronese_lift(&vec![0.5; n], d).len(), veronese_dim(n, d));
            }
        }
        assert_eq!(veronese_dim(3, 2), 9);
    }
}
