use std::cmp::Ordering;

/// Exponent vector, one entry per variable.
pub type Monomial = Vec<u32>;

pub fn total_degree(m: &[u32]) -> u32 {
    m.iter().sum()
}

/// Pure lex with `x_1 > x_2 > ... > x_n` (index order).
pub fn lex_cmp(a: &[u32], b: &[u32]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

/// Graded lex: total degree first, ties broken by [`lex_cmp`].
pub fn grlex_cmp(a: &[u32], b: &[u32]) -> Ordering {
    total_degree(a).cmp(&total_degree(b)).then_with(|| lex_cmp(a, b))
}

/// All exponent vectors of total degree `d` in `n` variables, lex-descending
/// (for `n = 2, d = 2`: `x^2, xy, y^2`).
pub fn monomials_of_degree(n: usize, d: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    if n == 0 {
        if d == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    let mut cur = vec![0u32; n];
    fill(&mut cur, 0, d, &mut out);
    out
}

fn fill(cur: &mut Vec<u32>, pos: usize, remaining: u32, out: &mut Vec<Monomial>) {
    let n = cur.len();
    if pos == n - 1 {
        cur[pos] = remaining;
        out.push(cur.clone());
        return;
    }
    for e in (0..=remaining).rev() {
        cur[pos] = e;
        fill(cur, pos + 1, remaining - e, out);
    }
    cur[pos] = 0;
}

/// Monomials of total degree `1..=d` in graded-lex order, lowest degree first.
pub fn monomials_up_to(n: usize, d: u32) -> Vec<Monomial> {
    (1..=d).flat_map(|k| monomials_of_degree(n, k)).collect()
}

pub fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}
