use std::collections::BTreeSet;

use vardir_poly::{parse_system, write_polynomial, Polynomial, PolySystem, Rational};

use crate::error::ElimError;
use crate::lex::{coprime, divides, lcm, LexPoly};

/// Default cap on the number of S-pairs reduced by [`buchberger`].
pub const DEFAULT_BUDGET: usize = 100_000;

/// A reduced Gröbner basis in pure lex order.
///
/// `order[0]` is the highest variable, `order[1]` the next, and so on.
#[derive(Clone, Debug, PartialEq)]
pub struct GroebnerBasis {
    nvars: usize,
    order: Vec<usize>,
    basis: Vec<Polynomial<Rational>>,
    lex: Vec<LexPoly>,
}

impl GroebnerBasis {
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Monic members, sorted by descending leading monomial.
    pub fn basis(&self) -> &[Polynomial<Rational>] {
        &self.basis
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_unit(&self) -> bool {
        self.lex.len() == 1 && self.lex[0].is_constant()
    }

    pub fn max_degree(&self) -> u32 {
        self.basis.iter().filter_map(|p| p.degree()).max().unwrap_or(0)
    }

    /// Normal form of `p`.
    pub fn reduce(&self, p: &Polynomial<Rational>) -> Result<Polynomial<Rational>, ElimError> {
        if p.nvars() != self.nvars {
            return Err(ElimError::Input(format!("polynomial in {} variables, basis in {}", p.nvars(), self.nvars)));
        }
        Ok(LexPoly::from_poly(p, &self.order).reduce(&self.lex).to_poly(&self.order))
    }

    /// Whether every S-polynomial of basis pairs has remainder zero.
    pub fn s_pairs_reduce_to_zero(&self) -> bool {
        (0..self.lex.len()).all(|i| {
            (i + 1..self.lex.len()).all(|j| LexPoly::s_poly(&self.lex[i], &self.lex[j]).reduce(&self.lex).is_zero())
        })
    }

    /// Header `order v_1 ... v_n` (1-based variable indices) followed by the members
    /// in the polynomial system format.
    pub fn to_text(&self) -> String {
        let mut s = String::from("order");
        for v in &self.order {
            s.push_str(&format!(" {}", v + 1));
        }
        s.push('\n');
        for p in &self.basis {
            s.push('\n');
            s.push_str(&write_polynomial(p));
        }
        s
    }

    /// Inverse of [`to_text`](Self::to_text). The members are trusted to form a
    /// reduced basis; use [`s_pairs_reduce_to_zero`](Self::s_pairs_reduce_to_zero) to check.
    pub fn from_text(text: &str) -> Result<Self, ElimError> {
        let mut lines = text.splitn(2, '\n');
        let head = lines.next().unwrap_or("");
        let rest = lines.next().unwrap_or("");
        let mut words = head.split_whitespace();
        if words.next() != Some("order") {
            return Err(ElimError::Input("missing `order` header".into()));
        }
        let order = words
            .map(|w| w.parse::<usize>().ok().filter(|&v| v >= 1).map(|v| v - 1))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| ElimError::Input("bad variable index in header".into()))?;
        check_order(&order, order.len())?;
        let polys = if rest.trim().is_empty() { Vec::new() } else { parse_system(rest)?.into_polys() };
        if polys.iter().any(|p| p.nvars() != order.len()) {
            return Err(ElimError::Input("member arity differs from the header".into()));
        }
        let lex: Vec<LexPoly> = polys.iter().map(|p| LexPoly::from_poly(p, &order)).collect();
        Ok(Self { nvars: order.len(), order, basis: polys, lex })
    }
}

fn check_order(order: &[usize], n: usize) -> Result<(), ElimError> {
    let mut seen = vec![false; n];
    if order.len() != n {
        return Err(ElimError::Input(format!("variable order has {} entries for {n} variables", order.len())));
    }
    for &v in order {
        if v >= n || seen[v] {
            return Err(ElimError::Input(format!("{order:?} is not a permutation of 0..{n}")));
        }
        seen[v] = true;
    }
    Ok(())
}

/// Buchberger's algorithm with the coprime and chain criteria, followed by
/// inter-reduction to the unique reduced basis.
///
/// Pairs are processed smallest lcm first, which makes the run deterministic.
pub fn buchberger(ideal: &PolySystem<Rational>, order: &[usize]) -> Result<GroebnerBasis, ElimError> {
    buchberger_with_budget(ideal, order, DEFAULT_BUDGET)
}

pub fn buchberger_with_budget(
    ideal: &PolySystem<Rational>,
    order: &[usize],
    budget: usize,
) -> Result<GroebnerBasis, ElimError> {
    let n = ideal.nvars();
    check_order(order, n)?;
    let mut g: Vec<LexPoly> = Vec::new();
    for p in ideal.polys() {
        let lp = LexPoly::from_poly(p, order).reduce(&g);
        if !lp.is_zero() {
            g.push(lp.monic());
        }
    }
    // (total degree of lcm, lcm, i, j)
    let mut queue: BTreeSet<(u32, Vec<u32>, usize, usize)> = BTreeSet::new();
    let key = |g: &[LexPoly], i: usize, j: usize| {
        let l = lcm(g[i].lm(), g[j].lm());
        (l.iter().sum::<u32>(), l, i, j)
    };
    for j in 0..g.len() {
        for i in 0..j {
            queue.insert(key(&g, i, j));
        }
    }
    let in_queue = |q: &BTreeSet<(u32, Vec<u32>, usize, usize)>, g: &[LexPoly], a: usize, b: usize| {
        let (i, j) = (a.min(b), a.max(b));
        q.contains(&key(g, i, j))
    };
    let mut reductions = 0usize;
    while let Some(item) = queue.pop_first() {
        if g.iter().any(|p| p.is_constant()) {
            break;
        }
        let (_, l, i, j) = item;
        if coprime(g[i].lm(), g[j].lm()) {
            continue;
        }
        let chain = (0..g.len())
            .any(|k| k != i && k != j && divides(g[k].lm(), &l) && !in_queue(&queue, &g, i, k) && !in_queue(&queue, &g, j, k));
        if chain {
            continue;
        }
        reductions += 1;
        if reductions > budget {
            return Err(ElimError::Budget { budget });
        }
        let r = LexPoly::s_poly(&g[i], &g[j]).reduce(&g);
        if !r.is_zero() {
            g.push(r.monic());
            let new = g.len() - 1;
            for k in 0..new {
                queue.insert(key(&g, k, new));
            }
        }
    }
    let lex = reduce_basis(g);
    let basis = lex.iter().map(|p| p.to_poly(order)).collect();
    Ok(GroebnerBasis { nvars: n, order: order.to_vec(), basis, lex })
}

fn reduce_basis(g: Vec<LexPoly>) -> Vec<LexPoly> {
    if let Some(c) = g.iter().find(|p| p.is_constant()) {
        return vec![c.clone().monic()];
    }
    let mut minimal: Vec<LexPoly> = Vec::new();
    for (i, p) in g.iter().enumerate() {
        let redundant = g.iter().enumerate().any(|(j, q)| {
            j != i && divides(q.lm(), p.lm()) && (q.lm() != p.lm() || j < i)
        });
        if !redundant {
            minimal.push(p.clone());
        }
    }
    let mut out: Vec<LexPoly> = (0..minimal.len())
        .map(|i| {
            let others: Vec<LexPoly> =
                minimal.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, q)| q.clone()).collect();
            minimal[i].reduce(&others).monic()
        })
        .collect();
    out.sort_by(|a, b| b.lm().cmp(a.lm()));
    out
}

/// Whether `p` lies in the ideal, decided by a zero normal form.
pub fn ideal_membership(p: &Polynomial<Rational>, gb: &GroebnerBasis) -> Result<bool, ElimError> {
    Ok(gb.reduce(p)?.is_zero())
}

/// Members of `gb` free of `drop_var`; a basis of the first elimination ideal.
///
/// Requires `drop_var` to be the highest variable of the lex order.
pub fn elimination_ideal(gb: &GroebnerBasis, drop_var: usize) -> Result<Vec<Polynomial<Rational>>, ElimError> {
    if gb.order.first() != Some(&drop_var) {
        return Err(ElimError::Input(format!(
            "variable {drop_var} must be the highest in the lex order {:?}",
            gb.order
        )));
    }
    Ok(gb.basis.iter().filter(|p| !p.depends_on(drop_var)).cloned().collect())
}
