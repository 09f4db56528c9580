//! Certified sign-constancy of a polynomial along piecewise-linear paths.

use vardir_poly::Polynomial;

/// Maximum bisection depth of a probed segment.
pub const MAX_DEPTH: u32 = 20;

/// Upper bound for `|∇Q|` on the axis box spanned by `a` and `b`.
fn gradient_bound(q: &Polynomial<f64>, a: &[f64], b: &[f64]) -> f64 {
    let rho: Vec<f64> = a.iter().zip(b).map(|(x, y)| x.abs().max(y.abs())).collect();
    let n = rho.len();
    let mut g = vec![0.0f64; n];
    for t in q.terms() {
        for i in 0..n {
            let e = t.exps[i];
            if e == 0 {
                continue;
            }
            let mut m = t.coeff.abs() * e as f64;
            for k in 0..n {
                let p = if k == i { e - 1 } else { t.exps[k] };
                m *= rho[k].powi(p as i32);
            }
            g[i] += m;
        }
    }
    g.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Evaluations allowed per probed path before the pair is left undecided.
const EVAL_BUDGET: usize = 20_000;

struct Probe<'a> {
    factors: &'a [Polynomial<f64>],
    signs: Vec<f64>,
    tol: f64,
    evals: usize,
}

impl Probe<'_> {
    fn values(&mut self, x: &[f64]) -> Vec<f64> {
        self.evals += 1;
        self.factors.iter().map(|f| f.eval(x)).collect()
    }

    /// Certifies that every factor keeps its sign on `[a, b]` and that the
    /// product of their certified lower bounds stays at least `tol`.
    fn segment(&mut self, a: &[f64], b: &[f64], va: &[f64], vb: &[f64], depth: u32) -> bool {
        let prod_a: f64 = va.iter().product();
        let prod_b: f64 = vb.iter().product();
        if prod_a.abs() < self.tol || prod_b.abs() < self.tol {
            return false;
        }
        for k in 0..va.len() {
            if va[k] * self.signs[k] <= 0.0 || vb[k] * self.signs[k] <= 0.0 {
                return false;
            }
        }
        let len = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
        let mut lower = 1.0;
        for k in 0..va.len() {
            // on a segment where f is G-Lipschitz, min |f| ≥ (|f(a)| + |f(b)| − G·len) / 2
            let l = 0.5 * (va[k].abs() + vb[k].abs() - gradient_bound(&self.factors[k], a, b) * len);
            if l <= 0.0 {
                lower = 0.0;
                break;
            }
            lower *= l;
        }
        if lower >= self.tol {
            return true;
        }
        if depth >= MAX_DEPTH || self.evals >= EVAL_BUDGET {
            return false;
        }
        let m: Vec<f64> = a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect();
        let vm = self.values(&m);
        self.segment(a, &m, va, &vm, depth + 1) && self.segment(&m, b, &vm, vb, depth + 1)
    }

    fn path(&mut self, path: &[Vec<f64>]) -> bool {
        self.evals = 0;
        let vals: Vec<Vec<f64>> = path.iter().map(|x| self.values(x)).collect();
        (0..path.len() - 1).all(|i| self.segment(&path[i], &path[i + 1], &vals[i], &vals[i + 1], 0))
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for k in 0..=p.len() {
            let mut q = p.clone();
            q.insert(k, n - 1);
            out.push(q);
        }
    }
    out
}

/// Whether `a` and `b` are joined by a straight segment or an axis-aligned detour
/// along which `Q` keeps one sign and stays at least `tol` away from zero.
pub fn probe_connected(q: &Polynomial<f64>, a: &[f64], b: &[f64], tol: f64) -> bool {
    probe_connected_factored(std::slice::from_ref(q), a, b, tol)
}

/// [`probe_connected`] for `Q` given as a product of `factors`.
///
/// Bounds are certified factor by factor, which stays sharp where the expanded
/// product would need very fine subdivision.
pub fn probe_connected_factored(factors: &[Polynomial<f64>], a: &[f64], b: &[f64], tol: f64) -> bool {
    let va: Vec<f64> = factors.iter().map(|f| f.eval(a)).collect();
    let vb: Vec<f64> = factors.iter().map(|f| f.eval(b)).collect();
    if va.iter().zip(&vb).any(|(x, y)| x.signum() != y.signum() || *x == 0.0) {
        return false;
    }
    let mut probe = Probe { factors, signs: va.iter().map(|v| v.signum()).collect(), tol, evals: 0 };
    if probe.path(&[a.to_vec(), b.to_vec()]) {
        return true;
    }
    for order in permutations(a.len()) {
        let mut path = vec![a.to_vec()];
        let mut cur = a.to_vec();
        for &axis in &order {
            cur[axis] = b[axis];
            path.push(cur.clone());
        }
        if probe.path(&path) {
            return true;
        }
    }
    false
}

/// Union–find over `0..n`.
pub(crate) struct Dsu(Vec<usize>);

impl Dsu {
    pub fn new(n: usize) -> Self {
        Dsu((0..n).collect())
    }
    pub fn find(&mut self, i: usize) -> usize {
        let mut r = i;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut j = i;
        while self.0[j] != r {
            let next = self.0[j];
            self.0[j] = r;
            j = next;
        }
        r
    }
    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Groups `members` (indices into `points`) with a pairwise connectivity test.
///
/// Each point is tested against the nearest already-seen member of every current
/// group, nearest group first.
pub(crate) fn group_with<F>(points: &[Vec<f64>], members: &[usize], mut connected: F) -> Vec<Vec<usize>>
where
    F: FnMut(&[f64], &[f64]) -> bool,
{
    let mut dsu = Dsu::new(members.len());
    for i in 1..members.len() {
        let p = &points[members[i]];
        let mut best: Vec<(usize, f64, usize)> = Vec::new();
        for j in 0..i {
            let r = dsu.find(j);
            let d: f64 = p.iter().zip(&points[members[j]]).map(|(x, y)| (x - y).powi(2)).sum();
            match best.iter_mut().find(|t| t.0 == r) {
                Some(t) if d < t.1 => {
                    t.1 = d;
                    t.2 = j;
                }
                Some(_) => {}
                None => best.push((r, d, j)),
            }
        }
        best.sort_by(|x, y| x.1.total_cmp(&y.1));
        for (_, _, j) in best {
            if dsu.find(i) == dsu.find(j) {
                continue;
            }
            if connected(p, &points[members[j]]) {
                dsu.union(i, j);
            }
        }
    }
    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    for i in 0..members.len() {
        let r = dsu.find(i);
        match groups.iter_mut().find(|g| g.0 == r) {
            Some(g) => g.1.push(members[i]),
            None => groups.push((r, vec![members[i]])),
        }
    }
    groups.into_iter().map(|g| g.1).collect()
}

/// [`group_with`] using [`probe_connected_factored`].
pub(crate) fn probe_groups(factors: &[Polynomial<f64>], points: &[Vec<f64>], members: &[usize], tol: f64) -> Vec<Vec<usize>> {
    group_with(points, members, |a, b| probe_connected_factored(factors, a, b, tol))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xy() -> Polynomial<f64> {
        Polynomial::from_terms(2, vec![(1.0, vec![1, 1])]).unwrap()
    }

    #[test]
    fn same_quadrant_connects() {
        assert!(probe_connected(&xy(), &[1.0, 1.0], &[2.0, 3.0], 1e-9));
    }

    #[test]
    fn opposite_quadrants_do_not() {
        assert!(!probe_connected(&xy(), &[1.0, 1.0], &[-1.0, -1.0], 1e-9));
    }

    #[test]
    fn annulus_needs_a_detour() {
        // Q = x² + y² − 1/4 is positive outside the small disk; the chord through
        // the disk fails but an axis-aligned detour succeeds.
        let q = Polynomial::from_terms(2, vec![(1.0, vec![2, 0]), (1.0, vec![0, 2]), (-0.25, vec![0, 0])]).unwrap();
        let f = [q.clone()];
        let mut p = Probe { factors: &f, signs: vec![1.0], tol: 1e-9, evals: 0 };
        assert!(!p.path(&[vec![-0.6, 0.1], vec![0.1, 0.6]]));
        assert!(probe_connected(&q, &[-0.6, 0.1], &[0.1, 0.6], 1e-9));
    }

    #[test]
    fn factored_probe_matches_product() {
        // (x − 1/2)(y − 1/2) split into its factors
        let fx = Polynomial::from_terms(2, vec![(1.0, vec![1, 0]), (-0.5, vec![0, 0])]).unwrap();
        let fy = Polynomial::from_terms(2, vec![(1.0, vec![0, 1]), (-0.5, vec![0, 0])]).unwrap();
        let q = &fx * &fy;
        let f = [fx, fy];
        for (a, b) in [([0.0, 0.0], [0.4, 0.3]), ([0.0, 0.0], [0.9, 0.1]), ([0.9, 0.9], [0.6, 0.8])] {
            assert_eq!(probe_connected(&q, &a, &b, 1e-9), probe_connected_factored(&f, &a, &b, 1e-9));
        }
    }

    #[test]
    fn permutation_count() {
        assert_eq!(permutations(3).len(), 6);
    }
}
