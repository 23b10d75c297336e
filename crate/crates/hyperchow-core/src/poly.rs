//! Sparse multivariate polynomials over ℚ and Buchberger's algorithm
//! under degree-reverse-lexicographic order (x₁ > x₂ > …).

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashSet, VecDeque};

use num_traits::{One, Zero};

use crate::qlinalg::Q;

pub type Exps = Vec<u32>;

/// Exponent vector ordered by degrevlex.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mono(pub Exps);

pub fn total_degree(e: &[u32]) -> u32 {
    e.iter().sum()
}

/// Degree-reverse-lexicographic comparison of exponent vectors.
pub fn degrevlex(a: &[u32], b: &[u32]) -> Ordering {
    match total_degree(a).cmp(&total_degree(b)) {
        Ordering::Equal => {}
        o => return o,
    }
    for i in (0..a.len()).rev() {
        if a[i] != b[i] {
            return b[i].cmp(&a[i]);
        }
    }
    Ordering::Equal
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        degrevlex(&self.0, &other.0)
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn lcm(a: &[u32], b: &[u32]) -> Exps {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

fn quotient(b: &[u32], a: &[u32]) -> Exps {
    a.iter().zip(b).map(|(x, y)| y - x).collect()
}

fn add_exps(a: &[u32], b: &[u32]) -> Exps {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    n: usize,
    terms: BTreeMap<Mono, Q>,
}

impl Poly {
    pub fn zero(n: usize) -> Self {
        Poly { n, terms: BTreeMap::new() }
    }

    pub fn monomial(n: usize, exps: Exps, c: Q) -> Self {
        assert_eq!(exps.len(), n, "exponent length differs from variable count");
        let mut p = Poly::zero(n);
        if !c.is_zero() {
            p.terms.insert(Mono(exps), c);
        }
        p
    }

    pub fn constant(n: usize, c: Q) -> Self {
        Poly::monomial(n, vec![0; n], c)
    }

    pub fn var(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Poly::monomial(n, e, Q::one())
    }

    /// Σ cᵢ xᵢ.
    pub fn linear(coeffs: &[Q]) -> Self {
        let n = coeffs.len();
        let mut p = Poly::zero(n);
        for (i, c) in coeffs.iter().enumerate() {
            p.add_term(&unit(n, i), c.clone());
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Exps, &Q)> {
        self.terms.iter().map(|(m, c)| (&m.0, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn leading(&self) -> Option<(&Exps, &Q)> {
        self.terms.iter().next_back().map(|(m, c)| (&m.0, c))
    }

    pub fn add_term(&mut self, e: &[u32], c: Q) {
        if c.is_zero() {
            return;
        }
        let key = Mono(e.to_vec());
        let v = self.terms.entry(key.clone()).or_insert_with(Q::zero);
        *v += c;
        if v.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut p = self.clone();
        for (e, c) in other.terms() {
            p.add_term(e, c.clone());
        }
        p
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(&-Q::one()))
    }

    pub fn scale(&self, k: &Q) -> Poly {
        if k.is_zero() {
            return Poly::zero(self.n);
        }
        Poly { n: self.n, terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect() }
    }

    pub fn mul_term(&self, e: &[u32], k: &Q) -> Poly {
        if k.is_zero() {
            return Poly::zero(self.n);
        }
        Poly { n: self.n, terms: self.terms.iter().map(|(m, c)| (Mono(add_exps(&m.0, e)), c * k)).collect() }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut p = Poly::zero(self.n);
        for (e, c) in other.terms() {
            for (f, d) in self.terms() {
                p.add_term(&add_exps(e, f), c * d);
            }
        }
        p
    }

    pub fn make_monic(&self) -> Poly {
        match self.leading() {
            Some((_, c)) => self.scale(&(Q::one() / c)),
            None => self.clone(),
        }
    }

    /// Whether every term has the same weighted degree.
    pub fn is_homogeneous(&self, weights: &[u32]) -> bool {
        let degs: HashSet<u32> = self.terms().map(|(e, _)| weighted_degree(e, weights)).collect();
        degs.len() <= 1
    }

    pub fn format(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, (e, c)) in self.terms().rev().enumerate() {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &x)| x > 0)
                .map(|(i, &x)| if x == 1 { names[i].clone() } else { format!("{}^{}", names[i], x) })
                .collect();
            let neg = c < &Q::zero();
            let abs = if neg { -c.clone() } else { c.clone() };
            let body = match (mono.is_empty(), abs.is_one()) {
                (true, _) => abs.to_string(),
                (false, true) => mono.join("*"),
                (false, false) => format!("{}*{}", abs, mono.join("*")),
            };
            if k == 0 {
                out.push_str(if neg { "-" } else { "" });
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&body);
        }
        out
    }
}

pub fn unit(n: usize, i: usize) -> Exps {
    let mut e = vec![0; n];
    e[i] = 1;
    e
}

pub fn weighted_degree(e: &[u32], weights: &[u32]) -> u32 {
    e.iter().zip(weights).map(|(a, w)| a * w).sum()
}

/// Full reduction of f modulo g.
pub fn normal_form(f: &Poly, g: &[Poly]) -> Poly {
    let mut work = f.terms.clone();
    let mut rem = Poly::zero(f.n);
    while let Some((m, c)) = work.pop_last() {
        let reducer = g.iter().find(|h| h.leading().is_some_and(|(l, _)| divides(l, &m.0)));
        match reducer {
            Some(h) => {
                let (l, lc) = h.leading().expect("nonzero reducer");
                let q = quotient(&m.0, l);
                let k = &c / lc;
                for (e, d) in h.terms().rev().skip(1) {
                    let key = Mono(add_exps(e, &q));
                    let v = work.entry(key.clone()).or_insert_with(Q::zero);
                    *v -= &k * d;
                    if v.is_zero() {
                        work.remove(&key);
                    }
                }
            }
            None => {
                rem.terms.insert(m, c);
            }
        }
    }
    rem
}

fn s_poly(f: &Poly, g: &Poly) -> Poly {
    let (lf, cf) = f.leading().expect("nonzero");
    let (lg, cg) = g.leading().expect("nonzero");
    let l = lcm(lf, lg);
    f.mul_term(&quotient(&l, lf), &(Q::one() / cf)).sub(&g.mul_term(&quotient(&l, lg), &(Q::one() / cg)))
}

/// Reduced Gröbner basis, monic, sorted by leading monomial.
pub fn groebner_basis(gens: &[Poly]) -> Vec<Poly> {
    let mut g: Vec<Poly> = Vec::new();
    for p in gens {
        let r = normal_form(p, &g);
        if !r.is_zero() {
            g.push(r.make_monic());
        }
    }
    let lead = |p: &Poly| p.leading().expect("nonzero").0.clone();
    let mut leads: Vec<Exps> = g.iter().map(lead).collect();
    let mut pairs: Vec<(Mono, usize, usize)> = Vec::new();
    let mut pending: HashSet<(usize, usize)> = HashSet::new();
    for j in 0..g.len() {
        for i in 0..j {
            pairs.push((Mono(lcm(&leads[i], &leads[j])), i, j));
            pending.insert((i, j));
        }
    }
    while !pairs.is_empty() {
        // normal selection strategy: smallest lcm first
        let best = (0..pairs.len()).min_by(|&a, &b| pairs[a].0.cmp(&pairs[b].0)).expect("nonempty");
        let (l, i, j) = pairs.swap_remove(best);
        pending.remove(&(i, j));
        if leads[i].iter().zip(&leads[j]).all(|(a, b)| *a == 0 || *b == 0) {
            continue;
        }
        let chain = (0..g.len()).any(|k| {
            k != i
                && k != j
                && divides(&leads[k], &l.0)
                && !pending.contains(&(i.min(k), i.max(k)))
                && !pending.contains(&(j.min(k), j.max(k)))
        });
        if chain {
            continue;
        }
        let h = normal_form(&s_poly(&g[i], &g[j]), &g);
        if !h.is_zero() {
            let k = g.len();
            let h = h.make_monic();
            leads.push(lead(&h));
            g.push(h);
            for t in 0..k {
                pairs.push((Mono(lcm(&leads[t], &leads[k])), t, k));
                pending.insert((t, k));
            }
        }
    }
    reduce_basis(g)
}

fn reduce_basis(g: Vec<Poly>) -> Vec<Poly> {
    let mut keep: Vec<Poly> = Vec::new();
    for (k, p) in g.iter().enumerate() {
        let lp = p.leading().unwrap().0;
        let redundant = g.iter().enumerate().any(|(t, q)| {
            let lq = q.leading().unwrap().0;
            t != k && divides(lq, lp) && (lq != lp || t < k)
        });
        if !redundant {
            keep.push(p.clone());
        }
    }
    let mut out = Vec::with_capacity(keep.len());
    for k in 0..keep.len() {
        let others: Vec<Poly> = keep.iter().enumerate().filter(|(t, _)| *t != k).map(|(_, p)| p.clone()).collect();
        let (l, c) = keep[k].leading().unwrap();
        let lead = Poly::monomial(keep[k].n, l.clone(), c.clone());
        let tail = normal_form(&keep[k].sub(&lead), &others);
        out.push(lead.add(&tail).make_monic());
    }
    out.sort_by(|a, b| degrevlex(a.leading().unwrap().0, b.leading().unwrap().0));
    out
}

/// Monomials outside the initial ideal, ascending; None if there are more than `limit`.
pub fn standard_monomials(n: usize, leading: &[Exps], limit: usize) -> Option<Vec<Exps>> {
    let is_std = |e: &Exps| !leading.iter().any(|l| divides(l, e));
    let start = vec![0u32; n];
    if !is_std(&start) {
        return Some(Vec::new());
    }
    let mut seen: HashSet<Exps> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(start.clone());
    queue.push_back(start);
    let mut out = Vec::new();
    while let Some(e) = queue.pop_front() {
        out.push(e.clone());
        if out.len() > limit {
            return None;
        }
        for i in 0..n {
            let mut f = e.clone();
            f[i] += 1;
            if !seen.contains(&f) && is_std(&f) {
                seen.insert(f.clone());
                queue.push_back(f);
            }
        }
    }
    out.sort_by(|a, b| degrevlex(a, b));
    Some(out)
}

pub fn leading_monomials(g: &[Poly]) -> Vec<Exps> {
    g.iter().filter_map(|p| p.leading().map(|(e, _)| e.clone())).collect()
}
