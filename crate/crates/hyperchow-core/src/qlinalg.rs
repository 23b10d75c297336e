//! Small dense linear algebra over ℚ.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Q = BigRational;

pub fn q(x: &BigInt) -> Q {
    Q::from_integer(x.clone())
}

pub fn qi(x: i64) -> Q {
    Q::from_integer(BigInt::from(x))
}

pub fn to_q(v: &[BigInt]) -> Vec<Q> {
    v.iter().map(q).collect()
}

/// Row echelon form in place; returns pivot columns.
fn echelon(rows: &mut Vec<Vec<Q>>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        let inv = Q::one() / &rows[r][c];
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                let pr = rows[r].clone();
                for (x, y) in rows[i].iter_mut().zip(pr.iter()) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    pivots
}

/// Rank of a list of vectors of common length n.
pub fn rank(vectors: &[Vec<Q>], n: usize) -> usize {
    let mut rows = vectors.to_vec();
    echelon(&mut rows, n).len()
}

pub fn rank_int(vectors: &[Vec<BigInt>], n: usize) -> usize {
    let rows: Vec<Vec<Q>> = vectors.iter().map(|v| to_q(v)).collect();
    rank(&rows, n)
}

/// Coefficients x with Σ x_j cols[j] = rhs, when the columns are independent
/// and rhs lies in their span.
pub fn solve_in_span(cols: &[Vec<Q>], rhs: &[Q]) -> Option<Vec<Q>> {
    let k = cols.len();
    let n = rhs.len();
    let mut rows: Vec<Vec<Q>> = (0..n)
        .map(|i| {
            let mut r: Vec<Q> = cols.iter().map(|c| c[i].clone()).collect();
            r.push(rhs[i].clone());
            r
        })
        .collect();
    let pivots = echelon(&mut rows, k + 1);
    if pivots.contains(&k) || pivots.len() < k {
        return None;
    }
    Some((0..k).map(|j| rows[j][k].clone()).collect())
}

/// Repeated solves against fixed independent columns: λ = A⁻¹·rhs on a set of pivot rows,
/// followed by a membership check on all rows.
#[derive(Clone, Debug)]
pub struct SpanSolver {
    cols: Vec<Vec<Q>>,
    rows: Vec<usize>,
    inv: Vec<Vec<Q>>,
}

impl SpanSolver {
    /// None when the columns are dependent.
    pub fn new(cols: Vec<Vec<Q>>, n: usize) -> Option<Self> {
        let k = cols.len();
        let mut t = cols.clone();
        let rows = echelon(&mut t, n);
        if rows.len() < k {
            return None;
        }
        // invert the k×k block on the pivot rows through [A | I]
        let mut aug: Vec<Vec<Q>> = rows
            .iter()
            .enumerate()
            .map(|(i, &r)| {
                let mut row: Vec<Q> = cols.iter().map(|c| c[r].clone()).collect();
                row.extend((0..k).map(|j| if i == j { Q::one() } else { Q::zero() }));
                row
            })
            .collect();
        echelon(&mut aug, k);
        let inv = aug.into_iter().map(|r| r[k..].to_vec()).collect();
        Some(SpanSolver { cols, rows, inv })
    }

    pub fn solve(&self, rhs: &[Q]) -> Option<Vec<Q>> {
        let lambda: Vec<Q> = self
            .inv
            .iter()
            .map(|r| r.iter().zip(&self.rows).fold(Q::zero(), |acc, (a, &i)| acc + a * &rhs[i]))
            .collect();
        let fits = (0..rhs.len()).all(|i| {
            let v = self.cols.iter().zip(&lambda).fold(Q::zero(), |acc, (c, l)| acc + &c[i] * l);
            v == rhs[i]
        });
        fits.then_some(lambda)
    }
}

/// Basis of {x : rows·x = 0}.
pub fn nullspace(rows: &[Vec<Q>], n: usize) -> Vec<Vec<Q>> {
    let mut r = rows.to_vec();
    let pivots = echelon(&mut r, n);
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![Q::zero(); n];
            x[f] = Q::one();
            for (i, &p) in pivots.iter().enumerate() {
                x[p] = -r[i][f].clone();
            }
            x
        })
        .collect()
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y)
}
