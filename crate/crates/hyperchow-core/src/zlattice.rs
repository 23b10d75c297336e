//! Exact integer linear algebra: Smith and Hermite normal forms, finitely
//! generated abelian groups, cokernels and the Gale dual.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("cokernel of beta is infinite")]
    InfiniteCokernel,
    #[error("b{} is a torsion element", .0 + 1)]
    TorsionGenerator(usize),
    #[error("value is not in the image of the map")]
    NotInImage,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("torsion factors must be at least 2 and form a divisibility chain")]
    BadTorsion,
    #[error("map is not well defined on torsion generator {0}")]
    IllDefined(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>, cols: usize) -> Result<Self, LatticeError> {
        let nrows = rows.len();
        let mut data = Vec::with_capacity(nrows * cols);
        for (i, r) in rows.into_iter().enumerate() {
            if r.len() != cols {
                return Err(LatticeError::Shape(format!("row {} has length {}, expected {}", i, r.len(), cols)));
            }
            data.extend(r);
        }
        Ok(IntMatrix { rows: nrows, cols, data })
    }

    /// Row-major construction from machine integers.
    pub fn from_i64(rows: usize, cols: usize, entries: &[i64]) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count does not match shape");
        IntMatrix { rows, cols, data: entries.iter().map(|&x| BigInt::from(x)).collect() }
    }

    pub fn from_columns(rows: usize, columns: &[Vec<BigInt>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "column length does not match row count");
            for (i, x) in c.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        self.data[r * self.cols + c] = v;
    }

    fn at_mut(&mut self, r: usize, c: usize) -> &mut BigInt {
        &mut self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> Vec<BigInt> {
        self.data[r * self.cols..(r + 1) * self.cols].to_vec()
    }

    pub fn column(&self, c: usize) -> Vec<BigInt> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<BigInt>> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|r| self.row(r)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        *out.at_mut(i, j) += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len(), "vector length differs from column count");
        (0..self.rows).map(|i| (0..self.cols).fold(BigInt::zero(), |acc, j| acc + self.get(i, j) * &v[j])).collect()
    }

    pub fn select_columns(&self, idx: &[usize]) -> IntMatrix {
        let cols: Vec<Vec<BigInt>> = idx.iter().map(|&j| self.column(j)).collect();
        IntMatrix::from_columns(self.rows, &cols)
    }

    pub fn select_rows(&self, idx: &[usize]) -> IntMatrix {
        let rows = idx.iter().map(|&i| self.row(i)).collect();
        IntMatrix::from_rows(rows, self.cols).expect("rows have matching length")
    }

    pub fn hstack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.rows, other.rows, "row counts differ");
        let mut out = Self::zeros(self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(r, c, self.get(r, c).clone());
            }
            for c in 0..other.cols {
                out.set(r, self.cols + c, other.get(r, c).clone());
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|r| (0..self.cols).all(|c| r == c || self.get(r, c).is_zero()))
    }

    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i).clone()).collect()
    }

    /// Fraction-free Bareiss elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.to_rows();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(k, i);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                    a[i][j] = v;
                }
            }
            prev = a[k][k].clone();
        }
        sign * &a[n - 1][n - 1]
    }

    pub fn is_unimodular(&self) -> bool {
        self.rows == self.cols && self.determinant().abs().is_one()
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

/// U·M·V = D with U, V unimodular and their inverses tracked alongside.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    pub v_inv: IntMatrix,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.d.diagonal().iter().filter(|x| !x.is_zero()).count()
    }

    pub fn invariants(&self) -> Vec<BigInt> {
        self.d.diagonal().into_iter().filter(|x| !x.is_zero()).collect()
    }
}

struct SmithWork {
    a: IntMatrix,
    u: IntMatrix,
    u_inv: IntMatrix,
    v: IntMatrix,
    v_inv: IntMatrix,
}

impl SmithWork {
    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for m in [&mut self.a, &mut self.u] {
            for c in 0..m.cols {
                m.data.swap(i * m.cols + c, j * m.cols + c);
            }
        }
        let m = &mut self.u_inv;
        for r in 0..m.rows {
            m.data.swap(r * m.cols + i, r * m.cols + j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for m in [&mut self.a, &mut self.v] {
            for r in 0..m.rows {
                m.data.swap(r * m.cols + i, r * m.cols + j);
            }
        }
        let m = &mut self.v_inv;
        for c in 0..m.cols {
            m.data.swap(i * m.cols + c, j * m.cols + c);
        }
    }

    // row dst += k * row src
    fn add_row(&mut self, dst: usize, src: usize, k: &BigInt) {
        for m in [&mut self.a, &mut self.u] {
            for c in 0..m.cols {
                let s = m.get(src, c) * k;
                *m.at_mut(dst, c) += s;
            }
        }
        let m = &mut self.u_inv;
        for r in 0..m.rows {
            let s = m.get(r, dst) * k;
            *m.at_mut(r, src) -= s;
        }
    }

    // col dst += k * col src
    fn add_col(&mut self, dst: usize, src: usize, k: &BigInt) {
        for m in [&mut self.a, &mut self.v] {
            for r in 0..m.rows {
                let s = m.get(r, src) * k;
                *m.at_mut(r, dst) += s;
            }
        }
        let m = &mut self.v_inv;
        for c in 0..m.cols {
            let s = m.get(dst, c) * k;
            *m.at_mut(src, c) -= s;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for m in [&mut self.a, &mut self.u] {
            for c in 0..m.cols {
                let x = -m.get(i, c);
                m.set(i, c, x);
            }
        }
        let m = &mut self.u_inv;
        for r in 0..m.rows {
            let x = -m.get(r, i);
            m.set(r, i, x);
        }
    }
}

/// Smith normal form by minimal-absolute-value pivoting.
pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    let (rows, cols) = (m.rows, m.cols);
    let mut w = SmithWork {
        a: m.clone(),
        u: IntMatrix::identity(rows),
        u_inv: IntMatrix::identity(rows),
        v: IntMatrix::identity(cols),
        v_inv: IntMatrix::identity(cols),
    };
    let mut t = 0;
    while t < rows.min(cols) {
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                let x = w.a.get(i, j);
                if !x.is_zero() && best.map_or(true, |(bi, bj)| x.abs() < w.a.get(bi, bj).abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        w.swap_rows(t, pi);
        w.swap_cols(t, pj);
        loop {
            let p = w.a.get(t, t).clone();
            for i in t + 1..rows {
                let q = w.a.get(i, t) / &p;
                if !q.is_zero() {
                    w.add_row(i, t, &-q);
                }
            }
            for j in t + 1..cols {
                let q = w.a.get(t, j) / &p;
                if !q.is_zero() {
                    w.add_col(j, t, &-q);
                }
            }
            let mut smaller: Option<(bool, usize, BigInt)> = None;
            for i in t + 1..rows {
                let x = w.a.get(i, t).abs();
                if !x.is_zero() && smaller.as_ref().map_or(true, |s| x < s.2) {
                    smaller = Some((true, i, x));
                }
            }
            for j in t + 1..cols {
                let x = w.a.get(t, j).abs();
                if !x.is_zero() && smaller.as_ref().map_or(true, |s| x < s.2) {
                    smaller = Some((false, j, x));
                }
            }
            match smaller {
                Some((true, i, _)) => {
                    w.swap_rows(t, i);
                    continue;
                }
                Some((false, j, _)) => {
                    w.swap_cols(t, j);
                    continue;
                }
                None => {}
            }
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !(w.a.get(i, j) % &p).is_zero()));
            match bad {
                Some(i) => w.add_row(t, i, &BigInt::one()),
                None => break,
            }
        }
        if w.a.get(t, t).is_negative() {
            w.negate_row(t);
        }
        t += 1;
    }
    SmithForm { u: w.u, u_inv: w.u_inv, d: w.a, v: w.v, v_inv: w.v_inv }
}

/// Row-style Hermite normal form of the lattice spanned by `gens` in ℤ^n:
/// echelon rows, positive pivots, entries above a pivot reduced into [0, pivot).
pub fn hermite_rows(gens: &[Vec<BigInt>], n: usize) -> Vec<Vec<BigInt>> {
    let mut rows: Vec<Vec<BigInt>> = gens.iter().filter(|g| g.iter().any(|x| !x.is_zero())).cloned().collect();
    let mut done = 0;
    for col in 0..n {
        let mut found = false;
        loop {
            let pick = (done..rows.len())
                .filter(|&i| !rows[i][col].is_zero())
                .min_by(|&a, &b| rows[a][col].abs().cmp(&rows[b][col].abs()));
            let Some(k) = pick else { break };
            found = true;
            rows.swap(done, k);
            let mut clean = true;
            for i in done + 1..rows.len() {
                let q = rows[i][col].div_floor(&rows[done][col]);
                if !q.is_zero() {
                    let pivot_row = rows[done].clone();
                    axpy(&mut rows[i], &-q, &pivot_row);
                }
                if !rows[i][col].is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if !found {
            continue;
        }
        if rows[done][col].is_negative() {
            for x in rows[done].iter_mut() {
                *x = -&*x;
            }
        }
        let pivot_row = rows[done].clone();
        for i in 0..done {
            let q = rows[i][col].div_floor(&pivot_row[col]);
            if !q.is_zero() {
                axpy(&mut rows[i], &-q, &pivot_row);
            }
        }
        done += 1;
    }
    rows.truncate(done);
    rows
}

/// Index of the first nonzero entry.
pub fn pivot_of(row: &[BigInt]) -> Option<usize> {
    row.iter().position(|x| !x.is_zero())
}

fn axpy(y: &mut [BigInt], k: &BigInt, x: &[BigInt]) {
    for (a, b) in y.iter_mut().zip(x) {
        *a += k * b;
    }
}

/// Reduces `x` modulo the lattice with Hermite basis `h` so that every pivot
/// entry lies in [0, pivot).
pub fn reduce_mod_hermite(x: &mut [BigInt], h: &[Vec<BigInt>]) {
    for row in h {
        let p = pivot_of(row).expect("Hermite rows are nonzero");
        let q = x[p].div_floor(&row[p]);
        if !q.is_zero() {
            axpy(x, &-q, row);
        }
    }
}

/// Hermite basis of the integer kernel {x : a·x = 0}.
pub fn kernel_basis(a: &IntMatrix) -> Vec<Vec<BigInt>> {
    let s = smith_normal_form(a);
    let r = s.rank();
    let gens: Vec<Vec<BigInt>> = (r..a.cols).map(|j| s.v.column(j)).collect();
    hermite_rows(&gens, a.cols)
}

/// Some integer solution of a·x = b, if one exists.
pub fn solve_integer(a: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(a.rows, b.len(), "right-hand side length differs from row count");
    let s = smith_normal_form(a);
    let ub = s.u.mul_vec(b);
    let mut y = vec![BigInt::zero(); a.cols];
    for (i, val) in ub.iter().enumerate() {
        let d = if i < a.rows.min(a.cols) { s.d.get(i, i).clone() } else { BigInt::zero() };
        if d.is_zero() {
            if !val.is_zero() {
                return None;
            }
        } else {
            let (q, r) = val.div_rem(&d);
            if !r.is_zero() {
                return None;
            }
            y[i] = q;
        }
    }
    Some(s.v.mul_vec(&y))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FgAbGroup {
    rank: usize,
    torsion: Vec<BigInt>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    pub free: Vec<BigInt>,
    pub residues: Vec<BigInt>,
}

impl GroupElement {
    pub fn coords(&self) -> Vec<BigInt> {
        self.free.iter().chain(self.residues.iter()).cloned().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.free.iter().chain(self.residues.iter()).all(|x| x.is_zero())
    }

    pub fn is_torsion(&self) -> bool {
        self.free.iter().all(|x| x.is_zero())
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.free.iter().map(|x| x.to_string()).collect();
        parts.extend(self.residues.iter().map(|x| format!("{}~", x)));
        write!(f, "({})", parts.join(","))
    }
}

/// Free part of an element.
pub fn bar(x: &GroupElement) -> Vec<BigInt> {
    x.free.clone()
}

impl FgAbGroup {
    pub fn new(rank: usize, torsion: Vec<BigInt>) -> Result<Self, LatticeError> {
        let two = BigInt::from(2);
        for (i, n) in torsion.iter().enumerate() {
            if *n < two {
                return Err(LatticeError::BadTorsion);
            }
            if i > 0 && !(n % &torsion[i - 1]).is_zero() {
                return Err(LatticeError::BadTorsion);
            }
        }
        Ok(FgAbGroup { rank, torsion })
    }

    pub fn free(rank: usize) -> Self {
        FgAbGroup { rank, torsion: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn torsion(&self) -> &[BigInt] {
        &self.torsion
    }

    pub fn ngens(&self) -> usize {
        self.rank + self.torsion.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.rank == 0
    }

    pub fn torsion_order(&self) -> BigInt {
        self.torsion.iter().fold(BigInt::one(), |a, b| a * b)
    }

    pub fn order(&self) -> Option<BigInt> {
        if self.rank == 0 {
            Some(self.torsion_order())
        } else {
            None
        }
    }

    /// Same torsion, `extra` more free coordinates appended after the existing ones.
    pub fn with_extra_free(&self, extra: usize) -> Self {
        FgAbGroup { rank: self.rank + extra, torsion: self.torsion.clone() }
    }

    pub fn element(&self, coords: &[BigInt]) -> Result<GroupElement, LatticeError> {
        if coords.len() != self.ngens() {
            return Err(LatticeError::Shape(format!("expected {} coordinates, got {}", self.ngens(), coords.len())));
        }
        let mut e = GroupElement { free: coords[..self.rank].to_vec(), residues: coords[self.rank..].to_vec() };
        self.normalize(&mut e);
        Ok(e)
    }

    pub fn element_i64(&self, coords: &[i64]) -> GroupElement {
        let v: Vec<BigInt> = coords.iter().map(|&x| BigInt::from(x)).collect();
        self.element(&v).expect("coordinate count matches group")
    }

    pub fn normalize(&self, x: &mut GroupElement) {
        for (r, n) in x.residues.iter_mut().zip(&self.torsion) {
            *r = r.mod_floor(n);
        }
    }

    pub fn contains(&self, x: &GroupElement) -> bool {
        x.free.len() == self.rank
            && x.residues.len() == self.torsion.len()
            && x.residues.iter().zip(&self.torsion).all(|(r, n)| !r.is_negative() && r < n)
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement { free: vec![BigInt::zero(); self.rank], residues: vec![BigInt::zero(); self.torsion.len()] }
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        let mut e = GroupElement {
            free: a.free.iter().zip(&b.free).map(|(x, y)| x + y).collect(),
            residues: a.residues.iter().zip(&b.residues).map(|(x, y)| x + y).collect(),
        };
        self.normalize(&mut e);
        e
    }

    pub fn neg(&self, a: &GroupElement) -> GroupElement {
        self.scale(a, &BigInt::from(-1))
    }

    pub fn sub(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        self.add(a, &self.neg(b))
    }

    pub fn scale(&self, a: &GroupElement, k: &BigInt) -> GroupElement {
        let mut e = GroupElement {
            free: a.free.iter().map(|x| x * k).collect(),
            residues: a.residues.iter().map(|x| x * k).collect(),
        };
        self.normalize(&mut e);
        e
    }

    /// Every element of the torsion subgroup, in lexicographic order.
    pub fn torsion_elements(&self) -> Vec<GroupElement> {
        let mut out = vec![self.zero()];
        for (j, n) in self.torsion.iter().enumerate() {
            let mut next = Vec::new();
            for e in &out {
                let mut k = BigInt::zero();
                while &k < n {
                    let mut f = e.clone();
                    f.residues[j] = k.clone();
                    next.push(f);
                    k += 1;
                }
            }
            out = next;
        }
        out.sort();
        out
    }

    /// Order of x, or None if x has infinite order.
    pub fn element_order(&self, x: &GroupElement) -> Option<BigInt> {
        if !x.is_torsion() {
            return None;
        }
        let mut ord = BigInt::one();
        for (r, n) in x.residues.iter().zip(&self.torsion) {
            let o = n / n.gcd(r);
            ord = ord.lcm(&o);
        }
        Some(ord)
    }
}

impl fmt::Display for FgAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{}", r)),
        }
        parts.extend(self.torsion.iter().map(|n| format!("Z/{}", n)));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupHom {
    source: FgAbGroup,
    target: FgAbGroup,
    matrix: IntMatrix,
}

impl GroupHom {
    pub fn new(source: FgAbGroup, target: FgAbGroup, matrix: IntMatrix) -> Result<Self, LatticeError> {
        if matrix.rows() != target.ngens() || matrix.cols() != source.ngens() {
            return Err(LatticeError::Shape(format!(
                "matrix is {}x{}, maps need {}x{}",
                matrix.rows(),
                matrix.cols(),
                target.ngens(),
                source.ngens()
            )));
        }
        let mut matrix = matrix;
        for (j, n) in target.torsion.iter().enumerate() {
            let r = target.rank + j;
            for c in 0..matrix.cols() {
                let x = matrix.get(r, c).mod_floor(n);
                matrix.set(r, c, x);
            }
        }
        for (j, n) in source.torsion.iter().enumerate() {
            let c = source.rank + j;
            let col = target.element(&matrix.column(c))?;
            if !target.scale(&col, n).is_zero() {
                return Err(LatticeError::IllDefined(j));
            }
        }
        Ok(GroupHom { source, target, matrix })
    }

    pub fn source(&self) -> &FgAbGroup {
        &self.source
    }

    pub fn target(&self) -> &FgAbGroup {
        &self.target
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn apply(&self, x: &GroupElement) -> GroupElement {
        let y = self.matrix.mul_vec(&x.coords());
        self.target.element(&y).expect("matrix rows match target")
    }

    pub fn apply_coords(&self, x: &[BigInt]) -> GroupElement {
        let y = self.matrix.mul_vec(x);
        self.target.element(&y).expect("matrix rows match target")
    }

    pub fn column_image(&self, j: usize) -> GroupElement {
        self.target.element(&self.matrix.column(j)).expect("matrix rows match target")
    }

    pub fn compose(&self, first: &GroupHom) -> Result<GroupHom, LatticeError> {
        if first.target != self.source {
            return Err(LatticeError::Shape("composition of incompatible maps".into()));
        }
        GroupHom::new(first.source.clone(), self.target.clone(), self.matrix.mul(&first.matrix))
    }

    /// Matrix [F | Q] whose columns generate the preimage of the image in target coordinates.
    fn relation_matrix(&self) -> IntMatrix {
        let t = &self.target;
        let mut q = IntMatrix::zeros(t.ngens(), t.torsion.len());
        for (j, n) in t.torsion.iter().enumerate() {
            q.set(t.rank + j, j, n.clone());
        }
        self.matrix.hstack(&q)
    }
}

#[derive(Clone, Debug)]
pub struct Cokernel {
    pub group: FgAbGroup,
    pub projection: GroupHom,
    /// Columns are target-coordinate lifts of the canonical generators of the cokernel.
    pub section: IntMatrix,
}

pub fn cokernel(f: &GroupHom) -> Cokernel {
    let rel = f.relation_matrix();
    let n = rel.rows();
    let s = smith_normal_form(&rel);
    let k = n.min(rel.cols());
    let delta: Vec<BigInt> = (0..n).map(|i| if i < k { s.d.get(i, i).clone() } else { BigInt::zero() }).collect();
    let free_idx: Vec<usize> = (0..n).filter(|&i| delta[i].is_zero()).collect();
    let tors_idx: Vec<usize> = (0..n).filter(|&i| delta[i] > BigInt::one()).collect();
    let group = FgAbGroup { rank: free_idx.len(), torsion: tors_idx.iter().map(|&i| delta[i].clone()).collect() };
    let order: Vec<usize> = free_idx.iter().chain(tors_idx.iter()).copied().collect();
    let p = s.u.select_rows(&order);
    let section = s.u_inv.select_columns(&order);
    let projection = GroupHom::new(f.target.clone(), group.clone(), p).expect("projection kills the image");
    Cokernel { group, projection, section }
}

#[derive(Clone, Debug)]
pub struct GaleDual {
    pub dg: FgAbGroup,
    pub beta_dual: GroupHom,
    /// Projection (ℤ^{m+r})* → DG(β) of which beta_dual is the restriction.
    pub projection: GroupHom,
    pub section: IntMatrix,
}

/// Gale dual via a free presentation of N and the Smith normal form of [B Q]*.
pub fn gale_dual(beta: &GroupHom) -> Result<GaleDual, LatticeError> {
    if !beta.source.torsion.is_empty() {
        return Err(LatticeError::Shape("beta must have a free source".into()));
    }
    let n = &beta.target;
    let m = beta.source.rank;
    for i in 0..m {
        if (0..n.rank).all(|r| beta.matrix.get(r, i).is_zero()) {
            return Err(LatticeError::TorsionGenerator(i));
        }
    }
    let free_rows: Vec<usize> = (0..n.rank).collect();
    let bbar = beta.matrix.select_rows(&free_rows);
    if smith_normal_form(&bbar).rank() < n.rank {
        return Err(LatticeError::InfiniteCokernel);
    }
    let bq = beta.relation_matrix();
    let bq_t = bq.transpose();
    let dual_map = GroupHom::new(FgAbGroup::free(bq.rows()), FgAbGroup::free(bq.cols()), bq_t)?;
    let coker = cokernel(&dual_map);
    let first: Vec<usize> = (0..m).collect();
    let bd = coker.projection.matrix.select_columns(&first);
    let beta_dual = GroupHom::new(FgAbGroup::free(m), coker.group.clone(), bd)?;
    Ok(GaleDual { dg: coker.group, beta_dual, projection: coker.projection, section: coker.section })
}

/// Hom(−, ℤ) of f, as a map between the free duals.
pub fn dual_map(f: &GroupHom) -> GroupHom {
    let rows: Vec<usize> = (0..f.target.rank).collect();
    let cols: Vec<usize> = (0..f.source.rank).collect();
    let block = f.matrix.select_rows(&rows).select_columns(&cols);
    GroupHom::new(FgAbGroup::free(f.target.rank), FgAbGroup::free(f.source.rank), block.transpose())
        .expect("free groups")
}

/// The integral ψ with f(ψ) = sign·target, reduced modulo the Hermite basis of ker f.
pub fn solve_lift(f: &GroupHom, target: &GroupElement, sign: i32) -> Result<Vec<BigInt>, LatticeError> {
    if !f.source.torsion.is_empty() {
        return Err(LatticeError::Shape("solve_lift needs a free source".into()));
    }
    if !f.target.contains(target) {
        return Err(LatticeError::Shape("value does not belong to the target group".into()));
    }
    let m = f.source.rank;
    let t = if sign < 0 { f.target.neg(target) } else { target.clone() };
    let rel = f.relation_matrix();
    let sol = solve_integer(&rel, &t.coords()).ok_or(LatticeError::NotInImage)?;
    let mut x = sol[..m].to_vec();
    let kernel: Vec<Vec<BigInt>> = kernel_basis(&rel).into_iter().map(|k| k[..m].to_vec()).collect();
    let h = hermite_rows(&kernel, m);
    reduce_mod_hermite(&mut x, &h);
    Ok(x)
}

/// Whether x lies in the image of f.
pub fn in_image(f: &GroupHom, x: &GroupElement) -> bool {
    solve_integer(&f.relation_matrix(), &x.coords()).is_some()
}

pub fn to_bigints(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: usize, cols: usize, e: &[i64]) -> IntMatrix {
        IntMatrix::from_i64(rows, cols, e)
    }

    fn check_smith(a: &IntMatrix) -> SmithForm {
        let s = smith_normal_form(a);
        assert_eq!(s.u.mul(a).mul(&s.v), s.d);
        assert!(s.d.is_diagonal());
        assert!(s.u.is_unimodular() && s.v.is_unimodular());
        assert_eq!(s.u.mul(&s.u_inv), IntMatrix::identity(a.rows()));
        assert_eq!(s.v.mul(&s.v_inv), IntMatrix::identity(a.cols()));
        let inv = s.invariants();
        for w in inv.windows(2) {
            assert!((&w[1] % &w[0]).is_zero());
        }
        s
    }

    #[test]
    fn smith_examples() {
        let s = check_smith(&m(2, 3, &[1, 0, -1, 0, 1, -2]));
        assert_eq!(s.d, m(2, 3, &[1, 0, 0, 0, 1, 0]));
        let s = check_smith(&m(1, 1, &[2]));
        assert_eq!(s.d, m(1, 1, &[2]));
        assert_eq!(s.u, m(1, 1, &[1]));
        assert_eq!(s.v, m(1, 1, &[1]));
        let s = check_smith(&m(1, 2, &[1, -2]));
        assert_eq!(s.d, m(1, 2, &[1, 0]));
        let s = check_smith(&m(2, 2, &[2, 0, 0, 3]));
        assert_eq!(s.d, m(2, 2, &[1, 0, 0, 6]));
        check_smith(&m(0, 3, &[]));
        check_smith(&m(3, 0, &[]));
    }

    #[test]
    fn hermite_is_canonical() {
        let a = hermite_rows(&[to_bigints(&[2, 4]), to_bigints(&[1, 3])], 2);
        let b = hermite_rows(&[to_bigints(&[1, 1]), to_bigints(&[0, 2])], 2);
        assert_eq!(a, b);
        assert_eq!(a, vec![to_bigints(&[1, 1]), to_bigints(&[0, 2])]);
    }

    #[test]
    fn cokernel_examples() {
        let z = FgAbGroup::free(1);
        let f = GroupHom::new(FgAbGroup::free(2), z.clone(), m(1, 2, &[1, -2])).unwrap();
        assert!(cokernel(&f).group.is_trivial());
        let f = GroupHom::new(z.clone(), z, m(1, 1, &[2])).unwrap();
        let c = cokernel(&f);
        assert_eq!(c.group, FgAbGroup::new(0, to_bigints(&[2])).unwrap());
        assert!(c
            .projection
            .matrix()
            .mul(f.matrix())
            .column(0)
            .iter()
            .all(|x: &BigInt| (x % BigInt::from(2)).is_zero()));
        let n = FgAbGroup::new(1, to_bigints(&[2])).unwrap();
        let beta = GroupHom::new(FgAbGroup::free(3), n, m(2, 3, &[1, -1, 1, 0, 1, 0])).unwrap();
        assert!(cokernel(&beta).group.is_trivial());
    }

    #[test]
    fn gale_dual_p12() {
        let beta = GroupHom::new(FgAbGroup::free(2), FgAbGroup::free(1), m(1, 2, &[1, -2])).unwrap();
        let g = gale_dual(&beta).unwrap();
        assert_eq!(g.dg, FgAbGroup::free(1));
        let row = g.beta_dual.matrix().row(0);
        assert!(row == to_bigints(&[2, 1]) || row == to_bigints(&[-2, -1]));
    }

    #[test]
    fn gale_dual_errors() {
        let n = FgAbGroup::new(1, to_bigints(&[2])).unwrap();
        let beta = GroupHom::new(FgAbGroup::free(2), n, m(2, 2, &[1, 0, 0, 1])).unwrap();
        assert_eq!(gale_dual(&beta).unwrap_err(), LatticeError::TorsionGenerator(1));
        let beta = GroupHom::new(FgAbGroup::free(2), FgAbGroup::free(2), m(2, 2, &[1, 2, 0, 0])).unwrap();
        assert_eq!(gale_dual(&beta).unwrap_err(), LatticeError::InfiniteCokernel);
    }

    #[test]
    fn lift_examples() {
        let bd = GroupHom::new(FgAbGroup::free(2), FgAbGroup::free(1), m(1, 2, &[2, 1])).unwrap();
        let t = FgAbGroup::free(1).element_i64(&[1]);
        assert_eq!(solve_lift(&bd, &t, 1).unwrap(), to_bigints(&[0, 1]));
        assert_eq!(solve_lift(&bd, &FgAbGroup::free(1).zero(), 1).unwrap(), to_bigints(&[0, 0]));
        let f = GroupHom::new(FgAbGroup::free(1), FgAbGroup::free(1), m(1, 1, &[2])).unwrap();
        assert_eq!(solve_lift(&f, &t, 1).unwrap_err(), LatticeError::NotInImage);
    }

    #[test]
    fn ill_defined_hom_rejected() {
        let z2 = FgAbGroup::new(0, to_bigints(&[2])).unwrap();
        assert!(GroupHom::new(z2, FgAbGroup::free(1), m(1, 1, &[1])).is_err());
    }

    #[test]
    fn group_arithmetic() {
        let n = FgAbGroup::new(1, to_bigints(&[2])).unwrap();
        let a = n.element_i64(&[1, 1]);
        assert_eq!(n.add(&a, &a), n.element_i64(&[2, 0]));
        assert_eq!(bar(&a), to_bigints(&[1]));
        assert_eq!(bar(&n.element_i64(&[0, 1])), to_bigints(&[0]));
        assert_eq!(n.torsion_elements().len(), 2);
        assert_eq!(n.to_string(), "Z + Z/2");
    }
}
