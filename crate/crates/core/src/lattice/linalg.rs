//! Exact integer linear algebra: diagonal (Smith) form, column echelon form
//! with unimodular transform, ranks, determinants and integer solving.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// Dense integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged matrix");
            for (j, x) in row.iter().enumerate() {
                m[(i, j)] = x.clone().into();
            }
        }
        m
    }

    /// Matrix whose columns are the given vectors (all of length `rows`).
    pub fn from_columns(rows: usize, cols: &[Vec<BigInt>]) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows, "column length mismatch");
            for (i, x) in c.iter().enumerate() {
                m[(i, j)] = x.clone();
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

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).filter(|(a, _)| !a.is_zero()).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += f * row[src]
    fn add_row(&mut self, dst: usize, src: usize, f: &BigInt) {
        if f.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let s = &self.data[src * self.cols + j];
            if !s.is_zero() {
                let v = s * f;
                self.data[dst * self.cols + j] += v;
            }
        }
    }

    /// col[dst] += f * col[src]
    fn add_col(&mut self, dst: usize, src: usize, f: &BigInt) {
        if f.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let s = &self.data[i * self.cols + src];
            if !s.is_zero() {
                let v = s * f;
                self.data[i * self.cols + dst] += v;
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let x = &mut self.data[i * self.cols + j];
            *x = -std::mem::take(x);
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let x = &mut self.data[i * self.cols + j];
            *x = -std::mem::take(x);
        }
    }

    /// Replaces columns `a`, `b` by `(s·a + t·b, u·a + v·b)`.
    fn combine_cols(&mut self, a: usize, b: usize, s: &BigInt, t: &BigInt, u: &BigInt, v: &BigInt) {
        for i in 0..self.rows {
            let x = &self.data[i * self.cols + a];
            let y = &self.data[i * self.cols + b];
            if x.is_zero() && y.is_zero() {
                continue;
            }
            let na = s * x + t * y;
            let nb = u * x + v * y;
            self.data[i * self.cols + a] = na;
            self.data[i * self.cols + b] = nb;
        }
    }

    /// Dense row-major text block: one row per line, entries separated by spaces.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.rows, self.cols);
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> crate::Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| crate::Error::Parse("empty matrix block".into()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| crate::Error::Parse(format!("bad dimension {t:?}"))))
            .collect::<crate::Result<_>>()?;
        if dims.len() != 2 {
            return Err(crate::Error::Parse("matrix header must be `rows cols`".into()));
        }
        let mut m = IntMatrix::zeros(dims[0], dims[1]);
        for i in 0..dims[0] {
            let line = lines.next().ok_or_else(|| crate::Error::Parse(format!("missing row {}", i + 1)))?;
            let vals: Vec<&str> = line.split_whitespace().collect();
            if vals.len() != dims[1] {
                return Err(crate::Error::Parse(format!("row {} has {} entries, expected {}", i + 1, vals.len(), dims[1])));
            }
            for (j, t) in vals.iter().enumerate() {
                m[(i, j)] = t.parse().map_err(|_| crate::Error::Parse(format!("bad entry {t:?} at row {}", i + 1)))?;
            }
        }
        Ok(m)
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

/// Fraction-free Gaussian elimination; returns (rank, determinant when square).
fn bareiss(m: &IntMatrix) -> (usize, BigInt) {
    let mut a = m.clone();
    let (rows, cols) = (a.rows, a.cols);
    let mut prev = BigInt::one();
    let mut sign = BigInt::one();
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&i| !a[(i, c)].is_zero()) else { continue };
        if p != rank {
            a.swap_rows(p, rank);
            sign = -sign;
        }
        for i in rank + 1..rows {
            for j in c + 1..cols {
                let v = (&a[(rank, c)] * &a[(i, j)] - &a[(i, c)] * &a[(rank, j)]) / &prev;
                a[(i, j)] = v;
            }
            a[(i, c)] = BigInt::zero();
        }
        prev = a[(rank, c)].clone();
        rank += 1;
    }
    let det = if rows == cols && rank == rows { sign * prev } else { BigInt::zero() };
    (rank, det)
}

pub fn rank(m: &IntMatrix) -> usize {
    bareiss(m).0
}

pub fn determinant(m: &IntMatrix) -> BigInt {
    assert_eq!(m.rows, m.cols, "determinant of a non-square matrix");
    if m.rows == 0 {
        return BigInt::one();
    }
    bareiss(m).1
}

/// `P·Z·Q = D` with `P`, `Q` unimodular and `D` diagonal with `d₁ | d₂ | …`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiagonalForm {
    pub p: IntMatrix,
    pub q: IntMatrix,
    pub d: IntMatrix,
    /// Nonzero diagonal entries, in order.
    pub diag: Vec<BigInt>,
}

impl DiagonalForm {
    pub fn rank(&self) -> usize {
        self.diag.len()
    }

    /// Solves `Z x = b` via `x = Q D_R^{-1} (P b)_R`.
    pub fn solve(&self, b: &[BigInt]) -> Option<Vec<BigInt>> {
        let pb = self.p.mul_vec(b);
        let r = self.rank();
        if pb[r..].iter().any(|x| !x.is_zero()) {
            return None;
        }
        let mut y = vec![BigInt::zero(); self.q.rows()];
        for i in 0..r {
            let (quo, rem) = pb[i].div_rem(&self.diag[i]);
            if !rem.is_zero() {
                return None;
            }
            y[i] = quo;
        }
        Some(self.q.mul_vec(&y))
    }
}

fn smallest_nonzero(a: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..a.rows {
        for j in t..a.cols {
            let x = &a[(i, j)];
            if x.is_zero() {
                continue;
            }
            match best {
                Some((bi, bj)) if a[(bi, bj)].abs() <= x.abs() => {}
                _ => best = Some((i, j)),
            }
        }
    }
    best
}

/// Smith-style diagonalization by elementary row and column operations.
/// Pivots are the smallest absolute nonzero entry, ties broken row-major.
pub fn diagonal_form(z: &IntMatrix) -> DiagonalForm {
    let (m, k) = (z.rows, z.cols);
    let mut a = z.clone();
    let mut p = IntMatrix::identity(m);
    let mut q = IntMatrix::identity(k);
    let mut diag = Vec::new();
    let mut t = 0;
    while t < m.min(k) {
        let Some((pi, pj)) = smallest_nonzero(&a, t) else { break };
        a.swap_rows(t, pi);
        p.swap_rows(t, pi);
        a.swap_cols(t, pj);
        q.swap_cols(t, pj);
        loop {
            let mut dirty = false;
            for i in t + 1..m {
                if a[(i, t)].is_zero() {
                    continue;
                }
                let f = -(&a[(i, t)] / &a[(t, t)]);
                a.add_row(i, t, &f);
                p.add_row(i, t, &f);
                if !a[(i, t)].is_zero() {
                    dirty = true;
                }
            }
            for j in t + 1..k {
                if a[(t, j)].is_zero() {
                    continue;
                }
                let f = -(&a[(t, j)] / &a[(t, t)]);
                a.add_col(j, t, &f);
                q.add_col(j, t, &f);
                if !a[(t, j)].is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                // A remainder is smaller than the pivot; bring the smallest of
                // row t and column t to the pivot position.
                let mut best = (t, t);
                for i in t + 1..m {
                    if !a[(i, t)].is_zero() && a[(i, t)].abs() < a[best].abs() {
                        best = (i, t);
                    }
                }
                for j in t + 1..k {
                    if !a[(t, j)].is_zero() && a[(t, j)].abs() < a[best].abs() {
                        best = (t, j);
                    }
                }
                if best.0 != t {
                    a.swap_rows(t, best.0);
                    p.swap_rows(t, best.0);
                } else if best.1 != t {
                    a.swap_cols(t, best.1);
                    q.swap_cols(t, best.1);
                }
                continue;
            }
            // Enforce divisibility of the remaining block by the pivot.
            let piv = a[(t, t)].clone();
            let bad = (t + 1..m).find(|&i| (t + 1..k).any(|j| !a[(i, j)].is_multiple_of(&piv)));
            match bad {
                Some(i) => {
                    let one = BigInt::one();
                    a.add_row(t, i, &one);
                    p.add_row(t, i, &one);
                }
                None => break,
            }
        }
        if a[(t, t)].is_negative() {
            a.negate_row(t);
            p.negate_row(t);
        }
        diag.push(a[(t, t)].clone());
        t += 1;
    }
    DiagonalForm { p, q, d: a, diag }
}

/// Column echelon form `Z·U = [H | 0]` with `U` unimodular.
#[derive(Clone, Debug)]
pub struct ColumnEchelon {
    h: IntMatrix,
    u: IntMatrix,
    /// Pivot row of each of the first `rank` columns.
    pivots: Vec<usize>,
}

impl ColumnEchelon {
    pub fn new(z: &IntMatrix) -> Self {
        let (m, k) = (z.rows, z.cols);
        let mut a = z.clone();
        let mut u = IntMatrix::identity(k);
        let mut pivots = Vec::new();
        let mut c = 0;
        for i in 0..m {
            if c == k {
                break;
            }
            for j in c + 1..k {
                if a[(i, j)].is_zero() {
                    continue;
                }
                if a[(i, c)].is_zero() {
                    a.swap_cols(c, j);
                    u.swap_cols(c, j);
                    continue;
                }
                let x = a[(i, c)].clone();
                let y = a[(i, j)].clone();
                if (&y % &x).is_zero() {
                    let f = -(&y / &x);
                    a.add_col(j, c, &f);
                    u.add_col(j, c, &f);
                    continue;
                }
                let e = x.extended_gcd(&y);
                let (g, s, t) = (e.gcd, e.x, e.y);
                let uu = -(&y / &g);
                let vv = &x / &g;
                a.combine_cols(c, j, &s, &t, &uu, &vv);
                u.combine_cols(c, j, &s, &t, &uu, &vv);
            }
            if a[(i, c)].is_zero() {
                continue;
            }
            if a[(i, c)].is_negative() {
                a.negate_col(c);
                u.negate_col(c);
            }
            // Reduce earlier columns in this row modulo the pivot to curb growth.
            for j in 0..c {
                let f = -a[(i, j)].div_floor(&a[(i, c)]);
                if !f.is_zero() {
                    a.add_col(j, c, &f);
                    u.add_col(j, c, &f);
                }
            }
            pivots.push(i);
            c += 1;
        }
        ColumnEchelon { h: a, u, pivots }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// A basis of the integer kernel `{x : Z x = 0}`.
    pub fn kernel_basis(&self) -> Vec<Vec<BigInt>> {
        (self.rank()..self.u.cols).map(|j| self.u.column(j)).collect()
    }

    /// Basis of the column lattice (the nonzero echelon columns).
    pub fn lattice_basis(&self) -> Vec<Vec<BigInt>> {
        (0..self.rank()).map(|j| self.h.column(j)).collect()
    }

    pub fn solve(&self, b: &[BigInt]) -> Option<Vec<BigInt>> {
        assert_eq!(b.len(), self.h.rows);
        let mut r = b.to_vec();
        let mut y = vec![BigInt::zero(); self.u.cols];
        let mut row = 0;
        for (c, &pi) in self.pivots.iter().enumerate() {
            while row < pi {
                if !r[row].is_zero() {
                    return None;
                }
                row += 1;
            }
            let (quo, rem) = r[pi].div_rem(&self.h[(pi, c)]);
            if !rem.is_zero() {
                return None;
            }
            if !quo.is_zero() {
                for i in pi..self.h.rows {
                    let hv = &self.h[(i, c)];
                    if !hv.is_zero() {
                        r[i] -= &quo * hv;
                    }
                }
            }
            y[c] = quo;
            row = pi + 1;
        }
        if r.iter().any(|x| !x.is_zero()) {
            return None;
        }
        Some(self.u.mul_vec(&y))
    }

    pub fn contains(&self, b: &[BigInt]) -> bool {
        self.solve(b).is_some()
    }
}

/// Integer solution of `Z x = b`, if any.
pub fn integer_solve(z: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    ColumnEchelon::new(z).solve(b)
}

pub fn kernel_basis(z: &IntMatrix) -> Vec<Vec<BigInt>> {
    ColumnEchelon::new(z).kernel_basis()
}

pub fn to_big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_rows(rows)
    }

    fn check_form(z: &IntMatrix, f: &DiagonalForm) {
        assert_eq!(f.p.mul(z).mul(&f.q), f.d);
        assert_eq!(determinant(&f.p).abs(), BigInt::one());
        assert_eq!(determinant(&f.q).abs(), BigInt::one());
        for i in 0..f.d.rows() {
            for j in 0..f.d.cols() {
                if i != j {
                    assert!(f.d[(i, j)].is_zero());
                }
            }
        }
        for w in f.diag.windows(2) {
            assert!(w[1].is_multiple_of(&w[0]));
        }
    }

    #[test]
    fn identity_form() {
        let z = IntMatrix::identity(3);
        let f = diagonal_form(&z);
        assert_eq!(f.p, z);
        assert_eq!(f.q, z);
        assert_eq!(f.d, z);
    }

    #[test]
    fn two_by_two_form() {
        let z = m(&[vec![2, 4], vec![6, 8]]);
        let f = diagonal_form(&z);
        check_form(&z, &f);
        assert_eq!(f.diag, vec![BigInt::from(2), BigInt::from(4)]);
    }

    #[test]
    fn zero_form() {
        let f = diagonal_form(&m(&[vec![0]]));
        assert!(f.diag.is_empty());
        assert!(f.d[(0, 0)].is_zero());
    }

    #[test]
    fn solve_examples() {
        let b = to_big(&[4, -2, 7]);
        assert_eq!(integer_solve(&IntMatrix::identity(3), &b), Some(b.clone()));
        assert_eq!(integer_solve(&m(&[vec![2]]), &to_big(&[3])), None);
        let z = IntMatrix::from_columns(4, &[to_big(&[1, 0, 1, 0]), to_big(&[0, 1, 0, 1])]);
        assert_eq!(integer_solve(&z, &to_big(&[1, -1, 0, 0])), None);
        assert_eq!(integer_solve(&z, &to_big(&[2, -1, 2, -1])), Some(to_big(&[2, -1])));
    }

    #[test]
    fn kernel_of_rank_one() {
        let z = m(&[vec![1, 1, 2]]);
        let k = kernel_basis(&z);
        assert_eq!(k.len(), 2);
        for v in k {
            assert!(z.mul_vec(&v).iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn text_round_trip() {
        let z = m(&[vec![1, -2], vec![30, 4]]);
        assert_eq!(IntMatrix::from_text(&z.to_text()).unwrap(), z);
        assert!(IntMatrix::from_text("2 2\n1 2\n3").is_err());
    }

    fn small_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
        (1usize..6, 1usize..6).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-9i64..=9, c), r))
    }

    proptest! {
        #[test]
        fn diagonal_form_reconstructs(rows in small_matrix()) {
            let z = m(&rows);
            check_form(&z, &diagonal_form(&z));
        }

        #[test]
        fn solvers_agree(rows in small_matrix(), x in prop::collection::vec(-4i64..=4, 6), noise in prop::collection::vec(-2i64..=2, 6)) {
            let z = m(&rows);
            let x = to_big(&x[..z.cols()]);
            let mut b = z.mul_vec(&x);
            for (bi, e) in b.iter_mut().zip(&noise) { *bi += *e; }
            let a = integer_solve(&z, &b);
            let f = diagonal_form(&z).solve(&b);
            prop_assert_eq!(a.is_some(), f.is_some());
            if let Some(s) = a { prop_assert_eq!(z.mul_vec(&s), b.clone()); }
            if let Some(s) = f { prop_assert_eq!(z.mul_vec(&s), b); }
        }

        #[test]
        fn rank_matches_diagonal_form(rows in small_matrix()) {
            let z = m(&rows);
            prop_assert_eq!(rank(&z), diagonal_form(&z).rank());
            prop_assert_eq!(rank(&z), ColumnEchelon::new(&z).rank());
        }
    }
}
