//! Matrices over `F_p` in which every square submatrix is nonsingular.

use serde::Serialize;

use crate::complex::subsets_of_size;
use crate::error::{Error, Result};

/// Deterministic Miller–Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    (u128::from(a) * u128::from(b) % u128::from(m)) as u64
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    r
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

/// The smallest prime with enough field elements for a `q × r` Cauchy matrix.
pub fn smallest_admissible_prime(q: usize, r: usize) -> u64 {
    (((q + r) as u64).max(2)..).find(|&p| is_prime(p)).expect("primes are unbounded")
}

/// The smallest prime above `2^{8q}`, which lies below `2^{9q}`; `None` when
/// it does not fit in 64 bits.
pub fn wide_prime(q: usize) -> Option<u64> {
    let lo = 1u64.checked_shl(u32::try_from(8 * q).ok()?)?;
    if 8 * q >= 63 {
        return None;
    }
    (lo + 1..).find(|&p| is_prime(p))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GenericMatrix {
    pub p: u64,
    /// `q` rows of `r` entries in `[0, p)`.
    pub rows: Vec<Vec<u64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GenericReport {
    pub minors_checked: u64,
    /// Rows and columns of the first singular square submatrix found.
    pub singular: Option<(Vec<usize>, Vec<usize>)>,
}

impl GenericReport {
    pub fn ok(&self) -> bool {
        self.singular.is_none()
    }
}

/// Determinant over `F_p` by elimination.
fn det_mod(mut a: Vec<Vec<u64>>, p: u64) -> u64 {
    let n = a.len();
    let mut det = 1u64;
    for c in 0..n {
        let Some(piv) = (c..n).find(|&i| a[i][c] != 0) else { return 0 };
        if piv != c {
            a.swap(piv, c);
            det = (p - det) % p;
        }
        det = mul_mod(det, a[c][c], p);
        let inv = inv_mod(a[c][c], p);
        for i in c + 1..n {
            if a[i][c] != 0 {
                let f = mul_mod(a[i][c], inv, p);
                for j in c..n {
                    let sub = mul_mod(f, a[c][j], p);
                    a[i][j] = (a[i][j] + p - sub) % p;
                }
            }
        }
    }
    det
}

impl GenericMatrix {
    /// Checks every square submatrix.
    pub fn verify(&self) -> GenericReport {
        let q = self.rows.len();
        let r = self.rows.first().map_or(0, Vec::len);
        let mut checked = 0;
        for k in 1..=q.min(r) {
            for rs in subsets_of_size(((1u64 << q) - 1) as u32, k) {
                for cs in subsets_of_size(((1u64 << r) - 1) as u32, k) {
                    let ri: Vec<usize> = (0..q).filter(|i| rs >> i & 1 == 1).collect();
                    let ci: Vec<usize> = (0..r).filter(|j| cs >> j & 1 == 1).collect();
                    let sub: Vec<Vec<u64>> = ri.iter().map(|&i| ci.iter().map(|&j| self.rows[i][j]).collect()).collect();
                    checked += 1;
                    if det_mod(sub, self.p) == 0 {
                        return GenericReport { minors_checked: checked, singular: Some((ri, ci)) };
                    }
                }
            }
        }
        GenericReport { minors_checked: checked, singular: None }
    }
}

/// Cauchy matrix `1/(x_i − y_j)` with `x_i = i`, `y_j = q + j`, scaled so
/// that the first row and column are all ones.
pub fn generic_matrix(q: usize, r: usize, p: u64) -> Result<GenericMatrix> {
    if q == 0 || r == 0 {
        return Err(Error::Construction("the matrix needs at least one row and column".into()));
    }
    if !is_prime(p) {
        return Err(Error::Construction(format!("{p} is not prime")));
    }
    if ((q + r) as u64) > p {
        return Err(Error::Construction(format!("F_{p} has fewer than {} elements", q + r)));
    }
    let mut rows: Vec<Vec<u64>> = (0..q)
        .map(|i| (0..r).map(|j| inv_mod((i as u64 + p - (q + j) as u64 % p) % p, p)).collect())
        .collect();
    for row in rows.iter_mut() {
        let s = inv_mod(row[0], p);
        row.iter_mut().for_each(|x| *x = mul_mod(*x, s, p));
    }
    for j in 0..r {
        let s = inv_mod(rows[0][j], p);
        rows.iter_mut().for_each(|row| row[j] = mul_mod(row[j], s, p));
    }
    Ok(GenericMatrix { p, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes() {
        let small: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert!(is_prime(1_000_000_007) && !is_prime(1_000_000_007 * 3));
        assert_eq!(smallest_admissible_prime(4, 2), 7);
        let p = wide_prime(2).unwrap();
        assert!(p > 1 << 16 && p < 1 << 18);
        assert!(wide_prime(8).is_none());
    }

    #[test]
    fn examples() {
        assert_eq!(generic_matrix(1, 1, 5).unwrap().rows, vec![vec![1]]);
        let m = generic_matrix(4, 2, 11).unwrap();
        let rep = m.verify();
        assert!(rep.ok());
        assert_eq!(rep.minors_checked, 8 + 6);
        assert!(matches!(generic_matrix(3, 2, 3), Err(Error::Construction(_))));
        assert!(matches!(generic_matrix(2, 2, 9), Err(Error::Construction(_))));
    }

    #[test]
    fn detects_singular_minor() {
        let m = GenericMatrix { p: 7, rows: vec![vec![1, 2], vec![2, 4]] };
        let rep = m.verify();
        assert_eq!(rep.singular, Some((vec![0, 1], vec![0, 1])));
    }
}
