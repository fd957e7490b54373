//! Exact rational feasibility of `Z x = b, lo ≤ x ≤ hi` by phase-one simplex
//! with Bland's rule.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::linalg::IntMatrix;

#[derive(Clone, Debug, Default)]
pub struct Bounds {
    pub lower: Option<Vec<BigRational>>,
    pub upper: Option<Vec<Option<BigRational>>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Feasibility {
    Feasible(Vec<BigRational>),
    /// Infeasible, with multipliers `y` over the (bound-shifted) rows such that
    /// `yᵀA ≤ 0` on every column and `yᵀb > 0`.
    Infeasible(Vec<BigRational>),
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }
}

fn rat(x: &BigInt) -> BigRational {
    BigRational::from_integer(x.clone())
}

/// Phase-one simplex on the standard form. Rows of `a` are constraints over
/// nonnegative variables.
fn phase_one(a: Vec<Vec<BigRational>>, b: Vec<BigRational>) -> Result<Vec<BigRational>, Vec<BigRational>> {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let width = n + m + 1;
    let mut t: Vec<Vec<BigRational>> = Vec::with_capacity(m + 1);
    let mut flip = vec![false; m];
    for i in 0..m {
        let mut row = vec![BigRational::zero(); width];
        let neg = b[i].is_negative();
        flip[i] = neg;
        for j in 0..n {
            row[j] = if neg { -a[i][j].clone() } else { a[i][j].clone() };
        }
        row[n + i] = BigRational::one();
        row[width - 1] = if neg { -b[i].clone() } else { b[i].clone() };
        t.push(row);
    }
    let mut obj = vec![BigRational::zero(); width];
    for row in &t {
        for j in 0..n {
            obj[j] -= &row[j];
        }
        obj[width - 1] -= &row[width - 1];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    loop {
        let Some(enter) = (0..n + m).find(|&j| obj[j].is_negative()) else { break };
        let mut leave: Option<(usize, BigRational)> = None;
        for i in 0..m {
            if t[i][enter].is_positive() {
                let ratio = &t[i][width - 1] / &t[i][enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        // The phase-one objective is bounded below, so a leaving row exists.
        let (li, _) = leave.expect("bounded phase-one objective");
        let piv = t[li][enter].clone();
        for x in t[li].iter_mut() {
            *x /= &piv;
        }
        let prow = t[li].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i != li && !row[enter].is_zero() {
                let f = row[enter].clone();
                for (x, p) in row.iter_mut().zip(&prow) {
                    if !p.is_zero() {
                        *x -= &f * p;
                    }
                }
            }
        }
        if !obj[enter].is_zero() {
            let f = obj[enter].clone();
            for (x, p) in obj.iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
        basis[li] = enter;
    }
    if obj[width - 1].is_zero() {
        let mut x = vec![BigRational::zero(); n];
        for (i, &bv) in basis.iter().enumerate() {
            if bv < n {
                x[bv] = t[i][width - 1].clone();
            }
        }
        Ok(x)
    } else {
        let y = (0..m)
            .map(|i| {
                let yi = BigRational::one() - &obj[n + i];
                if flip[i] {
                    -yi
                } else {
                    yi
                }
            })
            .collect();
        Err(y)
    }
}

/// Rational `x` with `Z x = b` inside the bounds (default `x ≥ 0`).
pub fn rational_feasible(z: &IntMatrix, b: &[BigInt], bounds: &Bounds) -> Feasibility {
    let (m, k) = (z.rows(), z.cols());
    let lo: Vec<BigRational> = bounds.lower.clone().unwrap_or_else(|| vec![BigRational::zero(); k]);
    let hi: Vec<Option<BigRational>> = bounds.upper.clone().unwrap_or_else(|| vec![None; k]);
    // Shift x = lo + x'.
    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    let mut rhs: Vec<BigRational> = Vec::new();
    let capped: Vec<usize> = (0..k).filter(|&j| hi[j].is_some()).collect();
    let width = k + capped.len();
    for i in 0..m {
        let mut row = vec![BigRational::zero(); width];
        let mut r = rat(&b[i]);
        for j in 0..k {
            row[j] = rat(&z[(i, j)]);
            r -= &row[j] * &lo[j];
        }
        rows.push(row);
        rhs.push(r);
    }
    for (s, &j) in capped.iter().enumerate() {
        let mut row = vec![BigRational::zero(); width];
        row[j] = BigRational::one();
        row[k + s] = BigRational::one();
        rows.push(row);
        rhs.push(hi[j].clone().unwrap() - &lo[j]);
    }
    match phase_one(rows, rhs) {
        Ok(xs) => Feasibility::Feasible((0..k).map(|j| &lo[j] + &xs[j]).collect()),
        Err(y) => Feasibility::Infeasible(y),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| x.into()).collect()
    }

    #[test]
    fn single_row() {
        let z = IntMatrix::from_rows(&[vec![1i64, 1]]);
        assert_eq!(rational_feasible(&z, &big(&[1]), &Bounds::default()), Feasibility::Feasible(vec![r(1, 1), r(0, 1)]));
    }

    /// Edge-triangle incidence of `K_n`.
    fn triangle_matrix(n: usize) -> (IntMatrix, Vec<(usize, usize)>) {
        let edges: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        let mut tris = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    tris.push([a, b, c]);
                }
            }
        }
        let rows: Vec<Vec<i64>> = edges
            .iter()
            .map(|&(x, y)| tris.iter().map(|t| i64::from(t.contains(&x) && t.contains(&y))).collect())
            .collect();
        (IntMatrix::from_rows(&rows), edges)
    }

    #[test]
    fn k4_fractional_cover() {
        let (z, _) = triangle_matrix(4);
        match rational_feasible(&z, &big(&[1; 6]), &Bounds::default()) {
            Feasibility::Feasible(x) => {
                assert_eq!(x, vec![r(1, 2); 4]);
            }
            other => panic!("expected feasible, got {other:?}"),
        }
    }

    #[test]
    fn k5_with_missing_edge_is_feasible() {
        // Half of every triangle through exactly one endpoint of the missing edge.
        let (z, edges) = triangle_matrix(5);
        let b: Vec<BigInt> = edges.iter().map(|&e| if e == (0, 1) { 0.into() } else { 1.into() }).collect();
        let Feasibility::Feasible(x) = rational_feasible(&z, &b, &Bounds::default()) else { panic!() };
        let back: Vec<BigRational> = (0..z.rows()).map(|i| (0..z.cols()).map(|j| rat(&z[(i, j)]) * &x[j]).sum()).collect();
        assert_eq!(back, b.iter().map(rat).collect::<Vec<_>>());
    }

    #[test]
    fn k4_with_missing_edge_is_infeasible() {
        // Triangles 023 and 123 are forced and then cover edge 23 twice.
        let (z, edges) = triangle_matrix(4);
        let b: Vec<BigInt> = edges.iter().map(|&e| if e == (0, 1) { 0.into() } else { 1.into() }).collect();
        match rational_feasible(&z, &b, &Bounds::default()) {
            Feasibility::Infeasible(y) => {
                let yb: BigRational = y.iter().zip(&b).map(|(yi, bi)| yi * rat(bi)).sum();
                assert!(yb.is_positive());
                for j in 0..z.cols() {
                    let ya: BigRational = (0..z.rows()).map(|i| &y[i] * rat(&z[(i, j)])).sum();
                    assert!(!ya.is_positive());
                }
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn box_bounds() {
        let z = IntMatrix::from_rows(&[vec![1i64, 1]]);
        let bounds = Bounds { lower: Some(vec![r(1, 3), r(1, 3)]), upper: Some(vec![Some(r(1, 2)), Some(r(1, 2))]) };
        let f = rational_feasible(&z, &big(&[1]), &bounds);
        let Feasibility::Feasible(x) = f else { panic!() };
        assert_eq!(&x[0] + &x[1], r(1, 1));
        assert!(x.iter().all(|v| *v >= r(1, 3) && *v <= r(1, 2)));
        let tight = Bounds { lower: None, upper: Some(vec![Some(r(1, 3)), Some(r(1, 3))]) };
        assert!(!rational_feasible(&z, &big(&[1]), &tight).is_feasible());
    }
}
