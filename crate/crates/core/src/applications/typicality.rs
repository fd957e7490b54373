//! Typicality as a measurement, and inclusion matrices.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::{combinations, Multigraph, PartitionSpec};
use crate::complex::Vertex;
use crate::error::{Error, Result};
use crate::lattice::{rank, IntMatrix};

/// Largest number of `(r−1)`-set families examined by one measurement.
pub const MAX_FAMILIES: u64 = 5_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Typicality {
    /// The least `c` for which the graph is `(c, s)`-typical.
    #[serde(serialize_with = "ser_ratio")]
    pub c: BigRational,
    /// A family of `(r−1)`-sets attaining `c`.
    pub witness: Vec<Vec<Vertex>>,
    /// The part whose vertices were counted, in the partite variant.
    pub part: Option<usize>,
}

fn ser_ratio<S: serde::Serializer>(x: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

fn neighbourhood(g: &Multigraph, f: &[Vertex]) -> BTreeSet<Vertex> {
    (0..g.n())
        .filter(|v| !f.contains(v))
        .filter(|&v| {
            let mut e = f.to_vec();
            e.push(v);
            e.sort_unstable();
            g.contains(&e)
        })
        .collect()
}

fn families(count: usize, s: usize) -> Result<u64> {
    let mut total: u64 = 0;
    for k in 1..=s.min(count) {
        let c = super::binomial(count as u64, k as u64);
        total = total.saturating_add(u64::try_from(&c).unwrap_or(u64::MAX));
    }
    if total > MAX_FAMILIES {
        return Err(Error::Budget(format!("{total} families of sets exceed the limit of {MAX_FAMILIES}")));
    }
    Ok(total)
}

fn deviation(actual: usize, expected: &BigRational, k: usize) -> BigRational {
    ((BigRational::from_integer(actual.into()) / expected) - BigRational::one()).abs() / BigRational::from_integer(k.into())
}

/// Worst relative deviation of common neighbourhoods from `d^|A|·n`, over
/// families `A` of at most `s` distinct `(r−1)`-sets, divided by `|A|`.
pub fn measure_typicality(g: &Multigraph, s: usize) -> Result<Typicality> {
    let n = g.n();
    let r = g.r();
    let edges = g.edges().count();
    if edges == 0 || r == 0 {
        return Err(Error::Degenerate("the graph has density zero".into()));
    }
    let d = BigRational::new(edges.into(), super::binomial(u64::from(n), r as u64));
    let all: Vec<Vertex> = (0..n).collect();
    let sets = combinations(&all, r - 1);
    families(sets.len(), s)?;
    let nbhd: Vec<BTreeSet<Vertex>> = sets.iter().map(|f| neighbourhood(g, f)).collect();
    let idx: Vec<Vertex> = (0..sets.len() as Vertex).collect();
    let mut best = Typicality { c: BigRational::zero(), witness: Vec::new(), part: None };
    let mut power = BigRational::from_integer(n.into());
    for k in 1..=s.min(sets.len()) {
        power *= &d;
        for a in combinations(&idx, k) {
            let mut common = nbhd[a[0] as usize].clone();
            for &i in &a[1..] {
                common.retain(|v| nbhd[i as usize].contains(v));
            }
            let dev = deviation(common.len(), &power, k);
            if dev > best.c || best.witness.is_empty() {
                best = Typicality { c: dev, witness: a.iter().map(|&i| sets[i as usize].clone()).collect(), part: None };
            }
        }
    }
    Ok(best)
}

/// The blowup variant: for distinct partite `(r−1)`-sets `e_j` over parts
/// `f_j` and a part `x` completing every `f_j` to an edge of `h`, compares
/// `|V_x ∩ ⋂ G(e_j)|` with `|V_x|·∏ d_{f_j+x}`. Needs one label per part.
pub fn measure_partite_typicality(h: &Multigraph, spec: &PartitionSpec, g: &Multigraph, s: usize) -> Result<Typicality> {
    if spec.parts.iter().any(|p| p.len() != 1) || spec.parts.len() != h.n() as usize {
        return Err(Error::Precondition("the blowup variant needs one part per vertex of H".into()));
    }
    let r = h.r();
    if r == 0 || g.r() != r {
        return Err(Error::Precondition("H and G need the same positive uniformity".into()));
    }
    let part_of = |v: Vertex| spec.vertex_parts.iter().position(|p| p.contains(&v));
    let density = |f: &[Vertex]| -> BigRational {
        let count = g
            .edges()
            .filter(|(e, _)| {
                let mut parts: Vec<Vertex> = e.iter().filter_map(|&v| part_of(v)).map(|p| p as Vertex).collect();
                parts.sort_unstable();
                parts == f
            })
            .count();
        let size: usize = f.iter().map(|&x| spec.vertex_parts[x as usize].len()).product();
        BigRational::new(count.into(), size.into())
    };
    let hv: Vec<Vertex> = (0..h.n()).collect();
    // Every partite (r−1)-set of G with its part set.
    let mut items: Vec<(Vec<Vertex>, Vec<Vertex>)> = Vec::new();
    for f in combinations(&hv, r - 1) {
        let mut tr: Vec<Vec<Vertex>> = vec![Vec::new()];
        for &x in &f {
            tr = tr.into_iter().flat_map(|t| spec.vertex_parts[x as usize].iter().map(move |&v| [t.clone(), vec![v]].concat())).collect();
        }
        for mut e in tr {
            e.sort_unstable();
            items.push((f.clone(), e));
        }
    }
    families(items.len(), s)?;
    let completions = |f: &[Vertex]| -> BTreeSet<Vertex> { neighbourhood(h, f) };
    let nbhd: Vec<BTreeSet<Vertex>> = items.iter().map(|(_, e)| neighbourhood(g, e)).collect();
    let idx: Vec<Vertex> = (0..items.len() as Vertex).collect();
    let mut best: Option<Typicality> = None;
    for k in 1..=s.min(items.len()) {
        for a in combinations(&idx, k) {
            let mut xs = completions(&items[a[0] as usize].0);
            for &i in &a[1..] {
                let c = completions(&items[i as usize].0);
                xs.retain(|x| c.contains(x));
            }
            for x in xs {
                let vx = &spec.vertex_parts[x as usize];
                let mut expected = BigRational::from_integer(vx.len().into());
                for &i in &a {
                    let mut fx = items[i as usize].0.clone();
                    fx.push(x);
                    fx.sort_unstable();
                    expected *= density(&fx);
                }
                if expected.is_zero() {
                    return Err(Error::Degenerate(format!("no edges over parts {:?} and {x}", items[a[0] as usize].0)));
                }
                let actual = vx.iter().filter(|v| a.iter().all(|&i| nbhd[i as usize].contains(v))).count();
                let dev = deviation(actual, &expected, k);
                if best.as_ref().is_none_or(|b| dev > b.c) {
                    best = Some(Typicality { c: dev, witness: a.iter().map(|&i| items[i as usize].1.clone()).collect(), part: Some(x as usize) });
                }
            }
        }
    }
    best.ok_or_else(|| Error::Degenerate("no family has a completing part".into()))
}

/// Inclusion matrix of `i`-subsets (rows) against `r`-subsets (columns) of `[q]`.
pub fn inclusion_matrix(q: usize, i: usize, r: usize) -> IntMatrix {
    let all: Vec<Vertex> = (0..q as Vertex).collect();
    let rows = combinations(&all, i);
    let cols = combinations(&all, r);
    let entries: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|a| cols.iter().map(|b| BigInt::from(u8::from(a.iter().all(|x| b.contains(x))))).collect())
        .collect();
    IntMatrix::from_rows(&entries)
}

/// Rank over the rationals of [`inclusion_matrix`].
pub fn inclusion_rank(q: usize, i: usize, r: usize) -> usize {
    rank(&inclusion_matrix(q, i, r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::applications::complete_blowup;

    /// Direct count over all families, without shared neighbourhood tables.
    fn brute(g: &Multigraph, s: usize) -> BigRational {
        let n = g.n();
        let d = BigRational::new(g.edges().count().into(), super::super::binomial(u64::from(n), g.r() as u64));
        let all: Vec<Vertex> = (0..n).collect();
        let sets = combinations(&all, g.r() - 1);
        let mut worst = BigRational::zero();
        let idx: Vec<Vertex> = (0..sets.len() as Vertex).collect();
        for k in 1..=s {
            for a in combinations(&idx, k) {
                let common = (0..n)
                    .filter(|v| {
                        a.iter().all(|&i| {
                            let f = &sets[i as usize];
                            !f.contains(v) && {
                                let mut e = f.clone();
                                e.push(*v);
                                e.sort_unstable();
                                g.contains(&e)
                            }
                        })
                    })
                    .count();
                let mut exp = BigRational::from_integer(n.into());
                for _ in 0..k {
                    exp *= &d;
                }
                let dev = ((BigRational::from_integer(common.into()) - &exp) / &exp).abs() / BigRational::from_integer(k.into());
                worst = worst.max(dev);
            }
        }
        worst
    }

    #[test]
    fn complete_graph() {
        let g = Multigraph::complete(10, 2, 1);
        let t = measure_typicality(&g, 2).unwrap();
        assert_eq!(t.c, brute(&g, 2));
        assert_eq!(t.c, BigRational::new(1.into(), 10.into()));
        let g3 = Multigraph::complete(7, 3, 1);
        assert_eq!(measure_typicality(&g3, 2).unwrap().c, brute(&g3, 2));
    }

    #[test]
    fn sparse_graph_matches_brute_force() {
        let g = Multigraph::from_edges(7, 3, [[0, 1, 3], [1, 2, 4], [2, 3, 5], [3, 4, 6], [0, 4, 5], [1, 5, 6], [0, 2, 6]]).unwrap();
        let t = measure_typicality(&g, 2).unwrap();
        assert_eq!(t.c, brute(&g, 2));
        assert!(!t.witness.is_empty());
    }

    #[test]
    fn degenerate_and_budget() {
        assert!(matches!(measure_typicality(&Multigraph::new(5, 2), 1), Err(Error::Degenerate(_))));
        assert!(matches!(measure_typicality(&Multigraph::complete(40, 3, 1), 3), Err(Error::Budget(_))));
    }

    #[test]
    fn complete_tripartite_is_exactly_typical() {
        let h = Multigraph::complete(3, 2, 1);
        let (spec, g) = complete_blowup(&h, 3).unwrap();
        let t = measure_partite_typicality(&h, &spec, &g, 2).unwrap();
        assert!(t.c.is_zero());
        // Removing one edge creates a deficit at its endpoints.
        let mut g2 = g.clone();
        g2.add(&[0, 3], -1).unwrap();
        let t2 = measure_partite_typicality(&h, &spec, &g2, 1).unwrap();
        assert!(t2.c.is_positive());
    }

    #[test]
    fn inclusion_ranks() {
        assert_eq!(inclusion_rank(4, 1, 2), 4);
        assert_eq!(inclusion_rank(6, 2, 3), 15);
        // Past q/2 the rows become dependent.
        assert_eq!(inclusion_rank(4, 1, 3), 4);
        assert_eq!(inclusion_rank(4, 2, 3), 4);
        let m = inclusion_matrix(5, 1, 2);
        assert_eq!((m.rows(), m.cols()), (5, 10));
    }
}
