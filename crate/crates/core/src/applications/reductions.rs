//! Resolvable decompositions, large sets and complete resolutions as
//! partite decomposition problems on an enlarged vertex set.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, ToPrimitive};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::conditions::binomial;
use super::{build_partite, combinations, Multigraph, PartitionSpec, ProblemInstance};
use crate::complex::{Label, Vertex};
use crate::error::{Error, Result};
use crate::vsys::Selection;

/// A reduced instance together with the recipe that reads solutions back.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub instance: ProblemInstance,
    pub decoder: Decoder,
}

/// How to read a decomposition of a reduced instance as the original object.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Decoder {
    /// Copies restricted to `a` are the blocks; the image of `b` names the class.
    Resolvable { n: u32, a: Vec<Label>, b: Vec<Label> },
    /// Blocks are images of `a`, grouped into designs by the image of `b`.
    LargeSet { n: u32, a: Vec<Label>, b: Vec<Label> },
    /// `layers` lists `(label, first vertex of its part)` from the top level down.
    CompleteResolution { n: u32, a: Vec<Label>, layers: Vec<(Label, Vertex)> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Decoded {
    /// Each class lists copies as images of the labels `0..q` in order.
    Resolvable { classes: Vec<Vec<Vec<Vertex>>> },
    /// Each design lists sorted blocks.
    LargeSet { designs: Vec<Vec<Vec<Vertex>>> },
    /// `(path, block)`: the path gives the position of the block at each level, top first.
    CompleteResolution { blocks: Vec<(Vec<u32>, Vec<Vertex>)> },
}

fn images(emb: &crate::complex::Injection, labels: &[Label]) -> Result<Vec<Vertex>> {
    labels
        .iter()
        .map(|&l| emb.get(l).ok_or_else(|| Error::InvalidEmbedding(format!("{emb} does not map label {}", l + 1))))
        .collect()
}

impl Decoder {
    pub fn decode(&self, sel: &Selection) -> Result<Decoded> {
        let mut copies = Vec::new();
        for ((_, emb), x) in sel.iter() {
            if !x.is_one() {
                return Err(Error::Reduction(format!("{emb} is used with coefficient {x}; decoding needs a set")));
            }
            copies.push(emb);
        }
        match self {
            Decoder::Resolvable { a, b, .. } => {
                let mut classes: BTreeMap<Vec<Vertex>, Vec<Vec<Vertex>>> = BTreeMap::new();
                for emb in copies {
                    let mut key = images(emb, b)?;
                    key.sort_unstable();
                    classes.entry(key).or_default().push(images(emb, a)?);
                }
                Ok(Decoded::Resolvable { classes: classes.into_values().collect() })
            }
            Decoder::LargeSet { a, b, .. } => {
                let mut designs: BTreeMap<Vec<Vertex>, Vec<Vec<Vertex>>> = BTreeMap::new();
                for emb in copies {
                    let mut key = images(emb, b)?;
                    key.sort_unstable();
                    let mut block = images(emb, a)?;
                    block.sort_unstable();
                    designs.entry(key).or_default().push(block);
                }
                let mut designs: Vec<Vec<Vec<Vertex>>> = designs.into_values().collect();
                designs.iter_mut().for_each(|d| d.sort());
                Ok(Decoded::LargeSet { designs })
            }
            Decoder::CompleteResolution { a, layers, .. } => {
                let mut blocks = Vec::new();
                for emb in copies {
                    let path = layers
                        .iter()
                        .map(|&(l, start)| images(emb, &[l]).map(|v| v[0] - start))
                        .collect::<Result<Vec<u32>>>()?;
                    let mut block = images(emb, a)?;
                    block.sort_unstable();
                    blocks.push((path, block));
                }
                blocks.sort();
                Ok(Decoded::CompleteResolution { blocks })
            }
        }
    }
}

fn sample_sets(pool: &[Vertex], k: usize, count: usize, seed: u64) -> Result<Vec<Vec<Vertex>>> {
    let all = combinations(pool, k);
    if count > all.len() {
        return Err(Error::Reduction(format!("need {count} sets of size {k} but only {} exist", all.len())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx = rand::seq::index::sample(&mut rng, all.len(), count).into_vec();
    idx.sort_unstable();
    Ok(idx.into_iter().map(|i| all[i].clone()).collect())
}

/// Least `m` with `C(m, k) ≥ target`.
fn least_m(k: usize, target: u64) -> u32 {
    (0u32..).find(|&m| binomial(u64::from(m), k as u64) >= num_bigint::BigInt::from(target)).expect("binomials are unbounded")
}

/// Resolvable `H`-decomposition of `G` as a partite problem: an auxiliary
/// `(r−1)`-graph `J` on new vertices `Y` names the parallel classes, and every
/// copy of `H` is joined to its class through the edges `f ∪ {x}`, `f ∈ J`.
pub fn reduce_resolvable(h: &Multigraph, g: &Multigraph, seed: u64) -> Result<Reduction> {
    let (q, r, n) = (h.n(), h.r(), g.n());
    if g.r() != r || r < 2 {
        return Err(Error::Reduction(format!("H and G must share a uniformity of at least 2 (got {r} and {})", g.r())));
    }
    if q == 0 || n % q != 0 {
        return Err(Error::Reduction(format!("{q} does not divide {n}")));
    }
    if !h.is_vertex_regular() || !g.is_vertex_regular() {
        return Err(Error::Reduction("H and G must both be vertex-regular".into()));
    }
    let (num, den) = (i64::from(q) * g.size(), h.size() * i64::from(n));
    if den == 0 || num % den != 0 {
        return Err(Error::Reduction(format!("the number of classes {num}/{den} is not an integer")));
    }
    let classes = (num / den) as u64;
    let m = least_m(r - 1, classes);
    let ys: Vec<Vertex> = (n..n + m).collect();
    let j = sample_sets(&ys, r - 1, classes as usize, seed)?;

    let a: Vec<Label> = (0..q as Label).collect();
    let b: Vec<Label> = (q as Label..(q as usize + r - 1) as Label).collect();
    let mut h2 = h.widened(q + r as u32 - 1);
    let bv: Vec<Vertex> = b.iter().map(|&l| Vertex::from(l)).collect();
    for &x in &a {
        let mut e = bv.clone();
        e.push(Vertex::from(x));
        h2.add(&e, 1)?;
    }
    let mut g2 = g.widened(n + m);
    for f in &j {
        for x in 0..n {
            let mut e = f.clone();
            e.push(x);
            g2.add(&e, 1)?;
        }
    }
    let spec = PartitionSpec::new(vec![a.clone(), b.clone()], vec![(0..n).collect(), ys])
        .map_err(|e| Error::Reduction(format!("inconsistent auxiliary structure: {e}")))?;
    let mut instance = build_partite(&h2, &spec, &g2)?;
    instance.provenance = format!("resolvable(q={q}, r={r}, n={n}, classes={classes}, seed={seed})");
    Ok(Reduction { instance, decoder: Decoder::Resolvable { n, a, b } })
}

/// Decomposition of a `q`-multigraph into `(n, q, r, λ)`-designs: an auxiliary
/// `(q−r)`-graph `J` names the designs, and each block `A` comes with the
/// `q`-sets `e ∪ f` for its `r`-subsets `e`.
pub fn reduce_large_set(q: usize, r: usize, lambda: u64, g: &Multigraph, seed: u64) -> Result<Reduction> {
    let n = g.n();
    if g.r() != q || r == 0 || r >= q {
        return Err(Error::Reduction(format!("need a {q}-multigraph and 0 < r < q (got r = {r})")));
    }
    if g.edges().any(|(_, m)| m < 0) {
        return Err(Error::Reduction("G has a negative multiplicity".into()));
    }
    let mut z = Vec::with_capacity(r + 1);
    for i in 0..=r {
        let num = binomial(u64::from(n).saturating_sub(i as u64), (r - i) as u64) * lambda;
        let den = binomial((q - i) as u64, (r - i) as u64);
        if (&num % &den) != 0.into() {
            return Err(Error::Reduction(format!("Z_{i} = {num}/{den} is not an integer")));
        }
        z.push((num / den).to_i64().ok_or_else(|| Error::Reduction("design size overflows".into()))?);
    }
    let verts: Vec<Vertex> = (0..n).collect();
    let mut r_degrees = None;
    for (i, &zi) in z.iter().enumerate() {
        for f in combinations(&verts, i) {
            let d = g.degree(&f);
            if zi == 0 || d % zi != 0 {
                return Err(Error::Reduction(format!("Z_{i} = {zi} does not divide |G({f:?})| = {d}")));
            }
            if i == r {
                match r_degrees {
                    None => r_degrees = Some(d),
                    Some(x) if x != d => return Err(Error::Reduction("G is not an r-multidesign".into())),
                    _ => {}
                }
            }
        }
    }
    let designs = (g.size() / z[0]) as u64;
    let m = least_m(q - r, designs);
    let ys: Vec<Vertex> = (n..n + m).collect();
    let j = sample_sets(&ys, q - r, designs as usize, seed)?;

    let a: Vec<Label> = (0..q as Label).collect();
    let b: Vec<Label> = (q as Label..(2 * q - r) as Label).collect();
    let mut h = Multigraph::new((2 * q - r) as u32, q);
    h.add(&a.iter().map(|&l| Vertex::from(l)).collect::<Vec<_>>(), 1)?;
    let bv: Vec<Vertex> = b.iter().map(|&l| Vertex::from(l)).collect();
    for e in combinations(&a.iter().map(|&l| Vertex::from(l)).collect::<Vec<_>>(), r) {
        h.add(&[e, bv.clone()].concat(), 1)?;
    }
    let mut g2 = g.widened(n + m);
    for e in combinations(&verts, r) {
        for f in &j {
            g2.add(&[e.clone(), f.clone()].concat(), lambda as i64)?;
        }
    }
    let spec = PartitionSpec::new(vec![a.clone(), b.clone()], vec![verts, ys])
        .map_err(|e| Error::Reduction(format!("inconsistent auxiliary structure: {e}")))?;
    let mut instance = build_partite(&h, &spec, &g2)?;
    instance.provenance = format!("large_set(q={q}, r={r}, lambda={lambda}, n={n}, designs={designs}, seed={seed})");
    Ok(Reduction { instance, decoder: Decoder::LargeSet { n, a, b } })
}

/// Complete resolution of `K^q_n` as a partite problem with one layer of
/// new vertices per level of the nested chain.
pub fn reduce_complete_resolution(q: usize, n: u32) -> Result<Reduction> {
    let d = super::complete_resolution_divisible(u64::from(n), q as u64);
    if let Some(f) = d.failing {
        return Err(Error::Reduction(format!("{n} and {q} fail the congruence: {f:?}")));
    }
    if q == 0 || 2 * q > crate::complex::MAX_LABELS {
        return Err(Error::Reduction(format!("q = {q} is out of range")));
    }
    // Layer j has (n − j)/(q − j) vertices; the top layer is j = q − 1.
    let mut layer_parts: Vec<Vec<Vertex>> = Vec::with_capacity(q);
    let mut next = n;
    for j in 0..q as u32 {
        let size = (n - j) / (q as u32 - j);
        layer_parts.push((next..next + size).collect());
        next += size;
    }
    let total = next;
    let a: Vec<Label> = (0..q as Label).collect();
    let blabel = |j: usize| (q + j) as Label;

    let mut h = Multigraph::new(2 * q as u32, q);
    let mut g = Multigraph::new(total, q);
    let xs: Vec<Vertex> = (0..n).collect();
    let av: Vec<Vertex> = a.iter().map(|&l| Vertex::from(l)).collect();
    for k in 0..=q {
        let top: Vec<usize> = (q - k..q).collect();
        let bs: Vec<Vertex> = top.iter().map(|&j| Vertex::from(blabel(j))).collect();
        for e in combinations(&av, q - k) {
            h.add(&[e, bs.clone()].concat(), 1)?;
        }
        let mut tails: Vec<Vec<Vertex>> = vec![Vec::new()];
        for &j in &top {
            tails = tails.into_iter().flat_map(|t| layer_parts[j].iter().map(move |&y| [t.clone(), vec![y]].concat())).collect();
        }
        for e in combinations(&xs, q - k) {
            for t in &tails {
                g.add(&[e.clone(), t.clone()].concat(), 1)?;
            }
        }
    }
    let mut parts = vec![a.clone()];
    let mut vparts = vec![xs];
    for (j, p) in layer_parts.iter().enumerate() {
        parts.push(vec![blabel(j)]);
        vparts.push(p.clone());
    }
    let spec = PartitionSpec::new(parts, vparts)?;
    let mut instance = build_partite(&h, &spec, &g)?;
    instance.provenance = format!("complete_resolution(q={q}, n={n})");
    let layers = (0..q).rev().map(|j| (blabel(j), layer_parts[j][0])).collect();
    Ok(Reduction { instance, decoder: Decoder::CompleteResolution { n, a, layers } })
}

/// Every class covers each vertex of `G` exactly once, and the copies of `H`
/// together cover `G` exactly.
pub fn verify_resolvable(h: &Multigraph, g: &Multigraph, classes: &[Vec<Vec<Vertex>>]) -> std::result::Result<(), String> {
    let q = h.n() as usize;
    let mut cover = Multigraph::new(g.n(), g.r());
    for (c, class) in classes.iter().enumerate() {
        let mut seen = vec![false; g.n() as usize];
        for copy in class {
            if copy.len() != q {
                return Err(format!("class {c} has a copy with {} vertices", copy.len()));
            }
            for &v in copy {
                if v >= g.n() || std::mem::replace(&mut seen[v as usize], true) {
                    return Err(format!("class {c} uses vertex {v} twice or out of range"));
                }
            }
            for (e, m) in h.edges() {
                let img: Vec<Vertex> = e.iter().map(|&l| copy[l as usize]).collect();
                cover.add(&img, m).map_err(|e| e.to_string())?;
            }
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return Err(format!("class {c} misses vertex {v}"));
        }
    }
    if &cover != g {
        return Err("the copies do not cover G exactly".into());
    }
    Ok(())
}

fn design_problem(n: u32, q: usize, t: usize, lambda: i64, blocks: &[Vec<Vertex>]) -> Option<String> {
    let mut counts: HashMap<Vec<Vertex>, i64> = HashMap::new();
    for b in blocks {
        let mut s = b.clone();
        s.sort_unstable();
        s.dedup();
        if s.len() != q || s.iter().any(|&v| v >= n) {
            return Some(format!("{b:?} is not a {q}-subset of [0, {n})"));
        }
        for f in combinations(&s, t) {
            *counts.entry(f).or_insert(0) += 1;
        }
    }
    for f in combinations(&(0..n).collect::<Vec<_>>(), t) {
        let c = counts.get(&f).copied().unwrap_or(0);
        if c != lambda {
            return Some(format!("{f:?} lies in {c} blocks, not {lambda}"));
        }
    }
    None
}

/// Each group is an `(n, q, r, λ)`-design and the groups together are `G`.
pub fn verify_large_set(g: &Multigraph, r: usize, lambda: u64, designs: &[Vec<Vec<Vertex>>]) -> std::result::Result<(), String> {
    let mut union = Multigraph::new(g.n(), g.r());
    for (k, d) in designs.iter().enumerate() {
        if let Some(p) = design_problem(g.n(), g.r(), r, lambda as i64, d) {
            return Err(format!("design {k}: {p}"));
        }
        for b in d {
            union.add(b, 1).map_err(|e| e.to_string())?;
        }
    }
    if &union != g {
        return Err("the designs do not partition G".into());
    }
    Ok(())
}

/// Blocks sharing the first `k` path entries form an `(n, q, q−k, 1)`-design,
/// for every `0 ≤ k ≤ q`.
pub fn verify_complete_resolution(n: u32, q: usize, blocks: &[(Vec<u32>, Vec<Vertex>)]) -> std::result::Result<(), String> {
    for (path, _) in blocks {
        if path.len() != q {
            return Err(format!("path {path:?} has length {}, not {q}", path.len()));
        }
    }
    for k in 0..=q {
        let mut groups: BTreeMap<&[u32], Vec<Vec<Vertex>>> = BTreeMap::new();
        for (path, b) in blocks {
            groups.entry(&path[..k]).or_default().push(b.clone());
        }
        for (prefix, g) in groups {
            if let Some(p) = design_problem(n, q, q - k, 1, &g) {
                return Err(format!("level {k}, group {prefix:?}: {p}"));
            }
        }
    }
    Ok(())
}
