//! Builders for specific structures: tryst tables, the twisted octahedron,
//! rainbow cliques, oriented decompositions, Latin squares and Sudoku.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{build_partite, combinations, lift, permutations, Multigraph, PartitionSpec, ProblemInstance};
use crate::complex::{full_mask, label_iter, subsets_of_size, Injection, Label, LabelledComplex, PairRule, Rule, Vertex};
use crate::error::{Error, Result};
use crate::symmetry::PermutationGroup;
use crate::vsys::{EdgeVector, VectorSystem};

/// The complete `n`-blowup of `h`: vertex `x` of `h` becomes the part
/// `x·n .. (x+1)·n`, and each edge becomes all its partite transversals.
pub fn complete_blowup(h: &Multigraph, n: u32) -> Result<(PartitionSpec, Multigraph)> {
    let parts: Vec<Vec<Vertex>> = (0..h.n()).map(|x| (x * n..(x + 1) * n).collect()).collect();
    let mut g = Multigraph::new(h.n() * n, h.r());
    for (e, _) in h.edges() {
        let mut tr: Vec<Vec<Vertex>> = vec![Vec::new()];
        for &x in e {
            tr = tr.into_iter().flat_map(|t| parts[x as usize].iter().map(move |&v| [t.clone(), vec![v]].concat())).collect();
        }
        for t in tr {
            g.add(&t, 1)?;
        }
    }
    Ok((PartitionSpec::singletons(parts)?, g))
}

/// Latin squares of order `n` as triangle decompositions of `K_{n,n,n}`.
pub fn build_latin(n: u32) -> Result<ProblemInstance> {
    let (spec, g) = complete_blowup(&Multigraph::complete(3, 2, 1), n)?;
    let mut inst = build_partite(&Multigraph::complete(3, 2, 1), &spec, &g)?;
    inst.provenance = format!("latin(n={n})");
    Ok(inst)
}

/// Rows `x₁x₂`, columns `y₁y₂`, symbols `z₁z₂`; vertices 0..6 in that order.
pub fn sudoku_graph() -> Multigraph {
    Multigraph::from_edges(6, 4, [[0, 1, 2, 3], [0, 1, 4, 5], [2, 3, 4, 5], [0, 2, 4, 5]]).expect("valid edges")
}

/// Sudoku squares of order `n²` as decompositions of the complete `n`-blowup.
pub fn build_sudoku(n: u32) -> Result<ProblemInstance> {
    let h = sudoku_graph();
    let (spec, g) = complete_blowup(&h, n)?;
    let mut inst = build_partite(&h, &spec, &g)?;
    inst.provenance = format!("sudoku(n={n})");
    Ok(inst)
}

/// Tryst tables on `n` players: nine labels in three teams `{0,1,2}`,
/// `{3,4,5}`, `{6,7,8}` with captains `0, 3, 6`. Colour 0 marks the captains'
/// triple and colour 1 marks a team with its captain on the least label.
pub fn build_tryst(n: u32) -> Result<ProblemInstance> {
    if n < 9 {
        return Err(Error::Precondition(format!("a tryst game needs 9 players, got {n}")));
    }
    let group = PermutationGroup::symmetric(9);
    let vs = VectorSystem::from_fn(group.clone(), 3, 2, &["game"], |_, theta| {
        let mut img = theta.image_set();
        img.sort_unstable();
        let first = theta.images()[0];
        if img == [0, 3, 6] {
            vec![BigInt::one(), BigInt::zero()]
        } else if img[0] % 3 == 0 && img[1] == img[0] + 1 && img[2] == img[0] + 2 && first == img[0] {
            vec![BigInt::zero(), BigInt::one()]
        } else {
            vec![BigInt::zero(), BigInt::zero()]
        }
    })?;
    let phi = LabelledComplex::complete(9, n);
    let target = EdgeVector::constant(2, phi.level(3), &[BigInt::one(), BigInt::one()]);
    Ok(ProblemInstance { phi, group, vs, target, provenance: format!("tryst(n={n})") })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TrystRegularity {
    /// Per label set and nonzero type: how many 9-maps give that type at a fixed map.
    pub counts: Vec<(u32, usize, BigInt)>,
    /// `6·(n−3)_6`, the count the uniform weighting needs everywhere.
    pub expected: BigInt,
    pub regular: bool,
}

/// Counts, for every label triple and nonzero type, the embeddings whose
/// atom at a fixed map has that type. Uniform weights `1/(6·(n−3)_6)` are
/// then an exact fractional decomposition iff every count is `6·(n−3)_6`.
pub fn tryst_regularity(inst: &ProblemInstance) -> TrystRegularity {
    let vs = &inst.vs;
    let n = u64::from(inst.phi.universe());
    let extensions: BigInt = (0..6u64).map(|k| BigInt::from(n - 3 - k)).product();
    let expected = &extensions * 6;
    let mut counts = Vec::new();
    for b in subsets_of_size(full_mask(9), 3) {
        let table = vs.type_table(b);
        let mut per_type: BTreeMap<usize, usize> = BTreeMap::new();
        for theta in vs.group().maps_from(b) {
            *per_type.entry(table.type_of(0, &theta)).or_insert(0) += 1;
        }
        for &t in &table.nonzero {
            let c = per_type.get(&t).copied().unwrap_or(0);
            counts.push((b, t, &extensions * c));
        }
    }
    let regular = counts.iter().all(|(_, _, c)| *c == expected);
    TrystRegularity { counts, expected, regular }
}

/// The twisted octahedron in a rainbow-coloured host.
#[derive(Clone, Debug)]
pub struct TwistedOctahedron {
    pub instance: ProblemInstance,
    /// The signed triangles, unlabelled.
    pub triangles: Multigraph,
    /// Vertex names, indexed by vertex.
    pub names: Vec<&'static str>,
}

const X0: Vertex = 0;
const X1: Vertex = 1;
const Y0: Vertex = 2;
const Y1: Vertex = 3;
const Z0: Vertex = 4;
const Z1: Vertex = 5;
const WA: Vertex = 6;
const WB: Vertex = 7;

fn host_colours() -> Vec<(Vertex, Vertex, u32)> {
    let mut c = Vec::new();
    for y in [Y0, Y1] {
        for z in [Z0, Z1] {
            c.push((y, z, 1));
        }
        c.push((X0, y, 2));
        c.push((X1, y, 3));
    }
    for z in [Z0, Z1] {
        c.push((X1, z, 2));
        c.push((X0, z, 3));
    }
    for x in [X0, X1] {
        c.push((x, WA, 4));
        c.push((x, WB, 4));
    }
    for y in [Y0, Y1] {
        c.push((y, WA, 5));
        c.push((y, WB, 6));
    }
    for z in [Z0, Z1] {
        c.push((z, WA, 6));
        c.push((z, WB, 5));
    }
    c
}

/// Triangles of a rainbow `K_4` whose pair `(a, b)` of labels must land on
/// colour `b(ab)`, hosted on an octahedron `x₀x₁ | y₀y₁ | z₀z₁` plus two apexes
/// that complete each octahedron triangle to a rainbow `K_4`. The target is
/// `±1` on the octahedron triangles with sign `(−1)^{i+j+k}`.
pub fn build_twisted_octahedron() -> Result<TwistedOctahedron> {
    let required: Vec<(Label, Label, u32)> = vec![(0, 1, 3), (0, 2, 2), (1, 2, 1), (0, 3, 4), (1, 3, 5), (2, 3, 6)];
    let rule = Rule { domains: vec![None; 4], pairs: Some(PairRule { colours: host_colours(), required }) };
    let phi = LabelledComplex::generated(full_mask(4), 8, rule)?;
    let group = PermutationGroup::trivial(4);
    let vs = VectorSystem::from_fn(group.clone(), 3, 1, &["K4"], |_, _| vec![BigInt::one()])?;
    let mut triangles = Multigraph::new(8, 3);
    for (i, x) in [X0, X1].into_iter().enumerate() {
        for (j, y) in [Y0, Y1].into_iter().enumerate() {
            for (k, z) in [Z0, Z1].into_iter().enumerate() {
                triangles.add(&[x, y, z], if (i + j + k) % 2 == 0 { 1 } else { -1 })?;
            }
        }
    }
    let target = lift(&phi, &triangles);
    let instance = ProblemInstance { phi, group, vs, target, provenance: "twisted_octahedron".into() };
    Ok(TwistedOctahedron { instance, triangles, names: vec!["x0", "x1", "y0", "y1", "z0", "z1", "wa", "wb"] })
}

/// The invariant on triangles through `y₀z₀`: the third vertex contributes to
/// coordinate 1, 2, 3 or 4 as its colours to `(y₀, z₀)` are `(2,3)`, `(3,2)`,
/// `(5,6)` or `(6,5)`.
pub fn octahedron_invariant(j: &EdgeVector) -> [BigInt; 4] {
    let colours: BTreeMap<(Vertex, Vertex), u32> =
        host_colours().into_iter().flat_map(|(u, v, c)| [((u, v), c), ((v, u), c)]).collect();
    let mut out: [BigInt; 4] = Default::default();
    for (psi, v) in j.iter() {
        let img = psi.image_set();
        if img.len() != 3 || !img.contains(&Y0) || !img.contains(&Z0) {
            continue;
        }
        let x = img.into_iter().find(|&w| w != Y0 && w != Z0).expect("three vertices");
        let key = (colours.get(&(x, Y0)).copied(), colours.get(&(x, Z0)).copied());
        let slot = match key {
            (Some(2), Some(3)) => 0,
            (Some(3), Some(2)) => 1,
            (Some(5), Some(6)) => 2,
            (Some(6), Some(5)) => 3,
            _ => continue,
        };
        out[slot] += &v[0];
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RainbowMode {
    /// Every rainbow colouring of `K^r_q` is allowed.
    All,
    /// Only the colouring that gives each `r`-set its own colour.
    Fixed,
}

/// `[C(q,r)]K^r_n` decomposed into rainbow copies of `K^r_q`. Colour `d` is
/// the `d`-th `r`-subset of `[q]` in lexicographic order. In `All` mode one
/// copy per colouring class under relabelling suffices, since relabelled
/// colourings give the same molecules.
pub fn build_rainbow(q: usize, r: usize, n: u32, mode: RainbowMode) -> Result<ProblemInstance> {
    if r == 0 || r > q || (n as usize) < q {
        return Err(Error::Precondition(format!("need 0 < r ≤ q ≤ n, got r={r}, q={q}, n={n}")));
    }
    let labels: Vec<Vertex> = (0..q as Vertex).collect();
    let sets = combinations(&labels, r);
    let dim = sets.len();
    let colourings: Vec<Vec<usize>> = match mode {
        RainbowMode::Fixed => vec![(0..dim).collect()],
        RainbowMode::All => {
            if dim > 8 {
                return Err(Error::Precondition(format!("{dim} colours is too many to enumerate colourings")));
            }
            let pos: BTreeMap<&Vec<Vertex>, usize> = sets.iter().enumerate().map(|(i, s)| (s, i)).collect();
            let relabellings: Vec<Vec<usize>> = permutations(&labels)
                .into_iter()
                .map(|p| {
                    sets.iter()
                        .map(|s| {
                            let mut t: Vec<Vertex> = s.iter().map(|&x| p[x as usize]).collect();
                            t.sort_unstable();
                            pos[&t]
                        })
                        .collect()
                })
                .collect();
            let idx: Vec<Vertex> = (0..dim as Vertex).collect();
            let mut classes = BTreeSet::new();
            for c in permutations(&idx) {
                let canon = relabellings
                    .iter()
                    .map(|m| {
                        let mut d = vec![0; dim];
                        for (s, &col) in c.iter().enumerate() {
                            d[m[s]] = col as usize;
                        }
                        d
                    })
                    .min()
                    .expect("nonempty group");
                classes.insert(canon);
            }
            classes.into_iter().collect()
        }
    };
    let names: Vec<String> = colourings.iter().map(|c| format!("{c:?}")).collect();
    let name_refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let group = PermutationGroup::symmetric(q);
    let vs = VectorSystem::from_fn(group.clone(), r, dim, &name_refs, |copy, theta| {
        let mut img = theta.image_set();
        img.sort_unstable();
        let s = sets.iter().position(|x| *x == img).expect("an r-subset of [q]");
        let mut v = vec![BigInt::zero(); dim];
        v[colourings[copy][s]] = BigInt::one();
        v
    })?;
    let phi = LabelledComplex::complete(q, n);
    let target = EdgeVector::constant(dim, phi.level(r), &vec![BigInt::one(); dim]);
    let tag = match mode {
        RainbowMode::All => "all",
        RainbowMode::Fixed => "fixed",
    };
    Ok(ProblemInstance { phi, group, vs, target, provenance: format!("rainbow(q={q}, r={r}, n={n}, mode={tag})") })
}

/// An `r`-graph whose edges carry orientations: each edge is an ordering of
/// its vertices, and orderings differing by an even permutation agree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrientedGraph {
    pub n: u32,
    pub r: usize,
    pub edges: Vec<Vec<Vertex>>,
}

fn parity(t: &[Vertex]) -> bool {
    let mut odd = false;
    for i in 0..t.len() {
        for j in i + 1..t.len() {
            if t[i] > t[j] {
                odd = !odd;
            }
        }
    }
    odd
}

impl OrientedGraph {
    /// Each edge's vertex set with the parity of its orientation.
    pub fn classes(&self) -> Result<BTreeMap<Vec<Vertex>, bool>> {
        let mut out = BTreeMap::new();
        for t in &self.edges {
            let mut s = t.clone();
            s.sort_unstable();
            if s.len() != self.r || s.windows(2).any(|w| w[0] == w[1]) || s.iter().any(|&v| v >= self.n) {
                return Err(Error::Orientation(format!("{t:?} is not an ordered {}-set of [0, {})", self.r, self.n)));
            }
            let p = parity(t);
            if out.insert(s, p).is_some_and(|old| old != p) {
                return Err(Error::Orientation(format!("{t:?} appears with both orientations")));
            }
        }
        Ok(out)
    }

    /// The same edges with every orientation flipped.
    pub fn reversed(&self) -> OrientedGraph {
        let edges = self
            .edges
            .iter()
            .map(|t| {
                let mut t = t.clone();
                if t.len() >= 2 {
                    t.swap(0, 1);
                }
                t
            })
            .collect();
        OrientedGraph { n: self.n, r: self.r, edges }
    }
}

/// Oriented `H`-decomposition of `G`: a map counts when listing its image in
/// increasing label order gives a correctly oriented edge.
pub fn build_oriented(h: &OrientedGraph, g: &OrientedGraph) -> Result<ProblemInstance> {
    let (hc, gc) = (h.classes()?, g.classes()?);
    let (q, r) = (h.n as usize, h.r);
    if g.r != r || (g.n as usize) < q {
        return Err(Error::Precondition("H and G need the same uniformity and G at least as many vertices".into()));
    }
    let oriented = |cls: &BTreeMap<Vec<Vertex>, bool>, m: &Injection| {
        let mut s = m.image_set();
        s.sort_unstable();
        cls.get(&s).is_some_and(|&p| p == parity(m.images()))
    };
    let group = PermutationGroup::symmetric(q);
    let vs = VectorSystem::from_fn(group.clone(), r, 1, &["H"], |_, theta| vec![BigInt::from(u8::from(oriented(&hc, theta)))])?;
    let phi = LabelledComplex::complete(q, g.n);
    let mut target = EdgeVector::new(1);
    for e in gc.keys() {
        for p in permutations(e) {
            for b in subsets_of_size(full_mask(q), r) {
                let psi = Injection::from_pairs(&label_iter(b).zip(p.iter().copied()).collect::<Vec<_>>())?;
                if oriented(&gc, &psi) {
                    target.add_at(&psi, &[BigInt::one()], &BigInt::one());
                }
            }
        }
    }
    Ok(ProblemInstance { phi, group, vs, target, provenance: format!("oriented(q={q}, r={r}, n={})", g.n) })
}
