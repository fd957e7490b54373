//! Concrete decomposition problems expressed as instances over labelled
//! complexes, their divisibility conditions, and reductions with decoders.

mod conditions;
mod reductions;
mod structures;
mod typicality;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::complex::{mask_of, subsets_of_size, Injection, Label, LabelledComplex, Vertex};
use crate::error::{Error, Result};
use crate::lattice::{integer_solve, IntMatrix};
use crate::symmetry::{adaptedness_violation, PermutationGroup};
use crate::vsys::{EdgeVector, VectorSystem};

pub use conditions::{
    binomial, complete_resolution_divisible, design_divisible, large_set_divisible, rainbow_divisible, resolvable_divisible,
};
pub use reductions::{
    reduce_complete_resolution, reduce_large_set, reduce_resolvable, verify_complete_resolution, verify_large_set,
    verify_resolvable, Decoded, Decoder, Reduction,
};
pub use structures::{
    build_latin, build_oriented, build_rainbow, build_sudoku, build_tryst, build_twisted_octahedron, complete_blowup,
    octahedron_invariant, sudoku_graph, tryst_regularity, OrientedGraph, RainbowMode, TrystRegularity, TwistedOctahedron,
};
pub use typicality::{inclusion_matrix, inclusion_rank, measure_partite_typicality, measure_typicality, Typicality};

/// An `r`-multigraph on `0..n`; edges are sorted vertex lists.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Multigraph {
    n: u32,
    r: usize,
    edges: BTreeMap<Vec<Vertex>, i64>,
}

impl Multigraph {
    pub fn new(n: u32, r: usize) -> Self {
        Multigraph { n, r, edges: BTreeMap::new() }
    }

    pub fn from_edges<E: AsRef<[Vertex]>>(n: u32, r: usize, edges: impl IntoIterator<Item = E>) -> Result<Self> {
        let mut g = Self::new(n, r);
        for e in edges {
            g.add(e.as_ref(), 1)?;
        }
        Ok(g)
    }

    /// `λ` copies of every `r`-subset of `0..n`.
    pub fn complete(n: u32, r: usize, lambda: i64) -> Self {
        let mut g = Self::new(n, r);
        for e in combinations(&(0..n).collect::<Vec<_>>(), r) {
            g.edges.insert(e, lambda);
        }
        g.edges.retain(|_, m| *m != 0);
        g
    }

    pub fn add(&mut self, edge: &[Vertex], mult: i64) -> Result<()> {
        let mut e = edge.to_vec();
        e.sort_unstable();
        if e.len() != self.r || e.windows(2).any(|w| w[0] == w[1]) || e.iter().any(|&v| v >= self.n) {
            return Err(Error::Parse(format!("{edge:?} is not an {}-subset of [0, {})", self.r, self.n)));
        }
        let m = self.edges.entry(e.clone()).or_insert(0);
        *m += mult;
        if *m == 0 {
            self.edges.remove(&e);
        }
        Ok(())
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn multiplicity(&self, edge: &[Vertex]) -> i64 {
        let mut e = edge.to_vec();
        e.sort_unstable();
        self.edges.get(&e).copied().unwrap_or(0)
    }

    /// Distinct edges with their multiplicities.
    pub fn edges(&self) -> impl Iterator<Item = (&Vec<Vertex>, i64)> {
        self.edges.iter().map(|(e, &m)| (e, m))
    }

    pub fn contains(&self, edge: &[Vertex]) -> bool {
        self.multiplicity(edge) != 0
    }

    /// Sum of multiplicities.
    pub fn size(&self) -> i64 {
        self.edges.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// `|G(f)|`: total multiplicity of edges containing `f`.
    pub fn degree(&self, f: &[Vertex]) -> i64 {
        self.edges.iter().filter(|(e, _)| f.iter().all(|v| e.binary_search(v).is_ok())).map(|(_, m)| m).sum()
    }

    /// Degrees of every `i`-set lying in some edge.
    pub fn degrees(&self, i: usize) -> BTreeMap<Vec<Vertex>, i64> {
        let mut out = BTreeMap::new();
        for (e, m) in &self.edges {
            for f in combinations(e, i) {
                *out.entry(f).or_insert(0) += m;
            }
        }
        out
    }

    /// Every set of fewer than `r` vertices has degree zero.
    pub fn is_null(&self) -> bool {
        (0..self.r).all(|i| self.degrees(i).values().all(|&d| d == 0))
    }

    /// The same edges on a larger vertex range.
    pub fn widened(&self, n: u32) -> Self {
        Multigraph { n: n.max(self.n), r: self.r, edges: self.edges.clone() }
    }

    fn vertex_degrees(&self) -> Vec<i64> {
        let mut d = vec![0; self.n as usize];
        for (e, m) in &self.edges {
            for &v in e {
                d[v as usize] += m;
            }
        }
        d
    }

    pub fn is_vertex_regular(&self) -> bool {
        let d = self.vertex_degrees();
        d.windows(2).all(|w| w[0] == w[1])
    }
}

/// All `k`-subsets of `items`, in lexicographic order of positions.
pub(crate) fn combinations(items: &[Vertex], k: usize) -> Vec<Vec<Vertex>> {
    fn go(items: &[Vertex], k: usize, start: usize, cur: &mut Vec<Vertex>, out: &mut Vec<Vec<Vertex>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            if items.len() - i < k - cur.len() {
                break;
            }
            cur.push(items[i]);
            go(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= items.len() {
        go(items, k, 0, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

/// All orderings of `items`.
pub(crate) fn permutations(items: &[Vertex]) -> Vec<Vec<Vertex>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

/// A decomposition problem: decompose `target` into molecules of `vs` over `phi`.
#[derive(Clone, Debug)]
pub struct ProblemInstance {
    pub phi: LabelledComplex,
    pub group: PermutationGroup,
    pub vs: VectorSystem,
    pub target: EdgeVector,
    /// Which builder or reduction produced the instance, with its parameters.
    pub provenance: String,
}

impl ProblemInstance {
    /// Checks adaptedness up to level `r` and that the target lives on `Φ_r`.
    pub fn validate(&self) -> Result<()> {
        if self.group.support() != self.phi.labels() || self.vs.group().support() != self.phi.labels() {
            return Err(Error::DomainMismatch("complex, group and system disagree on labels".into()));
        }
        if let Some((m, tau)) = adaptedness_violation(&self.phi, &self.group, self.vs.r()) {
            return Err(Error::NotAdapted(format!("{m} composed with {tau} leaves the complex")));
        }
        if self.target.dim() != self.vs.dim() {
            return Err(Error::DomainMismatch("target and system have different colour counts".into()));
        }
        for psi in self.target.support() {
            if psi.len() != self.vs.r() || !self.phi.contains(psi) {
                return Err(Error::InvalidEmbedding(format!("target coordinate {psi} is not in level {}", self.vs.r())));
            }
        }
        Ok(())
    }
}

/// Label parts `P` of `[q]` with matching vertex parts `Q`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionSpec {
    pub parts: Vec<Vec<Label>>,
    pub vertex_parts: Vec<Vec<Vertex>>,
}

impl PartitionSpec {
    pub fn new(parts: Vec<Vec<Label>>, vertex_parts: Vec<Vec<Vertex>>) -> Result<Self> {
        let spec = PartitionSpec { parts, vertex_parts };
        spec.check()?;
        Ok(spec)
    }

    /// Each label on its own, with vertex part `i` for label `i`.
    pub fn singletons(vertex_parts: Vec<Vec<Vertex>>) -> Result<Self> {
        Self::new((0..vertex_parts.len() as Label).map(|l| vec![l]).collect(), vertex_parts)
    }

    fn check(&self) -> Result<()> {
        if self.parts.len() != self.vertex_parts.len() {
            return Err(Error::Precondition("label and vertex partitions have different lengths".into()));
        }
        let mut seen = 0u32;
        for p in &self.parts {
            let m = mask_of(p.iter().copied());
            if m.count_ones() as usize != p.len() || m & seen != 0 {
                return Err(Error::Precondition("label parts must be disjoint".into()));
            }
            seen |= m;
        }
        if seen != crate::complex::full_mask(self.q()) {
            return Err(Error::Precondition(format!("label parts do not cover [{}]", self.q())));
        }
        let mut vs = BTreeSet::new();
        for (p, qv) in self.parts.iter().zip(&self.vertex_parts) {
            for &v in qv {
                if !vs.insert(v) {
                    return Err(Error::Precondition(format!("vertex {v} lies in two parts")));
                }
            }
            if qv.len() < p.len() {
                return Err(Error::Precondition(format!("a vertex part has {} vertices for {} labels", qv.len(), p.len())));
            }
        }
        Ok(())
    }

    pub fn q(&self) -> usize {
        self.parts.iter().map(Vec::len).sum()
    }

    pub fn label_part(&self, l: Label) -> usize {
        self.parts.iter().position(|p| p.contains(&l)).expect("labels are covered")
    }

    /// `i_P(S)` for a set of labels, given as vertices of `H`.
    pub fn label_index(&self, s: &[Vertex]) -> Vec<usize> {
        let mut idx = vec![0; self.parts.len()];
        for &l in s {
            idx[self.label_part(l as Label)] += 1;
        }
        idx
    }

    /// `i_Q(e)`, or `None` when `e` leaves the parts.
    pub fn vertex_index(&self, e: &[Vertex]) -> Option<Vec<usize>> {
        let mut idx = vec![0; self.parts.len()];
        for v in e {
            idx[self.vertex_parts.iter().position(|p| p.contains(v))?] += 1;
        }
        Some(idx)
    }

    fn domains(&self) -> Vec<Vec<Vertex>> {
        (0..self.q() as Label).map(|l| self.vertex_parts[self.label_part(l)].clone()).collect()
    }
}

/// `γ_θ = 1` exactly when the image of `θ` is an edge of `h`.
pub(crate) fn hypergraph_system(group: PermutationGroup, h: &Multigraph) -> Result<VectorSystem> {
    VectorSystem::from_fn(group, h.r(), 1, &["H"], |_, theta| {
        vec![BigInt::from(u8::from(h.contains(&theta.image_set())))]
    })
}

/// `G*_ψ = G_{Im ψ}` for every `ψ ∈ Φ_r` onto an edge of `g`.
pub(crate) fn lift(phi: &LabelledComplex, g: &Multigraph) -> EdgeVector {
    let mut out = EdgeVector::new(1);
    let sets = subsets_of_size(phi.labels(), g.r());
    for (e, m) in g.edges() {
        let m = [BigInt::from(m)];
        for p in permutations(e) {
            for &b in &sets {
                let pairs: Vec<(Label, Vertex)> = crate::complex::label_iter(b).zip(p.iter().copied()).collect();
                let psi = Injection::from_pairs(&pairs).expect("distinct vertices");
                if phi.contains(&psi) {
                    out.add_at(&psi, &m, &BigInt::one());
                }
            }
        }
    }
    out
}

/// `H`-decomposition of `G` over the complete complex with the full symmetric group.
pub fn build_nonpartite(h: &Multigraph, g: &Multigraph) -> Result<ProblemInstance> {
    let q = h.n() as usize;
    if h.r() != g.r() {
        return Err(Error::Precondition(format!("H is {}-uniform but G is {}-uniform", h.r(), g.r())));
    }
    if (g.n() as usize) < q {
        return Err(Error::Precondition(format!("G has {} vertices, fewer than the {q} of H", g.n())));
    }
    let phi = LabelledComplex::complete(q, g.n());
    let group = PermutationGroup::symmetric(q);
    let vs = hypergraph_system(group.clone(), h)?;
    let target = lift(&phi, g);
    Ok(ProblemInstance { phi, group, vs, target, provenance: format!("nonpartite(q={q}, r={}, n={})", h.r(), g.n()) })
}

/// Index vectors of the edges of `h`.
fn edge_indices(h: &Multigraph, spec: &PartitionSpec) -> BTreeSet<Vec<usize>> {
    h.edges().map(|(e, _)| spec.label_index(e)).collect()
}

fn check_blowup(h: &Multigraph, spec: &PartitionSpec, g: &Multigraph) -> Result<BTreeSet<Vec<usize>>> {
    if spec.q() != h.n() as usize {
        return Err(Error::Precondition(format!("the partition covers {} labels but H has {}", spec.q(), h.n())));
    }
    if h.r() != g.r() {
        return Err(Error::Precondition(format!("H is {}-uniform but G is {}-uniform", h.r(), g.r())));
    }
    let allowed = edge_indices(h, spec);
    for (e, _) in g.edges() {
        match spec.vertex_index(e) {
            Some(i) if allowed.contains(&i) => {}
            Some(i) => return Err(Error::BlowupViolation(format!("edge {e:?} has index {i:?}, which no edge of H has"))),
            None => return Err(Error::BlowupViolation(format!("edge {e:?} uses a vertex outside every part"))),
        }
    }
    Ok(allowed)
}

/// Partite `H`-decomposition: part `P_i` of the labels maps into part `Q_i`,
/// and the group is the stabiliser of the label parts.
pub fn build_partite(h: &Multigraph, spec: &PartitionSpec, g: &Multigraph) -> Result<ProblemInstance> {
    check_blowup(h, spec, g)?;
    let group = PermutationGroup::part_stabilizer(spec.parts.clone())?;
    let phi = LabelledComplex::partite(spec.domains(), g.n())?;
    let vs = hypergraph_system(group.clone(), h)?;
    let target = lift(&phi, g);
    let sizes: Vec<usize> = spec.parts.iter().map(Vec::len).collect();
    Ok(ProblemInstance { phi, group, vs, target, provenance: format!("partite(parts={sizes:?}, r={}, n={})", h.r(), g.n()) })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Failure {
    /// The gcd of `H`-degrees of `i`-sets does not divide the degree of `set`.
    Degree { i: usize, set: Vec<Vertex> },
    /// The degree vector of `set` is outside the group generated at `index`.
    Index { set: Vec<Vertex>, index: Vec<usize> },
    /// A binomial divisibility condition fails at level `i`.
    Level { i: usize },
    /// `divisor ∤ value`.
    Divides { divisor: u64, value: u64 },
    /// `n ≢ q` modulo `modulus`.
    Congruence { modulus: u64 },
    /// Fewer vertices than the condition needs.
    TooSmall { n: u64, q: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Divisibility {
    pub divisible: bool,
    pub failing: Option<Failure>,
}

impl Divisibility {
    pub(crate) fn ok() -> Self {
        Divisibility { divisible: true, failing: None }
    }

    pub(crate) fn fail(f: Failure) -> Self {
        Divisibility { divisible: false, failing: Some(f) }
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    num_integer::Integer::gcd(&a, &b)
}

/// `gcd_i(H) | |G(f)|` for every `0 ≤ i < r` and `i`-set `f`.
pub fn check_h_divisible(h: &Multigraph, g: &Multigraph) -> Divisibility {
    let r = h.r();
    let labels: Vec<Vertex> = (0..h.n()).collect();
    for i in 0..r {
        let d = combinations(&labels, i).iter().fold(0, |acc, f| gcd(acc, h.degree(f)));
        for (f, deg) in g.degrees(i) {
            let fails = if d == 0 { deg != 0 } else { deg % d != 0 };
            if fails {
                return Divisibility::fail(Failure::Degree { i, set: f });
            }
        }
    }
    Divisibility::ok()
}

/// `G_I(e) ∈ H^I_{i'}` for every `e` with `i_Q(e) = i'`, largest sets first.
pub fn check_hp_divisible(h: &Multigraph, spec: &PartitionSpec, g: &Multigraph) -> Result<Divisibility> {
    let allowed: Vec<Vec<usize>> = check_blowup(h, spec, g)?.into_iter().collect();
    let pos: HashMap<&Vec<usize>, usize> = allowed.iter().enumerate().map(|(k, i)| (i, k)).collect();
    let r = h.r();
    let mut vectors: BTreeMap<Vec<Vertex>, Vec<i64>> = BTreeMap::new();
    for (e, m) in g.edges() {
        let k = pos[&spec.vertex_index(e).expect("checked blowup")];
        for s in 0..r {
            for f in combinations(e, s) {
                vectors.entry(f).or_insert_with(|| vec![0; allowed.len()])[k] += m;
            }
        }
    }
    let labels: Vec<Vertex> = (0..h.n()).collect();
    let mut gens: HashMap<Vec<usize>, IntMatrix> = HashMap::new();
    for s in (0..r).rev() {
        for (e, v) in vectors.iter().filter(|(e, _)| e.len() == s) {
            let index = spec.vertex_index(e).expect("checked blowup");
            let z = gens.entry(index.clone()).or_insert_with(|| {
                let cols: Vec<Vec<BigInt>> = combinations(&labels, s)
                    .into_iter()
                    .filter(|f| spec.label_index(f) == index)
                    .map(|f| {
                        let mut c = vec![BigInt::zero(); allowed.len()];
                        for (he, _) in h.edges() {
                            if f.iter().all(|x| he.contains(x)) {
                                c[pos[&spec.label_index(he)]] += 1;
                            }
                        }
                        c
                    })
                    .collect();
                IntMatrix::from_columns(allowed.len(), &cols)
            });
            let b: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
            let member = if z.cols() == 0 { b.iter().all(Zero::is_zero) } else { integer_solve(z, &b).is_some() };
            if !member {
                return Ok(Divisibility::fail(Failure::Index { set: e.clone(), index }));
            }
        }
    }
    Ok(Divisibility::ok())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{count_exact, solve_exact, verify, Count, SearchConfig, VerifyMode};

    fn triangle() -> Multigraph {
        Multigraph::complete(3, 2, 1)
    }

    #[test]
    fn multigraph_basics() {
        let mut g = Multigraph::complete(5, 2, 2);
        assert_eq!(g.size(), 20);
        assert_eq!(g.degree(&[0]), 8);
        assert_eq!(g.degree(&[]), 20);
        g.add(&[1, 0], -2).unwrap();
        assert!(!g.contains(&[0, 1]));
        assert!(g.add(&[0, 0], 1).is_err());
        assert!(g.add(&[0, 5], 1).is_err());
        assert_eq!(combinations(&[1, 2, 3, 4], 2).len(), 6);
        assert_eq!(permutations(&[1, 2, 3]).len(), 6);
    }

    #[test]
    fn fano_instance() {
        let inst = build_nonpartite(&triangle(), &Multigraph::complete(7, 2, 1)).unwrap();
        inst.validate().unwrap();
        // Each edge lifts to both orientations on each of the three label pairs.
        assert_eq!(inst.target.len(), 21 * 6);
        let s = solve_exact(&inst.phi, &inst.vs, &inst.target, &SearchConfig::default()).unwrap();
        let sel = s.outcome.found().unwrap();
        assert_eq!(sel.len(), 7);
        assert!(verify(&inst.phi, &inst.vs, sel, &inst.target, VerifyMode::Set).ok);
        assert!(build_nonpartite(&Multigraph::complete(4, 3, 1), &Multigraph::complete(7, 2, 1)).is_err());
        assert!(build_nonpartite(&triangle(), &Multigraph::complete(2, 2, 1)).is_err());
    }

    #[test]
    fn doubled_k4_has_four_triangles() {
        let inst = build_nonpartite(&triangle(), &Multigraph::complete(4, 2, 2)).unwrap();
        let s = solve_exact(&inst.phi, &inst.vs, &inst.target, &SearchConfig::default()).unwrap();
        assert_eq!(s.outcome.found().unwrap().len(), 4);
    }

    #[test]
    fn isolated_vertex_keeps_solvability() {
        let with = Multigraph::from_edges(4, 2, [[0, 1], [0, 2], [1, 2]]).unwrap();
        for n in [6, 7] {
            let g = Multigraph::complete(n, 2, 1);
            let a = build_nonpartite(&triangle(), &g).unwrap();
            let b = build_nonpartite(&with, &g).unwrap();
            let cfg = SearchConfig::default();
            let sa = solve_exact(&a.phi, &a.vs, &a.target, &cfg).unwrap().outcome;
            let sb = solve_exact(&b.phi, &b.vs, &b.target, &cfg).unwrap().outcome;
            assert_eq!(sa.found().is_some(), sb.found().is_some());
            assert_eq!(sa.is_unsat(), sb.is_unsat());
        }
    }

    #[test]
    fn h_divisibility() {
        let k3 = triangle();
        assert!(check_h_divisible(&k3, &Multigraph::complete(7, 2, 1)).divisible);
        let bad = check_h_divisible(&k3, &Multigraph::complete(6, 2, 1));
        assert_eq!(bad.failing, Some(Failure::Degree { i: 1, set: vec![0] }));
        assert!(check_h_divisible(&k3, &Multigraph::complete(5, 2, 3)).divisible);
        assert!(!check_h_divisible(&k3, &Multigraph::complete(5, 2, 1)).divisible);
    }

    fn tripartite(n: u32) -> (PartitionSpec, Multigraph) {
        let parts: Vec<Vec<u32>> = (0..3).map(|p| (p * n..(p + 1) * n).collect()).collect();
        let mut g = Multigraph::new(3 * n, 2);
        for a in 0..3 {
            for b in a + 1..3 {
                for &u in &parts[a] {
                    for &v in &parts[b] {
                        g.add(&[u, v], 1).unwrap();
                    }
                }
            }
        }
        (PartitionSpec::singletons(parts).unwrap(), g)
    }

    #[test]
    fn partite_latin_squares() {
        let (spec, g) = tripartite(3);
        let inst = build_partite(&triangle(), &spec, &g).unwrap();
        inst.validate().unwrap();
        assert_eq!(count_exact(&inst.phi, &inst.vs, &inst.target, &SearchConfig::default()).unwrap(), Count::Exact(12));
        assert!(check_hp_divisible(&triangle(), &spec, &g).unwrap().divisible);

        let mut extra = g.clone();
        extra.add(&[0, 3], 1).unwrap();
        let d = check_hp_divisible(&triangle(), &spec, &extra).unwrap();
        assert!(!d.divisible);
        assert!(matches!(d.failing, Some(Failure::Index { ref set, .. }) if set == &vec![0] || set == &vec![3]));

        let mut inside = g.clone();
        inside.add(&[0, 1], 1).unwrap();
        assert!(matches!(build_partite(&triangle(), &spec, &inside), Err(Error::BlowupViolation(_))));
        assert!(matches!(check_hp_divisible(&triangle(), &spec, &inside), Err(Error::BlowupViolation(_))));
    }

    #[test]
    fn decompositions_are_balanced() {
        // Union of copies of a path from random embeddings into a 3-partite host.
        let path = Multigraph::from_edges(3, 2, [[0, 1], [1, 2]]).unwrap();
        let parts: Vec<Vec<u32>> = vec![vec![0, 1, 2], vec![3, 4, 5], vec![6, 7, 8]];
        let spec = PartitionSpec::singletons(parts).unwrap();
        let mut g = Multigraph::new(9, 2);
        for (a, b, c) in [(0, 3, 6), (1, 3, 7), (2, 5, 6), (0, 4, 8), (0, 3, 6)] {
            g.add(&[a, b], 1).unwrap();
            g.add(&[b, c], 1).unwrap();
        }
        assert!(check_hp_divisible(&path, &spec, &g).unwrap().divisible);
        g.add(&[3, 6], 1).unwrap();
        assert!(!check_hp_divisible(&path, &spec, &g).unwrap().divisible);
    }

    #[test]
    fn bipartition_group() {
        let spec = PartitionSpec::new(vec![vec![0, 1, 2], vec![3]], vec![(0..6).collect(), vec![6, 7]]).unwrap();
        let k4 = Multigraph::complete(4, 2, 1);
        let mut g = Multigraph::new(8, 2);
        for e in combinations(&(0..6).collect::<Vec<_>>(), 2) {
            g.add(&e, 1).unwrap();
        }
        let inst = build_partite(&k4, &spec, &g).unwrap();
        assert_eq!(inst.group.order(), 6);
        assert!(crate::symmetry::is_exactly_adapted(&inst.phi, &inst.group));
        assert!(PartitionSpec::new(vec![vec![0, 1], vec![1, 2]], vec![vec![0, 1], vec![2, 3]]).is_err());
        assert!(PartitionSpec::new(vec![vec![0, 1], vec![2]], vec![vec![0], vec![2, 3]]).is_err());
    }
}
