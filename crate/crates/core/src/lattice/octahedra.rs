//! Octahedra `B(2)` in a complex, their symmetric signed characteristic
//! vectors, symmetry of vectors over `Φ_B` and the octahedral span.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::linalg::{ColumnEchelon, IntMatrix};
use super::membership::null_check;
use crate::complex::{label_iter, Injection, Label, LabelSet, LabelledComplex, Vertex};
use crate::error::{Error, Result};
use crate::vsys::{EdgeVector, VectorSystem};

/// An embedding of `B(2)`: two distinct vertices per label of `B`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Octahedron {
    b: LabelSet,
    pairs: Vec<(Vertex, Vertex)>,
}

impl Octahedron {
    /// Fails unless all `2^|B|` transversals lie in `Φ` and the vertices are distinct.
    pub fn new(phi: &LabelledComplex, b: LabelSet, pairs: Vec<(Vertex, Vertex)>) -> Result<Self> {
        let labels: Vec<Label> = label_iter(b).collect();
        if labels.len() != pairs.len() {
            return Err(Error::InvalidBase(format!("{} vertex pairs for {} labels", pairs.len(), labels.len())));
        }
        let mut seen = BTreeSet::new();
        for &(u, w) in &pairs {
            if !seen.insert(u) || !seen.insert(w) {
                return Err(Error::InvalidBase("octahedron vertices must be distinct".into()));
            }
        }
        let oct = Octahedron { b, pairs };
        if let Some((m, _)) = oct.transversals().into_iter().find(|(m, _)| !phi.contains(m)) {
            return Err(Error::InvalidBase(format!("{m} is not in the complex")));
        }
        Ok(oct)
    }

    pub fn labels(&self) -> LabelSet {
        self.b
    }

    pub fn pairs(&self) -> &[(Vertex, Vertex)] {
        &self.pairs
    }

    /// The maps `ψ*ψ` for `ψ ∈ O^B_B` with their signs `s(ψ)`.
    pub fn transversals(&self) -> Vec<(Injection, i32)> {
        let labels: Vec<Label> = label_iter(self.b).collect();
        (0u32..1 << labels.len())
            .map(|choice| {
                let pairs: Vec<(Label, Vertex)> = labels
                    .iter()
                    .zip(&self.pairs)
                    .enumerate()
                    .map(|(i, (&l, &(u, w)))| (l, if choice >> i & 1 == 0 { u } else { w }))
                    .collect();
                let sign = if choice.count_ones() % 2 == 0 { 1 } else { -1 };
                (Injection::from_pairs(&pairs).expect("distinct vertices"), sign)
            })
            .collect()
    }
}

/// All octahedra at `b`, one per choice of unordered vertex pairs (the first
/// vertex of each pair is the smaller; swapping only negates the vector).
pub fn octahedra(phi: &LabelledComplex, b: LabelSet) -> Vec<Octahedron> {
    fn rec(
        phi: &LabelledComplex,
        labels: &[Label],
        verts: &[Vertex],
        partial: &mut Vec<Injection>,
        pairs: &mut Vec<(Vertex, Vertex)>,
        b: LabelSet,
        out: &mut Vec<Octahedron>,
    ) {
        let i = pairs.len();
        if i == labels.len() {
            out.push(Octahedron { b, pairs: pairs.clone() });
            return;
        }
        let l = labels[i];
        let used: BTreeSet<Vertex> = pairs.iter().flat_map(|&(u, w)| [u, w]).collect();
        for &u in verts.iter().filter(|v| !used.contains(v)) {
            for &w in verts.iter().filter(|&&v| v > u && !used.contains(&v)) {
                let mut next = Vec::with_capacity(partial.len() * 2);
                let ok = partial.iter().all(|m| {
                    let (a, c) = (m.with(l, u), m.with(l, w));
                    let fine = phi.contains(&a) && phi.contains(&c);
                    next.push(a);
                    next.push(c);
                    fine
                });
                if ok {
                    let saved = std::mem::replace(partial, next);
                    pairs.push((u, w));
                    rec(phi, labels, verts, partial, pairs, b, out);
                    pairs.pop();
                    *partial = saved;
                }
            }
        }
    }
    let labels: Vec<Label> = label_iter(b).collect();
    let verts = phi.vertices();
    let mut out = Vec::new();
    rec(phi, &labels, &verts, &mut vec![Injection::empty()], &mut Vec::new(), b, &mut out);
    out
}

/// `χ(v,ψ*)` with `χ_{ψ*ψτ} = s(ψ)·vτ` for `τ ∈ Σ^B_B`; `v` has `|Σ^B|·D` coordinates.
pub fn octahedron_vector(vs: &VectorSystem, oct: &Octahedron, v: &[BigInt]) -> Result<EdgeVector> {
    let b = oct.labels();
    let width = vs.type_table(b).sigma.len() * vs.dim();
    if v.len() != width {
        return Err(Error::DomainMismatch(format!("expected {width} coordinates, got {}", v.len())));
    }
    let mut out = EdgeVector::new(width);
    let autos = vs.group().restricted_maps(b, b);
    for (m, sign) in oct.transversals() {
        for tau in &autos {
            out.add_at(&m.compose(tau), &vs.act(b, v, tau), &BigInt::from(sign));
        }
    }
    Ok(out)
}

/// `v_ψ τ = v_{ψτ}` for every `ψ ∈ Φ_B` and `τ ∈ Σ^B_B`.
pub fn is_symmetric(vs: &VectorSystem, b: LabelSet, v: &EdgeVector) -> bool {
    let autos = vs.group().restricted_maps(b, b);
    v.iter().all(|(m, x)| m.dom() == b && autos.iter().all(|tau| v.value(&m.compose(tau)) == vs.act(b, x, tau)))
}

/// `f_B(J)_ψ = (J_{ψσ})_{σ ∈ Σ^B}` for `J` supported on the class of `b`.
pub fn fold(vs: &VectorSystem, b: LabelSet, j: &EdgeVector) -> EdgeVector {
    let table = vs.type_table(b);
    let mut at: BTreeSet<Injection> = BTreeSet::new();
    for m in j.support() {
        for s in table.sigma.iter().filter(|s| s.dom() == m.dom()) {
            at.insert(m.compose(&s.inverse()));
        }
    }
    let mut out = EdgeVector::new(table.sigma.len() * vs.dim());
    let one = BigInt::from(1);
    for psi in at {
        out.add_at(&psi, &vs.orbit_coordinates(j, &psi), &one);
    }
    out
}

/// Inverse of [`fold`] on symmetric vectors; `None` when the entries disagree.
pub fn unfold(vs: &VectorSystem, b: LabelSet, v: &EdgeVector) -> Option<EdgeVector> {
    let table = vs.type_table(b);
    let d = vs.dim();
    let mut vals: BTreeMap<Injection, Vec<BigInt>> = BTreeMap::new();
    for (psi, x) in v.iter() {
        for (k, s) in table.sigma.iter().enumerate() {
            let piece = x[k * d..(k + 1) * d].to_vec();
            match vals.get(&psi.compose(s)) {
                Some(old) if *old != piece => return None,
                Some(_) => {}
                None => {
                    vals.insert(psi.compose(s), piece);
                }
            }
        }
    }
    let unfolded = EdgeVector::from_entries(d, vals).ok()?;
    (fold(vs, b, &unfolded) == *v).then_some(unfolded)
}

/// The integer span of all `χ(e_k, ψ*)` over the octahedra at `b`.
pub struct OctahedralSpan {
    b: LabelSet,
    width: usize,
    octahedra: Vec<Octahedron>,
    /// Per column: octahedron index, coordinate `k`, sign.
    columns: Vec<(usize, usize, i32)>,
    rows: HashMap<(Injection, usize), usize>,
    echelon: ColumnEchelon,
}

impl OctahedralSpan {
    pub fn new(phi: &LabelledComplex, vs: &VectorSystem, b: LabelSet) -> Self {
        let octs = octahedra(phi, b);
        let width = vs.type_table(b).sigma.len() * vs.dim();
        let mut seen: BTreeMap<Vec<((Injection, usize), BigInt)>, (usize, usize, i32)> = BTreeMap::new();
        for (oi, oct) in octs.iter().enumerate() {
            for k in 0..width {
                let mut e = vec![BigInt::zero(); width];
                e[k] = BigInt::from(1);
                let chi = octahedron_vector(vs, oct, &e).expect("width matches");
                let mut col: Vec<((Injection, usize), BigInt)> = chi
                    .iter()
                    .flat_map(|(m, x)| x.iter().enumerate().filter(|(_, y)| !y.is_zero()).map(move |(c, y)| ((m.clone(), c), y.clone())))
                    .collect();
                let sign = if col.first().is_some_and(|(_, y)| y.is_negative()) { -1 } else { 1 };
                if sign < 0 {
                    col.iter_mut().for_each(|(_, y)| *y = -std::mem::take(y));
                }
                seen.entry(col).or_insert((oi, k, sign));
            }
        }
        let mut rows = HashMap::new();
        for col in seen.keys() {
            for (key, _) in col {
                let n = rows.len();
                rows.entry(key.clone()).or_insert(n);
            }
        }
        let mut z = IntMatrix::zeros(rows.len(), seen.len());
        let mut columns = Vec::with_capacity(seen.len());
        for (j, (col, who)) in seen.into_iter().enumerate() {
            for (key, y) in col {
                z[(rows[&key], j)] = y;
            }
            columns.push(who);
        }
        OctahedralSpan { b, width, octahedra: octs, columns, rows, echelon: ColumnEchelon::new(&z) }
    }

    pub fn octahedra(&self) -> &[Octahedron] {
        &self.octahedra
    }

    pub fn generator_count(&self) -> usize {
        self.columns.len()
    }

    /// Coefficient vectors `v` per octahedron with `Σ χ(v,ψ*) = j`.
    pub fn solve(&self, j: &EdgeVector) -> Option<Vec<(Octahedron, Vec<BigInt>)>> {
        if j.dim() != self.width || j.support().any(|m| m.dom() != self.b) {
            return None;
        }
        let mut target = vec![BigInt::zero(); self.rows.len()];
        for (m, x) in j.iter() {
            for (c, y) in x.iter().enumerate().filter(|(_, y)| !y.is_zero()) {
                target[*self.rows.get(&(m.clone(), c))?] = y.clone();
            }
        }
        let x = self.echelon.solve(&target)?;
        let mut per: BTreeMap<usize, Vec<BigInt>> = BTreeMap::new();
        for (&(oi, k, sign), c) in self.columns.iter().zip(x) {
            if !c.is_zero() {
                per.entry(oi).or_insert_with(|| vec![BigInt::zero(); self.width])[k] += c * sign;
            }
        }
        Some(per.into_iter().map(|(oi, v)| (self.octahedra[oi].clone(), v)).collect())
    }

    pub fn contains(&self, j: &EdgeVector) -> bool {
        self.solve(j).is_some()
    }
}

/// A lattice basis of the symmetric null vectors in `(γ^B)^{Φ_B}`.
pub fn symmetric_null_basis(phi: &LabelledComplex, vs: &VectorSystem, b: LabelSet) -> Vec<EdgeVector> {
    let table = vs.type_table(b);
    let width = table.sigma.len() * vs.dim();
    let autos = vs.group().restricted_maps(b, b);
    let mut reps: BTreeSet<Injection> = BTreeSet::new();
    for psi in phi.maps(b) {
        let rep = autos.iter().map(|tau| psi.compose(tau)).min().expect("identity is present");
        reps.insert(rep);
    }
    let mut gens: Vec<EdgeVector> = Vec::new();
    for rep in &reps {
        for &t in &table.nonzero {
            let mut g = EdgeVector::new(width);
            for tau in &autos {
                g.add_at(&rep.compose(tau), &vs.act(b, &table.vectors[t], tau), &BigInt::from(1));
            }
            gens.push(g);
        }
    }
    // Null constraints: every restriction to a facet of `b` sums to zero.
    let mut rows: HashMap<(Injection, usize), usize> = HashMap::new();
    let mut entries: Vec<(usize, usize, BigInt)> = Vec::new();
    for (j, g) in gens.iter().enumerate() {
        for (m, x) in g.iter() {
            for l in label_iter(b) {
                let face = m.without(l);
                for (c, y) in x.iter().enumerate().filter(|(_, y)| !y.is_zero()) {
                    let n = rows.len();
                    let i = *rows.entry((face.clone(), c)).or_insert(n);
                    entries.push((i, j, y.clone()));
                }
            }
        }
    }
    let mut z = IntMatrix::zeros(rows.len().max(1), gens.len());
    for (i, j, y) in entries {
        z[(i, j)] += y;
    }
    ColumnEchelon::new(&z)
        .kernel_basis()
        .into_iter()
        .map(|k| {
            let mut v = EdgeVector::new(width);
            for (c, g) in k.iter().zip(&gens) {
                v.add_scaled(g, c);
            }
            debug_assert!(null_check(&v, b.count_ones() as usize - 1));
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symmetry::PermutationGroup;

    fn b(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn kr(group: PermutationGroup, r: usize) -> VectorSystem {
        VectorSystem::from_fn(group, r, 1, &["K"], |_, _| vec![b(1)]).unwrap()
    }

    #[test]
    fn edge_octahedron_signs() {
        let vs = kr(PermutationGroup::symmetric(2), 2);
        let phi = LabelledComplex::complete(2, 4);
        let oct = Octahedron::new(&phi, 0b11, vec![(0, 1), (2, 3)]).unwrap();
        let chi = octahedron_vector(&vs, &oct, &[b(1), b(1)]).unwrap();
        assert_eq!(chi.len(), 8);
        for (m, x) in chi.iter() {
            let parity = m.images().iter().filter(|&&v| v == 1 || v == 3).count();
            let s = if parity % 2 == 0 { b(1) } else { b(-1) };
            assert_eq!(x, &vec![s.clone(), s]);
        }
        assert!(is_symmetric(&vs, 0b11, &chi));
        assert!(null_check(&chi, 1));
        assert!(octahedron_vector(&vs, &oct, &[b(0), b(0)]).unwrap().is_zero());
    }

    #[test]
    fn trivial_group_is_plain_signed_vector() {
        let vs = kr(PermutationGroup::trivial(2), 2);
        let phi = LabelledComplex::complete(2, 4);
        let oct = Octahedron::new(&phi, 0b11, vec![(0, 1), (2, 3)]).unwrap();
        let chi = octahedron_vector(&vs, &oct, &[b(3)]).unwrap();
        assert_eq!(chi.len(), 4);
        for (m, sign) in oct.transversals() {
            assert_eq!(chi.value(&m), vec![b(3 * i64::from(sign))]);
        }
    }

    #[test]
    fn invalid_embeddings() {
        let phi = LabelledComplex::partite(vec![vec![0, 1], vec![2, 3]], 4).unwrap();
        assert!(Octahedron::new(&phi, 0b11, vec![(0, 1), (2, 3)]).is_ok());
        assert!(matches!(Octahedron::new(&phi, 0b11, vec![(0, 2), (1, 3)]), Err(Error::InvalidBase(_))));
        assert!(matches!(Octahedron::new(&phi, 0b11, vec![(0, 1), (1, 3)]), Err(Error::InvalidBase(_))));
        assert_eq!(octahedra(&phi, 0b11).len(), 1);
        assert_eq!(octahedra(&LabelledComplex::complete(2, 4), 0b11).len(), 6);
    }

    #[test]
    fn fold_round_trip() {
        let vs = kr(PermutationGroup::symmetric(3), 2);
        let phi = LabelledComplex::complete(3, 5);
        let m = vs.molecule(&phi, 0, &Injection::from_pairs(&[(0, 0), (1, 2), (2, 4)]).unwrap()).unwrap();
        let pairs: EdgeVector = EdgeVector::from_entries(1, m.iter().map(|(k, v)| (k.clone(), v.clone()))).unwrap();
        let f = fold(&vs, 0b011, &pairs);
        assert!(is_symmetric(&vs, 0b011, &f));
        assert_eq!(unfold(&vs, 0b011, &f).unwrap(), pairs);
        let lone = EdgeVector::from_entries(6, [(Injection::from_pairs(&[(0, 0), (1, 1)]).unwrap(), vec![b(1); 6])]).unwrap();
        assert!(!is_symmetric(&vs, 0b011, &lone));
        assert!(unfold(&vs, 0b011, &lone).is_none());
    }

    #[test]
    fn symmetric_null_vectors_are_octahedral() {
        for (group, n) in [(PermutationGroup::symmetric(2), 5), (PermutationGroup::trivial(2), 5), (PermutationGroup::symmetric(3), 6), (PermutationGroup::trivial(3), 6)] {
            let r = group.degree();
            let vs = kr(group, r);
            let phi = LabelledComplex::complete(r, n);
            let bset = crate::complex::full_mask(r);
            let span = OctahedralSpan::new(&phi, &vs, bset);
            let basis = symmetric_null_basis(&phi, &vs, bset);
            assert!(!basis.is_empty());
            for v in &basis {
                assert!(is_symmetric(&vs, bset, v));
                assert!(null_check(v, r - 1));
                let parts = span.solve(v).expect("octahedral");
                let mut back = EdgeVector::new(v.dim());
                for (oct, c) in &parts {
                    back = back.plus(&octahedron_vector(&vs, oct, c).unwrap());
                }
                assert_eq!(&back, v);
            }
        }
    }
}
