//! Vector systems over a family of copies of `Σ^≤`: molecules, boundaries,
//! types, atoms, atom decompositions, use and boundedness.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::complex::{full_mask, subsets_of_size, Injection, LabelSet, LabelledComplex};
use crate::error::{Error, Result};
use crate::lattice::linalg::{ColumnEchelon, IntMatrix};
use crate::symmetry::PermutationGroup;

/// A sparse vector in `(ℤ^D)^{Φ_i}`; zero entries are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EdgeVector {
    dim: usize,
    entries: BTreeMap<Injection, Vec<BigInt>>,
}

fn is_zero_vec(v: &[BigInt]) -> bool {
    v.iter().all(Zero::is_zero)
}

impl EdgeVector {
    pub fn new(dim: usize) -> Self {
        EdgeVector { dim, entries: BTreeMap::new() }
    }

    /// Sums the given entries; fails on a value of the wrong dimension.
    pub fn from_entries(dim: usize, entries: impl IntoIterator<Item = (Injection, Vec<BigInt>)>) -> Result<Self> {
        let mut out = EdgeVector::new(dim);
        for (k, v) in entries {
            if v.len() != dim {
                return Err(Error::Parse(format!("value at {k} has {} coordinates, expected {dim}", v.len())));
            }
            out.add_at(&k, &v, &BigInt::from(1));
        }
        Ok(out)
    }

    /// Value `value` (repeated in every colour) on each given map.
    pub fn constant(dim: usize, maps: impl IntoIterator<Item = Injection>, value: &[BigInt]) -> Self {
        let mut out = EdgeVector::new(dim);
        for m in maps {
            out.add_at(&m, value, &BigInt::from(1));
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, psi: &Injection) -> Option<&[BigInt]> {
        self.entries.get(psi).map(Vec::as_slice)
    }

    pub fn value(&self, psi: &Injection) -> Vec<BigInt> {
        self.get(psi).map_or_else(|| vec![BigInt::zero(); self.dim], <[BigInt]>::to_vec)
    }

    pub fn add_at(&mut self, psi: &Injection, v: &[BigInt], coef: &BigInt) {
        if coef.is_zero() || is_zero_vec(v) {
            return;
        }
        let e = self.entries.entry(psi.clone()).or_insert_with(|| vec![BigInt::zero(); v.len()]);
        for (x, y) in e.iter_mut().zip(v) {
            *x += coef * y;
        }
        if is_zero_vec(e) {
            self.entries.remove(psi);
        }
    }

    pub fn add_scaled(&mut self, other: &EdgeVector, coef: &BigInt) {
        for (k, v) in &other.entries {
            self.add_at(k, v, coef);
        }
    }

    pub fn plus(&self, other: &EdgeVector) -> EdgeVector {
        let mut out = self.clone();
        out.add_scaled(other, &BigInt::from(1));
        out
    }

    pub fn minus(&self, other: &EdgeVector) -> EdgeVector {
        let mut out = self.clone();
        out.add_scaled(other, &BigInt::from(-1));
        out
    }

    pub fn scaled(&self, coef: &BigInt) -> EdgeVector {
        let mut out = EdgeVector::new(self.dim);
        out.add_scaled(self, coef);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Injection, &Vec<BigInt>)> {
        self.entries.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &Injection> {
        self.entries.keys()
    }

    /// Entries with negative coordinates somewhere.
    pub fn has_negative(&self) -> bool {
        self.entries.values().any(|v| v.iter().any(Signed::is_negative))
    }

    /// Total of all coordinates.
    pub fn total(&self) -> BigInt {
        self.entries.values().flat_map(|v| v.iter()).sum()
    }

    /// Coordinates `(ψ, d)` where the two vectors differ.
    pub fn diff(&self, other: &EdgeVector) -> Vec<(Injection, usize, BigInt, BigInt)> {
        let keys: BTreeSet<&Injection> = self.entries.keys().chain(other.entries.keys()).collect();
        let mut out = Vec::new();
        for k in keys {
            let a = self.value(k);
            let b = other.value(k);
            for d in 0..self.dim.max(other.dim) {
                let x = a.get(d).cloned().unwrap_or_default();
                let y = b.get(d).cloned().unwrap_or_default();
                if x != y {
                    out.push((k.clone(), d, x, y));
                }
            }
        }
        out
    }
}

/// A sparse integer combination of embeddings `(copy, φ)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Selection {
    entries: BTreeMap<(usize, Injection), BigInt>,
}

impl Selection {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, copy: usize, phi: Injection, coef: BigInt) {
        let key = (copy, phi);
        let e = self.entries.entry(key.clone()).or_insert_with(BigInt::zero);
        *e += coef;
        if e.is_zero() {
            self.entries.remove(&key);
        }
    }

    pub fn get(&self, copy: usize, phi: &Injection) -> BigInt {
        self.entries.get(&(copy, phi.clone())).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(usize, Injection), &BigInt)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// True if every coefficient is 1.
    pub fn is_set(&self) -> bool {
        self.entries.values().all(|c| *c == BigInt::from(1))
    }

    pub fn remove(&mut self, copy: usize, phi: &Injection) -> Option<BigInt> {
        self.entries.remove(&(copy, phi.clone()))
    }
}

/// One copy of `Σ^≤` in the family, with its sparse coefficients on `A_r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Copy {
    pub name: String,
    gamma: BTreeMap<Injection, Vec<BigInt>>,
}

impl Copy {
    pub fn support(&self) -> impl Iterator<Item = (&Injection, &Vec<BigInt>)> {
        self.gamma.iter()
    }
}

/// Types at one label set `B`: distinct vectors `γ^θ ∈ (ℤ^D)^{Σ^B}` over all
/// copies and all `θ ∈ A_B`.
#[derive(Debug)]
pub struct TypeTable {
    pub b: LabelSet,
    /// `Σ^B` in canonical order; coordinates are `(σ, d)` flattened.
    pub sigma: Arc<Vec<Injection>>,
    sigma_index: HashMap<Injection, usize>,
    /// Type vectors; the zero type, when present, has id 0.
    pub vectors: Vec<Vec<BigInt>>,
    pub zero: Option<usize>,
    pub nonzero: Vec<usize>,
    theta_type: HashMap<(usize, Injection), usize>,
    echelon: ColumnEchelon,
    pub kernel: Vec<Vec<BigInt>>,
}

impl TypeTable {
    pub fn type_of(&self, copy: usize, theta: &Injection) -> usize {
        self.theta_type[&(copy, theta.clone())]
    }

    pub fn sigma_position(&self, s: &Injection) -> Option<usize> {
        self.sigma_index.get(s).copied()
    }

    pub fn is_elementary(&self) -> bool {
        self.kernel.is_empty()
    }

    /// Position of type `t` among the nonzero types.
    pub fn nonzero_position(&self, t: usize) -> Option<usize> {
        self.nonzero.iter().position(|&x| x == t)
    }
}

/// Coefficients of an orbit vector over the nonzero types, or the orbit that
/// has no integer atom expression.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AtomDecomposition {
    /// Per orbit representative: `(type id, coefficient)` for nonzero coefficients.
    Coefficients(BTreeMap<Injection, Vec<(usize, BigInt)>>),
    NotInSpan(Injection),
}

/// Minimum-norm atom expression at one orbit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitUse {
    pub coefficients: Vec<BigInt>,
    pub norm: BigInt,
    /// The kernel search touched its coefficient bound, so the minimum may be larger than reported.
    pub cap_bound: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Boundedness {
    pub bounded: bool,
    pub max_ratio: BigRational,
    pub worst: Option<Injection>,
}

#[derive(Clone, Debug)]
pub struct VectorSystem {
    group: PermutationGroup,
    r: usize,
    dim: usize,
    copies: Vec<Copy>,
    tables: Arc<Mutex<HashMap<LabelSet, Arc<TypeTable>>>>,
}

impl PartialEq for VectorSystem {
    fn eq(&self, other: &Self) -> bool {
        self.r == other.r
            && self.dim == other.dim
            && self.copies == other.copies
            && self.group.support() == other.group.support()
            && self.group.generator_words() == other.group.generator_words()
    }
}

impl VectorSystem {
    /// Validates that every key is an `r`-level map of `Σ^≤` and that values
    /// have `dim` coordinates. Zero values are dropped.
    pub fn new(group: PermutationGroup, r: usize, dim: usize, copies: Vec<(String, Vec<(Injection, Vec<BigInt>)>)>) -> Result<Self> {
        if r > group.degree() {
            return Err(Error::Precondition(format!("uniformity {r} exceeds the {} labels", group.degree())));
        }
        let mut out = Vec::with_capacity(copies.len());
        for (name, entries) in copies {
            let mut gamma: BTreeMap<Injection, Vec<BigInt>> = BTreeMap::new();
            for (theta, v) in entries {
                if theta.len() != r || !group.extends_to_element(&theta) {
                    return Err(Error::DomainMismatch(format!("{theta} is not an {r}-level map of the group")));
                }
                if v.len() != dim {
                    return Err(Error::Parse(format!("value at {theta} has {} coordinates, expected {dim}", v.len())));
                }
                let e = gamma.entry(theta).or_insert_with(|| vec![BigInt::zero(); dim]);
                for (x, y) in e.iter_mut().zip(v) {
                    *x += y;
                }
            }
            gamma.retain(|_, v| !is_zero_vec(v));
            out.push(Copy { name, gamma });
        }
        Ok(VectorSystem { group, r, dim, copies: out, tables: Arc::new(Mutex::new(HashMap::new())) })
    }

    /// Builds `γ` by evaluating `f(copy, θ)` on every `θ ∈ A_r`.
    pub fn from_fn(
        group: PermutationGroup,
        r: usize,
        dim: usize,
        names: &[&str],
        f: impl Fn(usize, &Injection) -> Vec<BigInt>,
    ) -> Result<Self> {
        let support = group.support();
        let copies = names
            .iter()
            .enumerate()
            .map(|(c, name)| {
                let entries = subsets_of_size(support, r)
                    .into_iter()
                    .flat_map(|b| group.maps_from(b))
                    .map(|theta| {
                        let v = f(c, &theta);
                        (theta, v)
                    })
                    .collect();
                (name.to_string(), entries)
            })
            .collect();
        Self::new(group, r, dim, copies)
    }

    pub fn group(&self) -> &PermutationGroup {
        &self.group
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn q(&self) -> usize {
        self.group.degree()
    }

    pub fn copies(&self) -> &[Copy] {
        &self.copies
    }

    pub fn copy_index(&self, name: &str) -> Option<usize> {
        self.copies.iter().position(|c| c.name == name)
    }

    pub fn gamma(&self, copy: usize, theta: &Injection) -> Option<&[BigInt]> {
        self.copies.get(copy).and_then(|c| c.gamma.get(theta)).map(Vec::as_slice)
    }

    fn check_embedding(&self, phi: &LabelledComplex, copy: usize, emb: &Injection) -> Result<()> {
        if copy >= self.copies.len() {
            return Err(Error::InvalidEmbedding(format!("no copy with index {copy}")));
        }
        if emb.dom() != self.group.support() || !phi.contains(emb) {
            return Err(Error::InvalidEmbedding(format!("{emb} is not an embedding of the copy")));
        }
        Ok(())
    }

    /// `γ(φ)`, after checking that `φ` is an embedding.
    pub fn molecule(&self, phi: &LabelledComplex, copy: usize, emb: &Injection) -> Result<EdgeVector> {
        self.check_embedding(phi, copy, emb)?;
        Ok(self.molecule_unchecked(copy, emb))
    }

    pub fn molecule_unchecked(&self, copy: usize, emb: &Injection) -> EdgeVector {
        let mut out = EdgeVector::new(self.dim);
        let one = BigInt::from(1);
        for (theta, v) in &self.copies[copy].gamma {
            out.add_at(&emb.compose(theta), v, &one);
        }
        out
    }

    /// `∂Ψ = Σ Ψ_φ γ(φ)`.
    pub fn boundary(&self, phi: &LabelledComplex, sel: &Selection) -> Result<EdgeVector> {
        let mut out = EdgeVector::new(self.dim);
        for ((c, emb), coef) in sel.iter() {
            self.check_embedding(phi, *c, emb)?;
            for (theta, v) in &self.copies[*c].gamma {
                out.add_at(&emb.compose(theta), v, coef);
            }
        }
        Ok(out)
    }

    /// The type table at `b` (cached).
    pub fn type_table(&self, b: LabelSet) -> Arc<TypeTable> {
        if let Some(t) = self.tables.lock().unwrap().get(&b) {
            return t.clone();
        }
        let t = Arc::new(self.build_table(b));
        self.tables.lock().unwrap().insert(b, t.clone());
        t
    }

    fn build_table(&self, b: LabelSet) -> TypeTable {
        let sigma = self.group.maps_into(b);
        let sigma_index: HashMap<Injection, usize> = sigma.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        let thetas = self.group.maps_from(b);
        let mut raw: Vec<((usize, Injection), Vec<BigInt>)> = Vec::new();
        for c in 0..self.copies.len() {
            for theta in &thetas {
                let mut v = Vec::with_capacity(sigma.len() * self.dim);
                for s in sigma.iter() {
                    match self.copies[c].gamma.get(&theta.compose(s)) {
                        Some(x) => v.extend(x.iter().cloned()),
                        None => v.extend(std::iter::repeat(BigInt::zero()).take(self.dim)),
                    }
                }
                raw.push(((c, theta.clone()), v));
            }
        }
        let distinct: BTreeSet<&Vec<BigInt>> = raw.iter().map(|(_, v)| v).collect();
        let (zeros, mut others): (Vec<&Vec<BigInt>>, Vec<&Vec<BigInt>>) = distinct.into_iter().partition(|v| is_zero_vec(v));
        let mut vectors: Vec<Vec<BigInt>> = zeros.into_iter().cloned().collect();
        let zero = if vectors.is_empty() { None } else { Some(0) };
        others.sort();
        vectors.extend(others.into_iter().cloned());
        let id_of: HashMap<&Vec<BigInt>, usize> = vectors.iter().enumerate().map(|(i, v)| (v, i)).collect();
        let theta_type = raw.iter().map(|(k, v)| (k.clone(), id_of[v])).collect();
        let nonzero: Vec<usize> = (0..vectors.len()).filter(|&i| Some(i) != zero).collect();
        let rows = sigma.len() * self.dim;
        let cols: Vec<Vec<BigInt>> = nonzero.iter().map(|&i| vectors[i].clone()).collect();
        let echelon = ColumnEchelon::new(&IntMatrix::from_columns(rows, &cols));
        let kernel = echelon.kernel_basis();
        TypeTable { b, sigma, sigma_index, vectors, zero, nonzero, theta_type, echelon, kernel }
    }

    /// `T_B` as `(type id, γ^t)`.
    pub fn types(&self, b: LabelSet) -> Vec<(usize, Vec<BigInt>)> {
        self.type_table(b).vectors.iter().cloned().enumerate().collect()
    }

    /// True iff the nonzero types are linearly independent at every `r`-set.
    pub fn is_elementary(&self) -> bool {
        self.group
            .equivalence_classes(self.r)
            .iter()
            .all(|class| self.type_table(class[0]).is_elementary())
    }

    /// `f_B(J)_ψ = (J_{ψσ})_{σ ∈ Σ^B}`, flattened over colours.
    pub fn orbit_coordinates(&self, j: &EdgeVector, psi: &Injection) -> Vec<BigInt> {
        let table = self.type_table(psi.dom());
        let mut out = Vec::with_capacity(table.sigma.len() * self.dim);
        for s in table.sigma.iter() {
            out.extend(j.value(&psi.compose(s)));
        }
        out
    }

    /// Orbit representatives touched by the support of `j`.
    pub fn support_orbits(&self, j: &EdgeVector) -> BTreeSet<Injection> {
        j.support().map(|psi| self.group.orbit_rep(psi)).collect()
    }

    /// `γ[ψ]^t` as an edge vector on the orbit of `ψ`.
    pub fn atom(&self, psi: &Injection, t: usize) -> EdgeVector {
        let table = self.type_table(psi.dom());
        let mut out = EdgeVector::new(self.dim);
        let one = BigInt::from(1);
        for (k, s) in table.sigma.iter().enumerate() {
            out.add_at(&psi.compose(s), &table.vectors[t][k * self.dim..(k + 1) * self.dim], &one);
        }
        out
    }

    /// Type at the canonical representative for the atom `γ[φθ]^θ`.
    pub fn atom_at(&self, copy: usize, emb: &Injection, theta: &Injection) -> (Injection, usize) {
        let (rep, tau) = self.group.canonical(&emb.compose(theta));
        let theta_rep = theta.compose(&tau);
        let t = self.type_table(rep.dom()).type_of(copy, &theta_rep);
        (rep, t)
    }

    /// The nonzero atoms of `γ(φ)`, one per covered orbit, as `(rep, type)`.
    pub fn molecule_atoms(&self, copy: usize, emb: &Injection) -> Vec<(Injection, usize)> {
        let mut seen: BTreeMap<Injection, usize> = BTreeMap::new();
        for theta in self.copies[copy].gamma.keys() {
            let psi = emb.compose(theta);
            let rep = self.group.orbit_rep(&psi);
            if !seen.contains_key(&rep) {
                let (rep, t) = self.atom_at(copy, emb, theta);
                seen.insert(rep, t);
            }
        }
        seen.into_iter().collect()
    }

    /// One integer expression of `J^O` over the nonzero types at the orbit of
    /// `rep`, together with the kernel of the type matrix.
    fn orbit_solution(&self, j: &EdgeVector, rep: &Injection) -> Option<(Vec<BigInt>, Arc<TypeTable>)> {
        let table = self.type_table(rep.dom());
        let target = self.orbit_coordinates(j, rep);
        table.echelon.solve(&target).map(|x| (x, table))
    }

    /// Atom decomposition at every orbit touched by `j`. For non-elementary
    /// systems each orbit gets a minimum 1-norm expression.
    pub fn atom_decomposition(&self, j: &EdgeVector) -> AtomDecomposition {
        let mut out = BTreeMap::new();
        for rep in self.support_orbits(j) {
            let Some(u) = self.orbit_use(j, &rep) else { return AtomDecomposition::NotInSpan(rep) };
            let table = self.type_table(rep.dom());
            let coeffs: Vec<(usize, BigInt)> = table
                .nonzero
                .iter()
                .zip(u.coefficients)
                .filter(|(_, c)| !c.is_zero())
                .map(|(&t, c)| (t, c))
                .collect();
            out.insert(rep, coeffs);
        }
        AtomDecomposition::Coefficients(out)
    }

    /// Minimum 1-norm atom expression of `J^O` for the orbit of `psi`.
    pub fn orbit_use(&self, j: &EdgeVector, psi: &Injection) -> Option<OrbitUse> {
        let rep = self.group.orbit_rep(psi);
        let (x, table) = self.orbit_solution(j, &rep)?;
        Some(minimize_norm(&x, &table.kernel))
    }

    /// `U(J)_ψ`: the orbit use for `r`-level maps, and the sum over `r`-level
    /// extensions in `phi` otherwise. `None` when some use is undefined.
    pub fn use_at(&self, phi: &LabelledComplex, j: &EdgeVector, psi: &Injection) -> Option<BigInt> {
        if psi.len() == self.r {
            return Some(self.orbit_use(j, psi)?.norm);
        }
        let mut total = BigInt::zero();
        let mut cache: HashMap<Injection, BigInt> = HashMap::new();
        for rep in self.support_orbits(j) {
            let u = self.orbit_use(j, &rep)?;
            cache.insert(rep, u.norm);
        }
        for b in subsets_of_size(full_mask(self.q()), self.r) {
            if psi.dom() & !b != 0 {
                continue;
            }
            for ext in phi.extensions(psi, b) {
                if let Some(u) = cache.get(&self.group.orbit_rep(&ext)) {
                    total += u;
                }
            }
        }
        Some(total)
    }

    /// Checks `U(J)_ψ < θ|V(Φ)|` for every `ψ ∈ Φ_{r−1}`; `None` when a use is undefined.
    pub fn boundedness(&self, phi: &LabelledComplex, j: &EdgeVector, theta: &BigRational) -> Option<Boundedness> {
        let nv = BigInt::from(phi.vertices().len().max(1));
        let mut lower: HashMap<Injection, BigInt> = HashMap::new();
        for rep in self.support_orbits(j) {
            let u = self.orbit_use(j, &rep)?.norm;
            if u.is_zero() {
                continue;
            }
            for member in self.group.orbit_members(&rep) {
                if !phi.contains(&member) {
                    continue;
                }
                for s in subsets_of_size(member.dom(), self.r.saturating_sub(1)) {
                    *lower.entry(member.restrict(s)).or_insert_with(BigInt::zero) += &u;
                }
            }
        }
        let mut worst: Option<(Injection, BigInt)> = None;
        for (k, u) in lower {
            if worst.as_ref().map_or(true, |(wk, wu)| u > *wu || (u == *wu && k < *wk)) {
                worst = Some((k, u));
            }
        }
        let (worst, max_use) = match worst {
            Some((k, u)) => (Some(k), u),
            None => (None, BigInt::zero()),
        };
        let max_ratio = BigRational::new(max_use, nv);
        Some(Boundedness { bounded: max_ratio < *theta, max_ratio, worst })
    }

    /// Nonnegative integer atom coefficients of `g` at every touched orbit,
    /// if they exist.
    pub fn nonnegative_decomposition(&self, g: &EdgeVector) -> Option<BTreeMap<Injection, Vec<BigInt>>> {
        let mut out = BTreeMap::new();
        for rep in self.support_orbits(g) {
            let (x, table) = self.orbit_solution(g, &rep)?;
            let y = nonnegative_point(&x, &table.kernel)?;
            out.insert(rep, y);
        }
        Some(out)
    }

    /// `γ[G]^A` for each copy: the `r`-level maps `ψ` with `γ(ψ) ≤_γ G`.
    pub fn edge_atoms_restriction(&self, phi: &LabelledComplex, g: &EdgeVector) -> Vec<BTreeSet<Injection>> {
        let mut out = vec![BTreeSet::new(); self.copies.len()];
        let Some(dec) = self.nonnegative_decomposition(g) else { return out };
        for psi in phi.level(self.r) {
            let (rep, tau) = self.group.canonical(&psi);
            let table = self.type_table(rep.dom());
            let id_rep = Injection::identity(psi.dom()).compose(&tau);
            for (c, set) in out.iter_mut().enumerate() {
                let t = table.type_of(c, &id_rep);
                let ok = if Some(t) == table.zero {
                    true
                } else {
                    let pos = table.nonzero_position(t).expect("nonzero type");
                    match dec.get(&rep) {
                        None => false,
                        Some(coeffs) if table.is_elementary() => coeffs[pos] >= BigInt::from(1),
                        Some(_) => {
                            let atom = self.atom(&rep, t);
                            self.nonnegative_decomposition(&g.minus(&atom)).is_some()
                        }
                    }
                };
                if ok {
                    set.insert(psi.clone());
                }
            }
        }
        out
    }

    /// Right action `(vτ)_σ = v_{τσ}` on `(ℤ^D)^{Σ^B}`, for `τ ∈ Σ^B_B`.
    pub fn act(&self, b: LabelSet, v: &[BigInt], tau: &Injection) -> Vec<BigInt> {
        let table = self.type_table(b);
        let mut out = Vec::with_capacity(v.len());
        for s in table.sigma.iter() {
            let k = table.sigma_position(&tau.compose(s)).expect("Σ^B is closed under Σ^B_B");
            out.extend_from_slice(&v[k * self.dim..(k + 1) * self.dim]);
        }
        out
    }

    /// True if `{γ^t}` at `b` is closed under the `Σ^B_B` action.
    pub fn types_symmetric(&self, b: LabelSet) -> bool {
        let table = self.type_table(b);
        let all: BTreeSet<&Vec<BigInt>> = table.vectors.iter().collect();
        self.group
            .restricted_maps(b, b)
            .iter()
            .all(|tau| table.vectors.iter().all(|v| all.contains(&self.act(b, v, tau))))
    }
}

fn norm1(v: &[BigInt]) -> BigInt {
    v.iter().map(|x| x.abs()).sum()
}

/// Kernel offsets with coefficients in `[-cap, cap]`, skipping when the box is too large.
fn kernel_box(kernel: &[Vec<BigInt>]) -> (i64, usize) {
    let cap = kernel.iter().map(|k| norm1(k)).max().map_or(1, |c| c.to_string().parse::<i64>().unwrap_or(3)).clamp(1, 3);
    let dims = kernel.len().min(4);
    (cap, dims)
}

fn for_each_offset(x: &[BigInt], kernel: &[Vec<BigInt>], f: &mut dyn FnMut(&[BigInt], bool)) {
    let (cap, dims) = kernel_box(kernel);
    let mut c = vec![-cap; dims];
    loop {
        let mut y = x.to_vec();
        for (ci, k) in c.iter().zip(kernel) {
            for (a, b) in y.iter_mut().zip(k) {
                *a += b * ci;
            }
        }
        let edge = c.iter().any(|v| v.abs() == cap);
        f(&y, edge);
        let mut i = 0;
        loop {
            if i == dims {
                return;
            }
            c[i] += 1;
            if c[i] <= cap {
                break;
            }
            c[i] = -cap;
            i += 1;
        }
    }
}

fn minimize_norm(x: &[BigInt], kernel: &[Vec<BigInt>]) -> OrbitUse {
    if kernel.is_empty() {
        return OrbitUse { coefficients: x.to_vec(), norm: norm1(x), cap_bound: false };
    }
    let mut best: Option<(BigInt, Vec<BigInt>, bool)> = None;
    for_each_offset(x, kernel, &mut |y, edge| {
        let n = norm1(y);
        if best.as_ref().map_or(true, |(bn, _, _)| n < *bn) {
            best = Some((n, y.to_vec(), edge));
        }
    });
    let (norm, coefficients, cap_bound) = best.expect("at least one offset");
    OrbitUse { coefficients, norm, cap_bound }
}

fn nonnegative_point(x: &[BigInt], kernel: &[Vec<BigInt>]) -> Option<Vec<BigInt>> {
    if kernel.is_empty() {
        return x.iter().all(|v| !v.is_negative()).then(|| x.to_vec());
    }
    let mut found = None;
    for_each_offset(x, kernel, &mut |y, _| {
        if found.is_none() && y.iter().all(|v| !v.is_negative()) {
            found = Some(y.to_vec());
        }
    });
    found
}
