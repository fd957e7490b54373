//! Decomposition-lattice membership: the per-orbit atom lattice, the degree
//! lattice through `J♯`, iterated independent shadows and the brute-force
//! molecule lattice.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::Zero;
use smallvec::SmallVec;

use super::linalg::{ColumnEchelon, IntMatrix};
use crate::complex::{subsets_of_size, submasks, Injection, LabelSet, LabelledComplex};
use crate::error::{Error, Result};
use crate::symmetry::PermutationGroup;
use crate::vsys::{EdgeVector, VectorSystem};

/// Coordinate key inside one map's vector: label sets of a chain followed by a colour.
pub type Key = SmallVec<[u32; 6]>;

/// Sparse vectors indexed by maps (of the complex or of the copies).
pub type Field = HashMap<Injection, BTreeMap<Key, BigInt>>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Sharp,
    Shadow,
}

/// Outcome of a membership test, with the first failing orbit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Membership {
    pub member: bool,
    /// `(level, orbit representative)` of the first orbit that fails.
    pub failing: Option<(usize, Injection)>,
}

impl Membership {
    fn yes() -> Self {
        Membership { member: true, failing: None }
    }
}

fn add_into(field: &mut Field, at: Injection, key: Key, v: &BigInt) {
    if v.is_zero() {
        return;
    }
    let m = field.entry(at.clone()).or_default();
    let e = m.entry(key.clone()).or_insert_with(BigInt::zero);
    *e += v;
    if e.is_zero() {
        m.remove(&key);
        if m.is_empty() {
            field.remove(&at);
        }
    }
}

fn colour_keys<'a>(prefix: &[u32], v: &'a [BigInt]) -> impl Iterator<Item = (Key, BigInt)> + 'a {
    let prefix: Key = prefix.iter().copied().collect();
    v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(move |(d, x)| {
        let mut k = prefix.clone();
        k.push(d as u32);
        (k, x.clone())
    })
}

/// `J` itself, keyed by colour.
fn plain_field<'a>(entries: impl Iterator<Item = (&'a Injection, &'a Vec<BigInt>)>) -> Field {
    let mut f = Field::new();
    for (m, v) in entries {
        for (k, x) in colour_keys(&[], v) {
            add_into(&mut f, m.clone(), k, &x);
        }
    }
    f
}

/// `J♯`: every restriction `ψ′ ⊆ ψ` receives `J_ψ` in the block of `dom ψ`.
fn sharp_field<'a>(entries: impl Iterator<Item = (&'a Injection, &'a Vec<BigInt>)>) -> Field {
    let mut f = Field::new();
    for (m, v) in entries {
        for s in submasks(m.dom()) {
            let at = m.restrict(s);
            for (k, x) in colour_keys(&[m.dom()], v) {
                add_into(&mut f, at.clone(), k, &x);
            }
        }
    }
    f
}

/// `∂*_i` for every level `i`, indexed by level; keys are full chains then a colour.
fn shadow_fields<'a>(r: usize, entries: impl Iterator<Item = (&'a Injection, &'a Vec<BigInt>)>) -> Vec<Field> {
    let mut levels = vec![Field::new(); r + 1];
    for (m, v) in entries {
        for (k, x) in colour_keys(&[m.dom()], v) {
            add_into(&mut levels[r], m.clone(), k, &x);
        }
    }
    for i in (0..r).rev() {
        let (lower, upper) = levels.split_at_mut(i + 1);
        for (m, vec) in upper[0].iter() {
            for s in subsets_of_size(m.dom(), i) {
                let at = m.restrict(s);
                for (k, x) in vec {
                    let mut chain: Key = SmallVec::with_capacity(k.len() + 1);
                    chain.push(s);
                    chain.extend(k.iter().copied());
                    add_into(&mut lower[i], at.clone(), chain, x);
                }
            }
        }
    }
    levels
}

/// Atom matrix at one label set, with duplicate rows grouped.
struct OrbitLattice {
    /// Row key `(σ position, key)` to unique-row index.
    rows: HashMap<(usize, Key), usize>,
    /// Members of each unique-row group.
    groups: Vec<Vec<(usize, Key)>>,
    echelon: Option<ColumnEchelon>,
}

fn build_orbit_lattice(group: &PermutationGroup, b: LabelSet, gfields: &[Field]) -> OrbitLattice {
    let sigma = group.maps_into(b);
    let thetas = group.maps_from(b);
    let mut cols: BTreeSet<BTreeMap<(usize, Key), BigInt>> = BTreeSet::new();
    for gf in gfields {
        for theta in &thetas {
            let mut col = BTreeMap::new();
            for (si, s) in sigma.iter().enumerate() {
                if let Some(m) = gf.get(&theta.compose(s)) {
                    for (k, v) in m {
                        col.insert((si, k.clone()), v.clone());
                    }
                }
            }
            if !col.is_empty() {
                cols.insert(col);
            }
        }
    }
    let cols: Vec<_> = cols.into_iter().collect();
    let mut patterns: BTreeMap<(usize, Key), Vec<(usize, BigInt)>> = BTreeMap::new();
    for (j, col) in cols.iter().enumerate() {
        for (k, v) in col {
            patterns.entry(k.clone()).or_default().push((j, v.clone()));
        }
    }
    let mut by_pattern: BTreeMap<Vec<(usize, BigInt)>, Vec<(usize, Key)>> = BTreeMap::new();
    for (k, p) in patterns {
        by_pattern.entry(p).or_default().push(k);
    }
    let mut rows = HashMap::new();
    let mut groups = Vec::new();
    let mut matrix_rows = Vec::new();
    for (p, keys) in by_pattern {
        let idx = groups.len();
        for k in &keys {
            rows.insert(k.clone(), idx);
        }
        groups.push(keys);
        let mut row = vec![BigInt::zero(); cols.len()];
        for (j, v) in p {
            row[j] = v;
        }
        matrix_rows.push(row);
    }
    let echelon = (!cols.is_empty()).then(|| ColumnEchelon::new(&IntMatrix::from_rows(&matrix_rows)));
    OrbitLattice { rows, groups, echelon }
}

impl OrbitLattice {
    fn contains(&self, target: &HashMap<(usize, Key), BigInt>) -> bool {
        if target.keys().any(|k| !self.rows.contains_key(k)) {
            return false;
        }
        let mut b = Vec::with_capacity(self.groups.len());
        for keys in &self.groups {
            let first = target.get(&keys[0]).cloned().unwrap_or_default();
            if keys[1..].iter().any(|k| target.get(k).cloned().unwrap_or_default() != first) {
                return false;
            }
            b.push(first);
        }
        match &self.echelon {
            None => b.iter().all(Zero::is_zero),
            Some(e) => e.contains(&b),
        }
    }
}

/// Per-orbit span tests of one field against the copies' fields.
struct OrbitTester<'a> {
    group: &'a PermutationGroup,
    gfields: Vec<Field>,
    cache: Mutex<HashMap<LabelSet, std::sync::Arc<OrbitLattice>>>,
}

impl<'a> OrbitTester<'a> {
    fn new(group: &'a PermutationGroup, gfields: Vec<Field>) -> Self {
        OrbitTester { group, gfields, cache: Mutex::new(HashMap::new()) }
    }

    fn lattice(&self, b: LabelSet) -> std::sync::Arc<OrbitLattice> {
        if let Some(l) = self.cache.lock().unwrap().get(&b) {
            return l.clone();
        }
        let l = std::sync::Arc::new(build_orbit_lattice(self.group, b, &self.gfields));
        self.cache.lock().unwrap().insert(b, l.clone());
        l
    }

    fn orbit_ok(&self, rep: &Injection, jfield: &Field) -> bool {
        let sigma = self.group.maps_into(rep.dom());
        let mut target: HashMap<(usize, Key), BigInt> = HashMap::new();
        for (si, s) in sigma.iter().enumerate() {
            if let Some(m) = jfield.get(&rep.compose(s)) {
                for (k, v) in m {
                    target.insert((si, k.clone()), v.clone());
                }
            }
        }
        self.lattice(rep.dom()).contains(&target)
    }

    /// Tests every orbit touched by `jfield`, smallest representative first.
    fn first_failure(&self, jfield: &Field) -> Option<Injection> {
        let reps: BTreeSet<Injection> = jfield.keys().map(|m| self.group.orbit_rep(m)).collect();
        reps.into_iter().find(|rep| !self.orbit_ok(rep, jfield))
    }
}

fn check_support(phi: &LabelledComplex, vs: &VectorSystem, j: &EdgeVector) -> Result<()> {
    if j.dim() != vs.dim() {
        return Err(Error::DomainMismatch(format!("vector has {} colours, the system has {}", j.dim(), vs.dim())));
    }
    for m in j.support() {
        if m.len() != vs.r() || !phi.contains(m) {
            return Err(Error::DomainMismatch(format!("{m} is not an {}-level map of the complex", vs.r())));
        }
    }
    Ok(())
}

/// `J ∈ L⁻`: every orbit restriction lies in the integer span of the atoms there.
pub fn lattice_member_lminus(phi: &LabelledComplex, vs: &VectorSystem, j: &EdgeVector) -> Result<Membership> {
    check_support(phi, vs, j)?;
    let gfields: Vec<Field> = vs.copies().iter().map(|c| plain_field(c.support())).collect();
    let tester = OrbitTester::new(vs.group(), gfields);
    let jfield = plain_field(j.iter());
    Ok(match tester.first_failure(&jfield) {
        None => Membership::yes(),
        Some(rep) => Membership { member: false, failing: Some((vs.r(), rep)) },
    })
}

/// `(J♯_{ψ′})_B = Σ {J_ψ : ψ′ ⊆ ψ ∈ Φ_B}`, keyed by `B`.
pub fn sharp_degree(j: &EdgeVector, psi: &Injection) -> BTreeMap<LabelSet, Vec<BigInt>> {
    let mut out: BTreeMap<LabelSet, Vec<BigInt>> = BTreeMap::new();
    for (m, v) in j.iter() {
        if psi.is_restriction_of(m) {
            let e = out.entry(m.dom()).or_insert_with(|| vec![BigInt::zero(); v.len()]);
            for (x, y) in e.iter_mut().zip(v) {
                *x += y;
            }
        }
    }
    out.retain(|_, v| v.iter().any(|x| !x.is_zero()));
    out
}

/// `J ∈ L_γ(Φ)` by the degree condition on `J♯` at every orbit, or level by
/// level through the independent shadows.
pub fn lattice_member_l(phi: &LabelledComplex, vs: &VectorSystem, j: &EdgeVector, method: Method) -> Result<Membership> {
    check_support(phi, vs, j)?;
    let r = vs.r();
    match method {
        Method::Sharp => {
            let gfields: Vec<Field> = vs.copies().iter().map(|c| sharp_field(c.support())).collect();
            let tester = OrbitTester::new(vs.group(), gfields);
            let jfield = sharp_field(j.iter());
            // Report the lowest failing level first, matching the shadow order.
            for i in 0..=r {
                let level: Field = jfield.iter().filter(|(m, _)| m.len() == i).map(|(m, v)| (m.clone(), v.clone())).collect();
                if let Some(rep) = tester.first_failure(&level) {
                    return Ok(Membership { member: false, failing: Some((i, rep)) });
                }
            }
            Ok(Membership::yes())
        }
        Method::Shadow => {
            let jlevels = shadow_fields(r, j.iter());
            let glevels: Vec<Vec<Field>> = vs.copies().iter().map(|c| shadow_fields(r, c.support())).collect();
            for i in 0..=r {
                let gfields: Vec<Field> = glevels.iter().map(|g| g[i].clone()).collect();
                let tester = OrbitTester::new(vs.group(), gfields);
                if let Some(rep) = tester.first_failure(&jlevels[i]) {
                    return Ok(Membership { member: false, failing: Some((i, rep)) });
                }
            }
            Ok(Membership::yes())
        }
    }
}

/// The integer span of all molecules `γ(Φ)`, deduplicated, as a reusable oracle.
pub struct MoleculeLattice {
    rows: HashMap<(Injection, usize), usize>,
    columns: Vec<(usize, Injection)>,
    echelon: ColumnEchelon,
}

impl MoleculeLattice {
    /// Fails with a budget error when there are more than `budget` embeddings.
    pub fn new(phi: &LabelledComplex, vs: &VectorSystem, budget: u64) -> Result<Self> {
        let top = vs.group().support();
        let mut count = 0u64;
        let mut seen: BTreeMap<Vec<((Injection, usize), BigInt)>, (usize, Injection)> = BTreeMap::new();
        let mut over = false;
        phi.for_each_extension(&Injection::empty(), top, &mut |emb| {
            if over {
                return;
            }
            count += 1;
            if count > budget {
                over = true;
                return;
            }
            for c in 0..vs.copies().len() {
                let m = vs.molecule_unchecked(c, emb);
                let key: Vec<((Injection, usize), BigInt)> = m
                    .iter()
                    .flat_map(|(p, v)| v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(move |(d, x)| ((p.clone(), d), x.clone())))
                    .collect();
                if !key.is_empty() {
                    seen.entry(key).or_insert_with(|| (c, emb.clone()));
                }
            }
        });
        if over {
            return Err(Error::Budget(format!("more than {budget} embeddings in the molecule matrix")));
        }
        let mut rows = HashMap::new();
        for key in seen.keys() {
            for (k, _) in key {
                let n = rows.len();
                rows.entry(k.clone()).or_insert(n);
            }
        }
        let mut z = IntMatrix::zeros(rows.len(), seen.len());
        let mut columns = Vec::with_capacity(seen.len());
        for (j, (key, who)) in seen.into_iter().enumerate() {
            for (k, v) in key {
                z[(rows[&k], j)] = v;
            }
            columns.push(who);
        }
        Ok(MoleculeLattice { rows, columns, echelon: ColumnEchelon::new(&z) })
    }

    pub fn molecule_count(&self) -> usize {
        self.columns.len()
    }

    fn target(&self, j: &EdgeVector) -> Option<Vec<BigInt>> {
        let mut b = vec![BigInt::zero(); self.rows.len()];
        for (m, v) in j.iter() {
            for (d, x) in v.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                b[*self.rows.get(&(m.clone(), d))?] = x.clone();
            }
        }
        Some(b)
    }

    pub fn contains(&self, j: &EdgeVector) -> bool {
        self.target(j).is_some_and(|b| self.echelon.contains(&b))
    }

    /// Integer coefficients on representative embeddings with boundary `j`.
    pub fn solve(&self, j: &EdgeVector) -> Option<Vec<(usize, Injection, BigInt)>> {
        let x = self.echelon.solve(&self.target(j)?)?;
        Some(
            self.columns
                .iter()
                .zip(x)
                .filter(|(_, c)| !c.is_zero())
                .map(|((copy, emb), c)| (*copy, emb.clone(), c))
                .collect(),
        )
    }
}

/// `J ∈ ⟨γ(Φ)⟩` by solving over the full molecule matrix.
pub fn lattice_member_oracle(phi: &LabelledComplex, vs: &VectorSystem, j: &EdgeVector, budget: u64) -> Result<bool> {
    check_support(phi, vs, j)?;
    Ok(MoleculeLattice::new(phi, vs, budget)?.contains(j))
}

/// Splits a dependency `n` among the nonzero types at `b` into kernel basis
/// vectors, each used `|v_i|` times with the sign of `v_i`.
pub fn lattice_constant_split(vs: &VectorSystem, b: LabelSet, n: &[BigInt]) -> Result<Vec<Vec<BigInt>>> {
    let table = vs.type_table(b);
    if n.len() != table.nonzero.len() {
        return Err(Error::Precondition(format!("expected {} type coefficients, got {}", table.nonzero.len(), n.len())));
    }
    let rows = table.sigma.len() * vs.dim();
    let mut sum = vec![BigInt::zero(); rows];
    for (c, &t) in n.iter().zip(&table.nonzero) {
        for (s, x) in sum.iter_mut().zip(&table.vectors[t]) {
            *s += c * x;
        }
    }
    if sum.iter().any(|x| !x.is_zero()) {
        return Err(Error::Precondition("coefficients are not a dependency among the types".into()));
    }
    if n.iter().all(Zero::is_zero) {
        return Ok(Vec::new());
    }
    let basis = &table.kernel;
    let z = IntMatrix::from_columns(n.len(), basis);
    let v = ColumnEchelon::new(&z).solve(n).expect("kernel vectors lie in the span of a kernel basis");
    let mut out = Vec::new();
    for (k, coef) in basis.iter().zip(v) {
        let sign = if coef < BigInt::zero() { -1 } else { 1 };
        let piece: Vec<BigInt> = k.iter().map(|x| x * sign).collect();
        let reps: usize = coef.magnitude().try_into().expect("small split");
        for _ in 0..reps {
            out.push(piece.clone());
        }
    }
    Ok(out)
}

/// Largest 1-norm among the kernel basis vectors at `b` (1 when there are none).
pub fn lattice_constant(vs: &VectorSystem, b: LabelSet) -> BigInt {
    vs.type_table(b)
        .kernel
        .iter()
        .map(|k| k.iter().map(|x| x.magnitude().clone()).sum::<num_bigint::BigUint>().into())
        .max()
        .unwrap_or_else(|| BigInt::from(1))
}

/// `∂_i J = 0`: every `i`-level restriction sums to zero.
pub fn null_check(j: &EdgeVector, i: usize) -> bool {
    let mut acc: HashMap<Injection, Vec<BigInt>> = HashMap::new();
    for (m, v) in j.iter() {
        if m.len() < i {
            return false;
        }
        for s in subsets_of_size(m.dom(), i) {
            let e = acc.entry(m.restrict(s)).or_insert_with(|| vec![BigInt::zero(); v.len()]);
            for (x, y) in e.iter_mut().zip(v) {
                *x += y;
            }
        }
    }
    acc.values().all(|v| v.iter().all(Zero::is_zero))
}

/// Null at every level below the top.
pub fn is_null(j: &EdgeVector) -> bool {
    let r = j.support().map(Injection::len).max().unwrap_or(0);
    (0..r).all(|i| null_check(j, i))
}
