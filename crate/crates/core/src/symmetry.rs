//! Permutation groups on label sets, their restricted maps, equivalence
//! classes of label sets, orbits of maps, adaptedness and quotients.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::sync::{Arc, Mutex, OnceLock};

use crate::complex::{label_iter, mask_of, subsets_of_size, Injection, Label, LabelSet, LabelledComplex};
use crate::error::{Error, Result};

/// Largest group kept as an explicit element list.
pub const MAX_ELEMENTS: usize = 100_000;

#[derive(Debug)]
enum Kind {
    /// All permutations of the support fixing every part setwise.
    Parts(Vec<LabelSet>),
    /// Explicit element list, each a bijection of the support.
    Elements(Vec<Injection>),
}

#[derive(Debug)]
struct Inner {
    support: LabelSet,
    gens: Vec<Injection>,
    kind: Kind,
    into_cache: Mutex<HashMap<LabelSet, Arc<Vec<Injection>>>>,
}

/// A permutation group acting on a set of labels.
///
/// Groups that fix a partition setwise (symmetric, trivial and part-preserving
/// groups) use structural formulas; other groups keep an element list.
#[derive(Clone, Debug)]
pub struct PermutationGroup(Arc<Inner>);

fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    fn rec(i: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for j in i..cur.len() {
            cur.swap(i, j);
            rec(i + 1, cur, out);
            cur.swap(i, j);
        }
    }
    rec(0, &mut cur, &mut out);
    out.sort();
    out
}

/// All bijections between two equal-size label sets.
pub fn bijections(from: LabelSet, to: LabelSet) -> Vec<Injection> {
    if from.count_ones() != to.count_ones() {
        return Vec::new();
    }
    let src: Vec<Label> = label_iter(from).collect();
    let dst: Vec<Label> = label_iter(to).collect();
    permutations(src.len())
        .into_iter()
        .map(|p| {
            let pairs: Vec<(Label, u32)> = src.iter().enumerate().map(|(i, &l)| (l, dst[p[i]] as u32)).collect();
            Injection::from_pairs(&pairs).expect("bijection")
        })
        .collect()
}

fn compose_perm(a: &Injection, b: &Injection) -> Injection {
    a.compose(b)
}

impl PermutationGroup {
    fn build(support: LabelSet, gens: Vec<Injection>, kind: Kind) -> Self {
        PermutationGroup(Arc::new(Inner { support, gens, kind, into_cache: Mutex::new(HashMap::new()) }))
    }

    /// The group of all permutations of `[q]` preserving each part setwise.
    pub fn part_stabilizer(parts: Vec<Vec<Label>>) -> Result<Self> {
        let mut support = 0;
        let mut masks = Vec::new();
        for p in &parts {
            let m = mask_of(p.iter().copied());
            if m.count_ones() as usize != p.len() || m & support != 0 {
                return Err(Error::Precondition("parts must be disjoint sets of labels".into()));
            }
            if m != 0 {
                masks.push(m);
            }
            support |= m;
        }
        Ok(Self::from_part_masks(support, masks))
    }

    fn from_part_masks(support: LabelSet, mut masks: Vec<LabelSet>) -> Self {
        masks.sort_by_key(|m| m.trailing_zeros());
        let mut gens = Vec::new();
        for &m in &masks {
            let ls: Vec<Label> = label_iter(m).collect();
            for k in 1..ls.len() {
                let pairs: Vec<(Label, u32)> = label_iter(support)
                    .map(|l| {
                        let img = if l == ls[0] {
                            ls[k]
                        } else if l == ls[k] {
                            ls[0]
                        } else {
                            l
                        };
                        (l, img as u32)
                    })
                    .collect();
                gens.push(Injection::from_pairs(&pairs).expect("transposition"));
            }
        }
        Self::build(support, gens, Kind::Parts(masks))
    }

    pub fn symmetric(q: usize) -> Self {
        Self::part_stabilizer(vec![(0..q as Label).collect()]).expect("one part")
    }

    pub fn trivial(q: usize) -> Self {
        Self::part_stabilizer((0..q as Label).map(|l| vec![l]).collect()).expect("singletons")
    }

    /// Closure of the given generators (bijections of `[q]` as one-line images).
    pub fn from_generators(q: usize, gens: &[Vec<Label>]) -> Result<Self> {
        let support = crate::complex::full_mask(q);
        let mut gs = Vec::new();
        for g in gens {
            if g.len() != q {
                return Err(Error::Parse(format!("generator {:?} has wrong length", g)));
            }
            let pairs: Vec<(Label, u32)> = g.iter().enumerate().map(|(i, &x)| (i as Label, x as u32)).collect();
            let p = Injection::from_pairs(&pairs)?;
            if p.image_mask() != support {
                return Err(Error::Parse(format!("generator {:?} is not a permutation of [q]", g)));
            }
            gs.push(p);
        }
        let id = Injection::identity(support);
        let mut seen: HashSet<Injection> = HashSet::new();
        seen.insert(id.clone());
        let mut queue = VecDeque::from([id]);
        while let Some(x) = queue.pop_front() {
            for g in &gs {
                let y = compose_perm(&x, g);
                if seen.insert(y.clone()) {
                    if seen.len() > MAX_ELEMENTS {
                        return Err(Error::Budget(format!("group has more than {MAX_ELEMENTS} elements")));
                    }
                    queue.push_back(y);
                }
            }
        }
        let mut els: Vec<Injection> = seen.into_iter().collect();
        els.sort();
        Ok(Self::build(support, gs, Kind::Elements(els)))
    }

    pub fn alternating(q: usize) -> Result<Self> {
        let gens: Vec<Vec<Label>> = (0..q.saturating_sub(2))
            .map(|i| {
                let mut p: Vec<Label> = (0..q as Label).collect();
                p[i] = i as Label + 1;
                p[i + 1] = i as Label + 2;
                p[i + 2] = i as Label;
                p
            })
            .collect();
        Self::from_generators(q, &gens)
    }

    pub fn support(&self) -> LabelSet {
        self.0.support
    }

    pub fn degree(&self) -> usize {
        self.0.support.count_ones() as usize
    }

    /// Generators as bijections of the support.
    pub fn generators(&self) -> &[Injection] {
        &self.0.gens
    }

    /// The fixed partition, when the group is a part stabilizer.
    pub fn parts(&self) -> Option<&[LabelSet]> {
        match &self.0.kind {
            Kind::Parts(p) => Some(p),
            Kind::Elements(_) => None,
        }
    }

    pub fn order(&self) -> u128 {
        match &self.0.kind {
            Kind::Parts(ps) => ps.iter().map(|p| (1..=p.count_ones() as u128).product::<u128>()).product(),
            Kind::Elements(e) => e.len() as u128,
        }
    }

    /// Element list; fails for part stabilizers above the element cap.
    pub fn elements(&self) -> Result<Vec<Injection>> {
        match &self.0.kind {
            Kind::Elements(e) => Ok(e.clone()),
            Kind::Parts(_) => {
                if self.order() > MAX_ELEMENTS as u128 {
                    return Err(Error::Budget(format!("group order {} exceeds the element cap", self.order())));
                }
                Ok(self.restricted_maps(self.0.support, self.0.support))
            }
        }
    }

    pub fn contains(&self, p: &Injection) -> bool {
        if p.dom() != self.0.support || p.image_mask() != self.0.support {
            return false;
        }
        match &self.0.kind {
            Kind::Parts(ps) => ps.iter().all(|&m| label_iter(m).all(|l| m & (1 << p.get(l).unwrap()) != 0)),
            Kind::Elements(e) => e.binary_search(p).is_ok(),
        }
    }

    fn profile(&self, b: LabelSet) -> Vec<u32> {
        match &self.0.kind {
            Kind::Parts(ps) => ps.iter().map(|&m| (m & b).count_ones()).collect(),
            Kind::Elements(_) => unreachable!(),
        }
    }

    /// `Σ^{to}_{from}`: restrictions to `from` of elements mapping `from` onto `to`.
    pub fn restricted_maps(&self, from: LabelSet, to: LabelSet) -> Vec<Injection> {
        if from.count_ones() != to.count_ones() || from & !self.0.support != 0 || to & !self.0.support != 0 {
            return Vec::new();
        }
        match &self.0.kind {
            Kind::Parts(ps) => {
                if self.profile(from) != self.profile(to) {
                    return Vec::new();
                }
                let mut acc = vec![Injection::empty()];
                for &m in ps {
                    let bs = bijections(from & m, to & m);
                    let mut next = Vec::with_capacity(acc.len() * bs.len());
                    for a in &acc {
                        for b in &bs {
                            next.push(a.union_labels(b));
                        }
                    }
                    acc = next;
                }
                acc.sort();
                acc
            }
            Kind::Elements(e) => {
                let set: BTreeSet<Injection> =
                    e.iter().filter(|s| s.restrict(from).image_mask() == to).map(|s| s.restrict(from)).collect();
                set.into_iter().collect()
            }
        }
    }

    /// `Σ^B`: all restricted maps onto `b`, from any label set.
    pub fn maps_into(&self, b: LabelSet) -> Arc<Vec<Injection>> {
        if let Some(v) = self.0.into_cache.lock().unwrap().get(&b) {
            return v.clone();
        }
        let mut all: Vec<Injection> = subsets_of_size(self.0.support, b.count_ones() as usize)
            .into_iter()
            .flat_map(|from| self.restricted_maps(from, b))
            .collect();
        all.sort();
        let v = Arc::new(all);
        self.0.into_cache.lock().unwrap().insert(b, v.clone());
        v
    }

    /// `Σ_B`: all restrictions of group elements to `b`.
    pub fn maps_from(&self, b: LabelSet) -> Vec<Injection> {
        let mut all: Vec<Injection> = subsets_of_size(self.0.support, b.count_ones() as usize)
            .into_iter()
            .flat_map(|to| self.restricted_maps(b, to))
            .collect();
        all.sort();
        all
    }

    /// True if `theta` is the restriction of some group element.
    pub fn extends_to_element(&self, theta: &Injection) -> bool {
        match &self.0.kind {
            Kind::Parts(ps) => {
                theta.dom() & !self.0.support == 0
                    && theta.pairs().all(|(l, v)| ps.iter().any(|&m| m & (1 << l) != 0 && m & (1 << v) != 0))
            }
            Kind::Elements(e) => e.iter().any(|s| s.restrict(theta.dom()) == *theta),
        }
    }

    pub fn equivalent(&self, a: LabelSet, b: LabelSet) -> bool {
        !self.restricted_maps(b, a).is_empty()
    }

    /// The smallest label set equivalent to `b`.
    pub fn class_rep(&self, b: LabelSet) -> LabelSet {
        match &self.0.kind {
            Kind::Parts(ps) => ps.iter().map(|&m| label_iter(m).take((m & b).count_ones() as usize).fold(0, |acc, l| acc | (1 << l))).fold(0, |x, y| x | y),
            Kind::Elements(e) => e
                .iter()
                .map(|s| s.restrict(b).image_mask())
                .min_by(|x, y| crate::complex::cmp_label_sets(*x, *y))
                .unwrap_or(b),
        }
    }

    /// `P^Σ_r`: classes of `r`-subsets under `B ∼ B′ ⇔ Σ^B_{B′} ≠ ∅`.
    pub fn equivalence_classes(&self, r: usize) -> Vec<Vec<LabelSet>> {
        let mut classes: BTreeMap<Vec<u32>, Vec<LabelSet>> = BTreeMap::new();
        for b in subsets_of_size(self.0.support, r) {
            let rep = self.class_rep(b);
            classes.entry(crate::complex::label_iter(rep).map(u32::from).collect()).or_default().push(b);
        }
        classes.into_values().collect()
    }

    /// Canonical representative of the orbit of `psi` together with the map
    /// `tau ∈ Σ^{dom ψ}` satisfying `rep = psi ∘ tau`.
    pub fn canonical(&self, psi: &Injection) -> (Injection, Injection) {
        let b = psi.dom();
        match &self.0.kind {
            Kind::Parts(ps) => {
                let mut rep_pairs: Vec<(Label, u32)> = Vec::with_capacity(psi.len());
                let mut tau_pairs: Vec<(Label, u32)> = Vec::with_capacity(psi.len());
                for &m in ps {
                    let here = m & b;
                    if here == 0 {
                        continue;
                    }
                    let mut imgs: Vec<(u32, Label)> = label_iter(here).map(|l| (psi.get(l).unwrap(), l)).collect();
                    imgs.sort_unstable();
                    for (l, (v, src)) in label_iter(m).zip(imgs) {
                        rep_pairs.push((l, v));
                        tau_pairs.push((l, src as u32));
                    }
                }
                (
                    Injection::from_pairs(&rep_pairs).expect("rep"),
                    Injection::from_pairs(&tau_pairs).expect("tau"),
                )
            }
            Kind::Elements(_) => {
                let into = self.maps_into(b);
                into.iter()
                    .map(|t| (psi.compose(t), t.clone()))
                    .min()
                    .expect("identity restriction is present")
            }
        }
    }

    pub fn orbit_rep(&self, psi: &Injection) -> Injection {
        self.canonical(psi).0
    }

    /// `ψΣ`, sorted.
    pub fn orbit_members(&self, psi: &Injection) -> Vec<Injection> {
        let mut v: Vec<Injection> = self.maps_into(psi.dom()).iter().map(|t| psi.compose(t)).collect();
        v.sort();
        v.dedup();
        v
    }

    /// `Σ/B*`: the pointwise stabilizer of `fixed`, acting on the remaining labels.
    pub fn quotient(&self, fixed: LabelSet) -> PermutationGroup {
        let rest = self.0.support & !fixed;
        match &self.0.kind {
            Kind::Parts(ps) => {
                let masks: Vec<LabelSet> = ps.iter().map(|m| m & rest).filter(|&m| m != 0).collect();
                Self::from_part_masks(rest, masks)
            }
            Kind::Elements(e) => {
                let mut els: Vec<Injection> = e
                    .iter()
                    .filter(|s| label_iter(fixed & self.0.support).all(|l| s.get(l) == Some(l as u32)))
                    .map(|s| s.restrict(rest))
                    .collect();
                els.sort();
                els.dedup();
                let gens = els.clone();
                Self::build(rest, gens, Kind::Elements(els))
            }
        }
    }

    /// Generators in one-line notation over the support, 0-based.
    pub fn generator_words(&self) -> Vec<Vec<Label>> {
        self.0.gens.iter().map(|g| g.images().iter().map(|&v| v as Label).collect()).collect()
    }
}

impl Injection {
    /// Union of two maps with disjoint domains (images may be labels).
    pub(crate) fn union_labels(&self, other: &Injection) -> Injection {
        let mut pairs = self.to_pairs();
        pairs.extend(other.pairs());
        Injection::from_pairs(&pairs).expect("disjoint label maps")
    }
}

/// First `(φ, τ)` with `φ ∘ τ ∉ Φ`, for generator restrictions `τ`, among maps
/// with at most `max_level` labels.
pub fn adaptedness_violation(phi: &LabelledComplex, group: &PermutationGroup, max_level: usize) -> Option<(Injection, Injection)> {
    if group.support() != phi.labels() {
        return Some((Injection::empty(), Injection::empty()));
    }
    for i in 0..=max_level.min(phi.q()) {
        for m in phi.level(i) {
            for g in group.generators() {
                let inv = g.inverse();
                let from = inv.restrict(m.dom()).image_mask();
                let tau = g.restrict(from);
                if !phi.contains(&m.compose(&tau)) {
                    return Some((m, tau));
                }
            }
        }
    }
    None
}

pub fn is_adapted(phi: &LabelledComplex, group: &PermutationGroup) -> bool {
    adaptedness_violation(phi, group, phi.q()).is_none()
}

/// `φ ∘ τ ∈ Φ ⇔ τ ∈ Σ` for every `φ ∈ Φ_B` and bijection `τ` onto `B`.
pub fn is_exactly_adapted(phi: &LabelledComplex, group: &PermutationGroup) -> bool {
    if group.support() != phi.labels() {
        return false;
    }
    for i in 0..=phi.q() {
        let sets = phi.label_sets(i);
        for &b in &sets {
            let maps = phi.maps(b);
            for &from in &sets {
                let allowed: HashSet<Injection> = group.restricted_maps(from, b).into_iter().collect();
                for tau in bijections(from, b) {
                    let want = allowed.contains(&tau);
                    if maps.iter().any(|m| phi.contains(&m.compose(&tau)) != want) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// An orbit `ψΣ` with lazily expanded members.
#[derive(Clone, Debug)]
pub struct Orbit {
    rep: Injection,
    group: PermutationGroup,
    members: OnceLock<Vec<Injection>>,
}

impl Orbit {
    pub fn new(rep: Injection, group: PermutationGroup) -> Self {
        Orbit { rep, group, members: OnceLock::new() }
    }

    pub fn rep(&self) -> &Injection {
        &self.rep
    }

    pub fn members(&self) -> &[Injection] {
        self.members.get_or_init(|| self.group.orbit_members(&self.rep))
    }

    pub fn image(&self) -> Vec<u32> {
        self.rep.image_set()
    }
}

/// The orbits of `Φ_r` under `Σ`, ordered by canonical representative.
pub fn orbits(phi: &LabelledComplex, group: &PermutationGroup, r: usize) -> Result<Vec<Orbit>> {
    if let Some((m, t)) = adaptedness_violation(phi, group, r) {
        return Err(Error::NotAdapted(format!("{m} composed with {t} leaves the complex")));
    }
    let reps: BTreeSet<Injection> = phi.level(r).iter().map(|m| group.orbit_rep(m)).collect();
    Ok(reps.into_iter().map(|rep| Orbit::new(rep, group.clone())).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::full_mask;

    fn inj(p: &[(u8, u32)]) -> Injection {
        Injection::from_pairs(p).unwrap()
    }

    #[test]
    fn restricted_maps_examples() {
        let s3 = PermutationGroup::symmetric(3);
        assert_eq!(s3.restricted_maps(0b011, 0b110).len(), 2);
        let id = PermutationGroup::trivial(3);
        assert_eq!(id.restricted_maps(0b011, 0b011), vec![Injection::identity(0b011)]);
        let p = PermutationGroup::part_stabilizer(vec![vec![0, 1, 2], vec![3]]).unwrap();
        assert_eq!(p.order(), 6);
        let maps = p.restricted_maps(0b1100, 0b1001);
        assert_eq!(maps, vec![inj(&[(2, 0), (3, 3)])]);
        assert!(s3.restricted_maps(0b001, 0b011).is_empty());
    }

    #[test]
    fn parts_agree_with_element_lists() {
        let p = PermutationGroup::part_stabilizer(vec![vec![0, 2], vec![1, 3, 4]]).unwrap();
        let e = PermutationGroup::from_generators(5, &p.generator_words()).unwrap();
        assert_eq!(e.order(), p.order());
        for r in 0..=5 {
            for a in subsets_of_size(full_mask(5), r) {
                assert_eq!(p.class_rep(a), e.class_rep(a));
                for b in subsets_of_size(full_mask(5), r) {
                    assert_eq!(p.restricted_maps(a, b), e.restricted_maps(a, b));
                }
            }
        }
        let psi = inj(&[(1, 7), (2, 3), (4, 5)]);
        assert_eq!(p.canonical(&psi).0, e.canonical(&psi).0);
        let (rep, tau) = p.canonical(&psi);
        assert_eq!(psi.compose(&tau), rep);
    }

    #[test]
    fn classes() {
        assert_eq!(PermutationGroup::symmetric(4).equivalence_classes(2).len(), 1);
        assert_eq!(PermutationGroup::trivial(4).equivalence_classes(2).len(), 6);
        // teams {1,2,3},{4,5,6},{7,8,9} preserved setwise
        let gens: Vec<Vec<Label>> = vec![
            vec![1, 0, 2, 3, 4, 5, 6, 7, 8],
            vec![1, 2, 0, 3, 4, 5, 6, 7, 8],
            vec![3, 4, 5, 0, 1, 2, 6, 7, 8],
            vec![3, 4, 5, 6, 7, 8, 0, 1, 2],
        ];
        let g = PermutationGroup::from_generators(9, &gens).unwrap();
        assert_eq!(g.order(), 1296);
        let cls = g.equivalence_classes(3);
        let mut sizes: Vec<usize> = cls.iter().map(Vec::len).collect();
        sizes.sort();
        assert_eq!(sizes, vec![3, 27, 54]);
    }

    #[test]
    fn adaptedness() {
        let c = LabelledComplex::complete(3, 5);
        assert!(is_adapted(&c, &PermutationGroup::symmetric(3)));
        let part = LabelledComplex::partite(vec![vec![0, 1], vec![2, 3, 4]], 5).unwrap();
        assert!(is_adapted(&part, &PermutationGroup::trivial(2)));
        let w = adaptedness_violation(&part, &PermutationGroup::symmetric(2), 2);
        assert!(w.is_some());
    }

    #[test]
    fn exact_adaptedness() {
        let c = LabelledComplex::complete(3, 4);
        assert!(is_exactly_adapted(&c, &PermutationGroup::symmetric(3)));
        assert!(!is_exactly_adapted(&c, &PermutationGroup::alternating(3).unwrap()));
        let part = LabelledComplex::partite(vec![vec![0, 1, 2], vec![0, 1, 2], vec![3, 4], vec![5]], 6).unwrap();
        let g = PermutationGroup::part_stabilizer(vec![vec![0, 1], vec![2], vec![3]]).unwrap();
        assert!(is_exactly_adapted(&part, &g));
    }

    #[test]
    fn orbit_counts() {
        let c = LabelledComplex::complete(3, 5);
        assert_eq!(orbits(&c, &PermutationGroup::symmetric(3), 2).unwrap().len(), 10);
        assert_eq!(orbits(&c, &PermutationGroup::trivial(3), 2).unwrap().len(), 60);
        let big = LabelledComplex::complete(9, 5);
        let os = orbits(&big, &PermutationGroup::symmetric(9), 3).unwrap();
        assert_eq!(os.len(), 10);
        let total: usize = os.iter().map(|o| o.members().len()).sum();
        assert_eq!(total as u128, big.level(3).len() as u128);
    }

    #[test]
    fn quotients() {
        let s4 = PermutationGroup::symmetric(4);
        let q = s4.quotient(0b1000);
        assert_eq!(q.support(), 0b0111);
        assert_eq!(q.order(), 6);
        assert_eq!(PermutationGroup::trivial(3).quotient(0b1).order(), 1);
        let p = PermutationGroup::part_stabilizer(vec![vec![0, 1, 2, 3], vec![4, 5]]).unwrap();
        let e = PermutationGroup::from_generators(6, &p.generator_words()).unwrap();
        let pq = p.quotient(0b010000);
        let eq = e.quotient(0b010000);
        assert_eq!(pq.order(), 24);
        assert_eq!(pq.elements().unwrap(), eq.elements().unwrap());
    }
}
