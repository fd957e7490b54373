//! Labelled complexes: downward-closed families of injections from subsets of
//! a label set into a finite vertex set.
//!
//! Labels are `0..32` internally and label sets are bitmasks. File formats and
//! `Display` output use 1-based labels.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};

pub type Label = u8;
pub type Vertex = u32;
pub type LabelSet = u32;

pub const MAX_LABELS: usize = 32;

pub fn label_iter(mask: LabelSet) -> impl Iterator<Item = Label> + Clone {
    let mut m = mask;
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let l = m.trailing_zeros() as Label;
            m &= m - 1;
            Some(l)
        }
    })
}

pub fn mask_of(labels: impl IntoIterator<Item = Label>) -> LabelSet {
    labels.into_iter().fold(0, |m, l| m | (1 << l))
}

pub fn full_mask(q: usize) -> LabelSet {
    if q >= 32 {
        u32::MAX
    } else {
        (1u32 << q) - 1
    }
}

/// Compares two label sets as sorted label sequences.
pub fn cmp_label_sets(a: LabelSet, b: LabelSet) -> Ordering {
    let mut x = label_iter(a);
    let mut y = label_iter(b);
    loop {
        match (x.next(), y.next()) {
            (None, None) => return Ordering::Equal,
            (None, Some(_)) => return Ordering::Less,
            (Some(_), None) => return Ordering::Greater,
            (Some(p), Some(q)) if p != q => return p.cmp(&q),
            _ => {}
        }
    }
}

/// All subsets of `mask` with exactly `k` elements, in canonical order.
pub fn subsets_of_size(mask: LabelSet, k: usize) -> Vec<LabelSet> {
    let labels: Vec<Label> = label_iter(mask).collect();
    let mut out = Vec::new();
    if k > labels.len() {
        return out;
    }
    let n = labels.len();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(mask_of(idx.iter().map(|&i| labels[i])));
        let mut i = k;
        let next = loop {
            if i == 0 {
                break None;
            }
            i -= 1;
            if idx[i] < i + n - k {
                break Some(i);
            }
        };
        match next {
            None => return out,
            Some(i) => {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
            }
        }
    }
}

/// All submasks of `mask` (including 0 and `mask`).
pub fn submasks(mask: LabelSet) -> Vec<LabelSet> {
    let mut out = Vec::with_capacity(1 << mask.count_ones());
    let mut s = mask;
    loop {
        out.push(s);
        if s == 0 {
            break;
        }
        s = (s - 1) & mask;
    }
    out
}

/// An injection from a set of labels into vertices (or into labels, when used
/// as a relabelling). Images are stored in increasing label order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Injection {
    dom: LabelSet,
    img: SmallVec<[Vertex; 10]>,
}

impl Injection {
    pub fn empty() -> Self {
        Injection { dom: 0, img: SmallVec::new() }
    }

    pub fn from_pairs(pairs: &[(Label, Vertex)]) -> Result<Self> {
        let mut p = pairs.to_vec();
        p.sort_unstable();
        let mut dom = 0u32;
        let mut img = SmallVec::new();
        for &(l, v) in &p {
            if (l as usize) >= MAX_LABELS {
                return Err(Error::Parse(format!("label {} out of range", l as usize + 1)));
            }
            if dom & (1 << l) != 0 {
                return Err(Error::Parse(format!("label {} assigned twice", l as usize + 1)));
            }
            dom |= 1 << l;
            img.push(v);
        }
        let mut seen: Vec<Vertex> = img.to_vec();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Parse("map is not injective".into()));
        }
        Ok(Injection { dom, img })
    }

    /// Builds from a domain and images listed in increasing label order.
    /// Injectivity is the caller's responsibility.
    pub(crate) fn from_raw(dom: LabelSet, img: &[Vertex]) -> Self {
        debug_assert_eq!(dom.count_ones() as usize, img.len());
        Injection { dom, img: SmallVec::from_slice(img) }
    }

    /// The identity relabelling on `mask`.
    pub fn identity(mask: LabelSet) -> Self {
        Injection { dom: mask, img: label_iter(mask).map(Vertex::from).collect() }
    }

    pub fn dom(&self) -> LabelSet {
        self.dom
    }

    pub fn len(&self) -> usize {
        self.img.len()
    }

    pub fn is_empty(&self) -> bool {
        self.img.is_empty()
    }

    pub fn images(&self) -> &[Vertex] {
        &self.img
    }

    pub fn pairs(&self) -> impl Iterator<Item = (Label, Vertex)> + '_ {
        label_iter(self.dom).zip(self.img.iter().copied())
    }

    fn slot(&self, l: Label) -> usize {
        (self.dom & ((1u32 << l) - 1)).count_ones() as usize
    }

    pub fn get(&self, l: Label) -> Option<Vertex> {
        if (l as usize) < MAX_LABELS && self.dom & (1 << l) != 0 {
            Some(self.img[self.slot(l)])
        } else {
            None
        }
    }

    pub fn image_set(&self) -> Vec<Vertex> {
        let mut v = self.img.to_vec();
        v.sort_unstable();
        v
    }

    /// Image as a label set; only meaningful when images are labels.
    pub fn image_mask(&self) -> LabelSet {
        self.img.iter().fold(0, |m, &v| m | (1 << v))
    }

    pub fn uses_vertex(&self, v: Vertex) -> bool {
        self.img.contains(&v)
    }

    pub fn restrict(&self, mask: LabelSet) -> Injection {
        debug_assert_eq!(mask & !self.dom, 0);
        let mut img = SmallVec::new();
        for (k, l) in label_iter(self.dom).enumerate() {
            if mask & (1 << l) != 0 {
                img.push(self.img[k]);
            }
        }
        Injection { dom: mask & self.dom, img }
    }

    /// True if `self ⊆ other` as functions.
    pub fn is_restriction_of(&self, other: &Injection) -> bool {
        if self.dom & !other.dom != 0 {
            return false;
        }
        self.pairs().all(|(l, v)| other.img[other.slot(l)] == v)
    }

    pub fn with(&self, l: Label, v: Vertex) -> Injection {
        debug_assert!(self.dom & (1 << l) == 0);
        let mut img = self.img.clone();
        img.insert(self.slot(l), v);
        Injection { dom: self.dom | (1 << l), img }
    }

    pub fn without(&self, l: Label) -> Injection {
        self.restrict(self.dom & !(1 << l))
    }

    /// `self ∘ inner`, where the images of `inner` are labels in `self`'s domain.
    pub fn compose(&self, inner: &Injection) -> Injection {
        let img = inner.img.iter().map(|&m| self.img[self.slot(m as Label)]).collect();
        Injection { dom: inner.dom, img }
    }

    /// Inverse of a label relabelling.
    pub fn inverse(&self) -> Injection {
        let mut pairs: Vec<(Label, Vertex)> =
            self.pairs().map(|(l, v)| (v as Label, Vertex::from(l))).collect();
        pairs.sort_unstable();
        Injection {
            dom: self.image_mask(),
            img: pairs.into_iter().map(|p| p.1).collect(),
        }
    }

    /// Union of two maps with disjoint domains and images.
    pub fn union(&self, other: &Injection) -> Option<Injection> {
        if self.dom & other.dom != 0 || self.img.iter().any(|v| other.img.contains(v)) {
            return None;
        }
        let mut out = self.clone();
        for (l, v) in other.pairs() {
            out = out.with(l, v);
        }
        Some(out)
    }

    pub fn to_pairs(&self) -> Vec<(Label, Vertex)> {
        self.pairs().collect()
    }
}

impl Ord for Injection {
    fn cmp(&self, other: &Self) -> Ordering {
        cmp_label_sets(self.dom, other.dom).then_with(|| self.img.as_slice().cmp(other.img.as_slice()))
    }
}

impl PartialOrd for Injection {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Injection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Injection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, (l, v)) in self.pairs().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}->{}", l as usize + 1, v)?;
        }
        write!(f, "}}")
    }
}

/// Unary and pairwise admissibility rule for generated complexes.
///
/// A map is admissible iff every label lands in its allowed vertex set and
/// every constrained label pair lands on a vertex pair of the required colour.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rule {
    /// Allowed vertices per label (1-based label index into this list); `None`
    /// allows every vertex.
    pub domains: Vec<Option<Vec<Vertex>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<PairRule>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairRule {
    /// Colour of each coloured vertex pair `(u, v, colour)`.
    pub colours: Vec<(Vertex, Vertex, u32)>,
    /// Required colour for each constrained label pair `(a, b, colour)`, 0-based labels.
    pub required: Vec<(Label, Label, u32)>,
}

#[derive(Clone, Debug)]
struct CompiledRule {
    allowed: Vec<Option<Vec<bool>>>,
    colour: Option<Vec<u32>>,
    required: Vec<Option<u32>>,
}

const NO_COLOUR: u32 = u32::MAX;

impl CompiledRule {
    fn compile(rule: &Rule, n: u32) -> Result<Self> {
        let mut allowed = vec![None; MAX_LABELS];
        for (l, d) in rule.domains.iter().enumerate() {
            if let Some(vs) = d {
                let mut bits = vec![false; n as usize];
                for &v in vs {
                    if v >= n {
                        return Err(Error::Parse(format!("vertex {v} outside [0, {n})")));
                    }
                    bits[v as usize] = true;
                }
                allowed[l] = Some(bits);
            }
        }
        let (colour, required) = match &rule.pairs {
            None => (None, vec![None; MAX_LABELS * MAX_LABELS]),
            Some(pr) => {
                let mut c = vec![NO_COLOUR; (n * n) as usize];
                for &(u, v, col) in &pr.colours {
                    if u >= n || v >= n || u == v {
                        return Err(Error::Parse(format!("bad coloured pair ({u}, {v})")));
                    }
                    c[(u * n + v) as usize] = col;
                    c[(v * n + u) as usize] = col;
                }
                let mut req = vec![None; MAX_LABELS * MAX_LABELS];
                for &(a, b, col) in &pr.required {
                    req[a as usize * MAX_LABELS + b as usize] = Some(col);
                    req[b as usize * MAX_LABELS + a as usize] = Some(col);
                }
                (Some(c), req)
            }
        };
        Ok(CompiledRule { allowed, colour, required })
    }

    fn admits(&self, n: u32, partial: &Injection, l: Label, v: Vertex) -> bool {
        if v >= n || partial.uses_vertex(v) {
            return false;
        }
        if let Some(bits) = &self.allowed[l as usize] {
            if !bits[v as usize] {
                return false;
            }
        }
        if let Some(c) = &self.colour {
            for (m, w) in partial.pairs() {
                if let Some(want) = self.required[l as usize * MAX_LABELS + m as usize] {
                    if c[(v * n + w) as usize] != want {
                        return false;
                    }
                }
            }
        }
        true
    }
}

#[derive(Clone, Debug)]
enum Kind {
    Explicit {
        levels: BTreeMap<LabelSet, Vec<Injection>>,
        index: HashSet<Injection>,
    },
    Generated {
        rule: Rule,
        compiled: CompiledRule,
    },
}

/// A labelled complex on the vertex universe `0..n`.
#[derive(Clone, Debug)]
pub struct LabelledComplex {
    labels: LabelSet,
    n: u32,
    kind: Kind,
}

/// A partial system: admissible maps for some label sets, undefined elsewhere.
pub type PartialSystem = BTreeMap<LabelSet, HashSet<Injection>>;

impl LabelledComplex {
    /// The complete complex: all injections from subsets of `[q]` into `[n]`.
    pub fn complete(q: usize, n: u32) -> Self {
        Self::generated(full_mask(q), n, Rule { domains: vec![None; q], pairs: None })
            .expect("complete rule is valid")
    }

    /// Label `i` may only map into `domains[i]`.
    pub fn partite(domains: Vec<Vec<Vertex>>, n: u32) -> Result<Self> {
        let q = domains.len();
        Self::generated(full_mask(q), n, Rule { domains: domains.into_iter().map(Some).collect(), pairs: None })
    }

    pub fn generated(labels: LabelSet, n: u32, rule: Rule) -> Result<Self> {
        let compiled = CompiledRule::compile(&rule, n)?;
        if rule.domains.len() > MAX_LABELS {
            return Err(Error::Parse("too many labels".into()));
        }
        Ok(LabelledComplex { labels, n, kind: Kind::Generated { rule, compiled } })
    }

    /// Explicit complex from a list of maps; fails unless the list is downward closed.
    pub fn from_maps(labels: LabelSet, n: u32, maps: impl IntoIterator<Item = Injection>) -> Result<Self> {
        let c = Self::explicit_unchecked(labels, n, maps)?;
        if let Some(bad) = c.closure_violation() {
            return Err(Error::Precondition(format!("not downward closed: {bad} has a missing restriction")));
        }
        Ok(c)
    }

    /// Explicit complex generated by the given maps and all their restrictions.
    pub fn generated_by(labels: LabelSet, n: u32, tops: impl IntoIterator<Item = Injection>) -> Result<Self> {
        let mut all = HashSet::new();
        all.insert(Injection::empty());
        for t in tops {
            for s in submasks(t.dom()) {
                all.insert(t.restrict(s));
            }
        }
        Self::explicit_unchecked(labels, n, all)
    }

    fn explicit_unchecked(labels: LabelSet, n: u32, maps: impl IntoIterator<Item = Injection>) -> Result<Self> {
        let mut index = HashSet::new();
        for m in maps {
            if m.dom() & !labels != 0 {
                return Err(Error::DomainMismatch(format!("{m} uses labels outside the label set")));
            }
            if m.images().iter().any(|&v| v >= n) {
                return Err(Error::Parse(format!("{m} uses a vertex outside [0, {n})")));
            }
            index.insert(m);
        }
        if !index.is_empty() {
            index.insert(Injection::empty());
        }
        let mut levels: BTreeMap<LabelSet, Vec<Injection>> = BTreeMap::new();
        for m in &index {
            levels.entry(m.dom()).or_default().push(m.clone());
        }
        for v in levels.values_mut() {
            v.sort();
        }
        Ok(LabelledComplex { labels, n, kind: Kind::Explicit { levels, index } })
    }

    /// Returns a map whose restriction is missing, if any.
    pub fn closure_violation(&self) -> Option<Injection> {
        match &self.kind {
            Kind::Generated { .. } => None,
            Kind::Explicit { index, .. } => {
                let mut all: Vec<&Injection> = index.iter().collect();
                all.sort();
                for m in all {
                    for l in label_iter(m.dom()) {
                        if !index.contains(&m.without(l)) {
                            return Some(m.clone());
                        }
                    }
                }
                None
            }
        }
    }

    pub fn labels(&self) -> LabelSet {
        self.labels
    }

    pub fn q(&self) -> usize {
        self.labels.count_ones() as usize
    }

    /// Size of the vertex universe `0..n`.
    pub fn universe(&self) -> u32 {
        self.n
    }

    pub fn rule(&self) -> Option<&Rule> {
        match &self.kind {
            Kind::Generated { rule, .. } => Some(rule),
            Kind::Explicit { .. } => None,
        }
    }

    pub fn is_explicit(&self) -> bool {
        matches!(self.kind, Kind::Explicit { .. })
    }

    pub fn contains(&self, m: &Injection) -> bool {
        if m.dom() & !self.labels != 0 {
            return false;
        }
        match &self.kind {
            Kind::Explicit { index, .. } => index.contains(m),
            Kind::Generated { compiled, .. } => {
                let mut partial = Injection::empty();
                for (l, v) in m.pairs() {
                    if !compiled.admits(self.n, &partial, l, v) {
                        return false;
                    }
                    partial = partial.with(l, v);
                }
                true
            }
        }
    }

    /// Vertices `v` such that `partial ∪ {l ↦ v}` is admissible, given `partial` is.
    pub fn candidates(&self, partial: &Injection, l: Label) -> Vec<Vertex> {
        match &self.kind {
            Kind::Generated { compiled, .. } => {
                (0..self.n).filter(|&v| compiled.admits(self.n, partial, l, v)).collect()
            }
            Kind::Explicit { index, .. } => (0..self.n)
                .filter(|&v| !partial.uses_vertex(v) && index.contains(&partial.with(l, v)))
                .collect(),
        }
    }

    /// Calls `f` on every map of `Φ_mask` extending `psi`, in canonical order.
    pub fn for_each_extension(&self, psi: &Injection, mask: LabelSet, f: &mut dyn FnMut(&Injection)) {
        if psi.dom() & !mask != 0 || mask & !self.labels != 0 || !self.contains(psi) {
            return;
        }
        match &self.kind {
            Kind::Explicit { levels, .. } => {
                if let Some(list) = levels.get(&mask) {
                    for m in list.iter().filter(|m| psi.is_restriction_of(m)) {
                        f(m);
                    }
                }
            }
            Kind::Generated { compiled, .. } => {
                let todo: Vec<Label> = label_iter(mask & !psi.dom()).collect();
                self.extend_rec(compiled, psi, &todo, f);
            }
        }
    }

    fn extend_rec(&self, rule: &CompiledRule, partial: &Injection, todo: &[Label], f: &mut dyn FnMut(&Injection)) {
        match todo.split_first() {
            None => f(partial),
            Some((&l, rest)) => {
                // Lower labels are assigned first, so images enumerate in
                // lexicographic order within a fixed domain.
                for v in 0..self.n {
                    if rule.admits(self.n, partial, l, v) {
                        self.extend_rec(rule, &partial.with(l, v), rest, f);
                    }
                }
            }
        }
    }

    pub fn extensions(&self, psi: &Injection, mask: LabelSet) -> Vec<Injection> {
        let mut out = Vec::new();
        self.for_each_extension(psi, mask, &mut |m| out.push(m.clone()));
        out
    }

    /// `Φ_B` in canonical order.
    pub fn maps(&self, mask: LabelSet) -> Vec<Injection> {
        self.extensions(&Injection::empty(), mask)
    }

    pub fn count_extensions_of(&self, psi: &Injection, mask: LabelSet) -> u128 {
        if let Kind::Generated { rule, .. } = &self.kind {
            if rule.pairs.is_none() && rule.domains.iter().all(Option::is_none) && self.contains(psi) && psi.dom() & !mask == 0 && mask & !self.labels == 0 {
                let free = (mask & !psi.dom()).count_ones() as u128;
                let avail = self.n as u128 - psi.len() as u128;
                return falling(avail, free);
            }
        }
        let mut c = 0u128;
        self.for_each_extension(psi, mask, &mut |_| c += 1);
        c
    }

    pub fn count(&self, mask: LabelSet) -> u128 {
        self.count_extensions_of(&Injection::empty(), mask)
    }

    /// All label sets of size `i` in canonical order.
    pub fn label_sets(&self, i: usize) -> Vec<LabelSet> {
        subsets_of_size(self.labels, i)
    }

    /// `Φ_i`: all maps with `i` labels, in canonical order.
    pub fn level(&self, i: usize) -> Vec<Injection> {
        self.label_sets(i).into_iter().flat_map(|b| self.maps(b)).collect()
    }

    /// `V(Φ)`: vertices in the image of some map.
    pub fn vertices(&self) -> Vec<Vertex> {
        let mut vs = BTreeSet::new();
        for l in label_iter(self.labels) {
            let one = 1u32 << l;
            for v in self.candidates(&Injection::empty(), l) {
                if self.contains(&Injection::from_raw(one, &[v])) {
                    vs.insert(v);
                }
            }
        }
        vs.into_iter().collect()
    }

    /// Every map of the complex (all levels), canonical order. Small instances only.
    pub fn all_maps(&self) -> Vec<Injection> {
        (0..=self.q()).flat_map(|i| self.level(i)).collect()
    }

    /// `Φ[Φ′]`: keep maps all of whose restrictions to defined label sets are admissible.
    pub fn restrict(&self, partial: &PartialSystem) -> Result<LabelledComplex> {
        for &b in partial.keys() {
            if b & !self.labels != 0 {
                return Err(Error::DomainMismatch(format!(
                    "restriction defined on labels {:?} outside the complex",
                    label_iter(b).map(|l| l as usize + 1).collect::<Vec<_>>()
                )));
            }
        }
        let keep = self.all_maps().into_iter().filter(|m| {
            partial.iter().all(|(&b, set)| b & !m.dom() != 0 || set.contains(&m.restrict(b)))
        });
        Self::explicit_unchecked(self.labels, self.n, keep)
    }

    /// `Φ[U]`: maps with image inside `keep`.
    pub fn restrict_vertices(&self, keep: &[Vertex]) -> LabelledComplex {
        let inside: HashSet<Vertex> = keep.iter().copied().collect();
        match &self.kind {
            Kind::Generated { rule, .. } => {
                let mut r = rule.clone();
                let q = label_iter(self.labels).last().map_or(0, |l| l as usize + 1);
                r.domains.resize(q.max(r.domains.len()), None);
                for d in r.domains.iter_mut() {
                    let base: Vec<Vertex> = match d {
                        Some(vs) => vs.iter().copied().filter(|v| inside.contains(v)).collect(),
                        None => {
                            let mut all: Vec<Vertex> = inside.iter().copied().filter(|&v| v < self.n).collect();
                            all.sort_unstable();
                            all
                        }
                    };
                    *d = Some(base);
                }
                Self::generated(self.labels, self.n, r).expect("restricted rule stays valid")
            }
            Kind::Explicit { index, .. } => {
                let maps = index.iter().filter(|m| m.images().iter().all(|v| inside.contains(v))).cloned();
                Self::explicit_unchecked(self.labels, self.n, maps).expect("filtered maps stay valid")
            }
        }
    }

    /// `Φ/φ*`: the complex on the remaining labels of maps `ψ` with `ψ ∪ φ* ∈ Φ`.
    pub fn neighbourhood(&self, base: &Injection) -> Result<LabelledComplex> {
        if !self.contains(base) {
            return Err(Error::InvalidBase(format!("{base} is not in the complex")));
        }
        let rest = self.labels & !base.dom();
        match &self.kind {
            Kind::Generated { rule, compiled } => {
                let q = label_iter(self.labels).last().map_or(0, |l| l as usize + 1);
                let mut domains = vec![None; q];
                for l in label_iter(rest) {
                    let vs: Vec<Vertex> = (0..self.n)
                        .filter(|&v| {
                            compiled.admits(self.n, base, l, v)
                        })
                        .collect();
                    domains[l as usize] = Some(vs);
                }
                let pairs = rule.pairs.as_ref().map(|pr| PairRule {
                    colours: pr.colours.clone(),
                    required: pr
                        .required
                        .iter()
                        .copied()
                        .filter(|&(a, b, _)| rest & (1 << a) != 0 && rest & (1 << b) != 0)
                        .collect(),
                });
                Self::generated(rest, self.n, Rule { domains, pairs })
            }
            Kind::Explicit { index, .. } => {
                let maps = index
                    .iter()
                    .filter(|m| base.is_restriction_of(m))
                    .map(|m| m.restrict(m.dom() & !base.dom()))
                    .collect::<Vec<_>>();
                Self::explicit_unchecked(rest, self.n, maps)
            }
        }
    }

    /// Materializes every level as an explicit complex.
    pub fn to_explicit(&self) -> LabelledComplex {
        match &self.kind {
            Kind::Explicit { .. } => self.clone(),
            Kind::Generated { .. } => {
                Self::explicit_unchecked(self.labels, self.n, self.all_maps()).expect("maps of a valid complex")
            }
        }
    }
}

pub(crate) fn falling(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i))
}

/// Partite template `R(s)`: label `i` may map to the vertices `(i, x)`, `x < s`,
/// encoded as `i * s + x`.
pub fn partite_template(labels: LabelSet, s: u32) -> Result<LabelledComplex> {
    if s == 0 {
        return Err(Error::Precondition("template width must be positive".into()));
    }
    let top = label_iter(labels).last().map_or(0, |l| l as u32 + 1);
    let mut domains = vec![None; top as usize];
    for l in label_iter(labels) {
        domains[l as usize] = Some((0..s).map(|x| l as u32 * s + x).collect());
    }
    LabelledComplex::generated(labels, top * s, Rule { domains, pairs: None })
}

/// An extension `(H, F, φ)`: a partite template, a frozen vertex set and an
/// embedding of the frozen part.
#[derive(Clone, Debug)]
pub struct Extension {
    template: LabelledComplex,
    width: u32,
    frozen: BTreeSet<Vertex>,
    base: BTreeMap<Vertex, Vertex>,
}

/// A constraint for [`count_extensions`]: template maps whose compositions must
/// land in `allowed`.
#[derive(Clone, Debug)]
pub struct Constraint {
    pub maps: Vec<Injection>,
    pub allowed: HashSet<Injection>,
}

impl Extension {
    pub fn new(template: LabelledComplex, width: u32, base: BTreeMap<Vertex, Vertex>) -> Result<Self> {
        for m in template.level(1) {
            let (l, v) = m.pairs().next().expect("level one map");
            if v / width != l as u32 || v % width >= width {
                return Err(Error::Precondition(format!("template map {m} is not partite")));
            }
        }
        let tv: BTreeSet<Vertex> = template.vertices().into_iter().collect();
        for k in base.keys() {
            if !tv.contains(k) {
                return Err(Error::Precondition(format!("frozen vertex {k} is not a template vertex")));
            }
        }
        let mut imgs: Vec<Vertex> = base.values().copied().collect();
        imgs.sort_unstable();
        if imgs.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidEmbedding("base map is not injective".into()));
        }
        let frozen = base.keys().copied().collect();
        Ok(Extension { template, width, frozen, base })
    }

    pub fn rank(&self) -> u32 {
        self.width
    }

    pub fn template(&self) -> &LabelledComplex {
        &self.template
    }

    pub fn frozen(&self) -> &BTreeSet<Vertex> {
        &self.frozen
    }

    /// `v_E = |V(H) ∖ F|`.
    pub fn free_count(&self) -> usize {
        self.template.vertices().len() - self.frozen.len()
    }
}

fn apply(assign: &BTreeMap<Vertex, Vertex>, psi: &Injection) -> Option<Injection> {
    let img: Option<SmallVec<[Vertex; 10]>> = psi.images().iter().map(|v| assign.get(v).copied()).collect();
    img.map(|img| Injection { dom: psi.dom(), img })
}

/// Number of Φ-embeddings of the template extending the base map, with the
/// constrained template maps landing in their allowed sets.
pub fn count_extensions(host: &LabelledComplex, ext: &Extension, constraints: &[Constraint]) -> u128 {
    let tmaps: Vec<Injection> = ext.template.all_maps().into_iter().filter(|m| !m.is_empty()).collect();
    let free: Vec<Vertex> = ext.template.vertices().into_iter().filter(|v| !ext.frozen.contains(v)).collect();
    let hv = host.vertices();
    let pos: BTreeMap<Vertex, usize> = free.iter().enumerate().map(|(i, &v)| (v, i + 1)).collect();
    // Each template map is checked when its last free vertex is assigned.
    let stage = |m: &Injection| m.images().iter().map(|v| pos.get(v).copied().unwrap_or(0)).max().unwrap_or(0);
    let mut checks: Vec<Vec<(Injection, Option<usize>)>> = vec![Vec::new(); free.len() + 1];
    for m in &tmaps {
        checks[stage(m)].push((m.clone(), None));
    }
    for (ci, c) in constraints.iter().enumerate() {
        for m in &c.maps {
            checks[stage(m)].push((m.clone(), Some(ci)));
        }
    }
    let ok = |assign: &BTreeMap<Vertex, Vertex>, k: usize| {
        checks[k].iter().all(|(m, c)| match apply(assign, m) {
            None => false,
            Some(img) => host.contains(&img) && c.is_none_or(|ci| constraints[ci].allowed.contains(&img)),
        })
    };
    let mut assign = ext.base.clone();
    if !ok(&assign, 0) {
        return 0;
    }
    fn rec(
        k: usize,
        free: &[Vertex],
        hv: &[Vertex],
        assign: &mut BTreeMap<Vertex, Vertex>,
        ok: &dyn Fn(&BTreeMap<Vertex, Vertex>, usize) -> bool,
    ) -> u128 {
        if k == free.len() {
            return 1;
        }
        let mut total = 0;
        for &v in hv {
            if assign.values().any(|&w| w == v) {
                continue;
            }
            assign.insert(free[k], v);
            if ok(assign, k + 1) {
                total += rec(k + 1, free, hv, assign, ok);
            }
            assign.remove(&free[k]);
        }
        total
    }
    rec(0, &free, &hv, &mut assign, &ok)
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtendabilityReport {
    pub rank: u32,
    pub checked: u64,
    pub min_density: BigRational,
    /// Per-label template sizes and frozen sizes of the worst extension.
    pub worst_template: Vec<(u32, u32)>,
    pub worst_base: Vec<(Vertex, Vertex)>,
    pub dense: bool,
}

/// Minimum of `X_E / |V(Φ)|^{v_E}` over all rank-`s` extensions, up to template
/// isomorphism. Only full induced templates are enumerated: removing template
/// maps can only increase the count, so they attain the minimum.
pub fn extendability_certificate(host: &LabelledComplex, omega: &BigRational, s: u32, budget: u64) -> Result<ExtendabilityReport> {
    let labels: Vec<Label> = label_iter(host.labels()).collect();
    let nv = host.vertices().len();
    let mut report = ExtendabilityReport {
        rank: s,
        checked: 0,
        min_density: BigRational::one() * BigInt::from(u64::MAX),
        worst_template: Vec::new(),
        worst_base: Vec::new(),
        dense: true,
    };
    let mut found = false;
    let choices: Vec<(u32, u32)> = (0..=s).flat_map(|c| (0..=c).map(move |f| (c, f))).collect();
    let mut idx = vec![0usize; labels.len()];
    loop {
        let shape: Vec<(u32, u32)> = idx.iter().map(|&i| choices[i]).collect();
        let v_e: u32 = shape.iter().map(|&(c, f)| c - f).sum();
        if v_e > 0 {
            let template = template_for(&labels, &shape, s, false)?;
            let frozen_part = template_for(&labels, &shape, s, true)?;
            let frozen_vertices = frozen_part.vertices();
            let denom = BigInt::from(nv).pow(v_e);
            // Enumerate embeddings of the frozen part.
            let mut bases = Vec::new();
            embed_all(host, &frozen_part, &frozen_vertices, &mut BTreeMap::new(), 0, &mut bases);
            for base in bases {
                report.checked += 1;
                if report.checked > budget {
                    return Err(Error::Budget(format!(
                        "extendability check stopped after {budget} extensions; minimum so far {}",
                        report.min_density
                    )));
                }
                let ext = Extension::new(template.clone(), s, base.clone())?;
                let x = count_extensions(host, &ext, &[]);
                let d = if denom.is_zero() { BigRational::zero() } else { BigRational::new(BigInt::from(x), denom.clone()) };
                if !found || d < report.min_density {
                    found = true;
                    report.min_density = d;
                    report.worst_template = shape.clone();
                    report.worst_base = base.into_iter().collect();
                }
            }
        }
        let mut k = 0;
        loop {
            if k == idx.len() {
                if !found {
                    report.min_density = BigRational::one();
                }
                report.dense = report.min_density >= *omega;
                return Ok(report);
            }
            idx[k] += 1;
            if idx[k] < choices.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

fn template_for(labels: &[Label], shape: &[(u32, u32)], s: u32, frozen: bool) -> Result<LabelledComplex> {
    let full = partite_template(mask_of(labels.iter().copied()), s)?;
    let keep: Vec<Vertex> = labels
        .iter()
        .zip(shape)
        .flat_map(|(&l, &(c, f))| {
            let k = if frozen { f } else { c };
            (0..k).map(move |x| l as u32 * s + x)
        })
        .collect();
    Ok(full.restrict_vertices(&keep))
}

fn embed_all(
    host: &LabelledComplex,
    template: &LabelledComplex,
    verts: &[Vertex],
    assign: &mut BTreeMap<Vertex, Vertex>,
    k: usize,
    out: &mut Vec<BTreeMap<Vertex, Vertex>>,
) {
    if k == verts.len() {
        let tmaps = template.all_maps();
        if tmaps.iter().all(|m| apply(assign, m).is_some_and(|img| host.contains(&img))) {
            out.push(assign.clone());
        }
        return;
    }
    for v in host.vertices() {
        if assign.values().any(|&w| w == v) {
            continue;
        }
        assign.insert(verts[k], v);
        embed_all(host, template, verts, assign, k + 1, out);
        assign.remove(&verts[k]);
    }
}
