//! Exact multiset cover. Items are atom coefficients per orbit (or raw
//! coordinates), molecules consume items, and every item demand must be met
//! exactly.

use std::collections::HashMap;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Count, Heuristic, Outcome, SearchConfig, Solve, Unsat};
use crate::complex::{label_iter, subsets_of_size, Injection, Label, LabelSet, LabelledComplex};
use crate::error::{Error, Result};
use crate::vsys::{AtomDecomposition, EdgeVector, Selection, VectorSystem};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CoverStats {
    pub nodes: u64,
    pub items: usize,
    pub molecules: usize,
    /// Embeddings visited while enumerating molecules.
    pub embeddings: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) enum ItemKey {
    /// Atom of the given type at an orbit representative.
    Atom(Injection, usize),
    /// Colour `d` at a map.
    Coord(Injection, usize),
}

#[derive(Clone, Debug)]
pub(crate) struct Molecule {
    pub items: Vec<(u32, u64)>,
    /// Embeddings with exactly this contribution.
    pub reps: Vec<(usize, Injection)>,
}

pub(crate) struct Problem {
    pub demand: Vec<u64>,
    pub molecules: Vec<Molecule>,
    pub embeddings: u64,
}

pub(crate) enum Setup {
    Ready(Problem),
    Unsat(Unsat),
    Budget(u64),
}

fn small(x: &BigInt) -> u64 {
    x.to_u64().expect("demand fits in 64 bits")
}

/// Per copy and depth, the checks that become decidable once the label at
/// that depth is assigned.
enum Check {
    /// Image label set and one `θ` onto it.
    Atom(Injection),
    /// `θ` with its positive colour weights.
    Coord(Injection, Vec<(usize, u64)>),
}

fn max_label(mask: LabelSet) -> Label {
    (31 - mask.leading_zeros()) as Label
}

/// Items and molecules for `g`. With `dedupe`, embeddings with the same
/// contribution are merged into one molecule.
pub(crate) fn setup(phi: &LabelledComplex, vs: &VectorSystem, g: &EdgeVector, atoms: bool, dedupe: bool, budget: u64) -> Result<Setup> {
    let mut keys = Vec::new();
    let mut demand = Vec::new();
    if atoms {
        match vs.atom_decomposition(g) {
            AtomDecomposition::NotInSpan(rep) => return Ok(Setup::Unsat(Unsat::NotInSpan(rep))),
            AtomDecomposition::Coefficients(per) => {
                for (rep, coeffs) in per {
                    for (t, c) in coeffs {
                        if c.is_negative() {
                            return Ok(Setup::Unsat(Unsat::Negative(rep)));
                        }
                        keys.push(ItemKey::Atom(rep.clone(), t));
                        demand.push(small(&c));
                    }
                }
            }
        }
    } else {
        for (psi, v) in g.iter() {
            for (d, x) in v.iter().enumerate() {
                if x.is_negative() {
                    return Ok(Setup::Unsat(Unsat::Negative(psi.clone())));
                }
                if !x.is_zero() {
                    keys.push(ItemKey::Coord(psi.clone(), d));
                    demand.push(small(x));
                }
            }
        }
    }
    let index: HashMap<ItemKey, u32> = keys.iter().cloned().enumerate().map(|(i, k)| (k, i as u32)).collect();
    let labels: Vec<Label> = label_iter(vs.group().support()).collect();
    let depth_of: HashMap<Label, usize> = labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();

    let mut checks: Vec<Vec<Vec<Check>>> = Vec::new();
    for copy in vs.copies() {
        let mut per = (0..labels.len()).map(|_| Vec::new()).collect::<Vec<_>>();
        if atoms {
            for c in subsets_of_size(vs.group().support(), vs.r()) {
                let into = vs.group().maps_into(c);
                if copy.support().any(|(t, _)| into.contains(t)) {
                    per[depth_of[&max_label(c)]].push(Check::Atom(into[0].clone()));
                }
            }
        } else {
            for (theta, v) in copy.support() {
                let mut w = Vec::new();
                for (d, x) in v.iter().enumerate() {
                    if x.is_negative() {
                        return Err(Error::Precondition("coordinate search needs nonnegative vectors".into()));
                    }
                    if !x.is_zero() {
                        w.push((d, small(x)));
                    }
                }
                per[depth_of[&max_label(theta.image_mask())]].push(Check::Coord(theta.clone(), w));
            }
        }
        checks.push(per);
    }

    struct Walk<'a> {
        phi: &'a LabelledComplex,
        vs: &'a VectorSystem,
        labels: &'a [Label],
        index: &'a HashMap<ItemKey, u32>,
        demand: &'a [u64],
        checks: &'a [Vec<Check>],
        copy: usize,
        visited: u64,
        budget: u64,
        out: &'a mut Vec<(Vec<(u32, u64)>, (usize, Injection))>,
    }

    impl Walk<'_> {
        fn rec(&mut self, depth: usize, partial: &Injection, items: &mut Vec<(u32, u64)>) -> bool {
            if depth == self.labels.len() {
                self.visited += 1;
                if self.visited > self.budget {
                    return false;
                }
                if !items.is_empty() {
                    let mut key = items.clone();
                    key.sort_unstable();
                    self.out.push((key, (self.copy, partial.clone())));
                }
                return true;
            }
            let l = self.labels[depth];
            for v in self.phi.candidates(partial, l) {
                let next = partial.with(l, v);
                let mark = items.len();
                let mut ok = true;
                for check in &self.checks[depth] {
                    match check {
                        Check::Atom(theta) => {
                            let (rep, t) = self.vs.atom_at(self.copy, &next, theta);
                            if Some(t) == self.vs.type_table(rep.dom()).zero {
                                continue;
                            }
                            match self.index.get(&ItemKey::Atom(rep, t)) {
                                Some(&i) => items.push((i, 1)),
                                None => ok = false,
                            }
                        }
                        Check::Coord(theta, w) => {
                            let psi = next.compose(theta);
                            for &(d, x) in w {
                                match self.index.get(&ItemKey::Coord(psi.clone(), d)) {
                                    Some(&i) if self.demand[i as usize] >= x => items.push((i, x)),
                                    _ => ok = false,
                                }
                            }
                        }
                    }
                    if !ok {
                        break;
                    }
                }
                if ok && !self.rec(depth + 1, &next, items) {
                    return false;
                }
                items.truncate(mark);
            }
            true
        }
    }

    let mut found = Vec::new();
    let mut visited = 0;
    for (c, per) in checks.iter().enumerate() {
        let mut walk = Walk {
            phi,
            vs,
            labels: &labels,
            index: &index,
            demand: &demand,
            checks: per,
            copy: c,
            visited,
            budget,
            out: &mut found,
        };
        let done = walk.rec(0, &Injection::empty(), &mut Vec::new());
        visited = walk.visited;
        if !done {
            return Ok(Setup::Budget(visited));
        }
    }

    let mut molecules: Vec<Molecule> = Vec::new();
    if dedupe {
        let mut by_key: HashMap<Vec<(u32, u64)>, usize> = HashMap::new();
        for (key, rep) in found {
            match by_key.get(&key) {
                Some(&m) => molecules[m].reps.push(rep),
                None => {
                    by_key.insert(key.clone(), molecules.len());
                    molecules.push(Molecule { items: key, reps: vec![rep] });
                }
            }
        }
    } else {
        molecules = found.into_iter().map(|(items, rep)| Molecule { items, reps: vec![rep] }).collect();
    }
    Ok(Setup::Ready(Problem { demand, molecules, embeddings: visited }))
}

enum Flow {
    Continue,
    Stop,
    Budget,
}

struct Search<'a> {
    p: &'a Problem,
    by_item: Vec<Vec<(u32, u64)>>,
    demand: Vec<u64>,
    used: Vec<u32>,
    blocked: Vec<u32>,
    avail: Vec<u32>,
    stack: Vec<u32>,
    nodes: u64,
    budget: u64,
    deadline: Option<Instant>,
    heuristic: Heuristic,
    counting: bool,
    count: u128,
    solution: Option<Vec<u32>>,
}

impl<'a> Search<'a> {
    fn new(p: &'a Problem, cfg: &SearchConfig, counting: bool) -> Self {
        let n = p.molecules.len();
        let mut order: Vec<u32> = (0..n as u32).collect();
        if cfg.seed != 0 {
            order.shuffle(&mut ChaCha8Rng::seed_from_u64(cfg.seed));
        }
        let mut by_item: Vec<Vec<(u32, u64)>> = vec![Vec::new(); p.demand.len()];
        for &m in &order {
            for &(i, w) in &p.molecules[m as usize].items {
                by_item[i as usize].push((m, w));
            }
        }
        let demand = p.demand.clone();
        let mut blocked = vec![0u32; n];
        for (m, mol) in p.molecules.iter().enumerate() {
            blocked[m] = mol.items.iter().filter(|&&(i, w)| demand[i as usize] < w).count() as u32;
        }
        let mut avail = vec![0u32; demand.len()];
        for (m, mol) in p.molecules.iter().enumerate() {
            if blocked[m] == 0 {
                for &(i, _) in &mol.items {
                    avail[i as usize] += 1;
                }
            }
        }
        Search {
            p,
            by_item,
            demand,
            used: vec![0; n],
            blocked,
            avail,
            stack: Vec::new(),
            nodes: 0,
            budget: cfg.node_budget,
            deadline: cfg.time_limit.map(|t| Instant::now() + t),
            heuristic: cfg.heuristic,
            counting,
            count: 0,
            solution: None,
        }
    }

    fn fits(&self, m: usize) -> bool {
        self.blocked[m] == 0 && (self.used[m] as usize) < self.p.molecules[m].reps.len()
    }

    fn shift_avail(&mut self, m: usize, up: bool) {
        for &(i, _) in &self.p.molecules[m].items {
            if up {
                self.avail[i as usize] += 1;
            } else {
                self.avail[i as usize] -= 1;
            }
        }
    }

    fn apply(&mut self, m: usize) {
        let before = self.fits(m);
        self.used[m] += 1;
        if before && !self.fits(m) {
            self.shift_avail(m, false);
        }
        for &(i, w) in &self.p.molecules[m].items {
            let i = i as usize;
            let old = self.demand[i];
            let new = old - w;
            self.demand[i] = new;
            for k in 0..self.by_item[i].len() {
                let (m2, w2) = self.by_item[i][k];
                if old >= w2 && new < w2 {
                    let m2 = m2 as usize;
                    let was = self.fits(m2);
                    self.blocked[m2] += 1;
                    if was {
                        self.shift_avail(m2, false);
                    }
                }
            }
        }
        self.stack.push(m as u32);
    }

    fn unapply(&mut self, m: usize) {
        self.stack.pop();
        for &(i, w) in &self.p.molecules[m].items {
            let i = i as usize;
            let old = self.demand[i];
            let new = old + w;
            self.demand[i] = new;
            for k in 0..self.by_item[i].len() {
                let (m2, w2) = self.by_item[i][k];
                if old < w2 && new >= w2 {
                    let m2 = m2 as usize;
                    self.blocked[m2] -= 1;
                    if self.fits(m2) {
                        self.shift_avail(m2, true);
                    }
                }
            }
        }
        let before = self.fits(m);
        self.used[m] -= 1;
        if !before && self.fits(m) {
            self.shift_avail(m, true);
        }
    }

    fn pick(&self) -> Option<usize> {
        let open = (0..self.demand.len()).filter(|&i| self.demand[i] > 0);
        match self.heuristic {
            Heuristic::FirstItem => open.into_iter().next(),
            Heuristic::MinCandidates => open.min_by_key(|&i| self.avail[i]),
        }
    }

    /// Covers the demand of `item` by molecules at positions `≥ start` in
    /// nondecreasing order, so each multiset is produced once.
    fn dfs(&mut self, focus: Option<(usize, usize)>) -> Flow {
        let (item, start) = match focus {
            Some((i, s)) if self.demand[i] > 0 => (i, s),
            _ => match self.pick() {
                None => {
                    if self.counting {
                        self.count += 1;
                        return Flow::Continue;
                    }
                    self.solution = Some(self.stack.clone());
                    return Flow::Stop;
                }
                Some(i) => (i, 0),
            },
        };
        if self.avail[item] == 0 {
            return Flow::Continue;
        }
        for pos in start..self.by_item[item].len() {
            let m = self.by_item[item][pos].0 as usize;
            if !self.fits(m) {
                continue;
            }
            self.nodes += 1;
            if self.nodes > self.budget {
                return Flow::Budget;
            }
            if self.nodes % 1024 == 0 && self.deadline.is_some_and(|d| Instant::now() > d) {
                return Flow::Budget;
            }
            self.apply(m);
            let flow = self.dfs(Some((item, pos)));
            self.unapply(m);
            match flow {
                Flow::Continue => {}
                other => return other,
            }
        }
        Flow::Continue
    }

    fn selection(&self, chosen: &[u32]) -> Selection {
        let mut mult: HashMap<u32, usize> = HashMap::new();
        let mut sel = Selection::new();
        for &m in chosen {
            let k = mult.entry(m).or_insert(0);
            let (c, emb) = &self.p.molecules[m as usize].reps[*k];
            *k += 1;
            sel.add(*c, emb.clone(), BigInt::from(1));
        }
        sel
    }
}

fn stats(p: &Problem, nodes: u64) -> CoverStats {
    CoverStats { nodes, items: p.demand.len(), molecules: p.molecules.len(), embeddings: p.embeddings }
}

fn use_atoms(vs: &VectorSystem, cfg: &SearchConfig) -> bool {
    cfg.symmetry_pruning && vs.is_elementary()
}

pub(crate) fn solve(phi: &LabelledComplex, vs: &VectorSystem, g: &EdgeVector, cfg: &SearchConfig) -> Result<Solve> {
    let p = match setup(phi, vs, g, use_atoms(vs, cfg), true, cfg.node_budget)? {
        Setup::Ready(p) => p,
        Setup::Unsat(u) => return Ok(Solve { outcome: Outcome::Unsat(u), stats: CoverStats::default() }),
        Setup::Budget(e) => return Ok(Solve { outcome: Outcome::Budget, stats: CoverStats { embeddings: e, ..Default::default() } }),
    };
    let mut s = Search::new(&p, cfg, false);
    s.budget = cfg.node_budget.saturating_sub(p.embeddings).max(1);
    let flow = s.dfs(None);
    let outcome = match flow {
        Flow::Stop => Outcome::Found(s.selection(s.solution.as_ref().expect("stopped on a solution"))),
        Flow::Continue => Outcome::Unsat(Unsat::Exhausted),
        Flow::Budget => Outcome::Budget,
    };
    Ok(Solve { outcome, stats: stats(&p, s.nodes) })
}

pub(crate) fn count(phi: &LabelledComplex, vs: &VectorSystem, g: &EdgeVector, cfg: &SearchConfig) -> Result<Count> {
    let p = match setup(phi, vs, g, use_atoms(vs, cfg), true, cfg.node_budget)? {
        Setup::Ready(p) => p,
        Setup::Unsat(_) => return Ok(Count::Exact(0)),
        Setup::Budget(_) => return Ok(Count::Budget(0)),
    };
    let mut s = Search::new(&p, cfg, true);
    s.budget = cfg.node_budget.saturating_sub(p.embeddings).max(1);
    Ok(match s.dfs(None) {
        Flow::Budget => Count::Budget(s.count),
        _ => Count::Exact(s.count),
    })
}
