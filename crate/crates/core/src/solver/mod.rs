//! Decomposition engines: exact multiset-cover search over molecules, exact
//! integral solves, verification, a random greedy simulator and generic
//! matrices over prime fields.

mod cover;
pub mod generic;
pub mod nibble;

use std::collections::BTreeMap;
use std::time::Duration;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::complex::{Injection, LabelledComplex};
use crate::error::{Error, Result};
use crate::lattice::{lattice_member_l, Method, MoleculeLattice};
use crate::vsys::{EdgeVector, Selection, VectorSystem};

pub use cover::CoverStats;
pub use generic::{generic_matrix, is_prime, wide_prime, smallest_admissible_prime, GenericMatrix, GenericReport};
pub use nibble::{nibble_greedy, GreedyTrace, Policy};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Heuristic {
    /// Branch on the demanded item with the fewest fitting molecules.
    MinCandidates,
    /// Branch on the first demanded item.
    FirstItem,
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub node_budget: u64,
    pub heuristic: Heuristic,
    /// Permutes the molecule order; 0 keeps the canonical order.
    pub seed: u64,
    /// Search over atom coefficients per orbit instead of raw coordinates.
    pub symmetry_pruning: bool,
    pub time_limit: Option<Duration>,
    /// Reject targets outside the decomposition lattice before searching.
    pub lattice_precheck: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            node_budget: 10_000_000,
            heuristic: Heuristic::MinCandidates,
            seed: 0,
            symmetry_pruning: true,
            time_limit: None,
            lattice_precheck: true,
        }
    }
}

/// Why a target has no decomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Unsat {
    /// Fails the lattice test at `(level, orbit representative)`.
    NotInLattice(Option<(usize, Injection)>),
    /// No integer atom expression at this orbit.
    NotInSpan(Injection),
    /// Negative atom coefficient (or negative entry) at this map.
    Negative(Injection),
    /// The search space was exhausted.
    Exhausted,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome<T> {
    Found(T),
    Unsat(Unsat),
    Budget,
}

impl<T> Outcome<T> {
    pub fn found(&self) -> Option<&T> {
        match self {
            Outcome::Found(x) => Some(x),
            _ => None,
        }
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self, Outcome::Unsat(_))
    }

    pub fn is_budget(&self) -> bool {
        matches!(self, Outcome::Budget)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solve {
    pub outcome: Outcome<Selection>,
    pub stats: CoverStats,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Count {
    Exact(u128),
    /// Budget hit after counting this many.
    Budget(u128),
}

fn check_labels(phi: &LabelledComplex, vs: &VectorSystem) -> Result<()> {
    if phi.labels() != vs.group().support() {
        return Err(Error::DomainMismatch("the complex and the group use different label sets".into()));
    }
    Ok(())
}

/// A 0/1 decomposition of `g` into molecules, by exact multiset cover.
pub fn solve_exact(phi: &LabelledComplex, vs: &VectorSystem, g: &EdgeVector, cfg: &SearchConfig) -> Result<Solve> {
    check_labels(phi, vs)?;
    if cfg.lattice_precheck {
        let m = lattice_member_l(phi, vs, g, Method::Sharp)?;
        if !m.member {
            return Ok(Solve { outcome: Outcome::Unsat(Unsat::NotInLattice(m.failing)), stats: CoverStats::default() });
        }
    }
    cover::solve(phi, vs, g, cfg)
}

/// Number of distinct decompositions, as multisets of distinct molecules.
pub fn count_exact(phi: &LabelledComplex, vs: &VectorSystem, g: &EdgeVector, cfg: &SearchConfig) -> Result<Count> {
    check_labels(phi, vs)?;
    cover::count(phi, vs, g, cfg)
}

/// An integer combination of molecules with boundary `j`; `Unsat` means `j`
/// is outside the molecule lattice.
pub fn solve_integral(phi: &LabelledComplex, vs: &VectorSystem, j: &EdgeVector, cfg: &SearchConfig) -> Result<Outcome<Selection>> {
    check_labels(phi, vs)?;
    let lattice = match MoleculeLattice::new(phi, vs, cfg.node_budget) {
        Ok(l) => l,
        Err(Error::Budget(_)) => return Ok(Outcome::Budget),
        Err(e) => return Err(e),
    };
    Ok(match lattice.solve(j) {
        None => Outcome::Unsat(Unsat::NotInLattice(None)),
        Some(parts) => {
            let mut sel = Selection::new();
            for (c, emb, x) in parts {
                sel.add(c, emb, x);
            }
            Outcome::Found(sel)
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum VerifyMode {
    Set,
    Integral,
}

/// One mismatching coordinate: map, colour, target value, boundary value.
pub type Mismatch = (Injection, usize, BigInt, BigInt);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub ok: bool,
    /// A coefficient outside `{0, 1}` in set mode.
    pub mode_violation: bool,
    /// Embeddings that are invalid, or not admissible for the target in set mode.
    pub bad_keys: Vec<(usize, Injection)>,
    /// The first 20 mismatching coordinates.
    pub diff: Vec<Mismatch>,
    pub mismatches: usize,
}

/// `γ(φ) ≤_γ g`: `g − γ(φ)` is a sum of atoms on every orbit `γ(φ)` touches,
/// and `g` itself is one elsewhere.
pub fn admissible(vs: &VectorSystem, g: &EdgeVector, copy: usize, emb: &Injection) -> bool {
    let m = vs.molecule_unchecked(copy, emb);
    let orbits = vs.support_orbits(&m);
    let mut local = EdgeVector::new(vs.dim());
    for rep in &orbits {
        for psi in vs.group().orbit_members(rep) {
            local.add_at(&psi, &g.value(&psi), &BigInt::one());
        }
    }
    vs.nonnegative_decomposition(&local.minus(&m)).is_some()
}

pub fn verify(phi: &LabelledComplex, vs: &VectorSystem, sel: &Selection, g: &EdgeVector, mode: VerifyMode) -> VerifyReport {
    let mut bad_keys = Vec::new();
    let mut mode_violation = false;
    let mut good = Selection::new();
    let whole_ok = mode == VerifyMode::Integral || vs.nonnegative_decomposition(g).is_some();
    for ((c, emb), x) in sel.iter() {
        let valid = *c < vs.copies().len() && vs.molecule(phi, *c, emb).is_ok();
        if !valid {
            bad_keys.push((*c, emb.clone()));
            continue;
        }
        if mode == VerifyMode::Set {
            if !x.is_one() {
                mode_violation = true;
            }
            if !whole_ok || !admissible(vs, g, *c, emb) {
                bad_keys.push((*c, emb.clone()));
            }
        }
        good.add(*c, emb.clone(), x.clone());
    }
    let boundary = vs.boundary(phi, &good).expect("keys were validated");
    let all = g.diff(&boundary);
    let mismatches = all.len();
    let diff: Vec<Mismatch> = all.into_iter().take(20).collect();
    VerifyReport { ok: mismatches == 0 && bad_keys.is_empty() && !mode_violation, mode_violation, bad_keys, diff, mismatches }
}

/// Sum of `|coefficient|` per copy, for summaries.
pub fn selection_weight(sel: &Selection) -> BTreeMap<usize, BigInt> {
    let mut out = BTreeMap::new();
    for ((c, _), x) in sel.iter() {
        *out.entry(*c).or_insert_with(BigInt::zero) += x.abs();
    }
    out
}
