//! Random greedy packing of molecules into a target, reporting the leave.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::cover::{setup, Setup};
use crate::complex::{subsets_of_size, Injection, LabelledComplex};
use crate::error::{Error, Result};
use crate::vsys::{EdgeVector, Selection, VectorSystem};

#[derive(Clone, Debug)]
pub enum Policy {
    Uniform,
    /// Sampling weight per embedding; missing embeddings are never chosen.
    Weighted(BTreeMap<(usize, Injection), f64>),
}

#[derive(Clone, Debug)]
pub struct GreedyTrace {
    pub chosen: Vec<(usize, Injection)>,
    pub leave: EdgeVector,
    /// Residual degree at `(r−1)`-level maps of the complex: value to number of maps.
    pub use_histogram: BTreeMap<BigInt, usize>,
    pub max_use: BigInt,
    /// `max_use / n`.
    pub boundedness: BigRational,
    /// Every prefix left a residual that is a nonnegative sum of atoms.
    pub nonnegative: bool,
    /// No admissible embedding fits the final leave (rechecked independently).
    pub fixpoint: bool,
    pub target_total: BigInt,
}

impl GreedyTrace {
    pub fn steps(&self) -> usize {
        self.chosen.len()
    }

    /// Fraction of the target total left uncovered.
    pub fn leave_fraction(&self) -> f64 {
        if self.target_total.is_zero() {
            return 0.0;
        }
        let f = BigRational::new(self.leave.total(), self.target_total.clone());
        f.to_f64().unwrap_or(f64::NAN)
    }

    pub fn selection(&self) -> Selection {
        let mut sel = Selection::new();
        for (c, emb) in &self.chosen {
            sel.add(*c, emb.clone(), BigInt::from(1));
        }
        sel
    }
}

/// Repeatedly picks an admissible embedding at random (uniformly, or with the
/// given weights) whose molecule still fits the residual, until none fits.
pub fn nibble_greedy(phi: &LabelledComplex, vs: &VectorSystem, g: &EdgeVector, seed: u64, policy: &Policy) -> Result<GreedyTrace> {
    if phi.labels() != vs.group().support() {
        return Err(Error::DomainMismatch("the complex and the group use different label sets".into()));
    }
    let atoms = vs.is_elementary() && vs.nonnegative_decomposition(g).is_some();
    let problem = match setup(phi, vs, g, atoms, true, u64::MAX)? {
        Setup::Ready(p) => Some(p),
        Setup::Unsat(_) => None,
        Setup::Budget(_) => unreachable!("unbounded enumeration"),
    };
    let fits = |residual: &EdgeVector, c: usize, emb: &Injection| {
        if atoms {
            super::admissible(vs, residual, c, emb)
        } else {
            !residual.minus(&vs.molecule_unchecked(c, emb)).has_negative()
        }
    };
    let mut chosen = Vec::new();
    let mut nonnegative = true;
    let mut residual = g.clone();
    if let Some(p) = &problem {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // A random order scanned once picks uniformly among the molecules
        // that still fit; exponential keys do the same for weights.
        let mut keyed: Vec<(f64, usize, usize)> = Vec::with_capacity(p.molecules.len());
        for (m, mol) in p.molecules.iter().enumerate() {
            let (w, rep) = match policy {
                Policy::Uniform => (mol.reps.len() as f64, 0),
                Policy::Weighted(y) => {
                    let ws: Vec<f64> = mol.reps.iter().map(|k| y.get(k).copied().unwrap_or(0.0)).collect();
                    let best = (0..ws.len()).max_by(|&a, &b| ws[a].total_cmp(&ws[b]).then(b.cmp(&a))).unwrap_or(0);
                    (ws.iter().sum(), best)
                }
            };
            if w > 0.0 {
                let u: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
                keyed.push((-u.ln() / w, m, rep));
            }
        }
        keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut demand = p.demand.clone();
        for (_, m, rep) in keyed {
            let mol = &p.molecules[m];
            if mol.items.iter().all(|&(i, w)| demand[i as usize] >= w) {
                for &(i, w) in &mol.items {
                    demand[i as usize] -= w;
                }
                let (c, emb) = &mol.reps[rep];
                // Recheck the step against the residual itself, not the bookkeeping.
                nonnegative &= fits(&residual, *c, emb);
                residual = residual.minus(&vs.molecule_unchecked(*c, emb));
                chosen.push((*c, emb.clone()));
            }
        }
    }
    let leave = residual;
    let fixpoint = match &problem {
        None => true,
        Some(p) => p.molecules.iter().all(|mol| {
            let (c, emb) = &mol.reps[0];
            !fits(&leave, *c, emb)
        }),
    };
    let (use_histogram, max_use) = residual_use(phi, vs.r(), &leave);
    let boundedness = BigRational::new(max_use.clone(), BigInt::from(phi.vertices().len().max(1)));
    Ok(GreedyTrace { chosen, leave, use_histogram, max_use, boundedness, nonnegative, fixpoint, target_total: g.total() })
}

fn residual_use(phi: &LabelledComplex, r: usize, leave: &EdgeVector) -> (BTreeMap<BigInt, usize>, BigInt) {
    if r == 0 {
        let t = leave.total();
        return (BTreeMap::from([(t.clone(), 1)]), t);
    }
    let mut deg: HashMap<Injection, BigInt> = HashMap::new();
    for (psi, v) in leave.iter() {
        let s: BigInt = v.iter().sum();
        for f in subsets_of_size(psi.dom(), r - 1) {
            *deg.entry(psi.restrict(f)).or_insert_with(BigInt::zero) += &s;
        }
    }
    let total_maps = phi.level(r - 1).len();
    let mut hist: BTreeMap<BigInt, usize> = BTreeMap::new();
    for d in deg.values() {
        *hist.entry(d.clone()).or_insert(0) += 1;
    }
    let zeros = total_maps.saturating_sub(deg.len());
    if zeros > 0 {
        *hist.entry(BigInt::zero()).or_insert(0) += zeros;
    }
    let max = deg.values().max().cloned().unwrap_or_default();
    (hist, max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symmetry::PermutationGroup;

    fn triangles() -> VectorSystem {
        VectorSystem::from_fn(PermutationGroup::symmetric(3), 2, 1, &["K3"], |_, _| vec![BigInt::from(1)]).unwrap()
    }

    #[test]
    fn single_molecule_and_zero() {
        let phi = LabelledComplex::complete(3, 5);
        let vs = triangles();
        let emb = Injection::from_pairs(&[(0, 0), (1, 2), (2, 3)]).unwrap();
        let g = vs.molecule(&phi, 0, &emb).unwrap();
        let t = nibble_greedy(&phi, &vs, &g, 1, &Policy::Uniform).unwrap();
        assert_eq!(t.steps(), 1);
        assert!(t.leave.is_zero() && t.fixpoint && t.nonnegative);
        let z = nibble_greedy(&phi, &vs, &EdgeVector::new(1), 1, &Policy::Uniform).unwrap();
        assert_eq!(z.steps(), 0);
        assert!(z.leave.is_zero());
    }

    #[test]
    fn complete_graph_traces() {
        let phi = LabelledComplex::complete(3, 9);
        let vs = triangles();
        let g = EdgeVector::constant(1, phi.level(2), &[BigInt::from(1)]);
        let a = nibble_greedy(&phi, &vs, &g, 7, &Policy::Uniform).unwrap();
        let b = nibble_greedy(&phi, &vs, &g, 7, &Policy::Uniform).unwrap();
        assert_eq!(a.chosen, b.chosen);
        assert!(a.nonnegative && a.fixpoint);
        assert!(a.leave_fraction() < 0.5);
        assert_eq!(a.use_histogram.values().sum::<usize>(), phi.level(1).len());
        let mut y = BTreeMap::new();
        y.insert(a.chosen[0].clone(), 1.0);
        let w = nibble_greedy(&phi, &vs, &g, 3, &Policy::Weighted(y)).unwrap();
        assert_eq!(w.steps(), 1);
        assert!(!w.fixpoint);
    }
}
