//! Property tests tying the lattice tests, solvers and builders together.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use proptest::prelude::*;

use designlat::applications::{build_nonpartite, check_h_divisible, check_hp_divisible, complete_blowup, Multigraph};
use designlat::complex::{Injection, LabelledComplex, Vertex};
use designlat::lattice::{lattice_member_l, lattice_member_oracle, Method};
use designlat::solver::{count_exact, Count, SearchConfig};
use designlat::symmetry::PermutationGroup;
use designlat::vsys::{EdgeVector, Selection, VectorSystem};

fn triangles(n: u32) -> (LabelledComplex, VectorSystem) {
    let inst = build_nonpartite(&Multigraph::complete(3, 2, 1), &Multigraph::complete(n, 2, 1)).unwrap();
    (inst.phi, inst.vs)
}

/// A vector with random entries on a random handful of 2-level maps, plus
/// the boundary of a random integer selection so that both answers occur.
fn mixed_vector(phi: &LabelledComplex, vs: &VectorSystem, noise: &[(usize, i64)], picks: &[(usize, i64)]) -> EdgeVector {
    let level = phi.level(2);
    let tops = phi.level(3);
    let mut sel = Selection::new();
    for &(k, c) in picks {
        sel.add(0, tops[k % tops.len()].clone(), BigInt::from(c));
    }
    let mut j = vs.boundary(phi, &sel).unwrap();
    for &(k, c) in noise {
        j.add_at(&level[k % level.len()], &[BigInt::from(1)], &BigInt::from(c));
    }
    j
}

fn entries() -> impl Strategy<Value = Vec<(usize, i64)>> {
    prop::collection::vec((0usize..1000, -3i64..=3), 0..4)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn sharp_and_shadow_agree(n in 5u32..=6, noise in entries(), picks in entries()) {
        let (phi, vs) = triangles(n);
        let j = mixed_vector(&phi, &vs, &noise, &picks);
        let a = lattice_member_l(&phi, &vs, &j, Method::Sharp).unwrap().member;
        let b = lattice_member_l(&phi, &vs, &j, Method::Shadow).unwrap().member;
        prop_assert_eq!(a, b);
    }

    #[test]
    fn lattice_test_matches_the_oracle(noise in entries(), picks in entries()) {
        let (phi, vs) = triangles(5);
        let j = mixed_vector(&phi, &vs, &noise, &picks);
        let a = lattice_member_l(&phi, &vs, &j, Method::Sharp).unwrap().member;
        let b = lattice_member_oracle(&phi, &vs, &j, 1 << 20).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn boundaries_are_members(picks in prop::collection::vec((0usize..1000, -3i64..=3), 1..6)) {
        let (phi, vs) = triangles(6);
        let j = mixed_vector(&phi, &vs, &[], &picks);
        prop_assert!(lattice_member_l(&phi, &vs, &j, Method::Sharp).unwrap().member);
    }

    #[test]
    fn set_boundaries_are_divisible(picks in prop::collection::btree_set(0usize..35, 1..8)) {
        // Distinct triangles of K_7, summed with multiplicity into a multigraph.
        let all: Vec<Vec<Vertex>> = (0..7).flat_map(|a| (a + 1..7).flat_map(move |b| (b + 1..7).map(move |c| vec![a, b, c]))).collect();
        let mut g = Multigraph::new(7, 2);
        for &k in &picks {
            let t = &all[k];
            for e in [[t[0], t[1]], [t[0], t[2]], [t[1], t[2]]] {
                g.add(&e, 1).unwrap();
            }
        }
        prop_assert!(check_h_divisible(&Multigraph::complete(3, 2, 1), &g).divisible);
    }

    #[test]
    fn partite_set_boundaries_are_divisible(picks in prop::collection::btree_set((0u32..3, 0u32..3, 0u32..3), 1..8)) {
        let h = Multigraph::complete(3, 2, 1);
        let (spec, _) = complete_blowup(&h, 3).unwrap();
        let mut g = Multigraph::new(9, 2);
        for &(a, b, c) in &picks {
            let (x, y, z) = (a, 3 + b, 6 + c);
            for e in [[x, y], [x, z], [y, z]] {
                g.add(&e, 1).unwrap();
            }
        }
        prop_assert!(check_hp_divisible(&h, &spec, &g).unwrap().divisible);
    }

    #[test]
    fn counts_do_not_depend_on_vertex_names(
        edges in prop::collection::btree_set((0u32..7, 0u32..7), 6..16),
        perm in Just((0u32..7).collect::<Vec<_>>()).prop_shuffle(),
    ) {
        let edges: BTreeSet<Vec<Vertex>> = edges.into_iter().filter(|(a, b)| a != b).map(|(a, b)| vec![a.min(b), a.max(b)]).collect();
        let moved: Vec<Vec<Vertex>> = edges.iter().map(|e| e.iter().map(|&v| perm[v as usize]).collect()).collect();
        let h = Multigraph::complete(3, 2, 1);
        let g1 = Multigraph::from_edges(7, 2, &edges).unwrap();
        let g2 = Multigraph::from_edges(7, 2, &moved).unwrap();
        let cfg = SearchConfig::default();
        let count = |g: &Multigraph| {
            let inst = build_nonpartite(&h, g).unwrap();
            count_exact(&inst.phi, &inst.vs, &inst.target, &cfg).unwrap()
        };
        let (a, b) = (count(&g1), count(&g2));
        prop_assert!(matches!(a, Count::Exact(_)));
        prop_assert_eq!(a, b);
    }

    #[test]
    fn use_is_the_least_type_norm(a in -3i64..=3, b in -3i64..=3) {
        // Order-preserving, order-reversing and constant copies on pairs.
        let group = PermutationGroup::symmetric(2);
        let vs = VectorSystem::from_fn(group, 2, 1, &["up", "down", "both"], |copy, theta| {
            let up = theta.images()[0] < theta.images()[1];
            let v = match copy {
                0 => up,
                1 => !up,
                _ => true,
            };
            vec![BigInt::from(u8::from(v))]
        }).unwrap();
        let phi = LabelledComplex::complete(2, 3);
        let psi = Injection::from_pairs(&[(0, 0), (1, 2)]).unwrap();
        let rev = Injection::from_pairs(&[(0, 2), (1, 0)]).unwrap();
        let mut j = EdgeVector::new(1);
        j.add_at(&psi, &[BigInt::from(1)], &BigInt::from(a));
        j.add_at(&rev, &[BigInt::from(1)], &BigInt::from(b));
        // Least |x|+|y|+|z| with x(1,0) + y(0,1) + z(1,1) = (a, b).
        let mut best = i64::MAX;
        for z in -6i64..=6 {
            best = best.min((a - z).abs() + (b - z).abs() + z.abs());
        }
        let u = vs.use_at(&phi, &j, &psi).unwrap();
        prop_assert_eq!(u, BigInt::from(best));
    }
}
