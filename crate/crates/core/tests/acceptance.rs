//! Acceptance checks. Each criterion prints one PASS/FAIL line; run with
//! `cargo test -p designlat --test acceptance -- --nocapture` to see them.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use designlat::applications::{
    build_latin, build_nonpartite, build_tryst, build_twisted_octahedron, check_h_divisible, complete_resolution_divisible,
    design_divisible, inclusion_rank, large_set_divisible, octahedron_invariant, reduce_resolvable, resolvable_divisible,
    tryst_regularity, verify_resolvable, Decoded, Multigraph,
};
use designlat::complex::{full_mask, Injection, LabelledComplex};
use designlat::lattice::{
    determinant, diagonal_form, integer_solve, is_null, is_symmetric, lattice_member_l, lattice_member_lminus, lattice_member_oracle,
    octahedra, octahedron_vector, symmetric_null_basis, IntMatrix, Method, OctahedralSpan,
};
use designlat::solver::{
    count_exact, generic_matrix, nibble_greedy, smallest_admissible_prime, solve_exact, verify, Count, Policy, SearchConfig, VerifyMode,
};
use designlat::symmetry::PermutationGroup;
use designlat::vsys::{EdgeVector, Selection, VectorSystem};

const LIMIT_1: Duration = Duration::from_secs(5);
const LIMIT_2: Duration = Duration::from_secs(120);
const LIMIT_3: Duration = Duration::from_secs(10);
const LIMIT_4: Duration = Duration::from_secs(300);
const LIMIT_5: Duration = Duration::from_secs(120);
const LIMIT_6: Duration = Duration::from_secs(30);
const LIMIT_7: Duration = Duration::from_secs(300);
const LIMIT_8: Duration = Duration::from_secs(120);
const LIMIT_9: Duration = Duration::from_secs(10);
const LIMIT_10: Duration = Duration::from_secs(10);

const RANDOM_VECTORS: usize = 200;
const ENTRY_RANGE: i64 = 3;
const LARGE_SET_MAX_N: u64 = 60;
const LARGE_SET_MAX_Q: u64 = 5;
const LARGE_SET_MAX_LAMBDA: u64 = 20;
const SOLVE_BUDGET: u64 = 10_000_000;
const STS7_COUNT: u128 = 30;
const LATIN3_COUNT: u128 = 12;
const OCTAHEDRAL_COMBINATIONS: usize = 100;
const SYMMETRIC_NULL_SAMPLES: usize = 20;
const DIAGONAL_MATRICES: usize = 500;
const DIAGONAL_MAX_DIM: usize = 8;
const DIAGONAL_ENTRY: i64 = 9;
const TRYST_SIZES: [u32; 4] = [9, 10, 11, 12];
const TRYST_SOLVE_BUDGET: u64 = 1_000_000;
const NIBBLE_SIZES: [u32; 3] = [15, 21, 27];
const NIBBLE_SEEDS: u64 = 50;
const MAX_Q: usize = 8;

fn big(x: i64) -> BigInt {
    BigInt::from(x)
}

fn criterion(id: usize, title: &str, limit: Duration, check: impl FnOnce() -> String) -> bool {
    let start = Instant::now();
    let result = catch_unwind(AssertUnwindSafe(check));
    let elapsed = start.elapsed();
    let (ok, detail) = match result {
        Ok(d) if elapsed <= limit => (true, d),
        Ok(d) => (false, format!("{d}; took {elapsed:.1?}, limit {limit:?}")),
        Err(e) => {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            (false, msg.unwrap_or_else(|| "panicked".into()))
        }
    };
    println!("criterion {id:>2} {}: {title} [{elapsed:.2?}] {detail}", if ok { "PASS" } else { "FAIL" });
    ok
}

fn triangle_instance(n: u32) -> (LabelledComplex, VectorSystem) {
    let inst = build_nonpartite(&Multigraph::complete(3, 2, 1), &Multigraph::complete(n, 2, 1)).unwrap();
    (inst.phi, inst.vs)
}

fn twisted_octahedron() -> String {
    let t = build_twisted_octahedron().unwrap();
    let inst = &t.instance;
    assert!(t.triangles.is_null(), "triangle vector is not null");
    assert!(lattice_member_lminus(&inst.phi, &inst.vs, &inst.target).unwrap().member, "not in the local lattice");
    assert!(check_h_divisible(&Multigraph::complete(4, 3, 1), &t.triangles).divisible, "not K4-divisible");
    for m in [Method::Sharp, Method::Shadow] {
        assert!(!lattice_member_l(&inst.phi, &inst.vs, &inst.target, m).unwrap().member, "{m:?} accepts");
    }
    assert!(!lattice_member_oracle(&inst.phi, &inst.vs, &inst.target, 1 << 22).unwrap(), "oracle accepts");
    let f = octahedron_invariant(&inst.target);
    assert_eq!(f, [1, -1, 0, 0].map(BigInt::from));
    format!("invariant ({}, {}, {}, {})", f[0], f[1], f[2], f[3])
}

fn lattice_equality() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut members = 0;
    for k in 0..RANDOM_VECTORS {
        let n = [5, 6, 7][k % 3];
        let (phi, vs) = triangle_instance(n);
        let level = phi.level(2);
        let tops = phi.level(3);
        // Half the samples are molecule combinations, kept only when every entry stays in range.
        let j = if k % 2 == 0 {
            let mut j = EdgeVector::new(1);
            for _ in 0..rng.gen_range(1..=6) {
                let m = &level[rng.gen_range(0..level.len())];
                j.add_at(m, &[big(1)], &big(rng.gen_range(-ENTRY_RANGE..=ENTRY_RANGE)));
            }
            j
        } else {
            loop {
                let mut sel = Selection::new();
                for _ in 0..rng.gen_range(1..=4) {
                    sel.add(0, tops[rng.gen_range(0..tops.len())].clone(), big(rng.gen_range(-2..=2)));
                }
                let j = vs.boundary(&phi, &sel).unwrap();
                if j.iter().all(|(_, v)| v[0].abs() <= big(ENTRY_RANGE)) {
                    break j;
                }
            }
        };
        let sharp = lattice_member_l(&phi, &vs, &j, Method::Sharp).unwrap().member;
        let shadow = lattice_member_l(&phi, &vs, &j, Method::Shadow).unwrap().member;
        let oracle = lattice_member_oracle(&phi, &vs, &j, 1 << 22).unwrap();
        assert_eq!(sharp, shadow, "methods disagree on sample {k}");
        assert_eq!(sharp, oracle, "oracle disagrees on sample {k}");
        members += usize::from(sharp);
    }
    format!("{RANDOM_VECTORS} vectors agree, {members} members")
}

fn binom(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * u128::from(n - i) / u128::from(i + 1))
}

fn divisibility() -> String {
    let k3 = Multigraph::complete(3, 2, 1);
    assert!(check_h_divisible(&k3, &Multigraph::complete(7, 2, 1)).divisible);
    assert!(!check_h_divisible(&k3, &Multigraph::complete(6, 2, 1)).divisible);
    assert!(design_divisible(7, 3, 2, 1).divisible && !design_divisible(6, 3, 2, 1).divisible);
    assert!(resolvable_divisible(9, 3, 2, 1).divisible && !resolvable_divisible(8, 3, 2, 1).divisible);
    assert!(complete_resolution_divisible(9, 3).divisible && !complete_resolution_divisible(8, 3).divisible);
    let mut cases = 0;
    for q in 2..=LARGE_SET_MAX_Q {
        for r in 1..q {
            for n in q..=LARGE_SET_MAX_N {
                for lambda in 1..=LARGE_SET_MAX_LAMBDA {
                    let design = (0..r).all(|i| (u128::from(lambda) * binom(n - i, r - i)) % binom(q - i, r - i) == 0);
                    let direct = design && binom(n - r, q - r) % u128::from(lambda) == 0;
                    assert_eq!(large_set_divisible(n, q, r, lambda).divisible, direct, "n={n} q={q} r={r} λ={lambda}");
                    cases += 1;
                }
            }
        }
    }
    format!("{cases} large-set cases match")
}

fn exact_solves() -> String {
    let cfg = SearchConfig { node_budget: SOLVE_BUDGET, ..SearchConfig::default() };
    let k3 = Multigraph::complete(3, 2, 1);
    let sts = build_nonpartite(&k3, &Multigraph::complete(7, 2, 1)).unwrap();
    let out = solve_exact(&sts.phi, &sts.vs, &sts.target, &cfg).unwrap();
    let sel = out.outcome.found().expect("STS(7)");
    assert!(verify(&sts.phi, &sts.vs, sel, &sts.target, VerifyMode::Set).ok);
    assert_eq!(count_exact(&sts.phi, &sts.vs, &sts.target, &cfg).unwrap(), Count::Exact(STS7_COUNT));
    let latin = build_latin(3).unwrap();
    assert_eq!(count_exact(&latin.phi, &latin.vs, &latin.target, &cfg).unwrap(), Count::Exact(LATIN3_COUNT));
    let k6 = build_nonpartite(&k3, &Multigraph::complete(6, 2, 1)).unwrap();
    assert!(solve_exact(&k6.phi, &k6.vs, &k6.target, &cfg).unwrap().outcome.is_unsat());
    let g9 = Multigraph::complete(9, 2, 1);
    let red = reduce_resolvable(&k3, &g9, 0).unwrap();
    let out = solve_exact(&red.instance.phi, &red.instance.vs, &red.instance.target, &cfg).unwrap();
    let sel = out.outcome.found().expect("KTS(9)");
    let Decoded::Resolvable { classes } = red.decoder.decode(sel).unwrap() else { panic!("wrong decoding") };
    verify_resolvable(&k3, &g9, &classes).unwrap();
    format!("STS(7) count {STS7_COUNT}, Latin(3) count {LATIN3_COUNT}, K6 unsat, KTS(9) with {} classes", classes.len())
}

fn octahedral_span() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut done = 0;
    for r in [2usize, 3] {
        for symmetric in [true, false] {
            let group = if symmetric { PermutationGroup::symmetric(r) } else { PermutationGroup::trivial(r) };
            let vs = VectorSystem::from_fn(group, r, 1, &["K"], |_, _| vec![big(1)]).unwrap();
            let n = 6;
            let phi = LabelledComplex::complete(r, n);
            let b = full_mask(r);
            let octs = octahedra(&phi, b);
            let span = OctahedralSpan::new(&phi, &vs, b);
            let width = vs.type_table(b).sigma.len();
            for _ in 0..OCTAHEDRAL_COMBINATIONS / 4 {
                let mut j = EdgeVector::new(width);
                for _ in 0..rng.gen_range(1..=4) {
                    let oct = &octs[rng.gen_range(0..octs.len())];
                    let v: Vec<BigInt> = (0..width).map(|_| big(rng.gen_range(-2..=2))).collect();
                    j = j.plus(&octahedron_vector(&vs, oct, &v).unwrap());
                }
                assert!(is_symmetric(&vs, b, &j), "combination not symmetric");
                assert!(is_null(&j), "combination not null");
                let parts = span.solve(&j).expect("combination not recovered");
                let mut back = EdgeVector::new(width);
                for (oct, c) in &parts {
                    back = back.plus(&octahedron_vector(&vs, oct, c).unwrap());
                }
                assert_eq!(back, j);
                done += 1;
            }
            let basis = symmetric_null_basis(&phi, &vs, b);
            for _ in 0..SYMMETRIC_NULL_SAMPLES / 4 {
                let mut j = EdgeVector::new(width);
                for v in &basis {
                    j.add_scaled(v, &big(rng.gen_range(-2..=2)));
                }
                assert!(is_symmetric(&vs, b, &j) && is_null(&j));
                assert!(span.contains(&j), "symmetric null vector outside the span");
            }
        }
    }
    format!("{done} combinations recovered, {SYMMETRIC_NULL_SAMPLES} symmetric null vectors are members")
}

fn diagonal_engine() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..DIAGONAL_MATRICES {
        let (m, k) = (rng.gen_range(1..=DIAGONAL_MAX_DIM), rng.gen_range(1..=DIAGONAL_MAX_DIM));
        let rows: Vec<Vec<i64>> = (0..m).map(|_| (0..k).map(|_| rng.gen_range(-DIAGONAL_ENTRY..=DIAGONAL_ENTRY)).collect()).collect();
        let z = IntMatrix::from_rows(&rows);
        let f = diagonal_form(&z);
        assert_eq!(f.p.mul(&z).mul(&f.q), f.d);
        assert!(determinant(&f.p).abs().is_one() && determinant(&f.q).abs().is_one());
        for i in 0..m {
            for j in 0..k {
                if i != j {
                    assert!(f.d[(i, j)].is_zero());
                }
            }
        }
        for w in f.diag.windows(2) {
            assert!(w[1].is_multiple_of(&w[0]), "{} does not divide {}", w[0], w[1]);
        }
        let x: Vec<BigInt> = (0..k).map(|_| big(rng.gen_range(-5..=5))).collect();
        let b = z.mul_vec(&x);
        let y = integer_solve(&z, &b).expect("consistent system");
        assert_eq!(z.mul_vec(&y), b);
    }
    format!("{DIAGONAL_MATRICES} matrices")
}

/// Sum over all bijections `φ: [9] → [9]` of the molecule's value at `psi`
/// in colour `c`, which is `γ` at `θ = φ⁻¹∘ψ`.
fn tryst_brute_count(vs: &VectorSystem, psi: &Injection, colour: usize) -> u64 {
    let mut perm: Vec<u32> = (0..9).collect();
    let mut count = 0;
    let mut visit = |p: &[u32]| {
        let mut inv = [0u32; 9];
        for (l, &v) in p.iter().enumerate() {
            inv[v as usize] = l as u32;
        }
        let theta = Injection::from_pairs(&psi.pairs().map(|(l, v)| (l, inv[v as usize])).collect::<Vec<_>>()).unwrap();
        if vs.gamma(0, &theta).is_some_and(|v| !v[colour].is_zero()) {
            count += 1;
        }
    };
    // Heap's algorithm.
    let mut c = [0usize; 9];
    visit(&perm);
    let mut i = 0;
    while i < 9 {
        if c[i] < i {
            let k = if i % 2 == 0 { 0 } else { c[i] };
            perm.swap(k, i);
            visit(&perm);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    count
}

fn tryst() -> String {
    let mut notes = Vec::new();
    for n in TRYST_SIZES {
        let t = build_tryst(n).unwrap();
        assert!(lattice_member_l(&t.phi, &t.vs, &t.target, Method::Sharp).unwrap().member, "tryst({n}) outside the lattice");
        let reg = tryst_regularity(&t);
        assert!(reg.regular, "tryst({n}) uniform weights fail");
        notes.push(format!("n={n} regular at {}", reg.expected));
    }
    let t = build_tryst(9).unwrap();
    let psi = Injection::from_pairs(&[(0, 2), (1, 5), (2, 7)]).unwrap();
    for colour in 0..2 {
        assert_eq!(tryst_brute_count(&t.vs, &psi, colour), 6 * 720, "brute-force count, colour {colour}");
    }
    let cfg = SearchConfig { node_budget: TRYST_SOLVE_BUDGET, ..SearchConfig::default() };
    let out = solve_exact(&t.phi, &t.vs, &t.target, &cfg).unwrap();
    assert!(!out.outcome.is_unsat(), "tryst(9) reported unsat");
    let status = match out.outcome.found() {
        Some(sel) => {
            assert!(verify(&t.phi, &t.vs, sel, &t.target, VerifyMode::Set).ok, "certificate fails");
            "solved"
        }
        None => "budget",
    };
    format!("{}; n=9 exact search: {status}", notes.join(", "))
}

fn nibble() -> String {
    let mut means = Vec::new();
    for n in NIBBLE_SIZES {
        let (phi, vs) = triangle_instance(n);
        let target = build_nonpartite(&Multigraph::complete(3, 2, 1), &Multigraph::complete(n, 2, 1)).unwrap().target;
        let mut total = 0.0;
        for seed in 0..NIBBLE_SEEDS {
            let tr = nibble_greedy(&phi, &vs, &target, seed, &Policy::Uniform).unwrap();
            assert!(tr.nonnegative && !tr.leave.has_negative(), "negative residual at n={n}, seed {seed}");
            assert!(tr.fixpoint, "no fixpoint at n={n}, seed {seed}");
            total += tr.leave_fraction();
        }
        means.push(total / NIBBLE_SEEDS as f64);
    }
    assert!(means.windows(2).all(|w| w[1] <= w[0]), "leave fractions not monotone: {means:?}");
    format!("mean leave fractions {:?}", means.iter().map(|m| format!("{m:.4}")).collect::<Vec<_>>())
}

fn det_leibniz(a: &[Vec<u64>], p: u64) -> u64 {
    let k = a.len();
    let mut perm: Vec<usize> = (0..k).collect();
    let mut total: i128 = 0;
    let p128 = i128::from(p);
    loop {
        let inversions = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).filter(|&(i, j)| perm[i] > perm[j]).count();
        let term = (0..k).fold(1i128, |acc, i| acc * i128::from(a[i][perm[i]]) % p128);
        total = (total + if inversions % 2 == 0 { term } else { p128 - term }) % p128;
        // Next permutation in lexicographic order.
        let Some(i) = (0..k.saturating_sub(1)).rev().find(|&i| perm[i] < perm[i + 1]) else { break };
        let j = (i + 1..k).rev().find(|&j| perm[j] > perm[i]).unwrap();
        perm.swap(i, j);
        perm[i + 1..].reverse();
    }
    total as u64
}

fn generic() -> String {
    let mut minors = 0;
    for q in 1..=MAX_Q {
        for r in 1..=q {
            let p = smallest_admissible_prime(q, r);
            let m = generic_matrix(q, r, p).unwrap();
            let rep = m.verify();
            assert!(rep.ok(), "q={q} r={r}: singular minor {:?}", rep.singular);
            minors += rep.minors_checked;
        }
    }
    // Independent sweep of the largest case by permutation expansion.
    let p = smallest_admissible_prime(MAX_Q, MAX_Q);
    let m = generic_matrix(MAX_Q, MAX_Q, p).unwrap();
    let mut independent = 0;
    for k in 1..=MAX_Q {
        for rs in designlat::complex::subsets_of_size(full_mask(MAX_Q), k) {
            for cs in designlat::complex::subsets_of_size(full_mask(MAX_Q), k) {
                let ri: Vec<usize> = (0..MAX_Q).filter(|i| rs >> i & 1 == 1).collect();
                let ci: Vec<usize> = (0..MAX_Q).filter(|j| cs >> j & 1 == 1).collect();
                let sub: Vec<Vec<u64>> = ri.iter().map(|&i| ci.iter().map(|&j| m.rows[i][j]).collect()).collect();
                assert_ne!(det_leibniz(&sub, p), 0, "rows {ri:?} cols {ci:?}");
                independent += 1;
            }
        }
    }
    format!("{minors} minors, {independent} rechecked independently at q=r={MAX_Q}")
}

fn inclusion() -> String {
    let mut cases = 0;
    for q in 1..=MAX_Q {
        for r in 0..=q / 2 {
            for i in 0..=r {
                assert_eq!(inclusion_rank(q, i, r) as u128, binom(q as u64, i as u64), "q={q} i={i} r={r}");
                cases += 1;
            }
        }
    }
    format!("{cases} ranks")
}

#[test]
fn acceptance() {
    let results = [
        criterion(1, "twisted octahedron obstruction", LIMIT_1, twisted_octahedron),
        criterion(2, "lattice equals molecule span", LIMIT_2, lattice_equality),
        criterion(3, "divisibility checkers", LIMIT_3, divisibility),
        criterion(4, "exact solves", LIMIT_4, exact_solves),
        criterion(5, "octahedral span", LIMIT_5, octahedral_span),
        criterion(6, "diagonal form engine", LIMIT_6, diagonal_engine),
        criterion(7, "tryst instances", LIMIT_7, tryst),
        criterion(8, "nibble simulator", LIMIT_8, nibble),
        criterion(9, "generic matrix", LIMIT_9, generic),
        criterion(10, "inclusion matrix rank", LIMIT_10, inclusion),
    ];
    let failed: Vec<usize> = results.iter().enumerate().filter(|(_, ok)| !**ok).map(|(i, _)| i + 1).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
