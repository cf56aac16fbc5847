use std::ops::ControlFlow;

use hgs_core::affine::{build_subgroup, tau};
use hgs_core::chain::{ChainStructure, TruncatedPoly};
use hgs_core::descent::descent_datum;
use hgs_core::formclass::diagonalize_congruence;
use hgs_core::fp::{gl_order, go_order};
use hgs_core::oracle::{for_each_gl, orbit_size, orthogonal_count, stabilizer_size, Part};
use hgs_core::{
    AlgebraElement, EnumerationBudget, FormCase, FormClass, FpMatrix, NilpotentAlgebra,
    OrthogonalType, Prime, Sequential,
};
use proptest::prelude::*;

fn prime(v: u32) -> Prime {
    Prime::new(v).unwrap()
}

/// Symmetric `n x n` matrix with zero last row and column.
fn structure_matrix(p: u32, n: usize, entries: &[u32]) -> FpMatrix {
    let mut m = FpMatrix::zeros(prime(p), n, n);
    let mut it = entries.iter().cycle();
    for i in 0..n - 1 {
        for j in i..n - 1 {
            let v = it.next().copied().unwrap_or(0) % p;
            m.set(i, j, v);
            m.set(j, i, v);
        }
    }
    m
}

fn invertible(p: u32, n: usize, entries: &[u32]) -> Option<FpMatrix> {
    let m = FpMatrix::new(
        prime(p),
        n,
        n,
        entries.iter().take(n * n).copied().collect(),
    )
    .ok()?;
    m.is_invertible().then_some(m)
}

fn gl_matrices(p: u32, n: usize) -> Vec<FpMatrix> {
    let mut out = Vec::new();
    let _ = for_each_gl(prime(p), n, Part::WHOLE, |m| {
        out.push(FpMatrix::new(prime(p), n, n, m.to_vec()).unwrap());
        ControlFlow::Continue(())
    });
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn congruence_class_is_invariant(
        p in prop::sample::select(vec![3u32, 5, 7, 11]),
        n in 2usize..6,
        entries in prop::collection::vec(0u32..11, 15),
        change in prop::collection::vec(0u32..11, 16),
    ) {
        let phi = structure_matrix(p, n, &entries);
        let fc = diagonalize_congruence(&phi).unwrap();
        prop_assert_eq!(fc.rank(), phi.rank());
        if let Some(r) = invertible(p, n - 1, &change) {
            let big = r.block_diag(&FpMatrix::identity(prime(p), 1));
            let moved = big.mul(&phi).unwrap().mul(&big.transpose()).unwrap();
            let fc2 = diagonalize_congruence(&moved).unwrap();
            prop_assert_eq!((fc2.rank(), fc2.case(), fc2.s()), (fc.rank(), fc.case(), fc.s()));
        }
        // Scaling the A^2 generator keeps the class.
        let scaled = phi.scale(fc.prime().canonical_nonsquare());
        let fc3 = diagonalize_congruence(&scaled).unwrap();
        prop_assert_eq!((fc3.rank(), fc3.case()), (fc.rank(), fc.case()));
    }

    #[test]
    fn algebra_isomorphism_maps_to_normal_form(
        p in prop::sample::select(vec![3u32, 5]),
        entries in prop::collection::vec(0u32..5, 3),
    ) {
        let phi = structure_matrix(p, 3, &entries);
        let fc = diagonalize_congruence(&phi).unwrap();
        let t = build_subgroup(&NilpotentAlgebra::rank1(&phi).unwrap()).unwrap();
        let normal = build_subgroup(&NilpotentAlgebra::rank1(&fc.normal_matrix()).unwrap()).unwrap();
        prop_assert_eq!(t.conjugate(&fc.algebra_isomorphism()).unwrap(), normal);
    }

    #[test]
    fn circle_group_laws(
        p in prop::sample::select(vec![3u32, 5, 7]),
        n in 2usize..5,
        entries in prop::collection::vec(0u32..7, 10),
        x in prop::collection::vec(0u32..7, 4),
        y in prop::collection::vec(0u32..7, 4),
        z in prop::collection::vec(0u32..7, 4),
    ) {
        let pr = prime(p);
        let a = NilpotentAlgebra::rank1(&structure_matrix(p, n, &entries)).unwrap();
        let el = |v: &[u32]| AlgebraElement::new(pr, &v[..n].iter().map(|&c| c as i64).collect::<Vec<_>>());
        let (x, y, z) = (el(&x), el(&y), el(&z));
        let xy = a.circle_mul(&x, &y).unwrap();
        prop_assert_eq!(&xy, &a.circle_mul(&y, &x).unwrap());
        prop_assert_eq!(
            a.circle_mul(&xy, &z).unwrap(),
            a.circle_mul(&x, &a.circle_mul(&y, &z).unwrap()).unwrap()
        );
        prop_assert_eq!(a.circle_mul(&x, &AlgebraElement::zero(n)).unwrap(), x.clone());
        let inv = a.circle_inv(&x).unwrap();
        prop_assert!(a.circle_mul(&x, &inv).unwrap().is_zero());
        // tau is a homomorphism from (A, ∘) into the affine group
        prop_assert_eq!(
            tau(&a, &x).unwrap().compose(&tau(&a, &y).unwrap()),
            tau(&a, &xy).unwrap()
        );
        let mut acc = AlgebraElement::zero(n);
        for s in 0..5u64 {
            prop_assert_eq!(a.circle_power(&x, s).unwrap(), acc.clone());
            acc = a.circle_mul(&acc, &x).unwrap();
        }
    }

    #[test]
    fn log_additive_and_b_homomorphic(
        p in prop::sample::select(vec![5u32, 7, 11]),
        n in 1usize..5,
        r in prop::collection::vec(0u32..11, 4),
        s in prop::collection::vec(0u32..11, 4),
    ) {
        prop_assume!((p as usize) > n);
        let pr = prime(p);
        let c = ChainStructure::new(n, pr).unwrap();
        let r: Vec<u32> = r[..n].iter().map(|v| v % p).collect();
        let s: Vec<u32> = s[..n].iter().map(|v| v % p).collect();
        let u = TruncatedPoly::principal_unit(pr, &r);
        let v = TruncatedPoly::principal_unit(pr, &s);
        prop_assert_eq!(
            u.unit_mul(&v).log_trunc().unwrap(),
            u.log_trunc().unwrap().add(&v.log_trunc().unwrap())
        );
        let sum: Vec<u32> = r.iter().zip(&s).map(|(a, b)| (a + b) % p).collect();
        let lhs = TruncatedPoly::principal_unit(pr, &c.b_map(&sum).unwrap());
        let rhs = TruncatedPoly::principal_unit(pr, &c.b_map(&r).unwrap())
            .unit_mul(&TruncatedPoly::principal_unit(pr, &c.b_map(&s).unwrap()));
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(c.b_inverse(&c.b_map(&r).unwrap()).unwrap(), r.clone());
        prop_assert_eq!(c.b_map(&c.b_inverse(&r).unwrap()).unwrap(), r);
    }

    #[test]
    fn orbit_matches_formula_at_n2_n3(
        p in prop::sample::select(vec![3u32]),
        entries in prop::collection::vec(0u32..3, 3),
    ) {
        let phi = structure_matrix(p, 3, &entries);
        let fc = diagonalize_congruence(&phi).unwrap();
        let t = build_subgroup(&NilpotentAlgebra::rank1(&phi).unwrap()).unwrap();
        let b = EnumerationBudget::default();
        prop_assert_eq!(orbit_size(&t, &b, &Sequential).unwrap(), fc.hgs_count().unwrap());
    }
}

#[test]
fn membership_matches_brute_force() {
    for (p, n) in [(3u32, 3usize), (5, 2), (3, 2)] {
        let gl = gl_matrices(p, n);
        for k in 1..n {
            let cases: &[FormCase] = if k % 2 == 1 {
                &[FormCase::Odd]
            } else {
                &[FormCase::EvenPlus, FormCase::EvenMinus]
            };
            for &case in cases {
                let fc = FormClass::normal_form(prime(p), n, k, case).unwrap();
                let t =
                    build_subgroup(&NilpotentAlgebra::rank1(&fc.normal_matrix()).unwrap()).unwrap();
                let mut count = 0u128;
                for m in &gl {
                    let member = fc.stabilizer_membership(m).unwrap();
                    let fixes = t.conjugate(m).unwrap() == t;
                    assert_eq!(member, fixes, "p={p} n={n} k={k} {case} P={m}");
                    count += u128::from(member);
                }
                assert_eq!(
                    count,
                    fc.stabilizer_order().unwrap(),
                    "p={p} n={n} k={k} {case}"
                );
            }
        }
    }
}

#[test]
fn orbit_times_stabilizer_is_gl_order() {
    let b = EnumerationBudget::default();
    for diag in [[1u32, 0, 0], [1, 1, 0], [1, 2, 0], [0, 0, 0]] {
        let t =
            build_subgroup(&NilpotentAlgebra::rank1(&FpMatrix::diagonal(prime(3), &diag)).unwrap())
                .unwrap();
        let orbit = orbit_size(&t, &b, &Sequential).unwrap();
        let stab = stabilizer_size(&t, &b, &Sequential).unwrap();
        assert_eq!(orbit * stab, gl_order(3, prime(3)));
    }
}

#[test]
fn orthogonal_counts_match_go_order() {
    let b = EnumerationBudget::default();
    for p in [3u32, 5, 7] {
        let pr = prime(p);
        let ns = pr.canonical_nonsquare();
        for k in 1..=3usize {
            for s in [1, ns] {
                let ty = if k % 2 == 1 {
                    if s != 1 {
                        continue;
                    }
                    OrthogonalType::Odd
                } else {
                    match FormClass::normal_form(pr, k + 1, k, FormCase::EvenPlus)
                        .unwrap()
                        .s()
                        == s
                    {
                        true => OrthogonalType::Plus,
                        false => OrthogonalType::Minus,
                    }
                };
                assert_eq!(
                    orthogonal_count(k, pr, s, &b).unwrap(),
                    go_order(k, pr, ty).unwrap(),
                    "k={k} p={p} s={s}"
                );
            }
        }
    }
}

#[test]
fn descent_invariants_for_cube_zero_algebras() {
    let algebras = [
        NilpotentAlgebra::zero(prime(5), 2).unwrap(),
        NilpotentAlgebra::chain(2, prime(5)).unwrap(),
        NilpotentAlgebra::rank1(&FpMatrix::diagonal(prime(5), &[1, 2, 0])).unwrap(),
        NilpotentAlgebra::rank1(&structure_matrix(3, 3, &[0, 1, 0])).unwrap(),
        NilpotentAlgebra::rank1(&FpMatrix::diagonal(prime(3), &[1, 0, 0])).unwrap(),
    ];
    for a in &algebras {
        let d = descent_datum(a).unwrap();
        let space = d.space();
        assert!(d.rows_are_permutations());
        assert!(d.is_right_action());
        let exps = d.action_exponent().unwrap();
        let points: Vec<Vec<u32>> = space.points().collect();
        for (x, xp) in points.iter().enumerate() {
            let e = &points[exps[x] as usize];
            let xe = AlgebraElement::from_residues(xp.clone());
            assert_eq!(a.circle_inv(&xe).unwrap().coords(), e.as_slice());
            assert!(a
                .circle_mul(&xe, &AlgebraElement::from_residues(e.clone()))
                .unwrap()
                .is_zero());
        }
        let annihilator: Vec<usize> = points
            .iter()
            .enumerate()
            .filter(|(_, x)| {
                (0..a.dim()).all(|i| {
                    a.multiply(
                        &AlgebraElement::from_residues(x.to_vec()),
                        &AlgebraElement::basis(a.dim(), i),
                    )
                    .unwrap()
                    .is_zero()
                })
            })
            .map(|(i, _)| i)
            .collect();
        assert_eq!(d.fixed_points(), annihilator);
    }
}

#[test]
fn normalization_iff_cube_zero() {
    let chain3 = NilpotentAlgebra::chain(3, prime(3)).unwrap();
    let t = build_subgroup(&chain3).unwrap();
    assert!(!chain3.cube_is_zero());
    assert!(!t.is_normalized_by_translations());
    for entries in [[1u32, 0, 2], [0, 1, 0], [2, 2, 1]] {
        let a = NilpotentAlgebra::rank1(&structure_matrix(3, 3, &entries)).unwrap();
        assert!(a.cube_is_zero());
        assert!(build_subgroup(&a).unwrap().is_normalized_by_translations());
    }
}

#[test]
fn stabilizer_does_not_depend_on_workers() {
    let t = build_subgroup(
        &NilpotentAlgebra::rank1(&FpMatrix::diagonal(prime(5), &[1, 2, 0])).unwrap(),
    )
    .unwrap();
    let one = EnumerationBudget::default();
    let four = one.with_workers(4).with_seed(3);
    assert_eq!(
        stabilizer_size(&t, &one, &Sequential).unwrap(),
        stabilizer_size(&t, &four, &Sequential).unwrap()
    );
}
