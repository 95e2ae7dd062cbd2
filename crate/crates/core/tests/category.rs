mod common;

use std::sync::Arc;

use common::*;
use modindex::category::*;
use modindex::linalg::{self, CMat};
use rand::Rng;

const GOLDEN: f64 = 1.618_033_988_749_895;

#[test]
fn fibonacci_and_ising_dimensions() {
    let fib = FusionRing::fibonacci();
    let tau = fib.label_index("tau").unwrap();
    let d = pf_dimension(&fib, tau).unwrap();
    assert!((d - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-12);
    assert!((d - GOLDEN).abs() < 1e-12);
    // largest eigenvalue of [[0,1],[1,1]]
    let m = fib.fusion_matrix(tau);
    let ev = m.symmetric_eigenvalues();
    assert!((ev.max() - d).abs() < 1e-12);

    let ising = FusionRing::ising();
    let sigma = ising.label_index("sigma").unwrap();
    let psi = ising.label_index("psi").unwrap();
    assert!((pf_dimension(&ising, sigma).unwrap() - 2f64.sqrt()).abs() < 1e-12);
    assert!((pf_dimension(&ising, psi).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn pointed_rings_have_unit_dimensions() {
    for n in 1..=6 {
        let fr = FusionRing::pointed(n);
        assert!(fr.is_pointed());
        for i in 0..n {
            assert!((pf_dimension(&fr, i).unwrap() - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn amenability() {
    let fib = FusionRing::fibonacci();
    assert!(amenability_check(&fib, 1).unwrap() < 1e-12);
    assert_eq!(amenability_check(&fib, 0).unwrap(), 0.0);

    let s3 = rep_fusion_ring(&Group::symmetric(3)).unwrap();
    let two = (0..s3.rank()).find(|&i| (pf_dimension(&s3, i).unwrap() - 2.0).abs() < 1e-9).unwrap();
    let norm = s3.fusion_matrix(two).singular_values().max();
    assert!((norm - 2.0).abs() < 1e-12);
    assert!(amenability_check(&s3, two).unwrap() < 1e-12);
    for n in 2..=5 {
        let zn = rep_fusion_ring(&Group::cyclic(n)).unwrap();
        for i in 0..n {
            assert!(amenability_check(&zn, i).unwrap() < 1e-12);
        }
    }
}

#[test]
fn dimension_vector_is_a_ring_homomorphism() {
    let rings = vec![
        FusionRing::fibonacci(),
        FusionRing::ising(),
        rep_fusion_ring(&Group::cyclic(5)).unwrap(),
        rep_fusion_ring(&Group::symmetric(3)).unwrap(),
        rep_fusion_ring(&Group::quaternion()).unwrap(),
        rep_fusion_ring(&Group::dihedral(4)).unwrap(),
    ];
    for fr in &rings {
        let d = dimension_vector(fr);
        assert!(homomorphism_residual(fr, &d) < 1e-10);
        let chk = check_dimension_function(fr, &d, 1e-10).unwrap();
        assert!(chk.accepted);
    }
}

#[test]
fn other_dimension_assignments_are_rejected() {
    let fib = FusionRing::fibonacci();
    // Galois conjugate: multiplicative but not positive
    let galois = [1.0, (1.0 - 5f64.sqrt()) / 2.0];
    let chk = check_dimension_function(&fib, &galois, 1e-10).unwrap();
    assert!(chk.homomorphism_residual < 1e-12 && !chk.positive && !chk.accepted);
    // positive but not multiplicative
    let chk = check_dimension_function(&fib, &[1.0, 1.5], 1e-10).unwrap();
    assert!(!chk.accepted);
    // the sign character of Z_2
    let z2 = FusionRing::pointed(2);
    assert!(!check_dimension_function(&z2, &[1.0, -1.0], 1e-10).unwrap().accepted);
    assert!(check_dimension_function(&z2, &[1.0], 1e-10).is_err());
}

#[test]
fn broken_rings_fail_validation() {
    // no unit row for a
    let bad = FusionRing::from_entries(vec!["1".into(), "a".into()], vec![0, 1], &[(0, 0, 0, 1), (1, 1, 0, 1), (1, 1, 1, 1)]);
    assert!(bad.is_err());
    // non-associative: a⊗a = b, b⊗b = a, a⊗b = a in a rank-3 table
    let bad = FusionRing::from_entries(
        vec!["1".into(), "a".into(), "b".into()],
        vec![0, 2, 1],
        &[
            (0, 0, 0, 1),
            (0, 1, 1, 1),
            (1, 0, 1, 1),
            (0, 2, 2, 1),
            (2, 0, 2, 1),
            (1, 2, 0, 1),
            (2, 1, 0, 1),
            (1, 1, 2, 1),
            (2, 2, 2, 1),
        ],
    );
    assert!(bad.is_err());
}

#[test]
fn cyclic_fusion_is_group_law() {
    let fr = rep_fusion_ring(&Group::cyclic(3)).unwrap();
    assert_eq!(fr.rank(), 3);
    assert!(fr.is_pointed());
    for i in 0..3 {
        let out: Vec<usize> = (0..3).map(|j| (0..3).find(|&k| fr.n(i, j, k) == 1).unwrap()).collect();
        let mut sorted = out.clone();
        sorted.sort();
        assert_eq!(sorted, vec![0, 1, 2]);
        assert_eq!(fr.n(i, fr.dual(i), 0), 1);
    }
}

#[test]
fn frobenius_reciprocity_in_representation_rings() {
    for g in [Group::symmetric(3), Group::quaternion(), Group::dihedral(5), Group::symmetric(4)] {
        let fr = rep_fusion_ring(&g).unwrap();
        let r = fr.rank();
        for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    assert_eq!(fr.n(i, j, k), fr.n(fr.dual(i), k, j));
                }
            }
        }
        let sum: f64 = dimension_vector(&fr).iter().map(|d| d * d).sum();
        assert!((sum - g.order() as f64).abs() < 1e-9);
    }
}

#[test]
fn s3_character_table_matches_textbook() {
    let g = Group::symmetric(3);
    let ct = character_table(&g).unwrap();
    assert_eq!(ct.dims(), vec![1, 1, 2]);
    assert!(ct.orthogonality_residual() < 1e-10);
    // key classes by size: identity 1, transpositions 3, three-cycles 2
    let size = |k: usize| ct.classes[k].len();
    let mut rows: Vec<Vec<(usize, i64)>> = ct
        .chars
        .iter()
        .map(|row| {
            let mut v: Vec<(usize, i64)> = row.iter().enumerate().map(|(k, z)| (size(k), z.re.round() as i64)).collect();
            v.sort();
            v
        })
        .collect();
    rows.sort();
    let mut want = vec![
        vec![(1, 1), (2, 1), (3, 1)],
        vec![(1, 1), (2, 1), (3, -1)],
        vec![(1, 2), (2, -1), (3, 0)],
    ];
    want.sort();
    assert_eq!(rows, want);
    for row in &ct.chars {
        assert!(row.iter().all(|z| z.im.abs() < 1e-9));
    }
}

#[test]
fn quaternion_characters() {
    let g = Group::quaternion();
    let ct = character_table(&g).unwrap();
    assert_eq!(ct.dims(), vec![1, 1, 1, 1, 2]);
    // the defining SU(2) representation has the 2-dim character
    let rep = quaternion_rep();
    assert!(rep.is_irreducible());
    let chi = rep.character();
    let two = &ct.chars[4];
    for (k, cls) in ct.classes.iter().enumerate() {
        assert!((chi[cls[0]] - two[k]).norm() < 1e-9);
    }
}

#[test]
fn conjugate_equations_for_s3_objects() {
    let g = Arc::new(Group::symmetric(3));
    let std = s3_standard_rep();
    let triv = RepObject::trivial(g.clone());
    let sum = std.direct_sum(&triv);
    for rho in [&std, &triv, &sum] {
        let sol = solve_conjugate(rho).unwrap();
        let (a, b) = sol.residuals();
        assert!(a < 1e-12 && b < 1e-12);
        assert!(sol.invariance_residual() < 1e-12);
    }
    let sol = solve_conjugate(&std).unwrap();
    assert!((intrinsic_dimension(&sol).value - 2.0).abs() < 1e-12);
    assert!(intrinsic_dimension(&sol).exact);

    let t = solve_conjugate(&triv).unwrap();
    assert!((t.r[0] - c(1.0, 0.0)).norm() < 1e-15 && (t.rbar[0] - c(1.0, 0.0)).norm() < 1e-15);
    assert!((intrinsic_dimension(&t).value - 1.0).abs() < 1e-15);
}

#[test]
fn one_dimensional_cyclic_rep() {
    let rho = cyclic_character_rep(4, 1);
    assert_eq!(rho.dim(), 1);
    let sol = solve_conjugate(&rho).unwrap();
    assert!((sol.r[0].norm() - 1.0).abs() < 1e-15);
    assert!((intrinsic_dimension(&sol).value - 1.0).abs() < 1e-15);
    assert!(sol.invariance_residual() < 1e-12);
}

#[test]
fn intrinsic_dimension_gauge_and_additivity() {
    let std = s3_standard_rep();
    let sol = solve_conjugate(&std).unwrap();
    let base = intrinsic_dimension(&sol).value;
    for &l in &[0.3, 1.0, 4.0] {
        let g = sol.rescaled(c(l, 0.0));
        assert!((intrinsic_dimension(&g).value - base).abs() < 1e-12);
        let (a, b) = g.residuals();
        assert!(a < 1e-12 && b < 1e-12);
    }
    let triv = RepObject::trivial(std.group().clone());
    let parts = [solve_conjugate(&triv).unwrap(), sol.clone()];
    assert!((intrinsic_dimension_decomposed(&parts).unwrap() - 3.0).abs() < 1e-12);

    let sum = solve_conjugate(&triv.direct_sum(&std)).unwrap();
    assert!(!intrinsic_dimension(&sum).exact);
    assert!(intrinsic_dimension(&sum).value >= 3.0 - 1e-12);
    assert!(intrinsic_dimension_decomposed(&[sum]).is_err());
}

#[test]
fn conjugate_solution_space_is_one_dimensional_for_irreducibles() {
    assert_eq!(conjugate_solution_space_dim(&s3_standard_rep()), 1);
    assert_eq!(conjugate_solution_space_dim(&quaternion_rep()), 1);
    assert_eq!(conjugate_solution_space_dim(&cyclic_character_rep(5, 2)), 1);
    let std = s3_standard_rep();
    assert_eq!(conjugate_solution_space_dim(&std.direct_sum(&std)), 4);
}

fn random_combination<R: Rng>(r: &mut R, basis: &[CMat]) -> CMat {
    let mut t = basis[0].clone() * c(0.0, 0.0);
    for b in basis {
        t += b * c(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0));
    }
    t
}

#[test]
fn frobenius_map_properties() {
    let mut r = rng(51);
    let std = s3_standard_rep();
    let triv = RepObject::trivial(std.group().clone());
    let rho1 = std.clone();
    let rho2 = std.direct_sum(&triv);
    let s1 = solve_conjugate(&rho1).unwrap();
    let s2 = solve_conjugate(&rho2).unwrap();
    let basis = intertwiner_basis(&rho1, &rho2);
    assert_eq!(basis.len(), 1);

    let id = linalg::eye(2);
    let idb = frobenius_map(&id, &s1, &s1).unwrap();
    assert!(dist(&idb, &id) < 1e-14);

    for _ in 0..10 {
        let t = random_combination(&mut r, &basis);
        let s = random_combination(&mut r, &basis);
        let alpha = c(r.random_range(-2.0..2.0), r.random_range(-2.0..2.0));
        let lhs = frobenius_map(&(&t * alpha + &s), &s1, &s2).unwrap();
        let rhs = frobenius_map(&t, &s1, &s2).unwrap() * alpha.conj() + frobenius_map(&s, &s1, &s2).unwrap();
        assert!(dist(&lhs, &rhs) < 1e-11);

        let tb = frobenius_map(&t, &s1, &s2).unwrap();
        assert!(intertwiner_residual(&tb, &rho1.conjugate(), &rho2.conjugate()) < 1e-11);
        let sb1 = solve_conjugate(&rho1.conjugate()).unwrap();
        let sb2 = solve_conjugate(&rho2.conjugate()).unwrap();
        let tbb = frobenius_map(&tb, &sb1, &sb2).unwrap();
        assert!(dist(&tbb, &t) < 1e-11);
    }
    assert!(frobenius_map(&CMat::from_element(3, 2, c(1.0, 0.0)), &s1, &s2).is_err());
}

#[test]
fn frobenius_map_is_gauge_independent() {
    let mut r = rng(52);
    let std = s3_standard_rep();
    let triv = RepObject::trivial(std.group().clone());
    let rho = std.direct_sum(&triv);
    let sol = solve_conjugate(&rho).unwrap();
    let comm = intertwiner_basis(&rho, &rho);
    assert_eq!(comm.len(), 2);
    for _ in 0..10 {
        let t = random_combination(&mut r, &comm);
        let v = random_combination(&mut r, &comm) + linalg::eye(3) * c(2.0, 0.0);
        let gauged = sol.gauged(&v).unwrap();
        let a = frobenius_map(&t, &sol, &sol).unwrap();
        let b = frobenius_map(&t, &gauged, &gauged).unwrap();
        assert!(dist(&a, &b) < 1e-10);
        let (x, y) = gauged.residuals();
        assert!(x < 1e-10 && y < 1e-10);
    }
}

#[test]
fn canonical_endomorphism_trivial_and_inner() {
    let one = linalg::eye(3);
    let id = MatrixEndoModel::new(3, Box::new(|x: &CMat| x.clone()), 1);
    let rep = canonical_endo_check(&id, &one, &one).unwrap();
    assert!(rep.worst_residual() < 1e-14);
    assert!((rep.s_lambda_t - c(1.0, 0.0)).norm() < 1e-14);

    let mut r = rng(53);
    let u = linalg::random_unitary(&mut r, 3);
    let model = MatrixEndoModel::inner(&u, 2);
    let rep = canonical_endo_check(&model, &u, &u).unwrap();
    assert!(rep.canonical < 1e-12);
    assert!(rep.worst_residual() < 1e-12);
    assert!((rep.t_s - c(1.0, 0.0)).norm() < 1e-12);

    let not_hom = MatrixEndoModel::new(3, Box::new(|x: &CMat| x * x), 3);
    assert!(canonical_endo_check(&not_hom, &one, &one).is_err());
}

#[test]
fn canonical_endomorphism_from_conjugate_solution() {
    for rho in [s3_standard_rep(), quaternion_rep()] {
        let sol = solve_conjugate(&rho).unwrap();
        let (model, t, s) = TensorShiftModel::from_solution(&sol, 4, 7);
        let rep = canonical_endo_check(&model, &t, &s).unwrap();
        assert!(rep.worst_residual() < 1e-10, "{rep:?}");
        // both scalars reduce to the conjugate equations
        assert!((rep.t_s - c(1.0, 0.0)).norm() < 1e-10);
        assert!((rep.s_lambda_t - c(1.0, 0.0)).norm() < 1e-10);
        assert!(rep.membership.unwrap() < 1e-10);
    }
}

#[test]
fn group_validation() {
    assert!(Group::new(vec![vec![0, 1], vec![1, 1]]).is_err());
    let g = Group::dihedral(4);
    assert_eq!(g.order(), 8);
    assert_eq!(g.conjugacy_classes().len(), 5);
    let s4 = Group::symmetric(4);
    let ct = character_table(&s4).unwrap();
    let mut dims = ct.dims();
    dims.sort();
    assert_eq!(dims, vec![1, 1, 2, 3, 3]);
}
