mod common;

use std::collections::BTreeMap;
use std::sync::Arc;

use common::{c, exp_times, expm, rng, tr};
use modindex::charge::{Charge, CovariantCharge};
use modindex::linalg::{self, CMat};
use modindex::qsys::{gibbs_state, Dynamics, Element, MatrixAlgebra};
use modindex::susy::*;
use modindex::Complex64;
use rand::Rng;

fn svd_rank(m: &CMat) -> usize {
    if m.is_empty() {
        return 0;
    }
    let s = m.clone().svd(false, false).singular_values;
    let top = s.iter().cloned().fold(0.0, f64::max);
    s.iter().filter(|&&x| x > 1e-10 * top.max(1e-300)).count()
}

fn oracle_index(sys: &GradedSystem) -> i64 {
    let r = svd_rank(&sys.q_plus()) as i64;
    (sys.even_dim() as i64 - r) - (sys.odd_dim() as i64 - r)
}

fn oracle_supertrace(gamma: &[i8], h: &CMat, beta: f64) -> f64 {
    let e = expm(&(h * c(-beta, 0.0)));
    (0..gamma.len()).map(|i| gamma[i] as f64 * e[(i, i)].re).sum()
}

fn random_odd(r: &mut impl Rng, sys: &GradedSystem, scale: f64) -> CMat {
    sys.odd_part(&linalg::random_hermitian(r, sys.dim())) * c(scale, 0.0)
}

fn block_unitary(r: &mut impl Rng, p: usize, q: usize) -> CMat {
    let mut v = CMat::zeros(p + q, p + q);
    v.view_mut((0, 0), (p, p)).copy_from(&linalg::random_unitary(r, p));
    v.view_mut((p, p), (q, q)).copy_from(&linalg::random_unitary(r, q));
    v
}

#[test]
fn toy_index_all_temperatures() {
    let sys = GradedSystem::from_block(&linalg::from_real_rows(&[&[1.0, 0.0]]));
    for beta in [0.1, 0.5, 1.0, 2.0, 10.0] {
        let w = witten_index(&sys, beta).unwrap();
        assert_eq!(w.rank_index, 1);
        // (1 + e^{−β}) − e^{−β}
        let want = (1.0 + (-beta).exp()) - (-beta).exp();
        assert!((w.supertrace - want).abs() < 1e-12);
    }
    assert!(witten_index(&sys, 0.0).is_err());
}

#[test]
fn zero_supercharge_counts_dimensions() {
    for (p, q) in [(3, 1), (2, 5), (4, 4), (1, 0)] {
        let sys = GradedSystem::from_block(&CMat::zeros(q, p));
        let w = witten_index(&sys, 0.7).unwrap();
        assert_eq!(w.rank_index, p as i64 - q as i64);
        assert!((w.supertrace - (p as f64 - q as f64)).abs() < 1e-12);
    }
}

#[test]
fn random_block_index_matches_svd_rank() {
    let mut r = rng(21);
    let sys = GradedSystem::from_block(&linalg::random_complex(&mut r, 4, 6));
    let want = oracle_index(&sys);
    assert_eq!(want, 2);
    for beta in [0.1, 1.0, 10.0] {
        let w = witten_index(&sys, beta).unwrap();
        assert_eq!(w.rank_index, want);
        assert!((w.supertrace - want as f64).abs() < 1e-10, "{beta}: {}", w.supertrace);
    }
}

#[test]
fn index_is_temperature_independent() {
    let mut r = rng(22);
    for _ in 0..50 {
        let p = r.random_range(1..=8);
        let q = r.random_range(1..=8);
        let sys = GradedSystem::random(&mut r, p, q).scaled(0.6);
        let want = oracle_index(&sys) as f64;
        for beta in [0.1, 0.5, 1.0, 2.0, 10.0] {
            let s = witten_index(&sys, beta).unwrap().supertrace;
            assert!((s - want).abs() < 1e-9, "p={p} q={q} β={beta}: {s} vs {want}");
        }
    }
}

#[test]
fn relative_index_cases() {
    let mut r = rng(23);
    let sys = GradedSystem::random(&mut r, 3, 1).scaled(0.6);
    let n = sys.dim();
    let zero = relative_index(&sys, &CMat::zeros(n, n), 1.0).unwrap();
    assert!((zero.continued - c(1.0, 0.0)).norm() < 1e-12);
    assert!(!zero.degenerate);

    // P = δq + q² makes H = (Q+q)²
    let q = random_odd(&mut r, &sys, 0.5);
    let p = sys.delta(&q) + &q * &q;
    for beta in [0.5, 1.0, 2.0] {
        let ri = relative_index(&sys, &p, beta).unwrap();
        assert!((ri.ratio - c(1.0, 0.0)).norm() < 1e-9, "{:?}", ri.ratio);
        assert!(ri.residual < 1e-10);
    }

    let g = sys.gamma();
    let h0 = sys.h();
    for _ in 0..10 {
        let pr = sys.even_part(&linalg::random_hermitian(&mut r, n)) * c(0.4, 0.0);
        let ri = relative_index(&sys, &pr, 1.0).unwrap();
        let num = tr(&(&g * expm(&((&h0 + &pr) * c(-1.0, 0.0)))));
        let den = tr(&(&g * expm(&(&h0 * c(-1.0, 0.0)))));
        assert!((ri.ratio - num / den).norm() < 1e-10);
        assert!(ri.residual < 1e-10);
    }
    let odd = random_odd(&mut r, &sys, 1.0);
    assert!(relative_index(&sys, &odd, 1.0).is_err());
}

#[test]
fn relative_index_degenerate_reference() {
    let sys = GradedSystem::from_block(&linalg::from_real_rows(&[&[1.0]]));
    let p = linalg::diag_real(&[0.3, -0.2]);
    let ri = relative_index(&sys, &p, 1.0).unwrap();
    assert!(ri.degenerate);
}

#[test]
fn graded_reduction_and_trivial_grading() {
    let mut r = rng(24);
    let sys = GradedSystem::random(&mut r, 1, 1);
    let phi = SuperKms::new(&sys, 1.3).unwrap();
    let red = graded_kms_reduce(&phi, 3).unwrap();
    assert!(red.residual < 1e-12);
    assert!(red.graded_kms_residual < 1e-9);
    assert!(red.derivation_residual < 1e-9);

    // Γ = 1 and Q = 0: φ is the ordinary Gibbs functional
    let triv = GradedSystem::new(vec![1, 1, 1], CMat::zeros(3, 3)).unwrap();
    let phi = SuperKms::new(&triv, 1.0).unwrap();
    let red = graded_kms_reduce(&phi, 1).unwrap();
    assert!(linalg::max_abs(&(red.gamma - linalg::eye(3))) == 0.0);

    let bogus = SuperKms::from_density(&sys, 1.3, linalg::random_density(&mut r, 2), 1.0).unwrap();
    assert!(graded_kms_reduce(&bogus, 1).is_err());
}

#[test]
fn charge_sign_cases() {
    // Γ central in M_2 ⊕ M_2: every inner charge fixes it
    let alg = MatrixAlgebra::new(vec![2, 2]).unwrap();
    let mut r = rng(25);
    let gamma = Element::new(&alg, vec![linalg::eye(2), -linalg::eye(2)]).unwrap();
    let h = Element::new(&alg, vec![linalg::diag_real(&[0.0, 0.8]), linalg::diag_real(&[0.3, 1.1])]).unwrap();
    let dy = Dynamics::new(h.clone(), 1.0).unwrap();
    let omega = gibbs_state(&h, 1.0).unwrap();
    let v = Element::new(&alg, vec![linalg::random_unitary(&mut r, 2), linalg::random_unitary(&mut r, 2)]).unwrap();
    let rho = CovariantCharge::new(Charge::abelian(&v).unwrap(), 0.4);
    let s = charge_sign(&gamma, &omega, &dy, &rho).unwrap();
    assert_eq!(s.sign, 1.0);
    assert!(s.residual < 1e-10);

    // Ad σ_x flips Γ = diag(1, −1)
    let g2 = Element::from_matrix(linalg::diag_real(&[1.0, -1.0]));
    let h2 = Element::from_matrix(linalg::diag_real(&[0.0, 0.9]));
    let dy2 = Dynamics::new(h2.clone(), 1.5).unwrap();
    let om2 = gibbs_state(&h2, 1.5).unwrap();
    let sx = Element::from_matrix(linalg::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]));
    let flip = CovariantCharge::new(Charge::abelian(&sx).unwrap(), 0.2);
    let s = charge_sign(&g2, &om2, &dy2, &flip).unwrap();
    assert_eq!(s.sign, -1.0);
    assert!((s.d_omega - c((-0.2f64 * 1.5).exp(), 0.0)).norm() < 1e-12);
    assert!((s.d_phi + s.d_omega).norm() < 1e-12);

    // a rotation by a generic angle does not map Γ to ±Γ
    let rot = Element::from_matrix(linalg::random_unitary(&mut r, 2));
    let bad = CovariantCharge::new(Charge::abelian(&rot).unwrap(), 0.0);
    assert!(charge_sign(&g2, &om2, &dy2, &bad).is_err());
}

#[test]
fn perturbation_cocycle_trivial_and_errors() {
    let mut r = rng(26);
    let sys = GradedSystem::random(&mut r, 2, 2);
    let u = perturbation_cocycle(&sys, &CMat::zeros(4, 4)).unwrap();
    for t in [-1.0, 0.3, 2.0] {
        assert!(linalg::max_abs(&(u.eval(c(t, 0.0)).matrix() - linalg::eye(4))) < 1e-12);
    }
    let even = sys.even_part(&linalg::random_hermitian(&mut r, 4));
    assert!(perturbation_cocycle(&sys, &even).is_err());
}

#[test]
fn perturbation_cocycle_solves_ode() {
    let mut r = rng(27);
    let sys = GradedSystem::random(&mut r, 2, 1).scaled(0.7);
    let q = random_odd(&mut r, &sys, 0.5);
    let u = perturbation_cocycle(&sys, &q).unwrap();
    let h = sys.h();
    let hp = sys.delta(&q) + &q * &q;
    // u' = i u α_t(hp) by classical RK4
    let alpha = |t: f64| exp_times(&h, c(0.0, t)) * &hp * exp_times(&h, c(0.0, -t));
    let f = |t: f64, y: &CMat| y * alpha(t) * c(0.0, 1.0);
    let steps = 400;
    let dt = 1.5 / steps as f64;
    let mut y = linalg::eye(3);
    let mut t = 0.0;
    for _ in 0..steps {
        let k1 = f(t, &y);
        let k2 = f(t + dt / 2.0, &(&y + &k1 * c(dt / 2.0, 0.0)));
        let k3 = f(t + dt / 2.0, &(&y + &k2 * c(dt / 2.0, 0.0)));
        let k4 = f(t + dt, &(&y + &k3 * c(dt, 0.0)));
        y += (k1 + k2 * c(2.0, 0.0) + k3 * c(2.0, 0.0) + k4) * c(dt / 6.0, 0.0);
        t += dt;
    }
    assert!(linalg::max_abs(&(u.eval(c(1.5, 0.0)).matrix() - y)) < 1e-6);
    let times: Vec<f64> = (0..10).map(|k| -1.0 + 0.3 * k as f64).collect();
    assert!(perturbation_ode_residual(&sys, &q, &times).unwrap() < 1e-8);
}

#[test]
fn perturbed_functional_at_identity() {
    let mut r = rng(28);
    let sys = GradedSystem::random(&mut r, 3, 2).scaled(0.5);
    let q = random_odd(&mut r, &sys, 0.6);
    let phi = SuperKms::new(&sys, 1.0).unwrap();
    let u = perturbation_cocycle(&sys, &q).unwrap();
    let continued = phi.eval(u.eval(c(0.0, 1.0)).matrix());
    let qq = sys.q() + &q;
    let z = tr(&expm(&(sys.h() * c(-1.0, 0.0)))).re;
    let want = oracle_supertrace(sys.grading(), &(&qq * &qq), 1.0) / z;
    assert!((continued - c(want, 0.0)).norm() < 1e-10);
    let phq = perturbed_functional(&phi, &q).unwrap();
    assert!((phq.eval(&linalg::eye(5)) - c(want, 0.0)).norm() < 1e-10);
    // the index series truncates at degree zero
    let series = jlo_index_series(&phq, 2).unwrap();
    assert!((series - phi.eval(&linalg::eye(5))).norm() < 1e-9);
}

#[test]
fn deformation_invariance_odd_and_even() {
    let mut r = rng(29);
    let base = GradedSystem::random(&mut r, 2, 2);
    assert!(deformation_invariance(&base, &CMat::zeros(4, 4)).unwrap().residual == 0.0);
    for _ in 0..20 {
        let p = r.random_range(1..=6);
        let q = r.random_range(1..=6);
        let sys = GradedSystem::random(&mut r, p, q).scaled(0.5);
        let pert = random_odd(&mut r, &sys, 0.8);
        let rep = deformation_invariance(&sys, &pert).unwrap();
        assert!(rep.residual < 1e-9, "{rep:?}");
        let want = oracle_index(&sys.perturbed(&pert).unwrap()) as f64;
        assert!((rep.perturbed - want).abs() < 1e-8);
    }
    // search for an even witness
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let even = base.even_part(&linalg::random_hermitian(&mut r, 4));
        worst = worst.max(deformation_invariance(&base, &even).unwrap().residual);
    }
    assert!(worst > 1e-3, "{worst}");
}

#[test]
fn jlo_trivial_values() {
    let mut r = rng(30);
    let sys = GradedSystem::random(&mut r, 2, 2).scaled(0.6);
    let phi = SuperKms::new(&sys, 1.0).unwrap();
    let one = linalg::eye(4);
    let t0 = jlo_eval(&phi, &[one.clone()], JloMethod::Exact).unwrap().value;
    assert!((t0 - phi.eval(&one)).norm() < 1e-13);
    for n in [2, 4] {
        let args = vec![one.clone(); n + 1];
        assert!(jlo_eval(&phi, &args, JloMethod::Exact).unwrap().value.norm() < 1e-13);
    }
    assert!(jlo_eval(&phi, &[one.clone(), one.clone()], JloMethod::Exact).is_err());
    assert!(jlo_eval(&phi, &[], JloMethod::Exact).is_err());
}

#[test]
fn jlo_exact_matches_quadrature() {
    let mut r = rng(31);
    let sys = GradedSystem::random(&mut r, 2, 1).scaled(0.8);
    let phi = SuperKms::new(&sys, 1.0).unwrap();
    for n in [0, 2, 4] {
        let args: Vec<CMat> = (0..=n).map(|_| linalg::random_complex(&mut r, 3, 3)).collect();
        let ex = jlo_eval(&phi, &args, JloMethod::Exact).unwrap();
        let qu = jlo_eval(&phi, &args, JloMethod::Quadrature).unwrap();
        assert!((ex.value - qu.value).norm() < 1e-6 * (1.0 + ex.value.norm()), "n={n}: {} vs {}", ex.value, qu.value);
    }
}

#[test]
fn jlo_is_closed() {
    let mut r = rng(32);
    let sys = GradedSystem::random(&mut r, 2, 1).scaled(0.8);
    let phi = SuperKms::new(&sys, 1.0).unwrap();
    let tau = jlo_cochain(&phi, 4);
    for n in [1, 3] {
        for _ in 0..3 {
            let args: Vec<CMat> = (0..=n).map(|_| linalg::random_complex(&mut r, 3, 3)).collect();
            let v = coboundary(&tau, n, &args).unwrap();
            assert!(v.norm() < 1e-5, "n={n}: {v}");
        }
    }
    assert!(coboundary(&tau, 4, &vec![linalg::eye(3); 5]).is_err());
}

#[test]
fn coboundary_squares_to_zero() {
    let gamma = [1i8, -1];
    let f = random_cochain(&gamma, &[0, 1, 2, 3, 4], 4, true, 7);
    let df = coboundary_cochain(&f).unwrap();
    let ddf = coboundary_cochain(&df).unwrap();
    let mut r = rng(33);
    for n in 0..=2 {
        let args: Vec<CMat> = (0..=n).map(|_| linalg::random_complex(&mut r, 2, 2)).collect();
        let v = ddf.eval(n, &args).unwrap();
        assert!(v.norm() < 1e-9, "n={n}: {v}");
    }
}

fn custom(gamma: Vec<i8>, n: usize, cap: usize, f: impl Fn(&[CMat]) -> Complex64 + Send + Sync + 'static) -> EntireCochain {
    let mut components: BTreeMap<usize, Multilinear> = BTreeMap::new();
    components.insert(n, Arc::new(f));
    EntireCochain { gamma, cap, components }
}

#[test]
fn b_of_degree_zero_cochain() {
    let gamma = vec![1i8, -1];
    let g = linalg::diag_real(&[1.0, -1.0]);
    let w = CMat::from_fn(2, 2, |i, j| c(1.0 + i as f64, j as f64 - 0.5));
    let f = custom(gamma, 0, 2, move |a| tr(&(&w * &a[0])));
    let mut r = rng(34);
    for _ in 0..5 {
        let a0 = linalg::random_complex(&mut r, 2, 2);
        let a1 = linalg::random_complex(&mut r, 2, 2);
        let a1g = &g * &a1 * &g;
        let want = f.eval(0, &[&a0 * &a1]).unwrap() - f.eval(0, &[&a1g * &a0]).unwrap();
        assert!((hochschild_b(&f, 0, &[a0, a1]).unwrap() - want).norm() < 1e-12);
    }
}

#[test]
fn connes_b_hand_values_on_m2() {
    let gamma = vec![1i8, -1];
    let a0 = linalg::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
    let a1 = linalg::from_real_rows(&[&[5.0, 6.0], &[7.0, 8.0]]);

    // f_1(x, y) = Tr(Γxy): (Bf)_0(a) = f_1(1, a) + f_1(a, 1) = 2 Tr(Γa) = 2(1 − 4)
    let g = linalg::diag_real(&[1.0, -1.0]);
    let f1 = custom(gamma.clone(), 1, 2, move |a| tr(&(&g * &a[0] * &a[1])));
    assert!((connes_b(&f1, 1, &[a0.clone()]).unwrap() - c(-6.0, 0.0)).norm() < 1e-12);

    // f_2(x, y, z) = x₀₀ y₀₁ z₁₀:
    //   j = 0: f(1, a0, a1) − f(a0, a1, 1) = 2·7 − 0 = 14
    //   j = 1: −[f(1, a1^γ, a0) − f(a1^γ, a0, 1)] = −(−6·3) = 18
    let f2 = custom(gamma, 2, 3, |a| a[0][(0, 0)] * a[1][(0, 1)] * a[2][(1, 0)]);
    assert!((connes_b(&f2, 2, &[a0, a1]).unwrap() - c(32.0, 0.0)).norm() < 1e-12);
}

#[test]
fn jlo_charged_factorizes() {
    let mut r = rng(35);
    for (p, q) in [(2, 1), (3, 1), (4, 2)] {
        let sys = GradedSystem::random(&mut r, p, q).scaled(0.6);
        let phi = SuperKms::new(&sys, 1.0).unwrap();
        let v = block_unitary(&mut r, p, q);
        let cc = r.random_range(-1.0..1.0);
        let rho = CovariantCharge::new(Charge::abelian(&Element::from_matrix(v)).unwrap(), cc);
        let n = p + q;
        let one = linalg::eye(n);
        let deg0 = jlo_charged(&phi, &rho, &[one.clone()]).unwrap();
        assert!((deg0.value - phi.eval(&one) * (-cc).exp()).norm() < 1e-10);
        assert!((deg0.dimension - c((-cc).exp(), 0.0)).norm() < 1e-10);
        let args: Vec<CMat> = (0..3).map(|_| linalg::random_complex(&mut r, n, n)).collect();
        let rep = jlo_charged(&phi, &rho, &args).unwrap();
        assert!(rep.converged);
        assert!(rep.residual < 1e-5, "{rep:?}");
    }
}

#[test]
fn jlo_charged_identity_reduces() {
    let mut r = rng(36);
    let sys = GradedSystem::random(&mut r, 3, 1).scaled(0.6);
    let phi = SuperKms::new(&sys, 1.0).unwrap();
    let rho = CovariantCharge::new(Charge::abelian(&Element::from_matrix(linalg::eye(4))).unwrap(), 0.0);
    let args: Vec<CMat> = (0..3).map(|_| linalg::random_complex(&mut r, 4, 4)).collect();
    let rep = jlo_charged(&phi, &rho, &args).unwrap();
    let plain = jlo_eval(&phi, &args, JloMethod::Exact).unwrap().value;
    assert!((rep.value - plain).norm() < 1e-6);
    // odd unitaries are rejected
    let odd = linalg::from_real_rows(&[&[0.0, 0.0, 1.0, 0.0], &[0.0, 0.0, 0.0, 1.0], &[1.0, 0.0, 0.0, 0.0], &[0.0, 1.0, 0.0, 0.0]]);
    let bad = CovariantCharge::new(Charge::abelian(&Element::from_matrix(odd)).unwrap(), 0.0);
    assert!(jlo_charged(&phi, &bad, &args).is_err());
}

#[test]
fn sector_indices() {
    let toy = GradedSystem::from_block(&linalg::from_real_rows(&[&[1.0, 0.0]]));
    let one = sector_supercharge(&toy, 1).unwrap();
    assert_eq!(one.system, toy);
    let three = sector_supercharge(&toy, 3).unwrap();
    assert_eq!(three.sector_index, 3);
    assert!(three.square_residual < 1e-12);

    let base = GradedSystem::from_block(&linalg::from_real_rows(&[&[1.0, 0.0, 0.0]]));
    let a = sector_supercharge(&base, 2).unwrap();
    let b = sector_supercharge(&base, 3).unwrap();
    assert_eq!(a.base_index, 2);
    assert_eq!((a.sector_index, b.sector_index), (4, 6));
    assert!((a.sector_index as f64 / b.sector_index as f64 - 2.0 / 3.0).abs() < 1e-15);
    assert_eq!(oracle_index(&a.system), 4);
    assert!(sector_supercharge(&base, 0).is_err());
}

#[test]
fn tensor_product_law() {
    let toy = GradedSystem::from_block(&linalg::from_real_rows(&[&[1.0, 0.0]]));
    let unit = GradedSystem::new(vec![1], CMat::zeros(1, 1)).unwrap();
    let t = tensor_supercharge(&toy, &unit).unwrap();
    assert_eq!(t.system, toy);
    let tt = tensor_supercharge(&toy, &toy).unwrap();
    assert_eq!(witten_index(&tt.system, 1.0).unwrap().rank_index, 1);

    let mut r = rng(37);
    for _ in 0..5 {
        let dims: [usize; 4] = std::array::from_fn(|_| r.random_range(1..=3));
        let a = GradedSystem::random(&mut r, dims[0], dims[1]).scaled(0.7);
        let b = GradedSystem::random(&mut r, dims[2], dims[3]).scaled(0.7);
        for rep in [tensor_supercharge(&a, &b).unwrap(), tensor_supercharge_permuted(&a, &b).unwrap()] {
            assert!(rep.odd_residual < 1e-12);
            assert!(rep.square_residual < 1e-12);
            assert!(rep.index_product_residual < 1e-10);
            assert_eq!(oracle_index(&rep.system), oracle_index(&a) * oracle_index(&b));
        }
    }
}

#[test]
fn graded_system_validation() {
    assert!(GradedSystem::new(vec![], CMat::zeros(0, 0)).is_err());
    assert!(GradedSystem::new(vec![1, 2], CMat::zeros(2, 2)).is_err());
    // diagonal Q is even
    assert!(GradedSystem::new(vec![1, -1], linalg::diag_real(&[1.0, 0.0])).is_err());
    let nonherm = linalg::from_real_rows(&[&[0.0, 1.0], &[2.0, 0.0]]);
    assert!(GradedSystem::new(vec![1, -1], nonherm).is_err());
}
