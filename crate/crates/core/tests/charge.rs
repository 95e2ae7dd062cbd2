mod common;

use common::*;
use modindex::charge::*;
use modindex::cocycle::{cocycle_identity_residual, holomorphic_dimension, UnitaryCocycle};
use modindex::linalg::{self, CMat};
use modindex::qsys::*;
use rand::Rng;

fn sigma_x() -> Element {
    Element::from_matrix(linalg::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]))
}

fn two_level(eps: f64, beta: f64) -> (Dynamics, State) {
    let dynamics = Dynamics::new(Element::from_matrix(diag(&[0.0, eps])), beta).unwrap();
    let phi = dynamics.gibbs();
    (dynamics, phi)
}

fn diag_phases(a: f64, b: f64) -> CMat {
    let mut m = CMat::zeros(2, 2);
    m[(0, 0)] = c(0.0, a).exp();
    m[(1, 1)] = c(0.0, b).exp();
    m
}

struct Instance {
    dynamics: Dynamics,
    phi: State,
    rho: CovariantCharge,
}

fn random_instance<R: Rng>(r: &mut R, n: usize) -> Instance {
    let alg = MatrixAlgebra::full(n);
    let beta = r.random_range(0.3..3.0);
    let dynamics = Dynamics::new(Element::random_hermitian(r, &alg), beta).unwrap();
    let phi = dynamics.gibbs();
    let v = Element::random_unitary(r, &alg);
    let ch = r.random_range(-2.0..2.0);
    Instance { dynamics, phi, rho: CovariantCharge::new(Charge::abelian(&v).unwrap(), ch) }
}

#[test]
fn sigma_x_covariance_cocycle() {
    let eps = 0.7;
    let (dynamics, _) = two_level(eps, 1.0);
    let rho = Charge::abelian(&sigma_x()).unwrap();
    for &ch in &[0.0, 0.45] {
        let u = covariance_cocycle(&rho, &dynamics, ch).unwrap();
        for &t in &[-1.0, 0.3, 2.0] {
            let want = diag_phases(t * eps, -t * eps) * c(0.0, ch * t).exp();
            assert!(dist(u.eval(c(t, 0.0)).matrix(), &want) < 1e-13);
        }
    }
}

#[test]
fn identity_charge_cocycle_is_a_phase() {
    let (dynamics, _) = two_level(1.1, 0.8);
    let rho = Charge::identity(dynamics.algebra());
    let u = covariance_cocycle(&rho, &dynamics, 1.3).unwrap();
    let t = 0.9;
    let want = Element::scalar(dynamics.algebra(), c(0.0, 1.3 * t).exp());
    assert!(u.eval(c(t, 0.0)).dist(&want) < 1e-14);
}

#[test]
fn covariance_and_cocycle_identity_on_random_charges() {
    let mut r = rng(31);
    for _ in 0..10 {
        let inst = random_instance(&mut r, 4);
        let alg = inst.phi.algebra().clone();
        let samples: Vec<Element> = (0..10).map(|_| Element::random(&mut r, &alg)).collect();
        let u = inst.rho.cocycle(&inst.phi, &inst.dynamics).unwrap();
        assert!(covariance_residual(&inst.rho.charge, &inst.dynamics, &u, &samples) < 1e-9);
        assert!(cocycle_identity_residual(&u, 0.4, -1.3) < 1e-10);
        assert!(inst.rho.charge.left_inverse_residual(&samples) < 1e-10);

        let ud = inst.rho.dual_cocycle(&inst.phi, &inst.dynamics).unwrap();
        let conj = inst.rho.charge.conjugate();
        assert!(covariance_residual(&conj, &inst.dynamics, &ud, &samples) < 1e-9);
    }
}

#[test]
fn two_variable_law_for_abelian_pairs() {
    let mut r = rng(32);
    let alg = MatrixAlgebra::full(3);
    let dynamics = Dynamics::new(Element::random_hermitian(&mut r, &alg), 1.0).unwrap();
    let v = Element::random_unitary(&mut r, &alg);
    let w = Element::random_unitary(&mut r, &alg);
    let rho = Charge::abelian(&v).unwrap();
    let sigma = Charge::abelian(&w).unwrap();
    let rs = rho.compose(&sigma).unwrap();
    let u_rho = covariance_cocycle(&rho, &dynamics, 0.0).unwrap();
    let u_sigma = covariance_cocycle(&sigma, &dynamics, 0.0).unwrap();
    let u_rs = covariance_cocycle(&rs, &dynamics, 0.0).unwrap();
    for &t in &[-0.6, 0.2, 1.7] {
        let z = c(t, 0.0);
        let rhs = &rho.apply(&u_sigma.eval(z)) * &u_rho.eval(z);
        assert!(u_rs.eval(z).dist(&rhs) < 1e-10);
    }
}

#[test]
fn frobenius_dual_closed_forms() {
    let eps = 0.7;
    let (dynamics, _) = two_level(eps, 1.0);
    let rho = Charge::abelian(&sigma_x()).unwrap();
    let u = covariance_cocycle(&rho, &dynamics, 0.0).unwrap();
    let ud = frobenius_dual_cocycle(&rho, &u, &ConjugateData::default()).unwrap();
    // σ_x is self-adjoint, so v* α_t(v) coincides with v α_t(v*)
    for &t in &[-0.8, 0.5, 1.6] {
        let want = diag_phases(t * eps, -t * eps);
        assert!(dist(ud.eval(c(t, 0.0)).matrix(), &want) < 1e-13);
    }

    // the phase enters with the opposite sign
    let ch = 0.9;
    let uc = covariance_cocycle(&rho, &dynamics, ch).unwrap();
    let udc = frobenius_dual_cocycle(&rho, &uc, &ConjugateData::default()).unwrap();
    for &t in &[0.1, 2.3] {
        let want = ud.eval(c(t, 0.0)).scale(c(0.0, -ch * t).exp());
        assert!(udc.eval(c(t, 0.0)).dist(&want) < 1e-13);
    }
}

#[test]
fn frobenius_dual_is_gauge_independent() {
    let mut r = rng(33);
    let inst = random_instance(&mut r, 3);
    let u = inst.rho.cocycle(&inst.phi, &inst.dynamics).unwrap();
    let base = frobenius_dual_cocycle(&inst.rho.charge, &u, &ConjugateData::default()).unwrap();
    for &lambda in &[c(0.3, 0.0), c(2.0, -1.5), c(0.0, 4.0)] {
        let conj = ConjugateData::default().rescaled(lambda);
        let other = frobenius_dual_cocycle(&inst.rho.charge, &u, &conj).unwrap();
        for &t in &[-1.0, 0.4, 3.0] {
            assert!(other.eval(c(t, 0.0)).dist(&base.eval(c(t, 0.0))) < 1e-12);
        }
    }
    let broken = ConjugateData { r: c(2.0, 0.0), rbar: c(1.0, 0.0) };
    assert!(frobenius_dual_cocycle(&inst.rho.charge, &u, &broken).is_err());
}

#[test]
fn geometric_dimension_of_abelian_charges() {
    let mut r = rng(34);
    for _ in 0..20 {
        let mut inst = random_instance(&mut r, 3);
        let g0 = geometric_dimension(&inst.rho, &inst.phi, &inst.dynamics).unwrap();
        assert!((g0.value - 1.0).abs() < 1e-9);
        assert!((g0.product_form - c(1.0, 0.0)).norm() < 1e-9);
        assert!(1.0 <= g0.value + 1e-9);
        for &ch in &[-2.0, 0.0, 5.0] {
            inst.rho.c = ch;
            let g = geometric_dimension(&inst.rho, &inst.phi, &inst.dynamics).unwrap();
            assert!((g.value - g0.value).abs() < 1e-10);
        }
    }
}

#[test]
fn geometric_dimension_of_multiplicity_model() {
    let mut r = rng(35);
    let alg = MatrixAlgebra::new(vec![2, 1]).unwrap();
    let dynamics = Dynamics::new(Element::random_hermitian(&mut r, &alg), 1.2).unwrap();
    let phi = dynamics.gibbs();
    for d in 1..=4 {
        let rho = CovariantCharge::exact_multiplicity(&alg, d, &phi, 0.7).unwrap();
        let g = geometric_dimension(&rho, &phi, &dynamics).unwrap();
        assert!((g.value - d as f64).abs() < 1e-10);
        assert!(rho.charge.dimension() <= g.value + 1e-10);
    }
    let bare = CovariantCharge::new(Charge::multiplicity(&alg, 2).unwrap(), 0.0);
    assert!(geometric_dimension(&bare, &phi, &dynamics).is_err());
}

#[test]
fn chemical_potential_of_a_phase() {
    let (dynamics, phi) = two_level(0.5, 2.0);
    let rho = Charge::identity(phi.algebra());
    let ch = 0.35;
    let u = covariance_cocycle(&rho, &dynamics, ch).unwrap();
    let m = chemical_potential(&rho, &phi, &dynamics, &u).unwrap();
    assert!((m.mu + ch).abs() < 1e-12);
    assert!((m.log_d_phi - (m.log_d + m.beta * m.mu)).abs() < 1e-15);
    assert!(!m.flagged);
}

#[test]
fn chemical_potential_asymmetry() {
    let mut r = rng(36);
    for _ in 0..50 {
        let inst = random_instance(&mut r, 3);
        let u = inst.rho.cocycle(&inst.phi, &inst.dynamics).unwrap();
        let ud = inst.rho.dual_cocycle(&inst.phi, &inst.dynamics).unwrap();
        let m = chemical_potential(&inst.rho.charge, &inst.phi, &inst.dynamics, &u).unwrap();
        let md = chemical_potential(&inst.rho.charge.conjugate(), &inst.phi, &inst.dynamics, &ud).unwrap();
        assert!((m.mu + md.mu).abs() < 1e-10, "{} {}", m.mu, md.mu);
    }
}

#[test]
fn time_reversal_symmetric_charges_have_zero_potential() {
    let mut r = rng(37);
    for _ in 0..10 {
        let alg = MatrixAlgebra::full(4);
        let h = Element::from_matrix(linalg::random_real_symmetric(&mut r, 4));
        let v = Element::from_matrix(linalg::random_orthogonal(&mut r, 4));
        let dynamics = Dynamics::new(h, 1.5).unwrap();
        let phi = dynamics.gibbs();
        // the transpose preserves φ and maps u(t) to u(-t)^T-type data
        let a = Element::random(&mut r, &alg);
        let at = Element::from_matrix(a.matrix().transpose());
        assert!((phi.eval(&at) - phi.eval(&a)).norm() < 1e-12);
        let rho = Charge::abelian(&v).unwrap();
        let u = covariance_cocycle(&rho, &dynamics, 0.0).unwrap();
        let m = chemical_potential(&rho, &phi, &dynamics, &u).unwrap();
        assert!(m.mu.abs() < 1e-9);
    }
}

#[test]
fn free_energy_simple_cases() {
    let (dynamics, phi) = two_level(0.8, 1.1);
    let rho = Charge::identity(phi.algebra());
    let u0 = covariance_cocycle(&rho, &dynamics, 0.0).unwrap();
    let f0 = free_energy(&rho, &phi, &dynamics, &u0).unwrap();
    assert!(f0.gns.abs() < 1e-12 && f0.spread() < 1e-12);
    let ch = -0.6;
    let u = covariance_cocycle(&rho, &dynamics, ch).unwrap();
    let f = free_energy(&rho, &phi, &dynamics, &u).unwrap();
    assert!((f.cocycle - ch).abs() < 1e-12);
    assert!(f.spread() < 1e-10);
}

#[test]
fn free_energy_three_way_agreement() {
    let mut r = rng(38);
    for _ in 0..20 {
        let inst = random_instance(&mut r, 4);
        let u = inst.rho.cocycle(&inst.phi, &inst.dynamics).unwrap();
        let f = free_energy(&inst.rho.charge, &inst.phi, &inst.dynamics, &u).unwrap();
        assert!(f.spread() < 1e-8, "{f:?}");
        // independent check of the cocycle route: d_φ(u) = e^{-cβ} for inner charges
        let want = inst.rho.c;
        assert!((f.cocycle - want).abs() < 1e-9);
    }
}

#[test]
fn free_energy_of_connes_type_cocycle() {
    let mut r = rng(39);
    let alg = MatrixAlgebra::full(3);
    let dynamics = Dynamics::new(Element::random_hermitian(&mut r, &alg), 0.9).unwrap();
    let phi = dynamics.gibbs();
    let psi = State::random_faithful(&mut r, &alg).scaled(1.8);
    let u = modindex::cocycle::connes_cocycle_physical(&psi, &phi, &dynamics).unwrap();
    let rho = Charge::identity(&alg);
    let f = free_energy(&rho, &phi, &dynamics, &u).unwrap();
    assert!(f.spread() < 1e-8, "{f:?}");
    assert!((f.cocycle + 1.8f64.ln() / 0.9).abs() < 1e-10);
}

#[test]
fn conditional_entropy_values_and_identity() {
    let alg = MatrixAlgebra::full(2);
    assert_eq!(conditional_entropy(&Charge::identity(&alg)), 0.0);
    let m2 = Charge::multiplicity(&alg, 2).unwrap();
    assert!((conditional_entropy(&m2) - 2.0 * 2f64.ln()).abs() < 1e-15);

    let mut r = rng(40);
    for _ in 0..5 {
        let inst = random_instance(&mut r, 3);
        let beta = inst.dynamics.beta();
        let u = inst.rho.cocycle(&inst.phi, &inst.dynamics).unwrap();
        let ud = inst.rho.dual_cocycle(&inst.phi, &inst.dynamics).unwrap();
        let f = free_energy(&inst.rho.charge, &inst.phi, &inst.dynamics, &u).unwrap();
        let fd = free_energy(&inst.rho.charge.conjugate(), &inst.phi, &inst.dynamics, &ud).unwrap();
        let lhs = -beta * (f.gns + fd.gns);
        assert!((lhs - conditional_entropy(&inst.rho.charge)).abs() < 1e-8);
    }
}

#[test]
fn dimension_is_multiplicative_on_compositions() {
    let mut r = rng(41);
    let alg = MatrixAlgebra::full(3);
    let dynamics = Dynamics::new(Element::random_hermitian(&mut r, &alg), 1.4).unwrap();
    let phi = dynamics.gibbs();
    let v = Element::random_unitary(&mut r, &alg);
    let w = Element::random_unitary(&mut r, &alg);
    let (cr, cs) = (0.3, -1.1);
    let rho = Charge::abelian(&v).unwrap();
    let sigma = Charge::abelian(&w).unwrap();
    let u_r = covariance_cocycle(&rho, &dynamics, cr).unwrap();
    let u_s = covariance_cocycle(&sigma, &dynamics, cs).unwrap();
    let u_rs = covariance_cocycle(&rho.compose(&sigma).unwrap(), &dynamics, cr + cs).unwrap();
    let beta = dynamics.beta();
    let d = |u: &UnitaryCocycle| holomorphic_dimension(u, &phi, beta).unwrap().value;
    assert!((d(&u_rs) - d(&u_r) * d(&u_s)).norm() < 1e-9);
}

#[test]
fn gauge_shift_leaves_geometric_data_unchanged() {
    let mut r = rng(42);
    let inst = random_instance(&mut r, 3);
    let beta = inst.dynamics.beta();
    let u = inst.rho.cocycle(&inst.phi, &inst.dynamics).unwrap();
    let ud = inst.rho.dual_cocycle(&inst.phi, &inst.dynamics).unwrap();
    let d = |u: &UnitaryCocycle| holomorphic_dimension(u, &inst.phi, beta).unwrap().value.re;
    let base = (d(&u) * d(&ud)).sqrt();
    for &delta in &[-1.0, 0.5, 3.0] {
        let shifted = (d(&u.with_phase(delta).unwrap()) * d(&ud.with_phase(-delta).unwrap())).sqrt();
        assert!((shifted - base).abs() < 1e-10);
    }
}

#[test]
fn horizon_identity_cases() {
    let mut r = rng(43);
    let alg = MatrixAlgebra::full(3);
    let h = Element::random_hermitian(&mut r, &alg);
    let kappa = 1.7;
    let sc = BlackHoleScenario::new(&h, kappa).unwrap();
    assert!((sc.beta() * kappa - 2.0 * std::f64::consts::PI).abs() < 1e-12);

    let v = Element::random_unitary(&mut r, &alg);
    let w = Element::random_unitary(&mut r, &alg);
    let rho = CovariantCharge::new(Charge::abelian(&v).unwrap(), 0.4);
    let sigma = CovariantCharge::new(Charge::abelian(&w).unwrap(), -1.2);

    let same = black_hole_identity(&sc, &rho, &rho).unwrap();
    assert!(same.lhs.abs() < 1e-12 && same.rhs == 0.0);

    let rep = black_hole_identity(&sc, &rho, &sigma).unwrap();
    assert!(rep.residual < 1e-9 && rep.rhs == 0.0);
    assert!(rep.relative_residual < 1e-9);
    assert!(rep.ife_residual < 1e-9);
    assert!(rep.f_rho_sigma_relative.is_some());

    let m2 = CovariantCharge::exact_multiplicity(&alg, 2, &sc.phi, 0.0).unwrap();
    let id = CovariantCharge::new(Charge::identity(&alg), 0.0);
    let rep = black_hole_identity(&sc, &m2, &id).unwrap();
    assert!((rep.rhs - 2f64.ln()).abs() < 1e-15);
    assert!(rep.residual < 1e-9, "{rep:?}");
    assert!(rep.ife_residual < 1e-9);
}

#[test]
fn horizon_requires_positive_gravity() {
    let h = Element::from_matrix(diag(&[0.0, 1.0]));
    assert!(BlackHoleScenario::new(&h, 0.0).is_err());
}
