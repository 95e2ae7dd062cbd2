//! Graded finite systems: supertraces and the Witten index, super-KMS
//! functionals, perturbation cocycles, the JLO cocycle with its charged
//! variant, the `b + B` coboundary, and sector/tensor supercharges.
//!
//! The odd derivation is the graded commutator `δa = Qa − (−1)^{|a|} aQ`.
//! JLO evaluation runs at `β = 1`; other temperatures are handled by scaling
//! `Q` with `√β`.

use std::collections::BTreeMap;
use std::sync::Arc;

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};

use crate::charge::{covariance_cocycle, ChargeKind, CovariantCharge};
use crate::cocycle::UnitaryCocycle;
use crate::error::{domain, Error, Result};
use crate::linalg::{self, c, CMat, Spectral, ONE, ZERO};
use crate::qsys::{gibbs_state, Dynamics, Element, State};

/// Grading `Γ = diag(gamma)` and an odd Hermitian supercharge `Q`.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedSystem {
    gamma: Vec<i8>,
    q: CMat,
}

impl GradedSystem {
    pub fn new(gamma: Vec<i8>, q: CMat) -> Result<GradedSystem> {
        let n = gamma.len();
        if n == 0 {
            return domain("graded system needs a non-empty grading");
        }
        if gamma.iter().any(|&g| g != 1 && g != -1) {
            return domain("grading entries must be ±1");
        }
        if q.shape() != (n, n) {
            return domain(format!("supercharge must be {n}x{n}"));
        }
        if !linalg::is_hermitian(&q, 1e-12) {
            return domain("supercharge is not Hermitian");
        }
        let g = gamma_matrix(&gamma);
        let anti = linalg::max_abs(&linalg::anticommutator(&g, &q));
        if anti > 1e-12 * (1.0 + linalg::max_abs(&q)) {
            return domain(format!("supercharge is not odd (‖ΓQ + QΓ‖ = {anti:e})"));
        }
        Ok(GradedSystem { gamma, q: linalg::hermitian_part(&q) })
    }

    /// `Γ = 1_p ⊕ (−1_q)` and `Q = [[0, Q_+*], [Q_+, 0]]` for `Q_+: ℂ^p → ℂ^q`.
    pub fn from_block(q_plus: &CMat) -> GradedSystem {
        let (qd, p) = q_plus.shape();
        let n = p + qd;
        let mut q = CMat::zeros(n, n);
        q.view_mut((p, 0), (qd, p)).copy_from(q_plus);
        q.view_mut((0, p), (p, qd)).copy_from(&q_plus.adjoint());
        let gamma = std::iter::repeat_n(1, p).chain(std::iter::repeat_n(-1, qd)).collect();
        GradedSystem { gamma, q }
    }

    /// Random `Q_+` with Gaussian entries.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, p: usize, q: usize) -> GradedSystem {
        GradedSystem::from_block(&linalg::random_complex(rng, q, p))
    }

    pub fn dim(&self) -> usize {
        self.gamma.len()
    }

    pub fn grading(&self) -> &[i8] {
        &self.gamma
    }

    pub fn gamma(&self) -> CMat {
        gamma_matrix(&self.gamma)
    }

    pub fn q(&self) -> &CMat {
        &self.q
    }

    pub fn h(&self) -> CMat {
        &self.q * &self.q
    }

    pub fn even_dim(&self) -> usize {
        self.gamma.iter().filter(|&&g| g == 1).count()
    }

    pub fn odd_dim(&self) -> usize {
        self.dim() - self.even_dim()
    }

    /// `Q_+: H_+ → H_−`.
    pub fn q_plus(&self) -> CMat {
        let plus: Vec<usize> = (0..self.dim()).filter(|&i| self.gamma[i] == 1).collect();
        let minus: Vec<usize> = (0..self.dim()).filter(|&i| self.gamma[i] == -1).collect();
        CMat::from_fn(minus.len(), plus.len(), |a, b| self.q[(minus[a], plus[b])])
    }

    /// `√s · Q`.
    pub fn scaled(&self, s: f64) -> GradedSystem {
        GradedSystem { gamma: self.gamma.clone(), q: &self.q * c(s, 0.0) }
    }

    /// `γ(a) = ΓaΓ`.
    pub fn grade(&self, a: &CMat) -> CMat {
        CMat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * (self.gamma[i] * self.gamma[j]) as f64)
    }

    pub fn even_part(&self, a: &CMat) -> CMat {
        (a + self.grade(a)) * c(0.5, 0.0)
    }

    pub fn odd_part(&self, a: &CMat) -> CMat {
        (a - self.grade(a)) * c(0.5, 0.0)
    }

    pub fn is_odd(&self, a: &CMat, tol: f64) -> bool {
        linalg::max_abs(&self.even_part(a)) <= tol * (1.0 + linalg::max_abs(a))
    }

    /// `δa = [Q, a_+] + {Q, a_−}`.
    pub fn delta(&self, a: &CMat) -> CMat {
        let ae = self.even_part(a);
        let ao = self.odd_part(a);
        linalg::commutator(&self.q, &ae) + linalg::anticommutator(&self.q, &ao)
    }

    /// `Tr(Γ e^{−βH})`.
    pub fn supertrace_heat(&self, beta: f64) -> f64 {
        let e = Spectral::new(&self.h()).exp_scaled(c(-beta, 0.0));
        (0..self.dim()).map(|i| self.gamma[i] as f64 * e[(i, i)].re).sum()
    }

    /// Same grading, supercharge `Q + q`.
    pub fn perturbed(&self, q: &CMat) -> Result<GradedSystem> {
        GradedSystem::new(self.gamma.clone(), &self.q + q)
    }
}

fn gamma_matrix(gamma: &[i8]) -> CMat {
    linalg::diag_real(&gamma.iter().map(|&g| g as f64).collect::<Vec<_>>())
}

// ---------------------------------------------------------------------------
// Index

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WittenIndex {
    /// `Tr(Γ e^{−βH})`.
    pub supertrace: f64,
    /// `dim ker Q_+ − dim ker Q_+*` from the singular values of `Q_+`.
    pub rank_index: i64,
}

impl WittenIndex {
    pub fn residual(&self) -> f64 {
        (self.supertrace - self.rank_index as f64).abs()
    }
}

pub fn witten_index(sys: &GradedSystem, beta: f64) -> Result<WittenIndex> {
    if !(beta > 0.0 && beta.is_finite()) {
        return domain("β must be positive");
    }
    let qp = sys.q_plus();
    let r = if qp.is_empty() { 0 } else { linalg::rank(&qp, 1e-10) };
    let (p, q) = (sys.even_dim() as i64, sys.odd_dim() as i64);
    Ok(WittenIndex { supertrace: sys.supertrace_heat(beta), rank_index: (p - r as i64) - (q - r as i64) })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RelativeIndex {
    /// Continuation of `ω_s(u_P(t))` to `t = iβ`.
    pub continued: Complex64,
    /// `Tr_s(e^{−βH}) / Tr_s(e^{−βH₀})`.
    pub ratio: Complex64,
    pub residual: f64,
    /// The reference supertrace vanishes; both sides are then reported
    /// unnormalized.
    pub degenerate: bool,
}

/// Multiplicative relative index of `H = H₀ + P` against `H₀`.
pub fn relative_index(sys0: &GradedSystem, p: &CMat, beta: f64) -> Result<RelativeIndex> {
    let n = sys0.dim();
    if p.shape() != (n, n) || !linalg::is_hermitian(p, 1e-10) {
        return domain("perturbation must be Hermitian of the system's size");
    }
    let g = sys0.gamma();
    if linalg::max_abs(&linalg::commutator(&g, p)) > 1e-10 * (1.0 + linalg::max_abs(p)) {
        return domain("perturbation does not commute with the grading");
    }
    let h0 = sys0.h();
    let h = &h0 + p;
    let dyn0 = Dynamics::new(Element::from_matrix(h0.clone()), beta)?;
    let u = UnitaryCocycle::perturbation(&dyn0, &Element::from_matrix(h.clone()))?;
    let ub = u.eval(c(0.0, beta));
    let heat0 = Spectral::new(&h0).exp_scaled(c(-beta, 0.0));
    let heat = Spectral::new(&h).exp_scaled(c(-beta, 0.0));
    let num = linalg::trace(&(&g * &heat0 * ub.matrix()));
    let st0 = linalg::trace(&(&g * &heat0));
    let st = linalg::trace(&(&g * &heat));
    let scale = linalg::trace(&heat0).re;
    let degenerate = st0.norm() < 1e-12 * scale;
    let (continued, ratio) = if degenerate { (num, st) } else { (num / st0, st / st0) };
    Ok(RelativeIndex { continued, ratio, residual: (continued - ratio).norm(), degenerate })
}

// ---------------------------------------------------------------------------
// Super-KMS functionals

/// `φ(a) = Tr(ρ a) / norm` with `ρ = Γ e^{−βH}` unless given otherwise.
#[derive(Clone, Debug)]
pub struct SuperKms {
    sys: GradedSystem,
    beta: f64,
    density: CMat,
    norm: f64,
}

impl SuperKms {
    pub fn new(sys: &GradedSystem, beta: f64) -> Result<SuperKms> {
        if !(beta > 0.0 && beta.is_finite()) {
            return domain("β must be positive");
        }
        let heat = Spectral::new(&sys.h()).exp_scaled(c(-beta, 0.0));
        let norm = linalg::trace(&heat).re;
        Ok(SuperKms { density: sys.gamma() * heat, sys: sys.clone(), beta, norm })
    }

    /// Arbitrary density; `graded_kms_reduce` decides whether it is super-KMS.
    pub fn from_density(sys: &GradedSystem, beta: f64, density: CMat, norm: f64) -> Result<SuperKms> {
        if density.shape() != (sys.dim(), sys.dim()) || norm <= 0.0 {
            return domain("density shape or normalization invalid");
        }
        Ok(SuperKms { sys: sys.clone(), beta, density, norm })
    }

    pub fn with_norm(&self, norm: f64) -> SuperKms {
        SuperKms { norm, ..self.clone() }
    }

    pub fn system(&self) -> &GradedSystem {
        &self.sys
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn density(&self) -> &CMat {
        &self.density
    }

    pub fn eval(&self, a: &CMat) -> Complex64 {
        linalg::trace(&(&self.density * a)) / self.norm
    }

    pub fn dynamics(&self) -> Result<Dynamics> {
        Dynamics::new(Element::from_matrix(self.sys.h()), self.beta)
    }

    /// `|φ(a α_{t+iβ}(b)) − φ(α_t(γb) a)|`.
    pub fn graded_kms_residual(&self, a: &CMat, b: &CMat, t: f64) -> Result<f64> {
        let dy = self.dynamics()?;
        let lhs = self.eval(&(a * dy.evolve(&Element::from_matrix(b.clone()), c(t, self.beta)).matrix()));
        let rhs = self.eval(&(dy.evolve(&Element::from_matrix(self.sys.grade(b)), c(t, 0.0)).matrix() * a));
        Ok((lhs - rhs).norm())
    }

    /// `|φ(δa)|`.
    pub fn derivation_residual(&self, a: &CMat) -> f64 {
        self.eval(&self.sys.delta(a)).norm()
    }
}

#[derive(Clone, Debug)]
pub struct GradedReduction {
    /// Gibbs state of `H` at the functional's `β`.
    pub omega: State,
    pub gamma: CMat,
    /// `‖φ − ω(Γ·)·c‖` on matrix units, with `c = Tr e^{−βH}/norm`.
    pub residual: f64,
    pub graded_kms_residual: f64,
    pub derivation_residual: f64,
}

/// Writes `φ = ω(Γ·)` up to the normalization, with `ω` the ordinary Gibbs state.
pub fn graded_kms_reduce(phi: &SuperKms, seed: u64) -> Result<GradedReduction> {
    let sys = &phi.sys;
    let h = sys.h();
    let omega = gibbs_state(&Element::from_matrix(h.clone()), phi.beta)?;
    let heat = Spectral::new(&h).exp_scaled(c(-phi.beta, 0.0));
    let z = linalg::trace(&heat).re;
    let want = sys.gamma() * omega.densities()[0].clone() * c(z, 0.0);
    let residual = linalg::max_abs(&(&phi.density - &want)) / phi.norm;
    if residual > 1e-9 * (1.0 + linalg::max_abs(&phi.density) / phi.norm) {
        return domain(format!("functional is not of the form ω(Γ·) (residual {residual:e})"));
    }
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let n = sys.dim();
    let mut gk: f64 = 0.0;
    let mut dr: f64 = 0.0;
    for k in 0..4 {
        let a = linalg::random_complex(&mut rng, n, n);
        let b = linalg::random_complex(&mut rng, n, n);
        gk = gk.max(phi.graded_kms_residual(&a, &b, 0.3 * k as f64 - 0.4)?);
        dr = dr.max(phi.derivation_residual(&a));
    }
    Ok(GradedReduction { omega, gamma: sys.gamma(), residual, graded_kms_residual: gk, derivation_residual: dr })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SignCheck {
    /// `ρ(Γ)Γ*` as a scalar.
    pub sign: f64,
    /// `φ(u(iβ))/φ(1)` for `φ = ω(Γ·)`.
    pub d_phi: Complex64,
    /// `ω(u(iβ))`.
    pub d_omega: Complex64,
    pub residual: f64,
}

/// Checks `d_φ(u_ρ) = ±d_ω(u_ρ)` for a charge with `ρ(Γ) = ±Γ`, where
/// `Γ` is a grading unitary commuting with the dynamics.
pub fn charge_sign(gamma: &Element, omega: &State, dynamics: &Dynamics, rho: &CovariantCharge) -> Result<SignCheck> {
    let ident = Element::identity(gamma.algebra());
    if (&(gamma * gamma) - &ident).norm() > 1e-10 || !gamma.is_hermitian(1e-10) {
        return domain("grading is not a selfadjoint unitary");
    }
    if rho.charge.target_algebra() != *gamma.algebra() {
        return domain("charge is not an endomorphism of the graded algebra");
    }
    let rg = rho.charge.apply(gamma);
    let ratio = &rg * &gamma.adjoint();
    let Some(s) = ratio.as_scalar(1e-9) else {
        return domain("ρ(Γ)Γ* is not a scalar");
    };
    if (s.norm() - 1.0).abs() > 1e-9 || s.im.abs() > 1e-9 {
        return domain("ρ(Γ) is not ±Γ");
    }
    let u = rho.cocycle(omega, dynamics)?;
    let ub = u.eval(c(0.0, dynamics.beta()));
    let phi1 = omega.eval(gamma);
    if phi1.norm() < 1e-12 {
        return domain("φ(1) vanishes; normalized dimension undefined");
    }
    let d_phi = omega.eval(&(gamma * &ub)) / phi1;
    let d_omega = omega.eval(&ub) / omega.weight();
    let sign = s.re.signum();
    Ok(SignCheck { sign, d_phi, d_omega, residual: (d_phi - d_omega * sign).norm() })
}

// ---------------------------------------------------------------------------
// Perturbations

fn require_odd_hermitian(sys: &GradedSystem, q: &CMat) -> Result<()> {
    if q.shape() != (sys.dim(), sys.dim()) || !linalg::is_hermitian(q, 1e-10) {
        return domain("perturbation must be Hermitian of the system's size");
    }
    if !sys.is_odd(q, 1e-10) {
        return domain("perturbation is not odd");
    }
    Ok(())
}

/// `u^q(t) = e^{itH_q} e^{−itH}`, `H_q = (Q+q)²`, at `β = 1`.
pub fn perturbation_cocycle(sys: &GradedSystem, q: &CMat) -> Result<UnitaryCocycle> {
    require_odd_hermitian(sys, q)?;
    let h = sys.h();
    let qq = sys.q() + q;
    let hq = &qq * &qq;
    let dy = Dynamics::new(Element::from_matrix(h.clone()), 1.0)?;
    UnitaryCocycle::exp_product(&dy, &Element::from_matrix(hq), &Element::from_matrix(-h))
}

/// `max_t ‖−i u'(t) − u(t) α_t(δq + q²)‖` with `u'` from a five-point stencil.
pub fn perturbation_ode_residual(sys: &GradedSystem, q: &CMat, times: &[f64]) -> Result<f64> {
    let u = perturbation_cocycle(sys, q)?;
    let hpert = sys.delta(q) + q * q;
    let dy = u.dynamics().clone();
    let step = 1e-3;
    let mut worst: f64 = 0.0;
    for &t in times {
        let at = |s: f64| u.eval(c(s, 0.0)).matrix().clone();
        let d = (at(t - 2.0 * step) - at(t - step) * c(8.0, 0.0) + at(t + step) * c(8.0, 0.0) - at(t + 2.0 * step)) / c(12.0 * step, 0.0);
        let lhs = d * c(0.0, -1.0);
        let rhs = u.eval(c(t, 0.0)).matrix() * dy.evolve(&Element::from_matrix(hpert.clone()), c(t, 0.0)).matrix();
        worst = worst.max(linalg::op_norm(&(lhs - rhs)));
    }
    Ok(worst)
}

/// `φ^q(a) = Tr(Γ e^{−H_q} a)/Z` with `Z` from the unperturbed `H`.
pub fn perturbed_functional(phi: &SuperKms, q: &CMat) -> Result<SuperKms> {
    require_odd_hermitian(&phi.sys, q)?;
    let sq = phi.sys.perturbed(q)?;
    Ok(SuperKms::new(&sq, phi.beta)?.with_norm(phi.norm))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeformationReport {
    pub reference: f64,
    pub perturbed: f64,
    /// Relative difference, absolute when the reference vanishes.
    pub residual: f64,
}

/// `Tr(Γe^{−(Q+q)²})` against `Tr(Γe^{−Q²})` for any Hermitian `q`.
pub fn deformation_invariance(sys: &GradedSystem, q: &CMat) -> Result<DeformationReport> {
    if q.shape() != (sys.dim(), sys.dim()) || !linalg::is_hermitian(q, 1e-10) {
        return domain("perturbation must be Hermitian of the system's size");
    }
    let reference = sys.supertrace_heat(1.0);
    let qq = sys.q() + q;
    let e = Spectral::new(&(&qq * &qq)).exp_scaled(c(-1.0, 0.0));
    let perturbed: f64 = (0..sys.dim()).map(|i| sys.grading()[i] as f64 * e[(i, i)].re).sum();
    let diff = (perturbed - reference).abs();
    let residual = if reference.abs() > 1e-12 { diff / reference.abs() } else { diff };
    Ok(DeformationReport { reference, perturbed, residual })
}

// ---------------------------------------------------------------------------
// Simplex quadrature

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureResult {
    pub value: Complex64,
    pub error: f64,
    pub order: usize,
    pub converged: bool,
}

/// `∫_{Σ_n} f(s_0, …, s_n) ds` over `{s_k ≥ 0, Σ s_k = 1}` by a Gauss
/// product rule pulled back through the collapsed-coordinate map, doubling the
/// order until successive values agree.
pub fn integrate_simplex<F>(n: usize, tol: f64, max_order: usize, f: F) -> Result<QuadratureResult>
where
    F: Fn(&[f64]) -> Complex64,
{
    if n == 0 {
        return Ok(QuadratureResult { value: f(&[1.0]), error: 0.0, order: 0, converged: true });
    }
    let mut order = 4;
    let mut prev = simplex_rule(n, order, &f)?;
    loop {
        let next_order = order * 2;
        if next_order > max_order {
            return Ok(QuadratureResult { value: prev, error: f64::NAN, order, converged: false });
        }
        let next = simplex_rule(n, next_order, &f)?;
        let err = (next - prev).norm();
        order = next_order;
        if err <= tol * (1.0 + next.norm()) {
            return Ok(QuadratureResult { value: next, error: err, order, converged: true });
        }
        if order * 2 > max_order {
            return Ok(QuadratureResult { value: next, error: err, order, converged: false });
        }
        prev = next;
    }
}

fn simplex_rule<F: Fn(&[f64]) -> Complex64>(n: usize, order: usize, f: &F) -> Result<Complex64> {
    let rule = GaussLegendre::new(order).map_err(|e| Error::Numerical(format!("{e:?}")))?;
    let nodes: Vec<(f64, f64)> = rule.as_node_weight_pairs().iter().map(|&(x, w)| (0.5 * (x + 1.0), 0.5 * w)).collect();
    let mut idx = vec![0usize; n];
    let mut total = ZERO;
    let mut s = vec![0.0; n + 1];
    loop {
        let mut rest = 1.0;
        let mut weight = 1.0;
        for k in 0..n {
            let (x, w) = nodes[idx[k]];
            s[k] = rest * x;
            weight *= w * rest;
            rest *= 1.0 - x;
        }
        s[n] = rest;
        total += f(&s) * weight;
        // odometer increment
        let mut k = 0;
        loop {
            if k == n {
                return Ok(total);
            }
            idx[k] += 1;
            if idx[k] < order {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

// ---------------------------------------------------------------------------
// JLO

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JloMethod {
    /// Eigenbasis summation with closed-form simplex integrals.
    Exact,
    Quadrature,
}

/// Eigendata of `H` adapted to the grading.
#[derive(Clone, Debug)]
struct GradedEigen {
    energies: Vec<f64>,
    u: CMat,
}

fn graded_eigen(sys: &GradedSystem) -> GradedEigen {
    let h = sys.h();
    let n = sys.dim();
    let mut u = CMat::zeros(n, n);
    let mut energies = vec![0.0; n];
    let mut col = 0;
    for sector in [1i8, -1] {
        let idx: Vec<usize> = (0..n).filter(|&i| sys.grading()[i] == sector).collect();
        if idx.is_empty() {
            continue;
        }
        let block = CMat::from_fn(idx.len(), idx.len(), |a, b| h[(idx[a], idx[b])]);
        let sp = Spectral::new(&block);
        for k in 0..idx.len() {
            for (a, &i) in idx.iter().enumerate() {
                u[(i, col)] = sp.vectors[(a, k)];
            }
            energies[col] = sp.values[k];
            col += 1;
        }
    }
    GradedEigen { energies, u }
}

fn jlo_insertions(sys: &GradedSystem, args: &[CMat]) -> Vec<CMat> {
    let mut mats = vec![args[0].clone()];
    for (k, a) in args.iter().enumerate().skip(1) {
        let ak = if k % 2 == 1 { sys.grade(a) } else { a.clone() };
        mats.push(sys.delta(&ak));
    }
    mats
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JloValue {
    pub value: Complex64,
    pub error: f64,
    pub converged: bool,
}

/// `τ_n(a_0, …, a_n) = ∫_{0≤t_1≤…≤t_n≤1} φ(a_0 α_{it_1}(δa_1^γ) ⋯ α_{it_n}(δa_n^{γ^n})) dt`
/// for the functional at `β = 1`; the functional's `Q` is used as given.
pub fn jlo_eval(phi: &SuperKms, args: &[CMat], method: JloMethod) -> Result<JloValue> {
    let n = args.len().checked_sub(1).ok_or_else(|| Error::Domain("JLO needs at least one argument".into()))?;
    if n > 4 || n % 2 == 1 {
        return domain("JLO is evaluated for even n ≤ 4");
    }
    let dim = phi.sys.dim();
    if args.iter().any(|a| a.shape() != (dim, dim)) {
        return domain("arguments must match the system dimension");
    }
    let mats = jlo_insertions(&phi.sys, args);
    match method {
        JloMethod::Exact => Ok(JloValue { value: jlo_exact(phi, &mats), error: 0.0, converged: true }),
        JloMethod::Quadrature => {
            let eig = graded_eigen(&phi.sys);
            let ut = eig.u.adjoint();
            let rot: Vec<CMat> = mats.iter().map(|m| &ut * m * &eig.u).collect();
            let dens = &ut * &phi.density * &eig.u;
            let e = &eig.energies;
            let heat_inv = e.iter().map(|&x| (phi.beta * x).exp()).collect::<Vec<_>>();
            // density already carries e^{−βH}; undo it so that the
            // integrand is Tr(D e^{βH} e^{−s_0H} a_0 e^{−s_1H} x_1 ⋯)
            let base = CMat::from_fn(dim, dim, |i, j| dens[(i, j)] * heat_inv[j]);
            let q = integrate_simplex(n, 1e-9, if n <= 2 { 128 } else { 32 }, |s| {
                let mut m = CMat::from_fn(dim, dim, |i, j| base[(i, j)] * (-s[0] * e[j]).exp());
                for (k, x) in rot.iter().enumerate() {
                    m = &m * x;
                    if k + 1 <= n {
                        let sk = s[k + 1];
                        for j in 0..dim {
                            let f = (-sk * e[j]).exp();
                            for i in 0..dim {
                                m[(i, j)] *= f;
                            }
                        }
                    }
                }
                linalg::trace(&m) / phi.norm
            })?;
            Ok(JloValue { value: q.value, error: q.error, converged: q.converged })
        }
    }
}

fn jlo_exact(phi: &SuperKms, mats: &[CMat]) -> Complex64 {
    let eig = graded_eigen(&phi.sys);
    let dim = phi.sys.dim();
    let ut = eig.u.adjoint();
    let rot: Vec<CMat> = mats.iter().map(|m| &ut * m * &eig.u).collect();
    // the density in the graded eigenbasis; for a genuine super-KMS
    // functional it is diagonal with entries ±e^{−βE}
    let dens = &ut * &phi.density * &eig.u;
    let heat_inv: Vec<f64> = eig.energies.iter().map(|&x| (phi.beta * x).exp()).collect();
    let mut total = ZERO;
    let m = rot.len();
    let mut idx = vec![0usize; m];
    let mut lams = vec![0.0; m];
    // Tr(D e^{βH} e^{−s_0H} a_0 e^{−s_1H} x_1 ⋯ e^{−s_nH} x_n), indices i_0 … i_n
    fn rec(
        k: usize,
        acc: Complex64,
        idx: &mut Vec<usize>,
        lams: &mut Vec<f64>,
        rot: &[CMat],
        e: &[f64],
        total: &mut Complex64,
        close: &dyn Fn(usize, usize) -> Complex64,
    ) {
        let m = rot.len();
        let dim = e.len();
        if k == m - 1 {
            for j in 0..dim {
                let last = rot[m - 1][(idx[m - 1], j)];
                if last == ZERO {
                    continue;
                }
                let w = close(j, idx[0]);
                if w == ZERO {
                    continue;
                }
                *total += acc * last * w * linalg::simplex_exp_integral(lams);
            }
            return;
        }
        for j in 0..dim {
            let x = rot[k][(idx[k], j)];
            if x == ZERO {
                continue;
            }
            idx[k + 1] = j;
            lams[k + 1] = e[j];
            rec(k + 1, acc * x, idx, lams, rot, e, total, close);
        }
    }
    let e = eig.energies.clone();
    // (D e^{βH})_{j i_0} closes the trace
    let close = |j: usize, i0: usize| dens[(j, i0)] * heat_inv[i0];
    for i0 in 0..dim {
        idx[0] = i0;
        lams[0] = e[i0];
        if m == 1 {
            total += rot[0][(i0, i0)] * close(i0, i0) * linalg::simplex_exp_integral(&lams);
            continue;
        }
        rec(0, ONE, &mut idx, &mut lams, &rot, &e, &mut total, &close);
    }
    let _ = dim;
    total / phi.norm
}

/// `Σ_{k ≤ kmax} (−1)^k (2k)!/k! τ_{2k}(1, …, 1)`.
pub fn jlo_index_series(phi: &SuperKms, kmax: usize) -> Result<Complex64> {
    let n = phi.sys.dim();
    let mut total = ZERO;
    let mut fact_ratio = 1.0;
    for k in 0..=kmax.min(2) {
        if k > 0 {
            // (2k)!/k! from (2k−2)!/(k−1)!
            fact_ratio *= (2 * k) as f64 * (2 * k - 1) as f64 / k as f64;
        }
        let args = vec![linalg::eye(n); 2 * k + 1];
        let t = jlo_eval(phi, &args, JloMethod::Exact)?.value;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        total += t * sign * fact_ratio;
    }
    Ok(total)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JloChargedReport {
    /// `τ^ρ_n` from the simplex formula with the cocycle inserted.
    pub value: Complex64,
    /// `d_φ(u_ρ) τ_n(ρ^{-1}(·))`.
    pub factorized: Complex64,
    /// `φ(u(i))/φ(1)`.
    pub dimension: Complex64,
    pub residual: f64,
    pub quadrature_error: f64,
    pub converged: bool,
}

/// Charged JLO form for an even abelian charge `Ad(v)` with phase `c`.
pub fn jlo_charged(phi: &SuperKms, rho: &CovariantCharge, args: &[CMat]) -> Result<JloChargedReport> {
    let sys = &phi.sys;
    let n = args.len().checked_sub(1).ok_or_else(|| Error::Domain("JLO needs at least one argument".into()))?;
    if n > 4 || n % 2 == 1 {
        return domain("JLO is evaluated for even n ≤ 4");
    }
    let v = match rho.charge.kind() {
        ChargeKind::Abelian { v } => v.matrix().clone(),
        ChargeKind::Multiplicity { .. } => return Err(Error::Unsupported("charged JLO needs an abelian charge".into())),
    };
    if v.shape() != (sys.dim(), sys.dim()) {
        return domain("charge acts on another algebra");
    }
    if linalg::max_abs(&sys.odd_part(&v)) > 1e-10 {
        return domain("charge unitary must be even");
    }
    if (phi.beta - 1.0).abs() > 1e-12 {
        return domain("charged JLO runs at β = 1; rescale Q by √β");
    }
    let dy = phi.dynamics()?;
    let u = covariance_cocycle(&rho.charge, &dy, rho.c)?;
    let rho_inv = |a: &CMat| v.adjoint() * a * &v;
    let rho_fwd = |a: &CMat| &v * a * v.adjoint();
    let delta_rho = |a: &CMat| rho_fwd(&sys.delta(&rho_inv(a)));
    let ys: Vec<CMat> = args
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, a)| delta_rho(&if k % 2 == 1 { sys.grade(a) } else { a.clone() }))
        .collect();
    let eig = Spectral::new(&sys.h());
    let alpha_i = |x: &CMat, tau: f64| eig.exp_scaled(c(-tau, 0.0)) * x * eig.exp_scaled(c(tau, 0.0));
    let ui = |s: f64| u.eval(c(0.0, s)).matrix().clone();
    let integrand = |s: &[f64]| -> Complex64 {
        // a_0 u(is_1) α_{is_1}(y_1 u(is_2)) α_{i(s_1+s_2)}(y_2 u(is_3)) ⋯
        let mut m = &args[0] * ui(s[0]);
        let mut acc = 0.0;
        for (k, y) in ys.iter().enumerate() {
            acc += s[k];
            m = m * alpha_i(&(y * ui(s[k + 1])), acc);
        }
        phi.eval(&m)
    };
    let q = integrate_simplex(n, 1e-9, if n <= 2 { 64 } else { 16 }, integrand)?;
    let phi1 = phi.eval(&linalg::eye(sys.dim()));
    if phi1.norm() < 1e-12 {
        return domain("φ(1) vanishes; the dimension is undefined");
    }
    let dimension = phi.eval(u.eval(c(0.0, 1.0)).matrix()) / phi1;
    let pulled: Vec<CMat> = args.iter().map(rho_inv).collect();
    let base = jlo_eval(phi, &pulled, JloMethod::Exact)?.value;
    let factorized = dimension * base;
    Ok(JloChargedReport {
        value: q.value,
        factorized,
        dimension,
        residual: (q.value - factorized).norm(),
        quadrature_error: q.error,
        converged: q.converged,
    })
}

// ---------------------------------------------------------------------------
// Cochains and the coboundary

pub type Multilinear = Arc<dyn Fn(&[CMat]) -> Complex64 + Send + Sync>;

/// Cochain components `f_n` up to degree `cap`, on a graded matrix algebra
/// with grading `a ↦ ΓaΓ`.
#[derive(Clone)]
pub struct EntireCochain {
    pub gamma: Vec<i8>,
    pub cap: usize,
    pub components: BTreeMap<usize, Multilinear>,
}

impl std::fmt::Debug for EntireCochain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EntireCochain").field("cap", &self.cap).field("degrees", &self.components.keys().collect::<Vec<_>>()).finish()
    }
}

impl EntireCochain {
    pub fn dim(&self) -> usize {
        self.gamma.len()
    }

    fn grade(&self, a: &CMat) -> CMat {
        CMat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * (self.gamma[i] * self.gamma[j]) as f64)
    }

    pub fn eval(&self, n: usize, args: &[CMat]) -> Result<Complex64> {
        if args.len() != n + 1 {
            return domain(format!("degree {n} takes {} arguments", n + 1));
        }
        if n > self.cap {
            return domain(format!("degree {n} exceeds the cap {}", self.cap));
        }
        Ok(self.components.get(&n).map(|f| f(args)).unwrap_or(ZERO))
    }

    /// Sampled lower estimate of `|||f_n|||` over arguments of unit norm.
    pub fn norm_estimate(&self, n: usize, samples: usize, seed: u64) -> f64 {
        let Some(f) = self.components.get(&n) else { return 0.0 };
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        let d = self.dim();
        (0..samples)
            .map(|_| {
                let args: Vec<CMat> = (0..=n)
                    .map(|_| {
                        let a = linalg::random_complex(&mut rng, d, d);
                        let s = linalg::op_norm(&a);
                        a / c(s, 0.0)
                    })
                    .collect();
                f(&args).norm()
            })
            .fold(0.0, f64::max)
    }

    /// `Σ_n √(n!) |||f_n|||` at `z = 1` with sampled norms.
    pub fn growth_estimate(&self, samples: usize, seed: u64) -> f64 {
        let mut fact = 1.0;
        let mut total = 0.0;
        for n in 0..=self.cap {
            if n > 0 {
                fact *= n as f64;
            }
            total += fact.sqrt() * self.norm_estimate(n, samples, seed.wrapping_add(n as u64));
        }
        total
    }
}

/// The JLO cocycle of `φ` as an even cochain up to `cap`.
pub fn jlo_cochain(phi: &SuperKms, cap: usize) -> EntireCochain {
    let phi = Arc::new(phi.clone());
    let mut components: BTreeMap<usize, Multilinear> = BTreeMap::new();
    for n in (0..=cap.min(4)).step_by(2) {
        let p = phi.clone();
        components.insert(n, Arc::new(move |args: &[CMat]| jlo_eval(&p, args, JloMethod::Exact).map(|v| v.value).unwrap_or(ZERO)));
    }
    EntireCochain { gamma: phi.sys.grading().to_vec(), cap, components }
}

/// `(bf)_{n+1}(a_0,…,a_{n+1}) = Σ_j (−1)^j f_n(…, a_j a_{j+1}, …) + (−1)^{n+1} f_n(a_{n+1}^γ a_0, a_1, …, a_n)`.
pub fn hochschild_b(f: &EntireCochain, n: usize, args: &[CMat]) -> Result<Complex64> {
    if args.len() != n + 2 {
        return domain(format!("(bf)_{} takes {} arguments", n + 1, n + 2));
    }
    let mut total = ZERO;
    for j in 0..=n {
        let mut a: Vec<CMat> = Vec::with_capacity(n + 1);
        a.extend_from_slice(&args[..j]);
        a.push(&args[j] * &args[j + 1]);
        a.extend_from_slice(&args[j + 2..]);
        let s = if j % 2 == 0 { 1.0 } else { -1.0 };
        total += f.eval(n, &a)? * s;
    }
    let mut a = vec![f.grade(&args[n + 1]) * &args[0]];
    a.extend_from_slice(&args[1..=n]);
    let s = if (n + 1) % 2 == 0 { 1.0 } else { -1.0 };
    total += f.eval(n, &a)? * s;
    Ok(total)
}

/// `(Bf)_{n−1}(a_0,…,a_{n−1}) = Σ_j (−1)^{(n−1)j} [f_n(1, r_j) + (−1)^{n−1} f_n(r_j, 1)]`
/// with `r_j = (a_{n−j}^γ, …, a_{n−1}^γ, a_0, …, a_{n−j−1})`.
pub fn connes_b(f: &EntireCochain, n: usize, args: &[CMat]) -> Result<Complex64> {
    if n == 0 || args.len() != n {
        return domain(format!("(Bf)_{} takes {} arguments", n.saturating_sub(1), n));
    }
    let one = linalg::eye(f.dim());
    let mut total = ZERO;
    for j in 0..n {
        let mut rot: Vec<CMat> = args[n - j..].iter().map(|a| f.grade(a)).collect();
        rot.extend_from_slice(&args[..n - j]);
        let mut front = vec![one.clone()];
        front.extend(rot.iter().cloned());
        let mut back = rot;
        back.push(one.clone());
        let s = if ((n - 1) * j) % 2 == 0 { 1.0 } else { -1.0 };
        let s2 = if (n - 1) % 2 == 0 { 1.0 } else { -1.0 };
        total += (f.eval(n, &front)? + f.eval(n, &back)? * s2) * s;
    }
    Ok(total)
}

/// `(∂f)_n = (bf)_n + (Bf)_n`; needs `n + 1 ≤ cap`.
pub fn coboundary(f: &EntireCochain, n: usize, args: &[CMat]) -> Result<Complex64> {
    if n + 1 > f.cap {
        return domain(format!("(∂f)_{n} needs degree {} but the cap is {}", n + 1, f.cap));
    }
    if args.len() != n + 1 {
        return domain(format!("(∂f)_{n} takes {} arguments", n + 1));
    }
    let b = if n >= 1 { hochschild_b(f, n - 1, args)? } else { ZERO };
    Ok(b + connes_b(f, n + 1, args)?)
}

/// `∂f` as a cochain of cap `f.cap − 1`.
pub fn coboundary_cochain(f: &EntireCochain) -> Result<EntireCochain> {
    if f.cap == 0 {
        return domain("cap too small for a coboundary");
    }
    let cap = f.cap - 1;
    let base = Arc::new(f.clone());
    let mut components: BTreeMap<usize, Multilinear> = BTreeMap::new();
    for n in 0..=cap {
        let g = base.clone();
        components.insert(n, Arc::new(move |args: &[CMat]| coboundary(&g, n, args).unwrap_or(c(f64::NAN, f64::NAN))));
    }
    Ok(EntireCochain { gamma: f.gamma.clone(), cap, components })
}

/// Random multilinear cochain `f_n(a) = Σ T[…] Π (a_k)_{i_k j_k}` for the
/// listed degrees; `invariant` averages over the grading so that
/// `f(a^γ) = f(a)`.
pub fn random_cochain(gamma: &[i8], degrees: &[usize], cap: usize, invariant: bool, seed: u64) -> EntireCochain {
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let d = gamma.len();
    let g = gamma.to_vec();
    let mut components: BTreeMap<usize, Multilinear> = BTreeMap::new();
    for &n in degrees {
        let size = (d * d).pow((n + 1) as u32);
        let coeffs: Vec<Complex64> = (0..size).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let coeffs = Arc::new(coeffs);
        let gg = g.clone();
        let f = move |args: &[CMat]| -> Complex64 {
            let eval = |graded: bool| -> Complex64 {
                let mut total = ZERO;
                for (flat, &t) in coeffs.iter().enumerate() {
                    let mut rest = flat;
                    let mut prod = t;
                    for a in args.iter().rev() {
                        let e = rest % (d * d);
                        rest /= d * d;
                        let (i, j) = (e / d, e % d);
                        let mut x = a[(i, j)];
                        if graded {
                            x *= (gg[i] * gg[j]) as f64;
                        }
                        prod *= x;
                        if prod == ZERO {
                            break;
                        }
                    }
                    total += prod;
                }
                total
            };
            if invariant {
                (eval(false) + eval(true)) * 0.5
            } else {
                eval(false)
            }
        };
        components.insert(n, Arc::new(f));
    }
    EntireCochain { gamma: g, cap, components }
}

// ---------------------------------------------------------------------------
// Sector and tensor supercharges

#[derive(Clone, Debug)]
pub struct SectorReport {
    pub system: GradedSystem,
    pub base_index: i64,
    pub sector_index: i64,
    /// `‖Q_ρ² − H ⊗ 1_d‖`.
    pub square_residual: f64,
}

/// `Q_ρ = Q ⊗ 1_d`, `Γ_ρ = Γ ⊗ 1_d` for a Bose sector of multiplicity `d`.
pub fn sector_supercharge(sys: &GradedSystem, d: usize) -> Result<SectorReport> {
    if d == 0 {
        return domain("multiplicity must be at least one");
    }
    let q = linalg::kron(sys.q(), &linalg::eye(d));
    let gamma: Vec<i8> = sys.grading().iter().flat_map(|&g| std::iter::repeat_n(g, d)).collect();
    let system = GradedSystem::new(gamma, q)?;
    let base_index = witten_index(sys, 1.0)?.rank_index;
    let sector_index = witten_index(&system, 1.0)?.rank_index;
    if sector_index != d as i64 * base_index {
        return Err(Error::Numerical(format!("sector index {sector_index} is not {d}·{base_index}")));
    }
    let square_residual = linalg::op_norm(&(system.h() - linalg::kron(&sys.h(), &linalg::eye(d))));
    Ok(SectorReport { system, base_index, sector_index, square_residual })
}

#[derive(Clone, Debug)]
pub struct TensorReport {
    pub system: GradedSystem,
    /// `‖Γ̃Q̃ + Q̃Γ̃‖`.
    pub odd_residual: f64,
    /// `‖Q̃² − (H_A ⊗ 1 + 1 ⊗ H_B)‖`.
    pub square_residual: f64,
    /// `|Tr_s e^{−βH̃} − Tr_s e^{−βH_A} · Tr_s e^{−βH_B}|`.
    pub index_product_residual: f64,
}

/// `Q̃ = Q_A ⊗ 1 + Γ_A ⊗ Q_B` on `H_A ⊗ H_B` with `Γ̃ = Γ_A ⊗ Γ_B`.
/// Restricted to `H̃_+ = H_+⊗H_+ ⊕ H_−⊗H_−` this is
/// `(Q_+⊗1 + 1⊗Q_+) ⊕ (Q_−⊗1 − 1⊗Q_−)`.
pub fn tensor_supercharge(a: &GradedSystem, b: &GradedSystem) -> Result<TensorReport> {
    let q = linalg::kron(a.q(), &linalg::eye(b.dim())) + linalg::kron(&a.gamma(), b.q());
    tensor_report(a, b, q)
}

/// The other ordering, `Q̃' = 1 ⊗ Q_B + Q_A ⊗ Γ_B`.
pub fn tensor_supercharge_permuted(a: &GradedSystem, b: &GradedSystem) -> Result<TensorReport> {
    let q = linalg::kron(&linalg::eye(a.dim()), b.q()) + linalg::kron(a.q(), &b.gamma());
    tensor_report(a, b, q)
}

fn tensor_report(a: &GradedSystem, b: &GradedSystem, q: CMat) -> Result<TensorReport> {
    let gamma: Vec<i8> = a.grading().iter().flat_map(|&ga| b.grading().iter().map(move |&gb| ga * gb)).collect();
    let g = gamma_matrix(&gamma);
    let odd_residual = linalg::op_norm(&linalg::anticommutator(&g, &q));
    let system = GradedSystem::new(gamma, q)?;
    let want = linalg::kron(&a.h(), &linalg::eye(b.dim())) + linalg::kron(&linalg::eye(a.dim()), &b.h());
    let square_residual = linalg::op_norm(&(system.h() - want));
    let index_product_residual = [0.5, 1.0, 2.0]
        .iter()
        .map(|&beta| (system.supertrace_heat(beta) - a.supertrace_heat(beta) * b.supertrace_heat(beta)).abs())
        .fold(0.0, f64::max);
    Ok(TensorReport { system, odd_residual, square_residual, index_product_residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toy_index_is_one() {
        let sys = GradedSystem::from_block(&linalg::from_real_rows(&[&[1.0, 0.0]]));
        for beta in [0.1, 1.0, 10.0] {
            let w = witten_index(&sys, beta).unwrap();
            assert_eq!(w.rank_index, 1);
            assert!(w.residual() < 1e-12);
        }
    }

    #[test]
    fn simplex_rule_volume() {
        for n in 1..=4 {
            let r = integrate_simplex(n, 1e-12, 32, |_| ONE).unwrap();
            let fact: f64 = (1..=n).map(|k| k as f64).product();
            assert!((r.value.re - 1.0 / fact).abs() < 1e-13);
        }
    }

    #[test]
    fn jlo_degree_zero_is_functional() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(4);
        let sys = GradedSystem::random(&mut rng, 2, 2);
        let phi = SuperKms::new(&sys, 1.0).unwrap();
        let a = linalg::random_complex(&mut rng, 4, 4);
        let t = jlo_eval(&phi, &[a.clone()], JloMethod::Exact).unwrap().value;
        assert!((t - phi.eval(&a)).norm() < 1e-12);
    }
}
