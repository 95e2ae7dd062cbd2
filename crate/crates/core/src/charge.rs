//! Implemented charges on finite systems: covariance cocycles, Frobenius
//! duals, geometric dimension, chemical potential, free energy and the
//! horizon index identity.
//!
//! Two kinds of charge are available. An abelian charge is `Ad(v)` on the
//! algebra itself. A multiplicity charge of dimension `d` is the amplification
//! `x ↦ x ⊗ 1_d` into `𝔄 ⊗ M_d` with left inverse `id ⊗ tr`. Finite factors
//! have no inner endomorphisms of non-trivial index, so the amplification is a
//! model: its covariance cocycle is `e^{ict} (Dφ_ρ : Dφ̃)_t` for a user supplied
//! surrogate `φ_ρ` on `𝔄 ⊗ M_d` whose weight carries the dimension.

use num_complex::Complex64;

use crate::cocycle::{holomorphic_dimension, CocycleKind, TimeParam, UnitaryCocycle};
use crate::error::{domain, Error, Result};
use crate::linalg::{self, c, CMat, Spectral};
use crate::qsys::{gns, relative_entropy, Dynamics, Element, MatrixAlgebra, State};

#[derive(Clone, Debug)]
pub enum ChargeKind {
    Abelian { v: Element },
    Multiplicity { d: usize },
}

#[derive(Clone, Debug)]
pub struct Charge {
    algebra: MatrixAlgebra,
    kind: ChargeKind,
}

impl Charge {
    pub fn abelian(v: &Element) -> Result<Charge> {
        if v.unitarity_defect() > 1e-9 {
            return domain("abelian charge needs a unitary");
        }
        Ok(Charge { algebra: v.algebra().clone(), kind: ChargeKind::Abelian { v: v.clone() } })
    }

    pub fn identity(algebra: &MatrixAlgebra) -> Charge {
        Charge { algebra: algebra.clone(), kind: ChargeKind::Abelian { v: Element::identity(algebra) } }
    }

    pub fn multiplicity(algebra: &MatrixAlgebra, d: usize) -> Result<Charge> {
        if d == 0 {
            return domain("multiplicity must be at least 1");
        }
        Ok(Charge { algebra: algebra.clone(), kind: ChargeKind::Multiplicity { d } })
    }

    pub fn kind(&self) -> &ChargeKind {
        &self.kind
    }

    pub fn algebra(&self) -> &MatrixAlgebra {
        &self.algebra
    }

    pub fn is_abelian(&self) -> bool {
        matches!(self.kind, ChargeKind::Abelian { .. })
    }

    /// Abelian charge whose unitary is a scalar: it acts trivially.
    pub fn is_trivial(&self) -> bool {
        match &self.kind {
            ChargeKind::Abelian { v } => v.as_scalar(1e-12).is_some(),
            ChargeKind::Multiplicity { d } => *d == 1,
        }
    }

    pub fn target_algebra(&self) -> MatrixAlgebra {
        match &self.kind {
            ChargeKind::Abelian { .. } => self.algebra.clone(),
            ChargeKind::Multiplicity { d } => self.algebra.amplify(*d),
        }
    }

    /// `d(ρ)`.
    pub fn dimension(&self) -> f64 {
        match &self.kind {
            ChargeKind::Abelian { .. } => 1.0,
            ChargeKind::Multiplicity { d } => *d as f64,
        }
    }

    /// `ρ(x)`.
    pub fn apply(&self, x: &Element) -> Element {
        match &self.kind {
            ChargeKind::Abelian { v } => &(v * x) * &v.adjoint(),
            ChargeKind::Multiplicity { d } => x.amplify(*d),
        }
    }

    /// Left inverse `Φ_ρ`.
    pub fn left_inverse(&self, y: &Element) -> Element {
        match &self.kind {
            ChargeKind::Abelian { v } => &(&v.adjoint() * y) * v,
            ChargeKind::Multiplicity { d } => {
                let d = *d;
                let blocks = y
                    .blocks()
                    .iter()
                    .zip(self.algebra.blocks())
                    .map(|(b, &n)| {
                        CMat::from_fn(n, n, |i, j| {
                            (0..d).map(|k| b[(i * d + k, j * d + k)]).sum::<Complex64>() / c(d as f64, 0.0)
                        })
                    })
                    .collect();
                Element::new(&self.algebra, blocks).expect("block shapes")
            }
        }
    }

    /// `ρ̄`: `Ad(v*)`, and the amplification is self-conjugate.
    pub fn conjugate(&self) -> Charge {
        match &self.kind {
            ChargeKind::Abelian { v } => Charge { algebra: self.algebra.clone(), kind: ChargeKind::Abelian { v: v.adjoint() } },
            ChargeKind::Multiplicity { .. } => self.clone(),
        }
    }

    /// `ρσ` for abelian charges.
    pub fn compose(&self, sigma: &Charge) -> Result<Charge> {
        match (&self.kind, &sigma.kind) {
            (ChargeKind::Abelian { v }, ChargeKind::Abelian { v: w }) => Charge::abelian(&(v * w)),
            _ => Err(Error::Unsupported("composition is implemented for abelian charges".into())),
        }
    }

    /// `max ‖Φ_ρ(ρ(x)) − x‖` over the samples.
    pub fn left_inverse_residual(&self, samples: &[Element]) -> f64 {
        samples.iter().map(|x| self.left_inverse(&self.apply(x)).dist(x)).fold(0.0, f64::max)
    }

    /// `φ ∘ Φ_ρ` on the target algebra.
    pub fn target_state(&self, phi: &State) -> State {
        match &self.kind {
            ChargeKind::Abelian { .. } => phi.clone(),
            ChargeKind::Multiplicity { d } => phi.amplify(*d),
        }
    }

    pub fn target_dynamics(&self, dynamics: &Dynamics) -> Dynamics {
        match &self.kind {
            ChargeKind::Abelian { .. } => dynamics.clone(),
            ChargeKind::Multiplicity { d } => dynamics.amplify(*d),
        }
    }
}

/// Scalar solution `(R, R̄)` of the conjugate equations of an abelian charge.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConjugateData {
    pub r: Complex64,
    pub rbar: Complex64,
}

impl Default for ConjugateData {
    fn default() -> Self {
        ConjugateData { r: c(1.0, 0.0), rbar: c(1.0, 0.0) }
    }
}

impl ConjugateData {
    /// `R → λR`, `R̄ → λ̄^{-1} R̄`.
    pub fn rescaled(&self, lambda: Complex64) -> ConjugateData {
        ConjugateData { r: self.r * lambda, rbar: self.rbar / lambda.conj() }
    }

    /// `|R* ρ̄(R̄) − 1|`.
    pub fn residual(&self) -> f64 {
        (self.r.conj() * self.rbar - c(1.0, 0.0)).norm()
    }
}

/// A charge together with its phase gauge, conjugate data and (for the
/// multiplicity model) the surrogate charged state.
#[derive(Clone, Debug)]
pub struct CovariantCharge {
    pub charge: Charge,
    pub c: f64,
    pub conj: ConjugateData,
    pub surrogate: Option<State>,
}

impl CovariantCharge {
    pub fn new(charge: Charge, c: f64) -> Self {
        CovariantCharge { charge, c, conj: ConjugateData::default(), surrogate: None }
    }

    pub fn with_surrogate(mut self, s: State) -> Self {
        self.surrogate = Some(s);
        self
    }

    /// Surrogate `d · φ ∘ Φ_ρ`, which makes the multiplicity model exact.
    pub fn exact_multiplicity(algebra: &MatrixAlgebra, d: usize, phi: &State, c: f64) -> Result<Self> {
        let charge = Charge::multiplicity(algebra, d)?;
        let s = charge.target_state(phi).scaled(d as f64);
        Ok(CovariantCharge::new(charge, c).with_surrogate(s))
    }

    pub fn cocycle(&self, phi: &State, dynamics: &Dynamics) -> Result<UnitaryCocycle> {
        match &self.charge.kind {
            ChargeKind::Abelian { .. } => covariance_cocycle(&self.charge, dynamics, self.c),
            ChargeKind::Multiplicity { .. } => {
                let Some(s) = &self.surrogate else {
                    return domain("multiplicity charge needs a surrogate charged state");
                };
                covariance_cocycle_with_surrogate(&self.charge, phi, dynamics, self.c, s)
            }
        }
    }

    pub fn dual_cocycle(&self, phi: &State, dynamics: &Dynamics) -> Result<UnitaryCocycle> {
        let u = self.cocycle(phi, dynamics)?;
        frobenius_dual_cocycle(&self.charge, &u, &self.conj)
    }

    /// The conjugate charge with the dual gauge.
    pub fn conjugate(&self) -> CovariantCharge {
        CovariantCharge {
            charge: self.charge.conjugate(),
            c: -self.c,
            conj: ConjugateData { r: self.conj.rbar, rbar: self.conj.r },
            surrogate: self.surrogate.clone(),
        }
    }
}

/// `u(t) = e^{ict} v α_t(v*)` for an abelian charge `Ad(v)`.
pub fn covariance_cocycle(rho: &Charge, dynamics: &Dynamics, c: f64) -> Result<UnitaryCocycle> {
    match &rho.kind {
        ChargeKind::Abelian { v } => {
            if dynamics.algebra() != rho.algebra() {
                return domain("dynamics on another algebra");
            }
            UnitaryCocycle::composite(vec![UnitaryCocycle::phase(dynamics, c), UnitaryCocycle::conjugation(dynamics, v)?])
        }
        ChargeKind::Multiplicity { .. } => domain("multiplicity charges need a surrogate state"),
    }
}

/// `u(t) = e^{ict} (Dφ_ρ : D(φ∘Φ_ρ))_t` in physical time on `𝔄 ⊗ M_d`.
pub fn covariance_cocycle_with_surrogate(
    rho: &Charge,
    phi: &State,
    dynamics: &Dynamics,
    c: f64,
    surrogate: &State,
) -> Result<UnitaryCocycle> {
    let target = rho.target_algebra();
    if surrogate.algebra() != &target {
        return domain("surrogate state must live on the target algebra");
    }
    surrogate.require_faithful("surrogate charged state")?;
    let tdyn = rho.target_dynamics(dynamics);
    let base = rho.target_state(phi);
    let core = crate::cocycle::connes_cocycle_physical(surrogate, &base, &tdyn)?;
    UnitaryCocycle::composite(vec![UnitaryCocycle::phase(&tdyn, c), core])
}

/// `max ‖Ad u(t) ∘ α_t ∘ ρ ∘ α_{-t}(x) − ρ(x)‖` over samples and a few times.
pub fn covariance_residual(rho: &Charge, dynamics: &Dynamics, u: &UnitaryCocycle, samples: &[Element]) -> f64 {
    let mut worst: f64 = 0.0;
    for &t in &[0.0, 0.31, -0.77, 1.9] {
        let ut = u.eval(c(t, 0.0));
        for x in samples {
            let y = dynamics.evolve(x, c(-t, 0.0));
            let y = u.alpha(&rho.apply(&y), t);
            let y = &(&ut * &y) * &ut.adjoint();
            worst = worst.max(y.dist(&rho.apply(x)));
        }
    }
    worst
}

/// `u•(t) = ρ̄(α_t(R̄*) u(t)*) R`.
///
/// Abelian: with scalar `R, R̄` this is `conj(r̄) r · v* u(t̄)* v`. The
/// amplification is self-conjugate with standard solution, and its dual is the
/// same Connes factor with the opposite phase.
pub fn frobenius_dual_cocycle(rho: &Charge, u: &UnitaryCocycle, conj: &ConjugateData) -> Result<UnitaryCocycle> {
    if conj.residual() > 1e-10 {
        return domain("conjugate data does not solve the conjugate equations");
    }
    match &rho.kind {
        ChargeKind::Abelian { v } => {
            let scalar = conj.rbar.conj() * conj.r;
            UnitaryCocycle::transform(u, &v.adjoint(), v, scalar, true)
        }
        ChargeKind::Multiplicity { .. } => {
            let (phase, rest) = split_phase(u);
            let mut parts = vec![UnitaryCocycle::phase(u.dynamics(), -phase)];
            parts.extend(rest);
            UnitaryCocycle::composite(parts)
        }
    }
}

fn split_phase(u: &UnitaryCocycle) -> (f64, Vec<UnitaryCocycle>) {
    match u.kind() {
        CocycleKind::Phase { c } => (*c, vec![]),
        CocycleKind::Composite(parts) => {
            let mut total = 0.0;
            let mut rest = Vec::new();
            for p in parts {
                let (ph, r) = split_phase(p);
                total += ph;
                rest.extend(r);
            }
            (total, rest)
        }
        _ => (0.0, vec![u.clone()]),
    }
}

fn real_log_dimension(u: &UnitaryCocycle, phi: &State, beta: f64) -> Result<(f64, bool)> {
    let d = holomorphic_dimension(u, phi, beta)?;
    if d.value.re <= 0.0 {
        return Err(Error::Numerical(format!("holomorphic dimension {} is not positive", d.value)));
    }
    let flagged = d.value.im.abs() > 1e-9 * d.value.re.max(1.0) || d.kms_flagged();
    Ok((d.value.re.ln(), flagged))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeometricDimension {
    pub d_u: f64,
    pub d_dual: f64,
    /// `√(d_φ(u) d_φ(u•))`.
    pub value: f64,
    /// Continuation of `φ(u(t)) φ(u•(t))` at the same point.
    pub product_form: Complex64,
}

pub fn geometric_dimension(rho: &CovariantCharge, phi: &State, dynamics: &Dynamics) -> Result<GeometricDimension> {
    let u = rho.cocycle(phi, dynamics)?;
    let ud = frobenius_dual_cocycle(&rho.charge, &u, &rho.conj)?;
    let state = rho.charge.target_state(phi);
    let beta = dynamics.beta();
    let a = holomorphic_dimension(&u, &state, beta)?;
    let b = holomorphic_dimension(&ud, &state, beta)?;
    if a.value.re <= 0.0 || b.value.re <= 0.0 {
        return Err(Error::Numerical("non-positive holomorphic dimension".into()));
    }
    Ok(GeometricDimension {
        d_u: a.value.re,
        d_dual: b.value.re,
        value: (a.value.re * b.value.re).sqrt(),
        product_form: a.value * b.value,
    })
}

/// `log d_φ(u) = log d(ρ) + β μ_ρ(φ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChemicalPotentialSplit {
    pub log_d_phi: f64,
    pub log_d: f64,
    pub mu: f64,
    pub beta: f64,
    /// Set when `d_φ(u)` had an imaginary part or φ failed the KMS sample.
    pub flagged: bool,
}

pub fn chemical_potential(rho: &Charge, phi: &State, dynamics: &Dynamics, u: &UnitaryCocycle) -> Result<ChemicalPotentialSplit> {
    let beta = dynamics.beta();
    let state = rho.target_state(phi);
    let (log_d_phi, flagged) = real_log_dimension(u, &state, beta)?;
    let log_d = rho.dimension().ln();
    Ok(ChemicalPotentialSplit { log_d_phi, log_d, mu: (log_d_phi - log_d) / beta, beta, flagged })
}

/// The three evaluations of `F(φ|φ_ρ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FreeEnergy {
    /// `-β^{-1} log ⟨e^{-βH_ρ} ξ, ξ⟩` on the GNS space.
    pub gns: f64,
    /// `-β^{-1} log d_φ(u)`.
    pub cocycle: f64,
    /// `ω_ρ(H_ρ) + β^{-1} S(ω_ρ‖φ)` with `ω_ρ` the normalized charged state.
    pub entropy: f64,
}

impl FreeEnergy {
    pub fn spread(&self) -> f64 {
        let v = [self.gns, self.cocycle, self.entropy];
        let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        hi - lo
    }
}

/// Density of the charged functional `φ_u(x) = anal.cont. φ(x u(t))` at `iβ`,
/// namely `u(iβ) D_φ`.
pub fn charged_state(u: &UnitaryCocycle, phi: &State, beta: f64) -> Result<State> {
    if u.param() != TimeParam::Physical {
        return domain("charged state needs a physical-time cocycle");
    }
    let w = u.eval(c(0.0, beta));
    let d = &w * &phi.density_element();
    let scale = 1.0 + d.norm();
    if d.blocks().iter().any(|b| linalg::hermiticity_defect(b) > 1e-8 * scale) {
        return Err(Error::Numerical("charged functional is not positive".into()));
    }
    State::new(phi.algebra(), d.blocks().iter().map(linalg::hermitian_part).collect())
}

pub fn free_energy(rho: &Charge, phi: &State, dynamics: &Dynamics, u: &UnitaryCocycle) -> Result<FreeEnergy> {
    if u.param() != TimeParam::Physical {
        return domain("free energy needs a physical-time cocycle");
    }
    let beta = dynamics.beta();
    let state = rho.target_state(phi);
    let k = u.physical_generator();
    if !k.is_hermitian(1e-8) {
        return Err(Error::Numerical("cocycle generator is not Hermitian".into()));
    }

    let g = gns(&state)?;
    let kk = g.hamiltonian(beta) + g.pi(&k);
    let kk = linalg::hermitian_part(&kk);
    let e = Spectral::new(&kk).exp_scaled(c(-beta, 0.0));
    let amp = g.inner(&(e * g.xi()), g.xi());
    if amp.re <= 0.0 {
        return Err(Error::Numerical("non-positive GNS amplitude".into()));
    }
    let gns_value = -amp.re.ln() / beta;

    let (log_d, _) = real_log_dimension(u, &state, beta)?;
    let cocycle_value = -log_d / beta;

    let omega = charged_state(u, &state, beta)?.normalized();
    let s = relative_entropy(&omega, &state.normalized())?;
    let entropy_value = omega.eval(&k).re + s.value / beta;

    Ok(FreeEnergy { gns: gns_value, cocycle: cocycle_value, entropy: entropy_value })
}

/// `S_c(ρ) = log d(ρ)²`.
pub fn conditional_entropy(rho: &Charge) -> f64 {
    2.0 * rho.dimension().ln()
}

#[derive(Clone, Debug)]
pub struct BlackHoleScenario {
    pub kappa: f64,
    pub phi: State,
    pub dynamics: Dynamics,
}

impl BlackHoleScenario {
    /// Gibbs state of `h` at the Hawking temperature `β = 2π/κ`.
    pub fn new(h: &Element, kappa: f64) -> Result<Self> {
        if !(kappa > 0.0) {
            return domain("surface gravity must be positive");
        }
        let dynamics = Dynamics::new(h.clone(), 2.0 * std::f64::consts::PI / kappa)?;
        Ok(BlackHoleScenario { kappa, phi: dynamics.gibbs(), dynamics })
    }

    pub fn beta(&self) -> f64 {
        self.dynamics.beta()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlackHoleReport {
    pub beta: f64,
    /// `(π/κ)(F(φ_ρ|φ_σ) + F(φ_ρ̄|φ_σ̄))`.
    pub lhs: f64,
    /// `log d(ρ) − log d(σ)`.
    pub rhs: f64,
    pub residual: f64,
    /// `F(φ_ρ|φ_σ)` from the two absolute cocycles.
    pub f_rho_sigma: f64,
    /// The same quantity from the relative cocycle `ρ(u_σ̄) u_ρ`, when available.
    pub f_rho_sigma_relative: Option<f64>,
    pub relative_residual: f64,
    /// `F(φ_σ|φ_ρ) − ½β^{-1}(S_c(σ) − S_c(ρ)) − (μ_σ − μ_ρ)`.
    pub ife_residual: f64,
}

struct ChargeThermo {
    log_d_u: f64,
    log_d_dual: f64,
    mu: f64,
}

fn thermo(rho: &CovariantCharge, sc: &BlackHoleScenario) -> Result<ChargeThermo> {
    let state = rho.charge.target_state(&sc.phi);
    let u = rho.cocycle(&sc.phi, &sc.dynamics)?;
    let ud = frobenius_dual_cocycle(&rho.charge, &u, &rho.conj)?;
    let (log_d_u, _) = real_log_dimension(&u, &state, sc.beta())?;
    let (log_d_dual, _) = real_log_dimension(&ud, &state, sc.beta())?;
    let mu = (log_d_u - rho.charge.dimension().ln()) / sc.beta();
    Ok(ChargeThermo { log_d_u, log_d_dual, mu })
}

/// `u_{ρσ̄} = ρ(u_σ̄) u_ρ`.
///
/// Available when both charges are abelian, or when σ is trivial so that
/// `u_σ̄` is a phase.
pub fn relative_cocycle(rho: &CovariantCharge, sigma: &CovariantCharge, phi: &State, dynamics: &Dynamics) -> Result<UnitaryCocycle> {
    let u_rho = rho.cocycle(phi, dynamics)?;
    if sigma.charge.is_trivial() && sigma.charge.is_abelian() {
        let ph = UnitaryCocycle::phase(u_rho.dynamics(), -sigma.c);
        return UnitaryCocycle::composite(vec![ph, u_rho]);
    }
    match (&rho.charge.kind, &sigma.charge.kind) {
        (ChargeKind::Abelian { v }, ChargeKind::Abelian { .. }) => {
            let us_bar = sigma.dual_cocycle(phi, dynamics)?;
            let moved = UnitaryCocycle::transform(&us_bar, v, &v.adjoint(), c(1.0, 0.0), false)?;
            UnitaryCocycle::composite(vec![moved, u_rho])
        }
        _ => Err(Error::Unsupported(
            "relative cocycle needs abelian charges or a trivial second charge".into(),
        )),
    }
}

pub fn black_hole_identity(sc: &BlackHoleScenario, rho: &CovariantCharge, sigma: &CovariantCharge) -> Result<BlackHoleReport> {
    let beta = sc.beta();
    let tr = thermo(rho, sc)?;
    let ts = thermo(sigma, sc)?;
    let f_rs = (tr.log_d_u - ts.log_d_u) / beta;
    let f_rs_bar = (tr.log_d_dual - ts.log_d_dual) / beta;
    let lhs = std::f64::consts::PI / sc.kappa * (f_rs + f_rs_bar);
    let rhs = rho.charge.dimension().ln() - sigma.charge.dimension().ln();

    let f_rel = match relative_cocycle(rho, sigma, &sc.phi, &sc.dynamics) {
        Ok(u) => {
            let state = rho.charge.target_state(&sc.phi);
            let (l, _) = real_log_dimension(&u, &state, beta)?;
            Some((l - 2.0 * sigma.charge.dimension().ln()) / beta)
        }
        Err(Error::Unsupported(_)) => None,
        Err(e) => return Err(e),
    };
    let relative_residual = f_rel.map(|f| (f - f_rs).abs()).unwrap_or(0.0);

    let f_sr = -f_rs;
    let ife = 0.5 / beta * (conditional_entropy(&sigma.charge) - conditional_entropy(&rho.charge)) + ts.mu - tr.mu;
    Ok(BlackHoleReport {
        beta,
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
        f_rho_sigma: f_rs,
        f_rho_sigma_relative: f_rel,
        relative_residual,
        ife_residual: (f_sr - ife).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::from_real_rows;

    fn sigma_x() -> Element {
        Element::from_matrix(from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]))
    }

    #[test]
    fn multiplicity_left_inverse() {
        let alg = MatrixAlgebra::new(vec![2, 1]).unwrap();
        let rho = Charge::multiplicity(&alg, 3).unwrap();
        let mut rng = <rand::rngs::StdRng as rand::SeedableRng>::seed_from_u64(5);
        let x = Element::random(&mut rng, &alg);
        assert!(rho.left_inverse_residual(&[x]) < 1e-13);
    }

    #[test]
    fn identity_charge_has_zero_free_energy() {
        let h = Element::from_matrix(linalg::diag_real(&[0.0, 0.6]));
        let dynamics = Dynamics::new(h, 1.3).unwrap();
        let phi = dynamics.gibbs();
        let rho = Charge::identity(phi.algebra());
        let u = covariance_cocycle(&rho, &dynamics, 0.0).unwrap();
        let f = free_energy(&rho, &phi, &dynamics, &u).unwrap();
        assert!(f.gns.abs() < 1e-12 && f.cocycle.abs() < 1e-12 && f.entropy.abs() < 1e-12);
    }

    #[test]
    fn sigma_x_cocycle_closed_form() {
        let eps = 0.9;
        let h = Element::from_matrix(linalg::diag_real(&[0.0, eps]));
        let dynamics = Dynamics::new(h, 1.0).unwrap();
        let rho = Charge::abelian(&sigma_x()).unwrap();
        let u = covariance_cocycle(&rho, &dynamics, 0.0).unwrap();
        let t = 0.37;
        let want = Element::from_matrix(CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c(0.0, t * eps).exp(),
            c(0.0, -t * eps).exp(),
        ])));
        assert!(u.eval(c(t, 0.0)).dist(&want) < 1e-13);
    }
}
