//! Unitary cocycles `u(t+s) = u(t) α_t(u(s))` for inner dynamics, with exact
//! complex-time evaluators and the holomorphic dimension `d_φ(u)`.
//!
//! Physical-time cocycles belong to `α_t = Ad(e^{itH})` and are continued to
//! `z = iβ`. Connes cocycles built by [`connes_cocycle`] use the modular
//! parameter `s ↦ D_ψ^{is} D_φ^{-is}` and are continued to `z = -i`; the two
//! pictures are related by `σ^φ_s = α_{-βs}`.

use num_complex::Complex64;
use rand::SeedableRng;

use crate::error::{domain, Result};
use crate::linalg::{self, c, Spectral, I, ONE, ZERO};
use crate::qsys::{kms_check, Dynamics, Element, MatrixAlgebra, State};

/// Above this KMS residual the holomorphic dimension is flagged.
pub const KMS_WARNING: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TimeParam {
    /// Time of the physical dynamics; continuation point `iβ`.
    Physical,
    /// Modular time of the reference state; continuation point `-i`.
    Modular,
}

#[derive(Clone, Debug)]
pub struct ConnesData {
    psi: State,
    phi: State,
    psi_spec: Vec<Spectral>,
    phi_spec: Vec<Spectral>,
}

impl ConnesData {
    pub fn psi(&self) -> &State {
        &self.psi
    }
    pub fn phi(&self) -> &State {
        &self.phi
    }
}

#[derive(Clone, Debug)]
pub enum CocycleKind {
    /// `D_ψ^{-iz/β} D_φ^{iz/β}` in physical time.
    Connes(Box<ConnesData>),
    /// `v e^{izH} v* e^{-izH}`.
    Conjugation { v: Element },
    /// `e^{icz}`.
    Phase { c: f64 },
    /// `e^{izA} e^{izB}`; a perturbation `H → H₁` is `A = H₁, B = -H`.
    Exponentials { a: Element, b: Element },
    /// Ordered product, left to right.
    Composite(Vec<UnitaryCocycle>),
    /// `scalar · left · w(z) · right`, or `scalar · left · w(z̄)* · right`
    /// when `adjoint` is set.
    Transform {
        inner: Box<UnitaryCocycle>,
        left: Element,
        right: Element,
        scalar: Complex64,
        adjoint: bool,
    },
}

#[derive(Clone, Debug)]
pub struct UnitaryCocycle {
    kind: CocycleKind,
    dynamics: Dynamics,
    param: TimeParam,
}

fn same_dynamics(a: &Dynamics, b: &Dynamics) -> bool {
    a.algebra() == b.algebra() && (a.beta() - b.beta()).abs() <= 1e-12 * a.beta() && a.h().dist(b.h()) <= 1e-10 * (1.0 + a.h().norm())
}

/// `(Dψ:Dφ)_s = D_ψ^{is} D_φ^{-is}` in modular time of φ.
pub fn connes_cocycle(psi: &State, phi: &State) -> Result<UnitaryCocycle> {
    check_connes_inputs(psi, phi)?;
    // modular group of φ written as a physical dynamics at β = 1
    let h = phi.density_element().map_blocks(|_, d| Spectral::new(d).log() * c(-1.0, 0.0));
    let dynamics = Dynamics::new(h, 1.0)?;
    Ok(UnitaryCocycle { kind: connes_kind(psi, phi), dynamics, param: TimeParam::Modular })
}

/// The same Connes cocycle in the physical time of `dynamics`, for which φ is
/// expected to be the β-KMS state.
pub fn connes_cocycle_physical(psi: &State, phi: &State, dynamics: &Dynamics) -> Result<UnitaryCocycle> {
    check_connes_inputs(psi, phi)?;
    if dynamics.algebra() != phi.algebra() {
        return domain("dynamics and states on different algebras");
    }
    Ok(UnitaryCocycle { kind: connes_kind(psi, phi), dynamics: dynamics.clone(), param: TimeParam::Physical })
}

fn check_connes_inputs(psi: &State, phi: &State) -> Result<()> {
    if psi.algebra() != phi.algebra() {
        return domain("Connes cocycle of states on different algebras");
    }
    phi.require_faithful("connes_cocycle (reference)")?;
    psi.require_faithful("connes_cocycle (non-faithful ψ is not supported)")?;
    Ok(())
}

fn connes_kind(psi: &State, phi: &State) -> CocycleKind {
    CocycleKind::Connes(Box::new(ConnesData {
        psi: psi.clone(),
        phi: phi.clone(),
        psi_spec: psi.densities().iter().map(Spectral::new).collect(),
        phi_spec: phi.densities().iter().map(Spectral::new).collect(),
    }))
}

impl UnitaryCocycle {
    fn physical(kind: CocycleKind, dynamics: &Dynamics) -> Self {
        UnitaryCocycle { kind, dynamics: dynamics.clone(), param: TimeParam::Physical }
    }

    pub fn phase(dynamics: &Dynamics, c: f64) -> Self {
        Self::physical(CocycleKind::Phase { c }, dynamics)
    }

    pub fn identity(dynamics: &Dynamics) -> Self {
        Self::phase(dynamics, 0.0)
    }

    pub fn conjugation(dynamics: &Dynamics, v: &Element) -> Result<Self> {
        if v.algebra() != dynamics.algebra() {
            return domain("conjugating unitary lives on another algebra");
        }
        if v.unitarity_defect() > 1e-9 {
            return domain("conjugating element is not unitary");
        }
        Ok(Self::physical(CocycleKind::Conjugation { v: v.clone() }, dynamics))
    }

    /// `e^{izH₁} e^{-izH}` relating `Ad e^{itH}` to `Ad e^{itH₁}`.
    pub fn perturbation(dynamics: &Dynamics, h1: &Element) -> Result<Self> {
        if !h1.is_hermitian(1e-10) {
            return domain("perturbed generator is not Hermitian");
        }
        Self::exp_product(dynamics, h1, &dynamics.h().scale(c(-1.0, 0.0)))
    }

    /// `e^{izA} e^{izB}`; a cocycle only when `B = -H` (checked by
    /// [`cocycle_identity_residual`], not here).
    pub fn exp_product(dynamics: &Dynamics, a: &Element, b: &Element) -> Result<Self> {
        if a.algebra() != dynamics.algebra() || b.algebra() != dynamics.algebra() {
            return domain("exponents live on another algebra");
        }
        if !a.is_hermitian(1e-10) || !b.is_hermitian(1e-10) {
            return domain("exponents must be Hermitian");
        }
        Ok(Self::physical(CocycleKind::Exponentials { a: a.clone(), b: b.clone() }, dynamics))
    }

    /// Product `u_1 u_2 ⋯` in declaration order.
    pub fn composite(parts: Vec<UnitaryCocycle>) -> Result<Self> {
        let Some(first) = parts.first() else {
            return domain("empty composite");
        };
        let dynamics = first.dynamics.clone();
        let param = first.param;
        for p in &parts[1..] {
            if p.param != param || !same_dynamics(&p.dynamics, &dynamics) {
                return domain("composite factors belong to different dynamics");
            }
        }
        Ok(UnitaryCocycle { kind: CocycleKind::Composite(parts), dynamics, param })
    }

    pub fn transform(inner: &UnitaryCocycle, left: &Element, right: &Element, scalar: Complex64, adjoint: bool) -> Result<Self> {
        if left.algebra() != inner.algebra() || right.algebra() != inner.algebra() {
            return domain("transform factors live on another algebra");
        }
        Ok(UnitaryCocycle {
            kind: CocycleKind::Transform {
                inner: Box::new(inner.clone()),
                left: left.clone(),
                right: right.clone(),
                scalar,
                adjoint,
            },
            dynamics: inner.dynamics.clone(),
            param: inner.param,
        })
    }

    pub fn kind(&self) -> &CocycleKind {
        &self.kind
    }

    pub fn dynamics(&self) -> &Dynamics {
        &self.dynamics
    }

    pub fn param(&self) -> TimeParam {
        self.param
    }

    pub fn algebra(&self) -> &MatrixAlgebra {
        self.dynamics.algebra()
    }

    /// Point at which the holomorphic dimension is read off.
    pub fn continuation_point(&self, beta: f64) -> Complex64 {
        match self.param {
            TimeParam::Physical => c(0.0, beta),
            TimeParam::Modular => c(0.0, -1.0),
        }
    }

    fn to_physical_time(&self, z: Complex64) -> Complex64 {
        match self.param {
            TimeParam::Physical => z,
            TimeParam::Modular => z * (-self.dynamics.beta()),
        }
    }

    /// `u(z)` in the cocycle's own time parameter.
    pub fn eval(&self, z: Complex64) -> Element {
        self.eval_physical(self.to_physical_time(z))
    }

    fn eval_physical(&self, z: Complex64) -> Element {
        let alg = self.dynamics.algebra();
        match &self.kind {
            CocycleKind::Phase { c: ch } => Element::scalar(alg, (I * z * *ch).exp()),
            CocycleKind::Conjugation { v } => {
                let e = self.dynamics.unitary(z);
                let ei = self.dynamics.unitary(-z);
                &(&(v * &e) * &v.adjoint()) * &ei
            }
            CocycleKind::Connes(d) => {
                let b = self.dynamics.beta();
                let w = I * z / b;
                let blocks = d
                    .psi_spec
                    .iter()
                    .zip(&d.phi_spec)
                    .map(|(sp, sf)| sp.power(-w) * sf.power(w))
                    .collect();
                Element::new(alg, blocks).expect("block shapes")
            }
            CocycleKind::Exponentials { a, b } => {
                let ea = a.map_blocks(|_, m| Spectral::new(m).exp_scaled(I * z));
                let eb = b.map_blocks(|_, m| Spectral::new(m).exp_scaled(I * z));
                &ea * &eb
            }
            CocycleKind::Composite(parts) => {
                let mut acc = Element::identity(alg);
                for p in parts {
                    acc = &acc * &p.eval_physical(z);
                }
                acc
            }
            CocycleKind::Transform { inner, left, right, scalar, adjoint } => {
                let w = if *adjoint { inner.eval_physical(z.conj()).adjoint() } else { inner.eval_physical(z) };
                (&(left * &w) * right).scale(*scalar)
            }
        }
    }

    /// `α_t(x)` in the cocycle's own time parameter.
    pub fn alpha(&self, x: &Element, t: f64) -> Element {
        self.dynamics.evolve(x, self.to_physical_time(c(t, 0.0)))
    }

    /// `-i u'(0)` in physical time, from the closed forms.
    pub fn physical_generator(&self) -> Element {
        let alg = self.dynamics.algebra();
        match &self.kind {
            CocycleKind::Phase { c: ch } => Element::scalar(alg, c(*ch, 0.0)),
            CocycleKind::Conjugation { v } => {
                let h = self.dynamics.h();
                &(&(v * h) * &v.adjoint()) - h
            }
            CocycleKind::Connes(d) => {
                let b = self.dynamics.beta();
                let blocks = d
                    .psi_spec
                    .iter()
                    .zip(&d.phi_spec)
                    .map(|(sp, sf)| (sf.log() - sp.log()) / c(b, 0.0))
                    .collect();
                Element::new(alg, blocks).expect("block shapes")
            }
            CocycleKind::Exponentials { a, b } => a + b,
            CocycleKind::Composite(parts) => {
                let mut acc = Element::zero(alg);
                for p in parts {
                    acc = &acc + &p.physical_generator();
                }
                acc
            }
            CocycleKind::Transform { inner, left, right, scalar, adjoint } => {
                let k = inner.physical_generator();
                let sign = if *adjoint { -1.0 } else { 1.0 };
                (&(left * &k) * right).scale(*scalar * sign)
            }
        }
    }

    /// `-i u'(0)` in the cocycle's own time parameter.
    pub fn generator(&self) -> Element {
        match self.param {
            TimeParam::Physical => self.physical_generator(),
            TimeParam::Modular => self.physical_generator().scale(c(-self.dynamics.beta(), 0.0)),
        }
    }

    pub fn unitarity_defect(&self, t: f64) -> f64 {
        self.eval(c(t, 0.0)).unitarity_defect()
    }

    /// Multiply by the phase cocycle `e^{iδt}` (physical time).
    pub fn with_phase(&self, delta: f64) -> Result<UnitaryCocycle> {
        let ph = UnitaryCocycle { kind: CocycleKind::Phase { c: delta }, dynamics: self.dynamics.clone(), param: self.param };
        UnitaryCocycle::composite(vec![ph, self.clone()])
    }
}

/// `φ(u(z))/φ(1)`.
pub fn eval_complex(u: &UnitaryCocycle, phi: &State, z: Complex64) -> Result<Complex64> {
    if phi.algebra() != u.algebra() {
        return domain("state and cocycle on different algebras");
    }
    if let Some(v) = connes_reference_eval(u, phi, z) {
        return Ok(v);
    }
    Ok(phi.eval(&u.eval(z)) / phi.weight())
}

/// `Tr(D_φ D_ψ^{-w} D_φ^{w}) = Tr(D_ψ^{-w} D_φ^{1+w})` when φ is a multiple of
/// the cocycle's own reference state. Avoids forming `D_φ^{-1}` at `w = -1`.
fn connes_reference_eval(u: &UnitaryCocycle, phi: &State, z: Complex64) -> Option<Complex64> {
    let d = match &u.kind {
        CocycleKind::Connes(d) => d,
        CocycleKind::Composite(parts) => {
            // phases times a single Connes factor
            let mut scalar = ONE;
            let mut rest = None;
            for p in parts {
                match &p.kind {
                    CocycleKind::Phase { c: ch } => scalar *= (I * p.to_physical_time(z) * *ch).exp(),
                    _ if rest.is_none() => rest = Some(p),
                    _ => return None,
                }
            }
            return connes_reference_eval(rest?, phi, z).map(|v| v * scalar);
        }
        _ => return None,
    };
    let s = phi.weight() / d.phi.weight();
    let same = phi
        .densities()
        .iter()
        .zip(d.phi.densities())
        .all(|(a, b)| linalg::max_abs(&(a - b * c(s, 0.0))) <= 1e-14 * linalg::max_abs(a).max(1e-300));
    if !same {
        return None;
    }
    let w = I * u.to_physical_time(z) / u.dynamics.beta();
    let mut total = ZERO;
    for (sp, sf) in d.psi_spec.iter().zip(&d.phi_spec) {
        total += linalg::trace(&(sp.power(-w) * sf.power(w + 1.0)));
    }
    Some(total * s / phi.weight())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HolomorphicDimensionResult {
    pub value: Complex64,
    pub point: Complex64,
    /// `|value|`, the phase-stripped dimension.
    pub modulus: f64,
    /// Largest sampled KMS residual of φ for the cocycle's dynamics.
    pub kms_residual: f64,
}

impl HolomorphicDimensionResult {
    pub fn kms_flagged(&self) -> bool {
        self.kms_residual > KMS_WARNING
    }
}

/// `d_φ(u)`: the continuation of `φ(u(t))/φ(1)` to `iβ` (or `-i` in modular time).
pub fn holomorphic_dimension(u: &UnitaryCocycle, phi: &State, beta: f64) -> Result<HolomorphicDimensionResult> {
    if !(beta > 0.0) {
        return domain("β must be positive");
    }
    let point = u.continuation_point(beta);
    let kms_dyn = match u.param() {
        TimeParam::Physical => u.dynamics().with_beta(beta)?,
        TimeParam::Modular => u.dynamics().clone(),
    };
    let value = match gibbs_partition_ratio(u, phi, &kms_dyn) {
        Some(v) => c(v, 0.0),
        None => eval_complex(u, phi, point)?,
    };
    let kms_residual = sampled_kms_residual(phi, &kms_dyn);
    Ok(HolomorphicDimensionResult { value, point, modulus: value.norm(), kms_residual })
}

/// For a cocycle, `u(t) e^{itH}` is a one-parameter group `e^{itK}` with
/// `K = H - i u'(0)`, so at the Gibbs state `d_φ(u) = Tr e^{-βK} / Tr e^{-βH}`.
/// This avoids the cancellation between `e^{-βH}` and `e^{βH}` in the direct
/// evaluation. Returns `None` unless φ is the Gibbs state of `kms_dyn` and `u`
/// passes the cocycle identity.
fn gibbs_partition_ratio(u: &UnitaryCocycle, phi: &State, kms_dyn: &Dynamics) -> Option<f64> {
    if phi.algebra() != u.algebra() {
        return None;
    }
    let g = kms_dyn.gibbs();
    let s = phi.weight();
    let close = phi
        .densities()
        .iter()
        .zip(g.densities())
        .all(|(a, b)| linalg::max_abs(&(a - b * c(s, 0.0))) <= 1e-12 * s);
    if !close {
        return None;
    }
    let sample = [(0.37, -0.61), (-1.3, 0.2), (0.9, 1.4)];
    if sample.iter().any(|&(t, r)| cocycle_identity_residual(u, t, r) > 1e-10) {
        return None;
    }
    let k = &u.dynamics().h().clone() + &u.physical_generator();
    if !k.is_hermitian(1e-9) {
        return None;
    }
    let beta = kms_dyn.beta();
    let lam: Vec<f64> = kms_dyn.spectra().iter().flat_map(|sp| sp.values.iter().cloned()).collect();
    let kap: Vec<f64> = k
        .blocks()
        .iter()
        .flat_map(|b| Spectral::new(&linalg::hermitian_part(b)).values)
        .collect();
    let m = lam.iter().chain(&kap).cloned().fold(f64::INFINITY, f64::min);
    let num: f64 = kap.iter().map(|x| (-beta * (x - m)).exp()).sum();
    let den: f64 = lam.iter().map(|x| (-beta * (x - m)).exp()).sum();
    Some(num / den)
}

/// Largest KMS residual over a fixed set of pseudo-random test pairs.
pub fn sampled_kms_residual(phi: &State, dynamics: &Dynamics) -> f64 {
    if !phi.is_faithful() {
        return f64::INFINITY;
    }
    let mut rng = rand::rngs::StdRng::seed_from_u64(0x6b6d73);
    let alg = phi.algebra();
    let scale = phi.weight();
    let mut worst: f64 = 0.0;
    for k in 0..4 {
        let a = Element::random(&mut rng, alg);
        let b = Element::random(&mut rng, alg);
        let norm = a.norm() * b.norm() * scale;
        let r = kms_check(phi, dynamics, &a, &b, 0.37 * k as f64).unwrap_or(f64::INFINITY);
        worst = worst.max(r / norm);
    }
    worst
}

/// `‖u(t+s) − u(t) α_t(u(s))‖`.
pub fn cocycle_identity_residual(u: &UnitaryCocycle, t: f64, s: f64) -> f64 {
    let lhs = u.eval(c(t + s, 0.0));
    let rhs = &u.eval(c(t, 0.0)) * &u.alpha(&u.eval(c(s, 0.0)), t);
    lhs.dist(&rhs)
}

/// `u(0) = 1` defect.
pub fn normalization_defect(u: &UnitaryCocycle) -> f64 {
    u.eval(c(0.0, 0.0)).dist(&Element::scalar(u.algebra(), ONE))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg;

    #[test]
    fn scalar_connes_cocycle() {
        let phi = State::from_density(linalg::diag_real(&[0.3, 0.7])).unwrap();
        let psi = phi.scaled(2.0);
        let u = connes_cocycle(&psi, &phi).unwrap();
        let ut = u.eval(c(0.4, 0.0));
        let want = Complex64::from(2.0).powc(c(0.0, 0.4));
        assert!((ut.as_scalar(1e-12).unwrap() - want).norm() < 1e-12);
        let d = holomorphic_dimension(&u, &phi, 3.0).unwrap();
        assert!((d.value - c(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn phase_continuation() {
        let dynamics = Dynamics::new(Element::zero(&MatrixAlgebra::full(2)), 0.8).unwrap();
        let phi = dynamics.gibbs();
        let u = UnitaryCocycle::phase(&dynamics, 1.5);
        let d = holomorphic_dimension(&u, &phi, 0.8).unwrap();
        assert!((d.value - c((-1.5f64 * 0.8).exp(), 0.0)).norm() < 1e-14);
        assert!(cocycle_identity_residual(&u, 0.3, -1.1) < 1e-15);
        assert!(composite_rejects_mixed());
    }

    fn composite_rejects_mixed() -> bool {
        let d1 = Dynamics::new(Element::zero(&MatrixAlgebra::full(2)), 1.0).unwrap();
        let d2 = Dynamics::new(Element::identity(&MatrixAlgebra::full(2)), 1.0).unwrap();
        UnitaryCocycle::composite(vec![UnitaryCocycle::phase(&d1, 1.0), UnitaryCocycle::phase(&d2, 1.0)]).is_err()
    }
}
