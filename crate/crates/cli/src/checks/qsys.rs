use anyhow::{bail, Result};
use modindex::linalg::{self, Spectral};
use modindex::qsys::{self, Element, RepDescriptor, State};
use modindex::Complex64;
use serde::Deserialize;

use super::{one, ten, Expect};
use crate::build::{AlgebraSpec, DynamicsSpec, ElementSpec, StateSpec};
use crate::run::Ctx;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GibbsParams {
    pub h: ElementSpec,
    pub beta: f64,
    #[serde(default = "one")]
    pub trials: usize,
    /// Random `(a, b)` pairs per trial.
    #[serde(default = "ten")]
    pub samples: usize,
    #[serde(default)]
    pub expect_density: Option<ElementSpec>,
}

fn sample_times() -> impl Iterator<Item = f64> {
    (0..10).map(|k| -2.0 + 0.45 * k as f64)
}

pub fn gibbs_state(p: GibbsParams, ctx: &mut Ctx) -> Result<()> {
    ctx.trials(p.trials, |ctx, _| {
        let h = p.h.build(ctx)?;
        let phi = qsys::gibbs_state(&h, p.beta)?;
        let dy = qsys::Dynamics::new(h, p.beta)?;
        let alg = phi.algebra().clone();
        ctx.le("normalization", "φ(1) = 1", (phi.weight() - 1.0).abs(), 1e-12);
        ctx.holds("faithful", "φ faithful", phi.is_faithful());
        for _ in 0..p.samples {
            let a = Element::random(&mut ctx.rng, &alg);
            let b = Element::random(&mut ctx.rng, &alg);
            for t in sample_times() {
                ctx.le("kms", "F(t+iβ) = φ(α_t(a) b)", qsys::kms_check(&phi, &dy, &a, &b, t)?, 1e-9);
            }
        }
        if let Some(want) = &p.expect_density {
            let want = want.build(ctx)?;
            ctx.le("density", "e^{-βH}/Z = expected density", phi.density_element().dist(&want), 1e-12);
        }
        ctx.value_f("weight", phi.weight());
        Ok(())
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KmsParams {
    pub state: StateSpec,
    pub dynamics: DynamicsSpec,
    #[serde(default)]
    pub a: Option<ElementSpec>,
    #[serde(default)]
    pub b: Option<ElementSpec>,
    #[serde(default)]
    pub t: Option<f64>,
    #[serde(default = "ten")]
    pub samples: usize,
    #[serde(default)]
    pub expect: Expect,
    #[serde(default = "witness_floor")]
    pub min_violation: f64,
}

fn witness_floor() -> f64 {
    1e-3
}

pub fn kms_check(p: KmsParams, ctx: &mut Ctx) -> Result<()> {
    let phi = p.state.build(ctx)?;
    let dy = p.dynamics.build(ctx)?;
    let alg = phi.algebra().clone();
    let mut worst: f64 = 0.0;
    let times: Vec<f64> = match p.t {
        Some(t) => vec![t],
        None => sample_times().collect(),
    };
    let explicit = p.a.is_some() || p.b.is_some();
    let rounds = if explicit { 1 } else { p.samples };
    for _ in 0..rounds {
        let a = match &p.a {
            Some(s) => s.build(ctx)?,
            None => Element::random(&mut ctx.rng, &alg),
        };
        let b = match &p.b {
            Some(s) => s.build(ctx)?,
            None => Element::random(&mut ctx.rng, &alg),
        };
        for &t in &times {
            worst = worst.max(qsys::kms_check(&phi, &dy, &a, &b, t)?);
        }
    }
    ctx.value_f("worst_residual", worst);
    match p.expect {
        Expect::Holds => ctx.le("kms", "F(t+iβ) = φ(α_t(a) b)", worst, 1e-10),
        Expect::Fails => ctx.ge("kms_witness", "F(t+iβ) ≠ φ(α_t(a) b) for some a, b", worst, p.min_violation),
    }
    Ok(())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GnsParams {
    #[serde(default)]
    pub state: Option<StateSpec>,
    /// Gibbs data; the GNS Hamiltonian spectrum is compared with energy gaps.
    #[serde(default)]
    pub dynamics: Option<DynamicsSpec>,
    #[serde(default = "one")]
    pub trials: usize,
    #[serde(default)]
    pub expect_tracial: bool,
}

pub fn gns(p: GnsParams, ctx: &mut Ctx) -> Result<()> {
    ctx.trials(p.trials, |ctx, _| {
        let (phi, dy) = match (&p.state, &p.dynamics) {
            (Some(s), None) => (s.build(ctx)?, None),
            (None, Some(d)) => {
                let dy = d.build(ctx)?;
                (dy.gibbs(), Some(dy))
            }
            _ => bail!("give exactly one of `state` and `dynamics`"),
        };
        let g = qsys::gns(&phi)?;
        let alg = phi.algebra().clone();
        let carrier: usize = alg.blocks().iter().map(|n| n * n).sum();
        ctx.eq("cyclic", "rank span π(𝔄)ξ = Σ n_j²", g.cyclic_rank() as f64, carrier as f64);
        ctx.eq("separating", "rank span π(𝔄)′ξ = Σ n_j²", g.separating_rank() as f64, carrier as f64);
        let r = state_residual(ctx, &g, &phi);
        ctx.le("state", "⟨π(a)ξ, ξ⟩ = φ(a)/φ(1)", r, 1e-12);

        // Δ^{it} π(a) ξ against π(D^{it} a D^{-it}) ξ built from the densities
        let a = Element::random(&mut ctx.rng, &alg);
        let mut worst: f64 = 0.0;
        for t in [-1.3, 0.4, 2.2] {
            let lhs = g.modular_unitary(t) * (g.pi(&a) * g.xi());
            let dit = phi.density_element().map_blocks(|_, d| Spectral::new(d).power(Complex64::new(0.0, t)));
            let sigma = &(&dit * &a) * &dit.adjoint();
            worst = worst.max((lhs - g.pi(&sigma) * g.xi()).norm());
        }
        ctx.le("modular", "Δ^{it} π(a)ξ = π(σ_t(a))ξ", worst, 1e-9);

        let id_dist = linalg::op_norm(&(g.delta() - linalg::eye(g.dim())));
        ctx.value_f("delta_minus_identity", id_dist);
        if p.expect_tracial {
            ctx.le("tracial", "Δ = 1", id_dist, 1e-12);
        }
        if let Some(dy) = dy {
            let mut got = Spectral::new(&linalg::hermitian_part(&g.hamiltonian(dy.beta()))).values;
            let mut want = Vec::new();
            for sp in dy.spectra() {
                for &x in &sp.values {
                    for &y in &sp.values {
                        want.push(x - y);
                    }
                }
            }
            got.sort_by(f64::total_cmp);
            want.sort_by(f64::total_cmp);
            let gap = got.iter().zip(&want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            ctx.le("gns_hamiltonian", "spec(−β⁻¹ log Δ) = {λ_i − λ_j}", gap, 1e-9);
        }
        Ok(())
    })
}

fn state_residual(ctx: &mut Ctx, g: &qsys::GnsSpace, phi: &State) -> f64 {
    let a = Element::random(&mut ctx.rng, phi.algebra());
    let v = g.inner(&(g.pi(&a) * g.xi()), g.xi());
    (v - phi.eval(&a) / phi.weight()).norm()
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntropyParams {
    pub phi: StateSpec,
    pub psi: StateSpec,
    #[serde(default = "one")]
    pub trials: usize,
    #[serde(default)]
    pub expect: Option<f64>,
    #[serde(default)]
    pub expect_infinite: bool,
}

pub fn relative_entropy(p: EntropyParams, ctx: &mut Ctx) -> Result<()> {
    ctx.trials(p.trials, |ctx, _| {
        let phi = p.phi.build(ctx)?;
        let psi = p.psi.build(ctx)?;
        let s = qsys::relative_entropy(&phi, &psi)?;
        if p.expect_infinite {
            ctx.holds("support", "supp φ ⊄ supp ψ gives +∞", s.support_violation && s.value == f64::INFINITY);
            return Ok(());
        }
        ctx.holds("finite", "supp φ ⊆ supp ψ", !s.support_violation);
        ctx.value_f("value", s.value);
        ctx.ge("nonnegative", "S(φ|ψ) ≥ 0", s.value, -1e-12);
        if (phi.weight() - 1.0).abs() < 1e-12 && (psi.weight() - 1.0).abs() < 1e-12 {
            let d = phi.trace_distance(&psi);
            ctx.ge("pinsker", "S(φ|ψ) − ½‖φ−ψ‖₁² ≥ 0", s.value - 0.5 * d * d, -1e-12);
        }
        let self_s = qsys::relative_entropy(&phi, &phi)?.value;
        ctx.le("self", "S(φ|φ) = 0", self_s.abs(), 1e-10);
        if phi.is_faithful() && psi.is_faithful() {
            let u = Element::random_unitary(&mut ctx.rng, phi.algebra());
            let su = qsys::relative_entropy(&phi.conjugated(&u), &psi.conjugated(&u))?.value;
            ctx.le("unitary_invariance", "S(φ∘Ad u|ψ∘Ad u) = S(φ|ψ)", (su - s.value).abs(), 1e-9);
        }
        if let Some(want) = p.expect {
            ctx.le("expected", "S(φ|ψ) = expected", (s.value - want).abs(), 1e-12);
        }
        Ok(())
    })
}

#[derive(Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum RepDescSpec {
    Multiplicities { algebra: AlgebraSpec, multiplicities: Vec<usize> },
    GnsOf(StateSpec),
    DirectSum(Vec<RepDescSpec>),
}

impl RepDescSpec {
    fn build(&self, ctx: &mut Ctx) -> Result<RepDescriptor> {
        Ok(match self {
            RepDescSpec::Multiplicities { algebra, multiplicities } => RepDescriptor::new(&algebra.build()?, multiplicities.clone())?,
            RepDescSpec::GnsOf(s) => RepDescriptor::of_state(&s.build(ctx)?),
            RepDescSpec::DirectSum(parts) => {
                let mut it = parts.iter();
                let Some(first) = it.next() else { bail!("empty direct sum") };
                let mut acc = first.build(ctx)?;
                for p in it {
                    acc = acc.direct_sum(&p.build(ctx)?)?;
                }
                acc
            }
        })
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuasiParams {
    pub a: RepDescSpec,
    pub b: RepDescSpec,
    pub expect: bool,
}

pub fn quasi_equivalent(p: QuasiParams, ctx: &mut Ctx) -> Result<()> {
    let a = p.a.build(ctx)?;
    let b = p.b.build(ctx)?;
    let got = qsys::quasi_equivalent(&a, &b)?;
    ctx.value("quasi_equivalent", got);
    ctx.holds("expected", "quasi-equivalence as expected", got == p.expect);
    // symmetric, and insensitive to amplification
    ctx.holds("symmetric", "π₁ ≈ π₂ ⇔ π₂ ≈ π₁", qsys::quasi_equivalent(&b, &a)? == got);
    ctx.holds("amplification", "π₁ ≈ π₁ ⊕ π₁", qsys::quasi_equivalent(&a, &a.direct_sum(&a)?)?);
    Ok(())
}
