use anyhow::{bail, Result};
use modindex::cocycle::{self as cc, CocycleKind, UnitaryCocycle};
use modindex::qsys::State;
use modindex::Complex64;
use serde::Deserialize;

use super::{one, Expect};
use crate::build::{thermal, CocycleSpec, DynamicsSpec, Scalar, StateSpec};
use crate::run::Ctx;

fn default_times() -> Vec<f64> {
    vec![-1.7, -0.4, 0.3, 1.1, 2.5]
}

fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConnesParams {
    pub psi: StateSpec,
    pub phi: StateSpec,
    /// A third state for the chain rule `(Dω:Dφ) = (Dω:Dψ)(Dψ:Dφ)`.
    #[serde(default)]
    pub omega: Option<StateSpec>,
    #[serde(default = "default_times")]
    pub times: Vec<f64>,
    #[serde(default = "one")]
    pub trials: usize,
    /// `ψ = λφ` gives `u(t) = λ^{it}`.
    #[serde(default)]
    pub expect_scalar: Option<f64>,
}

pub fn connes_cocycle(p: ConnesParams, ctx: &mut Ctx) -> Result<()> {
    ctx.trials(p.trials, |ctx, _| {
        let psi = p.psi.build(ctx)?;
        let phi = p.phi.build(ctx)?;
        let u = cc::connes_cocycle(&psi, &phi)?;
        for &t in &p.times {
            ctx.le("unitary", "u(t)*u(t) = 1", u.unitarity_defect(t), 1e-9);
            for &s in &p.times {
                ctx.le("cocycle", "u(t+s) = u(t) σ_t(u(s))", cc::cocycle_identity_residual(&u, t, s), 1e-9);
            }
        }
        ctx.le("origin", "u(0) = 1", u.eval(cx(0.0, 0.0)).dist(&modindex::qsys::Element::identity(phi.algebra())), 1e-12);
        if let Some(om) = &p.omega {
            let omega = om.build(ctx)?;
            let u_op = cc::connes_cocycle(&omega, &phi)?;
            let u_os = cc::connes_cocycle(&omega, &psi)?;
            for &t in &p.times {
                // D_ω^{it}D_φ^{-it} = (D_ω^{it}D_ψ^{-it})(D_ψ^{it}D_φ^{-it})
                let lhs = u_op.eval(cx(t, 0.0));
                let rhs = &u_os.eval(cx(t, 0.0)) * &u.eval(cx(t, 0.0));
                ctx.le("chain_rule", "(Dω:Dφ)_t = (Dω:Dψ)_t (Dψ:Dφ)_t", lhs.dist(&rhs), 1e-9);
            }
        }
        if let Some(lambda) = p.expect_scalar {
            for &t in &p.times {
                let want = modindex::qsys::Element::scalar(phi.algebra(), cx(0.0, t * lambda.ln()).exp());
                ctx.le("scalar", "(Dλφ:Dφ)_t = λ^{it}", u.eval(cx(t, 0.0)).dist(&want), 1e-12);
            }
        }
        Ok(())
    })
}

/// Expected value of a continuation.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Target {
    Value(Scalar),
    Named(Named),
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Named {
    /// `ψ(1)/φ(1)` for a Connes cocycle.
    WeightRatio,
}

impl Target {
    fn value(&self, u: &UnitaryCocycle) -> Result<Complex64> {
        match self {
            Target::Value(s) => Ok(s.value()),
            Target::Named(Named::WeightRatio) => match u.kind() {
                CocycleKind::Connes(d) => Ok(cx(d.psi().weight() / d.phi().weight(), 0.0)),
                _ => bail!("`weight_ratio` needs a Connes cocycle"),
            },
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Point {
    At(Scalar),
    Named(PointName),
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointName {
    /// `iβ` in physical time, `−i` in modular time.
    Continuation,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalParams {
    #[serde(default)]
    pub dynamics: Option<DynamicsSpec>,
    #[serde(default)]
    pub state: Option<StateSpec>,
    pub cocycle: CocycleSpec,
    pub z: Point,
    #[serde(default)]
    pub expect: Option<Target>,
    #[serde(default = "one")]
    pub trials: usize,
}

pub fn eval_complex(p: EvalParams, ctx: &mut Ctx) -> Result<()> {
    ctx.trials(p.trials, |ctx, _| {
        let (dy, phi) = thermal(ctx, &p.dynamics, &p.state)?;
        let u = p.cocycle.build(ctx, &dy, &phi)?;
        let z = match &p.z {
            Point::At(s) => s.value(),
            Point::Named(PointName::Continuation) => u.continuation_point(dy.beta()),
        };
        let v = cc::eval_complex(&u, &phi, z)?;
        ctx.value_c("value", v);
        ctx.value_c("z", z);
        if z.im == 0.0 {
            ctx.ge("contraction", "1 − |φ(u(t))|/φ(1) ≥ 0 on the real axis", 1.0 - v.norm(), -1e-12);
        }
        if let Some(t) = &p.expect {
            let want = t.value(&u)?;
            ctx.le("expected", "φ(u(z))/φ(1) = expected", (v - want).norm(), 1e-9);
        }
        Ok(())
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HolParams {
    #[serde(default)]
    pub dynamics: Option<DynamicsSpec>,
    #[serde(default)]
    pub state: Option<StateSpec>,
    pub cocycle: CocycleSpec,
    #[serde(default)]
    pub beta: Option<f64>,
    #[serde(default)]
    pub expect: Option<Target>,
    /// `d_φ(u · e^{ict}) = e^{−cβ} d_φ(u)` for these `c`.
    #[serde(default)]
    pub phases: Vec<f64>,
    #[serde(default = "one")]
    pub trials: usize,
}

fn continued(u: &UnitaryCocycle, phi: &State, beta: f64, ctx: &mut Ctx) -> Result<Complex64> {
    let r = cc::holomorphic_dimension(u, phi, beta)?;
    if r.kms_flagged() {
        ctx.warn(format!("state is not KMS for the cocycle's dynamics (residual {:.3e})", r.kms_residual));
    }
    Ok(r.value)
}

pub fn holomorphic_dimension(p: HolParams, ctx: &mut Ctx) -> Result<()> {
    ctx.trials(p.trials, |ctx, _| {
        let (dy, phi) = thermal(ctx, &p.dynamics, &p.state)?;
        let beta = p.beta.unwrap_or(dy.beta());
        let u = p.cocycle.build(ctx, &dy, &phi)?;
        let d = continued(&u, &phi, beta, ctx)?;
        ctx.value_c("d_phi", d);
        if let Some(t) = &p.expect {
            let want = t.value(&u)?;
            ctx.le("expected", "d_φ(u) = expected", (d - want).norm(), 1e-10);
        }
        for &c in &p.phases {
            let dc = continued(&u.with_phase(c)?, &phi, beta, ctx)?;
            // the phase factor continues to e^{−cβ} in physical time
            let factor = match u.param() {
                cc::TimeParam::Physical => (-c * beta).exp(),
                cc::TimeParam::Modular => (-c * u.dynamics().beta()).exp(),
            };
            ctx.le("phase_law", "d_φ(u·e^{ict}) = e^{−cβ} d_φ(u)", (dc - d * factor).norm() / (1.0 + d.norm() * factor), 1e-9);
        }
        Ok(())
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentityParams {
    #[serde(default)]
    pub dynamics: Option<DynamicsSpec>,
    #[serde(default)]
    pub state: Option<StateSpec>,
    pub cocycle: CocycleSpec,
    #[serde(default = "default_times")]
    pub times: Vec<f64>,
    #[serde(default = "one")]
    pub trials: usize,
    #[serde(default)]
    pub expect: Expect,
    #[serde(default = "witness")]
    pub min_violation: f64,
}

fn witness() -> f64 {
    1e-3
}

pub fn cocycle_identity_residual(p: IdentityParams, ctx: &mut Ctx) -> Result<()> {
    let mut overall: f64 = 0.0;
    ctx.trials(p.trials, |ctx, _| {
        let (dy, phi) = thermal(ctx, &p.dynamics, &p.state)?;
        let u = p.cocycle.build(ctx, &dy, &phi)?;
        let mut worst: f64 = 0.0;
        for &t in &p.times {
            for &s in &p.times {
                worst = worst.max(cc::cocycle_identity_residual(&u, t, s));
            }
        }
        overall = overall.max(worst);
        if p.expect == Expect::Holds {
            ctx.le("cocycle", "u(t+s) = u(t) α_t(u(s))", worst, 1e-10);
        }
        Ok(())
    })?;
    ctx.value_f("worst_residual", overall);
    if p.expect == Expect::Fails {
        ctx.ge("witness", "u(t+s) ≠ u(t) α_t(u(s)) for some t, s", overall, p.min_violation);
    }
    Ok(())
}
