use anyhow::{bail, Result};
use modindex::charge::{self as ch, BlackHoleScenario, ChargeKind, CovariantCharge};
use modindex::cocycle::{cocycle_identity_residual, holomorphic_dimension, UnitaryCocycle};
use modindex::qsys::{Dynamics, Element, State};
use modindex::Complex64;
use serde::Deserialize;

use super::{one, ten};
use crate::build::{thermal, ChargeSpec, CocycleSpec, DynamicsSpec, ElementSpec, Scalar, StateSpec};
use crate::run::Ctx;

struct Instance {
    dy: Dynamics,
    phi: State,
    rho: CovariantCharge,
}

fn instance(ctx: &mut Ctx, dynamics: &DynamicsSpec, state: &Option<StateSpec>, charge: &ChargeSpec) -> Result<Instance> {
    let (dy, phi) = thermal(ctx, &Some(dynamics.clone()), state)?;
    let rho = charge.build(ctx, dy.algebra(), &phi)?;
    Ok(Instance { dy, phi, rho })
}

fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

const TIMES: [f64; 4] = [-1.2, 0.35, 0.9, 2.4];

fn d_phi(u: &UnitaryCocycle, phi: &State, beta: f64) -> Result<f64> {
    let v = holomorphic_dimension(u, phi, beta)?.value;
    Ok(v.re)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CovParams {
    pub dynamics: DynamicsSpec,
    #[serde(default)]
    pub state: Option<StateSpec>,
    pub charge: ChargeSpec,
    /// Second abelian charge for `u(ρσ,t) = ρ(u(σ,t)) u(ρ,t)` at `c = 0`.
    #[serde(default)]
    pub sigma: Option<ChargeSpec>,
    #[serde(default = "ten")]
    pub samples: usize,
    #[serde(default = "one")]
    pub trials: usize,
    /// Closed form of `u(t)` as a diagonal of `(a, b)` with `u_kk(t) = e^{i(a_k + b_k t)}`.
    #[serde(default)]
    pub expect_diagonal_rates: Option<Vec<f64>>,
}

pub fn covariance_cocycle(p: CovParams, ctx: &mut Ctx) -> Result<()> {
    ctx.trials(p.trials, |ctx, _| {
        let inst = instance(ctx, &p.dynamics, &p.state, &p.charge)?;
        let u = inst.rho.cocycle(&inst.phi, &inst.dy)?;
        for &t in &TIMES {
            for &s in &TIMES {
                ctx.le("cocycle", "u(t+s) = u(t) α_t(u(s))", cocycle_identity_residual(&u, t, s), 1e-10);
            }
        }
        let alg = inst.phi.algebra().clone();
        let samples: Vec<Element> = (0..p.samples).map(|_| Element::random(&mut ctx.rng, &alg)).collect();
        ctx.le("left_inverse", "Φ_ρ ∘ ρ = id", inst.rho.charge.left_inverse_residual(&samples), 1e-10);
        if inst.rho.charge.is_abelian() {
            let r = ch::covariance_residual(&inst.rho.charge, &inst.dy, &u, &samples);
            ctx.le("covariance", "Ad u(t) ∘ α_t ∘ ρ ∘ α_{−t} = ρ", r, 1e-9);
        }
        if let Some(rates) = &p.expect_diagonal_rates {
            let mut worst: f64 = 0.0;
            for &t in &TIMES {
                let ut = u.eval(cx(t, 0.0));
                let m = ut.to_dense();
                if m.nrows() != rates.len() {
                    bail!("expected {} diagonal rates", m.nrows());
                }
                for i in 0..m.nrows() {
                    for j in 0..m.ncols() {
                        let want = if i == j { cx(0.0, (rates[i] + inst.rho.c) * t).exp() } else { cx(0.0, 0.0) };
                        worst = worst.max((m[(i, j)] - want).norm());
                    }
                }
            }
            ctx.le("closed_form", "u(t) = e^{ict} diag(e^{i r_k t})", worst, 1e-12);
        }
        if let Some(sigma) = &p.sigma {
            let sigma = sigma.build(ctx, &alg, &inst.phi)?;
            let (rho, sigma) = (&inst.rho.charge, &sigma.charge);
            if !(rho.is_abelian() && sigma.is_abelian()) {
                bail!("the two-variable law is checked for abelian pairs");
            }
            let rs = rho.compose(sigma)?;
            let u_r = ch::covariance_cocycle(rho, &inst.dy, 0.0)?;
            let u_s = ch::covariance_cocycle(sigma, &inst.dy, 0.0)?;
            let u_rs = ch::covariance_cocycle(&rs, &inst.dy, 0.0)?;
            for &t in &TIMES {
                let z = cx(t, 0.0);
                let rhs = &rho.apply(&u_s.eval(z)) * &u_r.eval(z);
                ctx.le("two_variable", "u(ρσ,t) = ρ(u(σ,t)) u(ρ,t)", u_rs.eval(z).dist(&rhs), 1e-10);
            }
            // additivity of log-dimensions along the composition
            let beta = inst.dy.beta();
            let prod = d_phi(&u_r, &inst.phi, beta)? * d_phi(&u_s, &inst.phi, beta)?;
            ctx.le("multiplicative", "d_φ(u_ρσ) = d_φ(u_ρ) d_φ(u_σ)", (d_phi(&u_rs, &inst.phi, beta)? - prod).abs(), 1e-9);
        }
        Ok(())
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DualParams {
    pub dynamics: DynamicsSpec,
    #[serde(default)]
    pub state: Option<StateSpec>,
    pub charge: ChargeSpec,
    /// Rescalings `R → λR, R̄ → λ̄⁻¹R̄` that must leave `u•` unchanged.
    #[serde(default)]
    pub gauges: Vec<Scalar>,
    #[serde(default = "one")]
    pub trials: usize,
    #[serde(default)]
    pub expect_diagonal_rates: Option<Vec<f64>>,
}

pub fn frobenius_dual_cocycle(p: DualParams, ctx: &mut Ctx) -> Result<()> {
    ctx.trials(p.trials, |ctx, _| {
        let inst = instance(ctx, &p.dynamics, &p.state, &p.charge)?;
        let u = inst.rho.cocycle(&inst.phi, &inst.dy)?;
        let ud = ch::frobenius_dual_cocycle(&inst.rho.charge, &u, &inst.rho.conj)?;
        for &t in &TIMES {
            ctx.le("dual_cocycle", "u•(t+s) = u•(t) α_t(u•(s))", cocycle_identity_residual(&ud, t, 0.7), 1e-10);
        }
        let conj = inst.rho.charge.conjugate();
        if conj.is_abelian() {
            let alg = inst.phi.algebra().clone();
            let samples: Vec<Element> = (0..6).map(|_| Element::random(&mut ctx.rng, &alg)).collect();
            ctx.le("dual_covariance", "u• is a covariance cocycle for ρ̄", ch::covariance_residual(&conj, &inst.dy, &ud, &samples), 1e-9);
        }
        // (e^{ict} u)• = e^{−ict} u•
        let mut bare = inst.rho.clone();
        bare.c = 0.0;
        let ud0 = bare.dual_cocycle(&inst.phi, &inst.dy)?;
        for &t in &TIMES {
            let want = ud0.eval(cx(t, 0.0)).scale(cx(0.0, -inst.rho.c * t).exp());
            ctx.le("anti_linear_phase", "(e^{ict}u)• = e^{−ict}u•", ud.eval(cx(t, 0.0)).dist(&want), 1e-12);
        }
        for g in &p.gauges {
            let conj = inst.rho.conj.rescaled(g.value());
            let other = ch::frobenius_dual_cocycle(&inst.rho.charge, &u, &conj)?;
            for &t in &TIMES {
                ctx.le("gauge", "u• independent of the choice of R", other.eval(cx(t, 0.0)).dist(&ud.eval(cx(t, 0.0))), 1e-12);
            }
        }
        if let Some(rates) = &p.expect_diagonal_rates {
            let mut worst: f64 = 0.0;
            for &t in &TIMES {
                let m = ud.eval(cx(t, 0.0)).to_dense();
                for i in 0..m.nrows() {
                    for j in 0..m.ncols() {
                        let want = if i == j { cx(0.0, (rates[i] - inst.rho.c) * t).exp() } else { cx(0.0, 0.0) };
                        worst = worst.max((m[(i, j)] - want).norm());
                    }
                }
            }
            ctx.le("closed_form", "u•(t) = e^{−ict} diag(e^{i r_k t})", worst, 1e-12);
        }
        Ok(())
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeoParams {
    pub dynamics: DynamicsSpec,
    #[serde(default)]
    pub state: Option<StateSpec>,
    pub charge: ChargeSpec,
    #[serde(default)]
    pub expect: Option<f64>,
    /// Other values of the phase `c` that must give the same answer.
    #[serde(default)]
    pub c_sweep: Vec<f64>,
    /// Shifts `(u, u•) → (e^{iδt}u, e^{−iδt}u•)`.
    #[serde(default)]
    pub gauge_sweep: Vec<f64>,
    #[serde(default = "one")]
    pub trials: usize,
}

pub fn geometric_dimension(p: GeoParams, ctx: &mut Ctx) -> Result<()> {
    ctx.trials(p.trials, |ctx, _| {
        let inst = instance(ctx, &p.dynamics, &p.state, &p.charge)?;
        let g = ch::geometric_dimension(&inst.rho, &inst.phi, &inst.dy)?;
        ctx.value_f("d_geo", g.value);
        ctx.value_f("d_u", g.d_u);
        ctx.value_f("d_dual", g.d_dual);
        let d = inst.rho.charge.dimension();
        ctx.le("product_form", "continuation of φ(u(t))φ(u•(t)) = d_geo²", (g.product_form - cx(g.value * g.value, 0.0)).norm(), 1e-9);
        ctx.ge("lower_bound", "d_geo − d(ρ) ≥ 0", g.value - d, -1e-9);
        if let Some(want) = p.expect {
            ctx.le("expected", "√(d_φ(u) d_φ(u•)) = expected", (g.value - want).abs(), 1e-9);
        }
        for &c in &p.c_sweep {
            let mut other = inst.rho.clone();
            other.c = c;
            let gc = ch::geometric_dimension(&other, &inst.phi, &inst.dy)?;
            ctx.le("phase_independence", "d_geo independent of c", (gc.value - g.value).abs(), 1e-10);
        }
        if !p.gauge_sweep.is_empty() {
            let u = inst.rho.cocycle(&inst.phi, &inst.dy)?;
            let ud = ch::frobenius_dual_cocycle(&inst.rho.charge, &u, &inst.rho.conj)?;
            let state = inst.rho.charge.target_state(&inst.phi);
            let beta = inst.dy.beta();
            for &delta in &p.gauge_sweep {
                let a = d_phi(&u.with_phase(delta)?, &state, beta)?;
                let b = d_phi(&ud.with_phase(-delta)?, &state, beta)?;
                ctx.le("gauge_invariance", "(e^{iδt}u, e^{−iδt}u•) gives the same d_geo", ((a * b).sqrt() - g.value).abs(), 1e-10);
            }
        }
        Ok(())
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MuParams {
    pub dynamics: DynamicsSpec,
    #[serde(default)]
    pub state: Option<StateSpec>,
    pub charge: ChargeSpec,
    #[serde(default)]
    pub expect_mu: Option<f64>,
    /// Assert `μ = −c`, the value for charges whose cocycle is inner.
    #[serde(default)]
    pub mu_is_minus_c: bool,
    /// Real `H` and real `v`: the transpose preserves φ and forces `μ = 0`.
    #[serde(default)]
    pub time_reversal: bool,
    #[serde(default = "one")]
    pub trials: usize,
}

pub fn chemical_potential(p: MuParams, ctx: &mut Ctx) -> Result<()> {
    ctx.trials(p.trials, |ctx, _| {
        let inst = instance(ctx, &p.dynamics, &p.state, &p.charge)?;
        let u = inst.rho.cocycle(&inst.phi, &inst.dy)?;
        let m = ch::chemical_potential(&inst.rho.charge, &inst.phi, &inst.dy, &u)?;
        let conj = inst.rho.conjugate();
        let ud = inst.rho.dual_cocycle(&inst.phi, &inst.dy)?;
        let md = ch::chemical_potential(&conj.charge, &inst.phi, &inst.dy, &ud)?;
        if m.flagged || md.flagged {
            ctx.warn("holomorphic dimension had an imaginary part or failed the KMS sample");
        }
        ctx.value_f("mu", m.mu);
        ctx.value_f("mu_conjugate", md.mu);
        ctx.value_f("log_d_phi", m.log_d_phi);
        ctx.le("asymmetry", "μ_ρ̄ + μ_ρ = 0", (m.mu + md.mu).abs(), 1e-10);
        ctx.le("split", "log d_φ(u) = log d(ρ) + βμ", (m.log_d_phi - m.log_d - m.beta * m.mu).abs(), 1e-12);
        if let Some(want) = p.expect_mu {
            ctx.le("expected", "μ = expected", (m.mu - want).abs(), 1e-9);
        }
        if p.mu_is_minus_c {
            ctx.le("phase", "μ = −c", (m.mu + inst.rho.c).abs(), 1e-9);
        }
        if p.time_reversal {
            let alg = inst.phi.algebra().clone();
            let real = |e: &Element| e.blocks().iter().all(|b| b.iter().all(|z| z.im.abs() < 1e-14));
            let v_real = match inst.rho.charge.kind() {
                ChargeKind::Abelian { v } => real(v),
                ChargeKind::Multiplicity { .. } => true,
            };
            ctx.holds("real_data", "H and v are real", real(inst.dy.h()) && v_real);
            let a = Element::random(&mut ctx.rng, &alg);
            let at = a.map_blocks(|_, b| b.transpose());
            ctx.le("transpose_invariance", "φ(aᵀ) = φ(a)", (inst.phi.eval(&at) - inst.phi.eval(&a)).norm(), 1e-12);
            ctx.le("time_reversal", "μ = 0", m.mu.abs(), 1e-9);
        }
        Ok(())
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FreeParams {
    pub dynamics: DynamicsSpec,
    #[serde(default)]
    pub state: Option<StateSpec>,
    #[serde(default)]
    pub charge: Option<ChargeSpec>,
    /// Used instead of the charge's covariance cocycle.
    #[serde(default)]
    pub cocycle: Option<CocycleSpec>,
    #[serde(default)]
    pub expect: Option<f64>,
    #[serde(default = "one")]
    pub trials: usize,
}

pub fn free_energy(p: FreeParams, ctx: &mut Ctx) -> Result<()> {
    ctx.trials(p.trials, |ctx, _| {
        let charge = p.charge.clone().unwrap_or(ChargeSpec::Identity { c: 0.0 });
        let inst = instance(ctx, &p.dynamics, &p.state, &charge)?;
        let u = match &p.cocycle {
            Some(c) => c.build(ctx, &inst.dy, &inst.phi)?,
            None => inst.rho.cocycle(&inst.phi, &inst.dy)?,
        };
        let f = ch::free_energy(&inst.rho.charge, &inst.phi, &inst.dy, &u)?;
        ctx.value_f("gns", f.gns);
        ctx.value_f("cocycle", f.cocycle);
        ctx.value_f("entropy", f.entropy);
        ctx.le("gns_vs_cocycle", "−β⁻¹log⟨e^{−βH_ρ}ξ,ξ⟩ = −β⁻¹log d_φ(u)", (f.gns - f.cocycle).abs(), 1e-8);
        ctx.le("gns_vs_entropy", "−β⁻¹log⟨e^{−βH_ρ}ξ,ξ⟩ = φ_ρ(H_ρ) − β⁻¹S", (f.gns - f.entropy).abs(), 1e-8);
        ctx.le("cocycle_vs_entropy", "−β⁻¹log d_φ(u) = φ_ρ(H_ρ) − β⁻¹S", (f.cocycle - f.entropy).abs(), 1e-8);
        if let Some(want) = p.expect {
            ctx.le("expected", "F = expected", (f.cocycle - want).abs(), 1e-10);
        }
        Ok(())
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CondParams {
    pub dynamics: DynamicsSpec,
    #[serde(default)]
    pub state: Option<StateSpec>,
    pub charge: ChargeSpec,
    #[serde(default)]
    pub expect: Option<f64>,
    /// Check `−β(F(φ|φ_ρ) + F(φ|φ_ρ̄)) = S_c(ρ)`.
    #[serde(default)]
    pub free_energy_identity: bool,
    #[serde(default = "one")]
    pub trials: usize,
}

pub fn conditional_entropy(p: CondParams, ctx: &mut Ctx) -> Result<()> {
    ctx.trials(p.trials, |ctx, _| {
        let inst = instance(ctx, &p.dynamics, &p.state, &p.charge)?;
        let s = ch::conditional_entropy(&inst.rho.charge);
        ctx.value_f("value", s);
        ctx.ge("nonnegative", "S_c(ρ) ≥ 0", s, 0.0);
        if let Some(want) = p.expect {
            ctx.le("expected", "S_c(ρ) = log d(ρ)² = expected", (s - want).abs(), 1e-12);
        }
        if p.free_energy_identity {
            let beta = inst.dy.beta();
            let u = inst.rho.cocycle(&inst.phi, &inst.dy)?;
            let ud = inst.rho.dual_cocycle(&inst.phi, &inst.dy)?;
            let f = ch::free_energy(&inst.rho.charge, &inst.phi, &inst.dy, &u)?;
            let fd = ch::free_energy(&inst.rho.charge.conjugate(), &inst.phi, &inst.dy, &ud)?;
            let lhs = -beta * (f.gns + fd.gns);
            ctx.value_f("free_energy_sum", lhs);
            ctx.le("free_energy_identity", "−β(F(φ|φ_ρ) + F(φ|φ_ρ̄)) = S_c(ρ)", (lhs - s).abs(), 1e-8);
        }
        Ok(())
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HorizonParams {
    pub h: ElementSpec,
    pub kappa: f64,
    pub rho: ChargeSpec,
    pub sigma: ChargeSpec,
    #[serde(default)]
    pub expect_log_ratio: Option<f64>,
    #[serde(default = "one")]
    pub trials: usize,
}

pub fn black_hole_identity(p: HorizonParams, ctx: &mut Ctx) -> Result<()> {
    ctx.trials(p.trials, |ctx, _| {
        let h = p.h.build(ctx)?;
        let sc = BlackHoleScenario::new(&h, p.kappa)?;
        let alg = sc.phi.algebra().clone();
        let rho = p.rho.build(ctx, &alg, &sc.phi)?;
        let sigma = p.sigma.build(ctx, &alg, &sc.phi)?;
        let rep = ch::black_hole_identity(&sc, &rho, &sigma)?;
        ctx.value_f("beta", rep.beta);
        ctx.value_f("lhs", rep.lhs);
        ctx.value_f("rhs", rep.rhs);
        ctx.value_f("f_rho_sigma", rep.f_rho_sigma);
        if let Some(f) = rep.f_rho_sigma_relative {
            ctx.value_f("f_rho_sigma_relative", f);
            ctx.le("relative_cocycle", "F(φ_ρ|φ_σ) from u_{ρσ̄} = from u_ρ, u_σ", rep.relative_residual, 1e-9);
        }
        ctx.le("hawking", "βκ = 2π", (rep.beta * p.kappa - 2.0 * std::f64::consts::PI).abs(), 1e-12);
        ctx.le("identity", "log d(ρ) − log d(σ) = (π/κ)(F(φ_ρ|φ_σ) + F(φ_ρ̄|φ_σ̄))", rep.residual, 1e-9);
        ctx.le("incremental", "F(φ_σ|φ_ρ) = ½β⁻¹(S_c(σ) − S_c(ρ)) + μ(φ_σ|φ_ρ)", rep.ife_residual, 1e-9);
        if let Some(want) = p.expect_log_ratio {
            ctx.le("expected", "log d(ρ) − log d(σ) = expected", (rep.rhs - want).abs(), 1e-12);
        }
        Ok(())
    })
}
