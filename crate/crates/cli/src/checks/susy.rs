use std::collections::BTreeMap;
use std::sync::Arc;

use anyhow::{bail, Result};
use modindex::charge::{Charge, CovariantCharge};
use modindex::linalg::{self, CMat};
use modindex::qsys::{gibbs_state, Dynamics};
use modindex::susy::{self as su, EntireCochain, GradedSystem, JloMethod, Multilinear, SuperKms};
use modindex::Complex64;
use rand::Rng;
use serde::Deserialize;

use super::{one, Expect};
use crate::build::{ChargeSpec, ElementSpec, GradedSpec, MatrixSpec};
use crate::run::Ctx;

fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn default_betas() -> Vec<f64> {
    vec![0.1, 0.5, 1.0, 2.0, 10.0]
}

fn half() -> f64 {
    0.5
}

fn random_odd(ctx: &mut Ctx, sys: &GradedSystem, scale: f64) -> CMat {
    sys.odd_part(&linalg::random_hermitian(&mut ctx.rng, sys.dim())) * cx(scale, 0.0)
}

fn random_even(ctx: &mut Ctx, sys: &GradedSystem, scale: f64) -> CMat {
    sys.even_part(&linalg::random_hermitian(&mut ctx.rng, sys.dim())) * cx(scale, 0.0)
}

/// `Tr(Γ e^{−βK})` through the matrix exponential, independent of the
/// spectral code in the library.
fn supertrace_expm(gamma: &[i8], k: &CMat, beta: f64) -> f64 {
    let e = (k * cx(-beta, 0.0)).exp();
    (0..gamma.len()).map(|i| gamma[i] as f64 * e[(i, i)].re).sum()
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WittenParams {
    pub system: GradedSpec,
    #[serde(default = "default_betas")]
    pub betas: Vec<f64>,
    #[serde(default = "one")]
    pub trials: usize,
    #[serde(default)]
    pub expect_index: Option<i64>,
}

pub fn witten_index(p: WittenParams, ctx: &mut Ctx) -> Result<()> {
    ctx.trials(p.trials, |ctx, _| {
        let sys = p.system.build(ctx)?;
        let mut values = Vec::new();
        let mut rank = 0;
        for &beta in &p.betas {
            let w = su::witten_index(&sys, beta)?;
            ctx.le("integer", "|Tr_s e^{−βH} − round| = 0", (w.supertrace - w.supertrace.round()).abs(), 1e-9);
            ctx.le("rank_nullity", "Tr_s e^{−βH} = dim ker Q_+ − dim ker Q_+*", w.residual(), 1e-9);
            values.push(w.supertrace);
            rank = w.rank_index;
        }
        let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        ctx.le("temperature_independent", "Tr_s e^{−βH} constant in β", hi - lo, 1e-9);
        // independent count: p − q is the index since ker Q_+ and coker Q_+ differ by it
        ctx.eq("dimension_count", "ind = dim H_+ − dim H_−", rank as f64, sys.even_dim() as f64 - sys.odd_dim() as f64);
        ctx.value("index", rank);
        ctx.value("dim", sys.dim());
        if let Some(want) = p.expect_index {
            ctx.eq("expected", "ind = expected", rank as f64, want as f64);
        }
        Ok(())
    })
}

#[derive(Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PerturbationSpec {
    /// Random even Hermitian `P` of the given size.
    Even { #[serde(default = "half")] scale: f64 },
    /// `P = δq + q²` for a random odd `q`, so that `H + P = (Q+q)²`.
    Supersymmetric { #[serde(default = "half")] scale: f64 },
    Explicit(MatrixSpec),
}

fn single_beta() -> Vec<f64> {
    vec![1.0]
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelIndexParams {
    pub system: GradedSpec,
    pub perturbation: PerturbationSpec,
    #[serde(default = "single_beta")]
    pub betas: Vec<f64>,
    #[serde(default = "one")]
    pub trials: usize,
}

pub fn relative_index(p: RelIndexParams, ctx: &mut Ctx) -> Result<()> {
    ctx.trials(p.trials, |ctx, _| {
        let sys = p.system.build(ctx)?;
        let (pert, susy) = match &p.perturbation {
            PerturbationSpec::Even { scale } => (random_even(ctx, &sys, *scale), false),
            PerturbationSpec::Supersymmetric { scale } => {
                let q = random_odd(ctx, &sys, *scale);
                (sys.delta(&q) + &q * &q, true)
            }
            PerturbationSpec::Explicit(m) => (m.build(ctx)?, false),
        };
        let h0 = sys.h();
        for &beta in &p.betas {
            let ri = su::relative_index(&sys, &pert, beta)?;
            if ri.degenerate {
                ctx.warn("reference supertrace vanishes; both sides compared unnormalized");
            }
            ctx.value_c("continued", ri.continued);
            ctx.le("two_sided", "ω_s(u_P(iβ)) = Tr_s e^{−β(H₀+P)} / Tr_s e^{−βH₀}", ri.residual, 1e-10);
            let num = supertrace_expm(sys.grading(), &(&h0 + &pert), beta);
            let den = supertrace_expm(sys.grading(), &h0, beta);
            let oracle = if ri.degenerate { num } else { num / den };
            ctx.le("oracle", "ratio against the matrix exponential", (ri.ratio - cx(oracle, 0.0)).norm() / (1.0 + oracle.abs()), 1e-10);
            if susy {
                ctx.le("supersymmetric", "ratio = 1 for H₀ + P = (Q+q)²", (ri.ratio - cx(1.0, 0.0)).norm(), 1e-9);
            }
        }
        Ok(())
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignParams {
    pub gamma: ElementSpec,
    pub h: ElementSpec,
    pub beta: f64,
    pub charge: ChargeSpec,
    pub expect_sign: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReduceParams {
    #[serde(default)]
    pub system: Option<GradedSpec>,
    #[serde(default = "unit_beta")]
    pub beta: f64,
    #[serde(default = "one")]
    pub trials: usize,
    /// `d_φ(u_ρ) = ±d_ω(u_ρ)` for a charge with `ρ(Γ) = ±Γ`.
    #[serde(default)]
    pub sign: Option<SignParams>,
}

fn unit_beta() -> f64 {
    1.0
}

pub fn graded_kms_reduce(p: ReduceParams, ctx: &mut Ctx) -> Result<()> {
    if p.system.is_none() && p.sign.is_none() {
        bail!("give `system`, `sign` or both");
    }
    ctx.trials(p.trials, |ctx, _| {
        if let Some(spec) = &p.system {
            let sys = spec.build(ctx)?;
            let phi = SuperKms::new(&sys, p.beta)?;
            let seed: u64 = ctx.rng.random();
            let red = su::graded_kms_reduce(&phi, seed)?;
            ctx.le("reduction", "φ = c·ω(Γ·)", red.residual, 1e-12);
            ctx.le("graded_kms", "φ(a α_{t+iβ}(b)) = φ(α_t(γb) a)", red.graded_kms_residual, 1e-9);
            ctx.le("derivation", "φ(δa) = 0", red.derivation_residual, 1e-9);
            ctx.le("omega_normalized", "ω(1) = 1", (red.omega.weight() - 1.0).abs(), 1e-12);
        }
        if let Some(s) = &p.sign {
            let gamma = s.gamma.build(ctx)?;
            let h = s.h.build(ctx)?;
            let omega = gibbs_state(&h, s.beta)?;
            let dy = Dynamics::new(h, s.beta)?;
            let rho = s.charge.build(ctx, gamma.algebra(), &omega)?;
            let r = su::charge_sign(&gamma, &omega, &dy, &rho)?;
            ctx.value_f("sign", r.sign);
            ctx.value_c("d_phi", r.d_phi);
            ctx.value_c("d_omega", r.d_omega);
            ctx.eq("sign", "ρ(Γ) = ±Γ with the expected sign", r.sign, s.expect_sign);
            ctx.le("sign_law", "d_φ(u) = ±d_ω(u)", r.residual, 1e-10);
        }
        Ok(())
    })
}

fn default_times() -> Vec<f64> {
    (0..10).map(|k| -1.0 + 0.3 * k as f64).collect()
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PertParams {
    pub system: GradedSpec,
    #[serde(default = "half")]
    pub q_scale: f64,
    #[serde(default = "default_times")]
    pub times: Vec<f64>,
    #[serde(default = "one")]
    pub trials: usize,
}

pub fn perturbation_cocycle(p: PertParams, ctx: &mut Ctx) -> Result<()> {
    ctx.trials(p.trials, |ctx, _| {
        let sys = p.system.build(ctx)?;
        let q = random_odd(ctx, &sys, p.q_scale);
        let u = su::perturbation_cocycle(&sys, &q)?;
        for &t in &p.times {
            ctx.le("unitary", "u(t)*u(t) = 1", u.unitarity_defect(t), 1e-12);
        }
        ctx.le("ode", "−i u′(t) = u(t) α_t(δq + q²)", su::perturbation_ode_residual(&sys, &q, &p.times)?, 1e-8);
        let phi = SuperKms::new(&sys, 1.0)?;
        let continued = phi.eval(u.eval(cx(0.0, 1.0)).matrix());
        let qq = sys.q() + &q;
        let z = (sys.h() * cx(-1.0, 0.0)).exp().trace().re;
        let want = supertrace_expm(sys.grading(), &(&qq * &qq), 1.0) / z;
        ctx.le("continuation", "φ(u(i)) = Tr(Γe^{−(Q+q)²})/Tr e^{−Q²}", (continued - cx(want, 0.0)).norm(), 1e-10);
        let phq = su::perturbed_functional(&phi, &q)?;
        ctx.le("perturbed_functional", "φ^q(1) = φ(u(i))", (phq.eval(&linalg::eye(sys.dim())) - continued).norm(), 1e-10);
        let series = su::jlo_index_series(&phq, 2)?;
        ctx.le("index_series", "Σ(−1)^k (2k)!/k! τ^q_{2k}(1,…,1) = φ(1)", (series - phi.eval(&linalg::eye(sys.dim()))).norm(), 1e-9);
        Ok(())
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeformParams {
    pub system: GradedSpec,
    #[serde(default = "deform_scale")]
    pub scale: f64,
    #[serde(default = "one")]
    pub trials: usize,
    /// `fails` deforms by even operators and asks for a witness.
    #[serde(default)]
    pub expect: Expect,
    #[serde(default = "witness")]
    pub min_violation: f64,
}

fn deform_scale() -> f64 {
    0.8
}

fn witness() -> f64 {
    1e-3
}

pub fn deformation_invariance(p: DeformParams, ctx: &mut Ctx) -> Result<()> {
    let mut worst: f64 = 0.0;
    ctx.trials(p.trials, |ctx, _| {
        let sys = p.system.build(ctx)?;
        let q = match p.expect {
            Expect::Holds => random_odd(ctx, &sys, p.scale),
            Expect::Fails => random_even(ctx, &sys, p.scale),
        };
        let rep = su::deformation_invariance(&sys, &q)?;
        let diff = (rep.perturbed - rep.reference).abs();
        worst = worst.max(diff);
        if p.expect == Expect::Holds {
            ctx.le("invariance", "|Tr(Γe^{−(Q+q)²}) − Tr(Γe^{−Q²})| = 0", diff, 1e-9);
            let rank = su::witten_index(&sys.perturbed(&q)?, 1.0)?.rank_index;
            ctx.le("rank_index", "Tr(Γe^{−(Q+q)²}) = ind(Q+q)", (rep.perturbed - rank as f64).abs(), 1e-8);
        }
        Ok(())
    })?;
    ctx.value_f("worst_difference", worst);
    if p.expect == Expect::Fails {
        ctx.ge("witness", "an even deformation moves the supertrace", worst, p.min_violation);
    }
    Ok(())
}

fn three() -> usize {
    3
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JloParams {
    pub system: GradedSpec,
    #[serde(default = "three")]
    pub samples: usize,
    /// Compare the eigenbasis sum with simplex quadrature.
    #[serde(default = "yes")]
    pub quadrature: bool,
    #[serde(default = "one")]
    pub trials: usize,
}

fn yes() -> bool {
    true
}

fn random_args(ctx: &mut Ctx, n: usize, k: usize) -> Vec<CMat> {
    (0..k).map(|_| linalg::random_complex(&mut ctx.rng, n, n)).collect()
}

pub fn jlo_eval(p: JloParams, ctx: &mut Ctx) -> Result<()> {
    ctx.trials(p.trials, |ctx, _| {
        let sys = p.system.build(ctx)?;
        let n = sys.dim();
        let phi = SuperKms::new(&sys, 1.0)?;
        let one = linalg::eye(n);
        let tau = su::jlo_cochain(&phi, 4);
        let t0 = tau.eval(0, &[one.clone()])?;
        ctx.value_c("tau0", t0);
        ctx.le("tau0", "τ_0(1) = φ(1)", (t0 - phi.eval(&one)).norm(), 1e-12);
        // odd components vanish identically for an even cochain
        ctx.le("tau1", "τ_1(1, 1) = 0", tau.eval(1, &[one.clone(), one.clone()])?.norm(), 1e-13);
        ctx.le("tau2", "τ_2(1, 1, 1) = 0", tau.eval(2, &vec![one.clone(); 3])?.norm(), 1e-12);
        let index = su::witten_index(&sys, 1.0)?.rank_index;
        ctx.le("index", "φ(1)·Tr e^{−H} = ind Q_+", (t0.re * phi.norm() - index as f64).abs(), 1e-9);
        let series = su::jlo_index_series(&phi, 2)?;
        ctx.le("index_series", "Σ(−1)^k (2k)!/k! τ_{2k}(1,…,1) = τ_0(1)", (series - t0).norm(), 1e-12);
        for _ in 0..p.samples {
            for deg in 0..=3 {
                let args = random_args(ctx, n, deg + 1);
                let v = su::coboundary(&tau, deg, &args)?;
                ctx.le("closed", "(b + B)τ = 0", v.norm(), 1e-5);
            }
        }
        if p.quadrature {
            for deg in [0usize, 2, 4] {
                let args = random_args(ctx, n, deg + 1);
                let ex = su::jlo_eval(&phi, &args, JloMethod::Exact)?;
                let qu = su::jlo_eval(&phi, &args, JloMethod::Quadrature)?;
                ctx.holds("quadrature_converged", "simplex quadrature converged", qu.converged);
                ctx.le("exact_vs_quadrature", "eigenbasis sum = simplex quadrature", (ex.value - qu.value).norm() / (1.0 + ex.value.norm()), 1e-6);
            }
        }
        Ok(())
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JloChargedParams {
    pub system: GradedSpec,
    /// Even unitary; a random block-diagonal one when absent.
    #[serde(default)]
    pub v: Option<MatrixSpec>,
    #[serde(default)]
    pub c: Option<f64>,
    #[serde(default = "one")]
    pub trials: usize,
}

fn block_unitary(ctx: &mut Ctx, p: usize, q: usize) -> CMat {
    let mut v = CMat::zeros(p + q, p + q);
    v.view_mut((0, 0), (p, p)).copy_from(&linalg::random_unitary(&mut ctx.rng, p));
    v.view_mut((p, p), (q, q)).copy_from(&linalg::random_unitary(&mut ctx.rng, q));
    v
}

pub fn jlo_charged(p: JloChargedParams, ctx: &mut Ctx) -> Result<()> {
    ctx.trials(p.trials, |ctx, _| {
        let sys = p.system.build(ctx)?;
        let n = sys.dim();
        let phi = SuperKms::new(&sys, 1.0)?;
        let v = match &p.v {
            Some(m) => m.build(ctx)?,
            None => {
                // the random systems put the even sector first
                if sys.grading().windows(2).any(|w| w[0] < w[1]) {
                    bail!("a random charge needs the even sector first; give `v`");
                }
                block_unitary(ctx, sys.even_dim(), sys.odd_dim())
            }
        };
        let c = match p.c {
            Some(c) => c,
            None => ctx.rng.random_range(-1.0..1.0),
        };
        let rho = CovariantCharge::new(Charge::abelian(&modindex::qsys::Element::from_matrix(v))?, c);
        let one = linalg::eye(n);
        let deg0 = su::jlo_charged(&phi, &rho, std::slice::from_ref(&one))?;
        ctx.le("degree_zero", "τ^ρ_0(1) = e^{−c} φ(1)", (deg0.value - phi.eval(&one) * (-c).exp()).norm(), 1e-10);
        ctx.le("dimension", "d_φ(u_ρ) = e^{−c}", (deg0.dimension - cx((-c).exp(), 0.0)).norm(), 1e-10);
        let args = random_args(ctx, n, 3);
        let rep = su::jlo_charged(&phi, &rho, &args)?;
        ctx.value_f("quadrature_error", rep.quadrature_error);
        ctx.holds("converged", "simplex quadrature converged", rep.converged);
        ctx.le("factorization", "τ^ρ_2 = d_φ(u_ρ) τ_2(ρ⁻¹(·))", rep.residual, 1e-5);
        Ok(())
    })
}

fn default_degrees() -> Vec<usize> {
    vec![0, 1, 2, 3, 4]
}

fn cap4() -> usize {
    4
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoboundaryParams {
    pub gamma: Vec<i8>,
    #[serde(default = "default_degrees")]
    pub degrees: Vec<usize>,
    #[serde(default = "cap4")]
    pub cap: usize,
    /// Average over the grading so that `f(a^γ) = f(a)`.
    #[serde(default = "yes")]
    pub invariant: bool,
    #[serde(default = "three")]
    pub samples: usize,
}

fn derived(f: &EntireCochain, cap: usize, degrees: impl Iterator<Item = usize>, g: fn(&EntireCochain, usize, &[CMat]) -> modindex::Result<Complex64>, shift: isize) -> EntireCochain {
    let base = Arc::new(f.clone());
    let mut components: BTreeMap<usize, Multilinear> = BTreeMap::new();
    for n in degrees {
        let b = base.clone();
        let m = (n as isize + shift) as usize;
        components.insert(n, Arc::new(move |args: &[CMat]| g(&b, m, args).unwrap_or(cx(f64::NAN, f64::NAN))));
    }
    EntireCochain { gamma: f.gamma.clone(), cap, components }
}

pub fn coboundary(p: CoboundaryParams, ctx: &mut Ctx) -> Result<()> {
    if p.gamma.iter().any(|&g| g != 1 && g != -1) {
        bail!("`gamma` entries must be ±1");
    }
    if p.cap < 3 {
        bail!("`cap` must be at least 3");
    }
    let d = p.gamma.len();
    let seed: u64 = ctx.rng.random();
    let f = su::random_cochain(&p.gamma, &p.degrees, p.cap, p.invariant, seed);
    // (bf)_n = b(f_{n−1}) and (Bf)_n = B(f_{n+1})
    let bf = derived(&f, p.cap + 1, 1..=p.cap + 1, su::hochschild_b, -1);
    let big_b = derived(&f, p.cap.saturating_sub(1), 0..p.cap, su::connes_b, 1);
    let df = su::coboundary_cochain(&f)?;
    let ddf = su::coboundary_cochain(&df)?;
    for _ in 0..p.samples {
        for m in 1..=2 {
            let args = random_args(ctx, d, m + 2);
            ctx.le("b_squared", "b² = 0", su::hochschild_b(&bf, m, &args)?.norm(), 1e-9);
        }
        for m in 1..=2.min(p.cap - 1) {
            let args = random_args(ctx, d, m);
            ctx.le("big_b_squared", "B² = 0", su::connes_b(&big_b, m, &args)?.norm(), 1e-9);
        }
        for m in 0..=ddf.cap {
            let args = random_args(ctx, d, m + 1);
            ctx.le("boundary_squared", "(b + B)² = 0", ddf.eval(m, &args)?.norm(), 1e-9);
        }
    }
    Ok(())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectorParams {
    pub system: GradedSpec,
    pub multiplicities: Vec<usize>,
}

pub fn sector_supercharge(p: SectorParams, ctx: &mut Ctx) -> Result<()> {
    let sys = p.system.build(ctx)?;
    let mut indices = Vec::new();
    for &d in &p.multiplicities {
        let rep = su::sector_supercharge(&sys, d)?;
        ctx.eq("sector_index", "ind Q_ρ = d · ind Q", rep.sector_index as f64, (d as i64 * rep.base_index) as f64);
        ctx.le("square", "Q_ρ² = H ⊗ 1_d", rep.square_residual, 1e-12);
        let st = su::witten_index(&rep.system, 1.0)?.supertrace;
        ctx.le("supertrace", "Tr_s e^{−H_ρ} = ind Q_ρ", (st - rep.sector_index as f64).abs(), 1e-9);
        indices.push((d, rep.sector_index, rep.base_index));
    }
    if let Some(&(d0, i0, base)) = indices.first() {
        ctx.value("base_index", base);
        if base != 0 {
            for &(d, i, _) in &indices[1..] {
                // exact rational comparison i/i0 = d/d0
                ctx.holds("ratio", "ind Q_ρ / ind Q_σ = d(ρ)/d(σ)", i * d0 as i64 == i0 * d as i64);
            }
        }
    }
    ctx.value("sector_indices", indices.iter().map(|t| t.1).collect::<Vec<_>>());
    Ok(())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorParams {
    pub a: GradedSpec,
    pub b: GradedSpec,
    #[serde(default = "yes")]
    pub permuted: bool,
    #[serde(default = "one")]
    pub trials: usize,
}

pub fn tensor_supercharge(p: TensorParams, ctx: &mut Ctx) -> Result<()> {
    ctx.trials(p.trials, |ctx, _| {
        let a = p.a.build(ctx)?;
        let b = p.b.build(ctx)?;
        let ia = su::witten_index(&a, 1.0)?.rank_index;
        let ib = su::witten_index(&b, 1.0)?.rank_index;
        let mut reps = vec![su::tensor_supercharge(&a, &b)?];
        if p.permuted {
            reps.push(su::tensor_supercharge_permuted(&a, &b)?);
        }
        for rep in reps {
            ctx.le("odd", "Γ̃Q̃ + Q̃Γ̃ = 0", rep.odd_residual, 1e-12);
            ctx.le("square", "Q̃² = H_A ⊗ 1 + 1 ⊗ H_B", rep.square_residual, 1e-12);
            ctx.le("index_product", "Tr_s e^{−βH̃} = Tr_s e^{−βH_A} Tr_s e^{−βH_B}", rep.index_product_residual, 1e-10);
            let it = su::witten_index(&rep.system, 1.0)?.rank_index;
            ctx.eq("rank_product", "ind Q̃ = ind Q_A · ind Q_B", it as f64, (ia * ib) as f64);
        }
        Ok(())
    })
}
