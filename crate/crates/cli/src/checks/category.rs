use anyhow::{bail, Result};
use modindex::category::{self as cat, FusionRing, RepObject};
use modindex::linalg::{self, CMat};
use modindex::Complex64;
use rand::Rng;
use serde::Deserialize;

use super::ten;
use crate::build::{GroupSpec, LabelSpec, MatrixSpec, RepSpec, RingSpec, Scalar};
use crate::run::Ctx;

fn labels(ring: &FusionRing, given: &Option<Vec<LabelSpec>>) -> Result<Vec<usize>> {
    match given {
        Some(ls) => ls.iter().map(|l| l.resolve(ring)).collect(),
        None => Ok((0..ring.rank()).collect()),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PfParams {
    pub ring: RingSpec,
    #[serde(default)]
    pub labels: Option<Vec<LabelSpec>>,
    /// Expected dimensions of `labels`, in order.
    #[serde(default)]
    pub expect: Option<Vec<f64>>,
    /// Candidate dimension functions that must be rejected.
    #[serde(default)]
    pub reject: Vec<Vec<f64>>,
}

pub fn pf_dimension(p: PfParams, ctx: &mut Ctx) -> Result<()> {
    let ring = p.ring.build()?;
    let ls = labels(&ring, &p.labels)?;
    let dims = cat::dimension_vector(&ring);
    let mut got = Vec::new();
    for &i in &ls {
        let d = cat::pf_dimension(&ring, i)?;
        ctx.value_f(&format!("d[{}]", ring.labels()[i]), d);
        ctx.ge("at_least_one", "d_i ≥ 1", d, 1.0 - 1e-12);
        got.push(d);
    }
    ctx.holds("positive", "d_i > 0 for all i", dims.iter().all(|&x| x > 0.0));
    ctx.le("homomorphism", "d_i d_j = Σ_k N^k_ij d_k", cat::homomorphism_residual(&ring, &dims), 1e-12);
    let conj = (0..ring.rank()).map(|i| (dims[i] - dims[ring.dual(i)]).abs()).fold(0.0, f64::max);
    ctx.le("conjugation", "d_ī = d_i", conj, 1e-12);
    if let Some(want) = &p.expect {
        if want.len() != got.len() {
            bail!("`expect` has {} entries for {} labels", want.len(), got.len());
        }
        let err = got.iter().zip(want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        ctx.le("expected", "d_i = expected", err, 1e-12);
    }
    for cand in &p.reject {
        let r = cat::check_dimension_function(&ring, cand, 1e-9)?;
        ctx.holds("rejects_other", "no other positive character is accepted", !r.accepted);
    }
    let total: f64 = dims.iter().map(|d| d * d).sum();
    ctx.value_f("global_dimension", total);
    Ok(())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmenParams {
    pub ring: RingSpec,
    #[serde(default)]
    pub labels: Option<Vec<LabelSpec>>,
}

pub fn amenability_check(p: AmenParams, ctx: &mut Ctx) -> Result<()> {
    let ring = p.ring.build()?;
    for i in labels(&ring, &p.labels)? {
        ctx.le("amenable", "d_i = ‖N_i‖", cat::amenability_check(&ring, i)?, 1e-12);
    }
    Ok(())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepRingParams {
    pub group: GroupSpec,
    /// Degrees of the irreducible characters, in any order.
    #[serde(default)]
    pub expect_dims: Option<Vec<usize>>,
}

pub fn rep_fusion_ring(p: RepRingParams, ctx: &mut Ctx) -> Result<()> {
    let g = p.group.build()?;
    let ct = cat::character_table(&g)?;
    let ring = cat::rep_fusion_ring_from(&ct)?;
    let mut degrees = ct.dims();
    ctx.value("rank", ring.rank());
    ctx.value("order", g.order());
    ctx.le("orthogonality", "⟨χ_i, χ_j⟩ = δ_ij", ct.orthogonality_residual(), 1e-10);
    let sq: usize = degrees.iter().map(|d| d * d).sum();
    ctx.eq("burnside", "Σ d_i² = |G|", sq as f64, g.order() as f64);
    let r = ring.rank();
    let mut reciprocity: u32 = 0;
    for i in 0..r {
        for j in 0..r {
            for k in 0..r {
                reciprocity = reciprocity.max(ring.n(i, j, k).abs_diff(ring.n(ring.dual(i), k, j)));
            }
        }
    }
    ctx.eq("reciprocity", "N^k_ij = N^j_īk", reciprocity as f64, 0.0);
    let pf = cat::dimension_vector(&ring);
    let gap = pf.iter().zip(&degrees).map(|(a, &b)| (a - b as f64).abs()).fold(0.0, f64::max);
    ctx.le("pf_is_degree", "PF dimension = character degree", gap, 1e-10);
    degrees.sort();
    ctx.value("degrees", degrees.clone());
    if let Some(want) = &p.expect_dims {
        let mut want = want.clone();
        want.sort();
        ctx.holds("expected", "degrees = expected", want == degrees);
    }
    Ok(())
}

fn rep_pair(a: &RepSpec, b: &RepSpec) -> Result<(RepObject, RepObject)> {
    let a = a.build()?;
    let b = b.build()?;
    if a.group().table() != b.group().table() {
        bail!("representations of different groups");
    }
    let b = RepObject::new(a.group().clone(), b.matrices().to_vec())?;
    Ok((a, b))
}

fn random_combination(ctx: &mut Ctx, basis: &[CMat]) -> CMat {
    let mut t = basis[0].clone() * Complex64::new(0.0, 0.0);
    for b in basis {
        t += b * Complex64::new(ctx.rng.random_range(-1.0..1.0), ctx.rng.random_range(-1.0..1.0));
    }
    t
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConjParams {
    pub rep: RepSpec,
    /// Rescalings `R → λR, R̄ → λ̄⁻¹R̄`.
    #[serde(default)]
    pub gauges: Vec<Scalar>,
    #[serde(default)]
    pub expect_dimension: Option<f64>,
}

pub fn solve_conjugate(p: ConjParams, ctx: &mut Ctx) -> Result<()> {
    let rho = p.rep.build()?;
    let sol = cat::solve_conjugate(&rho)?;
    let (a, b) = sol.residuals();
    ctx.le("conjugate_equations", "(R*⊗1)(1⊗R̄) = 1 = (R̄*⊗1)(1⊗R)", a.max(b), 1e-12);
    ctx.le("intertwining", "R ∈ (ι, ρ̄ρ), R̄ ∈ (ι, ρρ̄)", sol.invariance_residual(), 1e-12);
    let space = cat::conjugate_solution_space_dim(&rho);
    ctx.value("solution_space_dim", space);
    ctx.value("irreducible", sol.irreducible);
    if sol.irreducible {
        ctx.eq("unique_up_to_scalar", "dim (ι, ρ̄ρ) = 1", space as f64, 1.0);
    }
    let d = cat::intrinsic_dimension(&sol);
    ctx.value_f("intrinsic_dimension", d.value);
    if !d.exact {
        ctx.warn("reducible object: ‖R‖‖R̄‖ is an upper bound for the intrinsic dimension");
    }
    if let Some(want) = p.expect_dimension {
        ctx.le("expected", "‖R‖‖R̄‖ = expected", (d.value - want).abs(), 1e-12);
    }
    for g in &p.gauges {
        let other = sol.rescaled(g.value());
        let (a, b) = other.residuals();
        ctx.le("gauge_equations", "rescaled pair solves the conjugate equations", a.max(b), 1e-12);
        ctx.le("gauge_dimension", "‖λR‖‖λ̄⁻¹R̄‖ = ‖R‖‖R̄‖", (cat::intrinsic_dimension(&other).value - d.value).abs(), 1e-12);
    }
    Ok(())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntrinsicParams {
    /// Irreducible summands.
    pub parts: Vec<RepSpec>,
    #[serde(default)]
    pub gauges: Vec<Scalar>,
    #[serde(default)]
    pub expect: Option<f64>,
}

pub fn intrinsic_dimension(p: IntrinsicParams, ctx: &mut Ctx) -> Result<()> {
    let Some(first) = p.parts.first() else { bail!("`parts` is empty") };
    let mut reps = Vec::new();
    for part in &p.parts {
        reps.push(rep_pair(first, part)?.1);
    }
    let sols = reps.iter().map(cat::solve_conjugate).collect::<modindex::Result<Vec<_>>>()?;
    for s in &sols {
        ctx.holds("irreducible_parts", "each summand is irreducible", s.irreducible);
    }
    let total = cat::intrinsic_dimension_decomposed(&sols)?;
    let mut sum = reps[0].clone();
    for r in &reps[1..] {
        sum = sum.direct_sum(r);
    }
    ctx.value_f("value", total);
    ctx.le("additivity", "d(⊕ρ_k) = Σ d(ρ_k)", (total - sum.dim() as f64).abs(), 1e-12);
    let naive = cat::intrinsic_dimension(&cat::solve_conjugate(&sum)?);
    ctx.ge("upper_bound", "‖R‖‖R̄‖ − d ≥ 0 on the sum", naive.value - total, -1e-12);
    for g in &p.gauges {
        let gauged: Vec<_> = sols.iter().map(|s| s.rescaled(g.value())).collect();
        let v = cat::intrinsic_dimension_decomposed(&gauged)?;
        ctx.le("gauge_invariance", "d unchanged by R → λR, R̄ → λ̄⁻¹R̄", (v - total).abs(), 1e-12);
    }
    if let Some(want) = p.expect {
        ctx.le("expected", "d = expected", (total - want).abs(), 1e-12);
    }
    Ok(())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrobParams {
    pub rho1: RepSpec,
    #[serde(default)]
    pub rho2: Option<RepSpec>,
    #[serde(default = "ten")]
    pub samples: usize,
}

pub fn frobenius_map(p: FrobParams, ctx: &mut Ctx) -> Result<()> {
    let (rho1, rho2) = rep_pair(&p.rho1, p.rho2.as_ref().unwrap_or(&p.rho1))?;
    let s1 = cat::solve_conjugate(&rho1)?;
    let s2 = cat::solve_conjugate(&rho2)?;
    let sb1 = cat::solve_conjugate(&rho1.conjugate())?;
    let sb2 = cat::solve_conjugate(&rho2.conjugate())?;
    let basis = cat::intertwiner_basis(&rho1, &rho2);
    ctx.value("intertwiner_space_dim", basis.len());
    if basis.is_empty() {
        bail!("no intertwiners between the two representations");
    }
    let id = linalg::eye(rho1.dim());
    let idb = cat::frobenius_map(&id, &s1, &s1)?;
    ctx.le("unit", "1• = 1", linalg::op_norm(&(idb - &id)), 1e-12);
    for _ in 0..p.samples {
        let t = random_combination(ctx, &basis);
        let s = random_combination(ctx, &basis);
        let alpha = Complex64::new(ctx.rng.random_range(-2.0..2.0), ctx.rng.random_range(-2.0..2.0));
        let lhs = cat::frobenius_map(&(&t * alpha + &s), &s1, &s2)?;
        let rhs = cat::frobenius_map(&t, &s1, &s2)? * alpha.conj() + cat::frobenius_map(&s, &s1, &s2)?;
        ctx.le("anti_linear", "(αT + S)• = ᾱT• + S•", linalg::op_norm(&(lhs - rhs)), 1e-11);
        let tb = cat::frobenius_map(&t, &s1, &s2)?;
        ctx.le("intertwiner", "T• ∈ (ρ̄1, ρ̄2)", cat::intertwiner_residual(&tb, &rho1.conjugate(), &rho2.conjugate()), 1e-11);
        let tbb = cat::frobenius_map(&tb, &sb1, &sb2)?;
        ctx.le("involutive", "T•• = T", linalg::op_norm(&(tbb - &t)), 1e-11);
    }
    // the same gauge on both sides, from the commutant of ρ1
    let comm = cat::intertwiner_basis(&rho1, &rho1);
    for _ in 0..p.samples {
        let t = random_combination(ctx, &comm);
        let v = random_combination(ctx, &comm) + linalg::eye(rho1.dim()) * Complex64::new(2.0, 0.0);
        let gauged = s1.gauged(&v)?;
        let a = cat::frobenius_map(&t, &s1, &s1)?;
        let b = cat::frobenius_map(&t, &gauged, &gauged)?;
        ctx.le("gauge_independence", "T• unchanged by (R, R̄) → (ρ̄(v)R, v*⁻¹R̄)", linalg::op_norm(&(a - b)), 1e-10);
        let (x, y) = gauged.residuals();
        ctx.le("gauged_equations", "gauged pair solves the conjugate equations", x.max(y), 1e-10);
    }
    Ok(())
}

#[derive(Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum EndoModelSpec {
    /// `λ = id` on `M_n` with `T = S = 1`.
    Identity(usize),
    /// `λ = Ad u` with `T = S = u`.
    Inner(MatrixSpec),
    /// `λ = ρ̄ρ` on a window of tensor powers, from the standard solution.
    ConjugateSolution { rep: RepSpec, #[serde(default = "levels")] levels: usize },
}

fn levels() -> usize {
    4
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EndoParams {
    pub model: EndoModelSpec,
    #[serde(default)]
    pub expect_t_s: Option<Scalar>,
    #[serde(default)]
    pub expect_s_lambda_t: Option<Scalar>,
}

pub fn canonical_endo_check(p: EndoParams, ctx: &mut Ctx) -> Result<()> {
    let seed: u64 = ctx.rng.random();
    let rep = match &p.model {
        EndoModelSpec::Identity(n) => {
            let one = linalg::eye(*n);
            let model = cat::MatrixEndoModel::new(*n, Box::new(|x: &CMat| x.clone()), seed);
            cat::canonical_endo_check(&model, &one, &one)?
        }
        EndoModelSpec::Inner(u) => {
            let u = u.build(ctx)?;
            let model = cat::MatrixEndoModel::inner(&u, seed);
            cat::canonical_endo_check(&model, &u, &u)?
        }
        EndoModelSpec::ConjugateSolution { rep, levels } => {
            let sol = cat::solve_conjugate(&rep.build()?)?;
            let (model, t, s) = cat::TensorShiftModel::from_solution(&sol, *levels, seed);
            cat::canonical_endo_check(&model, &t, &s)?
        }
    };
    ctx.value_c("t_s", rep.t_s);
    ctx.value_c("s_lambda_t", rep.s_lambda_t);
    ctx.le("canonical", "λ(S)S = S²", rep.canonical, 1e-10);
    ctx.le("scalar_s_lambda_t", "S*λ(T) ∈ ℂ1", rep.s_lambda_t_residual, 1e-10);
    ctx.le("scalar_t_s", "T*S ∈ ℂ1", rep.t_s_residual, 1e-10);
    if let Some(m) = rep.membership {
        ctx.le("membership", "S lies in the designated subalgebra", m, 1e-10);
    }
    ctx.le("expectation_idempotent", "E∘E = E", rep.expectation_idempotent, 1e-10);
    ctx.le("expectation_unital", "E(1) = 1", rep.expectation_unital, 1e-10);
    ctx.ge("expectation_positive", "min spec E(x*x) ≥ 0", rep.expectation_min_eigenvalue, -1e-10);
    if let Some(want) = &p.expect_t_s {
        ctx.le("expected_t_s", "T*S = expected", (rep.t_s - want.value()).norm(), 1e-10);
    }
    if let Some(want) = &p.expect_s_lambda_t {
        ctx.le("expected_s_lambda_t", "S*λ(T) = expected", (rep.s_lambda_t - want.value()).norm(), 1e-10);
    }
    Ok(())
}
