use anyhow::Result;
use modindex::double::{self as db, DoubleElement, DoubleSpec, PointedRealization};
use modindex::linalg::{self, CMat};
use modindex::Complex64;
use rand::Rng;
use serde::Deserialize;

use super::{ten, Expect};
use crate::build::{DoubleDecl, GroupSpec};
use crate::run::Ctx;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DoubleParams {
    pub double: DoubleDecl,
    #[serde(default = "ten")]
    pub samples: usize,
}

fn size(x: &DoubleElement) -> f64 {
    x.coeffs.values().map(linalg::op_norm).fold(0.0, f64::max)
}

fn prod(x: &DoubleElement, y: &DoubleElement, spec: &DoubleSpec) -> Result<DoubleElement> {
    Ok(db::star_product(x, y, spec)?)
}

pub fn star_product(p: DoubleParams, ctx: &mut Ctx) -> Result<()> {
    let spec = p.double.build()?;
    let n = spec.coefficient_dim();
    let unit = DoubleElement::unit(&spec);
    let real = PointedRealization::for_spec(&spec);
    ctx.value("concrete_model", real.is_some());
    for _ in 0..p.samples {
        let x = DoubleElement::random(&mut ctx.rng, &spec);
        let y = DoubleElement::random(&mut ctx.rng, &spec);
        let z = DoubleElement::random(&mut ctx.rng, &spec);
        let s = 1.0 + size(&x);
        ctx.le("unit", "1⋆X = X = X⋆1", prod(&unit, &x, &spec)?.dist(&x).max(prod(&x, &unit, &spec)?.dist(&x)) / s, 1e-13);
        let l = prod(&prod(&x, &y, &spec)?, &z, &spec)?;
        let r = prod(&x, &prod(&y, &z, &spec)?, &spec)?;
        ctx.le("associativity", "(X⋆Y)⋆Z = X⋆(Y⋆Z)", l.dist(&r) / (1.0 + size(&x) * size(&y) * size(&z)), 1e-12);
        let xy = prod(&x, &y, &spec)?;
        if let Some(real) = &real {
            let d = real.eval(&xy) - real.eval(&x) * real.eval(&y);
            ctx.le("matrix_model", "eval(X⋆Y) = eval(X) eval(Y)", linalg::op_norm(&d) / (1.0 + size(&x) * size(&y)), 1e-12);
        }
        for i in 0..spec.ring().rank() {
            let xi = db::expansion_coefficient(&x, i, &spec)?;
            ctx.le("expansion", "X(i) = ε(X⋆R_i*)/d_i²", linalg::op_norm(&(xi - x.get(i, n))) / s, 1e-12);
        }
    }
    if let Some(real) = &real {
        ctx.eq("index", "dim 𝔅 / dim Ã = n", real.index(), n as f64);
    }
    Ok(())
}

pub fn star_involution(p: DoubleParams, ctx: &mut Ctx) -> Result<()> {
    let spec = p.double.build()?;
    let real = PointedRealization::for_spec(&spec);
    for _ in 0..p.samples {
        let x = DoubleElement::random(&mut ctx.rng, &spec);
        let y = DoubleElement::random(&mut ctx.rng, &spec);
        let xs = db::star_involution(&x, &spec)?;
        ctx.le("involutive", "X** = X", db::star_involution(&xs, &spec)?.dist(&x) / (1.0 + size(&x)), 1e-12);
        let lhs = db::star_involution(&prod(&x, &y, &spec)?, &spec)?;
        let rhs = prod(&db::star_involution(&y, &spec)?, &xs, &spec)?;
        ctx.le("anti_multiplicative", "(X⋆Y)* = Y*⋆X*", lhs.dist(&rhs) / (1.0 + size(&x) * size(&y)), 1e-12);
        let a = Complex64::new(ctx.rng.random_range(-2.0..2.0), ctx.rng.random_range(-2.0..2.0));
        let lin = db::star_involution(&x.scale(a).add(&y), &spec)?;
        let want = xs.scale(a.conj()).add(&db::star_involution(&y, &spec)?);
        ctx.le("anti_linear", "(αX + Y)* = ᾱX* + Y*", lin.dist(&want) / (1.0 + size(&x) + size(&y)), 1e-12);
        if let Some(real) = &real {
            let d = real.eval(&xs) - real.eval(&x).adjoint();
            ctx.le("matrix_model", "eval(X*) = eval(X)*", linalg::op_norm(&d) / (1.0 + size(&x)), 1e-12);
        }
    }
    Ok(())
}

pub fn expectation(p: DoubleParams, ctx: &mut Ctx) -> Result<()> {
    let spec = p.double.build()?;
    let n = spec.coefficient_dim();
    let id = linalg::eye(n);
    let unit = DoubleElement::unit(&spec);
    ctx.le("unital", "ε(1) = 1", linalg::op_norm(&(db::expectation(&unit, n) - &id)), 1e-15);
    for i in 0..spec.ring().rank() {
        let ri = DoubleElement::generator(&spec, i)?;
        if i != 0 {
            ctx.le("generators", "ε(R_i) = 0 for i ≠ 0", linalg::op_norm(&db::expectation(&ri, n)), 1e-15);
        }
        let rr = prod(&db::star_involution(&ri, &spec)?, &ri, &spec)?;
        let d = spec.dims()[i];
        ctx.le("norms", "ε(R_i*R_i) = d_i²", linalg::op_norm(&(db::expectation(&rr, n) - &id * Complex64::new(d * d, 0.0))), 1e-12);
    }
    let mut min_eig = f64::INFINITY;
    for _ in 0..p.samples {
        let x = DoubleElement::random(&mut ctx.rng, &spec);
        let a = linalg::random_complex(&mut ctx.rng, n, n);
        let b = linalg::random_complex(&mut ctx.rng, n, n);
        let axb = prod(&prod(&DoubleElement::coefficient(a.clone()), &x, &spec)?, &DoubleElement::coefficient(b.clone()), &spec)?;
        let want: CMat = &a * db::expectation(&x, n) * &b;
        let scale = 1.0 + linalg::op_norm(&a) * size(&x) * linalg::op_norm(&b);
        ctx.le("bimodule", "ε(aXb) = a ε(X) b", linalg::op_norm(&(db::expectation(&axb, n) - want)) / scale, 1e-13);
        let xs = db::star_involution(&x, &spec)?;
        let e = db::expectation(&prod(&xs, &x, &spec)?, n);
        let h = linalg::hermitian_part(&e);
        let lo = linalg::Spectral::new(&h).min() / (1.0 + size(&x).powi(2));
        min_eig = min_eig.min(lo);
        // faithful: ε(X*X) has positive trace for X ≠ 0
        ctx.ge("faithful", "tr ε(X*X) > 0", linalg::trace(&e).re, 1e-9);
    }
    if p.samples > 0 {
        ctx.value_f("min_eigenvalue", min_eig);
        ctx.ge("positive", "min spec ε(X*X) ≥ 0", min_eig, -1e-13);
    }
    Ok(())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelParams {
    pub double: DoubleDecl,
    #[serde(default = "five")]
    pub samples: usize,
    #[serde(default)]
    pub expect: Expect,
    #[serde(default = "witness")]
    pub min_violation: f64,
    #[serde(default)]
    pub expect_relative_commutant: Option<usize>,
}

fn five() -> usize {
    5
}

fn witness() -> f64 {
    1e-3
}

pub fn relations_check(p: RelParams, ctx: &mut Ctx) -> Result<()> {
    let spec = p.double.build()?;
    let seed: u64 = ctx.rng.random();
    let rep = db::relations_check(&spec, p.samples, seed)?;
    ctx.value_f("worst", rep.worst());
    ctx.value("relative_commutant_dim", rep.relative_commutant_dim);
    match p.expect {
        Expect::Holds => {
            for (name, v, _) in rep.itemized(1e-12) {
                ctx.le(name, relation_identity(name), v, 1e-12);
            }
        }
        Expect::Fails => ctx.ge("witness", "some generator relation fails", rep.worst(), p.min_violation),
    }
    if let Some(want) = p.expect_relative_commutant {
        ctx.eq("relative_commutant", "Σ_i dim{Y : aY = Yρ̃_i(a)} = expected", rep.relative_commutant_dim as f64, want as f64);
    }
    if let Some(real) = PointedRealization::for_spec(&spec) {
        ctx.eq("index", "[𝔅 : Ã] = n", real.index(), spec.coefficient_dim() as f64);
        ctx.eq("canonical_multiplicity", "λ restricted to Ã has n summands", real.canonical_multiplicity() as f64, spec.coefficient_dim() as f64);
    }
    Ok(())
}

fn relation_identity(name: &str) -> &'static str {
    match name {
        "covariance" => "R_i a = ρ̃_i(a) R_i",
        "isometry" => "R_i* R_i = d_i²",
        "fusion" => "R_i R_j = Σ_k C^k_ij R_k",
        "adjoint" => "R_i* = C^0*_īi R_ī",
        "associativity" => "(X⋆Y)⋆Z = X⋆(Y⋆Z)",
        "involutive" => "X** = X",
        "anti_multiplicative" => "(X⋆Y)* = Y*⋆X*",
        "expectation_positivity" => "ε(X*X) ≥ 0",
        "concrete_homomorphism" => "eval(X⋆Y) = eval(X) eval(Y)",
        _ => "",
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupDoubleParams {
    pub group: GroupSpec,
    #[serde(default)]
    pub expect_dims: Option<Vec<usize>>,
    #[serde(default)]
    pub label: Option<String>,
}

pub fn group_double_dimensions(p: GroupDoubleParams, ctx: &mut Ctx) -> Result<()> {
    let g = p.group.build()?;
    let t = db::group_double_dimensions(&g)?;
    let mut dims = t.dims();
    dims.sort();
    let order = t.group_order as u64;
    ctx.value("irreps", dims.len());
    ctx.value("dims", dims.clone());
    ctx.value("sum_of_squares", t.sum_of_squares);
    ctx.eq("sum_of_squares", "Σ d² = |G|²", t.sum_of_squares as f64, (order * order) as f64);
    let sizes = t.irreps.iter().all(|r| r.dim == r.class_size * r.centralizer_irrep_dim && r.class_size * r.centralizer_order == t.group_order);
    ctx.holds("orbit_formula", "d = |class| · dim π, |class| · |C_G(g)| = |G|", sizes);
    if let Some(want) = &p.expect_dims {
        let mut want = want.clone();
        want.sort();
        ctx.holds("expected", "irreducible dimensions = expected", want == dims);
    }
    let name = p.label.clone().unwrap_or_else(|| format!("G (order {order})"));
    ctx.summary(format!("D({name}): Σd² = {} = |G|²", t.sum_of_squares));
    Ok(())
}
