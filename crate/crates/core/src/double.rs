//! Quantum double ⋆-algebra: formal expansions `X = Σ X(i)R_i` over a matrix
//! coefficient algebra, the pointed crossed-product realization, and the
//! dimension table of the Drinfeld double of a finite group.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};

use crate::category::{character_table, dimension_vector, FusionRing, Group};
use crate::error::{domain, Error, Result};
use crate::linalg::{self, c, CMat, Spectral, ONE};

/// Structure data of a double over `Ã = M_n`.
#[derive(Clone, Debug)]
pub struct DoubleSpec {
    ring: FusionRing,
    n: usize,
    /// `ρ̃_i` as a superoperator on row-major `vec(M_n)`.
    rho: Vec<CMat>,
    c: BTreeMap<(usize, usize, usize), CMat>,
    dims: Vec<f64>,
}

impl DoubleSpec {
    /// Multiplicity-free rings only; `c[(i,j,k)]` must be present exactly when
    /// `N^k_{ij} = 1`.
    pub fn new(ring: FusionRing, n: usize, rho: Vec<CMat>, c: BTreeMap<(usize, usize, usize), CMat>) -> Result<DoubleSpec> {
        let r = ring.rank();
        if rho.len() != r {
            return domain(format!("{} endomorphisms supplied for a ring of rank {r}", rho.len()));
        }
        if rho.iter().any(|m| m.shape() != (n * n, n * n)) {
            return domain("each endomorphism must be an n²×n² superoperator");
        }
        for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    let nk = ring.n(i, j, k);
                    if nk > 1 {
                        return Err(Error::Unsupported("fusion multiplicities above one".into()));
                    }
                    match (nk, c.get(&(i, j, k))) {
                        (1, None) => return domain(format!("missing structure constant C^{k}_{{{i}{j}}}")),
                        (0, Some(_)) => return domain(format!("structure constant C^{k}_{{{i}{j}}} on a vanishing channel")),
                        (_, Some(m)) if m.shape() != (n, n) => return domain("structure constants must be n×n"),
                        _ => {}
                    }
                }
            }
        }
        let dims = dimension_vector(&ring);
        let spec = DoubleSpec { ring, n, rho, c, dims };
        let ident = linalg::eye(n * n);
        if linalg::max_abs(&(&spec.rho[0] - &ident)) > 1e-10 {
            return domain("ρ̃_0 must be the identity");
        }
        let mut rng = rand::rngs::StdRng::seed_from_u64(0xd0b1e);
        let samples: Vec<CMat> = (0..3).map(|_| linalg::random_complex(&mut rng, n, n)).collect();
        for (i, _) in spec.rho.iter().enumerate() {
            for a in &samples {
                for b in &samples {
                    let lhs = spec.apply_rho(i, &(a * b));
                    let rhs = spec.apply_rho(i, a) * spec.apply_rho(i, b);
                    if linalg::max_abs(&(lhs - rhs)) > 1e-9 * (1.0 + linalg::max_abs(a) * linalg::max_abs(b)) {
                        return domain(format!("ρ̃_{i} is not multiplicative"));
                    }
                }
                if linalg::max_abs(&(spec.apply_rho(i, &a.adjoint()) - spec.apply_rho(i, a).adjoint())) > 1e-9 * (1.0 + linalg::max_abs(a)) {
                    return domain(format!("ρ̃_{i} is not *-preserving"));
                }
            }
        }
        for (&(i, j, k), cm) in &spec.c {
            for a in &samples {
                let lhs = cm * spec.apply_rho(k, a);
                let rhs = spec.apply_rho(i, &spec.apply_rho(j, a)) * cm;
                let res = linalg::max_abs(&(lhs - rhs));
                if res > 1e-10 * (1.0 + linalg::max_abs(a)) {
                    return domain(format!("C^{k}_{{{i}{j}}} is not an intertwiner (residual {res:e})"));
                }
            }
        }
        Ok(spec)
    }

    /// `Z_n` over `M_n` with `ρ̃_i = Ad(u^i)`, `u` the cyclic shift, and all
    /// structure constants equal to one.
    pub fn pointed(n: usize) -> Result<DoubleSpec> {
        if n == 0 {
            return domain("pointed double needs n ≥ 1");
        }
        let ring = FusionRing::pointed(n);
        let u = shift(n);
        let rho = (0..n)
            .map(|i| {
                let ui = u.pow(i as u32);
                linalg::kron(&ui, &ui.map(|z| z.conj()))
            })
            .collect();
        let mut cmap = BTreeMap::new();
        for i in 0..n {
            for j in 0..n {
                cmap.insert((i, j, (i + j) % n), linalg::eye(n));
            }
        }
        DoubleSpec::new(ring, n, rho, cmap)
    }

    /// Only the unit: the double is `M_n` itself.
    pub fn trivial(n: usize) -> Result<DoubleSpec> {
        let mut cmap = BTreeMap::new();
        cmap.insert((0, 0, 0), linalg::eye(n));
        DoubleSpec::new(FusionRing::trivial(), n, vec![linalg::eye(n * n)], cmap)
    }

    /// Same data with `C^k_{ij}` multiplied by `z`.
    pub fn with_scaled_constant(&self, i: usize, j: usize, k: usize, z: Complex64) -> Result<DoubleSpec> {
        let mut cmap = self.c.clone();
        let Some(m) = cmap.get_mut(&(i, j, k)) else {
            return domain(format!("no structure constant C^{k}_{{{i}{j}}}"));
        };
        *m *= z;
        DoubleSpec::new(self.ring.clone(), self.n, self.rho.clone(), cmap)
    }

    pub fn ring(&self) -> &FusionRing {
        &self.ring
    }

    pub fn coefficient_dim(&self) -> usize {
        self.n
    }

    pub fn dims(&self) -> &[f64] {
        &self.dims
    }

    pub fn apply_rho(&self, i: usize, a: &CMat) -> CMat {
        let v = &self.rho[i] * linalg::vec_row_major(a);
        linalg::unvec_row_major(v.as_slice(), self.n, self.n)
    }

    pub fn constant(&self, i: usize, j: usize, k: usize) -> Option<&CMat> {
        self.c.get(&(i, j, k))
    }

    fn check_label(&self, i: usize) -> Result<()> {
        if i >= self.ring.rank() {
            return domain(format!("label {i} outside the ring"));
        }
        Ok(())
    }
}

pub fn shift(n: usize) -> CMat {
    CMat::from_fn(n, n, |a, b| if a == (b + 1) % n { ONE } else { c(0.0, 0.0) })
}

/// Finitely supported `i ↦ X(i) ∈ M_n`; zero coefficients are dropped.
#[derive(Clone, Debug, PartialEq)]
pub struct DoubleElement {
    pub coeffs: BTreeMap<usize, CMat>,
}

impl DoubleElement {
    pub fn zero() -> DoubleElement {
        DoubleElement { coeffs: BTreeMap::new() }
    }

    pub fn unit(spec: &DoubleSpec) -> DoubleElement {
        DoubleElement::coefficient(linalg::eye(spec.n))
    }

    pub fn coefficient(a: CMat) -> DoubleElement {
        DoubleElement::from_map([(0, a)].into_iter().collect())
    }

    /// `R_i`.
    pub fn generator(spec: &DoubleSpec, i: usize) -> Result<DoubleElement> {
        spec.check_label(i)?;
        Ok(DoubleElement::from_map([(i, linalg::eye(spec.n))].into_iter().collect()))
    }

    pub fn from_map(coeffs: BTreeMap<usize, CMat>) -> DoubleElement {
        DoubleElement { coeffs: coeffs.into_iter().filter(|(_, m)| linalg::max_abs(m) > 0.0).collect() }
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, spec: &DoubleSpec) -> DoubleElement {
        DoubleElement::from_map((0..spec.ring.rank()).map(|i| (i, linalg::random_complex(rng, spec.n, spec.n))).collect())
    }

    pub fn get(&self, i: usize, n: usize) -> CMat {
        self.coeffs.get(&i).cloned().unwrap_or_else(|| CMat::zeros(n, n))
    }

    pub fn add(&self, other: &DoubleElement) -> DoubleElement {
        let mut out = self.coeffs.clone();
        for (&i, m) in &other.coeffs {
            out.entry(i).and_modify(|x| *x += m).or_insert_with(|| m.clone());
        }
        DoubleElement::from_map(out)
    }

    pub fn scale(&self, z: Complex64) -> DoubleElement {
        DoubleElement::from_map(self.coeffs.iter().map(|(&i, m)| (i, m * z)).collect())
    }

    pub fn left_mul(&self, a: &CMat) -> DoubleElement {
        DoubleElement::from_map(self.coeffs.iter().map(|(&i, m)| (i, a * m)).collect())
    }

    /// Largest coefficient distance.
    pub fn dist(&self, other: &DoubleElement) -> f64 {
        let keys: std::collections::BTreeSet<usize> = self.coeffs.keys().chain(other.coeffs.keys()).cloned().collect();
        keys.into_iter()
            .map(|i| match (self.coeffs.get(&i), other.coeffs.get(&i)) {
                (Some(a), Some(b)) => linalg::op_norm(&(a - b)),
                (Some(a), None) | (None, Some(a)) => linalg::op_norm(a),
                (None, None) => 0.0,
            })
            .fold(0.0, f64::max)
    }

    fn check(&self, spec: &DoubleSpec) -> Result<()> {
        for (&i, m) in &self.coeffs {
            spec.check_label(i)?;
            if m.shape() != (spec.n, spec.n) {
                return domain("coefficient has the wrong shape");
            }
        }
        Ok(())
    }
}

/// `(X⋆Y)(k) = Σ_{i,j} X(i) ρ̃_i(Y(j)) C^k_{ij}`.
pub fn star_product(x: &DoubleElement, y: &DoubleElement, spec: &DoubleSpec) -> Result<DoubleElement> {
    x.check(spec)?;
    y.check(spec)?;
    let mut out: BTreeMap<usize, CMat> = BTreeMap::new();
    for (&i, xi) in &x.coeffs {
        for (&j, yj) in &y.coeffs {
            let mid = xi * spec.apply_rho(i, yj);
            for k in 0..spec.ring.rank() {
                if let Some(cm) = spec.c.get(&(i, j, k)) {
                    let term = &mid * cm;
                    out.entry(k).and_modify(|m| *m += &term).or_insert(term);
                }
            }
        }
    }
    Ok(DoubleElement::from_map(out))
}

/// `X*(k) = C^{0*}_{k k̄} ρ̃_k(X(k̄)*)`.
pub fn star_involution(x: &DoubleElement, spec: &DoubleSpec) -> Result<DoubleElement> {
    x.check(spec)?;
    let mut out = BTreeMap::new();
    for (&kb, m) in &x.coeffs {
        let k = spec.ring.dual(kb);
        let c0 = spec.c.get(&(k, kb, 0)).ok_or_else(|| Error::Domain(format!("missing C^0_{{{k}{kb}}}")))?;
        out.insert(k, c0.adjoint() * spec.apply_rho(k, &m.adjoint()));
    }
    Ok(DoubleElement::from_map(out))
}

/// `ε(X) = X(0)`.
pub fn expectation(x: &DoubleElement, n: usize) -> CMat {
    x.get(0, n)
}

/// `ε(X⋆R_i*) / d_i²`.
pub fn expansion_coefficient(x: &DoubleElement, i: usize, spec: &DoubleSpec) -> Result<CMat> {
    let ri = DoubleElement::generator(spec, i)?;
    let p = star_product(x, &star_involution(&ri, spec)?, spec)?;
    Ok(expectation(&p, spec.n) / c(spec.dims[i] * spec.dims[i], 0.0))
}

/// Residuals of the defining relations, each maximized over labels and samples.
#[derive(Clone, Debug, PartialEq)]
pub struct RelationsReport {
    /// `R_i X = ρ̃_i(X) R_i`.
    pub covariance: f64,
    /// `R_i* R_i = d_i²`.
    pub isometry: f64,
    /// `R_i R_j = Σ_k C^k_{ij} R_k`, evaluated in the concrete realization
    /// when one exists, formally otherwise.
    pub fusion: f64,
    /// `R_i* = C^{0*}_{īi} R_ī`.
    pub adjoint: f64,
    pub associativity: f64,
    pub involutive: f64,
    pub anti_multiplicative: f64,
    /// `‖ε(X*⋆X)‖`-scaled least eigenvalue over samples; non-negative when ε is positive.
    pub expectation_min_eigenvalue: f64,
    /// `max ‖eval(X⋆Y) − eval(X)eval(Y)‖` against the crossed-product model.
    pub concrete_homomorphism: Option<f64>,
    /// `Σ_i dim{Y : aY = Y ρ̃_i(a)}`; one means `Ã' ∩ 𝔅 = ℂ`.
    pub relative_commutant_dim: usize,
}

impl RelationsReport {
    pub fn worst(&self) -> f64 {
        [
            self.covariance,
            self.isometry,
            self.fusion,
            self.adjoint,
            self.associativity,
            self.involutive,
            self.anti_multiplicative,
            (-self.expectation_min_eigenvalue).max(0.0),
            self.concrete_homomorphism.unwrap_or(0.0),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn itemized(&self, tol: f64) -> Vec<(&'static str, f64, bool)> {
        let mut items = vec![
            ("covariance", self.covariance),
            ("isometry", self.isometry),
            ("fusion", self.fusion),
            ("adjoint", self.adjoint),
            ("associativity", self.associativity),
            ("involutive", self.involutive),
            ("anti_multiplicative", self.anti_multiplicative),
            ("expectation_positivity", (-self.expectation_min_eigenvalue).max(0.0)),
        ];
        if let Some(h) = self.concrete_homomorphism {
            items.push(("concrete_homomorphism", h));
        }
        items.into_iter().map(|(k, v)| (k, v, v <= tol)).collect()
    }
}

pub fn relations_check(spec: &DoubleSpec, samples: usize, seed: u64) -> Result<RelationsReport> {
    let r = spec.ring.rank();
    let n = spec.n;
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let gens: Vec<DoubleElement> = (0..r).map(|i| DoubleElement::generator(spec, i)).collect::<Result<_>>()?;
    let unit = DoubleElement::unit(spec);

    let mut covariance: f64 = 0.0;
    let mut isometry: f64 = 0.0;
    let mut adjoint: f64 = 0.0;
    for (i, ri) in gens.iter().enumerate() {
        for _ in 0..samples.max(1) {
            let a = linalg::random_complex(&mut rng, n, n);
            let lhs = star_product(ri, &DoubleElement::coefficient(a.clone()), spec)?;
            let rhs = star_product(&DoubleElement::coefficient(spec.apply_rho(i, &a)), ri, spec)?;
            covariance = covariance.max(lhs.dist(&rhs));
        }
        let rs = star_involution(ri, spec)?;
        let p = star_product(&rs, ri, spec)?;
        isometry = isometry.max(p.dist(&unit.scale(c(spec.dims[i] * spec.dims[i], 0.0))));
        let ib = spec.ring.dual(i);
        let c0 = spec.c.get(&(ib, i, 0)).ok_or_else(|| Error::Domain(format!("missing C^0_{{{ib}{i}}}")))?;
        let want = gens[ib].left_mul(&c0.adjoint());
        adjoint = adjoint.max(rs.dist(&want));
    }

    let concrete = PointedRealization::for_spec(spec);
    let mut fusion: f64 = 0.0;
    for i in 0..r {
        for j in 0..r {
            let lhs = star_product(&gens[i], &gens[j], spec)?;
            let mut rhs = DoubleElement::zero();
            for k in 0..r {
                if let Some(cm) = spec.c.get(&(i, j, k)) {
                    rhs = rhs.add(&gens[k].left_mul(cm));
                }
            }
            fusion = fusion.max(lhs.dist(&rhs));
            if let Some(real) = &concrete {
                let prod = real.eval(&gens[i]) * real.eval(&gens[j]);
                fusion = fusion.max(linalg::op_norm(&(prod - real.eval(&rhs))));
            }
        }
    }

    let mut associativity: f64 = 0.0;
    let mut involutive: f64 = 0.0;
    let mut anti: f64 = 0.0;
    let mut min_eig = f64::INFINITY;
    let mut hom: f64 = 0.0;
    // generator triples catch cocycle defects in C that random samples would average over
    for a in &gens {
        for b in &gens {
            for d in &gens {
                let l = star_product(&star_product(a, b, spec)?, d, spec)?;
                let rr = star_product(a, &star_product(b, d, spec)?, spec)?;
                associativity = associativity.max(l.dist(&rr));
            }
        }
    }
    for _ in 0..samples {
        let x = DoubleElement::random(&mut rng, spec);
        let y = DoubleElement::random(&mut rng, spec);
        let z = DoubleElement::random(&mut rng, spec);
        let scale = 1.0 + op_size(&x) * op_size(&y) * op_size(&z);
        let l = star_product(&star_product(&x, &y, spec)?, &z, spec)?;
        let rr = star_product(&x, &star_product(&y, &z, spec)?, spec)?;
        associativity = associativity.max(l.dist(&rr) / scale);
        let xs = star_involution(&x, spec)?;
        involutive = involutive.max(star_involution(&xs, spec)?.dist(&x) / (1.0 + op_size(&x)));
        let xy = star_product(&x, &y, spec)?;
        let lhs = star_involution(&xy, spec)?;
        let rhs = star_product(&star_involution(&y, spec)?, &xs, spec)?;
        anti = anti.max(lhs.dist(&rhs) / (1.0 + op_size(&x) * op_size(&y)));
        let e = expectation(&star_product(&xs, &x, spec)?, n);
        let herm = linalg::hermiticity_defect(&e);
        min_eig = min_eig.min(Spectral::new(&e).min() / (1.0 + op_size(&x).powi(2)) - herm);
        if let Some(real) = &concrete {
            let d = real.eval(&xy) - real.eval(&x) * real.eval(&y);
            hom = hom.max(linalg::op_norm(&d) / (1.0 + op_size(&x) * op_size(&y)));
        }
    }
    if samples == 0 {
        min_eig = 0.0;
    }
    Ok(RelationsReport {
        covariance,
        isometry,
        fusion,
        adjoint,
        associativity,
        involutive,
        anti_multiplicative: anti,
        expectation_min_eigenvalue: min_eig,
        concrete_homomorphism: concrete.map(|_| hom),
        relative_commutant_dim: relative_commutant_dim(spec),
    })
}

fn op_size(x: &DoubleElement) -> f64 {
    x.coeffs.values().map(linalg::op_norm).fold(0.0, f64::max)
}

/// `Σ_i dim{Y ∈ M_n : aY = Yρ̃_i(a) for all a}`.
pub fn relative_commutant_dim(spec: &DoubleSpec) -> usize {
    let n = spec.n;
    let mut total = 0;
    let units: Vec<CMat> = (0..n * n)
        .map(|k| {
            let mut e = CMat::zeros(n, n);
            e[(k / n, k % n)] = ONE;
            e
        })
        .collect();
    for i in 0..spec.ring.rank() {
        let mut gram = CMat::zeros(n * n, n * n);
        for a in &units {
            // vec(aY − Yρ̃_i(a)) = (a ⊗ 1 − 1 ⊗ ρ̃_i(a)ᵀ) vec(Y)
            let m = linalg::kron(a, &linalg::eye(n)) - linalg::kron(&linalg::eye(n), &spec.apply_rho(i, a).transpose());
            gram += m.adjoint() * m;
        }
        let spec_g = Spectral::new(&gram);
        total += spec_g.values.iter().filter(|&&v| v < 1e-9).count();
    }
    total
}

/// `R_i = u^i ⊗ s^i` and `a ↦ a ⊗ 1` inside `M_n ⊗ M_n`.
#[derive(Clone, Debug)]
pub struct PointedRealization {
    pub n: usize,
    pub r: Vec<CMat>,
}

impl PointedRealization {
    pub fn new(n: usize) -> PointedRealization {
        let u = shift(n);
        let r = (0..n).map(|i| linalg::kron(&u.pow(i as u32), &u.pow(i as u32))).collect();
        PointedRealization { n, r }
    }

    /// Realization matching a spec whose ring is pointed with `ρ̃_i` the
    /// `i`-th power of a single cyclic shift, `None` otherwise.
    pub fn for_spec(spec: &DoubleSpec) -> Option<PointedRealization> {
        let n = spec.n;
        if !spec.ring.is_pointed() || spec.ring.rank() != n {
            return None;
        }
        if spec.ring != FusionRing::pointed(n) {
            return None;
        }
        let real = PointedRealization::new(n);
        let u = shift(n);
        for i in 0..n {
            let ui = u.pow(i as u32);
            if linalg::max_abs(&(&spec.rho[i] - linalg::kron(&ui, &ui.map(|z| z.conj())))) > 1e-12 {
                return None;
            }
        }
        Some(real)
    }

    pub fn embed(&self, a: &CMat) -> CMat {
        linalg::kron(a, &linalg::eye(self.n))
    }

    pub fn eval(&self, x: &DoubleElement) -> CMat {
        let mut out = CMat::zeros(self.n * self.n, self.n * self.n);
        for (&i, m) in &x.coeffs {
            out += self.embed(m) * &self.r[i];
        }
        out
    }

    /// `dim 𝔅 / dim Ã` with `𝔅 = span{a R_i}`.
    pub fn index(&self) -> f64 {
        let n = self.n;
        let mut cols = Vec::with_capacity(n * n * n);
        for ri in &self.r {
            for k in 0..n * n {
                let mut e = CMat::zeros(n, n);
                e[(k / n, k % n)] = ONE;
                cols.push(linalg::vec_row_major(&(self.embed(&e) * ri)));
            }
        }
        let m = CMat::from_columns(&cols);
        linalg::rank(&m, 1e-10) as f64 / (n * n) as f64
    }

    /// Total multiplicity of `λ = ⊕_i ρ_i ⊗ ρ_i^{op}` restricted to `Ã`.
    pub fn canonical_multiplicity(&self) -> usize {
        self.r.len()
    }
}

/// One irreducible representation of `D(G)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DoubleIrrep {
    pub class_rep: usize,
    pub class_size: usize,
    pub centralizer_order: usize,
    pub centralizer_irrep_dim: usize,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DoubleDimensionTable {
    pub group_order: usize,
    pub irreps: Vec<DoubleIrrep>,
    pub sum_of_squares: u64,
}

impl DoubleDimensionTable {
    pub fn dims(&self) -> Vec<usize> {
        self.irreps.iter().map(|r| r.dim).collect()
    }
}

/// Irreducibles of `D(G)` labelled by (class, centralizer irrep), with
/// `d = |class|·dim`. Fails unless `Σd² = |G|²` in integer arithmetic.
pub fn group_double_dimensions(g: &Group) -> Result<DoubleDimensionTable> {
    if g.order() > 256 {
        return domain("group order above 256 is not supported");
    }
    let mut irreps = Vec::new();
    for cls in g.conjugacy_classes() {
        let rep = cls[0];
        let cent = g.centralizer(rep);
        let sub = g.subgroup(&cent)?;
        let ct = character_table(&sub)?;
        let dims = ct.dims();
        let check: usize = dims.iter().map(|d| d * d).sum();
        if check != sub.order() {
            return domain(format!("centralizer irreps of element {rep} do not sum to its order"));
        }
        for d in dims {
            irreps.push(DoubleIrrep {
                class_rep: rep,
                class_size: cls.len(),
                centralizer_order: cent.len(),
                centralizer_irrep_dim: d,
                dim: cls.len() * d,
            });
        }
    }
    let sum: u64 = irreps.iter().map(|r| (r.dim as u64) * (r.dim as u64)).sum();
    let want = (g.order() as u64).pow(2);
    if sum != want {
        return domain(format!("Σd² = {sum} but |G|² = {want}"));
    }
    Ok(DoubleDimensionTable { group_order: g.order(), irreps, sum_of_squares: sum })
}
