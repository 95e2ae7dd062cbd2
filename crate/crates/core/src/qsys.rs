//! Finite-dimensional C*-algebras `⊕_j M_{n_j}`, states, inner dynamics,
//! GNS spaces with their modular data, relative entropy and quasi-equivalence.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use rand::Rng;

use crate::error::{domain, Error, Result};
use crate::linalg::{self, c, CMat, CVec, Spectral, ONE, ZERO};

/// Relative cutoff on density eigenvalues below which a state counts as
/// non-faithful.
pub const FAITHFUL_CUTOFF: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixAlgebra {
    blocks: Vec<usize>,
}

impl MatrixAlgebra {
    pub fn new(blocks: Vec<usize>) -> Result<Self> {
        if blocks.is_empty() {
            return domain("algebra needs at least one block");
        }
        if blocks.iter().any(|&n| n == 0) {
            return domain("block dimensions must be positive");
        }
        Ok(MatrixAlgebra { blocks })
    }

    /// The full matrix algebra `M_n`.
    pub fn full(n: usize) -> Self {
        MatrixAlgebra::new(vec![n.max(1)]).expect("positive block")
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// `Σ n_j²`, the dimension of the algebra and of its GNS carrier.
    pub fn hilbert_dim(&self) -> usize {
        self.blocks.iter().map(|n| n * n).sum()
    }

    pub fn center_dim(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_factor(&self) -> bool {
        self.blocks.len() == 1
    }

    /// Block structure of `𝔄 ⊗ M_d`.
    pub fn amplify(&self, d: usize) -> MatrixAlgebra {
        MatrixAlgebra { blocks: self.blocks.iter().map(|n| n * d).collect() }
    }
}

#[derive(Clone, Debug)]
pub struct Element {
    algebra: MatrixAlgebra,
    blocks: Vec<CMat>,
}

impl Element {
    pub fn new(algebra: &MatrixAlgebra, blocks: Vec<CMat>) -> Result<Self> {
        if blocks.len() != algebra.num_blocks() {
            return domain(format!(
                "expected {} blocks, got {}",
                algebra.num_blocks(),
                blocks.len()
            ));
        }
        for (j, (b, &n)) in blocks.iter().zip(algebra.blocks()).enumerate() {
            if b.shape() != (n, n) {
                return domain(format!("block {j} has shape {:?}, expected {n}x{n}", b.shape()));
            }
        }
        Ok(Element { algebra: algebra.clone(), blocks })
    }

    /// Element of the single-block algebra `M_n`.
    pub fn from_matrix(m: CMat) -> Self {
        let n = m.nrows();
        assert!(m.is_square(), "matrix must be square");
        Element { algebra: MatrixAlgebra::full(n), blocks: vec![m] }
    }

    pub fn identity(algebra: &MatrixAlgebra) -> Self {
        Self::scalar(algebra, ONE)
    }

    pub fn zero(algebra: &MatrixAlgebra) -> Self {
        Self::scalar(algebra, ZERO)
    }

    pub fn scalar(algebra: &MatrixAlgebra, z: Complex64) -> Self {
        Element {
            algebra: algebra.clone(),
            blocks: algebra.blocks().iter().map(|&n| linalg::eye(n) * z).collect(),
        }
    }

    pub fn algebra(&self) -> &MatrixAlgebra {
        &self.algebra
    }

    pub fn blocks(&self) -> &[CMat] {
        &self.blocks
    }

    pub fn block(&self, j: usize) -> &CMat {
        &self.blocks[j]
    }

    /// The single block of an element of a factor.
    pub fn matrix(&self) -> &CMat {
        &self.blocks[0]
    }

    pub fn map_blocks<F: Fn(usize, &CMat) -> CMat>(&self, f: F) -> Element {
        Element {
            algebra: self.algebra.clone(),
            blocks: self.blocks.iter().enumerate().map(|(j, b)| f(j, b)).collect(),
        }
    }

    pub fn zip_blocks<F: Fn(&CMat, &CMat) -> CMat>(&self, other: &Element, f: F) -> Element {
        assert_eq!(self.algebra, other.algebra, "elements of different algebras");
        Element {
            algebra: self.algebra.clone(),
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn adjoint(&self) -> Element {
        self.map_blocks(|_, b| b.adjoint())
    }

    pub fn scale(&self, z: Complex64) -> Element {
        self.map_blocks(|_, b| b * z)
    }

    pub fn trace(&self) -> Complex64 {
        self.blocks.iter().map(linalg::trace).sum()
    }

    /// Operator norm: the largest block spectral norm.
    pub fn norm(&self) -> f64 {
        self.blocks.iter().map(linalg::op_norm).fold(0.0, f64::max)
    }

    pub fn dist(&self, other: &Element) -> f64 {
        (self - other).norm()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.blocks.iter().all(|b| linalg::is_hermitian(b, tol))
    }

    pub fn unitarity_defect(&self) -> f64 {
        let one = Element::identity(&self.algebra);
        (&(&self.adjoint() * self) - &one).norm().max((&(self * &self.adjoint()) - &one).norm())
    }

    /// `Some(z)` when the element is `z·1` up to `tol`.
    pub fn as_scalar(&self, tol: f64) -> Option<Complex64> {
        let z = self.blocks[0][(0, 0)];
        let d = (self - &Element::scalar(&self.algebra, z)).norm();
        if d <= tol * (1.0 + z.norm()) {
            Some(z)
        } else {
            None
        }
    }

    pub fn spectra(&self) -> Vec<Spectral> {
        self.blocks.iter().map(Spectral::new).collect()
    }

    /// Block-diagonal dense matrix of size `Σ n_j`.
    pub fn to_dense(&self) -> CMat {
        let total: usize = self.algebra.blocks().iter().sum();
        let mut m = CMat::zeros(total, total);
        let mut off = 0;
        for b in &self.blocks {
            let n = b.nrows();
            m.view_mut((off, off), (n, n)).copy_from(b);
            off += n;
        }
        m
    }

    /// `x ⊗ 1_d` in the amplified algebra.
    pub fn amplify(&self, d: usize) -> Element {
        let one = linalg::eye(d);
        Element {
            algebra: self.algebra.amplify(d),
            blocks: self.blocks.iter().map(|b| linalg::kron(b, &one)).collect(),
        }
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, algebra: &MatrixAlgebra) -> Element {
        Element {
            algebra: algebra.clone(),
            blocks: algebra.blocks().iter().map(|&n| linalg::random_complex(rng, n, n)).collect(),
        }
    }

    pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, algebra: &MatrixAlgebra) -> Element {
        Element {
            algebra: algebra.clone(),
            blocks: algebra.blocks().iter().map(|&n| linalg::random_hermitian(rng, n)).collect(),
        }
    }

    pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, algebra: &MatrixAlgebra) -> Element {
        Element {
            algebra: algebra.clone(),
            blocks: algebra.blocks().iter().map(|&n| linalg::random_unitary(rng, n)).collect(),
        }
    }
}

impl Mul for &Element {
    type Output = Element;
    fn mul(self, rhs: &Element) -> Element {
        self.zip_blocks(rhs, |a, b| a * b)
    }
}

impl Add for &Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        self.zip_blocks(rhs, |a, b| a + b)
    }
}

impl Sub for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        self.zip_blocks(rhs, |a, b| a - b)
    }
}

/// A positive functional `φ(a) = Σ_j Tr(D_j a_j)` with weight `φ(1)`.
#[derive(Clone, Debug)]
pub struct State {
    algebra: MatrixAlgebra,
    densities: Vec<CMat>,
    weight: f64,
}

impl State {
    pub fn new(algebra: &MatrixAlgebra, densities: Vec<CMat>) -> Result<Self> {
        let el = Element::new(algebra, densities)?;
        let mut densities = Vec::with_capacity(el.blocks.len());
        for (j, d) in el.blocks.into_iter().enumerate() {
            let scale = 1.0 + linalg::max_abs(&d);
            if linalg::hermiticity_defect(&d) > 1e-10 * scale {
                return domain(format!("density block {j} is not Hermitian"));
            }
            let d = linalg::hermitian_part(&d);
            let lo = Spectral::new(&d).min();
            if lo < -1e-10 * scale {
                return domain(format!("density block {j} has negative eigenvalue {lo:e}"));
            }
            densities.push(d);
        }
        let weight = densities.iter().map(|d| linalg::trace(d).re).sum();
        if weight <= 0.0 {
            return domain("state has zero weight");
        }
        Ok(State { algebra: algebra.clone(), densities, weight })
    }

    pub fn from_density(d: CMat) -> Result<Self> {
        let alg = MatrixAlgebra::full(d.nrows());
        State::new(&alg, vec![d])
    }

    pub fn algebra(&self) -> &MatrixAlgebra {
        &self.algebra
    }

    pub fn densities(&self) -> &[CMat] {
        &self.densities
    }

    pub fn density_element(&self) -> Element {
        Element { algebra: self.algebra.clone(), blocks: self.densities.clone() }
    }

    /// `φ(1)`.
    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn eval(&self, a: &Element) -> Complex64 {
        assert_eq!(&self.algebra, a.algebra(), "state and element on different algebras");
        self.densities.iter().zip(a.blocks()).map(|(d, x)| linalg::trace(&(d * x))).sum()
    }

    pub fn is_faithful(&self) -> bool {
        let spectra: Vec<Spectral> = self.densities.iter().map(Spectral::new).collect();
        let top = spectra.iter().map(|s| s.max()).fold(0.0, f64::max);
        spectra.iter().all(|s| s.min() > FAITHFUL_CUTOFF * top)
    }

    pub fn require_faithful(&self, what: &str) -> Result<()> {
        if self.is_faithful() {
            Ok(())
        } else {
            domain(format!("{what}: state is not faithful"))
        }
    }

    pub fn scaled(&self, f: f64) -> State {
        State {
            algebra: self.algebra.clone(),
            densities: self.densities.iter().map(|d| d * c(f, 0.0)).collect(),
            weight: self.weight * f,
        }
    }

    pub fn normalized(&self) -> State {
        self.scaled(1.0 / self.weight)
    }

    /// `φ ∘ Ad(u)`: density `u* D u`.
    pub fn conjugated(&self, u: &Element) -> State {
        let d = &(&u.adjoint() * &self.density_element()) * u;
        State { algebra: self.algebra.clone(), densities: d.blocks, weight: self.weight }
    }

    /// `φ ⊗ tr` on `𝔄 ⊗ M_d` with the normalized trace, so the weight is kept.
    pub fn amplify(&self, d: usize) -> State {
        let one = linalg::eye(d) * c(1.0 / d as f64, 0.0);
        State {
            algebra: self.algebra.amplify(d),
            densities: self.densities.iter().map(|x| linalg::kron(x, &one)).collect(),
            weight: self.weight,
        }
    }

    /// Trace-norm distance `Σ_j ‖D_j − D'_j‖₁`.
    pub fn trace_distance(&self, other: &State) -> f64 {
        self.densities
            .iter()
            .zip(&other.densities)
            .map(|(a, b)| Spectral::new(&(a - b)).values.iter().map(|x| x.abs()).sum::<f64>())
            .sum()
    }

    pub fn random_faithful<R: Rng + ?Sized>(rng: &mut R, algebra: &MatrixAlgebra) -> State {
        let m = algebra.num_blocks() as f64;
        let densities: Vec<CMat> = algebra
            .blocks()
            .iter()
            .map(|&n| {
                let w: f64 = rng.random_range(0.5..1.5);
                linalg::random_density(rng, n) * c(w / m, 0.0)
            })
            .collect();
        let s = State::new(algebra, densities).expect("random density is valid");
        s.normalized()
    }
}

/// Inner dynamics `α_t = Ad(e^{itH})` together with an inverse temperature.
#[derive(Clone, Debug)]
pub struct Dynamics {
    h: Element,
    beta: f64,
    spectra: Vec<Spectral>,
}

impl Dynamics {
    pub fn new(h: Element, beta: f64) -> Result<Self> {
        if !h.is_hermitian(1e-10) {
            return domain("generator H is not Hermitian");
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return domain(format!("inverse temperature must be positive, got {beta}"));
        }
        let h = h.map_blocks(|_, b| linalg::hermitian_part(b));
        let spectra = h.spectra();
        Ok(Dynamics { h, beta, spectra })
    }

    pub fn h(&self) -> &Element {
        &self.h
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn algebra(&self) -> &MatrixAlgebra {
        self.h.algebra()
    }

    pub fn with_beta(&self, beta: f64) -> Result<Dynamics> {
        Dynamics::new(self.h.clone(), beta)
    }

    pub fn spectra(&self) -> &[Spectral] {
        &self.spectra
    }

    /// `e^{izH}` for complex `z`.
    pub fn unitary(&self, z: Complex64) -> Element {
        let blocks = self.spectra.iter().map(|s| s.exp_scaled(z * linalg::I)).collect();
        Element { algebra: self.h.algebra().clone(), blocks }
    }

    /// `α_z(a) = e^{izH} a e^{-izH}`.
    pub fn evolve(&self, a: &Element, z: Complex64) -> Element {
        let u = self.unitary(z);
        let ui = self.unitary(-z);
        &(&u * a) * &ui
    }

    /// `H ⊗ 1_d`.
    pub fn amplify(&self, d: usize) -> Dynamics {
        Dynamics::new(self.h.amplify(d), self.beta).expect("amplified generator is Hermitian")
    }

    pub fn gibbs(&self) -> State {
        let blocks: Vec<CMat> = self.spectra.iter().map(|s| s.exp_scaled(c(-self.beta, 0.0))).collect();
        let z: f64 = blocks.iter().map(|b| linalg::trace(b).re).sum();
        let blocks = blocks.into_iter().map(|b| b / c(z, 0.0)).collect();
        State::new(self.h.algebra(), blocks).expect("Gibbs density is positive")
    }
}

/// `e^{-βH}/Z`, the KMS state of `Ad(e^{itH})` at inverse temperature β.
pub fn gibbs_state(h: &Element, beta: f64) -> Result<State> {
    Ok(Dynamics::new(h.clone(), beta)?.gibbs())
}

/// KMS boundary residual `|F(t+iβ) − φ(α_t(a) b)|` with `F(z) = φ(b α_z(a))`.
///
/// Both sides are evaluated in the eigenbasis of `H`.
pub fn kms_check(phi: &State, dynamics: &Dynamics, a: &Element, b: &Element, t: f64) -> Result<f64> {
    phi.require_faithful("kms_check")?;
    let z = c(t, dynamics.beta());
    let lhs = phi.eval(&(b * &dynamics.evolve(a, z)));
    let rhs = phi.eval(&(&dynamics.evolve(a, c(t, 0.0)) * b));
    Ok((lhs - rhs).norm())
}

/// GNS data of a faithful state on `⊕ M_{n_j}` realized on the Hilbert–Schmidt
/// space `⊕ M_{n_j}` with left multiplication and `ξ = D^{1/2}/√φ(1)`.
#[derive(Clone, Debug)]
pub struct GnsSpace {
    state: State,
    offsets: Vec<usize>,
    xi: CVec,
    delta: CMat,
    log_delta: CMat,
}

/// Superoperator `X ↦ A X B` on row-major vectorized `n×n` blocks.
fn sandwich(a: &CMat, b: &CMat) -> CMat {
    linalg::kron(a, &b.transpose())
}

impl GnsSpace {
    pub fn state(&self) -> &State {
        &self.state
    }

    pub fn dim(&self) -> usize {
        self.xi.len()
    }

    pub fn xi(&self) -> &CVec {
        &self.xi
    }

    /// Modular operator `Δ = L(D) R(D^{-1})`.
    pub fn delta(&self) -> &CMat {
        &self.delta
    }

    pub fn log_delta(&self) -> &CMat {
        &self.log_delta
    }

    fn block_super<F: Fn(usize, &CMat) -> CMat>(&self, alg: &MatrixAlgebra, f: F) -> CMat {
        let n = self.dim();
        let mut m = CMat::zeros(n, n);
        for (j, &nj) in alg.blocks().iter().enumerate() {
            let off = self.offsets[j];
            let s = f(j, &linalg::eye(nj));
            m.view_mut((off, off), (nj * nj, nj * nj)).copy_from(&s);
        }
        m
    }

    /// `π(a)`: left multiplication.
    pub fn pi(&self, a: &Element) -> CMat {
        self.block_super(a.algebra(), |j, one| sandwich(a.block(j), one))
    }

    /// Right multiplication by `a`, which generates the commutant `π(𝔄)′`.
    pub fn right(&self, a: &Element) -> CMat {
        self.block_super(a.algebra(), |j, one| sandwich(one, a.block(j)))
    }

    pub fn vector(&self, x: &Element) -> CVec {
        let mut v = CVec::zeros(self.dim());
        for (j, b) in x.blocks().iter().enumerate() {
            let vb = linalg::vec_row_major(b);
            v.rows_mut(self.offsets[j], vb.len()).copy_from(&vb);
        }
        v
    }

    pub fn element(&self, v: &CVec) -> Element {
        let alg = self.state.algebra();
        let blocks = alg
            .blocks()
            .iter()
            .enumerate()
            .map(|(j, &n)| linalg::unvec_row_major(&v.as_slice()[self.offsets[j]..self.offsets[j] + n * n], n, n))
            .collect();
        Element::new(alg, blocks).expect("shapes match")
    }

    /// `⟨x, y⟩`, linear in the first slot.
    pub fn inner(&self, x: &CVec, y: &CVec) -> Complex64 {
        y.dotc(x)
    }

    /// Modular conjugation `JX = X*` (antilinear).
    pub fn apply_j(&self, v: &CVec) -> CVec {
        self.vector(&self.element(v).adjoint())
    }

    /// `Δ^{it}`.
    pub fn modular_unitary(&self, t: f64) -> CMat {
        let d = self.state.density_element();
        let dit = d.map_blocks(|_, b| Spectral::new(b).power(c(0.0, t)));
        let dmit = d.map_blocks(|_, b| Spectral::new(b).power(c(0.0, -t)));
        self.block_super(d.algebra(), |j, _| sandwich(dit.block(j), dmit.block(j)))
    }

    /// `σ^φ_t(a) = D^{it} a D^{-it}`.
    pub fn modular_automorphism(&self, a: &Element, t: f64) -> Element {
        let d = self.state.density_element();
        let dit = d.map_blocks(|_, b| Spectral::new(b).power(c(0.0, t)));
        &(&dit * a) * &dit.adjoint()
    }

    /// `-β^{-1} log Δ`; for a β-Gibbs state of `H` this is `ad H = [H, ·]`.
    pub fn hamiltonian(&self, beta: f64) -> CMat {
        &self.log_delta * c(-1.0 / beta, 0.0)
    }

    /// Rank of the span of `{π(E_kl)ξ}` over all matrix units.
    pub fn cyclic_rank(&self) -> usize {
        self.span_rank(|e| self.pi(e) * &self.xi)
    }

    /// Rank of the span of `{π(E_kl)′ξ}` for the commutant.
    pub fn separating_rank(&self) -> usize {
        self.span_rank(|e| self.right(e) * &self.xi)
    }

    fn span_rank<F: Fn(&Element) -> CVec>(&self, f: F) -> usize {
        let alg = self.state.algebra();
        let mut cols = Vec::new();
        for (j, &n) in alg.blocks().iter().enumerate() {
            for k in 0..n {
                for l in 0..n {
                    let mut e = Element::zero(alg);
                    e.blocks[j][(k, l)] = ONE;
                    cols.push(f(&e));
                }
            }
        }
        let m = CMat::from_columns(&cols);
        linalg::rank(&m, 1e-10)
    }
}

pub fn gns(phi: &State) -> Result<GnsSpace> {
    phi.require_faithful("gns")?;
    let alg = phi.algebra().clone();
    let mut offsets = Vec::new();
    let mut off = 0;
    for &n in alg.blocks() {
        offsets.push(off);
        off += n * n;
    }
    let total = off;
    let mut xi = CVec::zeros(total);
    let mut delta = CMat::zeros(total, total);
    let mut log_delta = CMat::zeros(total, total);
    let w = phi.weight();
    for (j, d) in phi.densities().iter().enumerate() {
        let n = d.nrows();
        let s = Spectral::new(d);
        let root = s.power(c(0.5, 0.0)) / c(w.sqrt(), 0.0);
        xi.rows_mut(offsets[j], n * n).copy_from(&linalg::vec_row_major(&root));
        let inv = s.power(c(-1.0, 0.0));
        delta
            .view_mut((offsets[j], offsets[j]), (n * n, n * n))
            .copy_from(&sandwich(d, &inv));
        let lg = s.log();
        let one = linalg::eye(n);
        let ld = sandwich(&lg, &one) - sandwich(&one, &lg);
        log_delta.view_mut((offsets[j], offsets[j]), (n * n, n * n)).copy_from(&ld);
    }
    Ok(GnsSpace { state: phi.clone(), offsets, xi, delta, log_delta })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RelativeEntropy {
    /// Nats; `+∞` when the support condition fails.
    pub value: f64,
    pub support_violation: bool,
}

/// `S(φ|ψ) = Σ_j Tr D_φ (log D_φ − log D_ψ)`.
pub fn relative_entropy(phi: &State, psi: &State) -> Result<RelativeEntropy> {
    if phi.algebra() != psi.algebra() {
        return domain("relative entropy of states on different algebras");
    }
    let mut total = 0.0;
    for (dp, dq) in phi.densities().iter().zip(psi.densities()) {
        let sp = Spectral::new(dp);
        let sq = Spectral::new(dq);
        let cut = 1e-13 * sq.max().max(sp.max()).max(1e-300);
        // component of D_φ on ker D_ψ
        let kernel = sq.apply(|x| if x > cut { ZERO } else { ONE });
        let leak = linalg::trace(&(&kernel * dp)).re;
        if leak > 1e-11 * sp.max().max(1e-300) {
            return Ok(RelativeEntropy { value: f64::INFINITY, support_violation: true });
        }
        let self_term: f64 = sp.values.iter().filter(|&&x| x > cut).map(|&x| x * x.ln()).sum();
        let cross = linalg::trace(&(dp * sq.log())).re;
        total += self_term - cross;
    }
    Ok(RelativeEntropy { value: total, support_violation: false })
}

/// Multiplicities of the irreducible block representations in a
/// representation of `⊕ M_{n_j}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepDescriptor {
    pub algebra: MatrixAlgebra,
    pub multiplicities: Vec<usize>,
}

impl RepDescriptor {
    pub fn new(algebra: &MatrixAlgebra, multiplicities: Vec<usize>) -> Result<Self> {
        if multiplicities.len() != algebra.num_blocks() {
            return domain("one multiplicity per block is required");
        }
        Ok(RepDescriptor { algebra: algebra.clone(), multiplicities })
    }

    /// The GNS representation of φ contains block `j` with multiplicity
    /// `rank D_j`.
    pub fn of_state(phi: &State) -> RepDescriptor {
        let multiplicities = phi
            .densities()
            .iter()
            .map(|d| {
                let s = Spectral::new(d);
                let top = s.max().max(1e-300);
                s.values.iter().filter(|&&x| x > FAITHFUL_CUTOFF * top && x > 0.0).count()
            })
            .collect();
        RepDescriptor { algebra: phi.algebra().clone(), multiplicities }
    }

    pub fn direct_sum(&self, other: &RepDescriptor) -> Result<RepDescriptor> {
        if self.algebra != other.algebra {
            return domain("direct sum over different algebras");
        }
        let m = self.multiplicities.iter().zip(&other.multiplicities).map(|(a, b)| a + b).collect();
        Ok(RepDescriptor { algebra: self.algebra.clone(), multiplicities: m })
    }

    pub fn central_support(&self) -> Vec<bool> {
        self.multiplicities.iter().map(|&m| m > 0).collect()
    }
}

/// Equal central supports.
pub fn quasi_equivalent(a: &RepDescriptor, b: &RepDescriptor) -> Result<bool> {
    if a.algebra != b.algebra {
        return Err(Error::Domain("representations of different algebras".into()));
    }
    Ok(a.central_support() == b.central_support())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn gibbs_of_zero_is_tracial() {
        let h = Element::zero(&MatrixAlgebra::full(2));
        let s = gibbs_state(&h, 1.0).unwrap();
        assert!((s.densities()[0][(0, 0)].re - 0.5).abs() < 1e-15);
        assert!((s.weight() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_inputs() {
        let m = linalg::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(gibbs_state(&Element::from_matrix(m), 1.0).is_err());
        let h = Element::zero(&MatrixAlgebra::full(2));
        assert!(gibbs_state(&h, 0.0).is_err());
        assert!(gibbs_state(&h, -1.0).is_err());
        assert!(MatrixAlgebra::new(vec![]).is_err());
        assert!(MatrixAlgebra::new(vec![2, 0]).is_err());
    }

    #[test]
    fn gns_vector_reproduces_state() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        let alg = MatrixAlgebra::new(vec![2, 3]).unwrap();
        let phi = State::random_faithful(&mut rng, &alg).scaled(2.5);
        let g = gns(&phi).unwrap();
        let a = Element::random(&mut rng, &alg);
        let lhs = g.inner(&(g.pi(&a) * g.xi()), g.xi());
        let rhs = phi.eval(&a) / phi.weight();
        assert!((lhs - rhs).norm() < 1e-12);
        assert!(linalg::max_abs(&CMat::from_column_slice(g.dim(), 1, (g.apply_j(g.xi()) - g.xi()).as_slice())) < 1e-12);
        assert_eq!(g.cyclic_rank(), 13);
        assert_eq!(g.separating_rank(), 13);
    }

    #[test]
    fn non_faithful_rejected() {
        let s = State::from_density(linalg::diag_real(&[1.0, 0.0])).unwrap();
        assert!(gns(&s).is_err());
        let dynamics = Dynamics::new(Element::zero(&MatrixAlgebra::full(2)), 1.0).unwrap();
        let a = Element::identity(&MatrixAlgebra::full(2));
        assert!(kms_check(&s, &dynamics, &a, &a, 0.0).is_err());
    }
}
