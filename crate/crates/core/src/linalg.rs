//! Dense complex linear algebra helpers shared by every module.
//!
//! Analytic functions of Hermitian matrices are always evaluated through an
//! eigendecomposition, so that complex powers such as `D^{iz}` stay entire in `z`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn eye(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn from_real_rows(rows: &[&[f64]]) -> CMat {
    let r = rows.len();
    let cols = if r == 0 { 0 } else { rows[0].len() };
    CMat::from_fn(r, cols, |i, j| c(rows[i][j], 0.0))
}

pub fn diag_real(d: &[f64]) -> CMat {
    CMat::from_diagonal(&CVec::from_iterator(d.len(), d.iter().map(|&x| c(x, 0.0))))
}

pub fn trace(m: &CMat) -> Complex64 {
    m.diagonal().iter().sum()
}

/// Largest singular value.
pub fn op_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    m.clone().svd(false, false).singular_values.iter().cloned().collect()
}

/// Numerical rank with a relative cutoff on the singular values.
pub fn rank(m: &CMat, rel_tol: f64) -> usize {
    let sv = singular_values(m);
    let top = sv.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * top.max(1.0)).count()
}

pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()) * c(0.5, 0.0)
}

pub fn hermiticity_defect(m: &CMat) -> f64 {
    (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn is_hermitian(m: &CMat, tol: f64) -> bool {
    m.is_square() && hermiticity_defect(m) <= tol * (1.0 + max_abs(m))
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

pub fn anticommutator(a: &CMat, b: &CMat) -> CMat {
    a * b + b * a
}

/// Spectral decomposition `m = U diag(λ) U*` of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct Spectral {
    pub values: Vec<f64>,
    pub vectors: CMat,
}

impl Spectral {
    pub fn new(m: &CMat) -> Self {
        let h = hermitian_part(m);
        let eig = SymmetricEigen::new(h);
        Spectral {
            values: eig.eigenvalues.iter().cloned().collect(),
            vectors: eig.eigenvectors,
        }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn apply<F: Fn(f64) -> Complex64>(&self, f: F) -> CMat {
        let u = &self.vectors;
        let mut scaled = u.clone();
        for (j, &lam) in self.values.iter().enumerate() {
            let fj = f(lam);
            for i in 0..u.nrows() {
                scaled[(i, j)] *= fj;
            }
        }
        scaled * u.adjoint()
    }

    /// `m^{z}` on the support; kernel directions are mapped to zero.
    pub fn power(&self, z: Complex64) -> CMat {
        let cut = self.support_cut();
        self.apply(|x| if x > cut { Complex64::from(x).powc(z) } else { ZERO })
    }

    /// `e^{z m}`.
    pub fn exp_scaled(&self, z: Complex64) -> CMat {
        self.apply(|x| (z * x).exp())
    }

    pub fn log(&self) -> CMat {
        let cut = self.support_cut();
        self.apply(|x| if x > cut { c(x.ln(), 0.0) } else { ZERO })
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    fn support_cut(&self) -> f64 {
        1e-14 * self.max().abs().max(1e-300)
    }
}

pub fn herm_fn<F: Fn(f64) -> Complex64>(m: &CMat, f: F) -> CMat {
    Spectral::new(m).apply(f)
}

/// `∫ exp(-Σ_k s_k λ_k) ds` over the standard simplex `{s_k ≥ 0, Σ s_k = 1}`.
///
/// Hermite–Genocchi turns the integral into a divided difference of `e^{-x}`,
/// which is read off the corner of `exp(-J)` for the bidiagonal `J`.
pub fn simplex_exp_integral(lams: &[f64]) -> f64 {
    let n = lams.len();
    match n {
        0 => return 0.0,
        1 => return (-lams[0]).exp(),
        _ => {}
    }
    // exp(-J) for J = diag(λ) + superdiagonal ones; its corner is the divided
    // difference of e^{-x}, and the integral is (-1)^{n-1} times that.
    let mut j = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        j[(k, k)] = -lams[k];
        if k + 1 < n {
            j[(k, k + 1)] = -1.0;
        }
    }
    let corner = j.exp()[(0, n - 1)];
    if (n - 1) % 2 == 0 {
        corner
    } else {
        -corner
    }
}

pub fn random_complex<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re, im)
    })
}

pub fn random_real<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        c(re, 0.0)
    })
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMat {
    hermitian_part(&random_complex(rng, n, n))
}

pub fn random_real_symmetric<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMat {
    hermitian_part(&random_real(rng, n, n))
}

/// Haar-distributed unitary from the QR decomposition of a Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMat {
    let g = random_complex(rng, n, n);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        for i in 0..n {
            q[(i, j)] *= ph;
        }
    }
    q
}

pub fn random_orthogonal<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMat {
    let g = random_real(rng, n, n).map(|z| z.re);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q.map(|x| c(x, 0.0))
}

/// Full-rank density matrix with trace one and spectrum bounded away from zero.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMat {
    let g = random_complex(rng, n, n);
    let m = &g * g.adjoint() + eye(n) * c(0.05 * n as f64, 0.0);
    let t = trace(&m);
    m / t
}

pub fn vec_row_major(m: &CMat) -> CVec {
    let (r, cc) = m.shape();
    CVec::from_fn(r * cc, |k, _| m[(k / cc, k % cc)])
}

pub fn unvec_row_major(v: &[Complex64], rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |i, j| v[i * cols + j])
}
