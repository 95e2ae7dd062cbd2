#![allow(dead_code)]

use modindex::linalg::{self, CMat};
use modindex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Scaling-and-squaring Taylor exponential. Deliberately avoids any
/// eigendecomposition so it can serve as an oracle for the library.
pub fn expm(a: &CMat) -> CMat {
    let n = a.nrows();
    let norm = a.iter().map(|z| z.norm()).sum::<f64>().max(1e-300);
    let mut s = 0u32;
    while norm / 2f64.powi(s as i32) > 0.25 {
        s += 1;
    }
    let b = a / c(2f64.powi(s as i32), 0.0);
    let mut term = CMat::identity(n, n);
    let mut sum = term.clone();
    for k in 1..30 {
        term = &term * &b / c(k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

/// `e^{z H}` by Taylor series.
pub fn exp_times(h: &CMat, z: Complex64) -> CMat {
    expm(&(h * z))
}

pub fn tr(m: &CMat) -> Complex64 {
    m.trace()
}

pub fn dist(a: &CMat, b: &CMat) -> f64 {
    linalg::op_norm(&(a - b))
}

pub fn diag(d: &[f64]) -> CMat {
    linalg::diag_real(d)
}

/// Newton-free principal log of a positive matrix via inverse scaling and
/// squaring: repeated square roots by Denman–Beavers, then a Gregory series.
pub fn logm_pd(a: &CMat) -> CMat {
    let n = a.nrows();
    let mut x = a.clone();
    let mut k = 0;
    while dist(&x, &CMat::identity(n, n)) > 0.05 {
        x = sqrtm_db(&x);
        k += 1;
    }
    let e = &x - CMat::identity(n, n);
    let mut term = e.clone();
    let mut sum = CMat::zeros(n, n);
    for j in 1..60 {
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        sum += &term * c(sign / j as f64, 0.0);
        term = &term * &e;
    }
    sum * c(2f64.powi(k), 0.0)
}

pub fn sqrtm_db(a: &CMat) -> CMat {
    let n = a.nrows();
    let mut y = a.clone();
    let mut z = CMat::identity(n, n);
    for _ in 0..60 {
        let yi = y.clone().try_inverse().unwrap();
        let zi = z.clone().try_inverse().unwrap();
        let y2 = (&y + &zi) * c(0.5, 0.0);
        let z2 = (&z + &yi) * c(0.5, 0.0);
        let done = dist(&y2, &y) < 1e-15 * (1.0 + linalg::op_norm(&y));
        y = y2;
        z = z2;
        if done {
            break;
        }
    }
    y
}
