//! Oracles shared by the integration tests. Nothing here calls into the
//! library's numerics, so agreement with the library is a real cross-check.

#![allow(dead_code)]

use num::{BigInt, BigRational, One, ToPrimitive};

pub fn phi_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let flm = f(0.5 * (a + m));
    let frm = f(0.5 * (m + b));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
        return left + right + (left + right - whole) / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 48)
}

/// `∫_{−12}^{12} |F − Φ|` for atoms/weights in any order, by quadrature
/// between consecutive atoms (where the integrand is continuous).
pub fn w1_quadrature(atoms: &[f64], weights: &[f64]) -> f64 {
    let total: f64 = weights.iter().sum();
    let mut pts: Vec<f64> = atoms.iter().copied().filter(|x| x.abs() < 12.0).collect();
    pts.push(-12.0);
    pts.push(12.0);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut sum = 0.0;
    for w in pts.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        let level: f64 = atoms
            .iter()
            .zip(weights)
            .filter(|(x, _)| **x <= mid)
            .map(|(_, w)| w / total)
            .sum();
        sum += adaptive_simpson(&|x| (level - phi_cdf(x)).abs(), w[0], w[1], 1e-13);
    }
    sum
}

/// `a_n = (n − 1)! / Π_{j=0}^{n−2} (2p + j)` exactly.
pub fn rational_a(n: u64, p: &BigRational) -> BigRational {
    let two_p = p * BigRational::from_integer(BigInt::from(2));
    let mut a = BigRational::one();
    for k in 1..n {
        let k_r = BigRational::from_integer(BigInt::from(k));
        a = a * &k_r / (&k_r + &two_p - BigRational::one());
    }
    a
}

pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().expect("finite")
}

/// Two-sample Kolmogorov–Smirnov statistic for integer samples.
pub fn ks_statistic(a: &[i64], b: &[i64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_unstable();
    b.sort_unstable();
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] == x {
            i += 1;
        }
        while j < b.len() && b[j] == x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}
