//! Invariant suite run by `erw verify`.
//!
//! Every check returns a [`CheckOutcome`]; the suite never panics on a
//! failed invariant so a full report is always produced.

use rand::Rng;
use serde::Serialize;

use crate::coefficients::{a_via_loggamma, CoefficientTable, WalkParams};
use crate::distance::w1_to_normal;
use crate::distribution::DiscreteDistribution;
use crate::martingale::{
    martingale_mean_mc, martingale_trace, one_step_moments, qv_closed_form, FirstIncrement,
};
use crate::rng::{derive_seed, replicate_rng};
use crate::special::normal_cdf;
use crate::walk::{enumerate_histories, exact_dp, simulate_path, ExactDp, SimMode};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Problem sizes for one run of the suite.
#[derive(Debug, Clone, Copy)]
pub struct VerifySizes {
    pub coeff_n: u64,
    pub dp_n: u64,
    pub enumeration_n: u64,
    pub paths: u64,
    pub path_n: u64,
    pub moment_n: u64,
    pub quadrature_cases: u64,
    pub mean_reps: u64,
}

impl VerifySizes {
    pub fn quick() -> Self {
        VerifySizes {
            coeff_n: 10_000,
            dp_n: 1_000,
            enumeration_n: 8,
            paths: 500,
            path_n: 200,
            moment_n: 200,
            quadrature_cases: 20,
            mean_reps: 20_000,
        }
    }

    pub fn full() -> Self {
        VerifySizes {
            coeff_n: 1_000_000,
            dp_n: 5_000,
            enumeration_n: 12,
            paths: 10_000,
            path_n: 1_000,
            moment_n: 500,
            quadrature_cases: 100,
            mean_reps: 200_000,
        }
    }
}

const SWEEP_P: [f64; 8] = [0.1, 0.2, 0.3, 0.4, 0.6, 0.7, 0.8, 0.9];

fn outcome(name: &'static str, passed: bool, detail: String) -> CheckOutcome {
    CheckOutcome {
        name,
        passed,
        detail,
    }
}

/// Recurrence against the Gamma-quotient route at every k.
pub fn check_coefficients(n: u64) -> CheckOutcome {
    let mut worst = 0.0f64;
    for &p in &SWEEP_P {
        let table = CoefficientTable::new(p, n).expect("valid p");
        for k in 1..=n {
            let direct = a_via_loggamma(k, p).expect("valid p");
            worst = worst.max((table.a(k as usize) / direct - 1.0).abs());
        }
    }
    outcome(
        "coefficients: recurrence vs log-gamma",
        worst < 1e-9,
        format!("max relative error {worst:.3e} over n <= {n}"),
    )
}

pub fn check_dp_conservation(n: u64) -> CheckOutcome {
    let mut worst = 0.0f64;
    for &(p, q) in &[(0.2, 0.5), (0.6, 0.3), (0.75, 0.9), (0.9, 1.0)] {
        let mut dp = ExactDp::new(p, q);
        while dp.time() < n {
            dp.step();
            worst = worst.max((dp.total_mass() - 1.0).abs());
        }
    }
    outcome(
        "walk: DP mass conservation",
        worst <= 1e-12,
        format!("max |mass - 1| {worst:.3e} over n <= {n}"),
    )
}

pub fn check_enumeration(max_n: u64) -> CheckOutcome {
    let mut worst = 0.0f64;
    let mut shape_ok = true;
    for &(p, q) in &[(0.75, 0.5), (0.3, 0.2), (0.6, 1.0)] {
        for n in 1..=max_n {
            let params = WalkParams::new(p, q, n).expect("valid params");
            let brute = enumerate_histories(&params).expect("small n");
            let dp = exact_dp(&params, n)
                .and_then(|d| d.to_distribution())
                .expect("small n");
            shape_ok &= brute.atoms() == dp.atoms();
            if shape_ok {
                for (a, b) in brute.weights().iter().zip(dp.weights()) {
                    worst = worst.max((a - b).abs());
                }
            }
        }
    }
    outcome(
        "walk: DP vs exhaustive history enumeration",
        shape_ok && worst <= 1e-12,
        format!("max atom discrepancy {worst:.3e} for n <= {max_n}"),
    )
}

pub fn check_increment_bound(paths: u64, n: u64, seed: u64) -> CheckOutcome {
    let mut violations = 0u64;
    let mut worst = 0.0f64;
    for (i, &p) in [0.25, 0.6, 0.75].iter().enumerate() {
        let params = WalkParams::new(p, 0.5, n).expect("valid params");
        let table = CoefficientTable::new(p, n).expect("valid p");
        let stream_seed = derive_seed(seed, i as u64);
        for r in 0..paths {
            let path = simulate_path(&params, SimMode::Marginal, stream_seed, r);
            let tr = martingale_trace(&path, &table, 0.5, FirstIncrement::Unit)
                .expect("matching lengths");
            for (dm, a) in tr.dm.iter().zip(&table.a) {
                let ratio = dm.abs() / (2.0 * a);
                worst = worst.max(ratio);
                if dm.abs() > 2.0 * a {
                    violations += 1;
                }
            }
        }
    }
    outcome(
        "martingale: |dM_i| <= 2 a_i pathwise",
        violations == 0,
        format!("{violations} violations, max |dM_i|/(2a_i) = {worst:.6}"),
    )
}

pub fn check_conditional_moments(n: u64) -> CheckOutcome {
    let mut worst = 0.0f64;
    for &p in &[0.25, 0.6, 0.75] {
        let table = CoefficientTable::new(p, n).expect("valid p");
        for k_prev in 1..n {
            let g = table.gamma(k_prev as usize);
            for j in 0..=k_prev {
                let s = 2 * j as i64 - k_prev as i64;
                let (mean, second) = one_step_moments(p, k_prev, s).expect("lattice state");
                let sf = s as f64;
                let want_mean = g * sf;
                let want_second = (2.0 * g - 1.0) * sf * sf + 1.0;
                worst = worst
                    .max((mean - want_mean).abs() / want_mean.abs().max(1.0))
                    .max((second - want_second).abs() / want_second.abs().max(1.0));
            }
        }
    }
    outcome(
        "martingale: conditional moments on every lattice state",
        worst <= 1e-12,
        format!("max relative deviation {worst:.3e} up to n = {n}"),
    )
}

pub fn check_qv_closed_form(paths: u64, n: u64, seed: u64) -> CheckOutcome {
    let mut worst = 0.0f64;
    for (i, &(p, q)) in [(0.3, 0.5), (0.6, 0.8), (0.75, 0.2)].iter().enumerate() {
        let params = WalkParams::new(p, q, n).expect("valid params");
        let table = CoefficientTable::new(p, n).expect("valid p");
        let stream_seed = derive_seed(seed, 100 + i as u64);
        for r in 0..paths {
            let path = simulate_path(&params, SimMode::Marginal, stream_seed, r);
            let tr = martingale_trace(&path, &table, q, FirstIncrement::Unit)
                .expect("matching lengths");
            let closed = qv_closed_form(&path, &table).expect("matching lengths");
            let acc = *tr.qv.last().unwrap();
            worst = worst.max((closed / acc - 1.0).abs());
        }
    }
    outcome(
        "martingale: <M>_n closed form along paths",
        worst <= 1e-10,
        format!("max relative deviation {worst:.3e}"),
    )
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive(
    f: &impl Fn(f64) -> f64,
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
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + adaptive(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// Adaptive Simpson quadrature of `f` on `[a, b]`.
pub fn adaptive_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = simpson(a, b, fa, fm, fb);
    adaptive(&f, a, b, fa, fm, fb, whole, tol, 40)
}

/// `∫_{−12}^{12} |F − Φ|` by quadrature, breaking at the atoms.
pub fn w1_by_quadrature(dist: &DiscreteDistribution) -> f64 {
    let mut breaks = vec![-12.0];
    breaks.extend(dist.atoms().iter().copied().filter(|x| x.abs() < 12.0));
    breaks.push(12.0);
    let mut total = 0.0;
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let mid = 0.5 * (a + b);
        let level: f64 = dist.iter().filter(|&(x, _)| x <= mid).map(|(_, w)| w).sum();
        total += adaptive_simpson(|x| (level - normal_cdf(x)).abs(), a, b, 1e-13);
    }
    total
}

pub fn random_distribution<R: Rng>(rng: &mut R) -> DiscreteDistribution {
    let m = rng.random_range(1..=20);
    let atoms: Vec<f64> = (0..m).map(|_| rng.random_range(-5.0..5.0)).collect();
    let weights: Vec<f64> = (0..m).map(|_| rng.random_range(0.01..1.0)).collect();
    DiscreteDistribution::new(atoms, weights).expect("positive weights")
}

pub fn check_quadrature(cases: u64, seed: u64) -> CheckOutcome {
    let mut rng = replicate_rng(seed, 7);
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let dist = random_distribution(&mut rng);
        let closed = w1_to_normal(&dist).expect("nonempty").value;
        worst = worst.max((closed - w1_by_quadrature(&dist)).abs());
    }
    outcome(
        "distance: closed form vs adaptive quadrature",
        worst <= 1e-8,
        format!("max abs difference {worst:.3e} over {cases} random laws"),
    )
}

pub fn check_martingale_mean(reps: u64, seed: u64) -> CheckOutcome {
    let mut worst = 0.0f64;
    for (i, &(p, q)) in [(0.3, 0.3), (0.3, 0.9), (0.75, 0.5), (0.75, 0.9)]
        .iter()
        .enumerate()
    {
        let params = WalkParams::new(p, q, 100).expect("valid params");
        let est = martingale_mean_mc(&params, reps, derive_seed(seed, 200 + i as u64))
            .expect("valid params");
        worst = worst.max(est.mean.abs() / est.stderr);
    }
    outcome(
        "martingale: E[M_n] = 0 (Monte Carlo)",
        worst <= 4.0,
        format!("max |mean|/stderr {worst:.3} with {reps} replicates"),
    )
}

/// Runs every check at the given sizes.
pub fn run_suite(sizes: VerifySizes, seed: u64) -> Vec<CheckOutcome> {
    vec![
        check_coefficients(sizes.coeff_n),
        check_dp_conservation(sizes.dp_n),
        check_enumeration(sizes.enumeration_n),
        check_increment_bound(sizes.paths, sizes.path_n, seed),
        check_conditional_moments(sizes.moment_n),
        check_qv_closed_form(sizes.paths.min(1_000), sizes.path_n, seed),
        check_quadrature(sizes.quadrature_cases, seed),
        check_martingale_mean(sizes.mean_reps, seed),
    ]
}
