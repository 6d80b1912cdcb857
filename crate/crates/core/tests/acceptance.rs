//! Acceptance suite. Runs every criterion at its stated tolerance, prints
//! one line per criterion and exits nonzero if any of them fails.

mod common;

use std::process::Command;
use std::time::Instant;

use erw::coefficients::ratios_at;
use erw::martingale::{martingale_mean_mc, one_step_moments};
use erw::rng::{derive_seed, replicate_rng, DEFAULT_SEED};
use erw::walk::{enumerate_histories, exact_dp, simulate_terminal};
use erw::{
    a_via_loggamma, empirical_distribution, martingale_trace, normalize_distribution,
    qv_deviation_mc, simulate_path, w1_between, w1_scan_exact, w1_to_normal, CoefficientTable,
    DiscreteDistribution, FirstIncrement, SimMode, WalkParams,
};
use rand::Rng;

struct Verdict {
    passed: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Verdict);

fn verdict(passed: bool, detail: String) -> Verdict {
    Verdict { passed, detail }
}

const SWEEP: [f64; 8] = [0.1, 0.2, 0.3, 0.4, 0.6, 0.7, 0.8, 0.9];

fn coefficient_cross_validation() -> Verdict {
    let start = Instant::now();
    let n = 1_000_000u64;
    let mut worst = 0.0f64;
    for p in SWEEP {
        let table = CoefficientTable::new(p, n).unwrap();
        for k in 1..=n {
            let direct = a_via_loggamma(k, p).unwrap();
            worst = worst.max((table.a(k as usize) / direct - 1.0).abs());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        worst < 1e-9 && secs < 5.0,
        format!("max relative error {worst:.2e} over all k <= 10^6, {secs:.2} s"),
    )
}

fn asymptotics() -> Verdict {
    let n = 1_000_000usize;
    let mut ok = true;
    let mut parts = Vec::new();
    for p in [0.3, 0.65] {
        let r = ratios_at(&CoefficientTable::new(p, n as u64).unwrap(), n).unwrap();
        ok &= (r.a_ratio - 1.0).abs() < 0.02;
        parts.push(format!("a-ratio(p={p}) {:.7}", r.a_ratio));
        if p == 0.3 {
            ok &= (r.v_ratio - 1.0).abs() < 0.05;
            parts.push(format!("v-ratio(p=0.3) {:.7}", r.v_ratio));
        }
    }
    let crit = ratios_at(&CoefficientTable::new(0.75, n as u64).unwrap(), n)
        .unwrap()
        .v_ratio;
    let quarter_pi = std::f64::consts::FRAC_PI_4;
    let off = crit / quarter_pi - 1.0;
    ok &= off.abs() < 0.03;
    parts.push(format!(
        "v_n/ln n at p=3/4 is {crit:.5}: {:+.2}% from pi/4, {:+.2}% from 3/4",
        100.0 * off,
        100.0 * (crit / 0.75 - 1.0)
    ));
    verdict(ok, parts.join("; "))
}

fn oracle_equivalence() -> Verdict {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut same_support = true;
    for (p, q) in [(0.6, 0.5), (0.25, 0.8), (0.75, 0.3), (0.9, 1.0)] {
        for n in 1..=12 {
            let params = WalkParams::new(p, q, n).unwrap();
            let brute = enumerate_histories(&params).unwrap();
            let dp = exact_dp(&params, n).unwrap().to_distribution().unwrap();
            same_support &= brute.atoms() == dp.atoms();
            for (a, b) in brute.weights().iter().zip(dp.weights()) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    let params = WalkParams::new(0.6, 0.5, 200).unwrap();
    let table = CoefficientTable::new(0.6, 200).unwrap();
    let exact = normalize_distribution(
        &exact_dp(&params, 200).unwrap().to_distribution().unwrap(),
        &table,
        0.5,
        false,
    )
    .unwrap();
    let ends: Vec<f64> = simulate_terminal(&params, SimMode::Marginal, 100_000, DEFAULT_SEED)
        .into_iter()
        .map(|s| s as f64)
        .collect();
    let empirical =
        normalize_distribution(&empirical_distribution(&ends).unwrap(), &table, 0.5, false)
            .unwrap();
    let gap = w1_between(&empirical, &exact);
    let secs = start.elapsed().as_secs_f64();
    verdict(
        same_support && worst <= 1e-12 && gap < 0.02 && secs < 10.0,
        format!("enumeration vs DP max {worst:.2e} (n <= 12); empirical vs DP W1 {gap:.5} at n = 200; {secs:.2} s"),
    )
}

fn exact_w1_engine() -> Verdict {
    let mut rng = replicate_rng(DEFAULT_SEED, 4);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let m = rng.random_range(1..=20);
        let atoms: Vec<f64> = (0..m).map(|_| rng.random_range(-5.0..5.0)).collect();
        let weights: Vec<f64> = (0..m).map(|_| rng.random_range(0.001..1.0)).collect();
        let d = DiscreteDistribution::new(atoms.clone(), weights.clone()).unwrap();
        let closed = w1_to_normal(&d).unwrap().value;
        worst = worst.max((closed - common::w1_quadrature(&atoms, &weights)).abs());
    }
    let origin = w1_to_normal(&DiscreteDistribution::point_mass(0.0).unwrap())
        .unwrap()
        .value;
    let origin_err = (origin - (2.0 / std::f64::consts::PI).sqrt()).abs();
    verdict(
        worst < 1e-8 && origin_err < 1e-12,
        format!("max |closed - quadrature| {worst:.2e} on 100 laws; point mass at 0 off by {origin_err:.1e}"),
    )
}

fn regime_scans() -> Verdict {
    let start = Instant::now();
    let ns: Vec<u64> = (6..=13).map(|e| 1u64 << e).collect();
    let low = w1_scan_exact(0.3, 0.5, &ns, false).unwrap();
    let high = w1_scan_exact(0.65, 0.5, &ns, false).unwrap();
    let crit = w1_scan_exact(0.75, 0.5, &ns, false).unwrap();
    let s_low = low.fitted_slope.unwrap();
    let s_high = high.fitted_slope.unwrap();
    let decreasing = crit.w1.windows(2).all(|w| w[1] < w[0]);
    let secs = start.elapsed().as_secs_f64();
    verdict(
        (-0.65..=-0.40).contains(&s_low)
            && s_high <= -0.15
            && high.envelope_drift <= 1.5
            && decreasing
            && crit.envelope_drift <= 1.5
            && secs < 300.0,
        format!(
            "p=0.3 slope {s_low:.4}; p=0.65 slope {s_high:.4}, drift {:.3}; p=0.75 decreasing {decreasing}, drift {:.3}; {secs:.1} s",
            high.envelope_drift, crit.envelope_drift
        ),
    )
}

fn qv_decay() -> Verdict {
    let dev = |p: f64, n: u64, reps: u64| {
        let params = WalkParams::new(p, 0.5, n).unwrap();
        qv_deviation_mc(
            &params,
            reps,
            derive_seed(DEFAULT_SEED, n),
            FirstIncrement::Unit,
        )
        .unwrap()
    };
    let mid: Vec<_> = [100, 1_000, 10_000]
        .into_iter()
        .map(|n| dev(0.6, n, 100_000))
        .collect();
    let r1 = mid[0].mean / mid[1].mean;
    let r2 = mid[1].mean / mid[2].mean;
    // 2000 replicates at n = 10^6 keep this under half a minute on one core
    let lo = dev(0.75, 1_000, 2_000);
    let hi = dev(0.75, 1_000_000, 2_000);
    let r3 = lo.mean / hi.mean;
    let inside = |r: f64, a: f64, b: f64| (a..=b).contains(&r);
    verdict(
        inside(r1, 5.0, 20.0) && inside(r2, 5.0, 20.0) && inside(r3, 1.3, 3.0),
        format!(
            "p=0.6 means {:.3e}, {:.3e}, {:.3e} give ratios {r1:.3}, {r2:.3} (need [5, 20]); p=0.75 ratio {r3:.3} (need [1.3, 3])",
            mid[0].mean, mid[1].mean, mid[2].mean
        ),
    )
}

fn martingale_structure() -> Verdict {
    let n = 1_000u64;
    let mut violations = 0u64;
    let mut paths = 0u64;
    for (i, p) in [0.25, 0.6, 0.75].into_iter().enumerate() {
        let params = WalkParams::new(p, 0.5, n).unwrap();
        let table = CoefficientTable::new(p, n).unwrap();
        let reps = if i == 0 { 3_334 } else { 3_333 };
        for r in 0..reps {
            let path = simulate_path(
                &params,
                SimMode::Marginal,
                derive_seed(DEFAULT_SEED, i as u64),
                r,
            );
            let tr = martingale_trace(&path, &table, 0.5, FirstIncrement::Unit).unwrap();
            violations += tr
                .dm
                .iter()
                .zip(&table.a)
                .filter(|(d, a)| d.abs() > 2.0 * **a)
                .count() as u64;
            paths += 1;
        }
    }
    let mut worst_z = 0.0f64;
    for (i, (p, q)) in [(0.3, 0.5), (0.3, 0.9), (0.6, 0.2), (0.75, 0.5), (0.75, 1.0)]
        .into_iter()
        .enumerate()
    {
        let est = martingale_mean_mc(
            &WalkParams::new(p, q, 100).unwrap(),
            1_000_000,
            derive_seed(DEFAULT_SEED, 50 + i as u64),
        )
        .unwrap();
        worst_z = worst_z.max(est.mean.abs() / est.stderr);
    }
    let mut worst_moment = 0.0f64;
    for p in [0.25, 0.6, 0.75] {
        let table = CoefficientTable::new(p, 500).unwrap();
        for k in 1..500u64 {
            let g = table.gamma(k as usize);
            for j in 0..=k {
                let s = 2 * j as i64 - k as i64;
                let (mean, second) = one_step_moments(p, k, s).unwrap();
                let sf = s as f64;
                let want = (2.0 * g - 1.0) * sf * sf + 1.0;
                worst_moment = worst_moment
                    .max((mean - g * sf).abs() / sf.abs().max(1.0))
                    .max((second - want).abs() / want.max(1.0));
            }
        }
    }
    verdict(
        paths == 10_000 && violations == 0 && worst_z <= 4.0 && worst_moment <= 1e-12,
        format!(
            "{violations} bound violations on {paths} paths; max |mean M_n|/se {worst_z:.3}; conditional moments max rel. error {worst_moment:.2e}"
        ),
    )
}

fn run_bin(threads: &str, args: &[&str], out: Option<&std::path::Path>) -> Vec<u8> {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_erw"));
    cmd.args(["--threads", threads])
        .args(args)
        .env_remove("ERW_THREADS");
    if let Some(path) = out {
        cmd.arg("--out").arg(path);
    }
    let o = cmd.output().expect("binary runs");
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    match out {
        Some(path) => {
            let mut bytes = std::fs::read(path.with_extension("json")).unwrap();
            bytes.extend(std::fs::read(path.with_extension("csv")).unwrap());
            bytes
        }
        None => o.stdout,
    }
}

fn determinism() -> Verdict {
    let runs: [&[&str]; 6] = [
        &[
            "simulate", "--p", "0.6", "--q", "0.3", "--n", "500", "--reps", "20000", "--seed", "17",
        ],
        &[
            "simulate",
            "--p",
            "0.75",
            "--q",
            "0.5",
            "--n",
            "300",
            "--reps",
            "20000",
            "--literal",
            "--emit",
            "summary",
        ],
        &[
            "qv-scan", "--p", "0.6", "--q", "0.5", "--n-list", "50,500", "--reps", "5000",
            "--seed", "3",
        ],
        &[
            "--format",
            "json",
            "exact",
            "--p",
            "0.65",
            "--q",
            "0.4",
            "--n",
            "400",
            "--normalize",
            "--center",
        ],
        &[
            "rate-scan",
            "--p",
            "0.3",
            "--q",
            "0.5",
            "--n-list",
            "64,128,256,512",
            "--mode",
            "exact",
        ],
        &[
            "rate-scan",
            "--p",
            "0.65",
            "--q",
            "0.5",
            "--n-list",
            "32,64,128",
            "--mode",
            "mc",
            "--reps",
            "20000",
            "--seed",
            "8",
        ],
    ];
    let dir = tempfile::tempdir().unwrap();
    let mut mismatches = Vec::new();
    for (i, args) in runs.iter().enumerate() {
        let writes = args[0] == "rate-scan";
        let a_path = dir.path().join(format!("one-{i}.json"));
        let b_path = dir.path().join(format!("eight-{i}.json"));
        let one = run_bin("1", args, writes.then_some(a_path.as_path()));
        let eight = run_bin("8", args, writes.then_some(b_path.as_path()));
        if one != eight || one.is_empty() {
            mismatches.push(args[0]);
        }
    }
    let verify_one = run_bin("1", &["--format", "json", "verify", "--quick"], None);
    let verify_eight = run_bin("8", &["--format", "json", "verify", "--quick"], None);
    if verify_one != verify_eight {
        mismatches.push("verify");
    }
    verdict(
        mismatches.is_empty(),
        format!("7 runs compared byte for byte at 1 vs 8 workers; mismatched: {mismatches:?}"),
    )
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("coefficient cross-validation", coefficient_cross_validation),
        ("coefficient asymptotics", asymptotics),
        ("oracle equivalence", oracle_equivalence),
        ("exact W1 engine", exact_w1_engine),
        ("regime rate scans", regime_scans),
        ("quadratic-variation decay", qv_decay),
        ("martingale structure", martingale_structure),
        ("determinism across worker counts", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = run();
        let tag = if v.passed { "PASS" } else { "FAIL" };
        if !v.passed {
            failed += 1;
        }
        println!(
            "criterion {} {tag} {name} [{:.1} s]: {}",
            i + 1,
            start.elapsed().as_secs_f64(),
            v.detail
        );
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
