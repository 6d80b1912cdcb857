//! Wasserstein-1 decay scans against the regime-dependent rate formulas.
//!
//! The bounds carry unknown constants, so a scan reports the measured
//! distances, the rate shape, the log-log slope and the envelope
//! `w1[i] / rate[i]`, whose growth or boundedness across n is what can be
//! checked at desk scale.

use rayon::prelude::*;
use serde::Serialize;

use crate::coefficients::{CoefficientTable, Regime, WalkParams};
use crate::distance::w1_to_normal;
use crate::distribution::empirical_distribution;
use crate::error::{ErwError, Result};
use crate::rng::derive_seed;
use crate::walk::{
    exact_dp, normalize_distribution, simulate_terminal, SimMode, DEFAULT_DP_CEILING,
};

/// `∫√(Φ(1 − Φ)) dx · √(2/π)`; the empirical W1 of m normal draws is about this over √m.
pub const EMPIRICAL_W1_CONSTANT: f64 = 1.288_379_190_302_858;

fn theorem_regime(p: f64) -> Result<Regime> {
    match Regime::of(p) {
        r @ (Regime::DiffusiveLow | Regime::DiffusiveHigh | Regime::Critical) => Ok(r),
        Regime::Degenerate => Err(ErwError::UnsupportedRegime {
            p,
            reason: "p = 1/2 is the simple random walk, outside the rate theorem",
        }),
        Regime::Superdiffusive => Err(ErwError::UnsupportedRegime {
            p,
            reason: "no Gaussian limit for p > 3/4",
        }),
    }
}

/// The rate shape for horizon n, without its constant.
pub fn theoretical_rate(n: u64, p: f64) -> Result<f64> {
    let regime = theorem_regime(p)?;
    if n < 3 {
        return Err(ErwError::InvalidArgument(format!(
            "rate formulas need n >= 3, got {n}"
        )));
    }
    let x = n as f64;
    Ok(match regime {
        Regime::DiffusiveLow => x.ln() / x.sqrt(),
        Regime::DiffusiveHigh => x.ln() / x.powf((3.0 - 4.0 * p) / 2.0),
        _ => x.ln().ln() / x.ln().sqrt(),
    })
}

/// `ε^ρ` for ρ < 1, `ε |ln ε|` for ρ ≥ 1.
pub fn hat_epsilon(eps: f64, rho: f64) -> Result<f64> {
    if !(eps > 0.0 && eps <= 0.5) {
        return Err(ErwError::Domain(format!(
            "eps must lie in (0, 1/2], got {eps}"
        )));
    }
    if rho.is_nan() || rho <= 0.0 {
        return Err(ErwError::Domain(format!("rho must be positive, got {rho}")));
    }
    Ok(if rho < 1.0 {
        eps.powf(rho)
    } else {
        eps * eps.ln().abs()
    })
}

/// Least-squares slope of `ln y` on `ln x`.
pub fn fit_loglog_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(ErwError::InvalidArgument(
            "slope fit needs equal lengths".into(),
        ));
    }
    if xs.len() < 4 {
        return Err(ErwError::InvalidArgument(format!(
            "slope fit needs at least 4 points, got {}",
            xs.len()
        )));
    }
    if xs.iter().chain(ys).any(|v| v.is_nan() || *v <= 0.0) {
        return Err(ErwError::Domain("slope fit needs positive values".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let m = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / m;
    let my = ly.iter().sum::<f64>() / m;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanMode {
    Exact,
    Mc,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RateReport {
    pub regime: Regime,
    pub mode: ScanMode,
    pub p: f64,
    pub q: f64,
    pub center: bool,
    pub ns: Vec<u64>,
    pub w1: Vec<f64>,
    pub rate: Vec<f64>,
    /// `w1[i] / rate[i]`.
    pub ratio: Vec<f64>,
    /// Slope of `ln w1` on `ln n`; not fitted in the critical regime.
    pub fitted_slope: Option<f64>,
    pub envelope_c: f64,
    pub envelope_drift: f64,
    /// `w1 √(ln n) / ln ln n`, reported in the critical regime only.
    pub critical_profile: Option<Vec<f64>>,
    /// Estimator noise floor of the Monte Carlo W1, MC mode only.
    pub noise_floor: Option<f64>,
    pub reps: Option<u64>,
    pub seed: Option<u64>,
}

fn check_ns(ns: &[u64]) -> Result<()> {
    if ns.is_empty() {
        return Err(ErwError::InvalidArgument("empty horizon list".into()));
    }
    if ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ErwError::InvalidArgument(
            "horizons must be strictly increasing".into(),
        ));
    }
    if ns[0] < 3 {
        return Err(ErwError::InvalidArgument(
            "horizons must be at least 3".into(),
        ));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn assemble(
    regime: Regime,
    mode: ScanMode,
    p: f64,
    q: f64,
    center: bool,
    ns: Vec<u64>,
    w1: Vec<f64>,
    fit_mask: &[bool],
) -> Result<RateReport> {
    let rate = ns
        .iter()
        .map(|&n| theoretical_rate(n, p))
        .collect::<Result<Vec<_>>>()?;
    let ratio: Vec<f64> = w1.iter().zip(&rate).map(|(w, r)| w / r).collect();
    let envelope_c = ratio.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let envelope_drift = ratio[ratio.len() - 1] / ratio[0];
    let (fitted_slope, critical_profile) = if regime == Regime::Critical {
        let profile = ns
            .iter()
            .zip(&w1)
            .map(|(&n, w)| {
                let l = (n as f64).ln();
                w * l.sqrt() / l.ln()
            })
            .collect();
        (None, Some(profile))
    } else {
        let (xs, ys): (Vec<f64>, Vec<f64>) = ns
            .iter()
            .zip(&w1)
            .zip(fit_mask)
            .filter(|(_, &keep)| keep)
            .map(|((&n, &w), _)| (n as f64, w))
            .unzip();
        (fit_loglog_slope(&xs, &ys).ok(), None)
    };
    Ok(RateReport {
        regime,
        mode,
        p,
        q,
        center,
        ns,
        w1,
        rate,
        ratio,
        fitted_slope,
        envelope_c,
        envelope_drift,
        critical_profile,
        noise_floor: None,
        reps: None,
        seed: None,
    })
}

/// W1 of the exact law of the normalized walk at one horizon.
pub fn w1_exact(params: &WalkParams, center: bool, ceiling: u64) -> Result<f64> {
    let law = exact_dp(params, ceiling)?.to_distribution()?;
    let table = CoefficientTable::new(params.p, params.n)?;
    let normalized = normalize_distribution(&law, &table, params.q, center)?;
    Ok(w1_to_normal(&normalized)?.value)
}

/// Exact-DP scan over `ns`, parallel across horizons.
pub fn w1_scan_exact(p: f64, q: f64, ns: &[u64], center: bool) -> Result<RateReport> {
    w1_scan_exact_with_ceiling(p, q, ns, center, DEFAULT_DP_CEILING)
}

pub fn w1_scan_exact_with_ceiling(
    p: f64,
    q: f64,
    ns: &[u64],
    center: bool,
    ceiling: u64,
) -> Result<RateReport> {
    let regime = theorem_regime(p)?;
    check_ns(ns)?;
    let params = ns
        .iter()
        .map(|&n| WalkParams::new(p, q, n))
        .collect::<Result<Vec<_>>>()?;
    let w1 = params
        .par_iter()
        .map(|prm| w1_exact(prm, center, ceiling))
        .collect::<Result<Vec<_>>>()?;
    let mask = vec![true; ns.len()];
    assemble(
        regime,
        ScanMode::Exact,
        p,
        q,
        center,
        ns.to_vec(),
        w1,
        &mask,
    )
}

/// Reported noise floor of an empirical W1 built from `reps` samples.
pub fn noise_floor(reps: u64) -> f64 {
    EMPIRICAL_W1_CONSTANT / (reps as f64).sqrt()
}

/// Monte Carlo W1 at one horizon from `reps` terminal values.
pub fn w1_mc(params: &WalkParams, reps: u64, seed: u64, center: bool) -> Result<f64> {
    let table = CoefficientTable::new(params.p, params.n)?;
    let (a_n, root_v) = (table.a_n(), table.v_n().sqrt());
    let offset = if center { 2.0 * params.q - 1.0 } else { 0.0 };
    let samples: Vec<f64> = simulate_terminal(params, SimMode::Marginal, reps, seed)
        .into_iter()
        .map(|s| (a_n * s as f64 - offset) / root_v)
        .collect();
    Ok(w1_to_normal(&empirical_distribution(&samples)?)?.value)
}

/// Monte Carlo scan; horizon `ns[i]` uses master seed `derive_seed(seed, ns[i])`.
///
/// Horizons whose rate shape is below three noise floors are kept in the
/// report but left out of the slope fit.
pub fn w1_scan_mc(
    p: f64,
    q: f64,
    ns: &[u64],
    reps: u64,
    master_seed: u64,
    center: bool,
) -> Result<RateReport> {
    let regime = theorem_regime(p)?;
    check_ns(ns)?;
    if reps < 10_000 {
        return Err(ErwError::InvalidArgument(format!(
            "Monte Carlo scans need at least 10^4 replicates, got {reps}"
        )));
    }
    let floor = noise_floor(reps);
    let mask = ns
        .iter()
        .map(|&n| theoretical_rate(n, p).map(|r| r >= 3.0 * floor))
        .collect::<Result<Vec<_>>>()?;
    if !mask.iter().any(|&k| k) {
        return Err(ErwError::NoiseFloor(format!(
            "every horizon has a rate below 3x the Monte Carlo noise floor {floor:.3e}; \
             use --mode exact or raise --reps"
        )));
    }
    let mut w1 = Vec::with_capacity(ns.len());
    for &n in ns {
        let params = WalkParams::new(p, q, n)?;
        w1.push(w1_mc(&params, reps, derive_seed(master_seed, n), center)?);
    }
    let mut report = assemble(regime, ScanMode::Mc, p, q, center, ns.to_vec(), w1, &mask)?;
    report.noise_floor = Some(floor);
    report.reps = Some(reps);
    report.seed = Some(master_seed);
    Ok(report)
}
