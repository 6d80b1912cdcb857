//! Normalizing sequences of the walk.
//!
//! `a_k = Γ(k)Γ(2p)/Γ(k + 2p − 1)` makes `a_k S_k − 2q + 1` a martingale,
//! `v_k = Σ_{i≤k} a_i²` is its variance scale and `γ_k = 1 + (2p − 1)/k` is
//! the one-step conditional drift factor `E[S_{k+1} | S_k] = γ_k S_k`.

use serde::{Deserialize, Serialize};

use crate::error::{ErwError, Result};
use crate::special::{ln_gamma, ln_gamma_ratio};

/// Phase of the walk, a pure function of the memory parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Regime {
    DiffusiveLow,
    Degenerate,
    DiffusiveHigh,
    Critical,
    Superdiffusive,
}

impl Regime {
    /// Boundaries are compared exactly; the caller picks the regime by picking p.
    pub fn of(p: f64) -> Regime {
        if p < 0.5 {
            Regime::DiffusiveLow
        } else if p == 0.5 {
            Regime::Degenerate
        } else if p < 0.75 {
            Regime::DiffusiveHigh
        } else if p == 0.75 {
            Regime::Critical
        } else {
            Regime::Superdiffusive
        }
    }
}

/// Memory parameter `p`, first-step parameter `q` and horizon `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WalkParams {
    pub p: f64,
    pub q: f64,
    pub n: u64,
}

impl WalkParams {
    pub fn new(p: f64, q: f64, n: u64) -> Result<Self> {
        validate_p(p)?;
        if !(0.0..=1.0).contains(&q) {
            return Err(ErwError::InvalidParameter(format!(
                "q must lie in [0, 1], got {q}"
            )));
        }
        if n == 0 {
            return Err(ErwError::InvalidParameter(
                "horizon n must be at least 1".into(),
            ));
        }
        Ok(WalkParams { p, q, n })
    }

    pub fn regime(&self) -> Regime {
        Regime::of(self.p)
    }

    /// Same p and q at a different horizon.
    pub fn with_n(&self, n: u64) -> Result<Self> {
        WalkParams::new(self.p, self.q, n)
    }
}

pub(crate) fn validate_p(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(ErwError::InvalidParameter(format!(
            "p must lie in the open interval (0, 1), got {p}"
        )))
    }
}

/// `a_1..a_n`, `v_1..v_n` and `γ_1..γ_{n−1}` for a fixed p.
///
/// Storage is 0-based; use the 1-based accessors to read by time index.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    pub p: f64,
    pub a: Vec<f64>,
    pub v: Vec<f64>,
    pub gamma: Vec<f64>,
}

impl CoefficientTable {
    /// Builds the table by the recurrence `a_{k+1} = a_k · k / (k + 2p − 1)`.
    pub fn new(p: f64, n: u64) -> Result<Self> {
        validate_p(p)?;
        if n == 0 {
            return Err(ErwError::InvalidParameter(
                "horizon n must be at least 1".into(),
            ));
        }
        let n = n as usize;
        let shift = 2.0 * p - 1.0;
        let mut a = Vec::with_capacity(n);
        let mut v = Vec::with_capacity(n);
        let mut gamma = Vec::with_capacity(n.saturating_sub(1));
        let (mut ak, mut vk) = (1.0f64, 1.0f64);
        a.push(ak);
        v.push(vk);
        for k in 1..n {
            let kf = k as f64;
            ak *= kf / (kf + shift);
            vk += ak * ak;
            a.push(ak);
            v.push(vk);
            gamma.push(1.0 + shift / kf);
        }
        Ok(CoefficientTable { p, a, v, gamma })
    }

    /// Horizon the table was built for.
    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// `a_k`, 1-based.
    pub fn a(&self, k: usize) -> f64 {
        self.a[k - 1]
    }

    /// `v_k`, 1-based.
    pub fn v(&self, k: usize) -> f64 {
        self.v[k - 1]
    }

    /// `γ_k = 1 + (2p − 1)/k`, 1-based, `k < n`.
    pub fn gamma(&self, k: usize) -> f64 {
        self.gamma[k - 1]
    }

    pub fn a_n(&self) -> f64 {
        *self.a.last().expect("table is never empty")
    }

    pub fn v_n(&self) -> f64 {
        *self.v.last().expect("table is never empty")
    }
}

pub fn build_coefficients(params: &WalkParams) -> Result<CoefficientTable> {
    CoefficientTable::new(params.p, params.n)
}

/// `a_n` evaluated as a Gamma quotient, independently of the recurrence.
pub fn a_via_loggamma(n: u64, p: f64) -> Result<f64> {
    validate_p(p)?;
    if n == 0 {
        return Err(ErwError::InvalidParameter("n must be at least 1".into()));
    }
    let x = n as f64;
    // lnΓ(n) + lnΓ(2p) − lnΓ(n + 2p − 1)
    Ok((ln_gamma(2.0 * p) - ln_gamma_ratio(x, 2.0 * p - 1.0)).exp())
}

/// Finite-n versions of the Stirling limits of `a_n` and `v_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AsymptoticRatios {
    /// `a_n n^{2p−1} / Γ(2p)`, tends to 1.
    pub a_ratio: f64,
    /// `v_n (3 − 4p) / (Γ(2p)² n^{3−4p})` for p < 3/4, `v_n / ln n` at p = 3/4.
    pub v_ratio: f64,
}

pub fn asymptotic_ratios(table: &CoefficientTable) -> Result<AsymptoticRatios> {
    ratios_at(table, table.len())
}

/// Asymptotic ratios evaluated at an intermediate time `k ≥ 2` of the table.
pub fn ratios_at(table: &CoefficientTable, k: usize) -> Result<AsymptoticRatios> {
    let p = table.p;
    if Regime::of(p) == Regime::Superdiffusive {
        return Err(ErwError::UnsupportedRegime {
            p,
            reason: "v_n converges for p > 3/4, so the normalization is meaningless",
        });
    }
    if k < 2 || k > table.len() {
        return Err(ErwError::InvalidArgument(format!(
            "asymptotic ratios need 2 <= k <= {}, got {k}",
            table.len()
        )));
    }
    let g2p = ln_gamma(2.0 * p).exp();
    let kf = k as f64;
    let a_ratio = table.a(k) * kf.powf(2.0 * p - 1.0) / g2p;
    let v_ratio = if p == 0.75 {
        table.v(k) / kf.ln()
    } else {
        let e = 3.0 - 4.0 * p;
        table.v(k) * e / (g2p * g2p * kf.powf(e))
    };
    Ok(AsymptoticRatios { a_ratio, v_ratio })
}
