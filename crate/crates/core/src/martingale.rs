//! The martingale `M_k = a_k S_k − 2q + 1` and its predictable quadratic variation.
//!
//! For k ≥ 2 the conditional variance of the increment is
//! `E[(ΔM_k)² | F_{k−1}] = a_k² (1 − (2p − 1)² (S_{k−1}/(k−1))²)`.
//! The first increment `ΔM_1 = η_1 − (2q − 1)` has variance `1 − (2q − 1)²`;
//! [`FirstIncrement::Unit`] books it as `a_1² = 1` instead so that `⟨M⟩_n`
//! and `v_n` agree term by term.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::coefficients::{CoefficientTable, WalkParams};
use crate::error::{ErwError, Result};
use crate::rng::map_replicates;
use crate::walk::{step_is_up, transition_prob_up, WalkPath};

/// Convention for the variance booked at k = 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FirstIncrement {
    /// `a_1² = 1`, regardless of q.
    #[default]
    Unit,
    /// `1 − (2q − 1)²`, the actual variance of `ΔM_1`.
    Exact,
}

impl FirstIncrement {
    pub fn variance(self, q: f64) -> f64 {
        match self {
            FirstIncrement::Unit => 1.0,
            FirstIncrement::Exact => 1.0 - (2.0 * q - 1.0).powi(2),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MartingaleTrace {
    pub m: Vec<f64>,
    pub dm: Vec<f64>,
    pub qv: Vec<f64>,
    /// `⟨M⟩_n / v_n`.
    pub qv_normalized: f64,
}

/// `E[(ΔM_k)² | S_{k−1} = s_prev]`; `s_prev` is ignored at k = 1.
pub fn qv_increment(
    k: usize,
    s_prev: i64,
    table: &CoefficientTable,
    q: f64,
    convention: FirstIncrement,
) -> Result<f64> {
    if k == 0 || k > table.len() {
        return Err(ErwError::InvalidArgument(format!(
            "time index {k} outside 1..={}",
            table.len()
        )));
    }
    if k == 1 {
        return Ok(convention.variance(q));
    }
    let prev = (k - 1) as i64;
    if s_prev.abs() > prev {
        return Err(ErwError::InvalidState {
            k: prev as u64,
            s: s_prev,
        });
    }
    let a = table.a(k);
    let ratio = s_prev as f64 / prev as f64;
    let drift = 2.0 * table.p - 1.0;
    Ok(a * a * (1.0 - drift * drift * ratio * ratio))
}

pub fn martingale_trace(
    path: &WalkPath,
    table: &CoefficientTable,
    q: f64,
    convention: FirstIncrement,
) -> Result<MartingaleTrace> {
    let n = path.len();
    if n != table.len() || path.eta.len() != n {
        return Err(ErwError::InvalidArgument(format!(
            "path of length {n} does not match coefficient table of length {}",
            table.len()
        )));
    }
    let offset = 2.0 * q - 1.0;
    let m: Vec<f64> = path
        .s
        .iter()
        .enumerate()
        .map(|(i, &s)| table.a[i] * s as f64 - offset)
        .collect();
    let mut dm = Vec::with_capacity(n);
    dm.push(m[0]);
    dm.extend(m.windows(2).map(|w| w[1] - w[0]));
    let mut qv = Vec::with_capacity(n);
    let mut acc = 0.0;
    for k in 1..=n {
        let s_prev = if k == 1 { 0 } else { path.s[k - 2] };
        acc += qv_increment(k, s_prev, table, q, convention)?;
        qv.push(acc);
    }
    Ok(MartingaleTrace {
        qv_normalized: acc / table.v_n(),
        m,
        dm,
        qv,
    })
}

/// `⟨M⟩_n = v_n − (2p − 1)² Σ_{k<n} (a_{k+1}/a_k)² (a_k S_k / k)²`.
///
/// Equals the accumulated trace under [`FirstIncrement::Unit`] for every q.
/// With q = 1/2, `a_k S_k` is `M_k` itself.
pub fn qv_closed_form(path: &WalkPath, table: &CoefficientTable) -> Result<f64> {
    if path.len() != table.len() {
        return Err(ErwError::InvalidArgument(
            "path and table lengths differ".into(),
        ));
    }
    let drift = 2.0 * table.p - 1.0;
    let correction: f64 = (1..table.len())
        .map(|k| {
            let growth = table.a(k + 1) / table.a(k);
            let scaled = table.a(k) * path.s[k - 1] as f64 / k as f64;
            growth * growth * scaled * scaled
        })
        .sum();
    Ok(table.v_n() - drift * drift * correction)
}

/// `max_i 2a_i / √v_n`, the sup-norm envelope of `ΔM_i/√v_n`.
pub fn xi_sup_bound(table: &CoefficientTable) -> f64 {
    let a_max = table.a.iter().copied().fold(0.0, f64::max);
    2.0 * a_max / table.v_n().sqrt()
}

/// `(E[S_k | S_{k−1} = s], E[S_k² | S_{k−1} = s])` from the two-point kernel.
pub fn one_step_moments(p: f64, k_prev: u64, s: i64) -> Result<(f64, f64)> {
    let up = transition_prob_up(p, k_prev, s)?;
    let (hi, lo) = ((s + 1) as f64, (s - 1) as f64);
    Ok((
        up * hi + (1.0 - up) * lo,
        up * hi * hi + (1.0 - up) * lo * lo,
    ))
}

/// Monte Carlo mean and standard error of a per-replicate statistic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub reps: u64,
}

impl McEstimate {
    pub fn from_samples(samples: &[f64]) -> Self {
        let m = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / m;
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0).max(1.0);
        McEstimate {
            mean,
            stderr: (var / m).sqrt(),
            reps: samples.len() as u64,
        }
    }
}

/// `|⟨X⟩_n − 1|` for one simulated path, streamed without storing the path.
fn qv_deviation_one<R: Rng>(
    params: &WalkParams,
    weights: &[f64],
    first_excess: f64,
    v_n: f64,
    rng: &mut R,
) -> f64 {
    let drift = 2.0 * params.p - 1.0;
    let mut s: i64 = if rng.random::<f64>() < params.q {
        1
    } else {
        -1
    };
    // ⟨M⟩_n − v_n = first_excess − Σ_{k≥2} weights[k] S_{k−1}²
    let mut deficit = 0.0;
    for (k, w) in weights.iter().enumerate().skip(2) {
        let sf = s as f64;
        deficit += w * sf * sf;
        s += if step_is_up(rng.random(), drift, (k - 1) as u64, s) {
            1
        } else {
            -1
        };
    }
    ((first_excess - deficit) / v_n).abs()
}

/// Monte Carlo estimate of `E|⟨X⟩_n − 1|` with `⟨X⟩_n = ⟨M⟩_n / v_n`.
pub fn qv_deviation_mc(
    params: &WalkParams,
    reps: u64,
    master_seed: u64,
    convention: FirstIncrement,
) -> Result<McEstimate> {
    if reps < 100 {
        return Err(ErwError::InvalidArgument(format!(
            "qv deviation needs at least 100 replicates, got {reps}"
        )));
    }
    let table = CoefficientTable::new(params.p, params.n)?;
    let drift2 = (2.0 * params.p - 1.0).powi(2);
    // weights[k] = (2p − 1)² a_k² / (k − 1)², k ≥ 2
    let mut weights = vec![0.0; params.n as usize + 1];
    for (k, w) in weights.iter_mut().enumerate().skip(2) {
        let a = table.a(k);
        *w = drift2 * a * a / ((k - 1) as f64).powi(2);
    }
    let first_excess = convention.variance(params.q) - 1.0;
    let v_n = table.v_n();
    let samples = map_replicates(reps, master_seed, |rng, _| {
        qv_deviation_one(params, &weights, first_excess, v_n, rng)
    });
    Ok(McEstimate::from_samples(&samples))
}

/// Monte Carlo mean of `M_n = a_n S_n − 2q + 1`.
pub fn martingale_mean_mc(params: &WalkParams, reps: u64, master_seed: u64) -> Result<McEstimate> {
    let table = CoefficientTable::new(params.p, params.n)?;
    let a_n = table.a_n();
    let offset = 2.0 * params.q - 1.0;
    let samples: Vec<f64> =
        crate::walk::simulate_terminal(params, crate::walk::SimMode::Marginal, reps, master_seed)
            .into_iter()
            .map(|s| a_n * s as f64 - offset)
            .collect();
    Ok(McEstimate::from_samples(&samples))
}
