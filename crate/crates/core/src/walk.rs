//! Elephant random walk trajectories and the exact law of `S_n`.
//!
//! Given the history, the next step copies (probability p) or flips a
//! uniformly chosen past step, so `P(η_{k+1} = +1 | F_k) = (1 + (2p − 1) S_k/k)/2`.
//! The position is therefore a time-inhomogeneous Markov chain on the
//! lattice `{−k, −k + 2, …, k}`. The default simulator and the exact DP both
//! run on this kernel; the literal simulator draws the copy decision and the
//! remembered index explicitly and is kept as a cross-check.

use log::warn;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coefficients::{CoefficientTable, WalkParams};
use crate::distribution::DiscreteDistribution;
use crate::error::{ErwError, Result};
use crate::rng::{map_replicates, replicate_rng};

/// Largest horizon the exact DP accepts unless raised explicitly.
pub const DEFAULT_DP_CEILING: u64 = 16_384;

/// Weights below this are treated as underflow and dropped.
const UNDERFLOW: f64 = 1e-300;

/// How steps are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SimMode {
    /// One uniform per step against the Markov kernel.
    #[default]
    Marginal,
    /// Draw `α_k ~ R(p)` and `β_k ~ U{1..k}` and set `η_{k+1} = α_k η_{β_k}`.
    Literal,
}

/// One realized trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkPath {
    pub eta: Vec<i8>,
    pub s: Vec<i64>,
    pub seed: u64,
    pub stream: u64,
}

impl WalkPath {
    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn terminal(&self) -> i64 {
        *self.s.last().expect("paths have at least one step")
    }
}

fn check_state(k: u64, s: i64) -> Result<()> {
    if s.unsigned_abs() > k || (s + k as i64).rem_euclid(2) != 0 {
        return Err(ErwError::InvalidState { k, s });
    }
    Ok(())
}

/// `P(η_{k+1} = +1 | S_k = s)`.
pub fn transition_prob_up(p: f64, k: u64, s: i64) -> Result<f64> {
    if k == 0 {
        return Err(ErwError::InvalidArgument(
            "time index k must be at least 1".into(),
        ));
    }
    check_state(k, s)?;
    Ok(0.5 * (1.0 + (2.0 * p - 1.0) * s as f64 / k as f64))
}

/// Decides the step after time `k` at position `s` from a uniform `u ∈ [0, 1)`.
///
/// `u < (1 + b s/k)/2` rearranged to keep the division off the loop-carried path.
#[inline(always)]
pub(crate) fn step_is_up(u: f64, drift: f64, k: u64, s: i64) -> bool {
    (2.0 * u - 1.0) * (k as f64) < drift * (s as f64)
}

#[inline]
fn first_step(rng: &mut ChaCha8Rng, q: f64) -> i8 {
    if rng.random::<f64>() < q {
        1
    } else {
        -1
    }
}

/// Fills `eta` with a trajectory of length `params.n`.
pub fn draw_steps(params: &WalkParams, mode: SimMode, rng: &mut ChaCha8Rng, eta: &mut Vec<i8>) {
    let n = params.n;
    let drift = 2.0 * params.p - 1.0;
    eta.clear();
    eta.reserve(n as usize);
    eta.push(first_step(rng, params.q));
    match mode {
        SimMode::Marginal => {
            let mut s = eta[0] as i64;
            for k in 1..n {
                let step = if step_is_up(rng.random(), drift, k, s) {
                    1
                } else {
                    -1
                };
                s += step as i64;
                eta.push(step);
            }
        }
        SimMode::Literal => {
            for k in 1..n as usize {
                let copy = rng.random::<f64>() < params.p;
                let remembered = eta[rng.random_range(0..k)];
                eta.push(if copy { remembered } else { -remembered });
            }
        }
    }
}

/// Simulates one path on replicate stream `stream` of master seed `seed`.
pub fn simulate_path(params: &WalkParams, mode: SimMode, seed: u64, stream: u64) -> WalkPath {
    let mut rng = replicate_rng(seed, stream);
    let mut eta = Vec::new();
    draw_steps(params, mode, &mut rng, &mut eta);
    let s = eta
        .iter()
        .scan(0i64, |acc, &e| {
            *acc += e as i64;
            Some(*acc)
        })
        .collect();
    WalkPath {
        eta,
        s,
        seed,
        stream,
    }
}

/// `S_n` for one replicate, without keeping the path in marginal mode.
pub fn terminal_position(params: &WalkParams, mode: SimMode, rng: &mut ChaCha8Rng) -> i64 {
    match mode {
        SimMode::Marginal => {
            let drift = 2.0 * params.p - 1.0;
            let mut s = first_step(rng, params.q) as i64;
            for k in 1..params.n {
                s += if step_is_up(rng.random(), drift, k, s) {
                    1
                } else {
                    -1
                };
            }
            s
        }
        SimMode::Literal => {
            let mut eta = Vec::new();
            draw_steps(params, mode, rng, &mut eta);
            eta.iter().map(|&e| e as i64).sum()
        }
    }
}

/// Terminal positions of `reps` independent replicates, in replicate order.
pub fn simulate_terminal(params: &WalkParams, mode: SimMode, reps: u64, seed: u64) -> Vec<i64> {
    map_replicates(reps, seed, |rng, _| terminal_position(params, mode, rng))
}

/// Forward DP over the position lattice.
///
/// After `k` steps `weights()[j]` is `P(S_k = 2j − k)`, `j = 0..=k`.
#[derive(Debug, Clone)]
pub struct ExactDp {
    p: f64,
    k: u64,
    w: Vec<f64>,
    max_mass_defect: f64,
}

impl ExactDp {
    pub fn new(p: f64, q: f64) -> Self {
        ExactDp {
            p,
            k: 1,
            w: vec![1.0 - q, q],
            max_mass_defect: 0.0,
        }
    }

    pub fn time(&self) -> u64 {
        self.k
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    pub fn position(&self, j: usize) -> i64 {
        2 * j as i64 - self.k as i64
    }

    pub fn total_mass(&self) -> f64 {
        self.w.iter().sum()
    }

    /// Largest `|Σw − 1|` seen after any step so far.
    pub fn max_mass_defect(&self) -> f64 {
        self.max_mass_defect
    }

    /// Advances from time k to k + 1.
    pub fn step(&mut self) {
        let k = self.k as usize;
        let half_drift = 0.5 * (2.0 * self.p - 1.0) / self.k as f64;
        let up = |j: usize| 0.5 + half_drift * (2 * j as i64 - k as i64) as f64;
        let down = |j: usize| 0.5 - half_drift * (2 * j as i64 - k as i64) as f64;
        let top = self.w[k] * up(k);
        self.w.push(top);
        for j in (1..=k).rev() {
            self.w[j] = self.w[j - 1] * up(j - 1) + self.w[j] * down(j);
        }
        self.w[0] *= down(0);
        self.k += 1;

        let mut clamped = false;
        for x in self.w.iter_mut() {
            if *x != 0.0 && *x < UNDERFLOW {
                *x = 0.0;
                clamped = true;
            }
        }
        let total = self.total_mass();
        let defect = (total - 1.0).abs();
        self.max_mass_defect = self.max_mass_defect.max(defect);
        if clamped {
            if defect > 1e-12 {
                warn!("exact DP renormalized by {total} at time {}", self.k);
            }
            self.w.iter_mut().for_each(|x| *x /= total);
        }
    }

    pub fn to_distribution(&self) -> Result<DiscreteDistribution> {
        let atoms = (0..self.w.len()).map(|j| self.position(j) as f64).collect();
        DiscreteDistribution::new(atoms, self.w.clone())
    }
}

/// Runs the DP to `params.n`, refusing horizons above `ceiling`.
pub fn exact_dp(params: &WalkParams, ceiling: u64) -> Result<ExactDp> {
    if params.n > ceiling {
        return Err(ErwError::ResourceLimit {
            n: params.n,
            ceiling,
        });
    }
    let mut dp = ExactDp::new(params.p, params.q);
    while dp.time() < params.n {
        dp.step();
    }
    Ok(dp)
}

/// The exact law of `S_n` under the default DP ceiling.
pub fn exact_distribution(params: &WalkParams) -> Result<DiscreteDistribution> {
    exact_distribution_with_ceiling(params, DEFAULT_DP_CEILING)
}

pub fn exact_distribution_with_ceiling(
    params: &WalkParams,
    ceiling: u64,
) -> Result<DiscreteDistribution> {
    exact_dp(params, ceiling)?.to_distribution()
}

/// Largest horizon `enumerate_histories` accepts.
pub const ENUMERATION_LIMIT: u64 = 20;

/// Exact law of `S_n` by exhaustive enumeration of step sequences, summing
/// over every copy decision `α` and remembered index `β` at each step.
///
/// Cost is O(2^n n²); meant as an oracle for small n.
pub fn enumerate_histories(params: &WalkParams) -> Result<DiscreteDistribution> {
    let n = params.n;
    if n > ENUMERATION_LIMIT {
        return Err(ErwError::ResourceLimit {
            n,
            ceiling: ENUMERATION_LIMIT,
        });
    }
    let mut mass = vec![0.0; 2 * n as usize + 1];
    let mut eta = Vec::with_capacity(n as usize);
    for (first, prob) in [(1i8, params.q), (-1i8, 1.0 - params.q)] {
        if prob == 0.0 {
            continue;
        }
        eta.clear();
        eta.push(first);
        descend(params.p, n as usize, &mut eta, prob, &mut mass);
    }
    let atoms = (0..mass.len()).map(|i| i as f64 - n as f64).collect();
    DiscreteDistribution::new(atoms, mass)
}

fn descend(p: f64, n: usize, eta: &mut Vec<i8>, prob: f64, mass: &mut [f64]) {
    let k = eta.len();
    if k == n {
        let s: i64 = eta.iter().map(|&e| e as i64).sum();
        mass[(s + n as i64) as usize] += prob;
        return;
    }
    for next in [1i8, -1] {
        let mut branch = 0.0;
        for &remembered in eta.iter() {
            for (alpha, p_alpha) in [(1i8, p), (-1i8, 1.0 - p)] {
                if alpha * remembered == next {
                    branch += p_alpha / k as f64;
                }
            }
        }
        if branch > 0.0 {
            eta.push(next);
            descend(p, n, eta, prob * branch, mass);
            eta.pop();
        }
    }
}

/// Maps positions `x` to `a_n x / √v_n`, or `(a_n x − 2q + 1)/√v_n` when centered.
pub fn normalize_distribution(
    dist: &DiscreteDistribution,
    table: &CoefficientTable,
    q: f64,
    center: bool,
) -> Result<DiscreteDistribution> {
    let n = table.len() as f64;
    if dist.atoms().iter().any(|x| x.abs() > n || x.fract() != 0.0) {
        return Err(ErwError::InvalidArgument(
            "normalization expects integer positions within [-n, n]".into(),
        ));
    }
    let (a_n, root_v) = (table.a_n(), table.v_n().sqrt());
    let offset = if center { 2.0 * q - 1.0 } else { 0.0 };
    dist.map_atoms(|x| (a_n * x - offset) / root_v)
}
