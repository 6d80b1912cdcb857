//! Elephant random walk toolkit.
//!
//! * [`coefficients`]: the normalizing sequences `a_n`, `v_n`, `γ_n` and their asymptotics.
//! * [`walk`]: trajectory simulation and the exact law of `S_n` by dynamic programming.
//! * [`distance`]: exact Wasserstein-1 distance to the standard normal.
//! * [`martingale`]: the martingale transform and its quadratic variation.
//! * [`rates`]: W1-vs-n scans against the regime-dependent rate shapes.
//! * [`verify`]: the invariant suite behind `erw verify`.
//! * [`cli`]: the `erw` command line.

pub mod cli;
pub mod coefficients;
pub mod distance;
pub mod distribution;
pub mod error;
pub mod martingale;
pub mod rates;
pub mod rng;
pub mod special;
pub mod verify;
pub mod walk;

pub use coefficients::{
    a_via_loggamma, asymptotic_ratios, build_coefficients, CoefficientTable, Regime, WalkParams,
};
pub use distance::{w1_between, w1_to_normal, W1Result};
pub use distribution::{empirical_distribution, DiscreteDistribution};
pub use error::{ErwError, Result};
pub use martingale::{
    martingale_trace, qv_deviation_mc, qv_increment, FirstIncrement, MartingaleTrace,
};
pub use rates::{theoretical_rate, w1_scan_exact, w1_scan_mc, RateReport};
pub use walk::{exact_distribution, normalize_distribution, simulate_path, SimMode, WalkPath};
