use serde::Serialize;

use crate::error::{ErwError, Result};

/// A finitely supported law on the real line.
///
/// Atoms are strictly increasing, every weight is positive and the weights
/// sum to one. Construction canonicalizes arbitrary input (sorts, merges
/// duplicate atoms, drops zero weights, renormalizes).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteDistribution {
    atoms: Vec<f64>,
    weights: Vec<f64>,
}

impl DiscreteDistribution {
    pub fn new(atoms: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if atoms.len() != weights.len() {
            return Err(ErwError::InvalidArgument(format!(
                "{} atoms but {} weights",
                atoms.len(),
                weights.len()
            )));
        }
        if atoms.iter().any(|x| !x.is_finite()) {
            return Err(ErwError::Domain("atoms must be finite".into()));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(ErwError::Domain(
                "weights must be finite and nonnegative".into(),
            ));
        }
        let mut pairs: Vec<(f64, f64)> = atoms
            .into_iter()
            .zip(weights)
            .filter(|&(_, w)| w > 0.0)
            .collect();
        if pairs.is_empty() {
            return Err(ErwError::Domain("distribution has no positive mass".into()));
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut atoms = Vec::with_capacity(pairs.len());
        let mut weights: Vec<f64> = Vec::with_capacity(pairs.len());
        for (x, w) in pairs {
            match atoms.last() {
                Some(&last) if last == x => *weights.last_mut().unwrap() += w,
                _ => {
                    atoms.push(x);
                    weights.push(w);
                }
            }
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-15 {
            weights.iter_mut().for_each(|w| *w /= total);
        }
        Ok(DiscreteDistribution { atoms, weights })
    }

    pub fn point_mass(x: f64) -> Result<Self> {
        Self::new(vec![x], vec![1.0])
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.atoms.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn mean(&self) -> f64 {
        self.iter().map(|(x, w)| x * w).sum()
    }

    /// `E[X^k]`.
    pub fn moment(&self, k: i32) -> f64 {
        self.iter().map(|(x, w)| x.powi(k) * w).sum()
    }

    /// Applies an increasing map to every atom.
    pub fn map_atoms(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(
            self.atoms.iter().map(|&x| f(x)).collect(),
            self.weights.clone(),
        )
    }
}

/// Empirical law of a sample: unique sorted values with weight multiplicity/m.
pub fn empirical_distribution(samples: &[f64]) -> Result<DiscreteDistribution> {
    if samples.is_empty() {
        return Err(ErwError::Domain(
            "empirical distribution of an empty sample".into(),
        ));
    }
    let mut sorted = samples.to_vec();
    if sorted.iter().any(|x| !x.is_finite()) {
        return Err(ErwError::Domain("samples must be finite".into()));
    }
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len() as f64;
    let mut atoms = Vec::new();
    let mut counts: Vec<u64> = Vec::new();
    for x in sorted {
        if atoms.last() == Some(&x) {
            *counts.last_mut().unwrap() += 1;
        } else {
            atoms.push(x);
            counts.push(1);
        }
    }
    let weights = counts.into_iter().map(|c| c as f64 / m).collect();
    DiscreteDistribution::new(atoms, weights)
}
