//! Exact (ε, δ) auditing of the thresholded release.
//!
//! For two output distributions `P` (on `D`) and `Q` (on a neighbour `D'`)
//! over a countable set of atoms, the smallest δ for which
//! `P(T) <= e^ε Q(T) + δ` holds for every event `T` is attained by
//! `T = { o : P(o) > e^ε Q(o) }`, giving
//!
//! ```text
//! δ(ε) = Σ_o max(0, P(o) - e^ε Q(o))
//! ```
//!
//! Mass beyond the enumerated atoms is charged entirely to the `P` side, so
//! the reported δ never understates the exact one.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mechanism::{output_distribution_within, ReleaseConfig};

/// Probability atoms of a released (rounded) value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputDistribution {
    pub atoms: BTreeMap<i64, f64>,
    /// Mass of released values outside the enumerated atoms.
    pub tail_mass: f64,
    pub config_fingerprint: String,
}

impl OutputDistribution {
    pub fn new(atoms: BTreeMap<i64, f64>, tail_mass: f64, config_fingerprint: String) -> Self {
        OutputDistribution {
            atoms,
            tail_mass,
            config_fingerprint,
        }
    }

    pub fn mass(&self, atom: i64) -> f64 {
        self.atoms.get(&atom).copied().unwrap_or(0.0)
    }

    /// Sum of atom masses and tail mass.
    pub fn total(&self) -> f64 {
        self.atoms.values().sum::<f64>() + self.tail_mass
    }
}

/// δ(ε) between two output distributions.
pub fn delta_at_epsilon(
    dist_d: &OutputDistribution,
    dist_dp: &OutputDistribution,
    epsilon: f64,
) -> Result<f64> {
    if epsilon.is_nan() || epsilon < 0.0 {
        return Err(Error::argument(format!(
            "epsilon must be non-negative, got {epsilon}"
        )));
    }
    if dist_d.atoms == dist_dp.atoms && dist_d.tail_mass == dist_dp.tail_mass {
        return Ok(0.0);
    }
    let factor = epsilon.exp();
    let universe: BTreeSet<i64> = dist_d
        .atoms
        .keys()
        .chain(dist_dp.atoms.keys())
        .copied()
        .collect();
    let excess: f64 = universe
        .into_iter()
        .map(|o| (dist_d.mass(o) - factor * dist_dp.mass(o)).max(0.0))
        .sum();
    Ok((excess + dist_d.tail_mass).clamp(0.0, 1.0))
}

/// An output atom that one side can produce and the other cannot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub atom: i64,
    pub pr_d: f64,
    pub pr_dp: f64,
}

/// The most probable atom with positive mass on exactly one side, if any.
/// Ties go to the smaller atom.
pub fn find_witness(dist_d: &OutputDistribution, dist_dp: &OutputDistribution) -> Option<Witness> {
    let universe: BTreeSet<i64> = dist_d
        .atoms
        .keys()
        .chain(dist_dp.atoms.keys())
        .copied()
        .collect();
    universe
        .into_iter()
        .filter_map(|o| {
            let (p, q) = (dist_d.mass(o), dist_dp.mass(o));
            ((p > 0.0) != (q > 0.0)).then_some(Witness {
                atom: o,
                pr_d: p,
                pr_dp: q,
            })
        })
        .fold(None, |best: Option<Witness>, w| match best {
            Some(b) if b.pr_d.max(b.pr_dp) >= w.pr_d.max(w.pr_dp) => Some(b),
            _ => Some(w),
        })
}

/// Largest atom-wise probability ratio in either direction. Infinite when a
/// witness exists.
pub fn max_atom_ratio(dist_d: &OutputDistribution, dist_dp: &OutputDistribution) -> f64 {
    let universe: BTreeSet<i64> = dist_d
        .atoms
        .keys()
        .chain(dist_dp.atoms.keys())
        .copied()
        .collect();
    universe
        .into_iter()
        .map(|o| {
            let (p, q) = (dist_d.mass(o), dist_dp.mass(o));
            match (p > 0.0, q > 0.0) {
                (true, true) => (p / q).max(q / p),
                (false, false) => 1.0,
                _ => f64::INFINITY,
            }
        })
        .fold(1.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DpAuditResult {
    pub epsilon_grid: Vec<f64>,
    /// `(ε, δ(ε))` in grid order.
    pub delta_at: Vec<(f64, f64)>,
    pub pure_dp_violation_witness: Option<Witness>,
    pub max_atom_ratio: f64,
    pub counts_compared: (u64, u64),
}

impl DpAuditResult {
    pub fn delta(&self, epsilon: f64) -> Option<f64> {
        self.delta_at
            .iter()
            .find(|(e, _)| *e == epsilon)
            .map(|&(_, d)| d)
    }
}

/// 21 log-spaced points from 0.01 to 10.
pub fn default_epsilon_grid() -> Vec<f64> {
    let (lo, hi) = (0.01f64.ln(), 10f64.ln());
    (0..21)
        .map(|i| (lo + (hi - lo) * f64::from(i) / 20.0).exp())
        .collect()
}

/// Audits the release of count `c` against its neighbour `c_prime`.
pub fn audit_pair(
    c: u64,
    c_prime: u64,
    config: &ReleaseConfig,
    epsilon_grid: &[f64],
) -> Result<DpAuditResult> {
    if epsilon_grid.is_empty() {
        return Err(Error::argument("epsilon grid is empty"));
    }
    if let Some(bad) = epsilon_grid.iter().find(|e| !(e.is_finite() && **e >= 0.0)) {
        return Err(Error::argument(format!(
            "epsilon grid values must be finite and non-negative, got {bad}"
        )));
    }
    let horizon = c.max(c_prime);
    let dist_d = output_distribution_within(c, horizon, config);
    let dist_dp = output_distribution_within(c_prime, horizon, config);
    let delta_at = epsilon_grid
        .iter()
        .map(|&e| delta_at_epsilon(&dist_d, &dist_dp, e).map(|d| (e, d)))
        .collect::<Result<Vec<_>>>()?;
    Ok(DpAuditResult {
        epsilon_grid: epsilon_grid.to_vec(),
        delta_at,
        pure_dp_violation_witness: find_witness(&dist_d, &dist_dp),
        max_atom_ratio: max_atom_ratio(&dist_d, &dist_dp),
        counts_compared: (c, c_prime),
    })
}

/// How likely a group of `g` travellers at an otherwise empty cell is to be
/// released above the threshold under zero-skip.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionBound {
    pub group_size: u64,
    pub threshold: f64,
    pub scale: f64,
    /// Noise density at the threshold gap, `exp(-(t - g)/b) / (2b)`.
    pub density_bound: f64,
    /// `Pr[g + L > t] = exp(-(t - g)/b) / 2`.
    pub tail_probability: f64,
}

pub fn detection_bound(group_size: u64, config: &ReleaseConfig) -> Result<DetectionBound> {
    let t = config.threshold;
    if group_size == 0 {
        return Err(Error::argument("group size must be at least 1"));
    }
    if group_size as f64 > t {
        return Err(Error::argument(format!(
            "group of {group_size} already exceeds threshold {t}; detection is trivial"
        )));
    }
    let b = config.scale.get();
    let gap = t - group_size as f64;
    let e = (-gap / b).exp();
    Ok(DetectionBound {
        group_size,
        threshold: t,
        scale: b,
        density_bound: e / (2.0 * b),
        tail_probability: 0.5 * e,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "verdict")]
pub enum DropVerdict {
    Consistent { rows: u64, implied: f64 },
    Inconsistent { implied: f64 },
}

impl DropVerdict {
    pub fn implied(&self) -> f64 {
        match *self {
            DropVerdict::Consistent { implied, .. } | DropVerdict::Inconsistent { implied } => {
                implied
            }
        }
    }
}

/// Checks whether a reported drop percentage is a whole number of rows out
/// of `candidate_rows`.
pub fn check_drop_consistency(reported_percentage: f64, candidate_rows: u64) -> Result<DropVerdict> {
    if !(0.0..=100.0).contains(&reported_percentage) {
        return Err(Error::argument(format!(
            "percentage must be in [0, 100], got {reported_percentage}"
        )));
    }
    if candidate_rows == 0 {
        return Err(Error::argument("candidate row count must be positive"));
    }
    let implied = reported_percentage / 100.0 * candidate_rows as f64;
    let nearest = implied.round();
    Ok(if (implied - nearest).abs() <= 1e-9 * implied.max(1.0) {
        DropVerdict::Consistent {
            rows: nearest as u64,
            implied,
        }
    } else {
        DropVerdict::Inconsistent { implied }
    })
}
