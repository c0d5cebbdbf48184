//! Laplace primitives, the distribution of the difference of two independent
//! Laplace draws, and estimators for the shared scale.
//!
//! A released count is `c_raw + L` with `L ~ Lap(0, b)`. When the same raw
//! value is released twice with independent noise, the difference of the two
//! releases is `L1 - L2`, whose density is
//!
//! ```text
//! f(u) = (|u| + b) exp(-|u| / b) / (4 b^2)
//! ```
//!
//! and whose variance is `4 b^2`. Both estimators here work from samples of
//! such differences.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimize::golden_section_max;

/// Scale `b` of a zero-centred Laplace distribution.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct NoiseScale(f64);

impl NoiseScale {
    pub fn new(b: f64) -> Result<Self> {
        if !b.is_finite() || b <= 0.0 {
            return Err(Error::argument(format!(
                "noise scale must be positive and finite, got {b}"
            )));
        }
        Ok(NoiseScale(b))
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// Variance of a single draw, `2 b^2`.
    pub fn variance(self) -> f64 {
        2.0 * self.0 * self.0
    }
}

impl TryFrom<f64> for NoiseScale {
    type Error = Error;

    fn try_from(b: f64) -> Result<Self> {
        NoiseScale::new(b)
    }
}

impl From<NoiseScale> for f64 {
    fn from(s: NoiseScale) -> f64 {
        s.0
    }
}

impl fmt::Display for NoiseScale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Density of `Lap(0, b)` at `x`.
pub fn laplace_pdf(x: f64, scale: NoiseScale) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("laplace_pdf at non-finite x = {x}")));
    }
    let b = scale.get();
    Ok((-x.abs() / b).exp() / (2.0 * b))
}

/// Distribution function of `Lap(0, b)`. Infinite arguments are accepted and
/// map to 0 or 1.
pub fn laplace_cdf(x: f64, scale: NoiseScale) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::Domain("laplace_cdf at NaN".into()));
    }
    let b = scale.get();
    Ok(if x < 0.0 {
        0.5 * (x / b).exp()
    } else {
        1.0 - 0.5 * (-x / b).exp()
    })
}

/// Upper tail `Pr[L > x]`, accurate far into the right tail where
/// `1 - laplace_cdf` would cancel.
pub fn laplace_sf(x: f64, scale: NoiseScale) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::Domain("laplace_sf at NaN".into()));
    }
    let b = scale.get();
    Ok(if x >= 0.0 {
        0.5 * (-x / b).exp()
    } else {
        1.0 - 0.5 * (x / b).exp()
    })
}

/// Draws from `Lap(0, b)` by inverting the distribution function.
pub fn laplace_sample<R: Rng + ?Sized>(scale: NoiseScale, rng: &mut R) -> f64 {
    let b = scale.get();
    loop {
        let u: f64 = rng.random();
        if u == 0.0 {
            continue;
        }
        return if u < 0.5 {
            b * (2.0 * u).ln()
        } else {
            -b * (2.0 * (1.0 - u)).ln()
        };
    }
}

/// Density of `L1 - L2` for independent `L1, L2 ~ Lap(0, b)`.
pub fn diff_pdf(u: f64, scale: NoiseScale) -> f64 {
    let b = scale.get();
    let a = u.abs();
    (a + b) * (-a / b).exp() / (4.0 * b * b)
}

/// Observed differences between two independent releases of the same raw
/// count.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DifferenceSample {
    pub values: Vec<i64>,
}

impl DifferenceSample {
    pub fn new(values: Vec<i64>) -> Self {
        DifferenceSample { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl FromIterator<i64> for DifferenceSample {
    fn from_iter<I: IntoIterator<Item = i64>>(iter: I) -> Self {
        DifferenceSample {
            values: iter.into_iter().collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitMethod {
    Mle,
    Moments,
}

/// Conditions that make an estimate less trustworthy without invalidating it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum FitWarning {
    /// Fewer usable pairs than the recommended minimum.
    LowSample { pairs: usize, recommended: usize },
    /// The pairing assumption (every tap-on has a tap-off) is not guaranteed.
    NoAutoTapOff,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleEstimate {
    pub b_hat: f64,
    pub method: FitMethod,
    pub sample_size: usize,
    /// Log-likelihood at `b_hat`; only the MLE fills this in.
    pub log_likelihood: Option<f64>,
    /// Approximate standard error. Infinite when the sample is degenerate.
    pub stderr_approx: f64,
    /// Set when the likelihood has no interior maximum (all differences
    /// zero); `b_hat` is then the lower search bound.
    pub degenerate: bool,
    pub warnings: Vec<FitWarning>,
}

/// Search interval for the MLE.
pub const MLE_BOUNDS: (f64, f64) = (1e-3, 1e3);
const MLE_TOL: f64 = 1e-7;

/// Log-likelihood of the difference model at scale `b`.
pub fn diff_log_likelihood(sample: &DifferenceSample, b: f64) -> f64 {
    let n = sample.len() as f64;
    let s: f64 = sample
        .values
        .iter()
        .map(|&u| {
            let a = u.unsigned_abs() as f64;
            (a + b).ln() - a / b
        })
        .sum();
    s - n * (4.0 * b * b).ln()
}

/// Maximum-likelihood estimate of `b` from paired differences.
pub fn fit_scale_mle(sample: &DifferenceSample) -> Result<ScaleEstimate> {
    if sample.is_empty() {
        return Err(Error::argument("cannot fit a scale to an empty sample"));
    }
    let (lo, hi) = MLE_BOUNDS;
    let ll = |b: f64| diff_log_likelihood(sample, b);

    if sample.values.iter().all(|&u| u == 0) {
        // -n ln b + const: strictly decreasing, no interior optimum.
        return Ok(ScaleEstimate {
            b_hat: lo,
            method: FitMethod::Mle,
            sample_size: sample.len(),
            log_likelihood: Some(ll(lo)),
            stderr_approx: f64::INFINITY,
            degenerate: true,
            warnings: Vec::new(),
        });
    }

    let b_hat = golden_section_max(ll, lo, hi, MLE_TOL);
    let h = 1e-4 * b_hat;
    let curvature = (ll(b_hat + h) - 2.0 * ll(b_hat) + ll(b_hat - h)) / (h * h);
    let stderr_approx = if curvature < 0.0 {
        (-curvature).sqrt().recip()
    } else {
        f64::INFINITY
    };

    Ok(ScaleEstimate {
        b_hat,
        method: FitMethod::Mle,
        sample_size: sample.len(),
        log_likelihood: Some(ll(b_hat)),
        stderr_approx,
        degenerate: false,
        warnings: Vec::new(),
    })
}

/// Method-of-moments estimate `sqrt(s^2 / 4)`, using `Var(L1 - L2) = 4 b^2`.
pub fn fit_scale_moments(sample: &DifferenceSample) -> Result<ScaleEstimate> {
    let n = sample.len();
    if n < 2 {
        return Err(Error::argument(format!(
            "moment fit needs at least 2 differences, got {n}"
        )));
    }
    let nf = n as f64;
    let mean = sample.values.iter().map(|&u| u as f64).sum::<f64>() / nf;
    let var = sample
        .values
        .iter()
        .map(|&u| (u as f64 - mean).powi(2))
        .sum::<f64>()
        / (nf - 1.0);
    if var == 0.0 {
        return Err(Error::Degenerate(
            "all differences are equal; variance is zero".into(),
        ));
    }
    let b_hat = (var / 4.0).sqrt();
    // Delta method: Var(s^2) ~ (m4 - s^4) / n and d sqrt(v/4) / dv = 1 / (8 b).
    let m4 = sample
        .values
        .iter()
        .map(|&u| (u as f64 - mean).powi(4))
        .sum::<f64>()
        / nf;
    let var_of_var = ((m4 - var * var) / nf).max(0.0);
    let stderr_approx = var_of_var.sqrt() / (8.0 * b_hat);

    Ok(ScaleEstimate {
        b_hat,
        method: FitMethod::Moments,
        sample_size: n,
        log_likelihood: None,
        stderr_approx,
        degenerate: false,
        warnings: Vec::new(),
    })
}
