//! Adversarial analyses against released tables.
//!
//! - Pairing tap-ons with tap-offs on a point-to-point route with automatic
//!   tap-off gives two independent releases of the same raw value; their
//!   differences reveal the noise scale.
//! - A cell suppressed in the time-and-location table can be estimated from
//!   an independently released marginal that covers it.
//! - Under zero-skip, any published value proves the raw count was nonzero.

use serde::{Deserialize, Serialize};

use crate::distributions::{fit_scale_mle, DifferenceSample, FitWarning, NoiseScale, ScaleEstimate};
use crate::error::{Error, Result};
use crate::mechanism::{AttributeCombination, ReleaseConfig, ReleasedTable, TableKind, TapType, TimeBin, BINS_PER_DAY};
use crate::optimize::golden_section_max;

/// Minimum number of usable pairs below which a fit is flagged.
pub const RECOMMENDED_PAIRS: usize = 30;

/// A point-to-point service whose tap-ons at one location reappear as
/// tap-offs at another a fixed number of bins later.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairSpec {
    pub route: String,
    pub on_location: String,
    pub off_location: String,
    pub trip_duration_bins: u8,
    pub auto_tap_off: bool,
}

impl PairSpec {
    pub fn new(
        route: impl Into<String>,
        on_location: impl Into<String>,
        off_location: impl Into<String>,
        trip_duration_bins: u8,
        auto_tap_off: bool,
    ) -> Result<Self> {
        let spec = PairSpec {
            route: route.into(),
            on_location: on_location.into(),
            off_location: off_location.into(),
            trip_duration_bins,
            auto_tap_off,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trip_duration_bins == 0 {
            return Err(Error::argument("trip duration must be at least one bin"));
        }
        if self.on_location == self.off_location {
            return Err(Error::argument("on and off locations must differ"));
        }
        Ok(())
    }

    /// The same service in the opposite direction.
    pub fn reversed(&self) -> Self {
        PairSpec {
            on_location: self.off_location.clone(),
            off_location: self.on_location.clone(),
            ..self.clone()
        }
    }
}

/// Differences from pairing, with what was left out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedSample {
    pub sample: DifferenceSample,
    /// Pairs dropped because at least one side was released as 0.
    pub skipped_suppressed: usize,
    pub warnings: Vec<FitWarning>,
}

/// Pairs each nonzero tap-on count at `spec.on_location` with the tap-off
/// count at `spec.off_location` `trip_duration_bins` later on the same day
/// and returns `on - off`.
pub fn pair_point_to_point(table: &ReleasedTable, spec: &PairSpec) -> Result<PairedSample> {
    spec.validate()?;
    if let Some(q) = table
        .entries
        .keys()
        .find(|q| q.kind() != TableKind::TimeLocation)
    {
        return Err(Error::argument(format!(
            "pairing needs a time-and-location release; found a {} cell",
            q.kind().as_str()
        )));
    }
    let mut values = Vec::new();
    let mut skipped = 0;
    for (q, &on) in &table.entries {
        if q.tap_type != TapType::On || q.location.as_deref() != Some(spec.on_location.as_str()) {
            continue;
        }
        if on == 0.0 {
            continue;
        }
        let bin = q.time_bin.expect("time-location cell").index() + spec.trip_duration_bins;
        if bin >= BINS_PER_DAY {
            continue;
        }
        let off_q = AttributeCombination::time_location(
            q.mode,
            q.date,
            TapType::Off,
            TimeBin::new(bin)?,
            spec.off_location.clone(),
        );
        match table.get(&off_q) {
            Some(off) if off > 0.0 => values.push((on - off).round() as i64),
            Some(_) => skipped += 1,
            None => {}
        }
    }
    let mut warnings = Vec::new();
    if !spec.auto_tap_off {
        warnings.push(FitWarning::NoAutoTapOff);
    }
    Ok(PairedSample {
        sample: DifferenceSample::new(values),
        skipped_suppressed: skipped,
        warnings,
    })
}

/// Pairs, then fits the scale by maximum likelihood.
pub fn recover_scale(table: &ReleasedTable, spec: &PairSpec) -> Result<ScaleEstimate> {
    let paired = pair_point_to_point(table, spec)?;
    if paired.sample.is_empty() {
        return Err(Error::argument(format!(
            "no usable pairs for {} -> {} ({} skipped as suppressed)",
            spec.on_location, spec.off_location, paired.skipped_suppressed
        )));
    }
    let mut estimate = fit_scale_mle(&paired.sample)?;
    estimate.warnings = paired.warnings;
    if paired.sample.len() < RECOMMENDED_PAIRS {
        estimate.warnings.push(FitWarning::LowSample {
            pairs: paired.sample.len(),
            recommended: RECOMMENDED_PAIRS,
        });
    }
    Ok(estimate)
}

/// How the half-width of the suppressed-count interval is derived.
///
/// The point estimate `S - Σ X_i` equals the hidden count plus the sum of
/// `m` independent `Lap(0, b)` terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum IntervalRule {
    /// Two-sided Chernoff bound with the Laplace moment generating function
    /// `E[e^{λL}] = 1 / (1 - λ²b²)`:
    /// `a = b · min_{0<s<1} (ln(2/α) - m ln(1 - s²)) / s`.
    /// Guarantees coverage of at least `1 - α`.
    #[default]
    Chernoff,
    /// `a = b · ln(2^(m-1) / α)`, the product-of-tails form. Cheaper and
    /// narrower, but its coverage falls below `1 - α` for `m >= 2` (about
    /// 92% at `m = 3`, `α = 0.05`).
    TailProduct,
}

/// Half-width of the interval around a sum of `m` Laplace terms.
pub fn half_width(m: usize, scale: NoiseScale, alpha: f64, rule: IntervalRule) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::argument(format!("alpha must be in (0, 1), got {alpha}")));
    }
    if m == 0 {
        return Err(Error::argument("need at least one noise term"));
    }
    let b = scale.get();
    let m = m as f64;
    Ok(match rule {
        IntervalRule::TailProduct => b * ((m - 1.0) * 2f64.ln() - alpha.ln()),
        IntervalRule::Chernoff => {
            let log_two_over_alpha = (2.0 / alpha).ln();
            let width = |s: f64| (log_two_over_alpha - m * (1.0 - s * s).ln()) / s;
            let s = golden_section_max(|s| -width(s), 1e-9, 1.0 - 1e-9, 1e-12);
            b * width(s)
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuppressionEstimate {
    pub point_estimate: f64,
    pub half_width: f64,
    pub alpha: f64,
    pub interval: (f64, f64),
    /// Non-negative integers inside the interval.
    pub captured_integers: Vec<i64>,
    /// Number of independent noise terms in the point estimate.
    pub m: usize,
    pub rule: IntervalRule,
}

/// Estimates a suppressed cell from a released total `total` and the
/// released values of the other cells it covers, with the default
/// [`IntervalRule::Chernoff`] half-width.
pub fn estimate_suppressed(
    total: f64,
    components: &[f64],
    scale: NoiseScale,
    alpha: f64,
) -> Result<SuppressionEstimate> {
    estimate_suppressed_with(total, components, scale, alpha, IntervalRule::default())
}

pub fn estimate_suppressed_with(
    total: f64,
    components: &[f64],
    scale: NoiseScale,
    alpha: f64,
    rule: IntervalRule,
) -> Result<SuppressionEstimate> {
    if !total.is_finite() || components.iter().any(|c| !c.is_finite()) {
        return Err(Error::Domain("released values must be finite".into()));
    }
    let m = components.len() + 1;
    let a = half_width(m, scale, alpha, rule)?;
    let point = total - components.iter().sum::<f64>();
    let (lo, hi) = (point - a, point + a);
    let first = lo.max(0.0).ceil() as i64;
    let last = hi.floor() as i64;
    Ok(SuppressionEstimate {
        point_estimate: point,
        half_width: a,
        alpha,
        interval: (lo, hi),
        captured_integers: (first..=last).collect(),
        m,
        rule,
    })
}

/// Estimates the time-and-location cell `hidden` from the time-only total of
/// its bin and the other nonzero time-and-location cells in that bin.
pub fn estimate_from_marginal(
    time_loc: &ReleasedTable,
    time_only: &ReleasedTable,
    hidden: &AttributeCombination,
    scale: NoiseScale,
    alpha: f64,
) -> Result<SuppressionEstimate> {
    let Some(bin) = hidden.time_bin.filter(|_| hidden.location.is_some()) else {
        return Err(Error::argument("hidden cell must be a time-and-location cell"));
    };
    let total_q = AttributeCombination::time_only(hidden.mode, hidden.date, hidden.tap_type, bin);
    let total = time_only.get(&total_q).ok_or_else(|| {
        Error::argument(format!("time-only release has no cell for {total_q:?}"))
    })?;
    let components: Vec<f64> = time_loc
        .entries
        .iter()
        .filter(|(q, &v)| {
            v > 0.0
                && *q != hidden
                && q.mode == hidden.mode
                && q.date == hidden.date
                && q.tap_type == hidden.tap_type
                && q.time_bin == Some(bin)
        })
        .map(|(_, &v)| v)
        .collect();
    estimate_suppressed(total, &components, scale, alpha)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Presence {
    CertainPresence,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PresenceVerdict {
    pub verdict: Presence,
    pub released_value: f64,
    pub threshold: f64,
    pub zero_skip: bool,
}

/// Under zero-skip a raw zero is always published as 0, so any value the
/// release can publish for a nonzero count proves presence: anything above
/// the threshold, or with rounding, the integer the threshold itself rounds
/// into. Under the corrected release every output is compatible with a zero.
pub fn detect_presence(released_value: f64, config: &ReleaseConfig) -> PresenceVerdict {
    let t = config.threshold;
    let publishable = if config.round_output {
        let smallest = ((t - 0.5).floor() + 1.0).max(1.0);
        released_value >= smallest && released_value.fract() == 0.0
    } else {
        released_value > t
    };
    let certain = config.zero_skip && publishable;
    PresenceVerdict {
        verdict: if certain {
            Presence::CertainPresence
        } else {
            Presence::Inconclusive
        },
        released_value,
        threshold: t,
        zero_skip: config.zero_skip,
    }
}
