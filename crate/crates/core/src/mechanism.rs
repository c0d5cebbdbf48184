//! Exact counting over tap events and the thresholded Laplace release.
//!
//! Every released cell goes through the same pipeline:
//!
//! 1. exact count `c` of matching events;
//! 2. `d = c + Lap(0, b)`, except that the zero-skipping release publishes
//!    `c = 0` as an exact 0 without drawing noise;
//! 3. `d <= t` is suppressed to 0;
//! 4. optionally, round half up.
//!
//! Noise for a cell is drawn from a generator seeded by the release seed, a
//! stream label and the cell's attribute combination, so a release does not
//! depend on the order in which cells are visited.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use chrono::{Duration, NaiveDate};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::audit::OutputDistribution;
use crate::distributions::{laplace_cdf, laplace_sample, laplace_sf, NoiseScale};
use crate::error::{Error, Result};
use crate::rng::{seeded, sub_rng};

/// Number of 15-minute bins in a day.
pub const BINS_PER_DAY: u8 = 96;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Train,
    Bus,
    Ferry,
    #[serde(rename = "lightrail")]
    LightRail,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Train => "train",
            Mode::Bus => "bus",
            Mode::Ferry => "ferry",
            Mode::LightRail => "lightrail",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(Mode::Train),
            "bus" => Ok(Mode::Bus),
            "ferry" => Ok(Mode::Ferry),
            "lightrail" => Ok(Mode::LightRail),
            other => Err(Error::argument(format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TapType {
    On,
    Off,
}

impl TapType {
    pub fn as_str(self) -> &'static str {
        match self {
            TapType::On => "on",
            TapType::Off => "off",
        }
    }
}

impl fmt::Display for TapType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TapType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "on" => Ok(TapType::On),
            "off" => Ok(TapType::Off),
            other => Err(Error::argument(format!("unknown tap type {other:?}"))),
        }
    }
}

/// Calendar day, written `YYYYMMDD`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Date(NaiveDate);

impl Date {
    pub fn new(date: NaiveDate) -> Self {
        Date(date)
    }

    pub fn ymd(year: i32, month: u32, day: u32) -> Result<Self> {
        NaiveDate::from_ymd_opt(year, month, day)
            .map(Date)
            .ok_or_else(|| Error::argument(format!("invalid date {year}-{month}-{day}")))
    }

    pub fn naive(self) -> NaiveDate {
        self.0
    }

    pub fn add_days(self, days: i64) -> Self {
        Date(self.0 + Duration::days(days))
    }
}

impl fmt::Display for Date {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.format("%Y%m%d"))
    }
}

impl FromStr for Date {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.len() != 8 || !s.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::argument(format!("date must be YYYYMMDD, got {s:?}")));
        }
        NaiveDate::parse_from_str(s, "%Y%m%d")
            .map(Date)
            .map_err(|e| Error::argument(format!("invalid date {s:?}: {e}")))
    }
}

impl Serialize for Date {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Date {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Index of a 15-minute bin within a day, `0..=95`. Displays as `HH:MM`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TimeBin(u8);

impl TimeBin {
    pub fn new(index: u8) -> Result<Self> {
        if index >= BINS_PER_DAY {
            return Err(Error::argument(format!(
                "time bin must be in 0..=95, got {index}"
            )));
        }
        Ok(TimeBin(index))
    }

    pub fn index(self) -> u8 {
        self.0
    }

    /// Bin containing the clock time `hh:mm`.
    pub fn from_hm(hour: u8, minute: u8) -> Result<Self> {
        if hour > 23 || minute > 59 {
            return Err(Error::argument(format!("invalid time {hour}:{minute}")));
        }
        Ok(TimeBin(hour * 4 + minute / 15))
    }
}

impl fmt::Display for TimeBin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let minutes = u32::from(self.0) * 15;
        write!(f, "{:02}:{:02}", minutes / 60, minutes % 60)
    }
}

impl FromStr for TimeBin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (h, m) = s
            .split_once(':')
            .ok_or_else(|| Error::argument(format!("time must be HH:MM, got {s:?}")))?;
        let hour: u8 = h
            .parse()
            .map_err(|_| Error::argument(format!("bad hour in {s:?}")))?;
        let minute: u8 = m
            .parse()
            .map_err(|_| Error::argument(format!("bad minute in {s:?}")))?;
        TimeBin::from_hm(hour, minute)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TapEvent {
    pub mode: Mode,
    pub date: Date,
    pub tap_type: TapType,
    pub time_bin: TimeBin,
    pub location: String,
    /// Empty for modes whose route is not published.
    pub route: String,
}

/// Unordered collection of tap events.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RawDataset {
    pub events: Vec<TapEvent>,
}

impl RawDataset {
    pub fn new(events: Vec<TapEvent>) -> Self {
        RawDataset { events }
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }
}

/// Which release table a combination belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableKind {
    TimeLocation,
    TimeOnly,
    LocationOnly,
    Totals,
}

impl TableKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TableKind::TimeLocation => "time_loc",
            TableKind::TimeOnly => "time_only",
            TableKind::LocationOnly => "loc_only",
            TableKind::Totals => "totals",
        }
    }
}

/// A cell of a contingency table. Absent `time_bin` / `location` means the
/// cell aggregates over that attribute; both absent is a daily total.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AttributeCombination {
    pub mode: Mode,
    pub date: Date,
    pub tap_type: TapType,
    pub time_bin: Option<TimeBin>,
    pub location: Option<String>,
}

impl AttributeCombination {
    pub fn time_location(
        mode: Mode,
        date: Date,
        tap_type: TapType,
        time_bin: TimeBin,
        location: impl Into<String>,
    ) -> Self {
        AttributeCombination {
            mode,
            date,
            tap_type,
            time_bin: Some(time_bin),
            location: Some(location.into()),
        }
    }

    pub fn time_only(mode: Mode, date: Date, tap_type: TapType, time_bin: TimeBin) -> Self {
        AttributeCombination {
            mode,
            date,
            tap_type,
            time_bin: Some(time_bin),
            location: None,
        }
    }

    pub fn location_only(
        mode: Mode,
        date: Date,
        tap_type: TapType,
        location: impl Into<String>,
    ) -> Self {
        AttributeCombination {
            mode,
            date,
            tap_type,
            time_bin: None,
            location: Some(location.into()),
        }
    }

    pub fn totals(mode: Mode, date: Date, tap_type: TapType) -> Self {
        AttributeCombination {
            mode,
            date,
            tap_type,
            time_bin: None,
            location: None,
        }
    }

    pub fn kind(&self) -> TableKind {
        match (&self.time_bin, &self.location) {
            (Some(_), Some(_)) => TableKind::TimeLocation,
            (Some(_), None) => TableKind::TimeOnly,
            (None, Some(_)) => TableKind::LocationOnly,
            (None, None) => TableKind::Totals,
        }
    }

    pub fn matches(&self, event: &TapEvent) -> bool {
        self.mode == event.mode
            && self.date == event.date
            && self.tap_type == event.tap_type
            && self.time_bin.map_or(true, |t| t == event.time_bin)
            && self.location.as_deref().map_or(true, |l| l == event.location)
    }

    /// The combination of `kind` that `event` falls into.
    pub fn project(event: &TapEvent, kind: TableKind) -> Self {
        let time_bin = matches!(kind, TableKind::TimeLocation | TableKind::TimeOnly)
            .then_some(event.time_bin);
        let location = matches!(kind, TableKind::TimeLocation | TableKind::LocationOnly)
            .then(|| event.location.clone());
        AttributeCombination {
            mode: event.mode,
            date: event.date,
            tap_type: event.tap_type,
            time_bin,
            location,
        }
    }

    /// Canonical byte key used for seed derivation.
    fn key(&self) -> String {
        format!(
            "{}|{}|{}|{}|{}",
            self.mode,
            self.date,
            self.tap_type,
            self.time_bin.map(|t| t.index().to_string()).unwrap_or_default(),
            self.location.as_deref().unwrap_or("\u{1}")
        )
    }
}

/// Exact counts per queried combination.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ContingencyTable {
    pub entries: BTreeMap<AttributeCombination, u64>,
}

impl ContingencyTable {
    pub fn get(&self, q: &AttributeCombination) -> Option<u64> {
        self.entries.get(q).copied()
    }

    pub fn from_counts(entries: impl IntoIterator<Item = (AttributeCombination, u64)>) -> Self {
        ContingencyTable {
            entries: entries.into_iter().collect(),
        }
    }
}

/// Counts `data` against every query.
pub fn count_cells(
    data: &RawDataset,
    queries: &BTreeSet<AttributeCombination>,
) -> Result<ContingencyTable> {
    if queries.is_empty() {
        return Err(Error::argument("count_cells needs at least one query"));
    }
    let mut entries: BTreeMap<AttributeCombination, u64> =
        queries.iter().map(|q| (q.clone(), 0)).collect();
    let kinds: BTreeSet<TableKind> = queries.iter().map(AttributeCombination::kind).collect();
    // An event matches at most one query of each kind.
    for event in &data.events {
        for &kind in &kinds {
            if let Some(c) = entries.get_mut(&AttributeCombination::project(event, kind)) {
                *c += 1;
            }
        }
    }
    Ok(ContingencyTable { entries })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReleaseConfig {
    pub scale: NoiseScale,
    pub threshold: f64,
    /// `true` publishes zero counts as exact zeros (the flawed behaviour).
    pub zero_skip: bool,
    pub round_output: bool,
    pub seed: u64,
}

impl ReleaseConfig {
    pub fn new(
        scale: NoiseScale,
        threshold: f64,
        zero_skip: bool,
        round_output: bool,
        seed: u64,
    ) -> Result<Self> {
        if !threshold.is_finite() || threshold < 0.0 {
            return Err(Error::argument(format!(
                "threshold must be finite and non-negative, got {threshold}"
            )));
        }
        Ok(ReleaseConfig {
            scale,
            threshold,
            zero_skip,
            round_output,
            seed,
        })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_zero_skip(mut self, zero_skip: bool) -> Self {
        self.zero_skip = zero_skip;
        self
    }

    /// SHA-256 over every field except the seed.
    pub fn fingerprint(&self) -> String {
        let canonical = format!(
            "scale={:?};threshold={:?};zero_skip={};round_output={}",
            self.scale.get(),
            self.threshold,
            self.zero_skip,
            self.round_output
        );
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }
}

/// Published values per combination. Every value is 0 or exceeded the
/// threshold before rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct ReleasedTable {
    pub entries: BTreeMap<AttributeCombination, f64>,
    pub config_fingerprint: String,
}

impl ReleasedTable {
    pub fn get(&self, q: &AttributeCombination) -> Option<f64> {
        self.entries.get(q).copied()
    }
}

/// What happened to one cell during a release.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellRecord {
    pub raw: u64,
    /// `None` when the cell was a zero under zero-skip and no noise was drawn.
    pub noise: Option<f64>,
    pub suppressed: bool,
    pub released: f64,
}

/// Rounds half up.
pub fn round_half_up(x: f64) -> f64 {
    (x + 0.5).floor()
}

/// Deterministic tail of the pipeline: threshold and round a count given the
/// noise that was (or was not) drawn for it.
pub fn privatize(raw: u64, noise: Option<f64>, config: &ReleaseConfig) -> (f64, bool) {
    let Some(noise) = noise else {
        return (0.0, false);
    };
    let d = raw as f64 + noise;
    if d <= config.threshold {
        (0.0, true)
    } else if config.round_output {
        (round_half_up(d), false)
    } else {
        (d, false)
    }
}

fn draw_noise(
    q: &AttributeCombination,
    raw: u64,
    config: &ReleaseConfig,
    stream: &str,
) -> Option<f64> {
    if config.zero_skip && raw == 0 {
        return None;
    }
    let key = q.key();
    let mut rng = sub_rng(config.seed, &[stream.as_bytes(), key.as_bytes()]);
    Some(laplace_sample(config.scale, &mut rng))
}

/// Releases every cell of `table` under `config`, honouring `zero_skip` as
/// configured, and returns the per-cell record. `stream` separates
/// independent releases that share a seed.
pub fn release_with_records(
    table: &ContingencyTable,
    config: &ReleaseConfig,
    stream: &str,
) -> (ReleasedTable, BTreeMap<AttributeCombination, CellRecord>) {
    let mut entries = BTreeMap::new();
    let mut records = BTreeMap::new();
    for (q, &raw) in &table.entries {
        let noise = draw_noise(q, raw, config, stream);
        let (released, suppressed) = privatize(raw, noise, config);
        entries.insert(q.clone(), released);
        records.insert(
            q.clone(),
            CellRecord {
                raw,
                noise,
                suppressed,
                released,
            },
        );
    }
    (
        ReleasedTable {
            entries,
            config_fingerprint: config.fingerprint(),
        },
        records,
    )
}

fn release_only(table: &ContingencyTable, config: &ReleaseConfig) -> ReleasedTable {
    let entries = table
        .entries
        .iter()
        .map(|(q, &raw)| {
            let noise = draw_noise(q, raw, config, "");
            (q.clone(), privatize(raw, noise, config).0)
        })
        .collect();
    ReleasedTable {
        entries,
        config_fingerprint: config.fingerprint(),
    }
}

/// The zero-skipping release: zero counts are published as exact zeros.
pub fn release_second_algorithm(
    table: &ContingencyTable,
    config: &ReleaseConfig,
) -> Result<ReleasedTable> {
    if !config.zero_skip {
        return Err(Error::Contract(
            "zero_skip is false; use release_corrected for a release that perturbs zeros".into(),
        ));
    }
    Ok(release_only(table, config))
}

/// The corrected release: zero counts are perturbed and thresholded like
/// every other count.
pub fn release_corrected(
    table: &ContingencyTable,
    config: &ReleaseConfig,
) -> Result<ReleasedTable> {
    if config.zero_skip {
        return Err(Error::Contract(
            "zero_skip is true; use release_second_algorithm for the zero-skipping release".into(),
        ));
    }
    Ok(release_only(table, config))
}

/// Textbook Laplace mechanism: i.i.d. `Lap(0, sensitivity / epsilon)` per
/// coordinate.
pub fn laplace_mechanism(
    values: &[f64],
    sensitivity: f64,
    epsilon: f64,
    seed: u64,
) -> Result<Vec<f64>> {
    if !(sensitivity.is_finite() && sensitivity > 0.0) {
        return Err(Error::argument(format!(
            "sensitivity must be positive, got {sensitivity}"
        )));
    }
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::argument(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let scale = NoiseScale::new(sensitivity / epsilon)?;
    let mut rng = seeded(seed);
    Ok(values
        .iter()
        .map(|v| v + laplace_sample(scale, &mut rng))
        .collect())
}

/// Number of scale units past the largest count at which atoms stop being
/// enumerated; the remainder goes to `tail_mass`.
pub const TRUNCATION_SCALES: f64 = 40.0;

/// Exact distribution of the released value of a cell with raw count
/// `count`, after thresholding and rounding half up.
///
/// The atoms describe the rounded value even when `config.round_output` is
/// false; auditing the rounded value is auditing a post-processing of the
/// real-valued release.
pub fn output_distribution(count: u64, config: &ReleaseConfig) -> OutputDistribution {
    output_distribution_within(count, count, config)
}

/// Like [`output_distribution`], with the enumeration horizon set by
/// `horizon_count` (at least `count`). Two distributions computed with the
/// same horizon share an atom universe.
pub fn output_distribution_within(
    count: u64,
    horizon_count: u64,
    config: &ReleaseConfig,
) -> OutputDistribution {
    let fingerprint = config.fingerprint();
    if config.zero_skip && count == 0 {
        return OutputDistribution::new(BTreeMap::from([(0, 1.0)]), 0.0, fingerprint);
    }
    let scale = config.scale;
    let b = scale.get();
    let c = count as f64;
    let t = config.threshold;
    let horizon = horizon_count.max(count) as f64;

    // Pr[lo < d < hi] for d = c + L, evaluated on whichever side of c keeps
    // precision.
    let between = |lo: f64, hi: f64| -> f64 {
        if hi <= lo {
            return 0.0;
        }
        let (lo, hi) = (lo - c, hi - c);
        let p = if hi <= 0.0 {
            laplace_cdf(hi, scale).unwrap() - laplace_cdf(lo, scale).unwrap()
        } else if lo >= 0.0 {
            laplace_sf(lo, scale).unwrap() - laplace_sf(hi, scale).unwrap()
        } else {
            1.0 - laplace_cdf(lo, scale).unwrap() - laplace_sf(hi, scale).unwrap()
        };
        p.max(0.0)
    };

    let mut atoms = BTreeMap::new();
    atoms.insert(0i64, laplace_cdf(t - c, scale).unwrap());

    // Smallest released integer: d in (t, k + 1/2) must be non-empty.
    let k_first = (t - 0.5).floor() as i64 + 1;
    let k_last = (horizon + TRUNCATION_SCALES * b).ceil() as i64;
    let k_low = k_first.max((c - TRUNCATION_SCALES * b).floor() as i64);

    let mut tail_mass = laplace_sf(k_last as f64 + 0.5 - c, scale).unwrap();
    if k_low > k_first {
        tail_mass += between(t, k_low as f64 - 0.5);
    }
    for k in k_low..=k_last {
        let lo = if k == k_first { t } else { (k as f64 - 0.5).max(t) };
        let mass = between(lo, k as f64 + 0.5);
        *atoms.entry(k).or_insert(0.0) += mass;
    }
    OutputDistribution::new(atoms, tail_mass, fingerprint)
}

// --- CSV interchange -------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
struct ReleasedRow {
    mode: String,
    date: String,
    #[serde(rename = "type")]
    tap_type: String,
    time: String,
    location: String,
    count: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct RawRow {
    mode: String,
    date: String,
    #[serde(rename = "type")]
    tap_type: String,
    time: String,
    location: String,
    route: String,
}

/// Formats a released value: integers without a fractional part.
pub fn format_count(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

fn check_headers<R: Read>(reader: &mut csv::Reader<R>, expected: &[&str]) -> Result<()> {
    let headers = reader.headers()?.clone();
    for name in expected {
        if !headers.iter().any(|h| h == *name) {
            return Err(Error::schema(1, format!("missing column {name:?}")));
        }
    }
    Ok(())
}

fn row_line(record: &csv::StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

fn csv_error_line(e: &csv::Error) -> u64 {
    e.position().map_or(0, |p| p.line())
}

/// Writes a release with columns `mode,date,type,time,location,count`.
/// Time is empty for location-only cells and location is `-` for time-only
/// cells.
pub fn write_released_csv<W: Write>(table: &ReleasedTable, w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    for (q, &v) in &table.entries {
        wtr.serialize(ReleasedRow {
            mode: q.mode.to_string(),
            date: q.date.to_string(),
            tap_type: q.tap_type.to_string(),
            time: q.time_bin.map(|t| t.to_string()).unwrap_or_default(),
            location: q.location.clone().unwrap_or_else(|| "-".into()),
            count: format_count(v),
        })?;
    }
    wtr.flush()?;
    Ok(())
}

/// Reads a release written by [`write_released_csv`] (or by hand in the same
/// shape). The fingerprint is unknown and left empty.
pub fn read_released_csv<R: Read>(r: R) -> Result<ReleasedTable> {
    let mut rdr = csv::Reader::from_reader(r);
    check_headers(
        &mut rdr,
        &["mode", "date", "type", "time", "location", "count"],
    )?;
    let headers = rdr.headers()?.clone();
    let mut entries = BTreeMap::new();
    for record in rdr.records() {
        let record = record.map_err(|e| Error::schema(csv_error_line(&e), e.to_string()))?;
        let line = row_line(&record);
        let row: ReleasedRow = record
            .deserialize(Some(&headers))
            .map_err(|e| Error::schema(line, e.to_string()))?;
        let at = |e: Error| Error::schema(line, e.to_string());
        let time_bin = match row.time.trim() {
            "" => None,
            t => Some(t.parse().map_err(at)?),
        };
        let location = match row.location.as_str() {
            "" | "-" => None,
            l => Some(l.to_string()),
        };
        let count: f64 = row
            .count
            .trim()
            .parse()
            .map_err(|_| Error::schema(line, format!("bad count {:?}", row.count)))?;
        if !count.is_finite() || count < 0.0 {
            return Err(Error::schema(line, format!("count must be non-negative, got {count}")));
        }
        let q = AttributeCombination {
            mode: row.mode.parse().map_err(at)?,
            date: row.date.parse().map_err(at)?,
            tap_type: row.tap_type.parse().map_err(at)?,
            time_bin,
            location,
        };
        entries.insert(q, count);
    }
    Ok(ReleasedTable {
        entries,
        config_fingerprint: String::new(),
    })
}

/// Writes raw events with columns `mode,date,type,time,location,route`.
pub fn write_raw_csv<W: Write>(data: &RawDataset, w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    for e in &data.events {
        wtr.serialize(RawRow {
            mode: e.mode.to_string(),
            date: e.date.to_string(),
            tap_type: e.tap_type.to_string(),
            time: e.time_bin.to_string(),
            location: e.location.clone(),
            route: e.route.clone(),
        })?;
    }
    wtr.flush()?;
    Ok(())
}

/// Reads raw events; schema violations name the offending line.
pub fn read_raw_csv<R: Read>(r: R) -> Result<RawDataset> {
    let mut rdr = csv::Reader::from_reader(r);
    check_headers(
        &mut rdr,
        &["mode", "date", "type", "time", "location", "route"],
    )?;
    let headers = rdr.headers()?.clone();
    let mut events = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| Error::schema(csv_error_line(&e), e.to_string()))?;
        let line = row_line(&record);
        let row: RawRow = record
            .deserialize(Some(&headers))
            .map_err(|e| Error::schema(line, e.to_string()))?;
        let at = |e: Error| Error::schema(line, e.to_string());
        if row.location.is_empty() {
            return Err(Error::schema(line, "empty location"));
        }
        events.push(TapEvent {
            mode: row.mode.parse().map_err(at)?,
            date: row.date.parse().map_err(at)?,
            tap_type: row.tap_type.parse().map_err(at)?,
            time_bin: row.time.parse().map_err(at)?,
            location: row.location,
            route: row.route,
        });
    }
    Ok(RawDataset { events })
}
