//! Deterministic synthetic transit scenarios with a ground-truth ledger.
//!
//! A scenario is a set of routes with timetables, a demand model giving
//! boardings per service, and a seed. Generation walks every service on every
//! date; each boarding becomes a tap-on at the boarding stop and a tap-off at
//! the chosen alighting stop. On routes without automatic tap-off a
//! passenger taps off with probability `tap_off_probability`; the rest are
//! recorded at [`UNKNOWN_LOCATION`].
//!
//! [`derive_releases`] counts the three release tables (time and location,
//! time only, location only) directly from the raw events and privatizes each
//! with its own noise stream, keeping every draw in a [`GroundTruthLedger`].

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use rand::distr::weighted::WeightedIndex;
use rand::distr::{Bernoulli, Distribution};
use rand_distr::Poisson;
use serde::{Deserialize, Serialize};

use crate::distributions::NoiseScale;
use crate::error::{Error, Result};
use crate::mechanism::{
    count_cells, format_count, privatize, release_with_records, AttributeCombination, CellRecord,
    ContingencyTable, Date, Mode, RawDataset, ReleaseConfig, ReleasedTable, TableKind, TapEvent,
    TapType, TimeBin, BINS_PER_DAY,
};
use crate::rng::sub_rng;

/// Tap-off location for passengers who never tapped off.
pub const UNKNOWN_LOCATION: &str = "UNKNOWN";

/// Departures every `headway_bins` from `first_bin` to `last_bin` inclusive.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ServiceBand {
    pub first_bin: u8,
    pub last_bin: u8,
    pub headway_bins: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteSpec {
    pub id: String,
    pub mode: Mode,
    pub stops: Vec<String>,
    /// Bins between adjacent stops.
    pub travel_bins: u8,
    pub bands: Vec<ServiceBand>,
    pub auto_tap_off: bool,
    /// Ignored when `auto_tap_off` is set.
    #[serde(default = "one")]
    pub tap_off_probability: f64,
}

fn one() -> f64 {
    1.0
}

impl RouteSpec {
    /// Departure bins from the first stop, in order.
    pub fn departures(&self) -> Vec<u8> {
        let mut out: BTreeSet<u8> = BTreeSet::new();
        for band in &self.bands {
            let mut bin = band.first_bin;
            while bin <= band.last_bin {
                out.insert(bin);
                match bin.checked_add(band.headway_bins) {
                    Some(next) => bin = next,
                    None => break,
                }
            }
        }
        out.into_iter().collect()
    }

    fn validate(&self) -> Result<()> {
        let ctx = |msg: String| Error::argument(format!("route {}: {msg}", self.id));
        if self.stops.len() < 2 {
            return Err(ctx("needs at least two stops".into()));
        }
        if self.travel_bins == 0 {
            return Err(ctx("travel time must be at least one bin".into()));
        }
        if self.bands.is_empty() {
            return Err(ctx("has no service bands".into()));
        }
        for band in &self.bands {
            if band.headway_bins == 0 {
                return Err(ctx("headway must be at least one bin".into()));
            }
            if band.first_bin > band.last_bin || band.last_bin >= BINS_PER_DAY {
                return Err(ctx(format!(
                    "service window {}..={} outside 0..=95",
                    band.first_bin, band.last_bin
                )));
            }
        }
        if !(0.0..=1.0).contains(&self.tap_off_probability) {
            return Err(ctx("tap-off probability must be in [0, 1]".into()));
        }
        Ok(())
    }
}

/// Boardings per service at one stop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Boardings {
    Poisson { mean: f64 },
    /// An exact count on every matching service.
    Fixed { count: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Alighting {
    pub stop: String,
    pub weight: f64,
}

/// Demand for services of `route` departing the first stop within
/// `first_bin..=last_bin`, boarding at `stop`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemandEntry {
    pub route: String,
    pub stop: String,
    pub first_bin: u8,
    pub last_bin: u8,
    pub boardings: Boardings,
    /// Downstream stops; weights sum to 1.
    pub alighting: Vec<Alighting>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DemandModel {
    pub entries: Vec<DemandEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub name: String,
    pub seed: u64,
    pub dates: Vec<Date>,
    pub routes: Vec<RouteSpec>,
    pub demand: DemandModel,
}

impl ScenarioConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.dates.is_empty() {
            return Err(Error::argument("scenario has no dates"));
        }
        if self.routes.is_empty() {
            return Err(Error::argument("scenario has no routes"));
        }
        let mut ids = BTreeSet::new();
        for r in &self.routes {
            r.validate()?;
            if !ids.insert(r.id.as_str()) {
                return Err(Error::argument(format!("duplicate route id {}", r.id)));
            }
        }
        for d in &self.demand.entries {
            let ctx = |msg: &str| {
                Error::argument(format!("demand {} at {}: {msg}", d.route, d.stop))
            };
            let route = self
                .routes
                .iter()
                .find(|r| r.id == d.route)
                .ok_or_else(|| ctx("unknown route"))?;
            let board = route
                .stops
                .iter()
                .position(|s| *s == d.stop)
                .ok_or_else(|| ctx("stop not on route"))?;
            match d.boardings {
                Boardings::Poisson { mean } if !(mean.is_finite() && mean >= 0.0) => {
                    return Err(ctx("mean boardings must be finite and non-negative"))
                }
                _ => {}
            }
            if d.first_bin > d.last_bin || d.last_bin >= BINS_PER_DAY {
                return Err(ctx("band outside 0..=95"));
            }
            if d.alighting.is_empty() {
                return Err(ctx("no alighting stops"));
            }
            let mut total = 0.0;
            for a in &d.alighting {
                let pos = route
                    .stops
                    .iter()
                    .position(|s| *s == a.stop)
                    .ok_or_else(|| ctx("alighting stop not on route"))?;
                if pos <= board {
                    return Err(ctx("alighting stop must be downstream"));
                }
                if !(a.weight.is_finite() && a.weight >= 0.0) {
                    return Err(ctx("alighting weight must be non-negative"));
                }
                total += a.weight;
            }
            if (total - 1.0).abs() > 1e-9 {
                return Err(ctx("alighting weights must sum to 1"));
            }
        }
        Ok(())
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::argument(format!("serializing scenario: {e}")))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let config: ScenarioConfig =
            toml::from_str(text).map_err(|e| Error::argument(format!("parsing scenario: {e}")))?;
        config.validate()?;
        Ok(config)
    }
}

/// One passenger's linked tap-on and tap-off. Only the scenario generator
/// sees these; releases are built from the unlinked [`RawDataset`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trip {
    pub on: TapEvent,
    pub off: TapEvent,
}

fn event_at(
    route: &RouteSpec,
    date: Date,
    absolute_bin: u32,
    tap_type: TapType,
    location: &str,
) -> TapEvent {
    let per_day = u32::from(BINS_PER_DAY);
    TapEvent {
        mode: route.mode,
        date: date.add_days(i64::from(absolute_bin / per_day)),
        tap_type,
        time_bin: TimeBin::new((absolute_bin % per_day) as u8).expect("bin reduced mod 96"),
        location: location.to_string(),
        route: route.id.clone(),
    }
}

/// Generates linked trips. Services running past midnight land on the next
/// date.
pub fn generate_trips(config: &ScenarioConfig) -> Result<Vec<Trip>> {
    config.validate()?;
    let mut trips = Vec::new();
    for &date in &config.dates {
        let date_key = date.to_string();
        for route in &config.routes {
            let mut rng = sub_rng(config.seed, &[b"gen", date_key.as_bytes(), route.id.as_bytes()]);
            let tap_off = Bernoulli::new(if route.auto_tap_off {
                1.0
            } else {
                route.tap_off_probability
            })
            .expect("validated probability");
            let demand: Vec<&DemandEntry> = config
                .demand
                .entries
                .iter()
                .filter(|d| d.route == route.id)
                .collect();
            for departure in route.departures() {
                for (i, stop) in route.stops.iter().enumerate() {
                    for d in demand
                        .iter()
                        .filter(|d| d.stop == *stop && (d.first_bin..=d.last_bin).contains(&departure))
                    {
                        let n = match d.boardings {
                            Boardings::Fixed { count } => count,
                            Boardings::Poisson { mean } if mean == 0.0 => 0,
                            Boardings::Poisson { mean } => Poisson::new(mean)
                                .map_err(|e| Error::argument(format!("poisson mean {mean}: {e}")))?
                                .sample(&mut rng) as u64,
                        };
                        let weights = WeightedIndex::new(d.alighting.iter().map(|a| a.weight))
                            .map_err(|e| Error::argument(format!("alighting weights: {e}")))?;
                        let on_bin = u32::from(departure) + i as u32 * u32::from(route.travel_bins);
                        for _ in 0..n {
                            let dest = &d.alighting[weights.sample(&mut rng)].stop;
                            let j = route.stops.iter().position(|s| s == dest).expect("validated");
                            let off_bin =
                                u32::from(departure) + j as u32 * u32::from(route.travel_bins);
                            let off_location = if tap_off.sample(&mut rng) {
                                dest.as_str()
                            } else {
                                UNKNOWN_LOCATION
                            };
                            trips.push(Trip {
                                on: event_at(route, date, on_bin, TapType::On, stop),
                                off: event_at(route, date, off_bin, TapType::Off, off_location),
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(trips)
}

/// Generates the raw tap events of a scenario.
pub fn generate_raw(config: &ScenarioConfig) -> Result<RawDataset> {
    let trips = generate_trips(config)?;
    let mut events = Vec::with_capacity(trips.len() * 2);
    for t in trips {
        events.push(t.on);
        events.push(t.off);
    }
    Ok(RawDataset::new(events))
}

/// Release configurations for the three tables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReleasePlan {
    pub time_loc: ReleaseConfig,
    pub time_only: ReleaseConfig,
    pub loc_only: ReleaseConfig,
}

impl ReleasePlan {
    pub fn uniform(config: ReleaseConfig) -> Self {
        ReleasePlan {
            time_loc: config,
            time_only: config,
            loc_only: config,
        }
    }

    pub fn config(&self, kind: TableKind) -> Option<&ReleaseConfig> {
        match kind {
            TableKind::TimeLocation => Some(&self.time_loc),
            TableKind::TimeOnly => Some(&self.time_only),
            TableKind::LocationOnly => Some(&self.loc_only),
            TableKind::Totals => None,
        }
    }
}

/// Raw counts, drawn noise and released values for every cell of every
/// release.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruthLedger {
    pub plan: ReleasePlan,
    pub cells: BTreeMap<TableKind, BTreeMap<AttributeCombination, CellRecord>>,
}

impl GroundTruthLedger {
    pub fn record(&self, q: &AttributeCombination) -> Option<&CellRecord> {
        self.cells.get(&q.kind())?.get(q)
    }

    /// Replays every recorded draw through the threshold and rounding and
    /// checks it against the recorded release.
    pub fn reconcile(&self, releases: &Releases) -> Result<()> {
        for (&kind, cells) in &self.cells {
            let config = self.plan.config(kind).expect("ledger holds release tables only");
            let table = releases.table(kind).expect("release tables only");
            if table.entries.len() != cells.len() {
                return Err(Error::Contract(format!(
                    "{} has {} cells, ledger {}",
                    kind.as_str(),
                    table.entries.len(),
                    cells.len()
                )));
            }
            for (q, rec) in cells {
                let (replayed, _) = privatize(rec.raw, rec.noise, config);
                let published = table.get(q);
                if published != Some(replayed) || rec.released != replayed {
                    return Err(Error::Contract(format!(
                        "{} cell {q:?}: replay gives {replayed}, release has {published:?}",
                        kind.as_str()
                    )));
                }
            }
        }
        Ok(())
    }

    /// Writes `table,mode,date,type,time,location,raw,noise,suppressed,released`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record([
            "table", "mode", "date", "type", "time", "location", "raw", "noise", "suppressed",
            "released",
        ])?;
        for (kind, cells) in &self.cells {
            for (q, rec) in cells {
                wtr.write_record([
                    kind.as_str().to_string(),
                    q.mode.to_string(),
                    q.date.to_string(),
                    q.tap_type.to_string(),
                    q.time_bin.map(|t| t.to_string()).unwrap_or_default(),
                    q.location.clone().unwrap_or_else(|| "-".into()),
                    rec.raw.to_string(),
                    rec.noise.map(|n| format!("{n:?}")).unwrap_or_default(),
                    rec.suppressed.to_string(),
                    format_count(rec.released),
                ])?;
            }
        }
        wtr.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Releases {
    pub time_loc: ReleasedTable,
    pub time_only: ReleasedTable,
    pub loc_only: ReleasedTable,
    pub ledger: GroundTruthLedger,
}

impl Releases {
    pub fn table(&self, kind: TableKind) -> Option<&ReleasedTable> {
        match kind {
            TableKind::TimeLocation => Some(&self.time_loc),
            TableKind::TimeOnly => Some(&self.time_only),
            TableKind::LocationOnly => Some(&self.loc_only),
            TableKind::Totals => None,
        }
    }
}

/// Cells released for `raw`: for each mode present, every combination of the
/// dates and locations seen for that mode with both tap types and all 96
/// bins.
pub fn query_universe(raw: &RawDataset) -> BTreeMap<TableKind, BTreeSet<AttributeCombination>> {
    let mut dates: BTreeMap<Mode, BTreeSet<Date>> = BTreeMap::new();
    let mut locations: BTreeMap<Mode, BTreeSet<&str>> = BTreeMap::new();
    for e in &raw.events {
        dates.entry(e.mode).or_default().insert(e.date);
        locations.entry(e.mode).or_default().insert(e.location.as_str());
    }
    let mut out: BTreeMap<TableKind, BTreeSet<AttributeCombination>> = BTreeMap::new();
    for kind in [TableKind::TimeLocation, TableKind::TimeOnly, TableKind::LocationOnly] {
        out.insert(kind, BTreeSet::new());
    }
    for (&mode, mode_dates) in &dates {
        for &date in mode_dates {
            for tap_type in [TapType::On, TapType::Off] {
                for bin in 0..BINS_PER_DAY {
                    let t = TimeBin::new(bin).expect("bin < 96");
                    out.get_mut(&TableKind::TimeOnly)
                        .unwrap()
                        .insert(AttributeCombination::time_only(mode, date, tap_type, t));
                    for &loc in &locations[&mode] {
                        out.get_mut(&TableKind::TimeLocation).unwrap().insert(
                            AttributeCombination::time_location(mode, date, tap_type, t, loc),
                        );
                    }
                }
                for &loc in &locations[&mode] {
                    out.get_mut(&TableKind::LocationOnly)
                        .unwrap()
                        .insert(AttributeCombination::location_only(mode, date, tap_type, loc));
                }
            }
        }
    }
    out
}

/// Derives the three release tables with one configuration.
pub fn derive_releases(raw: &RawDataset, config: &ReleaseConfig) -> Releases {
    derive_releases_with(raw, &ReleasePlan::uniform(*config))
}

/// Derives the three release tables, each counted from `raw` and privatized
/// on its own noise stream.
pub fn derive_releases_with(raw: &RawDataset, plan: &ReleasePlan) -> Releases {
    let universe = query_universe(raw);
    let mut tables = BTreeMap::new();
    let mut cells = BTreeMap::new();
    for (kind, queries) in universe {
        let config = plan.config(kind).expect("release tables only");
        let counts = if queries.is_empty() {
            ContingencyTable::default()
        } else {
            count_cells(raw, &queries).expect("non-empty queries")
        };
        let (table, records) = release_with_records(&counts, config, kind.as_str());
        tables.insert(kind, table);
        cells.insert(kind, records);
    }
    let mut take = |k| tables.remove(&k).expect("all three kinds present");
    Releases {
        time_loc: take(TableKind::TimeLocation),
        time_only: take(TableKind::TimeOnly),
        loc_only: take(TableKind::LocationOnly),
        ledger: GroundTruthLedger { plan: *plan, cells },
    }
}

// --- built-in scenarios ----------------------------------------------------

fn date(s: &str) -> Date {
    s.parse().expect("built-in date")
}

/// Two non-contiguous weeks: 25-31 July and 8-14 August 2016.
pub fn default_horizon() -> Vec<Date> {
    let first = date("20160725");
    let second = date("20160808");
    (0..7)
        .map(|d| first.add_days(d))
        .chain((0..7).map(|d| second.add_days(d)))
        .collect()
}

fn poisson(route: &str, stop: &str, bins: (u8, u8), mean: f64, alight: &[(&str, f64)]) -> DemandEntry {
    DemandEntry {
        route: route.into(),
        stop: stop.into(),
        first_bin: bins.0,
        last_bin: bins.1,
        boardings: Boardings::Poisson { mean },
        alighting: alight
            .iter()
            .map(|&(s, w)| Alighting {
                stop: s.into(),
                weight: w,
            })
            .collect(),
    }
}

fn band(first_bin: u8, last_bin: u8, headway_bins: u8) -> ServiceBand {
    ServiceBand {
        first_bin,
        last_bin,
        headway_bins,
    }
}

pub const MANLY_WHARF: &str = "Manly Wharf";
pub const CIRCULAR_QUAY_3: &str = "Circular Quay No. 3 Wharf";
pub const CIRCULAR_QUAY_5: &str = "Circular Quay No. 5 Wharf";
pub const CREMORNE_POINT: &str = "Cremorne Point Wharf";
pub const SOUTH_MOSMAN: &str = "South Mosman Wharf";

/// Point-to-point ferry with automatic tap-off, a 30-minute crossing and a
/// departure every 15 minutes from 06:00 to 21:45 in each direction, over
/// the default two weeks.
pub fn scenario_manly() -> ScenarioConfig {
    let route = |id: &str, from: &str, to: &str| RouteSpec {
        id: id.into(),
        mode: Mode::Ferry,
        stops: vec![from.into(), to.into()],
        travel_bins: 2,
        bands: vec![band(24, 87, 1)],
        auto_tap_off: true,
        tap_off_probability: 1.0,
    };
    ScenarioConfig {
        name: "manly".into(),
        seed: 0,
        dates: default_horizon(),
        routes: vec![
            route("F1-inbound", MANLY_WHARF, CIRCULAR_QUAY_3),
            route("F1-outbound", CIRCULAR_QUAY_3, MANLY_WHARF),
        ],
        demand: DemandModel {
            entries: vec![
                poisson("F1-inbound", MANLY_WHARF, (24, 39), 90.0, &[(CIRCULAR_QUAY_3, 1.0)]),
                poisson("F1-inbound", MANLY_WHARF, (40, 87), 45.0, &[(CIRCULAR_QUAY_3, 1.0)]),
                poisson("F1-outbound", CIRCULAR_QUAY_3, (24, 67), 35.0, &[(MANLY_WHARF, 1.0)]),
                poisson("F1-outbound", CIRCULAR_QUAY_3, (68, 87), 80.0, &[(MANLY_WHARF, 1.0)]),
            ],
        },
    }
}

/// The pairing to use against [`scenario_manly`].
pub fn manly_pair_spec() -> crate::attacks::PairSpec {
    crate::attacks::PairSpec::new("F1-inbound", MANLY_WHARF, CIRCULAR_QUAY_3, 2, true)
        .expect("valid built-in pair spec")
}

/// Raw alightings at Cremorne Point in [`scenario_secret_ferry`].
pub const SECRET_FERRY_HIDDEN: u64 = 17;

/// Late-night ferries: two busy services arrive at Manly and Circular Quay
/// in the 00:00 bin of 12 August, and a small service drops exactly
/// [`SECRET_FERRY_HIDDEN`] passengers at Cremorne Point in the same bin.
/// Nothing else taps off in that bin.
pub fn scenario_secret_ferry() -> ScenarioConfig {
    scenario_secret_ferry_with_hidden(SECRET_FERRY_HIDDEN)
}

pub fn scenario_secret_ferry_with_hidden(hidden: u64) -> ScenarioConfig {
    let ferry = |id: &str, stops: &[&str], travel_bins: u8, dep: u8| RouteSpec {
        id: id.into(),
        mode: Mode::Ferry,
        stops: stops.iter().map(|s| s.to_string()).collect(),
        travel_bins,
        bands: vec![band(dep, dep, 1)],
        auto_tap_off: true,
        tap_off_probability: 1.0,
    };
    let mut demand = vec![
        poisson("F1-outbound", CIRCULAR_QUAY_3, (94, 94), 90.0, &[(MANLY_WHARF, 1.0)]),
        poisson("F1-inbound", MANLY_WHARF, (94, 94), 40.0, &[(CIRCULAR_QUAY_3, 1.0)]),
    ];
    demand.push(DemandEntry {
        route: "F6".into(),
        stop: CIRCULAR_QUAY_5.into(),
        first_bin: 95,
        last_bin: 95,
        boardings: Boardings::Fixed { count: hidden },
        alighting: vec![Alighting {
            stop: CREMORNE_POINT.into(),
            weight: 1.0,
        }],
    });
    ScenarioConfig {
        name: "secret-ferry".into(),
        seed: 0,
        dates: vec![date("20160811")],
        routes: vec![
            // 23:30 departures, arriving 00:00-00:14.
            ferry("F1-outbound", &[CIRCULAR_QUAY_3, MANLY_WHARF], 2, 94),
            ferry("F1-inbound", &[MANLY_WHARF, CIRCULAR_QUAY_3], 2, 94),
            // 23:45 departure: Cremorne Point at 00:00, South Mosman at 00:15.
            ferry("F6", &[CIRCULAR_QUAY_5, CREMORNE_POINT, SOUTH_MOSMAN], 1, 95),
        ],
        demand: DemandModel { entries: demand },
    }
}

/// The suppressed-looking cell of [`scenario_secret_ferry`].
pub fn secret_ferry_hidden_cell() -> AttributeCombination {
    AttributeCombination::time_location(
        Mode::Ferry,
        date("20160812"),
        TapType::Off,
        TimeBin::new(0).expect("bin 0"),
        CREMORNE_POINT,
    )
}

/// First bin at which daytime routes start.
pub const NIGHT_BUS_DAY_START: u8 = 20;

/// Night bus at the timetable extremes: before 05:00 only the N70 runs, so
/// every nonzero cell is attributable to it; from 05:00 two daytime routes
/// share the same postcodes.
pub fn scenario_night_bus() -> ScenarioConfig {
    let n70 = RouteSpec {
        id: "N70".into(),
        mode: Mode::Bus,
        stops: vec!["2750".into(), "2770".into(), "2148".into(), "2000".into()],
        travel_bins: 1,
        // 04:15 from Penrith.
        bands: vec![band(17, 17, 1)],
        auto_tap_off: false,
        tap_off_probability: 0.95,
    };
    let day = |id: &str, stops: &[&str], headway: u8| RouteSpec {
        id: id.into(),
        mode: Mode::Bus,
        stops: stops.iter().map(|s| s.to_string()).collect(),
        travel_bins: 1,
        bands: vec![band(NIGHT_BUS_DAY_START, 87, headway)],
        auto_tap_off: false,
        tap_off_probability: 0.95,
    };
    ScenarioConfig {
        name: "night-bus".into(),
        seed: 0,
        dates: default_horizon(),
        routes: vec![
            n70,
            day("770", &["2770", "2148", "2000"], 2),
            day("702", &["2148", "2770", "2750"], 2),
        ],
        demand: DemandModel {
            entries: vec![
                poisson("N70", "2750", (17, 17), 3.0, &[("2148", 0.5), ("2000", 0.5)]),
                poisson("N70", "2770", (17, 17), 21.0, &[("2148", 0.3), ("2000", 0.7)]),
                poisson("N70", "2148", (17, 17), 31.0, &[("2000", 1.0)]),
                poisson("770", "2770", (20, 87), 12.0, &[("2148", 0.4), ("2000", 0.6)]),
                poisson("770", "2148", (20, 87), 15.0, &[("2000", 1.0)]),
                poisson("702", "2148", (20, 87), 10.0, &[("2770", 0.5), ("2750", 0.5)]),
                poisson("702", "2770", (20, 87), 6.0, &[("2750", 1.0)]),
            ],
        },
    }
}

/// Built-in scenario by name.
pub fn scenario_by_name(name: &str) -> Option<ScenarioConfig> {
    match name {
        "manly" => Some(scenario_manly()),
        "secret-ferry" => Some(scenario_secret_ferry()),
        "night-bus" => Some(scenario_night_bus()),
        _ => None,
    }
}

pub const SCENARIO_NAMES: [&str; 3] = ["manly", "secret-ferry", "night-bus"];

/// The release configuration observed in the published data: scale 1.4,
/// threshold 18, zero-skip, rounded.
pub fn published_release_config(seed: u64) -> ReleaseConfig {
    ReleaseConfig::new(NoiseScale::new(1.4).expect("positive"), 18.0, true, true, seed)
        .expect("valid threshold")
}
