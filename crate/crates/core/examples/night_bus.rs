// Before 05:00 only one bus route serves these postcodes, so every nonzero
// cell can be attributed to it.

use std::collections::{BTreeMap, BTreeSet};

use tapaudit::mechanism::{AttributeCombination, TableKind};
use tapaudit::synth::{
    derive_releases, generate_raw, published_release_config, scenario_night_bus,
    NIGHT_BUS_DAY_START,
};

fn run_example() -> tapaudit::Result<()> {
    let raw = generate_raw(&scenario_night_bus().with_seed(3))?;
    let mut routes: BTreeMap<AttributeCombination, BTreeSet<&str>> = BTreeMap::new();
    for e in &raw.events {
        routes
            .entry(AttributeCombination::project(e, TableKind::TimeLocation))
            .or_default()
            .insert(&e.route);
    }
    let releases = derive_releases(&raw, &published_release_config(11));
    println!("date,type,time,postcode,released,routes");
    for (q, &v) in &releases.time_loc.entries {
        let bin = q.time_bin.expect("time-location cell");
        if v > 0.0 && bin.index() < NIGHT_BUS_DAY_START && q.date.to_string() == "20160725" {
            let r: Vec<&str> = routes[q].iter().copied().collect();
            println!(
                "{},{},{},{},{v},{}",
                q.date,
                q.tap_type,
                bin,
                q.location.as_deref().unwrap_or("-"),
                r.join("|")
            );
        }
    }
    let shared = routes
        .iter()
        .filter(|(q, r)| q.time_bin.is_some_and(|b| b.index() >= NIGHT_BUS_DAY_START) && r.len() > 1)
        .count();
    println!("daytime cells shared by more than one route: {shared}");
    Ok(())
}

fn main() -> tapaudit::Result<()> {
    run_example()
}
