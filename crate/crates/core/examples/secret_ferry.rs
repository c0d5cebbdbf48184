// A late ferry drops 17 passengers at a small wharf. Their cell is usually
// suppressed, but the time-only total for the same bin gives it away.

use tapaudit::attacks::{detect_presence, estimate_from_marginal};
use tapaudit::distributions::NoiseScale;
use tapaudit::synth::{
    derive_releases, generate_raw, published_release_config, scenario_secret_ferry,
    secret_ferry_hidden_cell, SECRET_FERRY_HIDDEN,
};

fn run_example() -> tapaudit::Result<()> {
    let raw = generate_raw(&scenario_secret_ferry().with_seed(1))?;
    let hidden = secret_ferry_hidden_cell();
    let scale = NoiseScale::new(1.4)?;
    let config = published_release_config(0);

    let mut shown = 0;
    for seed in 0..200 {
        let releases = derive_releases(&raw, &config.with_seed(seed));
        if releases.time_loc.get(&hidden) != Some(0.0) {
            continue;
        }
        let est = estimate_from_marginal(&releases.time_loc, &releases.time_only, &hidden, scale, 0.05)?;
        println!(
            "seed {seed}: cell published as 0, estimate {} in [{:.2}, {:.2}] (true {SECRET_FERRY_HIDDEN})",
            est.point_estimate, est.interval.0, est.interval.1
        );
        shown += 1;
        if shown == 5 {
            break;
        }
    }
    for v in [0.0, 18.0, 19.0] {
        let verdict = detect_presence(v, &config);
        println!("published {v}: {:?}", verdict.verdict);
    }
    Ok(())
}

fn main() -> tapaudit::Result<()> {
    run_example()
}
