// Recovers the noise scale of a release from a point-to-point ferry route,
// where every tap-on reappears as a tap-off two bins later.

use tapaudit::attacks::{pair_point_to_point, recover_scale};
use tapaudit::distributions::fit_scale_moments;
use tapaudit::synth::{derive_releases, generate_raw, manly_pair_spec, published_release_config, scenario_manly};

fn run_example() -> tapaudit::Result<()> {
    let raw = generate_raw(&scenario_manly().with_seed(2016))?;
    let releases = derive_releases(&raw, &published_release_config(7));
    let spec = manly_pair_spec();

    let paired = pair_point_to_point(&releases.time_loc, &spec)?;
    let mle = recover_scale(&releases.time_loc, &spec)?;
    let moments = fit_scale_moments(&paired.sample)?;

    println!("pairs used:          {}", paired.sample.len());
    println!("pairs suppressed:    {}", paired.skipped_suppressed);
    println!("MLE scale:           {:.4} (stderr {:.4})", mle.b_hat, mle.stderr_approx);
    println!("moments scale:       {:.4}", moments.b_hat);
    println!("true scale:          1.4");
    Ok(())
}

fn main() -> tapaudit::Result<()> {
    run_example()
}
