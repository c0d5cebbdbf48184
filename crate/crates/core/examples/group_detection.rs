// How likely a group travelling alone is to show up above the threshold.

use tapaudit::audit::detection_bound;
use tapaudit::synth::published_release_config;

fn run_example() -> tapaudit::Result<()> {
    let config = published_release_config(0);
    println!("group,density_bound,tail_probability");
    for g in [1, 5, 12, 17] {
        let d = detection_bound(g, &config)?;
        println!("{g},{:.3e},{:.3e}", d.density_bound, d.tail_probability);
    }
    Ok(())
}

fn main() -> tapaudit::Result<()> {
    run_example()
}
