// The command line end to end: generate, release, fit, audit.

use std::path::PathBuf;

fn tapaudit(args: &[&str]) -> i32 {
    let mut argv = vec!["tapaudit"];
    argv.extend_from_slice(args);
    tapaudit::cli::run(argv, &mut std::io::stdout(), &mut std::io::stderr())
}

fn run_example() -> tapaudit::Result<()> {
    let out: PathBuf = std::env::temp_dir().join(format!("tapaudit-example-{}", std::process::id()));
    let dir = out.to_str().expect("utf-8 temp dir");
    let raw = out.join("raw.csv");
    let time_loc = out.join("time_loc.csv");

    tapaudit(&["--seed", "2016", "--out", dir, "gen", "--scenario", "manly"]);
    tapaudit(&["--seed", "7", "--out", dir, "release", "--raw", raw.to_str().unwrap()]);
    tapaudit(&[
        "--out",
        dir,
        "fit-noise",
        "--input",
        time_loc.to_str().unwrap(),
        "--on-location",
        "Manly Wharf",
        "--off-location",
        "Circular Quay No. 3 Wharf",
        "--bidirectional",
    ]);
    let code = tapaudit(&["--out", dir, "audit", "--count", "1", "--neighbor", "0", "--epsilon-grid", "0.5,1,2"]);
    println!("audit exit code: {code}");
    std::fs::remove_dir_all(&out)?;
    Ok(())
}

fn main() -> tapaudit::Result<()> {
    run_example()
}
