// Is a reported percentage of dropped rows a whole number of rows?

use tapaudit::audit::check_drop_consistency;

fn run_example() -> tapaudit::Result<()> {
    for (pct, rows) in [(0.0005, 658), (50.0, 658), (0.0, 658), (12.5, 16)] {
        let verdict = check_drop_consistency(pct, rows)?;
        println!("{pct}% of {rows}: {}", serde_json::to_string(&verdict).expect("serializable"));
    }
    Ok(())
}

fn main() -> tapaudit::Result<()> {
    run_example()
}
