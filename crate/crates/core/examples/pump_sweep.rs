//! Run a scenario file's sweep and print the table it would write.

use std::path::PathBuf;

use eo_transducer::scenario::{run_sweep, Scenario, SweepScenario};

fn main() -> eo_transducer::Result<()> {
    let path = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/pump_sweep.toml")));
    let scenario = Scenario::from_path(&path)?;
    let sweep = SweepScenario::from_scenario(&scenario)?;
    let result = run_sweep(&sweep, None)?;

    let names: Vec<&str> = result.columns.iter().map(|c| c.name.as_str()).collect();
    println!("{}", names.join("  "));
    let step = (result.rows() / 20).max(1);
    for i in (0..result.rows()).step_by(step) {
        let row: Vec<String> = result.columns.iter().map(|c| format!("{:.6e}", c.values[i])).collect();
        println!("{}", row.join("  "));
    }
    Ok(())
}
