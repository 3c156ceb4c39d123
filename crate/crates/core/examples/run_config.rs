//! Runs an experiment from config text, as `apme run <config>` does, and lists
//! the artifacts it wrote.
//!
//! cargo run --release --example run_config -- [output dir]

use apme::cli::{run_experiment, ExperimentConfig};

const CONFIG: &str = "\
name = anisotropic-evolve
seed = 1

[params]
m = 2, 3

[grid]
half_width = 9.5, 3
cells = 192, 64

[initial]
data = plateau 1 1 1

[experiment]
kind = evolve
t_end = 100
checkpoints = 1, 1.6, 2.5, 4, 6.3, 10, 16, 25, 40, 63, 100
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "out/anisotropic-evolve".into());
    let mut cfg = ExperimentConfig::parse(CONFIG)?;
    cfg.output_dir = dir.into();
    let outcome = run_experiment(&cfg, CONFIG)?;
    for path in &outcome.outputs {
        println!("wrote {}", path.display());
    }
    println!("{}", serde_json::to_string_pretty(&outcome.summary)?);
    Ok(())
}
