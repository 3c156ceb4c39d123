//! Randomized structural property suites: comparison, contraction, Lp decay,
//! mass conservation, SSNI preservation, energy balance and the
//! travelling-wave barrier.
//!
//! cargo run --release --example verify -- [cases] [seed]

use apme::cli::{run_suite, SuiteOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let cases = args.first().map(|s| s.parse()).transpose()?.unwrap_or(100);
    let seed = args.get(1).map(|s| s.parse()).transpose()?.unwrap_or(2024);
    let report = run_suite(&SuiteOptions {
        cases,
        seed,
        ..SuiteOptions::default()
    })?;
    for c in &report.checks {
        println!(
            "{} {:<12} {:>3}/{} cases  worst defect {:.3e}  {:.1}s",
            if c.passed() { "PASS" } else { "FAIL" },
            c.name,
            c.cases.len() - c.failures(),
            c.cases.len(),
            c.worst(),
            c.seconds
        );
    }
    Ok(())
}
