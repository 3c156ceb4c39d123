//! Checks that the support of a solution stays behind the travelling-wave
//! barrier x_1 = K + A t, for data bounded by L and supported in Q(R).
//!
//! cargo run --release --example barrier -- [A]

use apme::diagnostics::{barrier_check, travelling_wave_offset};
use apme::grid::box_average;
use apme::solver::Event;
use apme::{Grid, MediumParams, Solver, SolverConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let speed: f64 = std::env::args()
        .nth(1)
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(1.0);
    let (m, height, radius) = (2.0, 1.0, 1.0);
    println!(
        "K = {} for m = {m}, L = {height}, R = {radius}, A = {speed}",
        travelling_wave_offset(m, height, speed, radius)
    );

    let grid = Grid::uniform(2, 4.0, 128)?.shared();
    let u0 = box_average(grid, &[0.0, 0.0], &[radius, radius], height);
    let solver = Solver::new(MediumParams::isotropic(m, 2)?, SolverConfig::default())?;
    let mut fields = vec![u0.clone()];
    let times: Vec<f64> = (1..=8).map(|k| 0.25 * k as f64).collect();
    solver.evolve(&u0, 2.0, &times, |e| {
        if let Event::Checkpoint(f) = e {
            fields.push(f.clone());
        }
    })?;
    let report = barrier_check(&fields, 0, m, height, radius, speed)?;
    for s in &report.samples {
        println!(
            "t {:.2}  front {:.4}  barrier {:.4}  mass beyond {:.1e}",
            s.time, s.front, s.barrier, s.mass_beyond
        );
    }
    println!("{}", if report.passed { "contained" } else { "VIOLATED" });
    Ok(())
}
