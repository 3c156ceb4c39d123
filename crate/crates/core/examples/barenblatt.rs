//! Evolves the isotropic Barenblatt solution from t = 1 and compares the
//! numerical solution with the closed form at later times.
//!
//! cargo run --release --example barenblatt -- [cells]

use apme::grid::{lp_distance, sample};
use apme::solver::Event;
use apme::{barenblatt, Grid, MediumParams, Solver, SolverConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cells = std::env::args()
        .nth(1)
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(128);
    let b = barenblatt(2.0, 2, 1.0);
    let grid = Grid::uniform(2, 1.3 * b.radius_at(8.0), cells)?.shared();
    let mut u0 = b.sample(grid.clone());
    u0.time = 1.0;

    let solver = Solver::new(MediumParams::isotropic(2.0, 2)?, SolverConfig::default())?;
    let (_, summary) = solver.evolve(&u0, 8.0, &[2.0, 4.0, 8.0], |e| {
        if let Event::Checkpoint(f) = e {
            let exact = sample(|x| b.solution(x, f.time), grid.clone(), f.time).field;
            let err = lp_distance(f, &exact, 1.0).unwrap();
            println!(
                "t {:>4.1}  sup {:.5} (exact {:.5})  relative L1 error {:.3e}",
                f.time,
                f.max(),
                exact.max(),
                err / exact.total_mass()
            );
        }
    })?;
    println!(
        "{} steps, mass {:.15} -> {:.15}",
        summary.steps, summary.initial_mass, summary.final_mass
    );
    Ok(())
}
