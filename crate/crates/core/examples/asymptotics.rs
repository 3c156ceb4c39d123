//! Long-time convergence of three mass-one initial data to the profile, in
//! self-similar variables: L1, L2 and sup-norm traces, Hausdorff distances of
//! supports and free boundaries, and the mass bracket.
//!
//! cargo run --release --example asymptotics -- [cells]

use apme::cli::plateau;
use apme::diagnostics::{asymptotics, ConvergenceOptions};
use apme::grid::Field;
use apme::{compute_profile, MediumParams, ProfileOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cells = std::env::args()
        .nth(1)
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(128);
    let params = MediumParams::isotropic(2.0, 2)?;
    let p = compute_profile(
        &params,
        1.0,
        &ProfileOptions {
            cells,
            half_width: Some(vec![3.0, 3.0]),
            ..ProfileOptions::default()
        },
    )?;
    let grid = p.grid().clone();

    let centered = plateau(1.0, 1.0, 1.0, &[0.0, 0.0], grid.clone())?;
    let shifted = plateau(1.0, 1.0, 1.0, &[0.1, 0.0], grid.clone())?;
    let left = plateau(0.5, 1.0, 1.0, &[-0.6, 0.0], grid.clone())?;
    let right = plateau(0.5, 1.0, 1.0, &[0.6, 0.0], grid.clone())?;
    let two_bumps = Field::new(
        grid,
        left.values()
            .iter()
            .zip(right.values())
            .map(|(a, b)| a + b)
            .collect(),
        0.0,
    )?;

    let taus: Vec<f64> = (0..=24).map(|k| 0.25 * k as f64).collect();
    for (name, u0) in [
        ("plateau", centered),
        ("off-center", shifted),
        ("two bumps", two_bumps),
    ] {
        let (norms, sets) = asymptotics(&u0, &p, &taus, &ConvergenceOptions::default())?;
        let l1 = norms.trace(1.0).unwrap();
        println!(
            "{name:<10}  L1 {:.3e} -> {:.3e}  core sup {:.3e}  d_H(Omega) {:.2} cells  d_H(Gamma) {:.2} cells  bracket from tau {:?}",
            l1.values[0],
            l1.last().unwrap(),
            norms.core_linf.last().unwrap(),
            sets.omega.last().unwrap() / sets.cell,
            sets.gamma.last().unwrap() / sets.cell,
            sets.tau_eps
        );
    }
    Ok(())
}
