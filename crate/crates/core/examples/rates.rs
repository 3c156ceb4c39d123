//! Measures the sup-norm decay rate and the per-axis support growth rates of a
//! solution started from a compact plateau, over t in [1, 100].
//!
//! cargo run --release --example rates -- [m1 m2 ...]

use apme::cli::plateau;
use apme::diagnostics::fit::geometric_checkpoints;
use apme::diagnostics::{record_run, smoothing_fit, support_growth_fit};
use apme::{derive_exponents, Grid, MediumParams, Solver, SolverConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let m: Vec<f64> = std::env::args()
        .skip(1)
        .map(|s| s.parse())
        .collect::<Result<_, _>>()?;
    let params = MediumParams::new(if m.is_empty() { vec![2.0, 3.0] } else { m })?;
    let e = derive_exponents(&params);

    // Mass-one profile extents are below 2.1 on every axis for moderate m;
    // pad the t = 100 extent by 20%.
    let half: Vec<f64> = e.a.iter().map(|a| 1.2 * 2.1 * 100f64.powf(*a)).collect();
    let cells: Vec<usize> = half.iter().map(|l| (2.0 * l / 0.1).ceil() as usize / 2 * 2).collect();
    let grid = Grid::new(half, cells)?.shared();
    let u0 = plateau(1.0, 1.0, 1.0, &vec![0.0; params.dim()], grid)?;

    let solver = Solver::new(params.clone(), SolverConfig::default())?;
    let checkpoints = geometric_checkpoints(1.0, 100.0, 41);
    let run = record_run(&u0, &solver, &checkpoints)?;
    println!("{} steps", run.summary.steps);

    let fit = smoothing_fit(&run)?;
    println!(
        "alpha_hat {:.4} ± {:.4}  target {:.4}  relative error {:.2}%",
        fit.exponent,
        fit.stderr,
        e.alpha,
        100.0 * fit.relative_error(e.alpha)
    );
    for i in 0..params.dim() {
        let fit = support_growth_fit(&run, i)?;
        println!(
            "a_hat[{i}] {:.4} ± {:.4}  target {:.4}  relative error {:.2}%",
            fit.exponent,
            fit.stderr,
            e.a[i],
            100.0 * fit.relative_error(e.a[i])
        );
    }
    Ok(())
}
