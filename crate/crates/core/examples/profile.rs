//! Computes the self-similar profile of mass 1 and compares it with the
//! closed-form Barenblatt profile in the isotropic case.
//!
//! cargo run --release --example profile -- [--half-width L] [cells] [m1 m2 ...]

use apme::grid::{lp_distance, total_mass};
use apme::{barenblatt, compute_profile, MediumParams, ProfileOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args: Vec<String> = std::env::args().skip(1).collect();
    let mut half_width = None;
    if args.first().map(String::as_str) == Some("--half-width") {
        let l: f64 = args.get(1).ok_or("--half-width needs a value")?.parse()?;
        half_width = Some(l);
        args.drain(..2);
    }
    let cells = args.first().map(|s| s.parse()).transpose()?.unwrap_or(128);
    let m: Vec<f64> = if args.len() > 1 {
        args[1..]
            .iter()
            .map(|s| s.parse())
            .collect::<Result<_, _>>()?
    } else {
        vec![2.0, 2.0]
    };
    let params = MediumParams::new(m)?;
    let opts = ProfileOptions {
        cells,
        half_width: half_width.map(|l| vec![l; params.dim()]),
        ..ProfileOptions::default()
    };
    let p = compute_profile(&params, 1.0, &opts)?;
    println!(
        "cells {cells}  box {:?}  tau {:.2}  residual {:.3e}  tol {:.1e}  {:.1}s",
        p.grid().half_width(),
        p.field.time,
        p.residual,
        p.tol,
        p.runtime_seconds
    );
    println!("extents {:?}  peak {:.6}", p.support.extents(), p.peak());
    if params.is_isotropic() {
        let b = barenblatt(params.m_bar(), params.dim(), 1.0);
        let exact = b.sample(p.grid().clone());
        let err = lp_distance(&p.field, &exact, 1.0)? / total_mass(&exact);
        println!(
            "barenblatt radius {:.6}  peak {:.6}  relative L1 error {:.4e}",
            b.radius,
            b.peak(),
            err
        );
    }
    println!("{}", serde_json::to_string(&p.manifest())?);
    Ok(())
}
