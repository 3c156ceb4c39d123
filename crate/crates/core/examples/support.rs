//! Support geometry of the anisotropic profile: directional radius, the
//! sandwich between linear and anisotropic expansions, and Hausdorff
//! distances to the mass-rescaled profiles.
//!
//! cargo run --release --example support -- [cells]

use apme::profile::rescale_mass;
use apme::support::{radius_function, sandwich_constants};
use apme::{compute_profile, derive_exponents, hausdorff, MediumParams, ProfileOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cells = std::env::args()
        .nth(1)
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(128);
    let params = MediumParams::new(vec![2.0, 3.0])?;
    let e = derive_exponents(&params);
    let p = compute_profile(
        &params,
        1.0,
        &ProfileOptions {
            cells,
            ..ProfileOptions::default()
        },
    )?;

    let r = radius_function(&p.support)?;
    println!(
        "R(e1) {:.4}  R(e2) {:.4}  R(diag) {:.4}",
        r.along(&[1.0, 0.0]),
        r.along(&[0.0, 1.0]),
        r.along(&[0.5f64.sqrt(), 0.5f64.sqrt()])
    );

    for (name, rates, c1, c2) in [("mass", &e.nu, 0.4, 1.1), ("time", &e.a, 0.05, 0.35)] {
        let s = sandwich_constants(&p.support, 0.05, rates, c1, c2);
        println!(
            "{name} sandwich c1 {c1} c2 {c2}: lower misses {}  upper misses {}  holds {}",
            s.lower_violations,
            s.upper_violations,
            s.holds()
        );
    }

    for k in [0.9f64, 1.1] {
        let q = rescale_mass(&p, k.powf(1.0 / e.beta))?;
        println!(
            "mass {:.3}: d_H to the mass-one support {:.4} ({} cells of {})",
            q.mass,
            hausdorff(&q.support, &p.support)?,
            q.support.count(),
            p.support.count()
        );
    }
    Ok(())
}
