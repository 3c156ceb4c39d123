//! Maps the Barenblatt solution into self-similar variables, where it is the
//! stationary profile, and back.
//!
//! cargo run --release --example rescale

use apme::grid::{lp_distance, sample};
use apme::rescale::{from_selfsimilar, to_selfsimilar};
use apme::{barenblatt, derive_exponents, Grid, MediumParams, RescaleMap};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = MediumParams::isotropic(2.0, 2)?;
    let map = RescaleMap::new(derive_exponents(&params));
    let b = barenblatt(2.0, 2, 1.0);
    let y_grid = Grid::uniform(2, 2.5, 128)?.shared();
    let profile = b.sample(y_grid.clone());

    for t in [0.5, 3.0, 15.0] {
        let s = t + map.t0;
        let x_grid = Grid::uniform(2, 1.3 * b.radius_at(s), 128)?.shared();
        let u = sample(|x| b.solution(x, s), x_grid.clone(), t).field;
        let v = to_selfsimilar(&u, &map, y_grid.clone());
        let back = from_selfsimilar(&v.field, &map, x_grid);
        println!(
            "t {t:>5.1}  tau {:.4}  |v - F|_1 {:.3e}  round trip |u - u'|_1 {:.3e}  truncated {}",
            v.field.time,
            lp_distance(&v.field, &profile, 1.0)?,
            lp_distance(&back.field, &u, 1.0)?,
            v.truncated
        );
    }
    Ok(())
}
