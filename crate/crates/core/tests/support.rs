use std::sync::Arc;

use apme::cli::plateau;
use apme::support::{
    expand_linear, radius_function, sandwich_constants, scale_mass_set, scale_time_set,
};
use apme::{
    barenblatt, box_bound_check, compute_profile, derive_exponents, hausdorff, Grid,
    MediumParams, ProfileOptions, Solver, SolverConfig, SupportSet,
};
use proptest::prelude::*;

fn grid(l: f64, n: usize) -> Arc<Grid> {
    Grid::uniform(2, l, n).unwrap().shared()
}

#[test]
fn barenblatt_support_area() {
    let b = barenblatt(2.0, 2, 1.0);
    let f = b.sample(grid(1.5 * b.radius, 256));
    let s = SupportSet::of(&f);
    let exact = std::f64::consts::PI * b.radius * b.radius;
    assert!((s.measure() - exact).abs() < 0.02 * exact, "{} vs {exact}", s.measure());
    let r = radius_function(&s).unwrap();
    let h = f.grid().spacing()[0];
    assert!(r.max_spread() <= 2.0 * h, "{} cells", r.max_spread() / h);
    for rad in &r.radii {
        assert!((rad - b.radius).abs() <= 2.0 * h);
    }
}

#[test]
fn hausdorff_examples() {
    let g = grid(1.0, 8);
    let at = |x: f64, y: f64| SupportSet::from_predicate(g.clone(), move |p| {
        (p[0] - x).abs() < 0.1 && (p[1] - y).abs() < 0.1
    });
    // single cells with centers one diagonal step apart
    let a = at(0.125, 0.125);
    let b = at(0.375, 0.375);
    let d = hausdorff(&a, &b).unwrap();
    assert!((d - 0.25 * 2f64.sqrt()).abs() < 1e-12, "{d}");
    let c = at(0.875, 0.125);
    assert!((hausdorff(&a, &c).unwrap() - 0.75).abs() < 1e-12);
    let empty = SupportSet::from_mask(g.clone(), vec![false; g.len()]);
    assert!(hausdorff(&a, &empty).is_err());
}

fn mask_strategy() -> impl Strategy<Value = SupportSet> {
    proptest::collection::vec(proptest::bool::weighted(0.2), 256)
        .prop_filter("nonempty", |m| m.iter().any(|&b| b))
        .prop_map(|m| SupportSet::from_mask(grid(1.0, 16), m))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn hausdorff_is_a_metric(a in mask_strategy(), b in mask_strategy(), c in mask_strategy()) {
        let ab = hausdorff(&a, &b).unwrap();
        let ba = hausdorff(&b, &a).unwrap();
        let bc = hausdorff(&b, &c).unwrap();
        let ac = hausdorff(&a, &c).unwrap();
        prop_assert_eq!(hausdorff(&a, &a).unwrap(), 0.0);
        prop_assert_eq!(ab, ba);
        prop_assert!(ab >= 0.0);
        prop_assert!((ab == 0.0) == (a == b));
        prop_assert!(ac <= ab + bc + 1e-12);
    }

    #[test]
    fn expansions_are_nested(l1 in 1.0f64..1.5, l2 in 1.0f64..1.5) {
        let g = grid(3.0, 48);
        let s = SupportSet::from_predicate(g, |y| y[0] * y[0] / 1.2 + y[1] * y[1] < 1.0);
        let (lo, hi) = if l1 <= l2 { (l1, l2) } else { (l2, l1) };
        prop_assert!(expand_linear(&s, lo).is_subset_of(&expand_linear(&s, hi)));
        prop_assert!(s.is_subset_of(&expand_linear(&s, lo)));
    }
}

#[test]
fn expansion_and_scaling_examples() {
    let g = grid(2.0, 32);
    let sq = SupportSet::from_predicate(g.clone(), |y| y[0].abs() < 0.5 && y[1].abs() < 0.5);
    let big = expand_linear(&sq, 2.0);
    let exact = SupportSet::from_predicate(g.clone(), |y| y[0].abs() < 1.0 && y[1].abs() < 1.0);
    assert_eq!(big, exact);
    // k^ν with ν = (1, 0) stretches axis 0 only
    let stretched = scale_mass_set(&sq, 2.0, &[1.0, 0.0]);
    assert_eq!(stretched.extents(), vec![1.0, 0.5]);
    let grown = scale_time_set(&sq, 4.0, &[0.5, 0.25]);
    let ext = grown.extents();
    assert!((ext[0] - 1.0).abs() < 1e-12 && (ext[1] - 0.75).abs() < 1e-12, "{ext:?}");
}

#[test]
fn anisotropic_images_sit_between_linear_expansions() {
    let params = MediumParams::new(vec![2.0, 3.0]).unwrap();
    let e = derive_exponents(&params);
    let p = compute_profile(
        &params,
        1.0,
        &ProfileOptions {
            cells: 96,
            warm_start_cells: 96,
            half_width: Some(vec![3.5, 2.5]),
            ..ProfileOptions::default()
        },
    )
    .unwrap();
    for eps in [0.05, 0.1, 0.2] {
        let mass = sandwich_constants(&p.support, eps, &e.nu, 0.4, 1.1);
        assert!(mass.holds(), "{mass:?}");
        let time = sandwich_constants(&p.support, eps, &e.a, 0.05, 0.35);
        assert!(time.holds(), "{time:?}");
    }
    // constants outside the rate range are rejected even if the masks happen to nest
    assert!(!sandwich_constants(&p.support, 0.1, &e.nu, 0.6, 1.1).constants_admissible);
}

#[test]
fn profile_support_is_star_shaped_and_symmetric() {
    let params = MediumParams::new(vec![2.0, 2.6]).unwrap();
    let p = compute_profile(
        &params,
        1.0,
        &ProfileOptions {
            cells: 64,
            warm_start_cells: 64,
            half_width: Some(vec![3.0, 2.5]),
            ..ProfileOptions::default()
        },
    )
    .unwrap();
    let r = radius_function(&p.support).unwrap();
    let g = p.grid();
    let mirrored = p.support.pull_back(|y, z| {
        z[0] = -y[0];
        z[1] = y[1];
    });
    assert_eq!(mirrored, p.support);
    let h = g.min_spacing();
    assert!(r.along(&[1.0, 0.0]) > r.along(&[0.0, 1.0]) - h);
    assert!((r.along(&[1.0, 0.0]) - r.along(&[-1.0, 0.0])).abs() < 1e-9);
}

#[test]
fn support_stays_in_the_growing_box() {
    let params = MediumParams::new(vec![2.0, 3.0]).unwrap();
    let e = derive_exponents(&params);
    let g = Grid::new(vec![5.0, 3.0], vec![160, 96]).unwrap().shared();
    let mut u0 = plateau(1.0, 1.0, 1.0, &[0.0, 0.0], g).unwrap();
    u0.time = 0.0;
    let solver = Solver::new(params, SolverConfig::default()).unwrap();
    let mut fields = Vec::new();
    solver
        .evolve(&u0, 8.0, &[1.0, 2.0, 4.0, 8.0], |ev| {
            if let apme::solver::Event::Checkpoint(f) = ev {
                fields.push(f.clone());
            }
        })
        .unwrap();
    let r = box_bound_check(&fields, &e.a).unwrap();
    assert_eq!(r.times, vec![2.0, 4.0, 8.0]);
    assert!(r.holds_within(1.0), "{:?}", r.excess_cells);
}
