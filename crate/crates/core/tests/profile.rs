use apme::grid::lp_distance;
use apme::profile::{
    make_admissible, rescale_mass, stationary_residual, truncation_estimate, InitialShape,
};
use apme::rescale::evolve_rescaled;
use apme::support::SupportSet;
use apme::{
    barenblatt, compute_profile, derive_exponents, total_mass, Grid, MediumParams, Profile,
    ProfileOptions, SolverConfig,
};

fn options(cells: usize, half_width: Vec<f64>) -> ProfileOptions {
    ProfileOptions {
        cells,
        warm_start_cells: cells,
        half_width: Some(half_width),
        ..ProfileOptions::default()
    }
}

fn profile(m: Vec<f64>, mass: f64, cells: usize, half_width: Vec<f64>) -> Profile {
    let p = MediumParams::new(m).unwrap();
    compute_profile(&p, mass, &options(cells, half_width)).unwrap()
}

/// Composite Simpson rule on `[a, b]` with `n` (even) panels.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        s += if k % 2 == 1 { 4.0 } else { 2.0 } * f(a + k as f64 * h);
    }
    s * h / 3.0
}

#[test]
fn plateau_radius_examples() {
    for dim in 1..=3 {
        let g = Grid::uniform(dim, 2.0, 16).unwrap().shared();
        let f = make_admissible(1.0, 1.0, 1.0, g).unwrap();
        assert!((total_mass(&f) - 1.0).abs() < 1e-12);
        let s = SupportSet::of(&f);
        for e in s.extents() {
            assert!((e - 0.5).abs() < 1e-12, "dim {dim}: {e}");
        }
    }
}

#[test]
fn barenblatt_constant_by_quadrature() {
    for (m, dim) in [(2.0, 2), (3.0, 2), (1.5, 2), (2.0, 1), (2.5, 3)] {
        let b = barenblatt(m, dim, 1.0);
        let p = 1.0 / (m - 1.0);
        let shell = match dim {
            1 => 2.0,
            2 => 2.0 * std::f64::consts::PI,
            _ => 4.0 * std::f64::consts::PI,
        };
        let mass = simpson(
            |r| shell * r.powi(dim as i32 - 1) * (b.c - b.k * r * r).max(0.0).powf(p),
            0.0,
            b.radius,
            20_000,
        );
        assert!((mass - 1.0).abs() < 1e-6, "m {m} N {dim}: {mass}");
    }
    let b = barenblatt(2.0, 2, 1.0);
    assert!((b.c - (1.0 / (8.0 * std::f64::consts::PI)).sqrt()).abs() < 1e-15);
}

#[test]
fn anisotropic_profile_is_longer_along_the_faster_axis() {
    let p = profile(vec![2.0, 3.0], 1.0, 64, vec![3.0, 2.0]);
    let ext = p.support.extents();
    assert!(ext[0] > ext[1], "{ext:?}");
    assert!((p.mass - 1.0).abs() < 1e-9);
    assert!(p.checks.failures(p.tol).is_empty());
}

#[test]
fn rescale_mass_examples() {
    let p = profile(vec![2.0, 2.0], 1.0, 64, vec![3.5, 3.5]);
    let same = rescale_mass(&p, 1.0).unwrap();
    assert_eq!(same.field, p.field);
    // β = 2 for m = (2, 2), so doubling k multiplies the mass by 4
    let e = derive_exponents(&p.params);
    assert!((e.beta - 2.0).abs() < 1e-15);
    let mut last = 0.0;
    for k in [0.25, 0.5, 1.0, 1.3, 1.6] {
        let q = rescale_mass(&p, k).unwrap();
        let expected = k.powf(e.beta) * p.mass;
        assert!((q.mass - expected).abs() < 0.02 * expected, "k {k}: {}", q.mass);
        assert!(q.mass > last);
        last = q.mass;
    }
    assert!(rescale_mass(&p, 4.0).is_err());
    assert!(rescale_mass(&p, 0.0).is_err());
    let small = profile(vec![2.0, 2.0], 0.25, 64, vec![3.5, 3.5]);
    let doubled = rescale_mass(&small, 2.0).unwrap();
    assert!((doubled.mass - 4.0 * small.mass).abs() < 0.02, "{}", doubled.mass);
}

#[test]
fn closed_form_residual_halves_with_the_spacing() {
    let b = barenblatt(2.0, 2, 1.0);
    let e = derive_exponents(&MediumParams::isotropic(2.0, 2).unwrap());
    let res = |n: usize| {
        let f = b.sample(Grid::uniform(2, 1.5 * b.radius, n).unwrap().shared());
        (stationary_residual(&f, &e), truncation_estimate(&f, &e))
    };
    let (r1, t1) = res(64);
    let (r2, t2) = res(128);
    let (r3, _) = res(256);
    assert!(r1 / r2 > 1.6 && r2 / r3 > 1.6, "{r1:.3e} {r2:.3e} {r3:.3e}");
    assert!(t1 / t2 > 1.6, "{t1:.3e} {t2:.3e}");
}

#[test]
fn perturbation_raises_the_residual() {
    let p = profile(vec![2.0, 2.5], 1.0, 64, vec![2.5, 2.0]);
    let base = stationary_residual(&p.field, &p.exponents);
    let g = p.grid().clone();
    let mut f = p.field.clone();
    for (c, v) in f.values_mut().iter_mut().enumerate() {
        let x = g.point(c);
        if *v > 0.0 {
            *v *= 1.0 + 0.5 * (6.0 * x[0]).sin() * (4.0 * x[1]).cos();
        }
    }
    let perturbed = stationary_residual(&f, &p.exponents);
    assert!(perturbed > 10.0 * base, "{perturbed:.3e} vs {base:.3e}");
}

#[test]
fn profiles_increase_with_mass() {
    let half = vec![3.0, 2.0];
    let small = profile(vec![2.0, 3.0], 0.5, 64, half.clone());
    let large = profile(vec![2.0, 3.0], 1.0, 64, half);
    assert!(small.support.is_subset_of(&large.support));
    let slack = 10.0 * (small.tol + large.tol);
    for (a, b) in small.field.values().iter().zip(large.field.values()) {
        assert!(*a <= b + slack, "{a} > {b}");
    }
}

#[test]
fn converged_profile_is_a_fixed_point() {
    let p = profile(vec![2.0, 2.0], 1.0, 64, vec![2.5, 2.5]);
    let mut start = p.field.clone();
    start.time = 0.0;
    let (v, _) = evolve_rescaled(&start, &p.params, &SolverConfig::default(), 2.0, &[], |_| {})
        .unwrap();
    let drift = lp_distance(&v, &start, 1.0).unwrap();
    // the settle loop stopped once the window difference fell below tol
    assert!(drift < 4.0 * p.tol, "{drift:.3e} vs tol {:.3e}", p.tol);
}

#[test]
fn bump_and_plateau_start_agree() {
    let params = MediumParams::isotropic(2.0, 2).unwrap();
    let plateau = compute_profile(&params, 1.0, &options(64, vec![2.5, 2.5])).unwrap();
    let bump = compute_profile(
        &params,
        1.0,
        &ProfileOptions {
            shape: InitialShape::Bump { width: 0.3 },
            ..options(64, vec![2.5, 2.5])
        },
    )
    .unwrap();
    let d = lp_distance(&plateau.field, &bump.field, 1.0).unwrap();
    assert!(d < 2.0 * plateau.tol.max(bump.tol), "{d:.3e}");
}
