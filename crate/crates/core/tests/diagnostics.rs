use apme::cli::plateau;
use apme::diagnostics::fit::geometric_checkpoints;
use apme::diagnostics::{
    asymptotics, barrier_check, convergence_to_profile, fit_power_law,
    partial_monotonicity_check, positivity_floor_check, record_run, smoothing_fit,
    support_growth_fit, travelling_wave_offset, ConvergenceOptions, FitError, RunRecord,
};
use apme::rescale::evolve_rescaled;
use apme::solver::Event;
use apme::{
    barenblatt, compute_profile, derive_exponents, Field, Grid, MediumParams, Profile,
    ProfileOptions, Solver, SolverConfig,
};

fn iso_profile(cells: usize) -> Profile {
    compute_profile(
        &MediumParams::isotropic(2.0, 2).unwrap(),
        1.0,
        &ProfileOptions {
            cells,
            warm_start_cells: cells,
            half_width: Some(vec![3.0, 3.0]),
            ..ProfileOptions::default()
        },
    )
    .unwrap()
}

fn thin(run: &RunRecord) -> RunRecord {
    let keep = |v: &Vec<f64>| v.iter().step_by(2).cloned().collect::<Vec<_>>();
    RunRecord {
        m: run.m.clone(),
        times: keep(&run.times),
        sup: keep(&run.sup),
        mass: keep(&run.mass),
        extents: run.extents.iter().step_by(2).cloned().collect(),
        fronts: run.fronts.iter().step_by(2).cloned().collect(),
        summary: run.summary.clone(),
    }
}

#[test]
fn fit_window_rejections() {
    let t = geometric_checkpoints(1.0, 100.0, 20);
    // a solution lifted by a constant background stops decaying
    let flat = vec![1e-3; t.len()];
    assert!(matches!(fit_power_law(&t, &flat), Err(FitError::Window(_))));
    let short = geometric_checkpoints(1.0, 5.0, 20);
    let q: Vec<f64> = short.iter().map(|t| t.powf(-0.5)).collect();
    assert!(fit_power_law(&short, &q).is_err());
    assert!(fit_power_law(&t[..4], &flat[..4]).is_err());
    assert!(fit_power_law(&t, &flat[..3]).is_err());
}

#[test]
fn isotropic_rates_and_density_invariance() {
    let params = MediumParams::isotropic(2.0, 2).unwrap();
    let e = derive_exponents(&params);
    let half = 1.2 * 2.1 * 100f64.powf(e.a[0]);
    let cells = (2.0 * half / 0.1).ceil() as usize / 2 * 2;
    let g = Grid::uniform(2, half, cells).unwrap().shared();
    let u0 = plateau(1.0, 1.0, 1.0, &[0.0, 0.0], g).unwrap();
    let solver = Solver::new(params, SolverConfig::default()).unwrap();
    let run = record_run(&u0, &solver, &geometric_checkpoints(1.0, 100.0, 41)).unwrap();

    let alpha = smoothing_fit(&run).unwrap();
    assert!(alpha.relative_error(e.alpha) < 0.05, "{alpha:?}");
    assert!(alpha.stderr < 0.2 * e.alpha);
    let a0 = support_growth_fit(&run, 0).unwrap();
    let a1 = support_growth_fit(&run, 1).unwrap();
    assert!((a0.exponent - a1.exponent).abs() < 1e-12, "{a0:?} {a1:?}");

    let coarse = thin(&run);
    let alpha2 = smoothing_fit(&coarse).unwrap();
    assert!((alpha.exponent - alpha2.exponent).abs() <= alpha.stderr.max(alpha2.stderr).max(1e-3));
    let a0c = support_growth_fit(&coarse, 0).unwrap();
    assert!((a0.exponent - a0c.exponent).abs() <= a0.stderr.max(a0c.stderr).max(1e-3));
}

#[test]
fn profile_as_data_stays_at_the_floor() {
    let p = iso_profile(64);
    let taus: Vec<f64> = (0..=8).map(|k| 0.25 * k as f64).collect();
    let r = convergence_to_profile(&p.field, &p, &taus, &ConvergenceOptions::default()).unwrap();
    let l1 = r.trace(1.0).unwrap();
    assert_eq!(l1.values[0], 0.0);
    // drift solver runs at a different cfl than the settle loop, so allow a
    // little more than the stationarity tolerance
    assert!(l1.values.iter().all(|&v| v < 1e-3), "{:?}", l1.values);
    assert!(r.interpolation_ok);
}

#[test]
fn off_center_data_converges_with_nonincreasing_traces() {
    let p = iso_profile(64);
    let u0 = plateau(1.0, 1.0, 1.0, &[0.1, 0.0], p.grid().clone()).unwrap();
    let taus: Vec<f64> = (0..=20).map(|k| 0.25 * k as f64).collect();
    let (norms, sets) = asymptotics(&u0, &p, &taus, &ConvergenceOptions::default()).unwrap();
    let l1 = norms.trace(1.0).unwrap();
    assert!(l1.at(5.0).unwrap() <= 0.05, "{:?}", l1.values);
    assert!(l1.nonincreasing_after(0.2, 1e-9), "{:?}", l1.values);
    assert!(norms.trace(2.0).unwrap().nonincreasing_after(0.2, 1e-9));
    assert!(norms.interpolation_ok);
    assert!(sets.omega.last().unwrap() <= 3.0 * sets.cell);
}

#[test]
fn monotone_outside_the_initial_box() {
    let params = MediumParams::new(vec![2.0, 2.5]).unwrap();
    let g = Grid::uniform(2, 2.0, 64).unwrap().shared();
    let u0 = plateau(0.4, 1.0, 1.0, &[0.15, -0.1], g).unwrap();
    let a = [0.15 + 0.2 + 0.07, 0.1 + 0.2 + 0.07];
    let solver = Solver::new(params, SolverConfig::default()).unwrap();
    let mut worst = 0.0f64;
    solver
        .evolve(&u0, 0.3, &[0.05, 0.1, 0.2, 0.3], |ev| {
            if let Event::Checkpoint(f) = ev {
                let r = partial_monotonicity_check(f, &a).unwrap();
                assert!(r.passes(1e-9, 1e-12), "t {}: {r:?}", f.time);
                worst = worst.max(r.axis_violation);
            }
        })
        .unwrap();
    // data away from the origin is not monotone outside a small box
    let away = apme::grid::box_average(u0.grid().clone(), &[0.6, 0.0], &[0.2, 0.2], 1.0);
    let inner = partial_monotonicity_check(&away, &[0.05, 0.05]).unwrap();
    assert!(!inner.passes(1e-9, 1e-12));
}

#[test]
fn travelling_wave_confines_the_front() {
    assert!((travelling_wave_offset(2.0, 1.0, 1.0, 1.0) - 3.0).abs() < 1e-15);
    let params = MediumParams::new(vec![2.0, 3.0]).unwrap();
    let g = Grid::uniform(2, 4.0, 96).unwrap().shared();
    let u0 = apme::grid::box_average(g, &[0.0, 0.0], &[0.5, 0.5], 1.0);
    let solver = Solver::new(params, SolverConfig::default()).unwrap();
    let mut fields = vec![u0.clone()];
    solver
        .evolve(&u0, 0.5, &[0.1, 0.2, 0.3, 0.4, 0.5], |ev| {
            if let Event::Checkpoint(f) = ev {
                fields.push(f.clone());
            }
        })
        .unwrap();
    for axis in 0..2 {
        let m = [2.0, 3.0][axis];
        let r = barrier_check(&fields, axis, m, 1.0, 0.5, 1.0).unwrap();
        assert!(r.passed, "{r:?}");
        assert!(r.samples.iter().all(|s| s.mass_beyond == 0.0));
    }
}

#[test]
fn positivity_floor_matches_the_profile_center() {
    let b = barenblatt(2.0, 2, 1.0);
    let params = MediumParams::isotropic(2.0, 2).unwrap();
    let e = derive_exponents(&params);
    let g = Grid::uniform(2, 3.0, 96).unwrap().shared();
    let v0 = plateau(1.0, 1.0, 1.0, &[0.0, 0.0], g).unwrap();
    let mut fields: Vec<Field> = Vec::new();
    evolve_rescaled(&v0, &params, &SolverConfig::default(), 6.0, &[2.0, 3.0, 4.0, 5.0, 6.0], |ev| {
        if let Event::Checkpoint(f) = ev {
            fields.push(f.clone());
        }
    })
    .unwrap();
    let r = positivity_floor_check(&fields, &e.a, 0.2, 2.0, None).unwrap();
    assert!(r.passed);
    assert_eq!(r.checkpoints, 5);
    assert!(r.c > 0.5 * b.peak(), "{} vs {}", r.c, b.peak());
    let center = fields.last().unwrap().interpolate(&[0.0, 0.0]);
    assert!((center - b.peak()).abs() < 0.03 * b.peak(), "{center} vs {}", b.peak());
}
