mod common;

use apme::diagnostics::checks::travelling_wave;
use apme::diagnostics::energy_check;
use apme::grid::{box_average, lp_distance};
use apme::solver::{compare_evolutions, stable_dt, Event};
use apme::{barenblatt, lp_norm, sample, total_mass, Grid, MediumParams, Solver, SolverConfig};
use proptest::prelude::*;

fn solver(m: Vec<f64>, cfg: SolverConfig) -> Solver {
    Solver::new(MediumParams::new(m).unwrap(), cfg).unwrap()
}

#[test]
fn stable_step_examples() {
    // h = 0.1, u_max = 1, m = (2, 2): 0.4 / (2 · (2/0.01 + 2/0.01)) = 0.0005.
    let g = Grid::uniform(2, 0.4, 8).unwrap().shared();
    let one = sample(|_| 1.0, g.clone(), 0.0).field;
    let p = MediumParams::new(vec![2.0, 2.0]).unwrap();
    let cfg = SolverConfig::default();
    assert!((stable_dt(&one, &p, &cfg) - 5e-4).abs() < 1e-15);
    // doubling the resolution quarters the step
    let fine = sample(|_| 1.0, Grid::uniform(2, 0.4, 16).unwrap().shared(), 0.0).field;
    assert!((stable_dt(&fine, &p, &cfg) - 1.25e-4).abs() < 1e-15);
    let capped = SolverConfig {
        max_dt: Some(0.01),
        ..cfg
    };
    assert_eq!(stable_dt(&apme::Field::zeros(g, 0.0), &p, &capped), 0.01);
}

#[test]
fn travelling_wave_error_is_first_order() {
    // u = (c (t − x))₊ for m = 2, A = 1, K = 0; compared on x ≥ −1 where the
    // zero boundary value at x = −6 has no visible influence by t = 0.2.
    let t_end = 0.2;
    let err = |n: usize| {
        let g = Grid::new(vec![6.0], vec![n]).unwrap().shared();
        let u0 = sample(|x| travelling_wave(2.0, 1.0, 0.0, x[0], 0.0), g.clone(), 0.0).field;
        let s = solver(vec![2.0], SolverConfig::default());
        let (u, _) = s.evolve(&u0, t_end, &[], |_| {}).unwrap();
        let h = g.spacing()[0];
        (0..g.len())
            .filter(|&j| g.center(0, j) >= -1.0)
            .map(|j| (u.values()[j] - travelling_wave(2.0, 1.0, 0.0, g.center(0, j), t_end)).abs() * h)
            .sum::<f64>()
    };
    let (e1, e2, e3) = (err(200), err(400), err(800));
    assert!(e3 < 1e-2, "{e3:.3e}");
    assert!(e1 / e2 > 1.5 && e2 / e3 > 1.5, "{e1:.3e} {e2:.3e} {e3:.3e}");
}

#[test]
fn barenblatt_is_reproduced_from_t1_to_t2() {
    let b = barenblatt(2.0, 2, 1.0);
    let g = Grid::uniform(2, 1.3 * b.radius_at(2.0), 256).unwrap().shared();
    let u0 = sample(|x| b.solution(x, 1.0), g.clone(), 1.0).field;
    let s = solver(vec![2.0, 2.0], SolverConfig::default());
    let (u, _) = s.evolve(&u0, 2.0, &[], |_| {}).unwrap();
    let exact = sample(|x| b.solution(x, 2.0), g, 2.0).field;
    let rel = lp_distance(&u, &exact, 1.0).unwrap() / total_mass(&exact);
    assert!(rel < 0.01, "{rel:.3e}");
}

#[test]
fn mass_is_conserved_over_ten_thousand_steps() {
    // the step cap keeps the run at t ≤ 1, well before the support nears the box
    let g = Grid::uniform(2, 3.0, 96).unwrap().shared();
    let u0 = box_average(g, &[0.1, -0.2], &[0.3, 0.2], 1.0);
    let cfg = SolverConfig {
        max_dt: Some(1e-4),
        ..SolverConfig::default()
    };
    let s = solver(vec![2.0, 3.0], cfg);
    let mut u = u0.clone();
    let mut worst = 0.0f64;
    let mut flux = 0.0;
    for _ in 0..10_000 {
        let dt = s.stable_dt(&u);
        let (next, rep) = s.step(&u, dt).unwrap();
        worst = worst.max(rep.conservation_defect());
        flux += rep.boundary_flux;
        u = next;
    }
    assert!(flux < 1e-100, "{flux:.3e}");
    let drift = (total_mass(&u) - total_mass(&u0)).abs() / total_mass(&u0);
    assert!(drift < 1e-10, "{drift:.3e}");
    assert!(worst < 1e-12, "{worst:.3e}");
}

#[test]
fn lifted_solutions_order_and_converge() {
    let g = Grid::uniform(2, 1.5, 48).unwrap().shared();
    let u0 = box_average(g, &[0.0, 0.0], &[0.4, 0.3], 1.0);
    let t_end = 0.05;
    let m = vec![2.0, 2.5];
    let (plain, _) = solver(m.clone(), SolverConfig::default())
        .evolve(&u0, t_end, &[], |_| {})
        .unwrap();
    let mut distances = Vec::new();
    for eps in [1e-2, 1e-3, 1e-4] {
        let (excess, _) = solver(m.clone(), SolverConfig::lifted(eps))
            .evolve(&u0, t_end, &[], |_| {})
            .unwrap();
        // the lifted solution u_ε = excess + ε dominates the plain one
        for (e, u) in excess.values().iter().zip(plain.values()) {
            assert!(e + eps >= *u - 1e-12);
        }
        distances.push(lp_distance(&excess, &plain, 1.0).unwrap());
    }
    assert!(distances[0] > distances[1] && distances[1] > distances[2], "{distances:?}");
}

#[test]
fn energy_inequality_on_fixed_runs() {
    for k in 0..20 {
        let m = vec![1.5 + 0.07 * k as f64, 2.8 - 0.05 * k as f64];
        let g = Grid::uniform(2, 1.5, 32).unwrap().shared();
        let c = [0.05 * (k % 5) as f64, -0.04 * (k % 3) as f64];
        let u0 = box_average(g, &c, &[0.3 + 0.01 * k as f64, 0.25], 0.5 + 0.05 * k as f64);
        let r = energy_check(&u0, &solver(m, SolverConfig::default()), 0.02).unwrap();
        assert!(r.passes(0.05), "case {k}: {r:?}");
    }
}

#[test]
fn observer_sees_every_step() {
    let g = Grid::uniform(2, 1.0, 16).unwrap().shared();
    let u0 = box_average(g, &[0.0, 0.0], &[0.3, 0.3], 1.0);
    let s = solver(vec![2.0, 2.0], SolverConfig::default());
    let mut steps = 0;
    let mut last = 0.0;
    let (_, sum) = s
        .evolve(&u0, 0.01, &[], |e| {
            if let Event::Step(r) = e {
                steps += 1;
                assert!(r.time > last);
                last = r.time;
            }
        })
        .unwrap();
    assert_eq!(steps, sum.steps);
    assert_eq!(last, 0.01);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn one_step_is_monotone((p, lower, upper) in common::ordered_case()) {
        let s = Solver::new(p, SolverConfig::default()).unwrap();
        let dt = s.stable_dt(&upper);
        let (a, _) = s.step(&lower, dt).unwrap();
        let (b, _) = s.step(&upper, dt).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            prop_assert!(x <= y, "{x} > {y}");
        }
    }

    #[test]
    fn steps_keep_positivity_and_conserve((p, u) in common::case()) {
        let s = Solver::new(p, SolverConfig::default()).unwrap();
        let mut u = u;
        for _ in 0..20 {
            let dt = s.stable_dt(&u);
            let (next, rep) = s.step(&u, dt).unwrap();
            prop_assert!(next.values().iter().all(|v| *v >= 0.0 && v.is_finite()));
            prop_assert!(rep.conservation_defect() < 1e-12);
            u = next;
        }
    }

    #[test]
    fn lp_norms_do_not_grow((p, u0) in common::case()) {
        let s = Solver::new(p, SolverConfig::default()).unwrap();
        let ps = [1.0, 2.0, 4.0, f64::INFINITY];
        let before: Vec<f64> = ps.iter().map(|&q| lp_norm(&u0, q).unwrap()).collect();
        let (u, _) = s.evolve(&u0, 0.01, &[], |_| {}).unwrap();
        for (k, &q) in ps.iter().enumerate() {
            let after = lp_norm(&u, q).unwrap();
            prop_assert!(after <= before[k] * (1.0 + 1e-9), "p {q}: {} -> {after}", before[k]);
        }
    }

    #[test]
    fn contraction_trace_is_nonincreasing((p, a) in common::case(), shift in 0.0f64..0.5) {
        let b = a.scaled(1.0 - shift);
        let s = Solver::new(p, SolverConfig::default()).unwrap();
        let tr = compare_evolutions(&a, &b, &s, 0.005, &[]).unwrap();
        prop_assert!(!tr.violated, "increase {:.3e}", tr.max_increase);
        let tr = compare_evolutions(&b, &a, &s, 0.005, &[]).unwrap();
        prop_assert!(tr.positive_part.iter().all(|v| *v <= 1e-12));
    }
}
