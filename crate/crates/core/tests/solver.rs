mod common;

use common::{constant, exp_bump, graded, uniform};
use sp_normalized::solver::{solve_with_initial, SweepOptions};
use sp_normalized::*;

#[test]
fn minimizer_stays_on_the_mass_sphere() {
    let cfg = SolveConfig::new(0.7, 2.5, constant(), uniform(1025, 60.0));
    let res = solve_subcritical(&cfg).unwrap();
    assert!((mass(&res.u) - 0.7).abs() <= 1e-10 * 0.7);
    assert!(res.energy.energy < 0.0);
    assert!(res.history.windows(2).all(|w| w[1].energy <= w[0].energy));
    assert!(res.restart_values.len() >= cfg.restarts);
    assert!(res.restart_values.iter().all(|&v| v >= res.energy.energy));
}

#[test]
fn identical_seeds_give_identical_results() {
    let cfg = SolveConfig::new(1.0, 4.0, exp_bump(), graded(1025, 40.0));
    let a = solve_supercritical(&cfg).unwrap();
    let b = solve_supercritical(&cfg).unwrap();
    assert_eq!(a.u.values(), b.u.values());
    assert_eq!(a.iterations, b.iterations);
}

#[test]
fn supercritical_solution_is_a_fiber_maximum() {
    let cfg = SolveConfig::new(2.0, 5.0, constant(), graded(1025, 40.0));
    let res = solve_supercritical(&cfg).unwrap();
    assert!(res.converged);
    let rep = verify_solution(&res, &cfg).unwrap();
    let fiber = rep.fiber.unwrap();
    assert!(fiber.local_max && fiber.sign_change_at_one);
    assert!(rep.p_lambda_rel < 1e-3);
    let prof = find_tu(&res.u, &cfg.pot, cfg.p).unwrap();
    assert!((prof.t_star.unwrap() - 1.0).abs() < 1e-3);
}

#[test]
fn verify_flags_a_non_solution() {
    let grid = uniform(2049, 40.0);
    let cfg = SolveConfig::new(1.0, 4.0, constant(), grid.clone());
    let g = gaussian_field(GaussianParams::new(1.0, 1.0).unwrap(), &grid).unwrap();
    let rep = verify_solution(&SolveResult::unsolved(g, &cfg).unwrap(), &cfg).unwrap();
    assert!(!rep.converged);
    assert!(rep.mass_error < 1e-12);
    // P = B + C/4 - (3/4)N for a unit Gaussian at p = 4
    let pi = std::f64::consts::PI;
    let p_exact = 1.5 + 0.25 * (2.0 / pi).sqrt() - 0.75 * (2.0 * pi).powf(-1.5);
    assert!((rep.poho_rel * 2.5 - p_exact).abs() < 1e-4, "{}", rep.poho_rel * 2.5);
    assert!(rep.identity_gap < 1e-10 * (1.0 + p_exact));
}

#[test]
fn warm_start_never_loses_to_a_cold_start() {
    let cfg = SolveConfig::new(1.0, 2.5, constant(), uniform(1025, 80.0));
    let cold = solve_subcritical(&cfg).unwrap();
    let init = gaussian_field(GaussianParams::new(3.0, 1.0).unwrap(), &cfg.grid).unwrap();
    let warm = solve_with_initial(&cfg, &init, true).unwrap();
    assert!(warm.energy.energy <= cold.energy.energy + 1e-9);
}

#[test]
fn parallel_sweep_matches_serial_order() {
    let cfg = SolveConfig::new(1.0, 4.0, constant(), graded(1025, 40.0));
    let cs = [0.5, 1.0, 2.0];
    let serial = sweep_m(&cfg, &cs, &SweepOptions::default()).unwrap();
    let parallel = sweep_m(&cfg, &cs, &SweepOptions { parallel: true, ..Default::default() }).unwrap();
    for (a, b) in serial.records.iter().zip(&parallel.records) {
        assert_eq!(a.c, b.c);
        assert!((a.value - b.value).abs() <= 1e-6 * a.value);
    }
}

#[test]
fn bracket_rejects_a_non_straddling_interval() {
    let cfg = SolveConfig::new(1.0, 3.2, constant(), graded(513, 40.0));
    let err = bracket_cbar(&cfg, 0.05, 5.0, 1e-4).unwrap_err();
    assert!(err.is_domain());
    assert!(matches!(err, Error::BadBracket { .. }));
}

#[test]
fn unsupported_exponents_are_rejected_before_solving() {
    let grid = uniform(257, 20.0);
    for (p, sub) in [(3.0, true), (3.5, true), (3.0, false), (2.5, false)] {
        let cfg = SolveConfig::new(1.0, p, constant(), grid.clone());
        let res = if sub { solve_subcritical(&cfg) } else { solve_supercritical(&cfg) };
        assert!(matches!(res, Err(Error::UnsupportedExponent { .. })), "p = {p}");
    }
}
