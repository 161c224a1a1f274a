mod common;

use common::{constant, exp_bump, graded, rational_bump, uniform};
use sp_normalized::*;

fn unit_gaussian() -> RadialField {
    gaussian_field(GaussianParams::new(1.0, 1.0).unwrap(), &uniform(2049, 40.0)).unwrap()
}

#[test]
fn gaussian_fiber_at_scale_two() {
    // (4/2)·3/2 + (2/4)·√(2/π) − (8/4)·(2π)^{-3/2}
    let v = fiber_energy(&unit_gaussian(), &constant(), 4.0, 2.0).unwrap();
    assert!((v - 3.271955).abs() < 1e-4, "{v}");
}

#[test]
fn fiber_limits_at_small_and_large_scales() {
    let u = unit_gaussian();
    for p in [3.2, 4.0, 5.0] {
        let i = energy(&u, &constant(), p).unwrap().energy;
        let small = fiber_energy(&u, &constant(), p, 1e-3).unwrap();
        assert!(small >= 0.0 && small <= 1e-2 * i.abs() + 1e-4, "p = {p}: {small}");
    }
    // below p = 3 the power term t^{3(p-2)/2} wins near zero, so the
    // approach is from below
    let tiny = |t: f64| fiber_energy(&u, &constant(), 2.5, t).unwrap();
    assert!(tiny(1e-3) < 0.0 && tiny(1e-6) < 0.0 && tiny(1e-6).abs() < tiny(1e-3).abs());
    for p in [4.0, 5.0] {
        assert!(fiber_energy(&u, &exp_bump(), p, 1e3).unwrap() < 0.0);
    }
}

#[test]
fn scaled_derivative_is_pohozaev_of_the_dilated_field() {
    let u = unit_gaussian();
    for pot in [constant(), exp_bump()] {
        for t in [0.5, 0.8, 1.25, 2.0] {
            let lhs = t * fiber_derivative(&u, &pot, 4.0, t).unwrap();
            let rhs = energy(&resample_scaled(&u, t).unwrap(), &pot, 4.0).unwrap().pohozaev;
            assert!((lhs - rhs).abs() <= 2e-3 * rhs.abs(), "t = {t}: {lhs} vs {rhs}");
        }
    }
}

#[test]
fn derivative_matches_difference_quotient_away_from_one() {
    let u = unit_gaussian();
    for pot in [constant(), exp_bump(), rational_bump()] {
        for t in [0.5, 1.0, 2.0] {
            let h = 1e-5 * t;
            let fd = (fiber_energy(&u, &pot, 4.0, t + h).unwrap() - fiber_energy(&u, &pot, 4.0, t - h).unwrap())
                / (2.0 * h);
            let d = fiber_derivative(&u, &pot, 4.0, t).unwrap();
            assert!((fd - d).abs() <= 1e-5 * d.abs(), "t = {t}");
        }
    }
}

#[test]
fn root_of_a_prescaled_field_is_rescaled() {
    let u = unit_gaussian();
    let t0 = find_tu(&u, &constant(), 4.0).unwrap().t_star.unwrap();
    for s in [0.5, 2.0] {
        let us = resample_scaled(&u, s).unwrap();
        let ts = find_tu(&us, &constant(), 4.0).unwrap().t_star.unwrap();
        assert!((ts * s / t0 - 1.0).abs() < 1e-3, "s = {s}");
    }
}

#[test]
fn solutions_beat_every_dilation() {
    let cfg = SolveConfig::new(1.0, 4.0, exp_bump(), graded(1025, 40.0));
    let res = solve_supercritical(&cfg).unwrap();
    assert!(res.converged);
    for t in [0.25, 0.5, 0.9, 1.1, 2.0, 4.0] {
        let gap = fiber_gap(&res.u, &cfg.pot, cfg.p, t).unwrap();
        let drop = res.energy.energy - fiber_energy(&res.u, &cfg.pot, cfg.p, t).unwrap();
        assert!(gap >= -1e-8 && drop >= -1e-6, "t = {t}");
    }
    assert!(fiber_gap(&res.u, &cfg.pot, cfg.p, 1.0).unwrap().abs() <= 1e-12 * res.energy.energy);
}

#[test]
fn potential_gradient_decays_at_the_truncation_radius() {
    for pot in [constant(), exp_bump()] {
        assert!(pot.eval_grad_dot_x(40.0).unwrap().abs() <= 1e-3);
    }
    // the rational bump decays only like amp/r
    let g = rational_bump().eval_grad_dot_x(40.0).unwrap();
    assert!((g + 40.0 / (41.0f64 * 41.0)).abs() < 1e-12);
}
