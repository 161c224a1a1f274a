#![allow(dead_code)]

use std::io::Write;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sp_normalized::{make_grid, Potential, RadialField, RadialGrid, Spacing};

pub fn uniform(n: usize, rmax: f64) -> Arc<RadialGrid> {
    Arc::new(make_grid(n, rmax, Spacing::Uniform).unwrap())
}

pub fn graded(n: usize, rmax: f64) -> Arc<RadialGrid> {
    Arc::new(make_grid(n, rmax, Spacing::graded()).unwrap())
}

/// A smooth, rapidly decaying radial field: a sum of three Gaussians with
/// polynomial modulation, widths in `[0.7, 2.5]`, and mass in `[0.5, 2]`.
pub fn random_field(grid: &Arc<RadialGrid>, rng: &mut ChaCha8Rng) -> RadialField {
    let terms: Vec<(f64, f64, f64)> = (0..3)
        .map(|_| (rng.gen_range(0.2..1.0), rng.gen_range(-0.2..0.5), rng.gen_range(0.7..2.5)))
        .collect();
    let u = RadialField::from_fn(Arc::clone(grid), |r| {
        terms
            .iter()
            .map(|&(a, b, s)| a * (1.0 + b * r * r) * (-0.5 * r * r / (s * s)).exp())
            .sum()
    })
    .unwrap();
    let target = rng.gen_range(0.5..2.0);
    let m = sp_normalized::mass(&u);
    u.scaled((target / m).sqrt())
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn constant() -> Potential {
    Potential::constant(1.0).unwrap()
}

pub fn exp_bump() -> Potential {
    Potential::exp_bump(1.0, 1.0, 1.0).unwrap()
}

pub fn rational_bump() -> Potential {
    Potential::rational_bump(1.0, 1.0).unwrap()
}

pub fn all_potentials() -> Vec<(&'static str, Potential)> {
    vec![("constant", constant()), ("exp_bump", exp_bump()), ("rational_bump", rational_bump())]
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Writes straight to the process stderr so that the line shows up even
/// when the harness captures test output.
pub fn report(criterion: &str, pass: bool, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stderr(), "{tag} criterion {criterion}: {detail}");
}

pub fn info(criterion: &str, detail: &str) {
    let _ = writeln!(std::io::stderr(), "INFO criterion {criterion}: {detail}");
}
