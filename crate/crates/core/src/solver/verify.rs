use serde::{Deserialize, Serialize};

use super::{SolveConfig, SolveResult};
use crate::error::Result;
use crate::fiber::{FiberMap, L2_CRITICAL};
use crate::functionals::Operators;

/// Scales sampled around `t = 1` when checking that the fiber map peaks
/// there.
const FIBER_SAMPLES: [f64; 7] = [0.8, 0.9, 0.95, 1.0, 1.05, 1.1, 1.25];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiberCheck {
    pub t_values: Vec<f64>,
    pub omega: Vec<f64>,
    pub omega_prime: Vec<f64>,
    /// `ω(1)` is the largest sampled value.
    pub local_max: bool,
    /// `ω'` is positive just below 1 and negative just above.
    pub sign_change_at_one: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub converged: bool,
    /// `|D(u) - c| / c`
    pub mass_error: f64,
    /// `|P(u)| / (1 + B)`
    pub poho_rel: f64,
    /// `|P_λ(u)| / (1 + B)`
    pub p_lambda_rel: f64,
    pub identity_gap: f64,
    pub residual_h1: f64,
    pub lambda: f64,
    /// Present for supercritical exponents.
    pub fiber: Option<FiberCheck>,
}

/// Recomputes the necessary conditions for a solution from scratch.
///
/// Any field is accepted; for a non-solution the report simply shows
/// large residuals.
pub fn verify_solution(result: &SolveResult, cfg: &SolveConfig) -> Result<VerifyReport> {
    crate::grid::check_len(result.u.len(), cfg.grid.len())?;
    crate::functionals::check_exponent(cfg.p)?;
    let u = result.u.values();
    let ops = Operators::new(result.u.grid(), &cfg.pot, cfg.p);
    let (e, diag) = ops.multiplier(u)?;
    let scale = 1.0 + e.dirichlet;

    let fiber = (cfg.p > L2_CRITICAL).then(|| {
        let map = FiberMap::from_operators(&ops, u, &cfg.pot);
        let omega: Vec<f64> = FIBER_SAMPLES.iter().map(|&t| map.energy_unchecked(t)).collect();
        let omega_prime: Vec<f64> = FIBER_SAMPLES.iter().map(|&t| map.derivative_unchecked(t)).collect();
        let at_one = omega[3];
        FiberCheck {
            local_max: omega.iter().all(|&w| w <= at_one),
            sign_change_at_one: omega_prime[2] > 0.0 && omega_prime[4] < 0.0,
            t_values: FIBER_SAMPLES.to_vec(),
            omega,
            omega_prime,
        }
    });

    Ok(VerifyReport {
        converged: result.converged,
        mass_error: (e.mass - cfg.c).abs() / cfg.c,
        poho_rel: e.pohozaev.abs() / scale,
        p_lambda_rel: diag.p_lambda.abs() / scale,
        identity_gap: diag.identity_gap,
        residual_h1: diag.residual_h1,
        lambda: diag.lambda,
        fiber,
    })
}
