//! Mass-constrained minimization on `S(c) = {u : ∫|u|² = c}`.
//!
//! Below the L²-critical exponent the solver minimizes `I` directly; above
//! it, the reduced functional `J(u) = max_t I(u^t)` whose minimizers lie on
//! the Pohozaev manifold. Both use the same step: a gradient preconditioned
//! by `(L + αM)⁻¹`, projected onto the tangent space of the mass sphere,
//! followed by multiplicative rescaling back onto it.
//!
//! Neither solver certifies a global infimum. The best of several
//! restarts is reported, and every downstream check that compares infima
//! treats the result as an upper bound.

mod descent;
mod precond;
mod sweep;
mod verify;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::EnergyBreakdown;
use crate::grid::{RadialField, RadialGrid};
use crate::potential::Potential;

pub use descent::{gaussian_ansatz_bound, solve_subcritical, solve_supercritical, solve_with_initial};
pub use sweep::{
    bracket_cbar, sweep_gamma, sweep_m, CbarBracket, GammaReport, MReport, SweepOptions, SweepRecord,
};
pub use verify::{verify_solution, FiberCheck, VerifyReport};

pub const DEFAULT_MAX_ITER: usize = 5000;
pub const DEFAULT_GRAD_TOL: f64 = 1e-8;
pub const DEFAULT_POHO_TOL: f64 = 1e-3;
pub const DEFAULT_RESTARTS: usize = 6;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_NEG_TOL: f64 = 1e-4;

/// Relative amplitude of the seeded noise applied to each restart.
pub const RESTART_NOISE: f64 = 1e-3;

#[derive(Debug, Clone)]
pub struct SolveConfig {
    pub c: f64,
    pub p: f64,
    pub pot: Potential,
    pub grid: Arc<RadialGrid>,
    pub max_iter: usize,
    pub step0: f64,
    pub grad_tol: f64,
    pub poho_tol: f64,
    /// Number of Gaussian initializers, widths log-spaced on `[0.5, 4]`.
    pub restarts: usize,
    pub seed: u64,
    /// Also start from local minima of the Gaussian-ansatz energy over a
    /// broad width scan (subcritical only). Needed whenever the minimizer
    /// is much narrower than the fixed restart widths.
    pub ansatz_seeds: bool,
}

impl SolveConfig {
    pub fn new(c: f64, p: f64, pot: Potential, grid: Arc<RadialGrid>) -> Self {
        Self {
            c,
            p,
            pot,
            grid,
            max_iter: DEFAULT_MAX_ITER,
            step0: 1.0,
            grad_tol: DEFAULT_GRAD_TOL,
            poho_tol: DEFAULT_POHO_TOL,
            restarts: DEFAULT_RESTARTS,
            seed: DEFAULT_SEED,
            ansatz_seeds: true,
        }
    }

    pub fn with_mass(&self, c: f64) -> Self {
        Self { c, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: String| Err(Error::InvalidConfiguration(what));
        if !(self.c > 0.0 && self.c.is_finite()) {
            return bad(format!("mass c must be positive, got {}", self.c));
        }
        if !(self.p > 2.0 && self.p < 6.0) {
            return bad(format!("p must lie in (2, 6), got {}", self.p));
        }
        if self.max_iter == 0 {
            return bad("max_iter must be at least 1".into());
        }
        if self.restarts == 0 {
            return bad("restarts must be at least 1".into());
        }
        if !(self.step0 > 0.0 && self.grad_tol > 0.0 && self.poho_tol > 0.0) {
            return bad("step0 and tolerances must be positive".into());
        }
        Ok(())
    }
}

/// One accepted descent step: the objective (`I` or `J`), `|P|` of the
/// iterate and the step length used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub energy: f64,
    pub poho: f64,
    pub step: f64,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub u: RadialField,
    pub energy: EnergyBreakdown,
    pub lambda: f64,
    pub residual_h1: f64,
    /// `|P(u)| / (1 + B(u))`
    pub poho_residual: f64,
    /// Projected-gradient norm relative to `(1 + |λ|)‖u‖` at the final
    /// iterate.
    pub grad_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    /// History of the restart that won.
    pub history: Vec<HistoryEntry>,
    /// Final objective of every restart, in the order tried.
    pub restart_values: Vec<f64>,
}

impl SolveResult {
    /// Wraps an arbitrary field (not produced by a solver) so that it can be
    /// passed to [`verify_solution`]. The result is marked unconverged.
    pub fn unsolved(u: RadialField, cfg: &SolveConfig) -> Result<Self> {
        crate::grid::check_len(u.len(), cfg.grid.len())?;
        crate::functionals::check_exponent(cfg.p)?;
        let ops = crate::functionals::Operators::new(u.grid(), &cfg.pot, cfg.p);
        let (energy, diag) = ops.multiplier(u.values())?;
        Ok(Self {
            poho_residual: energy.poho_residual(),
            grad_norm: diag.residual_h1 / (1.0 + diag.lambda.abs()),
            u,
            energy,
            lambda: diag.lambda,
            residual_h1: diag.residual_h1,
            iterations: 0,
            converged: false,
            history: Vec::new(),
            restart_values: Vec::new(),
        })
    }
}

pub(crate) fn check_subcritical(p: f64) -> Result<()> {
    if p == 3.0 {
        return Err(Error::UnsupportedExponent {
            p,
            reason: "the Coulomb-Sobolev critical case p = 3 is not a supported solve target",
        });
    }
    if !(p > 2.0 && p < crate::fiber::L2_CRITICAL) {
        return Err(Error::UnsupportedExponent {
            p,
            reason: "the minimization solver needs 2 < p < 10/3",
        });
    }
    Ok(())
}
