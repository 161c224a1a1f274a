//! Prescribed-mass solutions of the nonautonomous Schrödinger–Poisson
//! equation
//!
//! ```text
//! -Δu + λu + (|x|⁻¹ * |u|²) u = A(x)|u|^{p-2}u   in ℝ³,    ∫|u|² = c
//! ```
//!
//! computed on radial grids, together with numerical checks of the
//! variational structure behind them: the energy and Pohozaev functionals,
//! the fiber map `t ↦ I(u^t)`, and the mass dependence of the constrained
//! levels `γ(c)` and `m(c)`.
//!
//! ```
//! use std::sync::Arc;
//! use sp_normalized::{energy, gaussian_field, make_grid, GaussianParams, Potential, Spacing};
//!
//! let grid = Arc::new(make_grid(2049, 40.0, Spacing::Uniform)?);
//! let u = gaussian_field(GaussianParams::new(1.0, 1.0)?, &grid)?;
//! let e = energy(&u, &Potential::constant(1.0)?, 4.0)?;
//! assert!((e.dirichlet - 1.5).abs() < 1e-5);
//! # Ok::<(), sp_normalized::Error>(())
//! ```

// `!(x > 0.0)` is deliberate: it also rejects NaN. Stencil loops read
// better indexed.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod error;
pub mod fiber;
pub mod functionals;
pub mod grid;
pub mod potential;
pub mod solver;

pub use error::{Error, Result};
pub use fiber::{fiber_derivative, fiber_energy, fiber_gap, find_tu, find_tu_with, FiberMap, FiberProfile, FiberScan};
pub use functionals::{
    coercivity_diagnostic, coulomb, coulomb_bruteforce, dirichlet, energy, energy_gradient, extract_multiplier,
    gn_diagnostic, mass, newton_potential, weighted_nonlinearity, EnergyBreakdown, MultiplierDiagnostics,
};
pub use grid::{
    gaussian_field, integrate_radial, make_grid, radial_derivative, resample_scaled, GaussianParams, RadialField,
    RadialGrid, Spacing,
};
pub use potential::{check_conditions, eval_a, eval_grad_a_dot_x, ConditionReport, Potential};
pub use solver::{
    bracket_cbar, solve_subcritical, solve_supercritical, sweep_gamma, sweep_m, verify_solution, SolveConfig,
    SolveResult, SweepRecord,
};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/grids.md")]
    mod grids {}
    #[doc = include_str!("../../../book/src/potentials.md")]
    mod potentials {}
    #[doc = include_str!("../../../book/src/functionals.md")]
    mod functionals {}
    #[doc = include_str!("../../../book/src/fiber.md")]
    mod fiber {}
    #[doc = include_str!("../../../book/src/solvers.md")]
    mod solvers {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
