//! The fiber map `ω(t) = I(u^t)` along the mass-preserving dilation
//! `u^t(x) = t^{3/2} u(tx)`.
//!
//! Nothing is resampled: `B` and `C` scale exactly as `t²` and `t`, and the
//! substitution `y = tx` moves the dilation onto the coefficient,
//!
//! ```text
//! ω(t) = t²B/2 + tC/4 - (t^s/p) ∫ A(x/t)|u|^p,    s = 3(p-2)/2
//! ```
//!
//! so only `A` is re-evaluated, at `r/t`, on the fixed grid.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{check_exponent, Operators};
use crate::grid::RadialField;
use crate::potential::{log_space, Potential};

/// Lower end of the supercritical range, `p = 10/3`.
pub const L2_CRITICAL: f64 = 10.0 / 3.0;

/// Log-spaced scan window for [`find_tu`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiberScan {
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
}

impl Default for FiberScan {
    fn default() -> Self {
        Self {
            t_min: 1e-3,
            t_max: 1e3,
            points: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiberProfile {
    pub t_values: Vec<f64>,
    pub omega: Vec<f64>,
    pub omega_prime: Vec<f64>,
    pub t_star: Option<f64>,
    pub sign_changes: usize,
}

impl FiberProfile {
    /// CSV with header `t,omega,omega_prime` and 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "t,omega,omega_prime")?;
        for ((t, w), d) in self.t_values.iter().zip(&self.omega).zip(&self.omega_prime) {
            writeln!(out, "{t:.16e},{w:.16e},{d:.16e}")?;
        }
        Ok(())
    }
}

/// The fiber map of one field, with `B`, `C` and the weighted `|u|^p`
/// samples computed once.
#[derive(Debug, Clone)]
pub struct FiberMap<'a> {
    pot: &'a Potential,
    p: f64,
    b: f64,
    c: f64,
    /// `(r_i, 4π w_i r_i² |u_i|^p)` for nodes where `u ≠ 0`
    weighted: Vec<(f64, f64)>,
}

impl<'a> FiberMap<'a> {
    pub fn new(u: &RadialField, pot: &'a Potential, p: f64) -> Result<Self> {
        check_exponent(p)?;
        let ops = Operators::new(u.grid(), pot, p);
        Ok(Self::from_operators(&ops, u.values(), pot))
    }

    pub(crate) fn from_operators(ops: &Operators, u: &[f64], pot: &'a Potential) -> Self {
        let p = ops.exponent();
        let weighted = ops
            .grid()
            .nodes()
            .iter()
            .zip(&ops.vw)
            .zip(u)
            .filter(|(_, &v)| v != 0.0)
            .map(|((&r, &w), &v)| (r, w * v.abs().powf(p)))
            .collect();
        Self {
            pot,
            p,
            b: ops.dirichlet(u),
            c: ops.coulomb(u),
            weighted,
        }
    }

    fn exponent_s(&self) -> f64 {
        1.5 * (self.p - 2.0)
    }

    pub fn energy(&self, t: f64) -> Result<f64> {
        check_scale(t)?;
        Ok(self.energy_unchecked(t))
    }

    pub fn derivative(&self, t: f64) -> Result<f64> {
        check_scale(t)?;
        Ok(self.derivative_unchecked(t))
    }

    pub(crate) fn energy_unchecked(&self, t: f64) -> f64 {
        let n: f64 = if self.pot.is_constant() {
            self.pot.a_inf() * self.weighted.iter().map(|(_, w)| w).sum::<f64>()
        } else {
            self.weighted.iter().map(|&(r, w)| self.pot.a(r / t) * w).sum()
        };
        0.5 * t * t * self.b + 0.25 * t * self.c - t.powf(self.exponent_s()) * n / self.p
    }

    pub(crate) fn derivative_unchecked(&self, t: f64) -> f64 {
        let s = self.exponent_s();
        let n: f64 = if self.pot.is_constant() {
            s * self.pot.a_inf() * self.weighted.iter().map(|(_, w)| w).sum::<f64>()
        } else {
            self.weighted
                .iter()
                .map(|&(r, w)| (s * self.pot.a(r / t) - self.pot.grad_dot_x(r / t)) * w)
                .sum()
        };
        t * self.b + 0.25 * self.c - t.powf(s - 1.0) * n / self.p
    }

    /// Samples `ω` and `ω'` on the scan window and refines the last
    /// positive-to-negative crossing of `ω'` by bisection.
    pub fn profile(&self, scan: &FiberScan) -> Result<FiberProfile> {
        if !(scan.t_min > 0.0 && scan.t_max > scan.t_min && scan.points >= 2) {
            return Err(Error::InvalidArgument(format!("bad fiber scan window {scan:?}")));
        }
        let t_values = log_space(scan.t_min, scan.t_max, scan.points);
        let omega: Vec<f64> = t_values.iter().map(|&t| self.energy_unchecked(t)).collect();
        let omega_prime: Vec<f64> = t_values.iter().map(|&t| self.derivative_unchecked(t)).collect();

        let mut sign_changes = 0;
        let mut last_sign = 0.0;
        let mut bracket = None;
        for (k, &d) in omega_prime.iter().enumerate() {
            if d == 0.0 {
                continue;
            }
            let sign = d.signum();
            if last_sign != 0.0 && sign != last_sign {
                sign_changes += 1;
            }
            last_sign = sign;
            if k + 1 < omega_prime.len() && d > 0.0 && omega_prime[k + 1] <= 0.0 {
                bracket = Some(k);
            }
        }

        let t_star = bracket.map(|k| {
            let (mut lo, mut hi) = (t_values[k], t_values[k + 1]);
            if omega_prime[k + 1] == 0.0 {
                return hi;
            }
            while hi - lo > 1e-12 * hi {
                let mid = 0.5 * (lo + hi);
                let d = self.derivative_unchecked(mid);
                if d > 0.0 {
                    lo = mid;
                } else if d < 0.0 {
                    hi = mid;
                } else {
                    return mid;
                }
            }
            0.5 * (lo + hi)
        });

        Ok(FiberProfile {
            t_values,
            omega,
            omega_prime,
            t_star,
            sign_changes,
        })
    }

    /// Like [`FiberMap::profile`], but a missing crossing is an error.
    pub fn find_root(&self, scan: &FiberScan) -> Result<FiberProfile> {
        let profile = self.profile(scan)?;
        if profile.t_star.is_none() {
            return Err(Error::FiberRootNotFound {
                t_min: scan.t_min,
                t_max: scan.t_max,
                profile: Box::new(profile),
            });
        }
        Ok(profile)
    }
}

fn check_scale(t: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("scale must be positive, got {t}")));
    }
    Ok(())
}

pub(crate) fn check_supercritical(p: f64) -> Result<()> {
    if !(p > L2_CRITICAL && p < 6.0) {
        return Err(Error::UnsupportedExponent {
            p,
            reason: "the fiber maximizer exists only for 10/3 < p < 6",
        });
    }
    Ok(())
}

/// `I(u^t)`.
pub fn fiber_energy(u: &RadialField, pot: &Potential, p: f64, t: f64) -> Result<f64> {
    check_scale(t)?;
    FiberMap::new(u, pot, p)?.energy(t)
}

/// `d/dt I(u^t)`; at `t = 1` this is `P(u)`.
pub fn fiber_derivative(u: &RadialField, pot: &Potential, p: f64, t: f64) -> Result<f64> {
    check_scale(t)?;
    FiberMap::new(u, pot, p)?.derivative(t)
}

/// Locates the scale `t_u` that puts `u^{t_u}` on the Pohozaev manifold,
/// scanning the default window.
pub fn find_tu(u: &RadialField, pot: &Potential, p: f64) -> Result<FiberProfile> {
    find_tu_with(u, pot, p, &FiberScan::default())
}

pub fn find_tu_with(u: &RadialField, pot: &Potential, p: f64, scan: &FiberScan) -> Result<FiberProfile> {
    check_supercritical(p)?;
    if u.is_zero() {
        return Err(Error::InvalidArgument("fiber map of the zero field".into()));
    }
    FiberMap::new(u, pot, p)?.find_root(scan)
}

/// `f(t, u) = I(u) - I(u^t) + (t² - 1)/2 · P(u)`.
pub fn fiber_gap(u: &RadialField, pot: &Potential, p: f64, t: f64) -> Result<f64> {
    check_scale(t)?;
    let map = FiberMap::new(u, pot, p)?;
    let i = map.energy_unchecked(1.0);
    let pu = map.derivative_unchecked(1.0);
    Ok(i - map.energy_unchecked(t) + 0.5 * (t * t - 1.0) * pu)
}
