//! Mass sweeps with structural checks, and bisection for the threshold
//! mass `c̄` below which `γ(c) = 0`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::descent::solve_with_initial;
use super::{check_subcritical, solve_subcritical, solve_supercritical, SolveConfig, SolveResult};
use crate::error::{Error, Result};
use crate::fiber::check_supercritical;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub c: f64,
    /// `γ(c)` or `m(c)` estimate.
    pub value: f64,
    pub lambda: f64,
    pub poho_residual: f64,
    /// `‖∇u‖₂²`
    pub gradnorm_b: f64,
    pub converged: bool,
}

impl SweepRecord {
    fn from_result(c: f64, res: &SolveResult) -> Self {
        Self {
            c,
            value: res.energy.energy,
            lambda: res.lambda,
            poho_residual: res.poho_residual,
            gradnorm_b: res.energy.dirichlet,
            converged: res.converged,
        }
    }

    fn failed(c: f64) -> Self {
        Self {
            c,
            value: f64::NAN,
            lambda: f64::NAN,
            poho_residual: f64::NAN,
            gradnorm_b: f64::NAN,
            converged: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    /// Run the masses concurrently. Warm starts are then disabled so that
    /// every record is independent; output order is unchanged.
    pub parallel: bool,
    /// Absolute slack is `tol · (1 + |value|)` in every structural check.
    pub tol: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            parallel: false,
            tol: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaReport {
    pub records: Vec<SweepRecord>,
    /// `(c_i, c_j, γ(c_i + c_j), γ(c_i) + γ(c_j))` where the sum exceeds
    /// the right side by more than the slack.
    pub subadditivity_violations: Vec<(f64, f64, f64, f64)>,
    pub pairs_checked: usize,
    /// Consecutive `(c_k, c_{k+1})` where `γ/c` increased (checked only for
    /// `p < 3`).
    pub ratio_monotonicity_violations: Vec<(f64, f64)>,
    /// `γ(c)/c` at each record.
    pub ratios: Vec<f64>,
    /// `|γ/c|` at the smallest mass is below that at the largest.
    pub small_c_trend: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MReport {
    pub records: Vec<SweepRecord>,
    pub all_positive: bool,
    /// Consecutive `(c_k, c_{k+1})` where `m` increased beyond the slack.
    pub monotonicity_violations: Vec<(f64, f64)>,
    /// `m` at the smallest mass exceeds `m` at the largest.
    pub grows_toward_small_c: bool,
}

fn check_masses(cs: &[f64]) -> Result<()> {
    if cs.is_empty() {
        return Err(Error::InvalidArgument("empty mass list".into()));
    }
    if cs.iter().any(|&c| !(c > 0.0 && c.is_finite())) || cs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("masses must be positive and increasing".into()));
    }
    Ok(())
}

fn run_sweep(
    cfg: &SolveConfig,
    cs: &[f64],
    opts: &SweepOptions,
    solve: fn(&SolveConfig) -> Result<SolveResult>,
) -> Vec<SweepRecord> {
    if opts.parallel {
        return cs
            .par_iter()
            .map(|&c| match solve(&cfg.with_mass(c)) {
                Ok(res) => SweepRecord::from_result(c, &res),
                Err(_) => SweepRecord::failed(c),
            })
            .collect();
    }
    let mut prev: Option<SolveResult> = None;
    let mut out = Vec::with_capacity(cs.len());
    for &c in cs {
        let local = cfg.with_mass(c);
        let res = match &prev {
            // the previous minimizer, rescaled to the new mass, competes
            // with the regular restarts
            Some(p) => {
                let init = p.u.scaled((c / p.energy.mass).sqrt());
                solve_with_initial(&local, &init, true)
            }
            None => solve(&local),
        };
        match res {
            Ok(r) => {
                out.push(SweepRecord::from_result(c, &r));
                prev = Some(r);
            }
            Err(_) => out.push(SweepRecord::failed(c)),
        }
    }
    out
}

/// Sweeps `γ(c)` over increasing masses.
pub fn sweep_gamma(cfg: &SolveConfig, cs: &[f64], opts: &SweepOptions) -> Result<GammaReport> {
    check_subcritical(cfg.p)?;
    check_masses(cs)?;
    let records = run_sweep(cfg, cs, opts, solve_subcritical);
    Ok(gamma_report(records, cfg.p, opts.tol))
}

pub(crate) fn gamma_report(records: Vec<SweepRecord>, p: f64, tol: f64) -> GammaReport {
    let value_at = |c: f64| {
        records
            .iter()
            .find(|r| (r.c - c).abs() <= 1e-12 * c && r.value.is_finite())
            .map(|r| r.value)
    };
    let mut violations = Vec::new();
    let mut pairs = 0;
    for (i, a) in records.iter().enumerate() {
        for b in &records[i..] {
            let (Some(sum), true) = (value_at(a.c + b.c), a.value.is_finite() && b.value.is_finite())
            else {
                continue;
            };
            pairs += 1;
            let rhs = a.value + b.value;
            if sum > rhs + tol * (1.0 + rhs.abs()) {
                violations.push((a.c, b.c, sum, rhs));
            }
        }
    }
    let ratios: Vec<f64> = records.iter().map(|r| r.value / r.c).collect();
    let mut ratio_violations = Vec::new();
    if p < 3.0 {
        for (k, w) in ratios.windows(2).enumerate() {
            if w[1] > w[0] + tol * (1.0 + w[0].abs()) {
                ratio_violations.push((records[k].c, records[k + 1].c));
            }
        }
    }
    let small_c_trend = ratios.first().unwrap().abs() < ratios.last().unwrap().abs();
    GammaReport {
        records,
        subadditivity_violations: violations,
        pairs_checked: pairs,
        ratio_monotonicity_violations: ratio_violations,
        ratios,
        small_c_trend,
    }
}

/// Sweeps `m(c)` over increasing masses.
pub fn sweep_m(cfg: &SolveConfig, cs: &[f64], opts: &SweepOptions) -> Result<MReport> {
    check_supercritical(cfg.p)?;
    check_masses(cs)?;
    let records = run_sweep(cfg, cs, opts, solve_supercritical);
    Ok(m_report(records, opts.tol))
}

pub(crate) fn m_report(records: Vec<SweepRecord>, tol: f64) -> MReport {
    let all_positive = records.iter().all(|r| r.value > 0.0);
    let monotonicity_violations = records
        .windows(2)
        .filter(|w| !(w[1].value <= w[0].value + tol * (1.0 + w[0].value.abs())))
        .map(|w| (w[0].c, w[1].c))
        .collect();
    let grows_toward_small_c = records.first().unwrap().value > records.last().unwrap().value;
    MReport {
        records,
        all_positive,
        monotonicity_violations,
        grows_toward_small_c,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CbarBracket {
    pub lo: f64,
    pub hi: f64,
    pub gamma_lo: f64,
    pub gamma_hi: f64,
    /// Every `(c, γ estimate)` evaluated, in order.
    pub evaluations: Vec<(f64, f64)>,
}

/// Relative width at which bisection stops.
pub const CBAR_REL_WIDTH: f64 = 0.02;

/// Bisects (geometrically) for the mass where the best energy first drops
/// below `-neg_tol`, for `3 < p < 10/3`.
pub fn bracket_cbar(cfg: &SolveConfig, c_lo: f64, c_hi: f64, neg_tol: f64) -> Result<CbarBracket> {
    if !(cfg.p > 3.0 && cfg.p < crate::fiber::L2_CRITICAL) {
        return Err(Error::UnsupportedExponent {
            p: cfg.p,
            reason: "the threshold mass exists only for 3 < p < 10/3",
        });
    }
    if !(neg_tol > 0.0) {
        return Err(Error::InvalidArgument(format!("neg_tol must be positive, got {neg_tol}")));
    }
    if !(c_lo > 0.0 && c_lo < c_hi && c_hi.is_finite()) {
        return Err(Error::BadBracket {
            c_lo,
            c_hi,
            gamma_lo: f64::NAN,
            gamma_hi: f64::NAN,
            neg_tol,
        });
    }
    let mut evaluations = Vec::new();
    let mut gamma = |c: f64| -> Result<f64> {
        let g = solve_subcritical(&cfg.with_mass(c))?.energy.energy;
        evaluations.push((c, g));
        Ok(g)
    };
    let (mut lo, mut hi) = (c_lo, c_hi);
    let mut g_lo = gamma(lo)?;
    let mut g_hi = gamma(hi)?;
    if !(g_lo >= -neg_tol && g_hi < -neg_tol) {
        return Err(Error::BadBracket {
            c_lo,
            c_hi,
            gamma_lo: g_lo,
            gamma_hi: g_hi,
            neg_tol,
        });
    }
    while hi / lo - 1.0 > CBAR_REL_WIDTH {
        let mid = (lo * hi).sqrt();
        let g = gamma(mid)?;
        if g < -neg_tol {
            hi = mid;
            g_hi = g;
        } else {
            lo = mid;
            g_lo = g;
        }
    }
    Ok(CbarBracket {
        lo,
        hi,
        gamma_lo: g_lo,
        gamma_hi: g_hi,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(c: f64, value: f64) -> SweepRecord {
        SweepRecord {
            c,
            value,
            lambda: 0.0,
            poho_residual: 0.0,
            gradnorm_b: 1.0,
            converged: true,
        }
    }

    #[test]
    fn gamma_report_flags_superadditive_pairs() {
        // γ(2) = -1 > γ(1) + γ(1) = -2
        let r = gamma_report(vec![rec(1.0, -1.0), rec(2.0, -1.0)], 2.5, 1e-4);
        assert_eq!(r.pairs_checked, 1);
        assert_eq!(r.subadditivity_violations, vec![(1.0, 1.0, -1.0, -2.0)]);
        assert_eq!(r.ratio_monotonicity_violations, vec![(1.0, 2.0)]);
    }

    #[test]
    fn gamma_report_accepts_a_concave_profile() {
        let cs = [0.5, 1.0, 1.5, 2.0];
        let recs = cs.iter().map(|&c| rec(c, -c * c)).collect();
        let r = gamma_report(recs, 2.5, 1e-4);
        assert!(r.subadditivity_violations.is_empty());
        assert!(r.ratio_monotonicity_violations.is_empty());
        assert!(r.small_c_trend);
        assert_eq!(r.pairs_checked, 4);
    }

    #[test]
    fn m_report_checks() {
        let r = m_report(vec![rec(0.5, 3.0), rec(1.0, 2.0), rec(2.0, 2.0001)], 1e-3);
        assert!(r.all_positive && r.grows_toward_small_c);
        assert!(r.monotonicity_violations.is_empty());
        let r = m_report(vec![rec(0.5, 1.0), rec(1.0, 2.0)], 1e-3);
        assert_eq!(r.monotonicity_violations, vec![(0.5, 1.0)]);
        assert!(!r.grows_toward_small_c);
        let r = m_report(vec![rec(1.0, f64::NAN)], 1e-3);
        assert!(!r.all_positive);
    }
}
