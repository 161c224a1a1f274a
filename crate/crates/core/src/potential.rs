//! Radial coefficient models `A(|x|)` and sampled checks of the structural
//! hypotheses on them.
//!
//! Three closed-form models are built in; a tabulated profile read from a
//! two-column text file covers everything else. For the closed forms the
//! radial virial term `∇A(x)·x = r A'(r)` is exact, for tables it comes from
//! central differences of the interpolant.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::MonotoneCubic;

/// Slack used by the monotonicity and sign checks.
pub const CHECK_SLACK: f64 = 1e-10;

/// Relative flatness required of `A` at the largest sampled radius.
pub const FLATNESS_FRACTION: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialModel {
    Constant,
    /// `A_∞ + amp·e^{-τ r}`
    ExpBump { amp: f64, tau: f64 },
    /// `A_∞ + amp/(1 + r)`
    RationalBump { amp: f64 },
    Tabulated(TabulatedProfile),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedProfile {
    r: Vec<f64>,
    a: Vec<f64>,
    interp: MonotoneCubic,
}

impl TabulatedProfile {
    pub fn radii(&self) -> &[f64] {
        &self.r
    }

    pub fn values(&self) -> &[f64] {
        &self.a
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    a_inf: f64,
    model: PotentialModel,
}

impl Potential {
    pub fn constant(a_inf: f64) -> Result<Self> {
        check_a_inf(a_inf)?;
        Ok(Self {
            a_inf,
            model: PotentialModel::Constant,
        })
    }

    pub fn exp_bump(a_inf: f64, amp: f64, tau: f64) -> Result<Self> {
        check_a_inf(a_inf)?;
        check_amp(amp)?;
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::InvalidPotential(format!("decay rate must be positive, got {tau}")));
        }
        Ok(Self {
            a_inf,
            model: PotentialModel::ExpBump { amp, tau },
        })
    }

    pub fn rational_bump(a_inf: f64, amp: f64) -> Result<Self> {
        check_a_inf(a_inf)?;
        check_amp(amp)?;
        Ok(Self {
            a_inf,
            model: PotentialModel::RationalBump { amp },
        })
    }

    /// A tabulated profile; `A_∞` is taken to be the last tabulated value.
    ///
    /// Unlike the closed forms, a table is not required to satisfy
    /// `A ≥ A_∞`: that is left to [`check_conditions`] to report.
    pub fn tabulated(r: Vec<f64>, a: Vec<f64>) -> Result<Self> {
        if r.len() != a.len() {
            return Err(Error::InvalidPotential(format!(
                "table has {} radii but {} values",
                r.len(),
                a.len()
            )));
        }
        if r.len() < 2 {
            return Err(Error::InvalidPotential("table needs at least two rows".into()));
        }
        if r[0] != 0.0 {
            return Err(Error::InvalidPotential(format!(
                "first tabulated radius must be 0, got {}",
                r[0]
            )));
        }
        if r.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidPotential("tabulated radii must be strictly increasing".into()));
        }
        if a.iter().chain(&r).any(|v| !v.is_finite()) {
            return Err(Error::InvalidPotential("table contains non-finite entries".into()));
        }
        let a_inf = *a.last().unwrap();
        check_a_inf(a_inf)?;
        let interp = MonotoneCubic::new(&r, &a)?;
        Ok(Self {
            a_inf,
            model: PotentialModel::Tabulated(TabulatedProfile { r, a, interp }),
        })
    }

    /// Parses the two-column `r value` text format. Blank lines and lines
    /// starting with `#` are skipped.
    pub fn parse_table(text: &str) -> Result<Self> {
        let mut r = Vec::new();
        let mut a = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split_whitespace().collect();
            if cols.len() != 2 {
                return Err(Error::InvalidPotential(format!(
                    "line {}: expected two columns, found {}",
                    lineno + 1,
                    cols.len()
                )));
            }
            let parse = |s: &str| {
                s.parse::<f64>().map_err(|_| {
                    Error::InvalidPotential(format!("line {}: cannot parse '{s}'", lineno + 1))
                })
            };
            r.push(parse(cols[0])?);
            a.push(parse(cols[1])?);
        }
        Self::tabulated(r, a)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse_table(&text)
    }

    pub fn a_inf(&self) -> f64 {
        self.a_inf
    }

    pub fn model(&self) -> &PotentialModel {
        &self.model
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.model, PotentialModel::Constant)
    }

    /// The limiting autonomous coefficient `A ≡ A_∞`.
    pub fn limiting(&self) -> Self {
        Self {
            a_inf: self.a_inf,
            model: PotentialModel::Constant,
        }
    }

    pub fn eval(&self, r: f64) -> Result<f64> {
        check_radius(r)?;
        Ok(self.a(r))
    }

    pub fn eval_grad_dot_x(&self, r: f64) -> Result<f64> {
        check_radius(r)?;
        Ok(self.grad_dot_x(r))
    }

    /// `A(r)` without the argument check; `r` must be nonnegative.
    pub(crate) fn a(&self, r: f64) -> f64 {
        match &self.model {
            PotentialModel::Constant => self.a_inf,
            PotentialModel::ExpBump { amp, tau } => self.a_inf + amp * (-tau * r).exp(),
            PotentialModel::RationalBump { amp } => self.a_inf + amp / (1.0 + r),
            PotentialModel::Tabulated(t) => t.interp.eval(r),
        }
    }

    /// `∇A(x)·x = r A'(r)` without the argument check.
    pub(crate) fn grad_dot_x(&self, r: f64) -> f64 {
        match &self.model {
            PotentialModel::Constant => 0.0,
            PotentialModel::ExpBump { amp, tau } => -amp * tau * r * (-tau * r).exp(),
            PotentialModel::RationalBump { amp } => -amp * r / ((1.0 + r) * (1.0 + r)),
            PotentialModel::Tabulated(t) => {
                let rmax = *t.r.last().unwrap();
                if r == 0.0 || r >= rmax {
                    return 0.0;
                }
                let h = 1e-6 * r.max(1.0);
                let lo = (r - h).max(0.0);
                let hi = (r + h).min(rmax);
                r * (t.interp.eval(hi) - t.interp.eval(lo)) / (hi - lo)
            }
        }
    }
}

fn check_a_inf(a_inf: f64) -> Result<()> {
    if !(a_inf > 0.0 && a_inf.is_finite()) {
        return Err(Error::InvalidPotential(format!(
            "limit value A_inf must lie in (0, inf), got {a_inf}"
        )));
    }
    Ok(())
}

fn check_amp(amp: f64) -> Result<()> {
    if !(amp >= 0.0 && amp.is_finite()) {
        return Err(Error::InvalidPotential(format!(
            "bump amplitude must be nonnegative (A >= A_inf), got {amp}"
        )));
    }
    Ok(())
}

fn check_radius(r: f64) -> Result<()> {
    if !(r >= 0.0) {
        return Err(Error::InvalidArgument(format!("radius must be nonnegative, got {r}")));
    }
    Ok(())
}

/// `A(r)`.
pub fn eval_a(pot: &Potential, r: f64) -> Result<f64> {
    pot.eval(r)
}

/// `∇A(x)·x` at `|x| = r`.
pub fn eval_grad_a_dot_x(pot: &Potential, r: f64) -> Result<f64> {
    pot.eval_grad_dot_x(r)
}

impl fmt::Display for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.model {
            PotentialModel::Constant => write!(f, "constant:{}", self.a_inf),
            PotentialModel::ExpBump { amp, tau } => write!(f, "exp_bump:{amp},{tau}"),
            PotentialModel::RationalBump { amp } => write!(f, "rational_bump:{amp}"),
            PotentialModel::Tabulated(t) => write!(f, "table({} rows)", t.r.len()),
        }
    }
}

/// Parses `constant[:a_inf]`, `exp_bump[:amp[,tau]]` or
/// `rational_bump[:amp]`. Bumps sit on `A_∞ = 1` and default to unit
/// amplitude and decay rate. Tables are loaded with [`Potential::from_file`].
impl FromStr for Potential {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, args) = match s.trim().split_once(':') {
            Some((n, a)) => (n.trim(), Some(a)),
            None => (s.trim(), None),
        };
        let nums: Vec<f64> = match args {
            None => Vec::new(),
            Some(a) => a
                .split([',', ':'])
                .filter(|x| !x.trim().is_empty())
                .map(|x| {
                    x.trim().parse::<f64>().map_err(|_| {
                        Error::InvalidConfiguration(format!("bad potential parameter '{x}'"))
                    })
                })
                .collect::<Result<_>>()?,
        };
        let arg = |i: usize, default: f64| nums.get(i).copied().unwrap_or(default);
        let max_args = |k: usize| {
            if nums.len() > k {
                Err(Error::InvalidConfiguration(format!(
                    "potential '{name}' takes at most {k} parameters"
                )))
            } else {
                Ok(())
            }
        };
        match name {
            "constant" => {
                max_args(1)?;
                Potential::constant(arg(0, 1.0))
            }
            "exp_bump" => {
                max_args(2)?;
                Potential::exp_bump(1.0, arg(0, 1.0), arg(1, 1.0))
            }
            "rational_bump" => {
                max_args(1)?;
                Potential::rational_bump(1.0, arg(0, 1.0))
            }
            other => Err(Error::InvalidConfiguration(format!(
                "unknown potential '{other}' (expected constant, exp_bump, rational_bump)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    /// `A(r) ≥ A_∞` at a sampled radius.
    A1Bound,
    /// `A` is within the flatness band of `A_∞` at the largest radius.
    A1Flat,
    /// `t ↦ (3/2)(p-2)A(tr) - ∇A(tr)·(tr)` nonincreasing.
    A2,
    /// `t ↦ t^{3/2} A(tr)` nondecreasing.
    A3,
    /// The derived quantity `φ(t, r) ≥ 0`.
    Phi,
}

/// A sampled violation. For the monotonicity conditions `t_prev` is the
/// preceding scale of the offending consecutive pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub condition: Condition,
    pub t_prev: Option<f64>,
    pub t: f64,
    pub r: f64,
    pub magnitude: f64,
}

impl Witness {
    /// Recomputes the violation magnitude at this witness.
    pub fn reevaluate(&self, pot: &Potential, p: f64) -> f64 {
        let s = 1.5 * (p - 2.0);
        match self.condition {
            Condition::A1Bound => pot.a_inf - pot.a(self.r),
            Condition::A1Flat => (pot.a(self.r) - pot.a_inf).abs() - FLATNESS_FRACTION * pot.a_inf,
            Condition::A2 => {
                let t0 = self.t_prev.unwrap_or(self.t);
                a2_map(pot, s, self.t, self.r) - a2_map(pot, s, t0, self.r)
            }
            Condition::A3 => {
                let t0 = self.t_prev.unwrap_or(self.t);
                a3_map(pot, t0, self.r) - a3_map(pot, self.t, self.r)
            }
            Condition::Phi => -phi(pot, p, self.t, self.r),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub a1_ok: bool,
    pub a2_ok: bool,
    pub a3_ok: bool,
    pub phi_ok: bool,
    pub phi_min: f64,
    /// Worst violation of each failed condition.
    pub witnesses: Vec<Witness>,
    pub violation_counts: ViolationCounts,
    pub t_samples: usize,
    pub r_samples: usize,
    pub pairs_tested: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViolationCounts {
    pub a1: usize,
    pub a2: usize,
    pub a3: usize,
    pub phi: usize,
}

impl ConditionReport {
    /// (A1)–(A3) and the sign of `φ` all hold on the samples.
    pub fn all_ok(&self) -> bool {
        self.a1_ok && self.a2_ok && self.a3_ok && self.phi_ok
    }

    pub fn witness(&self, condition: Condition) -> Option<&Witness> {
        self.witnesses.iter().find(|w| w.condition == condition)
    }
}

fn a2_map(pot: &Potential, s: f64, t: f64, r: f64) -> f64 {
    s * pot.a(t * r) - pot.grad_dot_x(t * r)
}

fn a3_map(pot: &Potential, t: f64, r: f64) -> f64 {
    t.powf(1.5) * pot.a(t * r)
}

/// `φ(t, r) = -t^{-s}[A(r) - A(tr)] + 2(t^{-s} - 1)/(3(p-2)) ∇A(r)·r` with
/// `s = 3(p-2)/2`; nonnegative whenever the (A2) map is nonincreasing.
pub fn phi(pot: &Potential, p: f64, t: f64, r: f64) -> f64 {
    let s = 1.5 * (p - 2.0);
    let ts = t.powf(-s);
    -ts * (pot.a(r) - pot.a(t * r)) + 2.0 * (ts - 1.0) / (3.0 * (p - 2.0)) * pot.grad_dot_x(r)
}

/// Default sample sets: 200 log-spaced scales on `[1e-2, 1e2]` and 100
/// radii evenly spread on `[rmax/100, rmax]`.
pub fn default_samples(rmax: f64) -> (Vec<f64>, Vec<f64>) {
    let t = log_space(1e-2, 1e2, 200);
    let r = (1..=100).map(|k| rmax * k as f64 / 100.0).collect();
    (t, r)
}

pub(crate) fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|k| {
            if k == 0 {
                lo
            } else if k == n - 1 {
                hi
            } else {
                (a + (b - a) * k as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

struct Tally {
    count: usize,
    worst: Option<Witness>,
}

impl Tally {
    fn new() -> Self {
        Self {
            count: 0,
            worst: None,
        }
    }

    fn record(&mut self, w: Witness) {
        self.count += 1;
        if self.worst.is_none_or(|old| w.magnitude > old.magnitude) {
            self.worst = Some(w);
        }
    }
}

/// Samples (A1)–(A3) and the sign of `φ` for exponent `p`.
///
/// Failures are reported in the returned data, never as errors; an error
/// means the sample sets themselves are unusable.
pub fn check_conditions(
    pot: &Potential,
    p: f64,
    t_samples: &[f64],
    r_samples: &[f64],
) -> Result<ConditionReport> {
    if !(p > 2.0 && p < 6.0) {
        return Err(Error::InvalidArgument(format!("exponent must lie in (2, 6), got {p}")));
    }
    if t_samples.len() < 2 || r_samples.is_empty() {
        return Err(Error::InvalidArgument("sample sets must be nonempty".into()));
    }
    if t_samples.windows(2).any(|w| w[1] <= w[0]) || t_samples[0] <= 0.0 {
        return Err(Error::InvalidArgument("scale samples must be positive and increasing".into()));
    }
    if t_samples[0] > 1e-2 || *t_samples.last().unwrap() < 1e2 {
        return Err(Error::InvalidArgument("scale samples must span [1e-2, 1e2]".into()));
    }
    if r_samples.iter().any(|&r| !(r >= 0.0)) {
        return Err(Error::InvalidArgument("radius samples must be nonnegative".into()));
    }

    let s = 1.5 * (p - 2.0);
    let a_inf = pot.a_inf;
    let mut a1 = Tally::new();
    let mut a2 = Tally::new();
    let mut a3 = Tally::new();
    let mut ph = Tally::new();
    let mut phi_min = f64::INFINITY;

    for &r in r_samples {
        let deficit = a_inf - pot.a(r);
        if deficit > 1e-12 * a_inf {
            a1.record(Witness {
                condition: Condition::A1Bound,
                t_prev: None,
                t: 1.0,
                r,
                magnitude: deficit,
            });
        }
    }
    let r_far = r_samples.iter().copied().fold(0.0, f64::max);
    let excess = (pot.a(r_far) - a_inf).abs() - FLATNESS_FRACTION * a_inf;
    if excess > 0.0 {
        a1.record(Witness {
            condition: Condition::A1Flat,
            t_prev: None,
            t: 1.0,
            r: r_far,
            magnitude: excess,
        });
    }

    let mut pairs = 0;
    for &r in r_samples {
        let mut prev: Option<(f64, f64, f64)> = None;
        for &t in t_samples {
            let g2 = a2_map(pot, s, t, r);
            let g3 = a3_map(pot, t, r);
            if let Some((t0, g2_0, g3_0)) = prev {
                pairs += 1;
                let rise = g2 - g2_0;
                if rise > CHECK_SLACK {
                    a2.record(Witness {
                        condition: Condition::A2,
                        t_prev: Some(t0),
                        t,
                        r,
                        magnitude: rise,
                    });
                }
                let drop = g3_0 - g3;
                if drop > CHECK_SLACK {
                    a3.record(Witness {
                        condition: Condition::A3,
                        t_prev: Some(t0),
                        t,
                        r,
                        magnitude: drop,
                    });
                }
            }
            prev = Some((t, g2, g3));

            let f = phi(pot, p, t, r);
            phi_min = phi_min.min(f);
            if f < -CHECK_SLACK {
                ph.record(Witness {
                    condition: Condition::Phi,
                    t_prev: None,
                    t,
                    r,
                    magnitude: -f,
                });
            }
        }
    }

    let witnesses = [&a1, &a2, &a3, &ph]
        .iter()
        .filter_map(|t| t.worst)
        .collect();
    Ok(ConditionReport {
        a1_ok: a1.count == 0,
        a2_ok: a2.count == 0,
        a3_ok: a3.count == 0,
        phi_ok: ph.count == 0,
        phi_min,
        witnesses,
        violation_counts: ViolationCounts {
            a1: a1.count,
            a2: a2.count,
            a3: a3.count,
            phi: ph.count,
        },
        t_samples: t_samples.len(),
        r_samples: r_samples.len(),
        pairs_tested: pairs,
    })
}
