use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::precond::Preconditioner;
use super::{check_subcritical, HistoryEntry, SolveConfig, SolveResult, RESTART_NOISE};
use crate::error::{Error, Result};
use crate::fiber::{check_supercritical, FiberMap, FiberScan};
use crate::functionals::{EnergyBreakdown, Operators};
use crate::grid::{gaussian_field, resample_scaled, GaussianParams, RadialField};
use crate::potential::log_space;

/// Steps shorter than this count as a stall.
const MIN_STEP: f64 = 1e-14;

/// Points in the width scan that seeds ansatz restarts.
const ANSATZ_SCAN: usize = 200;

/// At most this many ansatz local minima are added as restarts.
const ANSATZ_SEEDS: usize = 2;

struct Problem<'a> {
    cfg: &'a SolveConfig,
    ops: Operators,
    template: RadialField,
    scan: FiberScan,
}

struct Direction {
    d: Vec<f64>,
    grad_norm: f64,
}

/// Outcome of one descent run.
struct Run {
    u: Vec<f64>,
    value: f64,
    iterations: usize,
    history: Vec<HistoryEntry>,
    settled: bool,
}

impl<'a> Problem<'a> {
    fn new(cfg: &'a SolveConfig) -> Self {
        Self {
            cfg,
            ops: Operators::new(&cfg.grid, &cfg.pot, cfg.p),
            template: RadialField::zeros(cfg.grid.clone()),
            scan: FiberScan::default(),
        }
    }

    fn field(&self, values: Vec<f64>) -> RadialField {
        self.template.with_values(values)
    }

    fn normalize(&self, v: &mut [f64]) -> Result<()> {
        *v.last_mut().unwrap() = 0.0;
        let m = self.ops.mass(v);
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::DegenerateField("iterate lost its mass"));
        }
        let s = (self.cfg.c / m).sqrt();
        v.iter_mut().for_each(|x| *x *= s);
        Ok(())
    }

    fn breakdown(&self, u: &[f64]) -> EnergyBreakdown {
        self.ops.breakdown(u)
    }

    /// Preconditioned gradient projected onto the tangent space of the
    /// mass sphere, together with the stationarity measure
    /// `‖I'(u) + λu‖ / ((1 + |λ|)‖u‖)`.
    fn direction(&self, u: &[f64]) -> Direction {
        let ops = &self.ops;
        let n = u.len();
        let g = ops.partials(u);
        let d_mass = ops.mass(u);
        let lambda = -dot(&g, u) / d_mass;
        let mut res = 0.0;
        for i in 1..n - 1 {
            let r = g[i] / ops.vw[i] + lambda * u[i];
            res += ops.vw[i] * r * r;
        }
        let grad_norm = (res / d_mass).sqrt() / (1.0 + lambda.abs());

        let rmax = self.cfg.grid.rmax();
        let alpha = lambda.max(0.0) + 1.0 / (rmax * rmax);
        let pc = Preconditioner::new(ops, alpha);
        let mut d = pc.solve(&g);
        let mu: Vec<f64> = ops.vw.iter().zip(u).map(|(w, x)| w * x).collect();
        let z = pc.solve(&mu);
        let coef = dot(&d, &mu) / dot(&z, &mu);
        d.iter_mut().zip(&z).for_each(|(a, b)| *a -= coef * b);
        Direction { d, grad_norm }
    }

    fn retract(&self, u: &[f64], d: &[f64], eta: f64) -> Result<Vec<f64>> {
        let mut v: Vec<f64> = u.iter().zip(d).map(|(a, b)| a - eta * b).collect();
        self.normalize(&mut v)?;
        Ok(v)
    }

    /// `(J(w), t_w)` with `J(w) = max_t I(w^t)`.
    fn reduced(&self, w: &[f64]) -> Result<(f64, f64)> {
        let map = FiberMap::from_operators(&self.ops, w, &self.cfg.pot);
        let prof = map.find_root(&self.scan)?;
        let t = prof.t_star.expect("find_root returns a root");
        Ok((map.energy_unchecked(t), t))
    }

    /// `u^t` renormalized to mass `c`.
    fn project(&self, u: &[f64], t: f64) -> Result<Vec<f64>> {
        let mut v = resample_scaled(&self.field(u.to_vec()), t)?.into_values();
        self.normalize(&mut v)?;
        Ok(v)
    }

    fn minimize(&self, mut u: Vec<f64>) -> Result<Run> {
        let cfg = self.cfg;
        self.normalize(&mut u)?;
        let mut e = self.breakdown(&u).energy;
        let mut history = Vec::new();
        if !e.is_finite() {
            return Err(Error::Divergence { iteration: 0, history });
        }
        let mut eta = cfg.step0;
        let mut settled = false;
        for it in 0..cfg.max_iter {
            let dir = self.direction(&u);
            if !dir.grad_norm.is_finite() {
                return Err(Error::Divergence { iteration: it, history });
            }
            if dir.grad_norm <= cfg.grad_tol {
                settled = true;
                break;
            }
            let accepted = loop {
                let v = self.retract(&u, &dir.d, eta)?;
                let ev = self.breakdown(&v);
                if !ev.energy.is_finite() {
                    return Err(Error::Divergence { iteration: it, history });
                }
                if ev.energy <= e {
                    break Some((v, ev));
                }
                eta *= 0.5;
                if eta < MIN_STEP {
                    break None;
                }
            };
            let Some((v, ev)) = accepted else { break };
            history.push(HistoryEntry {
                energy: ev.energy,
                poho: ev.pohozaev.abs(),
                step: eta,
            });
            u = v;
            e = ev.energy;
            eta = (1.5 * eta).min(cfg.step0);
        }
        if !settled {
            settled = self.direction(&u).grad_norm <= cfg.grad_tol;
        }
        Ok(Run {
            iterations: history.len(),
            u,
            value: e,
            history,
            settled,
        })
    }

    /// Alternates projection onto the Pohozaev manifold with a descent step
    /// on `J`; the returned run holds the final projected iterate.
    fn minimax(&self, mut u: Vec<f64>) -> Result<Run> {
        let cfg = self.cfg;
        self.normalize(&mut u)?;
        let (_, mut t) = self.reduced(&u)?;
        let mut history = Vec::new();
        let mut eta = cfg.step0;
        let mut settled = false;
        for it in 0..cfg.max_iter {
            let v = self.project(&u, t)?;
            let (jv, _) = self.reduced(&v)?;
            if !jv.is_finite() {
                return Err(Error::Divergence { iteration: it, history });
            }
            let dir = self.direction(&v);
            let accepted = loop {
                let w = self.retract(&v, &dir.d, eta)?;
                let (jw, tw) = self.reduced(&w)?;
                if !jw.is_finite() {
                    return Err(Error::Divergence { iteration: it, history });
                }
                if jw <= jv {
                    break Some((w, jw, tw));
                }
                eta *= 0.5;
                if eta < MIN_STEP {
                    break None;
                }
            };
            let Some((w, jw, tw)) = accepted else {
                // no descent direction left at the resolution of J
                u = v;
                t = 1.0;
                settled = true;
                break;
            };
            history.push(HistoryEntry {
                energy: jw,
                poho: self.breakdown(&v).pohozaev.abs(),
                step: eta,
            });
            u = w;
            t = tw;
            eta = (1.5 * eta).min(cfg.step0);
            if (jv - jw).abs() <= cfg.grad_tol * (1.0 + jw.abs()) {
                settled = true;
                break;
            }
        }
        let v = if t == 1.0 { u } else { self.project(&u, t)? };
        let (value, _) = self.reduced(&v)?;
        Ok(Run {
            iterations: history.len(),
            u: v,
            value,
            history,
            settled,
        })
    }

    fn run(&self, u0: Vec<f64>) -> Result<Run> {
        if self.cfg.p < crate::fiber::L2_CRITICAL {
            self.minimize(u0)
        } else {
            self.minimax(u0)
        }
    }

    fn finish(&self, run: Run, restart_values: Vec<f64>) -> Result<SolveResult> {
        let (energy, diag) = self.ops.multiplier(&run.u)?;
        let grad_norm = self.direction(&run.u).grad_norm;
        let poho_residual = energy.poho_residual();
        Ok(SolveResult {
            converged: run.settled && poho_residual <= self.cfg.poho_tol,
            u: self.field(run.u),
            energy,
            lambda: diag.lambda,
            residual_h1: diag.residual_h1,
            poho_residual,
            grad_norm,
            iterations: run.iterations,
            history: run.history,
            restart_values,
        })
    }

    fn gaussian(&self, sigma: f64) -> Result<Vec<f64>> {
        let params = GaussianParams::new(sigma, self.cfg.c)?;
        Ok(gaussian_field(params, &self.cfg.grid)?.into_values())
    }

    /// Objective of the Gaussian of width `sigma`: `I` below the critical
    /// exponent, `max_t I` above it.
    fn ansatz_value(&self, sigma: f64) -> Result<f64> {
        let u = self.gaussian(sigma)?;
        if self.cfg.p < crate::fiber::L2_CRITICAL {
            Ok(self.breakdown(&u).energy)
        } else {
            Ok(self.reduced(&u)?.0)
        }
    }

    /// Widths of the interior local minima of the Gaussian-ansatz energy,
    /// lowest first.
    fn ansatz_minima(&self) -> Vec<f64> {
        let grid = &self.cfg.grid;
        let lo = 2.0 * grid.step(0);
        let hi = grid.rmax() / 6.0;
        let scan: Vec<(f64, f64)> = log_space(lo, hi, ANSATZ_SCAN)
            .into_iter()
            .filter_map(|s| self.ansatz_value(s).ok().map(|e| (s, e)))
            .collect();
        let mut minima: Vec<(f64, f64)> = scan
            .windows(3)
            .filter(|w| w[1].1 < w[0].1 && w[1].1 < w[2].1)
            .map(|w| w[1])
            .collect();
        minima.sort_by(|a, b| a.1.total_cmp(&b.1));
        minima.into_iter().take(ANSATZ_SEEDS).map(|(s, _)| s).collect()
    }

    fn initial_states(&self) -> Result<Vec<Vec<f64>>> {
        let cfg = self.cfg;
        let mut widths = if cfg.restarts == 1 {
            vec![1.0]
        } else {
            log_space(0.5, 4.0, cfg.restarts)
        };
        if cfg.ansatz_seeds && cfg.p < crate::fiber::L2_CRITICAL {
            widths.extend(self.ansatz_minima());
        }
        let mut states = Vec::new();
        let mut last_err = None;
        for (k, &sigma) in widths.iter().enumerate() {
            match self.gaussian(sigma) {
                Ok(mut u) => {
                    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(k as u64));
                    for x in u.iter_mut() {
                        *x *= 1.0 + RESTART_NOISE * rng.gen_range(-1.0..=1.0);
                    }
                    states.push(u);
                }
                Err(e) => last_err = Some(e),
            }
        }
        match (states.is_empty(), last_err) {
            (true, Some(e)) => Err(e),
            _ => Ok(states),
        }
    }

    fn best_of(&self, starts: Vec<Vec<f64>>) -> Result<SolveResult> {
        let mut best: Option<Run> = None;
        let mut values = Vec::new();
        let mut first_err = None;
        for u0 in starts {
            match self.run(u0) {
                Ok(run) => {
                    values.push(run.value);
                    if best.as_ref().is_none_or(|b| run.value < b.value) {
                        best = Some(run);
                    }
                }
                Err(e) => {
                    values.push(f64::NAN);
                    first_err.get_or_insert(e);
                }
            }
        }
        match best {
            Some(run) => self.finish(run, values),
            None => Err(first_err.expect("at least one start")),
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Approximates `γ(c) = inf_{S(c)} I` for `2 < p < 10/3`, `p ≠ 3`.
///
/// Each restart is a monotone descent: the energy history of the winning
/// run never increases.
pub fn solve_subcritical(cfg: &SolveConfig) -> Result<SolveResult> {
    cfg.validate()?;
    check_subcritical(cfg.p)?;
    let prob = Problem::new(cfg);
    prob.best_of(prob.initial_states()?)
}

/// Approximates `m(c) = inf_{S(c)} max_t I(u^t)` for `10/3 < p < 6`.
///
/// The reported field is the final iterate projected onto the Pohozaev
/// manifold, so `energy.I` is the min–max value.
pub fn solve_supercritical(cfg: &SolveConfig) -> Result<SolveResult> {
    cfg.validate()?;
    check_supercritical(cfg.p)?;
    let prob = Problem::new(cfg);
    prob.best_of(prob.initial_states()?)
}

/// Like the restart solvers, but also tries `init` (rescaled to mass `c`).
/// With `restarts_too = false` only `init` is used.
pub fn solve_with_initial(cfg: &SolveConfig, init: &RadialField, restarts_too: bool) -> Result<SolveResult> {
    cfg.validate()?;
    if cfg.p < crate::fiber::L2_CRITICAL {
        check_subcritical(cfg.p)?;
    } else {
        check_supercritical(cfg.p)?;
    }
    crate::grid::check_len(init.len(), cfg.grid.len())?;
    let prob = Problem::new(cfg);
    let mut starts = vec![init.values().to_vec()];
    if restarts_too {
        starts.extend(prob.initial_states()?);
    }
    prob.best_of(starts)
}

/// Lowest Gaussian-ansatz objective over the given widths, with the width
/// that attains it. Widths the grid cannot resolve are skipped.
pub fn gaussian_ansatz_bound(cfg: &SolveConfig, widths: &[f64]) -> Result<(f64, f64)> {
    cfg.validate()?;
    let prob = Problem::new(cfg);
    widths
        .iter()
        .filter_map(|&s| prob.ansatz_value(s).ok().map(|e| (e, s)))
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .ok_or_else(|| Error::InvalidArgument("no resolvable width in the ansatz scan".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, Spacing};
    use crate::potential::Potential;
    use std::sync::Arc;

    fn cfg(p: f64, c: f64, n: usize, rmax: f64) -> SolveConfig {
        let grid = Arc::new(make_grid(n, rmax, Spacing::Uniform).unwrap());
        SolveConfig::new(c, p, Potential::constant(1.0).unwrap(), grid)
    }

    #[test]
    fn rejects_unsupported_exponents() {
        let c = cfg(3.0, 1.0, 257, 20.0);
        assert!(matches!(solve_subcritical(&c), Err(Error::UnsupportedExponent { .. })));
        let c = cfg(4.0, 1.0, 257, 20.0);
        assert!(matches!(solve_subcritical(&c), Err(Error::UnsupportedExponent { .. })));
        let c = cfg(3.2, 1.0, 257, 20.0);
        assert!(matches!(solve_supercritical(&c), Err(Error::UnsupportedExponent { .. })));
    }

    #[test]
    fn descent_keeps_mass_and_never_climbs() {
        let mut c = cfg(2.5, 1.0, 513, 30.0);
        c.restarts = 2;
        c.max_iter = 300;
        c.ansatz_seeds = false;
        let res = solve_subcritical(&c).unwrap();
        assert!((crate::functionals::mass(&res.u) - 1.0).abs() < 1e-12);
        for w in res.history.windows(2) {
            assert!(w[1].energy <= w[0].energy);
        }
        assert!(res.energy.energy < 0.0);
        assert_eq!(res.restart_values.len(), 2);
    }

    #[test]
    fn same_seed_same_history() {
        let mut c = cfg(2.5, 1.0, 257, 30.0);
        c.restarts = 2;
        c.max_iter = 50;
        let a = solve_subcritical(&c).unwrap();
        let b = solve_subcritical(&c).unwrap();
        assert_eq!(a.history, b.history);
        assert_eq!(a.u.values(), b.u.values());
    }
}
