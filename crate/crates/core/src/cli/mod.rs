//! Command-line front end.
//!
//! Results go only to the output file. Standard output gets a single
//! summary line, and diagnostics go to standard error. Exit status is 0 on
//! success, 1 when the numerical problem itself fails (bad bracket, no
//! fiber root, divergence) and 2 for configuration errors.

mod config;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use config::{parse_config, parse_config_str, parse_potential, Command, Flags, Format, RunConfig};

use crate::error::{Error, Result};
use crate::fiber::{check_supercritical, FiberMap, FiberScan};
use crate::functionals::{
    coercivity_diagnostic, extract_multiplier, gn_diagnostic, EnergyBreakdown, MultiplierDiagnostics,
};
use crate::grid::{gaussian_field, make_grid, GaussianParams, RadialField, RadialGrid};
use crate::potential::{check_conditions, default_samples, ConditionReport, Potential};
use crate::solver::{
    self, bracket_cbar, sweep_gamma, sweep_m, verify_solution, CbarBracket, SolveConfig, SolveResult,
    SweepOptions, SweepRecord, VerifyReport,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

/// Exit status for an error.
pub fn exit_code(err: &Error) -> i32 {
    if err.is_domain() {
        EXIT_DOMAIN
    } else {
        EXIT_CONFIG
    }
}

/// Sampled field, as written to and read from solve output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSamples {
    pub r: Vec<f64>,
    pub u: Vec<f64>,
}

#[derive(Debug, Serialize)]
struct SolveOutput<'a> {
    config_echo: &'a RunConfig,
    energy: EnergyBreakdown,
    lambda: f64,
    residual_h1: f64,
    poho_residual: f64,
    iterations: usize,
    converged: bool,
    field: FieldSamples,
}

/// The part of a solve output that `--input` reads back.
#[derive(Debug, Deserialize)]
struct SolveInput {
    field: FieldSamples,
}

#[derive(Debug, Serialize)]
struct EnergyOutput<'a> {
    config_echo: &'a RunConfig,
    energy: EnergyBreakdown,
    multiplier: MultiplierDiagnostics,
    coercivity: f64,
    gagliardo_nirenberg: f64,
}

#[derive(Debug, Serialize)]
struct CheckOutput<'a> {
    config_echo: &'a RunConfig,
    #[serde(flatten)]
    report: ConditionReport,
}

#[derive(Debug, Serialize)]
struct FiberOutput<'a> {
    config_echo: &'a RunConfig,
    t_values: &'a [f64],
    omega: &'a [f64],
    omega_prime: &'a [f64],
    t_star: Option<f64>,
    sign_changes: usize,
}

#[derive(Debug, Serialize)]
struct SweepOutput<'a, R> {
    config_echo: &'a RunConfig,
    report: R,
}

#[derive(Debug, Serialize)]
struct BracketOutput<'a> {
    config_echo: &'a RunConfig,
    #[serde(flatten)]
    bracket: CbarBracket,
}

#[derive(Debug, Serialize)]
struct VerifyOutput<'a> {
    config_echo: &'a RunConfig,
    #[serde(flatten)]
    report: VerifyReport,
}

struct Context {
    pot: Potential,
    grid: Arc<RadialGrid>,
}

impl Context {
    fn new(cfg: &RunConfig) -> Result<Self> {
        let pot = parse_potential(&cfg.problem.potential)?;
        let grid = Arc::new(make_grid(cfg.numerics.n, cfg.numerics.rmax, cfg.numerics.spacing)?);
        Ok(Self { pot, grid })
    }

    fn solve_config(&self, cfg: &RunConfig, c: f64) -> SolveConfig {
        let mut s = SolveConfig::new(c, cfg.problem.p, self.pot.clone(), Arc::clone(&self.grid));
        s.max_iter = cfg.numerics.max_iter;
        s.step0 = cfg.numerics.step0;
        s.grad_tol = cfg.numerics.grad_tol;
        s.poho_tol = cfg.numerics.poho_tol;
        s.restarts = cfg.numerics.restarts;
        s.seed = cfg.numerics.seed;
        s
    }

    /// The `--input` field, or a Gaussian of width `sigma` and mass `c`.
    fn field(&self, cfg: &RunConfig) -> Result<RadialField> {
        match &cfg.problem.input {
            Some(path) => read_field(path, &self.grid),
            None => gaussian_field(GaussianParams::new(cfg.problem.sigma, cfg.problem.c[0])?, &self.grid),
        }
    }
}

fn read_field(path: &Path, grid: &Arc<RadialGrid>) -> Result<RadialField> {
    let text = std::fs::read_to_string(path)?;
    let parsed: SolveInput = serde_json::from_str(&text)
        .map_err(|e| Error::InvalidConfiguration(format!("{}: {e}", path.display())))?;
    let FieldSamples { r, u } = parsed.field;
    let same_grid = r.len() == grid.len()
        && r.iter().zip(grid.nodes()).all(|(a, b)| (a - b).abs() <= 1e-12 * (1.0 + b.abs()));
    if !same_grid {
        return Err(Error::InvalidConfiguration(format!(
            "{}: field grid does not match the configured grid",
            path.display()
        )));
    }
    RadialField::new(Arc::clone(grid), u)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(std::io::Error::from)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn write_sweep_csv(path: &Path, records: &[SweepRecord]) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "c,value,lambda,poho_residual,gradnorm_B,converged")?;
    for r in records {
        writeln!(
            w,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
            r.c, r.value, r.lambda, r.poho_residual, r.gradnorm_b, r.converged
        )?;
    }
    w.flush()?;
    Ok(())
}

fn write_field_csv(path: &Path, u: &RadialField) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "r,u")?;
    for (r, v) in u.grid().nodes().iter().zip(u.values()) {
        writeln!(w, "{r:.16e},{v:.16e}")?;
    }
    w.flush()?;
    Ok(())
}

fn solve_one(ctx: &Context, cfg: &RunConfig) -> Result<SolveResult> {
    let scfg = ctx.solve_config(cfg, cfg.problem.c[0]);
    if cfg.problem.p < crate::fiber::L2_CRITICAL {
        solver::solve_subcritical(&scfg)
    } else {
        solver::solve_supercritical(&scfg)
    }
}

/// Runs one command; returns the summary line for standard output.
pub fn run(cfg: &RunConfig) -> Result<String> {
    let ctx = Context::new(cfg)?;
    let out = &cfg.output.path;
    let p = cfg.problem.p;
    let summary = match cfg.command {
        Command::CheckPotential => {
            let (t, r) = default_samples(cfg.numerics.rmax);
            let report = check_conditions(&ctx.pot, p, &t, &r)?;
            let line = format!(
                "check-potential: A1={} A2={} A3={} phi={}",
                report.a1_ok, report.a2_ok, report.a3_ok, report.phi_ok
            );
            write_json(out, &CheckOutput { config_echo: cfg, report })?;
            line
        }
        Command::Energy => {
            let u = ctx.field(cfg)?;
            let energy = crate::functionals::energy(&u, &ctx.pot, p)?;
            let multiplier = extract_multiplier(&u, &ctx.pot, p)?;
            let output = EnergyOutput {
                config_echo: cfg,
                energy,
                multiplier,
                coercivity: coercivity_diagnostic(&u)?,
                gagliardo_nirenberg: gn_diagnostic(&u, &ctx.pot, p)?,
            };
            write_json(out, &output)?;
            format!("energy: I={:e} P={:e}", energy.energy, energy.pohozaev)
        }
        Command::Fiber => {
            let u = ctx.field(cfg)?;
            let map = FiberMap::new(&u, &ctx.pot, p)?;
            let scan = FiberScan::default();
            let profile = map.profile(&scan)?;
            match cfg.output.format {
                Format::Csv => {
                    let mut w = create(out)?;
                    profile.write_csv(&mut w)?;
                    w.flush()?;
                }
                Format::Json => write_json(
                    out,
                    &FiberOutput {
                        config_echo: cfg,
                        t_values: &profile.t_values,
                        omega: &profile.omega,
                        omega_prime: &profile.omega_prime,
                        t_star: profile.t_star,
                        sign_changes: profile.sign_changes,
                    },
                )?,
            }
            // the supercritical contract requires a root; the profile is
            // written either way
            if check_supercritical(p).is_ok() && profile.t_star.is_none() {
                return Err(Error::FiberRootNotFound {
                    t_min: scan.t_min,
                    t_max: scan.t_max,
                    profile: Box::new(profile),
                });
            }
            match profile.t_star {
                Some(t) => format!("fiber: t_u={t:e} sign_changes={}", profile.sign_changes),
                None => format!("fiber: no maximizer, sign_changes={}", profile.sign_changes),
            }
        }
        Command::Solve => {
            let res = solve_one(&ctx, cfg)?;
            match cfg.output.format {
                Format::Json => write_json(out, &solve_output(cfg, &res))?,
                Format::Csv => write_field_csv(out, &res.u)?,
            }
            format!(
                "solve: I={:e} lambda={:e} poho_residual={:e} converged={}",
                res.energy.energy, res.lambda, res.poho_residual, res.converged
            )
        }
        Command::Sweep => {
            let scfg = ctx.solve_config(cfg, cfg.problem.c[0]);
            let opts = SweepOptions {
                parallel: cfg.numerics.parallel,
                ..SweepOptions::default()
            };
            let (records, line) = if p < crate::fiber::L2_CRITICAL {
                let rep = sweep_gamma(&scfg, &cfg.problem.c, &opts)?;
                let line = format!(
                    "sweep: {} records, {} subadditivity violations, {} ratio violations",
                    rep.records.len(),
                    rep.subadditivity_violations.len(),
                    rep.ratio_monotonicity_violations.len()
                );
                if cfg.output.format == Format::Json {
                    write_json(out, &SweepOutput { config_echo: cfg, report: &rep })?;
                }
                (rep.records, line)
            } else {
                let rep = sweep_m(&scfg, &cfg.problem.c, &opts)?;
                let line = format!(
                    "sweep: {} records, positive={}, {} monotonicity violations",
                    rep.records.len(),
                    rep.all_positive,
                    rep.monotonicity_violations.len()
                );
                if cfg.output.format == Format::Json {
                    write_json(out, &SweepOutput { config_echo: cfg, report: &rep })?;
                }
                (rep.records, line)
            };
            if cfg.output.format == Format::Csv {
                write_sweep_csv(out, &records)?;
            }
            line
        }
        Command::BracketCbar => {
            let scfg = ctx.solve_config(cfg, cfg.problem.c[0]);
            let (lo, hi) = (cfg.problem.c_lo.unwrap(), cfg.problem.c_hi.unwrap());
            let bracket = bracket_cbar(&scfg, lo, hi, cfg.problem.neg_tol)?;
            let line = format!("bracket-cbar: [{:e}, {:e}]", bracket.lo, bracket.hi);
            write_json(out, &BracketOutput { config_echo: cfg, bracket })?;
            line
        }
        Command::Verify => {
            let scfg = ctx.solve_config(cfg, cfg.problem.c[0]);
            let res = match &cfg.problem.input {
                Some(path) => SolveResult::unsolved(read_field(path, &ctx.grid)?, &scfg)?,
                None => solve_one(&ctx, cfg)?,
            };
            let report = verify_solution(&res, &scfg)?;
            let line = format!(
                "verify: poho_rel={:e} identity_gap={:e} residual_h1={:e}",
                report.poho_rel, report.identity_gap, report.residual_h1
            );
            write_json(out, &VerifyOutput { config_echo: cfg, report })?;
            line
        }
    };
    Ok(format!("{summary} -> {}", out.display()))
}

fn solve_output<'a>(cfg: &'a RunConfig, res: &SolveResult) -> SolveOutput<'a> {
    SolveOutput {
        config_echo: cfg,
        energy: res.energy,
        lambda: res.lambda,
        residual_h1: res.residual_h1,
        poho_residual: res.poho_residual,
        iterations: res.iterations,
        converged: res.converged,
        field: FieldSamples {
            r: res.u.grid().nodes().to_vec(),
            u: res.u.values().to_vec(),
        },
    }
}

/// Parses arguments, runs, reports; returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    use clap::Parser;
    let flags = match Flags::try_parse_from(args) {
        Ok(f) => f,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let outcome = parse_config(&flags).and_then(|cfg| run(&cfg));
    match outcome {
        Ok(line) => {
            println!("{line}");
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
