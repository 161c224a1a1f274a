//! Run configuration: TOML file, command-line flags on top, then defaults.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Spacing, MIN_NODES};
use crate::potential::Potential;
use crate::solver;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    CheckPotential,
    Energy,
    Fiber,
    Solve,
    Sweep,
    BracketCbar,
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::CheckPotential => "check-potential",
            Command::Energy => "energy",
            Command::Fiber => "fiber",
            Command::Solve => "solve",
            Command::Sweep => "sweep",
            Command::BracketCbar => "bracket-cbar",
            Command::Verify => "verify",
        }
    }

    /// Commands that run a solver and therefore reject `p = 3`.
    fn solves(self) -> bool {
        matches!(self, Command::Solve | Command::Sweep | Command::BracketCbar | Command::Verify)
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        <Command as ValueEnum>::from_str(s, false)
            .map_err(|_| Error::InvalidConfiguration(format!("unknown command '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

/// Grid spacing as configured. `auto` picks graded spacing for `p > 3`,
/// where ground states concentrate far below the uniform spacing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpacingChoice {
    Auto,
    Fixed(Spacing),
}

impl SpacingChoice {
    pub fn resolve(self, p: f64) -> Spacing {
        match self {
            SpacingChoice::Fixed(s) => s,
            SpacingChoice::Auto if p > 3.0 => Spacing::graded(),
            SpacingChoice::Auto => Spacing::Uniform,
        }
    }
}

impl FromStr for SpacingChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim() == "auto" {
            Ok(SpacingChoice::Auto)
        } else {
            s.parse().map(SpacingChoice::Fixed)
        }
    }
}

/// Command-line flags. Every flag overrides the corresponding config key.
#[derive(Debug, Default, Parser)]
#[command(name = "spn", version, about = "Normalized Schrödinger–Poisson solutions on radial grids")]
pub struct Flags {
    /// TOML configuration file
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub command: Option<Command>,
    /// Nonlinearity exponent in (2, 6)
    #[arg(long)]
    pub p: Option<f64>,
    /// Mass, or a comma-separated increasing list for `sweep`
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub c: Option<Vec<f64>>,
    /// constant[:a_inf], exp_bump[:amp[,tau]], rational_bump[:amp] or table:PATH
    #[arg(long, value_name = "SPEC")]
    pub potential: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub rmax: Option<f64>,
    /// uniform, graded[:stretch] or auto
    #[arg(long)]
    pub spacing: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub grad_tol: Option<f64>,
    #[arg(long)]
    pub poho_tol: Option<f64>,
    /// Lower mass for `bracket-cbar`
    #[arg(long)]
    pub c_lo: Option<f64>,
    /// Upper mass for `bracket-cbar`
    #[arg(long)]
    pub c_hi: Option<f64>,
    #[arg(long)]
    pub neg_tol: Option<f64>,
    /// Gaussian width used by `energy` and `fiber` when no input field is given
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Solve output (JSON) whose field `energy`, `fiber` and `verify` act on
    #[arg(long, value_name = "PATH")]
    pub input: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Run sweep masses concurrently (disables warm starts)
    #[arg(long)]
    pub parallel: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub problem: ProblemConfig,
    pub numerics: NumericsConfig,
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProblemConfig {
    pub p: f64,
    pub c: Vec<f64>,
    pub potential: String,
    pub c_lo: Option<f64>,
    pub c_hi: Option<f64>,
    pub neg_tol: f64,
    pub sigma: f64,
    pub input: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NumericsConfig {
    pub n: usize,
    pub rmax: f64,
    pub spacing: Spacing,
    pub grad_tol: f64,
    pub poho_tol: f64,
    pub max_iter: usize,
    pub step0: f64,
    pub restarts: usize,
    pub seed: u64,
    pub parallel: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputConfig {
    pub path: PathBuf,
    pub format: Format,
}

/// Known keys per section of the config file.
const TOP_KEYS: &[&str] = &["command", "problem", "numerics", "output"];
const PROBLEM_KEYS: &[&str] = &["p", "c", "potential", "c_lo", "c_hi", "neg_tol", "sigma", "input"];
const NUMERICS_KEYS: &[&str] = &[
    "n", "rmax", "spacing", "grad_tol", "poho_tol", "max_iter", "step0", "restarts", "seed", "parallel",
];
const OUTPUT_KEYS: &[&str] = &["path", "format"];

#[derive(Debug, Default, Deserialize)]
struct FileConfig {
    command: Option<String>,
    #[serde(default)]
    problem: FileProblem,
    #[serde(default)]
    numerics: FileNumerics,
    #[serde(default)]
    output: FileOutput,
}

#[derive(Debug, Default, Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    #[default]
    None,
    One(f64),
    Many(Vec<f64>),
}

#[derive(Debug, Default, Deserialize)]
struct FileProblem {
    p: Option<f64>,
    #[serde(default)]
    c: OneOrMany,
    potential: Option<String>,
    c_lo: Option<f64>,
    c_hi: Option<f64>,
    neg_tol: Option<f64>,
    sigma: Option<f64>,
    input: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
struct FileNumerics {
    n: Option<usize>,
    rmax: Option<f64>,
    spacing: Option<String>,
    grad_tol: Option<f64>,
    poho_tol: Option<f64>,
    max_iter: Option<usize>,
    step0: Option<f64>,
    restarts: Option<usize>,
    seed: Option<u64>,
    parallel: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
struct FileOutput {
    path: Option<PathBuf>,
    format: Option<Format>,
}

fn unknown_keys(table: &toml::Table) -> Vec<String> {
    let mut unknown = Vec::new();
    for (key, value) in table {
        let section = match key.as_str() {
            "problem" => PROBLEM_KEYS,
            "numerics" => NUMERICS_KEYS,
            "output" => OUTPUT_KEYS,
            k if TOP_KEYS.contains(&k) => continue,
            _ => {
                unknown.push(key.clone());
                continue;
            }
        };
        match value.as_table() {
            Some(t) => unknown.extend(
                t.keys()
                    .filter(|k| !section.contains(&k.as_str()))
                    .map(|k| format!("{key}.{k}")),
            ),
            None => unknown.push(format!("{key} (expected a section)")),
        }
    }
    unknown
}

fn read_file(path: &Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        Error::InvalidConfiguration(format!("cannot read config {}: {e}", path.display()))
    })?;
    parse_file(&text)
}

fn parse_file(text: &str) -> Result<FileConfig> {
    let table: toml::Table = text
        .parse()
        .map_err(|e| Error::InvalidConfiguration(format!("malformed config: {e}")))?;
    let unknown = unknown_keys(&table);
    if !unknown.is_empty() {
        return Err(Error::InvalidConfiguration(format!("unknown keys: {}", unknown.join(", "))));
    }
    FileConfig::deserialize(table).map_err(|e| Error::InvalidConfiguration(format!("config: {e}")))
}

fn out_of_range(field: &str, range: &str, value: impl fmt::Display) -> Error {
    Error::InvalidConfiguration(format!("{field} = {value} is out of range; expected {range}"))
}

/// Parses the potential spec; `table:PATH` loads a tabulated profile.
pub fn parse_potential(spec: &str) -> Result<Potential> {
    match spec.strip_prefix("table:") {
        Some(path) => Potential::from_file(path).map_err(|e| match e {
            Error::Io(io) => Error::InvalidConfiguration(format!("cannot read potential table {path}: {io}")),
            other => other,
        }),
        None => spec.parse(),
    }
}

/// Resolves a full [`RunConfig`] from flags and an optional config file.
pub fn parse_config(flags: &Flags) -> Result<RunConfig> {
    let file = match &flags.config {
        Some(path) => read_file(path)?,
        None => FileConfig::default(),
    };
    resolve(flags, file)
}

/// Resolves a config given as TOML text plus flags.
pub fn parse_config_str(text: &str, flags: &Flags) -> Result<RunConfig> {
    resolve(flags, parse_file(text)?)
}

fn resolve(flags: &Flags, file: FileConfig) -> Result<RunConfig> {
    let command = match (flags.command, &file.command) {
        (Some(c), _) => c,
        (None, Some(s)) => s.parse()?,
        (None, None) => return Err(Error::InvalidConfiguration("no command given".into())),
    };

    let fp = file.problem;
    let p = flags
        .p
        .or(fp.p)
        .ok_or_else(|| Error::InvalidConfiguration("problem.p is required".into()))?;
    if !(p > 2.0 && p < 6.0) {
        return Err(out_of_range("problem.p", "(2, 6)", p));
    }
    if p == 3.0 && command.solves() {
        return Err(Error::UnsupportedExponent {
            p,
            reason: "the Coulomb-Sobolev critical case p = 3 is not a supported solve target",
        });
    }
    let c = match (&flags.c, fp.c) {
        (Some(v), _) => v.clone(),
        (None, OneOrMany::One(x)) => vec![x],
        (None, OneOrMany::Many(v)) => v,
        (None, OneOrMany::None) => vec![1.0],
    };
    if c.is_empty() || c.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
        return Err(out_of_range("problem.c", "positive masses", format!("{c:?}")));
    }
    if c.windows(2).any(|w| w[1] <= w[0]) {
        return Err(out_of_range("problem.c", "a strictly increasing list", format!("{c:?}")));
    }
    if c.len() > 1 && command != Command::Sweep {
        return Err(Error::InvalidConfiguration(format!(
            "command {command} takes a single mass, got {}",
            c.len()
        )));
    }
    let potential = flags.potential.clone().or(fp.potential).unwrap_or_else(|| "constant".into());
    parse_potential(&potential)?;
    let neg_tol = flags.neg_tol.or(fp.neg_tol).unwrap_or(solver::DEFAULT_NEG_TOL);
    if !(neg_tol > 0.0) {
        return Err(out_of_range("problem.neg_tol", "(0, inf)", neg_tol));
    }
    let sigma = flags.sigma.or(fp.sigma).unwrap_or(1.0);
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(out_of_range("problem.sigma", "(0, inf)", sigma));
    }
    let c_lo = flags.c_lo.or(fp.c_lo);
    let c_hi = flags.c_hi.or(fp.c_hi);
    if command == Command::BracketCbar {
        for (name, v) in [("problem.c_lo", c_lo), ("problem.c_hi", c_hi)] {
            match v {
                None => return Err(Error::InvalidConfiguration(format!("{name} is required for bracket-cbar"))),
                Some(x) if !(x > 0.0 && x.is_finite()) => return Err(out_of_range(name, "(0, inf)", x)),
                _ => {}
            }
        }
    }
    let input = flags.input.clone().or(fp.input);
    if let Some(path) = &input {
        if !path.is_file() {
            return Err(Error::InvalidConfiguration(format!("input file {} does not exist", path.display())));
        }
    }

    let fnum = file.numerics;
    let n = flags.n.or(fnum.n).unwrap_or(2049);
    if n < MIN_NODES {
        return Err(out_of_range("numerics.n", &format!("[{MIN_NODES}, inf)"), n));
    }
    let rmax = flags.rmax.or(fnum.rmax).unwrap_or(40.0);
    if !(rmax > 0.0 && rmax.is_finite()) {
        return Err(out_of_range("numerics.rmax", "(0, inf)", rmax));
    }
    let spacing: SpacingChoice = match flags.spacing.as_deref().or(fnum.spacing.as_deref()) {
        Some(s) => s.parse()?,
        None => SpacingChoice::Auto,
    };
    let grad_tol = flags.grad_tol.or(fnum.grad_tol).unwrap_or(solver::DEFAULT_GRAD_TOL);
    let poho_tol = flags.poho_tol.or(fnum.poho_tol).unwrap_or(solver::DEFAULT_POHO_TOL);
    let step0 = fnum.step0.unwrap_or(1.0);
    for (name, v) in [("numerics.grad_tol", grad_tol), ("numerics.poho_tol", poho_tol), ("numerics.step0", step0)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(out_of_range(name, "(0, inf)", v));
        }
    }
    let max_iter = flags.max_iter.or(fnum.max_iter).unwrap_or(solver::DEFAULT_MAX_ITER);
    if max_iter == 0 {
        return Err(out_of_range("numerics.max_iter", "[1, inf)", max_iter));
    }
    let restarts = flags.restarts.or(fnum.restarts).unwrap_or(solver::DEFAULT_RESTARTS);
    if restarts == 0 {
        return Err(out_of_range("numerics.restarts", "[1, inf)", restarts));
    }
    let seed = flags.seed.or(fnum.seed).unwrap_or(solver::DEFAULT_SEED);
    let parallel = flags.parallel || fnum.parallel.unwrap_or(false);

    let fout = file.output;
    let format = flags.format.or(fout.format).unwrap_or(match command {
        Command::Sweep | Command::Fiber => Format::Csv,
        _ => Format::Json,
    });
    if format == Format::Csv
        && !matches!(command, Command::Sweep | Command::Fiber | Command::Solve)
    {
        return Err(Error::InvalidConfiguration(format!("command {command} only writes json")));
    }
    let path = flags
        .out
        .clone()
        .or(fout.path)
        .unwrap_or_else(|| PathBuf::from(format!("{command}.{}", format.extension())));

    Ok(RunConfig {
        command,
        problem: ProblemConfig {
            p,
            c,
            potential,
            c_lo,
            c_hi,
            neg_tol,
            sigma,
            input,
        },
        numerics: NumericsConfig {
            n,
            rmax,
            spacing: spacing.resolve(p),
            grad_tol,
            poho_tol,
            max_iter,
            step0,
            restarts,
            seed,
            parallel,
        },
        output: OutputConfig { path, format },
    })
}
