//! Resolved run configuration: flags override the config file, which
//! overrides the defaults.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use polyzeta::riemann::{DEFAULT_N_MAX, DEFAULT_PRIME_LIMIT, T_MAX_SUPPORTED};
use polyzeta::sierra_model::SierraConvention;
use serde::Serialize;

use crate::error::{CliError, CliResult};

pub const DEFAULT_MU0: f64 = 0.01;
pub const DEFAULT_THETA: f64 = 0.0;
pub const DEFAULT_HBAR: f64 = 1.0;
pub const DEFAULT_E_MIN: f64 = 20.0;
pub const DEFAULT_E_MAX: f64 = 100.0;
pub const DEFAULT_N_POINTS: usize = 9;
/// Default bk boundary momentum for `spectrum`: a small angle `μ₀m₂`, where
/// the small-μ₀ expansion is defined.
pub const DEFAULT_BK_M2: f64 = 1.0;
/// Default bk `m₂` for `validate`, as a fraction of the branch end `πħ/μ₀`.
/// Small angles make the ODE and the stencil stiff near `m₂`.
pub const DEFAULT_VALIDATE_M2_FRACTION: f64 = 0.9;
/// Default Sierra boundary angle `μ₀p₂`.
pub const DEFAULT_SIERRA_M2: f64 = 2.0;
pub const SEED_VAR: &str = "POLYZETA_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Zeros,
    Count,
    Spectrum,
    Validate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    Bk,
    Sierra,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

/// How the Sierra boundary momentum `m₂` is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ConventionArg {
    /// `m₂` is a momentum, weight `csc(m₂)/Δ`.
    Printed,
    /// `m₂` is the angle `μ₀p₂`, weight `1/(Δ √sin m₂)`.
    ScaledAngle,
}

impl ConventionArg {
    pub fn convention(self) -> SierraConvention {
        match self {
            ConventionArg::Printed => SierraConvention::Printed,
            ConventionArg::ScaledAngle => SierraConvention::ScaledAngle,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "polyzeta", version, about = "Polymer xp and Sierra models against the Riemann zeros")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandArg,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum CommandArg {
    /// Zeta zeros below --emax: index, ordinate, |Z| at the ordinate.
    Zeros,
    /// Counting functions side by side on the energy grid.
    Count,
    /// Closed-form, expanded and shot levels n = 0..npoints-1.
    Spectrum,
    /// Run every invariant check and report the consistency findings.
    Validate,
}

impl From<CommandArg> for Command {
    fn from(c: CommandArg) -> Self {
        match c {
            CommandArg::Zeros => Command::Zeros,
            CommandArg::Count => Command::Count,
            CommandArg::Spectrum => Command::Spectrum,
            CommandArg::Validate => Command::Validate,
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// Polymer scale μ₀ (default 0.01; 0 allowed for count).
    #[arg(long, global = true)]
    pub mu0: Option<f64>,
    /// Position cutoff l_x (default √(2π)).
    #[arg(long, global = true)]
    pub lx: Option<f64>,
    /// Momentum cutoff l_p (default √(2π)).
    #[arg(long, global = true)]
    pub lp: Option<f64>,
    /// Self-adjoint extension angle θ (default 0).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    /// Boundary momentum m₂ (bk default 1, or 0.9πħ/μ₀ for validate; sierra default 2).
    #[arg(long, global = true)]
    pub m2: Option<f64>,
    /// ħ (default 1; the sierra model requires 1).
    #[arg(long, global = true)]
    pub hbar: Option<f64>,
    /// Lower end of the count grid (default 20).
    #[arg(long, global = true)]
    pub emin: Option<f64>,
    /// Upper end of the count grid, or zero height for zeros (default 100).
    #[arg(long, global = true)]
    pub emax: Option<f64>,
    /// Grid points for count, levels for spectrum (default 9).
    #[arg(long, global = true)]
    pub npoints: Option<usize>,
    /// Largest prime in the fluctuation sum (default 10000).
    #[arg(long = "prime-limit", global = true)]
    pub prime_limit: Option<u64>,
    /// Largest prime power in the fluctuation sum (default 10).
    #[arg(long, global = true)]
    pub nmax: Option<u32>,
    /// Model for spectrum and validate (default bk).
    #[arg(long, global = true, value_enum)]
    pub model: Option<Model>,
    /// Output format (default csv; json for validate).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Flat `key = value` file; flags take precedence over it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Reading of the sierra m₂ (default scaled-angle).
    #[arg(long = "sierra-convention", global = true, value_enum)]
    pub sierra_convention: Option<ConventionArg>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub mu0: f64,
    pub lx: f64,
    pub lp: f64,
    pub theta: f64,
    pub m2: f64,
    pub hbar: f64,
    pub e_min: f64,
    pub e_max: f64,
    pub n_points: usize,
    pub prime_limit: u64,
    pub n_max: u32,
    pub model: Model,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub sierra_convention: ConventionArg,
    /// Echo of `POLYZETA_SEED`; nothing is random yet.
    pub seed: Option<String>,
}

fn input(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

/// Parses a flat `key = value` file. `#` starts a comment.
pub fn parse_config_text(text: &str) -> CliResult<Overrides> {
    let mut seen = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| input(format!("config line {}: expected key = value", i + 1)))?;
        let key = key.trim().replace('_', "-");
        if seen.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(input(format!("config line {}: duplicate key {key}", i + 1)));
        }
    }
    let mut o = Overrides::default();
    for (key, value) in &seen {
        let num = || -> CliResult<f64> {
            value.parse().map_err(|_| input(format!("config key {key}: not a number: {value}")))
        };
        match key.as_str() {
            "mu0" => o.mu0 = Some(num()?),
            "lx" => o.lx = Some(num()?),
            "lp" => o.lp = Some(num()?),
            "theta" => o.theta = Some(num()?),
            "m2" => o.m2 = Some(num()?),
            "hbar" => o.hbar = Some(num()?),
            "emin" => o.emin = Some(num()?),
            "emax" => o.emax = Some(num()?),
            "npoints" => o.npoints = Some(parse_int(key, value)?),
            "prime-limit" => o.prime_limit = Some(parse_int(key, value)?),
            "nmax" => o.nmax = Some(parse_int(key, value)?),
            "model" => o.model = Some(parse_enum(key, value)?),
            "format" => o.format = Some(parse_enum(key, value)?),
            "out" => o.out = Some(PathBuf::from(value)),
            "sierra-convention" => o.sierra_convention = Some(parse_enum(key, value)?),
            _ => return Err(input(format!("unknown config key {key}"))),
        }
    }
    Ok(o)
}

fn parse_int<T: std::str::FromStr>(key: &str, value: &str) -> CliResult<T> {
    value.parse().map_err(|_| input(format!("config key {key}: not an integer: {value}")))
}

fn parse_enum<T: ValueEnum>(key: &str, value: &str) -> CliResult<T> {
    T::from_str(value, true).map_err(|_| input(format!("config key {key}: invalid value {value}")))
}

pub fn read_config_file(path: &Path) -> CliResult<Overrides> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| input(format!("cannot read config {}: {e}", path.display())))?;
    parse_config_text(&text)
}

impl RunConfig {
    /// Layers flags over the file over the defaults, then validates.
    pub fn resolve(command: Command, flags: &Overrides, seed: Option<String>) -> CliResult<Self> {
        let file = match &flags.config {
            Some(p) => read_config_file(p)?,
            None => Overrides::default(),
        };
        macro_rules! pick {
            ($f:ident, $default:expr) => {
                flags.$f.clone().or(file.$f.clone()).unwrap_or($default)
            };
        }
        let planck = (2.0 * PI).sqrt();
        let model = pick!(model, Model::Bk);
        let mu0 = pick!(mu0, DEFAULT_MU0);
        let hbar = pick!(hbar, DEFAULT_HBAR);
        let default_m2 = match model {
            Model::Bk if command == Command::Validate => DEFAULT_VALIDATE_M2_FRACTION * PI * hbar / mu0,
            Model::Bk => DEFAULT_BK_M2,
            Model::Sierra => DEFAULT_SIERRA_M2,
        };
        let cfg = RunConfig {
            command,
            mu0,
            lx: pick!(lx, planck),
            lp: pick!(lp, planck),
            theta: pick!(theta, DEFAULT_THETA),
            m2: pick!(m2, default_m2),
            hbar,
            e_min: pick!(emin, DEFAULT_E_MIN),
            e_max: pick!(emax, DEFAULT_E_MAX),
            n_points: pick!(npoints, DEFAULT_N_POINTS),
            prime_limit: pick!(prime_limit, DEFAULT_PRIME_LIMIT),
            n_max: pick!(nmax, DEFAULT_N_MAX),
            model,
            format: pick!(format, if command == Command::Validate { Format::Json } else { Format::Csv }),
            out: flags.out.clone().or(file.out.clone()),
            sierra_convention: pick!(sierra_convention, ConventionArg::ScaledAngle),
            seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks the preconditions the chosen command relies on.
    pub fn validate(&self) -> CliResult<()> {
        let finite = [
            ("mu0", self.mu0),
            ("lx", self.lx),
            ("lp", self.lp),
            ("theta", self.theta),
            ("hbar", self.hbar),
            ("emin", self.e_min),
            ("emax", self.e_max),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(input(format!("{name} must be finite, got {v}")));
            }
        }
        let need = |ok: bool, msg: String| if ok { Ok(()) } else { Err(input(msg)) };
        need(self.mu0 >= 0.0, format!("mu0 must be >= 0, got {}", self.mu0))?;
        need(self.hbar > 0.0, format!("hbar must be > 0, got {}", self.hbar))?;
        need(self.lx > 0.0 && self.lp > 0.0, format!("lx and lp must be > 0, got {} and {}", self.lx, self.lp))?;
        need(self.prime_limit >= 2, format!("prime-limit must be >= 2, got {}", self.prime_limit))?;
        need(self.n_max >= 1, format!("nmax must be >= 1, got {}", self.n_max))?;
        need(self.n_points >= 1, format!("npoints must be >= 1, got {}", self.n_points))?;
        match self.command {
            Command::Zeros => need(
                self.e_max > 0.0 && self.e_max <= T_MAX_SUPPORTED,
                format!("emax must lie in (0, {T_MAX_SUPPORTED}], got {}", self.e_max),
            ),
            Command::Count => need(
                self.e_min > 0.0 && self.e_min <= self.e_max,
                format!("need 0 < emin <= emax, got emin = {} emax = {}", self.e_min, self.e_max),
            ),
            Command::Spectrum => self.validate_model(),
            Command::Validate => {
                self.validate_model()?;
                need(
                    self.mu0 * self.lp < 0.5 * PI,
                    format!("mu0*lp = {} outside the polymer counting branch (0, pi/2)", self.mu0 * self.lp),
                )
            }
        }
    }

    fn validate_model(&self) -> CliResult<()> {
        let need = |ok: bool, msg: String| if ok { Ok(()) } else { Err(input(msg)) };
        need(self.mu0 > 0.0, format!("mu0 must be > 0 for the polymer models, got {}", self.mu0))?;
        need(self.m2.is_finite(), format!("m2 must be finite, got {}", self.m2))?;
        match self.model {
            Model::Bk => {
                let end = PI * self.hbar / self.mu0;
                need(
                    self.m2 > 0.0 && self.m2 < end,
                    format!("m2 = {} outside the branch (0, pi*hbar/mu0 = {end})", self.m2),
                )?;
                need(self.m2 != 0.5 * end, format!("m2 = {} coincides with m1", self.m2))
            }
            Model::Sierra => {
                need(self.hbar == 1.0, format!("the sierra model fixes hbar = 1, got {}", self.hbar))?;
                let u = match self.sierra_convention {
                    ConventionArg::Printed => self.mu0 * self.m2,
                    ConventionArg::ScaledAngle => self.m2,
                };
                need(
                    u > 0.0 && u < PI,
                    format!("sierra endpoint angle mu0*p2 = {u} outside the branch (0, pi)"),
                )?;
                need(self.m2.sin() != 0.0, format!("csc(m2) undefined at m2 = {}", self.m2))
            }
        }
    }

    /// Energy grid `e_min..=e_max` with `n_points` nodes.
    pub fn energy_grid(&self) -> Vec<f64> {
        if self.n_points == 1 {
            return vec![self.e_min];
        }
        let h = (self.e_max - self.e_min) / (self.n_points - 1) as f64;
        (0..self.n_points)
            .map(|i| if i + 1 == self.n_points { self.e_max } else { self.e_min + i as f64 * h })
            .collect()
    }
}
