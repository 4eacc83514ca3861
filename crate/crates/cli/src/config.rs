//! Command-line arguments and their validation.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fhtoeplitz::eigensolver::GridDenominator;
use fhtoeplitz::quasiparticle::{LRule, Part};
use fhtoeplitz::report::Format;
use fhtoeplitz::FHParams;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot parse {0:?} as a rational number")]
    Rational(String),
    #[error("{0}")]
    Invalid(String),
}

/// Parses `p/q`, an integer or a decimal, rounding once to `f64`.
pub fn parse_rational(s: &str) -> Result<f64, ConfigError> {
    let bad = || ConfigError::Rational(s.to_owned());
    let s = s.trim();
    match s.split_once('/') {
        Some((num, den)) => {
            let num: i64 = num.trim().parse().map_err(|_| bad())?;
            let den: i64 = den.trim().parse().map_err(|_| bad())?;
            if den == 0 {
                return Err(bad());
            }
            Ok(num as f64 / den as f64)
        }
        None => s.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(bad),
    }
}

fn rational_arg(s: &str) -> Result<f64, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "fht", version, about = "Spectra and eigenvectors of Fisher-Hartwig Toeplitz matrices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Labeled eigenvalues and the symbol curve.
    Spectrum {
        #[command(flatten)]
        common: Common,
        /// Number of points on the symbol curve.
        #[arg(long, default_value_t = 2000)]
        curve_samples: usize,
    },
    /// One eigenvector with phases, branch ids and log-magnitude ratios.
    Eigvec {
        #[command(flatten)]
        common: Common,
        /// Number of sublattice branches `j mod q`.
        #[arg(long, default_value_t = 1)]
        branches: usize,
    },
    /// Momentum table with the log-law fit.
    QpTable {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = PartArg::Imag)]
        part: PartArg,
    },
    /// Wiener-Hopf eigenvector against the exact one.
    WhCompare {
        #[command(flatten)]
        common: Common,
        /// Number of psi_S coefficients to write (default N).
        #[arg(long)]
        s_terms: Option<usize>,
    },
    /// Two-term model, Im p law and eigenvalue shift.
    Asymptotics {
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectrum { .. } => "spectrum",
            Command::Eigvec { .. } => "eigvec",
            Command::QpTable { .. } => "qp-table",
            Command::WhCompare { .. } => "wh-compare",
            Command::Asymptotics { .. } => "asymptotics",
        }
    }

    pub fn common(&self) -> &Common {
        match self {
            Command::Spectrum { common, .. }
            | Command::Eigvec { common, .. }
            | Command::QpTable { common, .. }
            | Command::WhCompare { common, .. }
            | Command::Asymptotics { common } => common,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleArg {
    Half,
    Golden,
    Quarter,
}

impl From<RuleArg> for LRule {
    fn from(r: RuleArg) -> Self {
        match r {
            RuleArg::Half => LRule::Half,
            RuleArg::Golden => LRule::Golden,
            RuleArg::Quarter => LRule::Quarter,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PartArg {
    Imag,
    Real,
}

impl From<PartArg> for Part {
    fn from(p: PartArg) -> Self {
        match p {
            PartArg::Imag => Part::ImagP,
            PartArg::Real => Part::RealQ,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridArg {
    /// `2 pi l / (N - 1)`.
    NMinusOne,
    /// `2 pi l / N`.
    N,
}

impl From<GridArg> for GridDenominator {
    fn from(g: GridArg) -> Self {
        match g {
            GridArg::NMinusOne => GridDenominator::OrderMinusOne,
            GridArg::N => GridDenominator::Order,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Zero strength, e.g. 1/3.
    #[arg(long, value_parser = rational_arg, allow_hyphen_values = true, default_value = "1/3")]
    pub alpha: f64,
    /// Jump strength, e.g. -1/2.
    #[arg(long, value_parser = rational_arg, allow_hyphen_values = true, default_value = "-1/2")]
    pub beta: f64,
    /// Matrix order.
    #[arg(long, conflicts_with = "n_list")]
    pub n: Option<usize>,
    /// Comma-separated matrix orders.
    #[arg(long, value_delimiter = ',')]
    pub n_list: Option<Vec<usize>>,
    /// Explicit eigenvalue label.
    #[arg(long, conflicts_with_all = ["l_rule", "l_frac"])]
    pub l: Option<usize>,
    #[arg(long, value_enum, conflicts_with = "l_frac")]
    pub l_rule: Option<RuleArg>,
    /// Label `floor(frac (N-1))`.
    #[arg(long)]
    pub l_frac: Option<f64>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    pub format: FormatArg,
    /// Accept parameters outside 0 < alpha < |beta| < 1.
    #[arg(long)]
    pub allow_out_of_range: bool,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    /// Reserved; no computation is random.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = GridArg::NMinusOne)]
    pub grid: GridArg,
}

/// How a label is chosen for each `N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LabelChoice {
    Explicit(usize),
    Rule(LRule),
    Fraction(f64),
}

impl LabelChoice {
    pub fn resolve(self, n: usize) -> Result<usize, ConfigError> {
        let l = match self {
            LabelChoice::Explicit(l) => l,
            LabelChoice::Rule(r) => r.label(n),
            LabelChoice::Fraction(f) => (f * (n - 1) as f64).floor() as usize,
        };
        if l >= n {
            return Err(ConfigError::Invalid(format!("label {l} out of range for N = {n}")));
        }
        Ok(l)
    }
}

impl Common {
    pub fn params(&self) -> Result<FHParams, ConfigError> {
        let p = FHParams::new(self.alpha, self.beta).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if !self.allow_out_of_range && !p.in_study_range() {
            return Err(ConfigError::Invalid(format!(
                "alpha = {}, beta = {} is outside 0 < alpha < |beta| < 1 (pass --allow-out-of-range)",
                self.alpha, self.beta
            )));
        }
        Ok(p)
    }

    pub fn orders(&self) -> Result<Vec<usize>, ConfigError> {
        let ns = match (&self.n, &self.n_list) {
            (Some(n), _) => vec![*n],
            (None, Some(list)) if !list.is_empty() => list.clone(),
            _ => return Err(ConfigError::Invalid("give --n or --n-list".into())),
        };
        if let Some(&bad) = ns.iter().find(|&&n| n < 2) {
            return Err(ConfigError::Invalid(format!("N = {bad} must be at least 2")));
        }
        Ok(ns)
    }

    pub fn label(&self, default: LRule) -> Result<LabelChoice, ConfigError> {
        match (self.l, self.l_rule, self.l_frac) {
            (Some(l), _, _) => Ok(LabelChoice::Explicit(l)),
            (_, Some(r), _) => Ok(LabelChoice::Rule(r.into())),
            (_, _, Some(f)) if (0.0..=1.0).contains(&f) => Ok(LabelChoice::Fraction(f)),
            (_, _, Some(f)) => Err(ConfigError::Invalid(format!("--l-frac {f} must lie in [0, 1]"))),
            _ => Ok(LabelChoice::Rule(default)),
        }
    }
}
