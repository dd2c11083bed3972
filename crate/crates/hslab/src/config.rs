use std::path::PathBuf;

use clap::{Parser, ValueEnum};

use crate::error::{AppError, AppResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Constants,
    Profile,
    Map,
    Verify,
    Minimize,
    Kernel,
    All,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Constants => "constants",
            Command::Profile => "profile",
            Command::Map => "map",
            Command::Verify => "verify",
            Command::Minimize => "minimize",
            Command::Kernel => "kernel",
            Command::All => "all",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Reduced problem for `minimize`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MinimizeKind {
    /// Interior point in the unit ball, `t = r^{2-n}`.
    Euclidean,
    /// Interior point with the logarithmic conjugation; needs `theta < 1/2`.
    LogWeighted,
    Hyperbolic,
    HalfSpace,
    HalfBall,
    /// Monte Carlo quotient of the two-point minimizer in three dimensions.
    TwoPoint,
}

impl MinimizeKind {
    pub fn name(self) -> &'static str {
        match self {
            MinimizeKind::Euclidean => "euclidean",
            MinimizeKind::LogWeighted => "log-weighted",
            MinimizeKind::Hyperbolic => "hyperbolic",
            MinimizeKind::HalfSpace => "half-space",
            MinimizeKind::HalfBall => "half-ball",
            MinimizeKind::TwoPoint => "two-point",
        }
    }
}

/// Sharp Hardy-Sobolev constants, profiles and inequality checks.
#[derive(Debug, Clone, Parser)]
#[command(name = "hslab", version)]
pub struct RunConfig {
    #[arg(value_enum)]
    pub command: Command,
    /// Dimension.
    #[arg(long, default_value_t = 3)]
    pub n: u32,
    /// Exponent, in `(2, 2n/(n-2)]`.
    #[arg(long, default_value_t = 4.0)]
    pub p: f64,
    #[arg(long, default_value_t = 0.0)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0.5)]
    pub theta: f64,
    /// Weight parameter; commands pick their own threshold when omitted.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, default_value_t = 2048)]
    pub grid_size: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Output file; standard output when omitted.
    #[arg(long = "out")]
    pub out_path: Option<PathBuf>,
    /// Catalog case for `verify`; all cases when omitted.
    #[arg(long)]
    pub case: Option<String>,
    #[arg(long, value_enum, default_value_t = MinimizeKind::Euclidean)]
    pub kind: MinimizeKind,
    /// Monte Carlo sample count.
    #[arg(long, default_value_t = 10_000_000)]
    pub samples: u64,
}

impl RunConfig {
    /// Defaults for `command`, as if parsed from `hslab <command>`.
    pub fn new(command: Command) -> Self {
        let mut cfg = RunConfig::parse_from(["hslab", "constants"]);
        cfg.command = command;
        cfg
    }

    pub fn critical_exponent(&self) -> f64 {
        2.0 * self.n as f64 / (self.n as f64 - 2.0)
    }

    pub fn validate(&self) -> AppResult<()> {
        let bad = |m: &str| Err(AppError::Config(m.to_string()));
        if !(3..=32).contains(&self.n) {
            return bad("n must lie in 3..=32");
        }
        if !(self.p > 2.0 && self.p <= self.critical_exponent() * (1.0 + 1e-14)) {
            return bad("p must lie in (2, 2n/(n-2)]");
        }
        if !(self.gamma >= 0.0 && (self.n as f64) - 2.0 * self.gamma > 0.0) {
            return bad("gamma must satisfy 0 <= gamma < n/2");
        }
        if !(self.theta > 0.0 && self.theta < 2.0) {
            return bad("theta must lie in (0, 2)");
        }
        if let Some(a) = self.alpha {
            if !(a > 0.0 && a <= std::f64::consts::E) {
                return bad("alpha must lie in (0, e]");
            }
        }
        if self.grid_size < 2 {
            return bad("grid size must be at least 2");
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return bad("tol must lie in (0, 1)");
        }
        if let Some(c) = &self.case {
            if hslab_core::certifier::CaseName::from_id(c).is_none() {
                return Err(AppError::Config(format!("unknown case {c:?}")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = RunConfig::new(Command::All);
        assert_eq!((c.n, c.p, c.gamma, c.theta), (3, 4.0, 0.0, 0.5));
        assert_eq!((c.grid_size, c.tol, c.seed), (2048, 1e-8, 42));
        assert_eq!(c.format, Format::Json);
        assert!(c.out_path.is_none() && c.alpha.is_none());
        assert!(c.validate().is_ok());
    }

    #[test]
    fn flags_parse() {
        let c = RunConfig::parse_from(["hslab", "profile", "--n", "4", "--format", "csv", "--grid-size", "100"]);
        assert_eq!((c.command, c.n, c.format, c.grid_size), (Command::Profile, 4, Format::Csv, 100));
    }

    #[test]
    fn ranges_are_enforced() {
        let mut c = RunConfig::new(Command::Constants);
        c.theta = 2.0;
        assert!(matches!(c.validate(), Err(AppError::Config(_))));
        c.theta = 0.5;
        c.gamma = 1.5;
        assert!(c.validate().is_err());
    }
}
