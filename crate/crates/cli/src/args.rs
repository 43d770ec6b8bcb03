use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "sel", version, about = "Boundary singularity experiments for -Δu + m|∇u|^q - u^p = 0")]
pub struct Cli {
    /// Flat `key = value` file; command line flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    #[arg(long = "N", default_value_t = 3)]
    pub n: u32,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[arg(long, default_value_t = 1.2)]
    pub q: f64,
    #[arg(long, default_value_t = 1.0)]
    pub m: f64,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Write to this file instead of standard output.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, default_value = "json")]
    pub format: String,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Critical exponents and closed-form thresholds.
    Constants {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Positive roots of Φ and their residuals.
    PhiRoots {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Shoot for half-sphere profiles.
    Profile {
        #[command(flatten)]
        params: ParamArgs,
        /// psi, omega, eta or chi.
        #[arg(long)]
        kind: String,
        #[arg(long, default_value_t = 512)]
        n_steps: usize,
        /// Bound on |w(π/2)|.
        #[arg(long)]
        tol: Option<f64>,
        /// Bound on the relative finite-difference residual.
        #[arg(long)]
        tol_residual: Option<f64>,
        /// CSV of the profile; extra solutions get `_1`, `_2`, ... suffixes.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
        /// JSON summary path (standard output if absent).
        #[arg(long, value_name = "PATH")]
        summary: Option<PathBuf>,
    },
    /// Regime verdicts for a parameter set and boundary measure.
    Classify {
        #[command(flatten)]
        params: ParamArgs,
        /// `general` or `dirac:MASS`.
        #[arg(long, default_value = "general")]
        measure: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Solve on the planar half-annulus.
    Pde2d {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 128)]
        nr: usize,
        #[arg(long, default_value_t = 64)]
        ntheta: usize,
        #[arg(long, default_value_t = 0.01)]
        r_min: f64,
        #[arg(long, default_value_t = 1.0)]
        r_max: f64,
        /// harmonic, gradient, source or full.
        #[arg(long, default_value = "full")]
        terms: String,
        /// `dirac:MASS[:WIDTH]` or `profile:KIND`.
        #[arg(long, default_value = "dirac:1")]
        inner: String,
        /// zero or separable.
        #[arg(long, default_value = "separable")]
        outer: String,
        /// continuation or log.
        #[arg(long, default_value = "continuation")]
        initial: String,
        #[arg(long)]
        tol: Option<f64>,
        /// Exclusion radius around near-critical nodes in the threshold estimate.
        #[arg(long, default_value_t = 0.0)]
        exclusion: f64,
        /// Field CSV `r,theta,u`.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
        /// Metadata JSON path (standard output if absent).
        #[arg(long, value_name = "PATH")]
        meta: Option<PathBuf>,
    },
    /// Cartesian sweep over parameter axes.
    Sweep {
        #[command(flatten)]
        params: ParamArgs,
        /// `name:lo:hi:n` with name one of N, p, q, m; repeatable.
        #[arg(long, required = true)]
        axis: Vec<String>,
        /// classify, constants or phi-roots.
        #[arg(long, default_value = "classify")]
        what: String,
        #[arg(long, default_value = "general")]
        measure: String,
        /// Worker threads (0 or absent: logical cores).
        #[arg(long)]
        jobs: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
}
