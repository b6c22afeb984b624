//! Command-line surface and configuration validation.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use charfol::scalar::{parse_rational, Scalar};

use crate::CliError;

#[derive(Parser)]
#[command(
    name = "charfol",
    version,
    about = "Characteristic foliations of level-set hypersurfaces in polynomial contact manifolds"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Run the exact verification ledger for the built-in construction
    Verify(VerifyArgs),
    /// Locate and classify the singular points of the reduced foliation
    Singular(SingularArgs),
    /// Evaluate the Thurston-Bennequin count
    Tb(TbArgs),
    /// Render the phase portrait of the reduced foliation as SVG
    Portrait(PortraitArgs),
    /// Characteristic field of user-supplied contact data
    Engine(EngineArgs),
}

#[derive(Args, Clone)]
pub struct CommonArgs {
    /// Dimension parameter: the ambient manifold has 2n+1 coordinates
    #[arg(long, default_value_t = 2)]
    pub n: usize,

    /// Exact rational parameter value `p/q` in (0, 1/10]; decimals rejected
    #[arg(long, default_value = "1/10")]
    pub eps: String,

    /// Working precision in decimal digits (default 50, or CHARFOL_PRECISION)
    #[arg(long)]
    pub precision: Option<usize>,

    /// Write the machine-readable JSON document to this path
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Test hook: perturb one component of the presented field, e.g.
    /// `dth+1` or `dz-flip`
    #[arg(long)]
    pub mutate: Option<String>,
}

#[derive(Args)]
pub struct SingularArgs {
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args)]
pub struct TbArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Euler characteristic of the hypersurface piece to report against
    #[arg(long, default_value_t = 2)]
    pub chi: i64,

    /// Evaluate user-supplied records instead of the built-in pipeline:
    /// a JSON array of {"sign": "+"|"-", "index": int, "kind": str}
    #[arg(long)]
    pub records: Option<String>,
}

#[derive(Args)]
pub struct PortraitArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Output SVG path
    #[arg(long, default_value = "portrait.svg")]
    pub out: PathBuf,

    /// Number of foliation leaves to draw (at least 12)
    #[arg(long, default_value_t = 14)]
    pub leaves: usize,

    /// SVG width in pixels
    #[arg(long, default_value_t = 900)]
    pub size: u32,
}

#[derive(Args)]
pub struct EngineArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// The contact 1-form, e.g. "(2*r^2-1)*dz + r^2*(r^2-1)*dth + x1*dy1 - y1*dx1"
    #[arg(long)]
    pub beta: String,

    /// The hypersurface defining polynomial, e.g. "r^2 + e^-2*(z^2 + x1^2 + y1^2) - 1 - e"
    #[arg(long, name = "f")]
    pub f: String,

    /// Comma-separated coordinate names (odd count; first one is eliminated
    /// by the normal-form rule)
    #[arg(long, default_value = "z,r,th,x1,y1")]
    pub coords: String,

    /// Run the singularity/TB pipeline at --eps (requires the rotational
    /// reduction to exist)
    #[arg(long, default_value_t = false)]
    pub dynamics: bool,

    /// Euler characteristic for the TB comparison in dynamics mode
    #[arg(long, default_value_t = 2)]
    pub chi: i64,
}

/// Validated runtime configuration shared by the subcommands.
pub struct RunConfig {
    pub n: usize,
    pub eps: Scalar,
    pub eps_str: String,
    pub precision: usize,
    pub json: Option<PathBuf>,
}

impl CommonArgs {
    pub fn validate(&self, needs_model_n: bool) -> Result<RunConfig, CliError> {
        if needs_model_n && self.n < 2 {
            return Err(CliError::usage(format!(
                "--n {} is not allowed: the construction requires n > 1",
                self.n
            )));
        }
        let eps = parse_rational(&self.eps)
            .map_err(|_| CliError::usage(format!("--eps must be an exact rational `p/q`, got `{}`", self.eps)))?;
        charfol::construction::check_eps(&eps)
            .map_err(|e| CliError::usage(e.to_string()))?;
        let precision = match self.precision {
            Some(p) => p,
            None => std::env::var("CHARFOL_PRECISION")
                .ok()
                .and_then(|v| v.parse().ok())
                .unwrap_or(charfol::real::DEFAULT_DIGITS),
        };
        if precision < 30 {
            return Err(CliError::usage(
                "--precision below 30 digits is not supported",
            ));
        }
        Ok(RunConfig {
            n: self.n,
            eps,
            eps_str: self.eps.clone(),
            precision,
            json: self.json.clone(),
        })
    }
}
