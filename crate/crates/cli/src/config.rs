//! Flag values merged over an optional JSON config file.

use std::path::{Path, PathBuf};

use clap::Args;
use serde::Deserialize;

use crate::output::Format;

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// JSON file with the same keys as the flags; flags given on the command line win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Generator, e.g. `bspline:n=8,mu=3` (see `kernels list`).
    #[arg(long, global = true)]
    pub kernel: Option<String>,
    #[arg(long, global = true)]
    pub n: Option<u32>,
    #[arg(long, global = true)]
    pub m: Option<u32>,
    #[arg(long, global = true)]
    pub r: Option<u32>,
    /// Truncation frequency.
    #[arg(long = "K", global = true)]
    pub cutoff: Option<i64>,
    /// Function class: h0, h1, h2, h2even or any.
    #[arg(long, global = true)]
    pub class: Option<String>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    /// certify: 1, c1, 2, 3, 4 or decay.
    #[arg(long, global = true)]
    pub theorem: Option<String>,
    /// certify: random samples per Jackson check (0 skips the check).
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// project: CSV file with columns x,value.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Spline family 0, 1 or 2.
    #[arg(long, global = true)]
    pub family: Option<u32>,
    /// Spline degree.
    #[arg(long, global = true)]
    pub d: Option<u32>,
    /// Knot parity: integer or half.
    #[arg(long, global = true)]
    pub parity: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub kernel: Option<String>,
    pub n: Option<u32>,
    pub m: Option<u32>,
    pub r: Option<u32>,
    #[serde(rename = "K")]
    pub cutoff: Option<i64>,
    pub class: Option<String>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub theorem: Option<String>,
    pub samples: Option<usize>,
    pub input: Option<PathBuf>,
    pub family: Option<u32>,
    pub d: Option<u32>,
    pub parity: Option<String>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("bad config {}: {e}", path.display()))
    }

    pub fn resolve(flags: Common) -> Result<Self, String> {
        let file = match &flags.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        let cfg = RunConfig {
            kernel: flags.kernel.or(file.kernel),
            n: flags.n.or(file.n),
            m: flags.m.or(file.m),
            r: flags.r.or(file.r),
            cutoff: flags.cutoff.or(file.cutoff),
            class: flags.class.or(file.class),
            tol: flags.tol.or(file.tol),
            seed: flags.seed.or(file.seed),
            out: flags.out.or(file.out),
            format: flags.format.or(file.format),
            theorem: flags.theorem.or(file.theorem),
            samples: flags.samples.or(file.samples),
            input: flags.input.or(file.input),
            family: flags.family.or(file.family),
            d: flags.d.or(file.d),
            parity: flags.parity.or(file.parity),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), String> {
        if let Some(t) = self.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(format!("tolerance must be positive, got {t}"));
            }
        }
        if let Some(k) = self.cutoff {
            if k < 1 {
                return Err(format!("truncation K must be positive, got {k}"));
            }
        }
        if self.r == Some(0) {
            return Err("smoothness order r must be at least 1".into());
        }
        Ok(())
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or_default()
    }
}
