use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use defectlab_core::NumberOrdering;

/// Seed used when neither a flag, the config file nor `DEFECTLAB_SEED`
/// provides one. Always written into the report.
pub const DEFAULT_SEED: u64 = 0;
pub const SEED_ENV: &str = "DEFECTLAB_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        let step = (self.max - self.min) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| if i + 1 == self.count { self.max } else { self.min + step * i as f64 })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: Option<PathBuf>,
    /// `None` uses the command's natural format.
    #[serde(default)]
    pub format: Option<Format>,
}

/// Resolved run configuration; also the schema of `--config` files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub rank: usize,
    pub fock_cutoff: usize,
    pub chain_sites: usize,
    pub theta: [f64; 2],
    pub lambda_grid: Grid,
    /// Imaginary offset added to every grid point of an amplitude scan.
    pub lambda_imag: f64,
    pub tolerances: BTreeMap<String, f64>,
    pub seed: Option<u64>,
    /// `None` keeps the calibrated choice.
    pub ordering: Option<NumberOrdering>,
    pub shift: Option<f64>,
    pub output: OutputSpec,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            rank: 2,
            fock_cutoff: 5,
            chain_sites: 2,
            theta: [0.0, 0.0],
            lambda_grid: Grid {
                min: -5.0,
                max: 5.0,
                count: 101,
            },
            lambda_imag: 0.0,
            tolerances: BTreeMap::new(),
            seed: None,
            ordering: None,
            shift: None,
            output: OutputSpec {
                path: None,
                format: None,
            },
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// N of gl(N)
    #[arg(long, global = true)]
    pub rank: Option<usize>,
    /// Fock-space cutoff D (total occupation < D)
    #[arg(long, global = true)]
    pub fock_cutoff: Option<usize>,
    /// Number of bulk sites
    #[arg(long, global = true)]
    pub sites: Option<usize>,
    /// Defect rapidity, `re` or `re,im`
    #[arg(long, global = true, value_parser = parse_complex, allow_hyphen_values = true)]
    pub theta: Option<[f64; 2]>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub lambda_min: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub lambda_max: Option<f64>,
    #[arg(long, global = true)]
    pub lambda_count: Option<usize>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub lambda_imag: Option<f64>,
    /// Seed for sampled spectral parameters (fallback: DEFECTLAB_SEED)
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Number-operator ordering inside L
    #[arg(long, global = true, value_parser = parse_ordering)]
    pub ordering: Option<NumberOrdering>,
    /// Constant shift c in the (1,1) entry of L
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub shift: Option<f64>,
    /// Override a tolerance, `name=value` (repeatable)
    #[arg(long = "tolerance", global = true, value_parser = parse_tolerance)]
    pub tolerances: Vec<(String, f64)>,
    /// JSON config file; flags take precedence
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

fn parse_complex(s: &str) -> Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| p.parse::<f64>().map_err(|e| format!("bad number {p:?}: {e}"));
    match parts.as_slice() {
        [re] => Ok([num(re)?, 0.0]),
        [re, im] => Ok([num(re)?, num(im)?]),
        _ => Err(format!("expected `re` or `re,im`, got {s:?}")),
    }
}

fn parse_ordering(s: &str) -> Result<NumberOrdering, String> {
    s.parse::<NumberOrdering>().map_err(|e| e.to_string())
}

fn parse_tolerance(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s.split_once('=').ok_or_else(|| format!("expected name=value, got {s:?}"))?;
    let v = value.parse::<f64>().map_err(|e| e.to_string())?;
    Ok((name.trim().to_string(), v))
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

fn load_file(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))
}

impl RunConfig {
    /// Config file, then flags, then the seed fallback chain; validated.
    pub fn resolve(args: &CommonArgs) -> Result<RunConfig, ConfigError> {
        let mut cfg = match &args.config {
            Some(p) => load_file(p)?,
            None => RunConfig::default(),
        };
        macro_rules! take {
            ($field:ident => $($target:tt)+) => {
                if let Some(v) = args.$field {
                    cfg.$($target)+ = v;
                }
            };
        }
        take!(rank => rank);
        take!(fock_cutoff => fock_cutoff);
        take!(sites => chain_sites);
        take!(theta => theta);
        take!(lambda_min => lambda_grid.min);
        take!(lambda_max => lambda_grid.max);
        take!(lambda_count => lambda_grid.count);
        take!(lambda_imag => lambda_imag);
        if let Some(s) = args.seed {
            cfg.seed = Some(s);
        }
        if let Some(o) = args.ordering {
            cfg.ordering = Some(o);
        }
        if let Some(s) = args.shift {
            cfg.shift = Some(s);
        }
        if let Some(f) = args.format {
            cfg.output.format = Some(f);
        }
        if let Some(p) = &args.output {
            cfg.output.path = Some(p.clone());
        }
        for (name, v) in &args.tolerances {
            cfg.tolerances.insert(name.clone(), *v);
        }
        if cfg.seed.is_none() {
            if let Ok(text) = std::env::var(SEED_ENV) {
                let s = text
                    .trim()
                    .parse::<u64>()
                    .map_err(|e| ConfigError(format!("{SEED_ENV}={text:?}: {e}")))?;
                cfg.seed = Some(s);
            }
        }
        cfg.seed.get_or_insert(DEFAULT_SEED);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let fail = |m: String| Err(ConfigError(m));
        if self.rank < 2 {
            return fail(format!("rank must be at least 2, got {}", self.rank));
        }
        if self.fock_cutoff == 0 {
            return fail("fock_cutoff must be positive".into());
        }
        if self.chain_sites == 0 {
            return fail("sites must be positive".into());
        }
        let g = &self.lambda_grid;
        if g.count < 2 {
            return fail(format!("lambda grid needs at least 2 points, got {}", g.count));
        }
        if !(g.min.is_finite() && g.max.is_finite() && g.min < g.max) {
            return fail(format!("lambda grid needs finite min < max, got [{}, {}]", g.min, g.max));
        }
        if !self.lambda_imag.is_finite() || self.theta.iter().any(|x| !x.is_finite()) {
            return fail("non-finite spectral parameter".into());
        }
        for (name, t) in &self.tolerances {
            if !(*t > 0.0 && t.is_finite()) {
                return fail(format!("tolerance {name} must be positive, got {t}"));
            }
        }
        if let Some(s) = self.shift {
            if !s.is_finite() {
                return fail("shift must be finite".into());
            }
        }
        Ok(())
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn tolerance(&self, name: &str) -> Option<f64> {
        self.tolerances.get(name).copied()
    }
}
