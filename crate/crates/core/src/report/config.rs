//! Run configuration: defaults, an optional `key = value` file, then flags.

use crate::distance::{DEFAULT_GRID_N, DEFAULT_REFINE_TOL, MIN_GRID_N};
use crate::error::{Error, Result};
use crate::model::GammaParam;
use crate::numerics::QuadratureSpec;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

/// Environment variable naming a config file when `--config` is absent.
pub const CONFIG_ENV: &str = "BELL_MDL_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::domain(format!("format must be csv or json, got {other:?}"))),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Csv => "csv",
            Self::Json => "json",
        })
    }
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub quad: QuadratureSpec,
    pub mc_samples: usize,
    pub seed: u64,
    pub gammas: Vec<GammaParam>,
    /// Figure 1 uses φ = kπ/phi_steps for k = 1 … phi_steps − 1.
    pub phi_steps: usize,
    pub grid_n: usize,
    pub refine_tol: f64,
    pub out_dir: PathBuf,
    pub format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            quad: QuadratureSpec::default(),
            mc_samples: 1_000_000,
            seed: 0,
            gammas: default_gamma_grid(),
            phi_steps: 180,
            grid_n: DEFAULT_GRID_N,
            refine_tol: DEFAULT_REFINE_TOL,
            out_dir: PathBuf::from("out"),
            format: OutputFormat::Csv,
        }
    }
}

/// γ = −0.4, −0.3, …, 0.4.
pub fn default_gamma_grid() -> Vec<GammaParam> {
    parse_range("-0.4:0.4:0.1").expect("static grid is valid")
}

/// Parses `start:stop:step` (inclusive) or a comma-separated list into γ values.
pub fn parse_gamma_list(s: &str) -> Result<Vec<GammaParam>> {
    if s.contains(':') {
        return parse_range(s);
    }
    s.split(',')
        .map(|t| parse_f64("gamma", t).and_then(GammaParam::new))
        .collect()
}

fn parse_range(s: &str) -> Result<Vec<GammaParam>> {
    let parts: Vec<&str> = s.split(':').collect();
    let [start, stop, step] = parts.as_slice() else {
        return Err(Error::domain(format!("range must look like start:stop:step, got {s:?}")));
    };
    let (start, stop, step) = (parse_f64("start", start)?, parse_f64("stop", stop)?, parse_f64("step", step)?);
    if !(step > 0.0) || stop < start {
        return Err(Error::domain(format!("range {s:?} needs step > 0 and stop >= start")));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    (0..count)
        .map(|i| {
            // Snap to 12 decimals so -0.4 + 3 * 0.1 prints as -0.1.
            let v = ((start + i as f64 * step) * 1e12).round() / 1e12;
            GammaParam::new(if v == 0.0 { 0.0 } else { v })
        })
        .collect()
}

pub(crate) fn parse_f64(name: &str, s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::domain(format!("{name}: cannot parse {s:?} as a number")))
}

fn parse_usize(name: &str, s: &str) -> Result<usize> {
    s.trim()
        .parse::<usize>()
        .map_err(|_| Error::domain(format!("{name}: cannot parse {s:?} as a count")))
}

impl RunConfig {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key.trim() {
            "tol" | "rel_tol" => self.quad.rel_tol = parse_f64(key, value)?,
            "abs_tol" => self.quad.abs_tol = parse_f64(key, value)?,
            "max_subdivisions" => self.quad.max_subdivisions = parse_usize(key, value)?,
            "n" | "mc_samples" => self.mc_samples = parse_usize(key, value)?,
            "seed" => {
                self.seed = value
                    .trim()
                    .parse()
                    .map_err(|_| Error::domain(format!("seed: cannot parse {value:?}")))?
            }
            "gammas" => self.gammas = parse_gamma_list(value)?,
            "phi_steps" => self.phi_steps = parse_usize(key, value)?,
            "grid_n" => self.grid_n = parse_usize(key, value)?,
            "refine_tol" => self.refine_tol = parse_f64(key, value)?,
            "out" => self.out_dir = PathBuf::from(value.trim()),
            "format" => self.format = value.parse()?,
            other => return Err(Error::domain(format!("unknown config key {other:?}"))),
        }
        Ok(())
    }

    /// Applies every setting in a `key = value` text; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(Error::domain(format!("config line {}: expected key = value", lineno + 1)));
            };
            self.set(k, v)
                .map_err(|e| Error::domain(format!("config line {}: {e}", lineno + 1)))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)?;
        self.apply_text(&text)
    }

    pub fn validate(&self) -> Result<()> {
        QuadratureSpec::new(self.quad.rel_tol, self.quad.abs_tol, self.quad.max_subdivisions)?;
        if !(self.refine_tol > 0.0) {
            return Err(Error::domain(format!("refine_tol must be positive, got {}", self.refine_tol)));
        }
        if self.phi_steps < 2 {
            return Err(Error::domain("phi_steps must be at least 2"));
        }
        if self.grid_n < MIN_GRID_N {
            return Err(Error::domain(format!("grid_n must be at least {MIN_GRID_N}")));
        }
        if self.gammas.is_empty() {
            return Err(Error::domain("gamma grid is empty"));
        }
        Ok(())
    }
}
