//! Run configuration: a flat `key = value` file, every key optional.
//!
//! ```text
//! # polar grid
//! S = 257
//! M = 64
//! s_min = -2
//! s_max = 2
//! # Cartesian grid for cross-backend checks
//! N = 48
//! L = 2.8
//! tol_exact = 1e-8
//! tol_stencil = 1e-6
//! tol_cross = 1e-3
//! seed = 0
//! timing = false
//! ```

use std::fmt;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use opfield::hilbert_field::PolarGrid;
use opfield::weyl::CartesianGrid;

use crate::report::Format;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub n: usize,
    pub s_count: usize,
    pub m: usize,
    pub s_min: f64,
    pub s_max: f64,
    pub cart_points: usize,
    pub cart_half_width: f64,
    /// Identities exact on the grid.
    pub tol_exact: f64,
    /// Identities limited by the order-8 `s` stencil.
    pub tol_stencil: f64,
    /// Kernel against polar backend, and resampling.
    pub tol_cross: f64,
    pub suite: String,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
    /// Record wall-clock milliseconds; off by default so reports are
    /// byte-identical across runs.
    pub timing: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n: 2,
            s_count: 257,
            m: 64,
            s_min: -2.0,
            s_max: 2.0,
            cart_points: 48,
            cart_half_width: 2.8,
            tol_exact: 1e-8,
            tol_stencil: 1e-6,
            tol_cross: 1e-3,
            suite: "all".into(),
            seed: 0,
            out: None,
            format: Format::Json,
            timing: false,
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    value.parse().map_err(|e| anyhow!("bad value {value:?} for {key}: {e}"))
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "n" => self.n = parse(key, value)?,
            "S" => self.s_count = parse(key, value)?,
            "M" => self.m = parse(key, value)?,
            "s_min" => self.s_min = parse(key, value)?,
            "s_max" => self.s_max = parse(key, value)?,
            "N" => self.cart_points = parse(key, value)?,
            "L" => self.cart_half_width = parse(key, value)?,
            "tol_exact" => self.tol_exact = parse(key, value)?,
            "tol_stencil" => self.tol_stencil = parse(key, value)?,
            "tol_cross" => self.tol_cross = parse(key, value)?,
            "suite" => self.suite = value.to_string(),
            "seed" => self.seed = parse(key, value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            "format" => self.format = parse(key, value)?,
            "timing" => self.timing = parse(key, value)?,
            _ => bail!("unknown config key {key:?}"),
        }
        Ok(())
    }

    /// Applies the `key = value` lines of a config file; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) =
                line.split_once('=').ok_or_else(|| anyhow!("line {}: expected key = value", lineno + 1))?;
            self.set(key.trim(), value.trim()).with_context(|| format!("line {}", lineno + 1))?;
        }
        Ok(())
    }

    /// Applies `S=..,M=..,N=..` style overrides.
    pub fn apply_overrides(&mut self, overrides: &str) -> Result<()> {
        for item in overrides.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item.split_once('=').ok_or_else(|| anyhow!("expected key=value, got {item:?}"))?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.s_count == 0 || self.m == 0 || self.cart_points == 0 {
            bail!("grid sizes must be positive");
        }
        if !(self.s_min < self.s_max) {
            bail!("need s_min < s_max, got {} and {}", self.s_min, self.s_max);
        }
        if !(self.cart_half_width > 0.0) {
            bail!("L must be positive");
        }
        for (name, t) in [("tol_exact", self.tol_exact), ("tol_stencil", self.tol_stencil), ("tol_cross", self.tol_cross)] {
            if !(t > 0.0) {
                bail!("{name} must be positive");
            }
        }
        self.polar_grid()?;
        self.cartesian_grid()?;
        Ok(())
    }

    pub fn polar_grid(&self) -> Result<PolarGrid> {
        Ok(PolarGrid::new(self.n, self.s_count, self.m, self.s_min, self.s_max)?)
    }

    pub fn cartesian_grid(&self) -> Result<CartesianGrid> {
        Ok(CartesianGrid::new(self.n, self.cart_points, self.cart_half_width)?)
    }
}
