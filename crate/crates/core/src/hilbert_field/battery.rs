//! Fixed test sections: Gaussian bumps in `s` times low angular modes.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::grid::{direct_integral_norm, PolarGrid, PolarSection};

/// Angular factor of a battery section.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Angular {
    /// `e^{i m theta}`
    Mode(i32),
    /// `cos 3theta + e^{i theta} / 2`
    Mixed,
}

impl Angular {
    pub fn eval(&self, theta: f64) -> Complex64 {
        match *self {
            Angular::Mode(m) => Complex64::from_polar(1.0, m as f64 * theta),
            Angular::Mixed => Complex64::new((3.0 * theta).cos(), 0.0) + Complex64::from_polar(0.5, theta),
        }
    }

    /// `<g, g>` in the fiber measure (`d theta / 2`).
    pub fn fiber_norm_sqr(&self) -> f64 {
        match self {
            Angular::Mode(_) => PI,
            // |cos 3t|^2 -> 1/2, |e^{it}/2|^2 -> 1/4, cross terms vanish
            Angular::Mixed => PI * 0.75,
        }
    }
}

/// `c * exp(-(s - center)^2 / (2 width^2)) * g(theta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpSection {
    pub center: f64,
    pub width: f64,
    pub angular: Angular,
    pub scale: f64,
}

impl BumpSection {
    pub fn radial(&self, s: f64) -> f64 {
        let x = (s - self.center) / self.width;
        self.scale * (-0.5 * x * x).exp()
    }

    /// `d/ds` of the radial factor.
    pub fn radial_ds(&self, s: f64) -> f64 {
        -(s - self.center) / (self.width * self.width) * self.radial(s)
    }

    pub fn eval(&self, s: f64, theta: f64) -> Complex64 {
        self.angular.eval(theta) * self.radial(s)
    }

    pub fn sample(&self, grid: &PolarGrid) -> PolarSection {
        PolarSection::from_fn(grid, |s, t| self.eval(s, t))
    }
}

pub const BUMPS: [(f64, f64); 3] = [(0.0, 0.3), (-0.1, 0.28), (0.1, 0.27)];
pub const ANGULAR: [Angular; 4] = [Angular::Mode(0), Angular::Mode(1), Angular::Mode(-2), Angular::Mixed];

/// The 12 battery profiles, scaled to unit direct-integral norm on `grid`.
pub fn battery_profiles(grid: &PolarGrid) -> Vec<BumpSection> {
    let mut out = Vec::with_capacity(BUMPS.len() * ANGULAR.len());
    for &(center, width) in &BUMPS {
        for &angular in &ANGULAR {
            let raw = BumpSection { center, width, angular, scale: 1.0 };
            let norm = direct_integral_norm(&raw.sample(grid));
            out.push(BumpSection { scale: 1.0 / norm, ..raw });
        }
    }
    out
}

pub fn battery(grid: &PolarGrid) -> Vec<PolarSection> {
    battery_profiles(grid).iter().map(|b| b.sample(grid)).collect()
}

/// Sections constant in `s` (horizontal for `n = 2`).
pub fn horizontal_battery(grid: &PolarGrid) -> Vec<PolarSection> {
    ANGULAR.iter().map(|g| PolarSection::from_fn(grid, |_, t| g.eval(t))).collect()
}
