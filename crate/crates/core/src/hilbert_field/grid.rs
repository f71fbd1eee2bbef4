use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::numeric::DerivativeStencil;

/// Tolerance for deciding that a value of `s` sits on a grid point.
const ON_GRID_TOL: f64 = 1e-9;

/// Log-radial x angular grid: `s_i = s_min + i h` (inclusive endpoints) and
/// `theta_j = 2 pi j / M`, with `lambda = e^s = |q|^2`.
#[derive(Clone)]
pub struct PolarGrid {
    n: usize,
    s_count: usize,
    m: usize,
    s_min: f64,
    s_max: f64,
    stencil: Arc<DerivativeStencil>,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for PolarGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PolarGrid")
            .field("n", &self.n)
            .field("s_count", &self.s_count)
            .field("m", &self.m)
            .field("s_min", &self.s_min)
            .field("s_max", &self.s_max)
            .finish()
    }
}

impl PartialEq for PolarGrid {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.s_count == other.s_count
            && self.m == other.m
            && self.s_min == other.s_min
            && self.s_max == other.s_max
    }
}

impl Default for PolarGrid {
    fn default() -> Self {
        Self::new(2, 257, 64, -2.0, 2.0).expect("default grid is valid")
    }
}

impl PolarGrid {
    pub fn new(n: usize, s_count: usize, m: usize, s_min: f64, s_max: f64) -> Result<Self> {
        if n != 2 {
            return Err(Error::UnsupportedDimension(n));
        }
        if !(s_min < s_max) || !s_min.is_finite() || !s_max.is_finite() {
            return Err(Error::InvalidGrid(format!("need s_min < s_max, got [{s_min}, {s_max}]")));
        }
        if m < 4 || !m.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!("angular size M = {m} must be even and >= 4")));
        }
        let stencil = DerivativeStencil::new(s_count).ok_or(Error::StencilTooShort(s_count))?;
        let mut planner = FftPlanner::new();
        Ok(Self {
            n,
            s_count,
            m,
            s_min,
            s_max,
            stencil: Arc::new(stencil),
            fft: planner.plan_fft_forward(m),
            ifft: planner.plan_fft_inverse(m),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn s_count(&self) -> usize {
        self.s_count
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn s_min(&self) -> f64 {
        self.s_min
    }

    pub fn s_max(&self) -> f64 {
        self.s_max
    }

    pub fn len(&self) -> usize {
        self.s_count * self.m
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Spacing in `s`.
    pub fn h(&self) -> f64 {
        (self.s_max - self.s_min) / (self.s_count - 1) as f64
    }

    pub fn dtheta(&self) -> f64 {
        2.0 * PI / self.m as f64
    }

    pub fn s(&self, i: usize) -> f64 {
        self.s_min + i as f64 * self.h()
    }

    pub fn lambda(&self, i: usize) -> f64 {
        self.s(i).exp()
    }

    pub fn theta(&self, j: usize) -> f64 {
        j as f64 * self.dtheta()
    }

    pub fn r_min(&self) -> f64 {
        (self.s_min / 2.0).exp()
    }

    pub fn r_max(&self) -> f64 {
        (self.s_max / 2.0).exp()
    }

    pub(crate) fn stencil(&self) -> &DerivativeStencil {
        &self.stencil
    }

    /// Quadrature weight of the fiber measure `mu_lambda` per angular point.
    /// On the circle of radius `sqrt(lambda)` the measure is
    /// `(2 sqrt(lambda))^{-1}` times arc length, so the weight is `pi / M`.
    pub fn fiber_weight(&self) -> f64 {
        PI / self.m as f64
    }

    /// Quadrature weight of `L^2(S^1)` (arc length on the unit circle).
    pub fn v_weight(&self) -> f64 {
        self.dtheta()
    }

    /// Weight of row `i` in the `d lambda` integral.
    pub fn lambda_weight(&self, i: usize) -> f64 {
        self.h() * self.lambda(i)
    }

    /// Row index of a grid value of `lambda`.
    pub fn row_of_lambda(&self, lambda: f64) -> Result<usize> {
        if !(lambda > 0.0) {
            return Err(Error::OffGrid(lambda));
        }
        let x = (lambda.ln() - self.s_min) / self.h();
        let i = x.round();
        if (x - i).abs() > ON_GRID_TOL || i < 0.0 || i as usize >= self.s_count {
            return Err(Error::OffGrid(lambda));
        }
        Ok(i as usize)
    }

    /// Rows with `lambda_i` in `[c0, c1]`.
    pub fn rows_in_interval(&self, c0: f64, c1: f64) -> Result<std::ops::Range<usize>> {
        let lo = self.lambda(0) * (1.0 - ON_GRID_TOL);
        let hi = self.lambda(self.s_count - 1) * (1.0 + ON_GRID_TOL);
        if !(c0 <= c1) || c0 < lo || c1 > hi {
            return Err(Error::EmptyInterval(c0, c1));
        }
        let first = (0..self.s_count).find(|&i| self.lambda(i) >= c0 * (1.0 - ON_GRID_TOL));
        let last = (0..self.s_count).rev().find(|&i| self.lambda(i) <= c1 * (1.0 + ON_GRID_TOL));
        match (first, last) {
            (Some(a), Some(b)) if a <= b => Ok(a..b + 1),
            _ => Err(Error::EmptyInterval(c0, c1)),
        }
    }

    /// Number of rows `2t / h` when `t` is shift-compatible.
    pub fn shift_rows(&self, t: f64) -> Option<isize> {
        let x = 2.0 * t / self.h();
        let k = x.round();
        ((x - k).abs() <= ON_GRID_TOL).then_some(k as isize)
    }

    /// Spectral angular derivative `d^b/dtheta^b` of one row, Nyquist mode
    /// dropped.
    pub(crate) fn dtheta_row(&self, row: &[Complex64], b: u32, out: &mut [Complex64]) {
        out.copy_from_slice(row);
        if b == 0 {
            return;
        }
        let m = self.m;
        self.fft.process(out);
        for (k, z) in out.iter_mut().enumerate() {
            let freq = if k < m / 2 {
                k as f64
            } else if k == m / 2 {
                *z = Complex64::new(0.0, 0.0);
                continue;
            } else {
                k as f64 - m as f64
            };
            *z *= Complex64::new(0.0, freq).powu(b) / m as f64;
        }
        self.ifft.process(out);
    }

    pub(crate) fn check_same(&self, other: &PolarGrid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }
}

/// Weight of the trivialization `T f(lambda, z) = 2^{-1/2} lambda^{(n-2)/4} f(sqrt(lambda) z)`.
pub fn trivialization_weight(n: usize, lambda: f64) -> f64 {
    std::f64::consts::FRAC_1_SQRT_2 * lambda.powf((n as f64 - 2.0) / 4.0)
}

/// `(T f)(lambda, z)` for a function on `R^n` evaluated at a point `z` of
/// the unit sphere.
pub fn trivialize_pointwise(n: usize, f: impl Fn(&[f64]) -> f64, lambda: f64, z: &[f64]) -> f64 {
    let r = lambda.sqrt();
    let q: Vec<f64> = z.iter().map(|x| r * x).collect();
    trivialization_weight(n, lambda) * f(&q)
}

/// Values of a section on the polar grid, `S x M`, row-major in `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarSection {
    grid: PolarGrid,
    values: Vec<Complex64>,
}

impl PolarSection {
    pub fn zeros(grid: &PolarGrid) -> Self {
        Self { grid: grid.clone(), values: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    pub fn from_values(grid: &PolarGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch { expected: grid.len(), found: values.len() });
        }
        Ok(Self { grid: grid.clone(), values })
    }

    /// Samples `f(s, theta)`.
    pub fn from_fn(grid: &PolarGrid, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let values = (0..grid.s_count)
            .flat_map(|i| (0..grid.m).map(move |j| (i, j)))
            .map(|(i, j)| f(grid.s(i), grid.theta(j)))
            .collect();
        Self { grid: grid.clone(), values }
    }

    /// Same vector `v` of angular values in every row.
    pub fn constant_in_s(grid: &PolarGrid, v: &[Complex64]) -> Result<Self> {
        if v.len() != grid.m {
            return Err(Error::DimensionMismatch { expected: grid.m, found: v.len() });
        }
        Ok(Self { grid: grid.clone(), values: v.repeat(grid.s_count) })
    }

    pub fn grid(&self) -> &PolarGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.grid.m + j]
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        let m = self.grid.m;
        &self.values[i * m..(i + 1) * m]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [Complex64] {
        let m = self.grid.m;
        &mut self.values[i * m..(i + 1) * m]
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self { grid: self.grid.clone(), values: self.values.iter().map(|&z| f(z)).collect() }
    }

    /// Pointwise multiplication by `f(s, theta)`.
    pub fn multiply(&self, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let mut out = self.clone();
        for i in 0..self.grid.s_count {
            let s = self.grid.s(i);
            for j in 0..self.grid.m {
                out.values[i * self.grid.m + j] *= f(s, self.grid.theta(j));
            }
        }
        out
    }

    /// Multiplication by a function of `lambda` only.
    pub fn multiply_radial(&self, f: impl Fn(f64) -> f64) -> Self {
        let mut out = self.clone();
        for i in 0..self.grid.s_count {
            let c = f(self.grid.lambda(i));
            out.row_mut(i).iter_mut().for_each(|z| *z *= c);
        }
        out
    }

    pub fn scale(&self, c: impl Into<Complex64>) -> Self {
        let c = c.into();
        self.map(|z| z * c)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    fn zip(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self { grid: self.grid.clone(), values })
    }

    /// `d/ds`, order-8 finite differences, one-sided near the ends.
    pub fn ds(&self) -> Self {
        let (s_count, m) = (self.grid.s_count, self.grid.m);
        let inv_h = 1.0 / self.grid.h();
        let st = self.grid.stencil();
        let mut out = Self::zeros(&self.grid);
        for i in 0..s_count {
            for j in 0..m {
                out.values[i * m + j] = st.apply_at(i, |k| self.values[k * m + j]) * inv_h;
            }
        }
        out
    }

    /// `d^b/dtheta^b`, spectral.
    pub fn dtheta(&self, b: u32) -> Self {
        let mut out = Self::zeros(&self.grid);
        for i in 0..self.grid.s_count {
            let m = self.grid.m;
            let (src, dst) = (&self.values[i * m..(i + 1) * m], &mut out.values[i * m..(i + 1) * m]);
            self.grid.dtheta_row(src, b, dst);
        }
        out
    }

    /// Largest `|phi|` on the first and last `cells` rows, relative to the
    /// largest `|phi|` overall (0 for the zero section).
    pub fn collar_relative_max(&self, cells: usize) -> f64 {
        let max_all = self.values.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if max_all == 0.0 {
            return 0.0;
        }
        let s = self.grid.s_count;
        let cells = cells.min(s);
        let collar = (0..cells).chain(s - cells..s);
        collar
            .flat_map(|i| self.row(i).iter().map(|z| z.norm()))
            .fold(0.0, f64::max)
            / max_all
    }

    pub fn check_interior_support(&self, cells: usize, tol: f64) -> Result<()> {
        let r = self.collar_relative_max(cells);
        if r > tol {
            Err(Error::BoundarySupported(r))
        } else {
            Ok(())
        }
    }
}

/// Values of `T phi`, the section seen in the fixed space `V = L^2(S^1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrivializedSection {
    grid: PolarGrid,
    values: Vec<Complex64>,
}

impl TrivializedSection {
    pub fn grid(&self) -> &PolarGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        let m = self.grid.m;
        &self.values[i * m..(i + 1) * m]
    }

    /// Norm of row `i` in `V`.
    pub fn fiber_norm(&self, i: usize) -> f64 {
        (self.grid.v_weight() * self.row(i).iter().map(|z| z.norm_sqr()).sum::<f64>()).sqrt()
    }
}

pub fn trivialize(phi: &PolarSection) -> TrivializedSection {
    let grid = phi.grid.clone();
    let mut values = phi.values.clone();
    for i in 0..grid.s_count {
        let w = trivialization_weight(grid.n, grid.lambda(i));
        values[i * grid.m..(i + 1) * grid.m].iter_mut().for_each(|z| *z *= w);
    }
    TrivializedSection { grid, values }
}

pub fn untrivialize(t: &TrivializedSection) -> PolarSection {
    let grid = t.grid.clone();
    let mut values = t.values.clone();
    for i in 0..grid.s_count {
        let w = trivialization_weight(grid.n, grid.lambda(i));
        values[i * grid.m..(i + 1) * grid.m].iter_mut().for_each(|z| *z /= w);
    }
    PolarSection { grid, values }
}

/// `<phi(lambda_i), psi(lambda_i)>` in the fiber, antilinear in `phi`.
pub fn fiber_inner(phi: &PolarSection, psi: &PolarSection, i: usize) -> Result<Complex64> {
    phi.grid.check_same(&psi.grid)?;
    if i >= phi.grid.s_count {
        return Err(Error::IndexOutOfRange(format!("row {i} of {}", phi.grid.s_count)));
    }
    Ok(row_inner(&phi.grid, phi.row(i), psi.row(i)))
}

pub(crate) fn row_inner(grid: &PolarGrid, a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<Complex64>() * grid.fiber_weight()
}

pub fn fiber_norm(phi: &PolarSection, i: usize) -> f64 {
    row_inner(&phi.grid, phi.row(i), phi.row(i)).re.max(0.0).sqrt()
}

/// `int <phi(lambda), psi(lambda)>_lambda d lambda`.
pub fn direct_integral_inner(phi: &PolarSection, psi: &PolarSection) -> Result<Complex64> {
    phi.grid.check_same(&psi.grid)?;
    let g = &phi.grid;
    Ok((0..g.s_count).map(|i| row_inner(g, phi.row(i), psi.row(i)) * g.lambda_weight(i)).sum())
}

pub fn direct_integral_norm(phi: &PolarSection) -> f64 {
    direct_integral_inner(phi, phi).map(|z| z.re.max(0.0).sqrt()).unwrap_or(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> PolarGrid {
        PolarGrid::default()
    }

    #[test]
    fn default_grid_geometry() {
        let g = grid();
        assert_eq!(g.h(), 1.0 / 64.0);
        assert_eq!(g.row_of_lambda(1.0).unwrap(), 128);
        assert_eq!(g.row_of_lambda(1f64.exp()).unwrap(), 192);
        assert!(g.row_of_lambda(1.01).is_err());
        assert_eq!(g.shift_rows(0.25), Some(32));
        assert_eq!(g.shift_rows(g.h() / 2.0), Some(1));
        assert_eq!(g.shift_rows(0.01), None);
        assert_eq!(g.rows_in_interval(1.0, 1f64.exp()).unwrap(), 128..193);
        assert!(g.rows_in_interval(0.01, 1.0).is_err());
    }

    #[test]
    fn grid_validation() {
        assert_eq!(PolarGrid::new(3, 129, 64, -2.0, 2.0).unwrap_err(), Error::UnsupportedDimension(3));
        assert!(PolarGrid::new(2, 129, 63, -2.0, 2.0).is_err());
        assert!(PolarGrid::new(2, 129, 64, 2.0, -2.0).is_err());
        assert!(matches!(PolarGrid::new(2, 5, 64, -2.0, 2.0), Err(Error::StencilTooShort(5))));
    }

    #[test]
    fn fiber_quadrature_closed_form() {
        // <1,1>_lambda = (2 sqrt(lambda))^{-1} * 2 pi sqrt(lambda) = pi
        let g = grid();
        let one = PolarSection::from_fn(&g, |_, _| Complex64::new(1.0, 0.0));
        for i in [0, 40, 256] {
            assert!((fiber_inner(&one, &one, i).unwrap().re - PI).abs() < 1e-13);
        }
    }

    #[test]
    fn angular_modes_are_orthogonal() {
        let g = grid();
        let bump = |s: f64| (-s * s / 0.18).exp();
        let a = PolarSection::from_fn(&g, |s, t| Complex64::from_polar(bump(s), t));
        let b = PolarSection::from_fn(&g, |s, t| Complex64::from_polar(bump(s), 2.0 * t));
        assert!(direct_integral_inner(&a, &b).unwrap().norm() < 1e-12);
    }

    #[test]
    fn trivialization_is_fiber_unitary_and_invertible() {
        let g = grid();
        let phi = PolarSection::from_fn(&g, |s, t| Complex64::new(s.cos(), (3.0 * t).sin()));
        let t = trivialize(&phi);
        for i in 0..g.s_count() {
            assert!((t.fiber_norm(i) - fiber_norm(&phi, i)).abs() < 1e-12);
        }
        let back = untrivialize(&t);
        for (a, b) in back.values().iter().zip(phi.values()) {
            assert!((a - b).norm() < 1e-14);
        }
        // n = 2: constant weight
        assert_eq!(t.values()[5], phi.values()[5] * std::f64::consts::FRAC_1_SQRT_2);
    }

    #[test]
    fn trivialization_pointwise_three_dimensions() {
        let z = [0.0, 0.6, 0.8];
        let v = trivialize_pointwise(3, |q| q[2], 4.0, &z);
        let expected = std::f64::consts::FRAC_1_SQRT_2 * 4f64.powf(0.25) * 2.0 * 0.8;
        assert!((v - expected).abs() < 1e-14);
    }

    #[test]
    fn derivatives_on_smooth_data() {
        let g = grid();
        let phi = PolarSection::from_fn(&g, |s, t| Complex64::new((-s * s / 0.18).exp(), 0.0) * Complex64::from_polar(1.0, 2.0 * t));
        let ds = phi.ds();
        let dt = phi.dtheta(1);
        let dtt = phi.dtheta(2);
        for i in 0..g.s_count() {
            let s = g.s(i);
            for j in 0..g.m() {
                let base = phi.get(i, j);
                let exact_ds = base * (-2.0 * s / 0.18);
                assert!((ds.get(i, j) - exact_ds).norm() < 1e-7);
                assert!((dt.get(i, j) - base * Complex64::new(0.0, 2.0)).norm() < 1e-12);
                assert!((dtt.get(i, j) + base * 4.0).norm() < 1e-11);
            }
        }
        let horizontal = PolarSection::from_fn(&g, |_, t| Complex64::from_polar(1.0, 3.0 * t));
        assert!(horizontal.ds().values().iter().all(|z| *z == Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn collar_detection() {
        let g = grid();
        let inner = PolarSection::from_fn(&g, |s, _| Complex64::new((-s * s / 0.18).exp(), 0.0));
        assert!(inner.check_interior_support(5, 1e-6).is_ok());
        let flat = PolarSection::from_fn(&g, |_, _| Complex64::new(1.0, 0.0));
        assert!(matches!(flat.check_interior_support(5, 1e-6), Err(Error::BoundarySupported(_))));
        assert_eq!(PolarSection::zeros(&g).collar_relative_max(5), 0.0);
    }
}
