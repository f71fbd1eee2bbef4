use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numeric::spectral_norm;

/// Uniform grid on `[-L, L]^n`, `x_k = -L + (k + 1/2) dx`, `dx = 2L/N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CartesianGrid {
    n: usize,
    points: usize,
    half_width: f64,
}

impl CartesianGrid {
    pub fn new(n: usize, points: usize, half_width: f64) -> Result<Self> {
        if !(1..=2).contains(&n) {
            return Err(Error::UnsupportedDimension(n));
        }
        if points < 2 || !points.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!("N = {points} must be even and >= 2")));
        }
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::InvalidGrid(format!("half-width L = {half_width} must be positive")));
        }
        Ok(Self { n, points, half_width })
    }

    /// Grid with `dx^2 = 2 pi / N`, so the momentum grid coincides with the
    /// position grid.
    pub fn self_dual(n: usize, points: usize) -> Result<Self> {
        let dx = (2.0 * PI / points as f64).sqrt();
        Self::new(n, points, points as f64 * dx / 2.0)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / self.points as f64
    }

    pub fn x(&self, k: usize) -> f64 {
        -self.half_width + (k as f64 + 0.5) * self.dx()
    }

    /// `N^n`.
    pub fn len(&self) -> usize {
        self.points.pow(self.n as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Coordinates of flat index `idx` (first axis slowest).
    pub fn coords(&self, idx: usize) -> Vec<f64> {
        match self.n {
            1 => vec![self.x(idx)],
            _ => vec![self.x(idx / self.points), self.x(idx % self.points)],
        }
    }

    /// `p_j = 2 pi j / (N dx)`.
    pub fn momentum(&self, j: i64) -> f64 {
        2.0 * PI * j as f64 / (self.points as f64 * self.dx())
    }

    pub fn is_self_dual(&self) -> bool {
        (self.dx() * self.dx() - 2.0 * PI / self.points as f64).abs() <= 1e-12
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CartesianGridFunction {
    grid: CartesianGrid,
    values: Vec<Complex64>,
}

impl CartesianGridFunction {
    pub fn from_values(grid: CartesianGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch { expected: grid.len(), found: values.len() });
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: CartesianGrid, f: impl Fn(&[f64]) -> Complex64) -> Self {
        let values = (0..grid.len()).map(|i| f(&grid.coords(i))).collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &CartesianGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// `dx^n sum conj(a) b`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let w = self.grid.dx().powi(self.grid.n as i32);
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| a.conj() * b).sum::<Complex64>() * w)
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).map(|z| z.re.max(0.0).sqrt()).unwrap_or(0.0)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Ok(Self { grid: self.grid, values })
    }

    pub fn scale(&self, c: impl Into<Complex64>) -> Self {
        let c = c.into();
        Self { grid: self.grid, values: self.values.iter().map(|z| z * c).collect() }
    }
}

/// Matrix acting on the values of a `CartesianGridFunction`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    grid: CartesianGrid,
    matrix: DMatrix<Complex64>,
}

impl DenseOperator {
    pub fn from_matrix(grid: CartesianGrid, matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != grid.len() || matrix.ncols() != grid.len() {
            return Err(Error::DimensionMismatch { expected: grid.len(), found: matrix.nrows() });
        }
        Ok(Self { grid, matrix })
    }

    pub fn identity(grid: CartesianGrid) -> Self {
        Self { grid, matrix: DMatrix::identity(grid.len(), grid.len()) }
    }

    pub fn multiplication(grid: CartesianGrid, f: impl Fn(&[f64]) -> Complex64) -> Self {
        let d: Vec<Complex64> = (0..grid.len()).map(|i| f(&grid.coords(i))).collect();
        Self { grid, matrix: DMatrix::from_diagonal(&DVector::from_vec(d)) }
    }

    /// Spectral `D_j = -i d/dx_j` with the Nyquist mode dropped.
    pub fn derivative(grid: CartesianGrid, axis: usize) -> Result<Self> {
        if axis >= grid.n {
            return Err(Error::IndexOutOfRange(format!("axis {axis} in dimension {}", grid.n)));
        }
        let n = grid.points;
        let d1 = DMatrix::from_fn(n, n, |k, l| {
            let half = n as i64 / 2;
            let diff = k as f64 - l as f64;
            ((-half + 1)..half)
                .map(|j| Complex64::from_polar(grid.momentum(j), 2.0 * PI * j as f64 * diff / n as f64))
                .sum::<Complex64>()
                / n as f64
        });
        let matrix = match (grid.n, axis) {
            (1, _) => d1,
            (_, 0) => d1.kronecker(&DMatrix::identity(n, n)),
            _ => DMatrix::<Complex64>::identity(n, n).kronecker(&d1),
        };
        Ok(Self { grid, matrix })
    }

    pub fn grid(&self) -> &CartesianGrid {
        &self.grid
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    pub fn apply(&self, f: &CartesianGridFunction) -> Result<CartesianGridFunction> {
        if f.grid != self.grid {
            return Err(Error::GridMismatch);
        }
        let v = &self.matrix * DVector::from_column_slice(&f.values);
        Ok(CartesianGridFunction { grid: self.grid, values: v.as_slice().to_vec() })
    }

    pub fn adjoint(&self) -> Self {
        Self { grid: self.grid, matrix: self.matrix.adjoint() }
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self { grid: self.grid, matrix: &self.matrix * &other.matrix })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self { grid: self.grid, matrix: &self.matrix + &other.matrix })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self { grid: self.grid, matrix: &self.matrix - &other.matrix })
    }

    pub fn scale(&self, c: impl Into<Complex64>) -> Self {
        let c = c.into();
        Self { grid: self.grid, matrix: self.matrix.map(|z| z * c) }
    }

    pub fn operator_norm(&self) -> f64 {
        spectral_norm(&self.matrix)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }
}

/// Fixed band-limited test functions on a one-dimensional grid, unit norm.
pub fn cartesian_battery(grid: CartesianGrid) -> Vec<CartesianGridFunction> {
    let gauss = |x: f64, c: f64, w: f64| (-(x - c) * (x - c) / (2.0 * w * w)).exp();
    let profiles: Vec<Box<dyn Fn(&[f64]) -> Complex64>> = match grid.n {
        1 => vec![
            Box::new(move |x| Complex64::new(gauss(x[0], 0.0, 1.0), 0.0)),
            Box::new(move |x| Complex64::new(x[0] * gauss(x[0], 0.0, 1.0), 0.0)),
            Box::new(move |x| Complex64::new((2.0 * x[0] * x[0] - 1.0) * gauss(x[0], 0.0, 1.0), 0.0)),
            Box::new(move |x| Complex64::from_polar(gauss(x[0], 0.5, 1.0), x[0])),
            Box::new(move |x| Complex64::new(x[0] * x[0] * gauss(x[0], -0.3, 0.8), 0.0)),
            Box::new(move |x| Complex64::from_polar(gauss(x[0], -1.0, 1.2), -0.5 * x[0])),
        ],
        _ => vec![
            Box::new(move |x| Complex64::new(gauss(x[0], 0.0, 1.0) * gauss(x[1], 0.0, 1.0), 0.0)),
            Box::new(move |x| Complex64::new(x[0] * gauss(x[0], 0.3, 1.0) * gauss(x[1], 0.0, 0.9), 0.0)),
            Box::new(move |x| Complex64::from_polar(gauss(x[0], 0.0, 1.1) * gauss(x[1], -0.4, 1.0), x[1])),
            Box::new(move |x| Complex64::new(x[0] * x[1] * gauss(x[0], 0.0, 1.0) * gauss(x[1], 0.0, 1.0), 0.0)),
        ],
    };
    profiles
        .into_iter()
        .map(|f| {
            let g = CartesianGridFunction::from_fn(grid, f);
            let n = g.norm();
            g.scale(1.0 / n)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_geometry() {
        let g = CartesianGrid::new(1, 64, 8.0).unwrap();
        assert_eq!(g.dx(), 0.25);
        assert_eq!(g.x(0), -7.875);
        assert_eq!(g.x(63), 7.875);
        assert!(CartesianGrid::new(3, 8, 1.0).is_err());
        assert!(CartesianGrid::new(1, 7, 1.0).is_err());
        let sd = CartesianGrid::self_dual(1, 64).unwrap();
        assert!(sd.is_self_dual());
        assert!((sd.momentum(1) - sd.dx()).abs() < 1e-14);
        let g2 = CartesianGrid::new(2, 4, 1.0).unwrap();
        assert_eq!(g2.coords(6), vec![g2.x(1), g2.x(2)]);
    }

    #[test]
    fn spectral_derivative_of_a_gaussian() {
        let g = CartesianGrid::new(1, 64, 8.0).unwrap();
        let f = CartesianGridFunction::from_fn(g, |x| Complex64::new((-x[0] * x[0] / 2.0).exp(), 0.0));
        let d = DenseOperator::derivative(g, 0).unwrap().apply(&f).unwrap();
        for k in 0..64 {
            let x = g.x(k);
            let exact = Complex64::new(0.0, x * (-x * x / 2.0).exp());
            assert!((d.values()[k] - exact).norm() < 1e-12);
        }
        assert!(DenseOperator::derivative(g, 1).is_err());
    }

    #[test]
    fn derivative_is_hermitian() {
        let g = CartesianGrid::new(2, 8, 3.0).unwrap();
        for axis in 0..2 {
            let d = DenseOperator::derivative(g, axis).unwrap();
            assert!((d.matrix() - d.matrix().adjoint()).camax() < 1e-13);
        }
    }

    #[test]
    fn battery_is_normalized() {
        for g in [CartesianGrid::new(1, 64, 8.0).unwrap(), CartesianGrid::new(2, 24, 6.0).unwrap()] {
            for f in cartesian_battery(g) {
                assert!((f.norm() - 1.0).abs() < 1e-13);
            }
        }
    }
}
