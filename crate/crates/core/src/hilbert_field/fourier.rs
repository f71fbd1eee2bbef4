use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::weyl::{cartesian_battery, CartesianGrid, DenseOperator};

fn fourier_1d(grid: CartesianGrid) -> Result<DMatrix<Complex64>> {
    if !grid.is_self_dual() {
        return Err(Error::InvalidGrid("Fourier conjugation needs a self-dual grid".into()));
    }
    let n = grid.points();
    let norm = (n as f64).sqrt();
    Ok(DMatrix::from_fn(n, n, |j, k| Complex64::from_polar(1.0 / norm, -grid.x(j) * grid.x(k))))
}

/// Unitary discrete Fourier transform `F_jk = N^{-1/2} e^{-i x_j x_k}` on a
/// self-dual grid, tensored over axes.
pub fn fourier_matrix(grid: CartesianGrid) -> Result<DMatrix<Complex64>> {
    let f1 = fourier_1d(grid)?;
    Ok(match grid.n() {
        1 => f1,
        _ => f1.kronecker(&f1),
    })
}

/// `(f (x) f) m` without forming the Kronecker product.
fn apply_left(f1: &DMatrix<Complex64>, m: &DMatrix<Complex64>, dims: usize) -> DMatrix<Complex64> {
    if dims == 1 {
        return f1 * m;
    }
    let n = f1.nrows();
    let mut out = DMatrix::zeros(m.nrows(), m.ncols());
    let f1t = f1.transpose();
    for c in 0..m.ncols() {
        // column as an N x N array indexed (first axis, second axis)
        let x = DMatrix::from_fn(n, n, |i, j| m[(i * n + j, c)]);
        let y = f1 * x * &f1t;
        for i in 0..n {
            for j in 0..n {
                out[(i * n + j, c)] = y[(i, j)];
            }
        }
    }
    out
}

/// `F O F^{-1}`.
pub fn fourier_conjugate(op: &DenseOperator) -> Result<DenseOperator> {
    let grid = *op.grid();
    let f1 = fourier_1d(grid)?;
    let a = apply_left(&f1, op.matrix(), grid.n());
    let conj = apply_left(&f1, &a.adjoint(), grid.n()).adjoint();
    DenseOperator::from_matrix(grid, conj)
}

/// Spectral `Delta` on the grid.
pub fn spectral_laplacian(grid: CartesianGrid) -> Result<DenseOperator> {
    let g1 = CartesianGrid::new(1, grid.points(), grid.half_width())?;
    // D = -i d/dx, so Delta = -D^2 per axis
    let d = DenseOperator::derivative(g1, 0)?.into_matrix();
    let d2 = -(&d * &d);
    let m = match grid.n() {
        1 => d2,
        _ => {
            let id = DMatrix::<Complex64>::identity(grid.points(), grid.points());
            d2.kronecker(&id) + id.kronecker(&d2)
        }
    };
    DenseOperator::from_matrix(grid, m)
}

/// `max ||F Q^2 F^{-1} f + Delta f|| / ||Delta f||` over the Cartesian
/// battery of a self-dual grid.
pub fn laplacian_defect(grid: CartesianGrid) -> Result<f64> {
    let q2 = DenseOperator::multiplication(grid, |x| Complex64::new(x.iter().map(|v| v * v).sum(), 0.0));
    let lhs = fourier_conjugate(&q2)?;
    let minus_laplacian = spectral_laplacian(grid)?.scale(-1.0);
    let mut worst = 0.0f64;
    for f in cartesian_battery(grid) {
        let x = lhs.apply(&f)?;
        let y = minus_laplacian.apply(&f)?;
        worst = worst.max(x.sub(&y)?.norm() / y.norm().max(f64::MIN_POSITIVE));
    }
    Ok(worst)
}
