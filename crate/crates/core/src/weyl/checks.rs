//! Numerical checks of the Weyl calculus: adjoints, metaplectic covariance
//! under dilations, commutation with `Q^2` and backend agreement.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::cartesian::{cartesian_battery, CartesianGrid, CartesianGridFunction, DenseOperator};
use super::diffop::{quantize_diffop, quantize_diffop_cartesian};
use super::kernel::{quantize_kernel_symbol, DEFAULT_ENTRY_CAP};
use crate::error::Result;
use crate::hilbert_field::battery::battery;
use crate::hilbert_field::{
    dilation_group, direct_integral_inner, direct_integral_norm, resample_cartesian, PolarGrid, PolarSection,
};
use crate::numeric::spectral_norm;
use crate::phase_space::{flow_pullback, LinearSymplecticMap, PolySymbol};

/// Times for the `e^{it|q|^2}` commutation check.
pub const COMMUTATION_TIMES: [f64; 3] = [0.1, 0.7, 2.0];

/// `||Op(u)^* - Op(conj u)||` in operator norm, kernel backend.
pub fn adjoint_defect_kernel(u: &PolySymbol, grid: CartesianGrid) -> Result<f64> {
    let a = quantize_kernel_symbol(u, grid, DEFAULT_ENTRY_CAP)?;
    let b = quantize_kernel_symbol(&u.conj(), grid, DEFAULT_ENTRY_CAP)?;
    Ok(spectral_norm(&(a.matrix().adjoint() - b.matrix())))
}

/// `max |<Op(u) phi, psi> - <phi, Op(conj u) psi>|` over battery pairs, polar
/// backend.
pub fn adjoint_defect_diffop(u: &PolySymbol, grid: &PolarGrid) -> Result<f64> {
    let a = quantize_diffop(u, grid)?;
    let b = quantize_diffop(&u.conj(), grid)?;
    let sections = battery(grid);
    let applied_a = sections.iter().map(|phi| a.apply(phi)).collect::<Result<Vec<_>>>()?;
    let applied_b = sections.iter().map(|psi| b.apply(psi)).collect::<Result<Vec<_>>>()?;
    let mut worst: f64 = 0.0;
    for (phi, a_phi) in sections.iter().zip(&applied_a) {
        for (psi, b_psi) in sections.iter().zip(&applied_b) {
            let lhs = direct_integral_inner(a_phi, psi)?;
            let rhs = direct_integral_inner(phi, b_psi)?;
            worst = worst.max((lhs - rhs).norm());
        }
    }
    Ok(worst)
}

/// Band-limited interpolation matrix from the grid to the points `e^t x_k`,
/// rows for points outside the box set to zero.
fn dilation_matrix_1d(grid: &CartesianGrid, t: f64) -> DMatrix<Complex64> {
    let n = grid.points();
    let half = n as i64 / 2;
    let scale = t.exp();
    DMatrix::from_fn(n, n, |k, l| {
        let y = scale * grid.x(k);
        if y.abs() > grid.half_width() {
            return Complex64::new(0.0, 0.0);
        }
        let d = y - grid.x(l);
        ((-half + 1)..half).map(|j| Complex64::from_polar(1.0, grid.momentum(j) * d)).sum::<Complex64>() / n as f64
    })
}

/// `W_t f(x) = e^{nt/2} f(e^t x)` on a Cartesian grid by spectral
/// resampling. This is interpolated (never an exact index map), so the
/// result is accurate only for band-limited `f` decaying inside the box.
pub fn metaplectic_dilation(t: f64, f: &CartesianGridFunction) -> CartesianGridFunction {
    let grid = *f.grid();
    let e = dilation_matrix_1d(&grid, t);
    let m = match grid.n() {
        1 => e,
        _ => e.kronecker(&e),
    };
    let weight = (grid.n() as f64 * t / 2.0).exp();
    let v = m * DVector::from_column_slice(f.values()) * Complex64::new(weight, 0.0);
    CartesianGridFunction::from_values(grid, v.as_slice().to_vec()).expect("same grid")
}

/// `max ||Op(u o r_t) phi - W_t Op(u) W_{-t} phi||` over the polar battery.
pub fn covariance_defect_polar(u: &PolySymbol, t: f64, grid: &PolarGrid) -> Result<f64> {
    let pulled = flow_pullback(u, &LinearSymplecticMap::dilation(u.n(), t))?;
    let lhs_op = quantize_diffop(&pulled, grid)?;
    let op = quantize_diffop(u, grid)?;
    let mut worst: f64 = 0.0;
    for phi in battery(grid) {
        let lhs = lhs_op.apply(&phi)?;
        let inner = op.apply(&dilation_group(-t, &phi).section)?;
        let rhs = dilation_group(t, &inner).section;
        let diff = lhs.sub(&rhs)?;
        worst = worst.max(direct_integral_norm(&restrict_to_image(&diff, t)));
    }
    Ok(worst)
}

/// Zeroes the rows where `W_t` reads past the end of the grid. There the
/// right-hand side is cut off by the finite `s` range rather than by any
/// failure of covariance.
fn restrict_to_image(phi: &PolarSection, t: f64) -> PolarSection {
    let g = phi.grid();
    let mut out = phi.clone();
    for i in 0..g.s_count() {
        let src = g.s(i) + 2.0 * t;
        if src < g.s_min() - 1e-12 || src > g.s_max() + 1e-12 {
            out.row_mut(i).iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
        }
    }
    out
}

/// Relative covariance defect for the kernel backend on the Cartesian
/// battery.
pub fn covariance_defect_cartesian(u: &PolySymbol, t: f64, grid: CartesianGrid) -> Result<f64> {
    let pulled = flow_pullback(u, &LinearSymplecticMap::dilation(u.n(), t))?;
    let lhs_op = quantize_kernel_symbol(&pulled, grid, DEFAULT_ENTRY_CAP)?;
    let op = quantize_kernel_symbol(u, grid, DEFAULT_ENTRY_CAP)?;
    let mut worst: f64 = 0.0;
    for f in cartesian_battery(grid) {
        let lhs = lhs_op.apply(&f)?;
        let rhs = metaplectic_dilation(t, &op.apply(&metaplectic_dilation(-t, &f))?);
        worst = worst.max(lhs.sub(&rhs)?.norm() / lhs.norm().max(f64::MIN_POSITIVE));
    }
    Ok(worst)
}

/// Cartesian covariance defects on `[-L, L]^n` for each `N` in `sizes`.
pub fn covariance_refinement(u: &PolySymbol, t: f64, half_width: f64, sizes: &[usize]) -> Result<Vec<(usize, f64)>> {
    sizes
        .iter()
        .map(|&n| {
            let g = CartesianGrid::new(u.n(), n, half_width)?;
            Ok((n, covariance_defect_cartesian(u, t, g)?))
        })
        .collect()
}

/// True when each refinement step at most doubles the defect.
pub fn is_monotone_within_factor_two(defects: &[(usize, f64)]) -> bool {
    defects.windows(2).all(|w| w[1].1 <= 2.0 * w[0].1)
}

/// `max ||[Op(u), e^{it|q|^2}] phi||` over the battery and
/// [`COMMUTATION_TIMES`].
pub fn q2_commutation_defect(u: &PolySymbol, grid: &PolarGrid) -> Result<f64> {
    q2_commutation_defect_at(u, grid, &COMMUTATION_TIMES)
}

pub fn q2_commutation_defect_at(u: &PolySymbol, grid: &PolarGrid, times: &[f64]) -> Result<f64> {
    let op = quantize_diffop(u, grid)?;
    let mut worst: f64 = 0.0;
    for &t in times {
        let phase = |s: f64, _: f64| Complex64::from_polar(1.0, t * s.exp());
        for phi in battery(grid) {
            let a = op.apply(&phi.multiply(phase))?;
            let b = op.apply(&phi)?.multiply(phase);
            worst = worst.max(direct_integral_norm(&a.sub(&b)?));
        }
    }
    Ok(worst)
}

/// Disagreement of the kernel and symmetrized-product backends on the
/// one-dimensional battery, relative to `max(||Op(u) f||, ||f||)`.
pub fn backend_agreement_1d(u: &PolySymbol, grid: CartesianGrid) -> Result<f64> {
    let kernel = quantize_kernel_symbol(u, grid, DEFAULT_ENTRY_CAP)?;
    let ordered = quantize_diffop_cartesian(u, grid)?;
    relative_disagreement(&kernel, &ordered, &cartesian_battery(grid))
}

fn relative_disagreement(a: &DenseOperator, b: &DenseOperator, fs: &[CartesianGridFunction]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for f in fs {
        let x = a.apply(f)?;
        let y = b.apply(f)?;
        worst = worst.max(x.sub(&y)?.norm() / y.norm().max(f.norm()));
    }
    Ok(worst)
}

/// Planar test functions `exp(-(r - 1.4)^2 / (2 * 0.2^2)) e^{i m theta}` for
/// the cross-backend comparison.
pub const PLANAR_MODES: [i32; 4] = [0, 1, -2, 3];
const PLANAR_CENTER: f64 = 1.4;
const PLANAR_WIDTH: f64 = 0.2;

pub fn planar_test_function(m: i32, x: f64, y: f64) -> Complex64 {
    let r = x.hypot(y);
    let radial = (-(r - PLANAR_CENTER).powi(2) / (2.0 * PLANAR_WIDTH * PLANAR_WIDTH)).exp();
    Complex64::from_polar(radial, m as f64 * y.atan2(x))
}

/// Disagreement between the kernel backend on `cart` and the polar backend,
/// the polar output resampled to `cart`, relative to
/// `max(||Op(u) f||, ||f||)`.
pub fn backend_agreement_2d(u: &PolySymbol, polar: &PolarGrid, cart: CartesianGrid) -> Result<f64> {
    let kernel = quantize_kernel_symbol(u, cart, DEFAULT_ENTRY_CAP)?;
    let ordered = quantize_diffop(u, polar)?;
    let mut worst: f64 = 0.0;
    for m in PLANAR_MODES {
        let f_cart = CartesianGridFunction::from_fn(cart, |x| planar_test_function(m, x[0], x[1]));
        let f_polar = PolarSection::from_fn(polar, |s, th| {
            let r = (s / 2.0).exp();
            planar_test_function(m, r * th.cos(), r * th.sin())
        });
        let k = kernel.apply(&f_cart)?;
        let p = resample_cartesian(&ordered.apply(&f_polar)?, cart)?;
        // l12 annihilates the m = 0 function, so scale by the input as well
        worst = worst.max(k.sub(&p)?.norm() / p.norm().max(f_cart.norm()));
    }
    Ok(worst)
}

/// Default Cartesian grid for the planar cross-backend comparison: it covers
/// the default polar annulus with two points per outer angular cell.
pub fn default_planar_grid() -> CartesianGrid {
    CartesianGrid::new(2, 48, 2.8).expect("valid grid")
}

/// `pi^{-1/4} e^{-x^2/2}`.
pub fn hermite_ground_state(grid: CartesianGrid) -> CartesianGridFunction {
    CartesianGridFunction::from_fn(grid, |x| Complex64::new(PI.powf(-0.25) * (-x[0] * x[0] / 2.0).exp(), 0.0))
}
