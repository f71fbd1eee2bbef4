//! Transfer between the polar grid and Cartesian box grids in the plane.

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::grid::{PolarGrid, PolarSection};
use crate::error::{Error, Result};
use crate::numeric::lagrange_weights;
use crate::weyl::{CartesianGrid, CartesianGridFunction};

fn check_plane(grid: &CartesianGrid) -> Result<()> {
    if grid.n() != 2 {
        return Err(Error::UnsupportedDimension(grid.n()));
    }
    Ok(())
}

/// The box must contain the outer circle `r = r_max`, and its spacing must
/// put at least two points across the widest angular cell `r_max * dtheta`.
pub fn check_coverage(polar: &PolarGrid, cart: &CartesianGrid) -> Result<()> {
    check_plane(cart)?;
    let r_max = polar.r_max();
    if cart.half_width() < r_max {
        return Err(Error::Coverage(format!("half-width {} < outer radius {r_max}", cart.half_width())));
    }
    let cell = r_max * polar.dtheta();
    if cart.dx() > cell / 2.0 {
        return Err(Error::Coverage(format!("spacing {} > half the angular cell {cell}", cart.dx())));
    }
    Ok(())
}

/// 4-point Lagrange stencil around the fractional index `x` within `0..len`.
fn cubic_stencil(x: f64, len: usize) -> (usize, Vec<f64>) {
    let start = (x.floor() as isize - 1).clamp(0, len as isize - 4) as usize;
    let nodes: Vec<f64> = (start..start + 4).map(|k| k as f64).collect();
    (start, lagrange_weights(x, &nodes))
}

/// Rows of `phi` in angular Fourier coefficients, Nyquist split evenly.
fn row_spectra(phi: &PolarSection) -> Vec<Vec<Complex64>> {
    let g = phi.grid();
    let m = g.m();
    let fft = FftPlanner::new().plan_fft_forward(m);
    (0..g.s_count())
        .map(|i| {
            let mut v = phi.row(i).to_vec();
            fft.process(&mut v);
            v.iter_mut().for_each(|z| *z /= m as f64);
            v
        })
        .collect()
}

fn trig_eval(coeffs: &[Complex64], theta: f64) -> Complex64 {
    let m = coeffs.len();
    let half = m / 2;
    let mut out = Complex64::new(0.0, 0.0);
    for (k, c) in coeffs.iter().enumerate() {
        out += if k < half {
            c * Complex64::from_polar(1.0, k as f64 * theta)
        } else if k == half {
            c * (half as f64 * theta).cos()
        } else {
            c * Complex64::from_polar(1.0, (k as f64 - m as f64) * theta)
        };
    }
    out
}

/// Samples a polar section on a Cartesian grid: cubic in `s`, trigonometric
/// in `theta`, zero outside the annulus.
pub fn resample_cartesian(phi: &PolarSection, grid: CartesianGrid) -> Result<CartesianGridFunction> {
    check_coverage(phi.grid(), &grid)?;
    let g = phi.grid();
    let spectra = row_spectra(phi);
    let values = (0..grid.len())
        .map(|idx| {
            let x = grid.coords(idx);
            let lambda = x[0] * x[0] + x[1] * x[1];
            if lambda == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let s = lambda.ln();
            if s < g.s_min() || s > g.s_max() {
                return Complex64::new(0.0, 0.0);
            }
            let theta = x[1].atan2(x[0]);
            let (start, w) = cubic_stencil((s - g.s_min()) / g.h(), g.s_count());
            w.iter().enumerate().map(|(k, wk)| trig_eval(&spectra[start + k], theta) * wk).sum()
        })
        .collect();
    CartesianGridFunction::from_values(grid, values)
}

/// Samples a Cartesian grid function on the polar grid by bicubic Lagrange
/// interpolation.
pub fn resample_polar(f: &CartesianGridFunction, polar: &PolarGrid) -> Result<PolarSection> {
    let cart = *f.grid();
    check_coverage(polar, &cart)?;
    let n = cart.points();
    let index = |x: f64| (x + cart.half_width()) / cart.dx() - 0.5;
    Ok(PolarSection::from_fn(polar, |s, theta| {
        let r = (s / 2.0).exp();
        let (i0, wx) = cubic_stencil(index(r * theta.cos()), n);
        let (j0, wy) = cubic_stencil(index(r * theta.sin()), n);
        let mut out = Complex64::new(0.0, 0.0);
        for (a, wa) in wx.iter().enumerate() {
            for (b, wb) in wy.iter().enumerate() {
                out += f.values()[(i0 + a) * n + j0 + b] * (wa * wb);
            }
        }
        out
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert_field::battery::battery;
    use crate::hilbert_field::grid::{direct_integral_inner, direct_integral_norm};

    #[test]
    fn coverage_is_enforced() {
        let p = PolarGrid::default();
        assert!(check_coverage(&p, &CartesianGrid::new(2, 64, 2.8).unwrap()).is_ok());
        assert!(matches!(check_coverage(&p, &CartesianGrid::new(2, 64, 2.0).unwrap()), Err(Error::Coverage(_))));
        assert!(matches!(check_coverage(&p, &CartesianGrid::new(2, 16, 2.8).unwrap()), Err(Error::Coverage(_))));
        assert!(check_coverage(&p, &CartesianGrid::new(1, 64, 2.8).unwrap()).is_err());
    }

    #[test]
    fn constants_resample_exactly() {
        let p = PolarGrid::default();
        let c = CartesianGrid::new(2, 64, 2.8).unwrap();
        let one = CartesianGridFunction::from_fn(c, |_| Complex64::new(1.0, 0.0));
        let back = resample_polar(&one, &p).unwrap();
        assert!(back.values().iter().all(|z| (z - 1.0).norm() < 1e-12));
        let polar_one = PolarSection::from_fn(&p, |_, _| Complex64::new(1.0, 0.0));
        let cart = resample_cartesian(&polar_one, c).unwrap();
        for (idx, v) in cart.values().iter().enumerate() {
            let x = c.coords(idx);
            let s = (x[0] * x[0] + x[1] * x[1]).ln();
            if s > p.s_min() && s < p.s_max() {
                assert!((v - 1.0).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn parseval_against_cartesian_quadrature() {
        let p = PolarGrid::default();
        let c = CartesianGrid::new(2, 64, 2.8).unwrap();
        let b = battery(&p);
        for (phi, psi) in [(&b[0], &b[0]), (&b[1], &b[5]), (&b[3], &b[7])] {
            let polar = direct_integral_inner(phi, psi).unwrap();
            let cart = resample_cartesian(phi, c).unwrap().inner(&resample_cartesian(psi, c).unwrap()).unwrap();
            assert!((polar - cart).norm() <= 1e-3 * (1.0 + polar.norm()), "{polar} vs {cart}");
        }
    }

    #[test]
    fn round_trip_is_accurate() {
        let p = PolarGrid::default();
        let c = CartesianGrid::new(2, 128, 2.8).unwrap();
        for phi in battery(&p).iter().step_by(3) {
            let back = resample_polar(&resample_cartesian(phi, c).unwrap(), &p).unwrap();
            let err = direct_integral_norm(&back.sub(phi).unwrap());
            assert!(err <= 1e-3, "{err}");
        }
    }
}
