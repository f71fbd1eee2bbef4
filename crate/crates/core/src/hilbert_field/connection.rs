use num_complex::Complex64;

use super::flow::row_at_s;
use super::grid::{direct_integral_inner, fiber_inner, fiber_norm, PolarSection};
use crate::error::{Error, Result};
use crate::phase_space::RadialVectorField;

/// Rows of the collar a section must vanish on to count as interior.
pub const COLLAR_CELLS: usize = 5;
/// Relative size allowed on the collar.
pub const COLLAR_TOL: f64 = 1e-6;
/// Deepest iterated connection allowed in seminorms.
pub const MAX_SEMINORM_DEPTH: usize = 3;

/// The two expressions for the zeroth-order part of the connection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConnectionFormula {
    /// `((n-2)/4) phi_rad^{-1} X~(phi_rad)` with `phi_rad = |q|^2`.
    A,
    /// `(div X~ - div X o phi_rad) / 2`.
    B,
}

/// Scalar multiplying `phi` in `nabla_X phi = X~(phi) + c phi`.
pub fn connection_correction(x: &RadialVectorField, n: usize, lambda: f64, formula: ConnectionFormula) -> f64 {
    let a = x.a(lambda);
    let b = a / (2.0 * lambda);
    match formula {
        // X~(|q|^2) = b * 2|q|^2
        ConnectionFormula::A => (n as f64 - 2.0) / 4.0 * (2.0 * b * lambda) / lambda,
        ConnectionFormula::B => {
            let da = x.da(lambda);
            let db = da / (2.0 * lambda) - a / (2.0 * lambda * lambda);
            let div_lift = n as f64 * b + 2.0 * lambda * db;
            0.5 * (div_lift - da)
        }
    }
}

/// `nabla_X phi`. `X~(phi) = b(lambda) 2 d_s phi` with order-8 differences.
pub fn connection_apply(x: &RadialVectorField, phi: &PolarSection, formula: ConnectionFormula) -> PolarSection {
    let g = phi.grid();
    let n = g.n();
    let mut out = phi.ds();
    for i in 0..g.s_count() {
        let lambda = g.lambda(i);
        let lifted = 2.0 * x.euler_factor(lambda);
        let c = connection_correction(x, n, lambda, formula);
        let src = phi.row(i).to_vec();
        for (o, p) in out.row_mut(i).iter_mut().zip(src) {
            *o = *o * lifted + p * c;
        }
    }
    out
}

/// Derivative `a(lambda) d/dlambda = 2 b(lambda) d/ds` of a sequence sampled
/// on the rows of the grid.
pub(crate) fn vector_field_derivative(x: &RadialVectorField, phi: &PolarSection, f: &[Complex64]) -> Vec<Complex64> {
    let g = phi.grid();
    let st = g.stencil();
    (0..g.s_count())
        .map(|i| st.apply_at(i, |k| f[k]) * (2.0 * x.euler_factor(g.lambda(i)) / g.h()))
        .collect()
}

/// `max_i |X h(phi, psi) - h(nabla_X phi, psi) - h(phi, nabla_X psi)|` for
/// real `X`.
pub fn leibniz_defect(x: &RadialVectorField, phi: &PolarSection, psi: &PolarSection) -> Result<f64> {
    phi.grid().check_same(psi.grid())?;
    let g = phi.grid();
    let h: Vec<Complex64> = (0..g.s_count()).map(|i| fiber_inner(phi, psi, i)).collect::<Result<_>>()?;
    let xh = vector_field_derivative(x, phi, &h);
    let dphi = connection_apply(x, phi, ConnectionFormula::A);
    let dpsi = connection_apply(x, psi, ConnectionFormula::A);
    let mut worst = 0.0f64;
    for (i, xh_i) in xh.iter().enumerate() {
        let rhs = fiber_inner(&dphi, psi, i)? + fiber_inner(phi, &dpsi, i)?;
        worst = worst.max((xh_i - rhs).norm());
    }
    Ok(worst)
}

/// `sup_{lambda in C} |nabla_{X_1} ... nabla_{X_m} phi(lambda)|`.
pub fn seminorm(phi: &PolarSection, interval: (f64, f64), xs: &[RadialVectorField]) -> Result<f64> {
    if xs.len() > MAX_SEMINORM_DEPTH {
        return Err(Error::TooManyDerivatives { requested: xs.len(), max: MAX_SEMINORM_DEPTH });
    }
    let rows = phi.grid().rows_in_interval(interval.0, interval.1)?;
    // nabla_{X_1} is applied last
    let derived = xs.iter().rev().fold(phi.clone(), |acc, x| connection_apply(x, &acc, ConnectionFormula::A));
    Ok(rows.map(|i| fiber_norm(&derived, i)).fold(0.0, f64::max))
}

/// `H_X = -i (nabla_X + div X / 2)`.
pub fn hamiltonian_apply(x: &RadialVectorField, phi: &PolarSection) -> PolarSection {
    let nabla = connection_apply(x, phi, ConnectionFormula::A);
    let half_div = phi.multiply_radial(|l| 0.5 * x.da(l));
    nabla.add(&half_div).expect("same grid").scale(Complex64::new(0.0, -1.0))
}

/// `|<H_X phi, psi> - <phi, H_X psi>|`; both sections must vanish on the
/// boundary collar.
pub fn hx_symmetry_defect(x: &RadialVectorField, phi: &PolarSection, psi: &PolarSection) -> Result<f64> {
    phi.check_interior_support(COLLAR_CELLS, COLLAR_TOL)?;
    psi.check_interior_support(COLLAR_CELLS, COLLAR_TOL)?;
    let lhs = direct_integral_inner(&hamiltonian_apply(x, phi), psi)?;
    let rhs = direct_integral_inner(phi, &hamiltonian_apply(x, psi))?;
    Ok((lhs - rhs).norm())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HorizontalReport {
    pub horizontal: bool,
    /// `sup_lambda |nabla_{X_0} phi(lambda)|` over the whole grid.
    pub defect: f64,
    /// `max |phi(4 lambda) - 4^{-(n-2)/2} phi(lambda)|` over rows where
    /// `4 lambda` is still in range.
    pub homogeneity_defect: f64,
}

pub fn horizontal_test(phi: &PolarSection, tol: f64) -> HorizontalReport {
    let g = phi.grid();
    let x0 = RadialVectorField::x0();
    let derived = connection_apply(&x0, phi, ConnectionFormula::A);
    let defect = (0..g.s_count()).map(|i| fiber_norm(&derived, i)).fold(0.0, f64::max);
    let factor = 4f64.powf(-(g.n() as f64 - 2.0) / 2.0);
    let shift = 4f64.ln();
    let mut homogeneity_defect = 0.0f64;
    for i in 0..g.s_count() {
        if g.s(i) + shift > g.s_max() {
            break;
        }
        let far = row_at_s(phi, g.s(i) + shift);
        for (a, b) in far.iter().zip(phi.row(i)) {
            homogeneity_defect = homogeneity_defect.max((a - b * factor).norm());
        }
    }
    HorizontalReport { horizontal: defect <= tol, defect, homogeneity_defect }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert_field::battery::{battery, battery_profiles, horizontal_battery, Angular, BumpSection};
    use crate::hilbert_field::grid::PolarGrid;
    use std::f64::consts::PI;

    fn grid() -> PolarGrid {
        PolarGrid::default()
    }

    fn fields() -> Vec<RadialVectorField> {
        vec![RadialVectorField::x0(), RadialVectorField::monomial(2)]
    }

    #[test]
    fn horizontal_sections_have_zero_derivative() {
        let g = grid();
        for phi in horizontal_battery(&g) {
            let d = connection_apply(&RadialVectorField::x0(), &phi, ConnectionFormula::A);
            assert!(d.values().iter().all(|z| z.norm() == 0.0));
        }
    }

    #[test]
    fn x0_derivative_of_a_bump_matches_chain_rule() {
        let g = grid();
        for p in battery_profiles(&g) {
            let phi = p.sample(&g);
            let d = connection_apply(&RadialVectorField::x0(), &phi, ConnectionFormula::B);
            let exact = PolarSection::from_fn(&g, |s, t| p.angular.eval(t) * (2.0 * p.radial_ds(s)));
            let err = d.sub(&exact).unwrap();
            let rel = err.values().iter().map(|z| z.norm()).fold(0.0, f64::max)
                / exact.values().iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(rel < 1e-6, "relative error {rel}");
        }
    }

    #[test]
    fn correction_coefficients() {
        let x0 = RadialVectorField::x0();
        for lambda in [0.5, 2.0] {
            assert!((connection_correction(&x0, 3, lambda, ConnectionFormula::A) - 0.5).abs() < 1e-15);
            assert!((connection_correction(&x0, 3, lambda, ConnectionFormula::B) - 0.5).abs() < 1e-15);
            assert_eq!(connection_correction(&x0, 2, lambda, ConnectionFormula::A), 0.0);
        }
        let x2 = RadialVectorField::monomial(2);
        for n in 2..6 {
            for lambda in [0.3, 1.7] {
                let a = connection_correction(&x2, n, lambda, ConnectionFormula::A);
                let b = connection_correction(&x2, n, lambda, ConnectionFormula::B);
                assert!((a - b).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn formulas_agree_on_the_battery() {
        let g = grid();
        for x in fields() {
            for phi in battery(&g) {
                let a = connection_apply(&x, &phi, ConnectionFormula::A);
                let b = connection_apply(&x, &phi, ConnectionFormula::B);
                let d = a.sub(&b).unwrap().values().iter().map(|z| z.norm()).fold(0.0, f64::max);
                assert!(d <= 1e-10, "{d}");
            }
        }
    }

    #[test]
    fn leibniz_rule_on_battery_and_horizontal_sections() {
        let g = grid();
        let b = battery(&g);
        for x in fields() {
            for phi in &b {
                let d = leibniz_defect(&x, phi, phi).unwrap();
                eprintln!("leibniz {d:e}");
                assert!(d < 1e-6);
            }
            assert!(leibniz_defect(&x, &b[0], &b[5]).unwrap() < 1e-6);
        }
        let h = horizontal_battery(&g);
        assert!(leibniz_defect(&RadialVectorField::x0(), &h[1], &h[3]).unwrap() <= 1e-10);
        assert!(leibniz_defect(&RadialVectorField::x0(), &b[2], &h[2]).unwrap() < 1e-6);
    }

    #[test]
    fn seminorm_values() {
        let g = grid();
        let p = BumpSection { center: 0.4, width: 0.3, angular: Angular::Mode(1), scale: 1.0 };
        let phi = p.sample(&g);
        let m0 = seminorm(&phi, (g.lambda(0), g.lambda(g.s_count() - 1)), &[]).unwrap();
        let sup = (0..g.s_count()).map(|i| p.radial(g.s(i))).fold(0.0, f64::max) * PI.sqrt();
        assert!((m0 - sup).abs() < 1e-12);

        let c = (1.0, 1f64.exp());
        let m1 = seminorm(&phi, c, &[RadialVectorField::x0()]).unwrap();
        let rows = g.rows_in_interval(c.0, c.1).unwrap();
        let exact = rows.map(|i| (2.0 * p.radial_ds(g.s(i))).abs()).fold(0.0, f64::max) * PI.sqrt();
        assert!((m1 - exact).abs() < 1e-5);

        let horizontal = &horizontal_battery(&g)[2];
        assert!(seminorm(horizontal, c, &[RadialVectorField::x0()]).unwrap() <= 1e-8);
        let four = vec![RadialVectorField::x0(); 4];
        assert!(matches!(seminorm(&phi, c, &four), Err(Error::TooManyDerivatives { .. })));
        assert!(seminorm(&phi, (100.0, 200.0), &[]).is_err());
    }

    #[test]
    fn hamiltonian_is_symmetric_on_the_battery() {
        let g = grid();
        let b = battery(&g);
        for x in fields() {
            for (i, phi) in b.iter().enumerate() {
                let psi = &b[(i + 5) % b.len()];
                assert!(hx_symmetry_defect(&x, phi, psi).unwrap() < 1e-6);
                let h = direct_integral_inner(&hamiltonian_apply(&x, phi), phi).unwrap();
                assert!(2.0 * h.im.abs() < 1e-6);
            }
        }
        let flat = &horizontal_battery(&g)[0];
        assert!(matches!(hx_symmetry_defect(&RadialVectorField::x0(), flat, flat), Err(Error::BoundarySupported(_))));
    }

    #[test]
    fn horizontal_test_cases() {
        let g = grid();
        let mode3 = PolarSection::from_fn(&g, |_, t| Complex64::from_polar(1.0, 3.0 * t));
        let r = horizontal_test(&mode3, 1e-8);
        assert!(r.horizontal && r.defect <= 1e-8 && r.homogeneity_defect < 1e-12);

        let growing = PolarSection::from_fn(&g, |s, t| Complex64::from_polar(s.exp(), t));
        let r = horizontal_test(&growing, 1e-8);
        assert!(!r.horizontal);
        let expected = 2.0 * g.lambda(g.s_count() - 1) * PI.sqrt();
        assert!((r.defect - expected).abs() < 1e-6 * expected);
        assert!(r.homogeneity_defect > 1.0);

        assert!(horizontal_test(&PolarSection::zeros(&g), 1e-8).horizontal);
    }
}
