//! From global operators to fields of fiber matrices, and the two routes to
//! `nabla^_X(A) = [nabla_X, A]`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::field::{Commutator, GlobalOperator, OperatorField};
use crate::error::{Error, Result};
use crate::hilbert_field::battery::battery;
use crate::hilbert_field::{direct_integral_norm, PolarGrid, PolarSection};
use crate::numeric::DerivativeStencil;
use crate::phase_space::RadialVectorField;

/// Centers in `s` of the multiplication bumps `f_k(lambda)`.
pub const DECOMPOSABILITY_CENTERS: [f64; 5] = [-1.0, -0.5, 0.0, 0.5, 1.0];
pub const DECOMPOSABILITY_WIDTH: f64 = 0.5;
/// Leakage above this makes the commutator route fail.
pub const LEAKAGE_THRESHOLD: f64 = 1e-4;

fn bump(center: f64) -> impl Fn(f64) -> f64 {
    move |lambda: f64| {
        let d = lambda.ln() - center;
        (-d * d / (2.0 * DECOMPOSABILITY_WIDTH * DECOMPOSABILITY_WIDTH)).exp()
    }
}

/// `||O(f phi) - f O(phi)||` over the bumps `f` and the given sections.
fn commutation_defect(op: &(impl GlobalOperator + ?Sized), sections: &[PolarSection], relative: bool) -> Result<f64> {
    let pairs: Vec<(usize, usize)> =
        (0..DECOMPOSABILITY_CENTERS.len()).flat_map(|k| (0..sections.len()).map(move |j| (k, j))).collect();
    let plain: Vec<PolarSection> = sections.par_iter().map(|phi| op.apply(phi)).collect::<Result<_>>()?;
    let defects: Vec<f64> = pairs
        .par_iter()
        .map(|&(k, j)| {
            let f = bump(DECOMPOSABILITY_CENTERS[k]);
            let probe = sections[j].multiply_radial(&f);
            let a = op.apply(&probe)?;
            let b = plain[j].multiply_radial(&f);
            let d = direct_integral_norm(&a.sub(&b)?);
            Ok(if relative { d / direct_integral_norm(&probe).max(f64::MIN_POSITIVE) } else { d })
        })
        .collect::<Result<_>>()?;
    Ok(defects.into_iter().fold(0.0, f64::max))
}

/// `max_k ||[O, f_k(Q^2)] phi||` over the section battery and five bumps in
/// `s`. Zero characterizes operators acting fiber by fiber.
pub fn decomposability_defect(op: &(impl GlobalOperator + ?Sized)) -> Result<f64> {
    commutation_defect(op, &battery(op.grid()), false)
}

/// Angular basis sections `e_j`, constant in `s`.
fn angular_probes(grid: &PolarGrid) -> Vec<PolarSection> {
    (0..grid.m())
        .map(|j| {
            let mut row = vec![Complex64::new(0.0, 0.0); grid.m()];
            row[j] = Complex64::new(1.0, 0.0);
            PolarSection::constant_in_s(grid, &row).expect("row length m")
        })
        .collect()
}

/// Fiber matrices of `op` and the leakage.
///
/// Column `j` of `A^(lambda_i)` is row `i` of `op(e_j)`, with `e_j` the `j`-th
/// angular basis vector held constant in `s`. Smooth probes are needed here:
/// the commutator route differentiates in `s`, which a row delta does not
/// survive. Leakage is `max ||op(f e_j) - f op(e_j)|| / ||f e_j||` over the
/// decomposability bumps `f`, i.e. how far `op` is from preserving fibers.
pub fn extract_fibers(op: &(impl GlobalOperator + ?Sized)) -> Result<(OperatorField, f64)> {
    let field = fibers_of(op)?;
    let leakage = commutation_defect(op, &angular_probes(op.grid()), true)?;
    Ok((field, leakage))
}

/// The fiber matrices alone, for operators known to act fiberwise.
pub(crate) fn fibers_of(op: &(impl GlobalOperator + ?Sized)) -> Result<OperatorField> {
    let g = op.grid();
    let responses: Vec<PolarSection> = angular_probes(g).par_iter().map(|p| op.apply(p)).collect::<Result<_>>()?;
    let m = g.m();
    let fibers = (0..g.s_count())
        .map(|i| DMatrix::from_fn(m, m, |k, j| responses[j].row(i)[k]))
        .collect();
    OperatorField::new(g, 0, fibers)
}

/// Route A: fibers of the global commutator `[nabla_X, O]`.
pub fn nabla_hat_commutator(
    x: &RadialVectorField,
    op: &(impl GlobalOperator + ?Sized),
) -> Result<(OperatorField, f64)> {
    let (field, leakage) = extract_fibers(&Commutator::new(x, op))?;
    if leakage > LEAKAGE_THRESHOLD {
        return Err(Error::ExcessiveLeakage { leakage, threshold: LEAKAGE_THRESHOLD });
    }
    Ok((field, leakage))
}

/// Route B: `X A^ = 2 b(lambda) d/ds A^` entrywise with the central order-8
/// stencil, returned on the rows where that stencil fits.
pub fn nabla_hat_trivialized(x: &RadialVectorField, a: &OperatorField) -> Result<OperatorField> {
    let len = a.fibers().len();
    let stencil = DerivativeStencil::new(len).ok_or(Error::StencilTooShort(len))?;
    let g = a.grid();
    let first = a.rows().start;
    let fibers = stencil
        .interior()
        .map(|k| {
            let base = &a.fibers()[k];
            let mut d = DMatrix::zeros(base.nrows(), base.ncols());
            for &(j, w) in stencil.row(k) {
                d += (&a.fibers()[j] - base) * Complex64::new(w, 0.0);
            }
            let i = first + k;
            d * Complex64::new(2.0 * x.euler_factor(g.lambda(i)) / g.h(), 0.0)
        })
        .collect();
    OperatorField::new(g, first + stencil.interior().start, fibers)
}
