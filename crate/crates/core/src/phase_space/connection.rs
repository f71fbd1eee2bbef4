//! The classical connection `nabla~_X u = {h_X~, u}` on constants of motion
//! of `|q|^2`.

use super::bracket::{is_constant_of_motion, poisson_bracket};
use super::poly::PolySymbol;
use super::vector_field::{hamiltonian_lift_symbol, RadialVectorField};
use crate::error::{Error, Result};

pub fn poisson_connection_apply(x: &RadialVectorField, u: &PolySymbol) -> Result<PolySymbol> {
    let h = PolySymbol::norm_q2(u.n());
    if !is_constant_of_motion(u, &h)? {
        return Err(Error::NotConstantOfMotion);
    }
    let hx = hamiltonian_lift_symbol(x, u.n())?;
    poisson_bracket(&hx, u)
}

/// Defects of the two connection identities, as the largest coefficient of
/// `lhs - rhs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConnectionIdentityReport {
    /// `nabla_X {u, v} - {nabla_X u, v} - {u, nabla_X v}`
    pub leibniz_defect: f64,
    /// `(nabla_X nabla_Y - nabla_Y nabla_X - nabla_[X,Y]) u`
    pub curvature_defect: f64,
}

impl ConnectionIdentityReport {
    pub fn is_exact(&self) -> bool {
        self.leibniz_defect == 0.0 && self.curvature_defect == 0.0
    }
}

pub fn poisson_connection_identity_check(
    x: &RadialVectorField,
    y: &RadialVectorField,
    u: &PolySymbol,
    v: &PolySymbol,
) -> Result<ConnectionIdentityReport> {
    let nx = |w: &PolySymbol| poisson_connection_apply(x, w);
    let ny = |w: &PolySymbol| poisson_connection_apply(y, w);

    let uv = poisson_bracket(u, v)?;
    let leibniz = &(&nx(&uv)? - &poisson_bracket(&nx(u)?, v)?) - &poisson_bracket(u, &nx(v)?)?;

    let xy = x.lie_bracket(y);
    let curvature = &(&nx(&ny(u)?)? - &ny(&nx(u)?)?) - &poisson_connection_apply(&xy, u)?;

    Ok(ConnectionIdentityReport {
        leibniz_defect: leibniz.max_abs_coeff(),
        curvature_defect: curvature.max_abs_coeff(),
    })
}
