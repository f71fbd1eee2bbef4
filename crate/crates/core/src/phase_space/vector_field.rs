//! Vector fields `X = a(lambda) d/dlambda` on `(0, inf)` and their lifts to
//! `R^n \ {0}`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use super::poly::PolySymbol;
use crate::error::{Error, Result};

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Coefficient {
    /// `a(lambda) = sum_k c[k] lambda^k`
    Polynomial(Vec<f64>),
    /// `a` together with its derivative `a'`.
    Callable { a: RealFn, da: RealFn },
}

#[derive(Clone)]
pub struct RadialVectorField {
    coeff: Coefficient,
}

impl fmt::Debug for RadialVectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.coeff {
            Coefficient::Polynomial(c) => f.debug_tuple("RadialVectorField").field(c).finish(),
            Coefficient::Callable { .. } => f.write_str("RadialVectorField(<callable>)"),
        }
    }
}

impl RadialVectorField {
    pub fn polynomial(mut coefficients: Vec<f64>) -> Self {
        while coefficients.last() == Some(&0.0) {
            coefficients.pop();
        }
        Self { coeff: Coefficient::Polynomial(coefficients) }
    }

    pub fn callable(
        a: impl Fn(f64) -> f64 + Send + Sync + 'static,
        da: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self { coeff: Coefficient::Callable { a: Arc::new(a), da: Arc::new(da) } }
    }

    /// `X_0 = 2 lambda d/dlambda`.
    pub fn x0() -> Self {
        Self::monomial(1)
    }

    /// `a(lambda) = 2 lambda^k`.
    pub fn monomial(k: usize) -> Self {
        let mut c = vec![0.0; k + 1];
        c[k] = 2.0;
        Self::polynomial(c)
    }

    pub fn zero() -> Self {
        Self::polynomial(Vec::new())
    }

    pub fn is_polynomial(&self) -> bool {
        matches!(self.coeff, Coefficient::Polynomial(_))
    }

    pub fn coefficients(&self) -> Option<&[f64]> {
        match &self.coeff {
            Coefficient::Polynomial(c) => Some(c),
            Coefficient::Callable { .. } => None,
        }
    }

    pub fn a(&self, lambda: f64) -> f64 {
        match &self.coeff {
            Coefficient::Polynomial(c) => horner(c, lambda),
            Coefficient::Callable { a, .. } => a(lambda),
        }
    }

    pub fn da(&self, lambda: f64) -> f64 {
        match &self.coeff {
            Coefficient::Polynomial(c) => horner(&poly_derivative(c), lambda),
            Coefficient::Callable { da, .. } => da(lambda),
        }
    }

    /// Divergence on `(0, inf)` with respect to `d lambda`, i.e. `a'(lambda)`.
    pub fn divergence(&self, lambda: f64) -> f64 {
        self.da(lambda)
    }

    /// `b(lambda) = a(lambda) / (2 lambda)`, the factor with `X = b X_0`.
    pub fn euler_factor(&self, lambda: f64) -> f64 {
        self.a(lambda) / (2.0 * lambda)
    }

    /// Coefficients of `b` when it is a polynomial.
    pub fn euler_factor_polynomial(&self) -> Result<Vec<f64>> {
        match &self.coeff {
            Coefficient::Polynomial(c) => {
                if c.first().is_some_and(|&c0| c0 != 0.0) {
                    return Err(Error::NonPolynomialLift);
                }
                Ok(c.iter().skip(1).map(|x| x / 2.0).collect())
            }
            Coefficient::Callable { .. } => Err(Error::NonPolynomialLift),
        }
    }

    /// `[X, Y]` as a field on `(0, inf)`: coefficient `a_X a_Y' - a_Y a_X'`.
    pub fn lie_bracket(&self, other: &Self) -> Self {
        match (&self.coeff, &other.coeff) {
            (Coefficient::Polynomial(a), Coefficient::Polynomial(b)) => {
                let lhs = poly_mul(a, &poly_derivative(b));
                let rhs = poly_mul(b, &poly_derivative(a));
                Self::polynomial(poly_sub(&lhs, &rhs))
            }
            _ => {
                let (x, y) = (self.clone(), other.clone());
                let (x2, y2) = (self.clone(), other.clone());
                // derivative of the bracket is not needed by any caller that
                // takes this route; approximate it by central differences
                Self::callable(
                    move |l| x.a(l) * y.da(l) - y.a(l) * x.da(l),
                    move |l| {
                        let h = 1e-5 * l.max(1.0);
                        let f = |t: f64| x2.a(t) * y2.da(t) - y2.a(t) * x2.da(t);
                        (f(l + h) - f(l - h)) / (2.0 * h)
                    },
                )
            }
        }
    }

    /// Flow `r_t(lambda)` for the monomial family `a = c lambda^k`; `None`
    /// for other fields.
    pub fn flow(&self, lambda: f64, t: f64) -> Option<f64> {
        let c = self.coefficients()?;
        let k = c.iter().rposition(|&x| x != 0.0)?;
        if c[..k].iter().any(|&x| x != 0.0) {
            return None;
        }
        let coef = c[k];
        if k == 1 {
            Some(lambda * (coef * t).exp())
        } else {
            // d lambda / dt = coef lambda^k
            let m = 1.0 - k as f64;
            let base = lambda.powf(m) + m * coef * t;
            (base > 0.0).then(|| base.powf(1.0 / m))
        }
    }
}

/// Lift of `X` to the field `X~(q) = b(|q|^2) sum_j q_j d/dq_j` on `R^n`,
/// the unique lift normal to the spheres with `d|q|^2 (X~) = X`.
#[derive(Debug, Clone)]
pub struct RadialLift {
    n: usize,
    field: RadialVectorField,
}

impl RadialLift {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn euler_factor(&self, lambda: f64) -> f64 {
        self.field.euler_factor(lambda)
    }

    pub fn at(&self, q: &[f64]) -> Vec<f64> {
        let lambda: f64 = q.iter().map(|x| x * x).sum();
        let b = self.field.euler_factor(lambda);
        q.iter().map(|x| b * x).collect()
    }

    /// `div X~ = n b(lambda) + 2 lambda b'(lambda)`.
    pub fn divergence(&self, lambda: f64) -> f64 {
        let a = self.field.a(lambda);
        let da = self.field.da(lambda);
        // b' = a' / (2 lambda) - a / (2 lambda^2)
        let b = a / (2.0 * lambda);
        let db = da / (2.0 * lambda) - a / (2.0 * lambda * lambda);
        self.n as f64 * b + 2.0 * lambda * db
    }

    pub fn euler_factor_polynomial(&self) -> Result<Vec<f64>> {
        self.field.euler_factor_polynomial()
    }
}

pub fn radial_lift(field: &RadialVectorField, n: usize) -> RadialLift {
    RadialLift { n, field: field.clone() }
}

/// `h_X~(q, p) = <X~(q), p> = b(|q|^2) (q . p)`.
pub fn hamiltonian_lift_symbol(field: &RadialVectorField, n: usize) -> Result<PolySymbol> {
    let b = field.euler_factor_polynomial()?;
    let h = PolySymbol::norm_q2(n);
    let mut radial = PolySymbol::zero(n);
    let mut power = PolySymbol::constant(n, 1.0);
    for c in &b {
        if *c != 0.0 {
            radial = &radial + &power.scale(Complex64::new(*c, 0.0));
        }
        power = &power * &h;
    }
    Ok(&radial * &PolySymbol::dilation_generator(n))
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ck| acc * x + ck)
}

fn poly_derivative(c: &[f64]) -> Vec<f64> {
    c.iter().enumerate().skip(1).map(|(k, &ck)| k as f64 * ck).collect()
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    let len = a.len().max(b.len());
    (0..len)
        .map(|i| a.get(i).copied().unwrap_or(0.0) - b.get(i).copied().unwrap_or(0.0))
        .collect()
}
