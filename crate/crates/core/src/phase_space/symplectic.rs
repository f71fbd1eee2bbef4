use nalgebra::DMatrix;
use num_complex::Complex64;

use super::poly::{Polynomial, PolySymbol};
use crate::error::{Error, Result};

const SYMPLECTIC_TOL: f64 = 1e-12;

/// Linear map `(q, p) -> S (q, p)` preserving the canonical symplectic form.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSymplecticMap {
    n: usize,
    matrix: DMatrix<f64>,
}

impl LinearSymplecticMap {
    /// Validates `S^T J S = J` entrywise to 1e-12.
    pub fn new(n: usize, matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() != 2 * n || matrix.ncols() != 2 * n {
            return Err(Error::DimensionMismatch { expected: 2 * n, found: matrix.nrows() });
        }
        let j = canonical_form(n);
        let defect = (matrix.transpose() * &j * &matrix - &j).amax();
        if defect > SYMPLECTIC_TOL {
            return Err(Error::NotSymplectic(defect));
        }
        Ok(Self { n, matrix })
    }

    pub fn identity(n: usize) -> Self {
        Self { n, matrix: DMatrix::identity(2 * n, 2 * n) }
    }

    /// `(q, p) -> (e^t q, e^{-t} p)`, the lifted flow of the Euler field.
    pub fn dilation(n: usize, t: f64) -> Self {
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            m[(i, i)] = t.exp();
            m[(n + i, n + i)] = (-t).exp();
        }
        Self { n, matrix: m }
    }

    /// `(q, p) -> (q, p + 2 t q)`, the linear flow attached to `|q|^2`.
    pub fn shear(n: usize, t: f64) -> Self {
        let mut m = DMatrix::identity(2 * n, 2 * n);
        for i in 0..n {
            m[(n + i, i)] = 2.0 * t;
        }
        Self { n, matrix: m }
    }

    /// `(q, p) -> (-p, q)`.
    pub fn fourier_rotation(n: usize) -> Self {
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            m[(i, n + i)] = -1.0;
            m[(n + i, i)] = 1.0;
        }
        Self { n, matrix: m }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn apply(&self, z: &[f64]) -> Vec<f64> {
        assert_eq!(z.len(), 2 * self.n);
        (0..2 * self.n)
            .map(|i| (0..2 * self.n).map(|j| self.matrix[(i, j)] * z[j]).sum())
            .collect()
    }
}

fn canonical_form(n: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = 1.0;
        j[(n + i, i)] = -1.0;
    }
    j
}

/// `u o S`, exact composition of a polynomial with a linear map.
pub fn flow_pullback(u: &PolySymbol, map: &LinearSymplecticMap) -> Result<PolySymbol> {
    if u.n() != map.n {
        return Err(Error::DimensionMismatch { expected: map.n, found: u.n() });
    }
    let dim = 2 * map.n;
    let linear_forms: Vec<Polynomial> = (0..dim)
        .map(|i| {
            (0..dim).fold(Polynomial::zero(dim), |acc, j| {
                let c = map.matrix[(i, j)];
                if c == 0.0 {
                    acc
                } else {
                    &acc + &Polynomial::variable(dim, j).scale(Complex64::new(c, 0.0))
                }
            })
        })
        .collect();
    PolySymbol::from_polynomial(map.n, u.polynomial().substitute(&linear_forms)?)
}
