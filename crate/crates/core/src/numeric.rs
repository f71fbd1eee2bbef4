//! Small numerical building blocks shared by the grid modules.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Weights of the first-derivative stencil at `z` on the nodes `x`
/// (Fornberg's recursion, first derivative only).
pub fn fd_weights(z: f64, x: &[f64]) -> Vec<f64> {
    let n = x.len();
    // c[j][k]: weight of node j for derivative order k
    let mut c = vec![[0.0f64; 2]; n];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(1);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.iter().map(|w| w[1]).collect()
}

/// First-derivative stencils of order 8 on `len` equispaced points with
/// spacing 1: central in the interior, one-sided 9-point near the ends.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeStencil {
    len: usize,
    rows: Vec<Vec<(usize, f64)>>,
}

pub const STENCIL_HALF_WIDTH: usize = 4;

impl DerivativeStencil {
    pub fn new(len: usize) -> Option<Self> {
        let width = 2 * STENCIL_HALF_WIDTH + 1;
        if len < width {
            return None;
        }
        let rows = (0..len)
            .map(|i| {
                let start = i.saturating_sub(STENCIL_HALF_WIDTH).min(len - width);
                let nodes: Vec<f64> = (start..start + width).map(|j| j as f64).collect();
                let w = fd_weights(i as f64, &nodes);
                (start..start + width).zip(w).filter(|&(j, _)| j != i).collect()
            })
            .collect();
        Some(Self { len, rows })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Rows whose stencil is the symmetric central one.
    pub fn interior(&self) -> std::ops::Range<usize> {
        STENCIL_HALF_WIDTH..self.len - STENCIL_HALF_WIDTH
    }

    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    /// Derivative (unit spacing) at row `i` of a sequence given by `at`.
    /// Written as `sum w_j (x_j - x_i)` so constants give exactly zero.
    pub fn apply_at<T>(&self, i: usize, at: impl Fn(usize) -> T) -> T
    where
        T: Copy + std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T>,
    {
        let xi = at(i);
        let mut it = self.rows[i].iter();
        let &(j0, w0) = it.next().expect("stencil has nodes");
        it.fold((at(j0) - xi) * w0, |acc, &(j, w)| acc + (at(j) - xi) * w)
    }
}

/// Polynomial extrapolation to zero step of `values[k] ~ F(steps[k])`,
/// with `F(h) = F(0) + c_1 h^p + c_2 h^{2p} + ...` (Neville's scheme).
pub fn richardson(values: &[Complex64], steps: &[f64], power: i32) -> Complex64 {
    assert_eq!(values.len(), steps.len());
    assert!(!values.is_empty());
    let x: Vec<f64> = steps.iter().map(|h| h.powi(power)).collect();
    let mut p = values.to_vec();
    let n = p.len();
    for level in 1..n {
        for i in 0..n - level {
            let (xa, xb) = (x[i], x[i + level]);
            p[i] = (p[i + 1] * xa - p[i] * xb) / (xa - xb);
        }
    }
    p[0]
}

/// Lagrange interpolation weights at `z` for the given nodes.
pub fn lagrange_weights(z: f64, nodes: &[f64]) -> Vec<f64> {
    (0..nodes.len())
        .map(|j| {
            nodes
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != j)
                .fold(1.0, |acc, (_, &xk)| acc * (z - xk) / (nodes[j] - xk))
        })
        .collect()
}

/// Largest singular value.
pub fn spectral_norm(m: &DMatrix<Complex64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().max()
}

pub fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn central_weights_match_the_textbook_stencil() {
        let nodes: Vec<f64> = (-4..=4).map(f64::from).collect();
        let w = fd_weights(0.0, &nodes);
        let expected = [1.0 / 280.0, -4.0 / 105.0, 1.0 / 5.0, -4.0 / 5.0, 0.0, 4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];
        for (a, b) in w.iter().zip(expected) {
            assert!((a - b).abs() < 1e-14, "{a} vs {b}");
        }
    }

    #[test]
    fn stencil_is_exact_on_low_degree_polynomials() {
        let st = DerivativeStencil::new(20).unwrap();
        for i in 0..20 {
            let f = |j: usize| {
                let x = j as f64 * 0.1;
                x.powi(8) - 3.0 * x.powi(5) + x
            };
            let d = st.apply_at(i, f) / 0.1;
            let x = i as f64 * 0.1;
            let exact = 8.0 * x.powi(7) - 15.0 * x.powi(4) + 1.0;
            assert!((d - exact).abs() < 1e-8 * (1.0 + exact.abs()), "row {i}: {d} vs {exact}");
        }
        for i in 0..20 {
            assert_eq!(st.apply_at(i, |_| 3.7), 0.0);
        }
        assert!(DerivativeStencil::new(8).is_none());
    }

    #[test]
    fn richardson_removes_even_error_terms() {
        let f = |h: f64| ((1.0 + h).exp() - (1.0 - h).exp()) / (2.0 * h);
        let steps = [0.4, 0.2, 0.1, 0.05];
        let vals: Vec<Complex64> = steps.iter().map(|&h| Complex64::new(f(h), 0.0)).collect();
        let r = richardson(&vals, &steps, 2);
        assert!((r.re - 1f64.exp()).abs() < 1e-11);
    }

    #[test]
    fn lagrange_reproduces_cubics() {
        let nodes = [0.0, 1.0, 2.0, 3.0];
        let w = lagrange_weights(1.3, &nodes);
        let f = |x: f64| x * x * x - 2.0 * x;
        let v: f64 = w.iter().zip(nodes).map(|(w, x)| w * f(x)).sum();
        assert!((v - f(1.3)).abs() < 1e-13);
    }

    #[test]
    fn spectral_norm_of_diagonal() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, -3.0),
        ]));
        assert!((spectral_norm(&m) - 3.0).abs() < 1e-14);
    }
}
