//! Weyl quantization of symbols of degree at most 2 in `p` by explicit
//! symmetrization of multiplication and derivative operators.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::cartesian::{CartesianGrid, DenseOperator};
use super::polar_symbolic::{ExpTrig, PolarDiffSymbol};
use crate::error::{Error, Result};
use crate::hilbert_field::{PolarGrid, PolarSection};
use crate::phase_space::PolySymbol;

pub const MAX_P_DEGREE: u32 = 2;

/// An operator algebra with multiplications by monomials in `q` and the
/// momenta `D_j = -i d/dq_j`.
pub trait WeylOrdering {
    type Op: Clone;

    fn n(&self) -> usize;
    /// `c q^alpha`.
    fn multiplication(&self, alpha: &[u32], c: Complex64) -> Self::Op;
    fn momentum(&self, j: usize) -> Self::Op;
    fn compose(&self, a: &Self::Op, b: &Self::Op) -> Self::Op;
    fn add(&self, a: &Self::Op, b: &Self::Op) -> Self::Op;
    fn scale(&self, a: &Self::Op, c: f64) -> Self::Op;
    fn zero(&self) -> Self::Op;
}

/// `Op(a p_j) = (a D_j + D_j a)/2` and
/// `Op(a p_j p_k) = (a D_j D_k + D_j a D_k + D_k a D_j + D_j D_k a)/4`.
pub fn weyl_order<W: WeylOrdering>(w: &W, u: &PolySymbol) -> Result<W::Op> {
    if u.n() != w.n() {
        return Err(Error::DimensionMismatch { expected: w.n(), found: u.n() });
    }
    let degree = u.degree_p();
    if degree > MAX_P_DEGREE {
        return Err(Error::DegreeTooHigh { degree, max: MAX_P_DEGREE });
    }
    let mut out = w.zero();
    for (alpha, beta, c) in u.terms() {
        let a = w.multiplication(alpha, c);
        let js: Vec<usize> = beta.iter().enumerate().flat_map(|(j, &b)| std::iter::repeat_n(j, b as usize)).collect();
        let term = match js.as_slice() {
            [] => a,
            &[j] => {
                let d = w.momentum(j);
                w.scale(&w.add(&w.compose(&a, &d), &w.compose(&d, &a)), 0.5)
            }
            &[j, k] => {
                let (dj, dk) = (w.momentum(j), w.momentum(k));
                let t1 = w.compose(&a, &w.compose(&dj, &dk));
                let t2 = w.compose(&dj, &w.compose(&a, &dk));
                let t3 = w.compose(&dk, &w.compose(&a, &dj));
                let t4 = w.compose(&w.compose(&dj, &dk), &a);
                w.scale(&w.add(&w.add(&t1, &t2), &w.add(&t3, &t4)), 0.25)
            }
            _ => unreachable!("degree checked above"),
        };
        out = w.add(&out, &term);
    }
    Ok(out)
}

/// Realization on the `n = 2` log-radial grid by exact symbolic algebra.
#[derive(Debug, Clone, Copy, Default)]
pub struct PolarOrdering;

impl WeylOrdering for PolarOrdering {
    type Op = PolarDiffSymbol;

    fn n(&self) -> usize {
        2
    }

    fn multiplication(&self, alpha: &[u32], c: Complex64) -> PolarDiffSymbol {
        let mut f = ExpTrig::constant(c);
        for _ in 0..alpha[0] {
            f = &f * &ExpTrig::q1();
        }
        for _ in 0..alpha[1] {
            f = &f * &ExpTrig::q2();
        }
        PolarDiffSymbol::multiplication(f)
    }

    fn momentum(&self, j: usize) -> PolarDiffSymbol {
        if j == 0 {
            PolarDiffSymbol::d1()
        } else {
            PolarDiffSymbol::d2()
        }
    }

    fn compose(&self, a: &PolarDiffSymbol, b: &PolarDiffSymbol) -> PolarDiffSymbol {
        a.compose(b)
    }

    fn add(&self, a: &PolarDiffSymbol, b: &PolarDiffSymbol) -> PolarDiffSymbol {
        a + b
    }

    fn scale(&self, a: &PolarDiffSymbol, c: f64) -> PolarDiffSymbol {
        a.scale(c)
    }

    fn zero(&self) -> PolarDiffSymbol {
        PolarDiffSymbol::zero()
    }
}

/// Realization by dense matrices on a Cartesian grid: `Q` diagonal, `D`
/// spectral.
#[derive(Debug, Clone)]
pub struct CartesianOrdering {
    grid: CartesianGrid,
    momenta: Vec<DMatrix<Complex64>>,
}

impl CartesianOrdering {
    pub fn new(grid: CartesianGrid) -> Result<Self> {
        let momenta = (0..grid.n()).map(|j| DenseOperator::derivative(grid, j).map(|d| d.into_matrix())).collect::<Result<_>>()?;
        Ok(Self { grid, momenta })
    }
}

impl WeylOrdering for CartesianOrdering {
    type Op = DMatrix<Complex64>;

    fn n(&self) -> usize {
        self.grid.n()
    }

    fn multiplication(&self, alpha: &[u32], c: Complex64) -> DMatrix<Complex64> {
        DenseOperator::multiplication(self.grid, |x| {
            c * x.iter().zip(alpha).map(|(xi, &a)| xi.powi(a as i32)).product::<f64>()
        })
        .into_matrix()
    }

    fn momentum(&self, j: usize) -> DMatrix<Complex64> {
        self.momenta[j].clone()
    }

    fn compose(&self, a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        a * b
    }

    fn add(&self, a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        a + b
    }

    fn scale(&self, a: &DMatrix<Complex64>, c: f64) -> DMatrix<Complex64> {
        a * Complex64::new(c, 0.0)
    }

    fn zero(&self) -> DMatrix<Complex64> {
        DMatrix::zeros(self.grid.len(), self.grid.len())
    }
}

/// A symbolic polar differential operator with its coefficients sampled on
/// a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarDiffOperator {
    grid: PolarGrid,
    symbol: PolarDiffSymbol,
    samples: Vec<((u32, u32), Vec<Complex64>)>,
}

impl PolarDiffOperator {
    pub fn new(grid: &PolarGrid, symbol: PolarDiffSymbol) -> Self {
        let samples = symbol
            .terms()
            .map(|(key, c)| {
                let sampled = PolarSection::from_fn(grid, |s, t| c.eval(s, t)).into_values();
                (key, sampled)
            })
            .collect();
        Self { grid: grid.clone(), symbol, samples }
    }

    pub fn grid(&self) -> &PolarGrid {
        &self.grid
    }

    pub fn symbol(&self) -> &PolarDiffSymbol {
        &self.symbol
    }

    /// Formal adjoint, computed term by term.
    pub fn adjoint(&self) -> Self {
        Self::new(&self.grid, self.symbol.adjoint())
    }

    /// True when no `d_s` appears, so the operator acts row by row.
    pub fn is_fiberwise(&self) -> bool {
        self.symbol.order_s() == 0
    }

    pub fn apply(&self, phi: &PolarSection) -> Result<PolarSection> {
        self.grid.check_same(phi.grid())?;
        let mut cache: BTreeMap<(u32, u32), PolarSection> = BTreeMap::new();
        let mut out = vec![Complex64::new(0.0, 0.0); self.grid.len()];
        for ((a, b), coef) in &self.samples {
            let derived = derivative_cached(&mut cache, phi, *a, *b);
            for ((o, c), v) in out.iter_mut().zip(coef).zip(derived.values()) {
                *o += c * v;
            }
        }
        PolarSection::from_values(&self.grid, out)
    }
}

fn derivative_cached<'a>(
    cache: &'a mut BTreeMap<(u32, u32), PolarSection>,
    phi: &PolarSection,
    a: u32,
    b: u32,
) -> &'a PolarSection {
    if !cache.contains_key(&(a, b)) {
        let value = if a == 0 {
            phi.dtheta(b)
        } else {
            derivative_cached(cache, phi, a - 1, b).ds()
        };
        cache.insert((a, b), value);
    }
    &cache[&(a, b)]
}

/// `Op(u)` on the polar grid, `u` of degree at most 2 in `p`, `n = 2`.
pub fn quantize_diffop(u: &PolySymbol, grid: &PolarGrid) -> Result<PolarDiffOperator> {
    let symbol = weyl_order(&PolarOrdering, u)?;
    Ok(PolarDiffOperator::new(grid, symbol))
}

/// `Op(u)` as a dense matrix from the symmetrized products of `Q` and
/// spectral `D`.
pub fn quantize_diffop_cartesian(u: &PolySymbol, grid: CartesianGrid) -> Result<DenseOperator> {
    let w = CartesianOrdering::new(grid)?;
    DenseOperator::from_matrix(grid, weyl_order(&w, u)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert_field::battery::battery;
    use crate::phase_space::angular_momentum;

    fn l12() -> PolySymbol {
        angular_momentum(1, 2, 2).unwrap()
    }

    #[test]
    fn angular_momentum_quantizes_to_minus_i_dtheta() {
        let op = weyl_order(&PolarOrdering, &l12()).unwrap();
        assert_eq!(op, PolarDiffSymbol::dtheta().scale(Complex64::new(0.0, -1.0)));
    }

    #[test]
    fn dilation_generator_quantizes_to_minus_i_2ds_plus_1() {
        let op = weyl_order(&PolarOrdering, &PolySymbol::dilation_generator(2)).unwrap();
        let expected = &PolarDiffSymbol::ds().scale(Complex64::new(0.0, -2.0))
            + &PolarDiffSymbol::multiplication(ExpTrig::constant(Complex64::new(0.0, -1.0)));
        assert_eq!(op, expected);
    }

    #[test]
    fn q_squared_quantizes_to_lambda() {
        let op = weyl_order(&PolarOrdering, &PolySymbol::norm_q2(2)).unwrap();
        assert_eq!(op, PolarDiffSymbol::multiplication(ExpTrig::term(2, 0, 1.0)));
    }

    #[test]
    fn squared_angular_momentum_has_the_weyl_shift() {
        // Op(l^2) = L^2 + 1/2 = -d_theta^2 + 1/2
        let op = weyl_order(&PolarOrdering, &l12().pow(2)).unwrap();
        let expected = &PolarDiffSymbol::monomial(0, 2, ExpTrig::constant(-1.0))
            + &PolarDiffSymbol::multiplication(ExpTrig::constant(0.5));
        assert_eq!(op, expected);
    }

    #[test]
    fn constants_of_motion_have_no_radial_derivatives() {
        let h = PolySymbol::norm_q2(2);
        for u in [&h * &l12(), &(&PolySymbol::constant(2, 1.0) + &l12().pow(2)) * &h, h.pow(2)] {
            let op = weyl_order(&PolarOrdering, &u).unwrap();
            assert_eq!(op.order_s(), 0, "{u:?}");
        }
    }

    #[test]
    fn rejects_cubic_momenta_and_wrong_dimension() {
        let u = PolySymbol::p(2, 0).pow(3);
        assert_eq!(weyl_order(&PolarOrdering, &u), Err(Error::DegreeTooHigh { degree: 3, max: 2 }));
        assert!(weyl_order(&PolarOrdering, &PolySymbol::q(1, 0)).is_err());
    }

    #[test]
    fn sampled_operator_applies_termwise() {
        let g = PolarGrid::default();
        let op = quantize_diffop(&(&PolySymbol::norm_q2(2) * &l12()), &g).unwrap();
        assert!(op.is_fiberwise());
        let phi = &battery(&g)[1]; // angular mode e^{i theta}
        let out = op.apply(phi).unwrap();
        for i in 0..g.s_count() {
            for j in 0..g.m() {
                let expected = phi.get(i, j) * g.lambda(i);
                assert!((out.get(i, j) - expected).norm() < 1e-12 * (1.0 + expected.norm()));
            }
        }
    }

    #[test]
    fn cartesian_ordering_matches_hand_built_operators() {
        let g = CartesianGrid::new(1, 32, 5.0).unwrap();
        let u = &PolySymbol::q(1, 0) * &PolySymbol::p(1, 0);
        let a = quantize_diffop_cartesian(&u, g).unwrap();
        let q = DenseOperator::multiplication(g, |x| Complex64::new(x[0], 0.0));
        let d = DenseOperator::derivative(g, 0).unwrap();
        let expected = q.compose(&d).unwrap().add(&d.compose(&q).unwrap()).unwrap().scale(0.5);
        assert!((a.matrix() - expected.matrix()).camax() < 1e-12);
    }
}
