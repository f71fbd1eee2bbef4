//! Exact algebra of differential operators `sum c_{ab}(s, theta) d_s^a d_theta^b`
//! with coefficients in the span of `e^{k s/2} e^{i m theta}`.

use std::collections::BTreeMap;
use std::ops::{Add, Mul};

use num_complex::Complex64;

use crate::phase_space::ZERO_THRESHOLD;

/// `sum c_{km} e^{k s / 2} e^{i m theta}`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExpTrig {
    terms: BTreeMap<(i32, i32), Complex64>,
}

impl ExpTrig {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: impl Into<Complex64>) -> Self {
        Self::term(0, 0, c)
    }

    /// `c e^{k s/2} e^{i m theta}`.
    pub fn term(k: i32, m: i32, c: impl Into<Complex64>) -> Self {
        let mut out = Self::zero();
        out.add_term(k, m, c.into());
        out
    }

    /// `q_1 = e^{s/2} cos theta`.
    pub fn q1() -> Self {
        &Self::term(1, 1, 0.5) + &Self::term(1, -1, 0.5)
    }

    /// `q_2 = e^{s/2} sin theta`.
    pub fn q2() -> Self {
        &Self::term(1, 1, Complex64::new(0.0, -0.5)) + &Self::term(1, -1, Complex64::new(0.0, 0.5))
    }

    pub fn terms(&self) -> impl Iterator<Item = ((i32, i32), Complex64)> + '_ {
        self.terms.iter().map(|(&k, &c)| (k, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, k: i32, m: i32, c: Complex64) {
        let e = self.terms.entry((k, m)).or_insert(Complex64::new(0.0, 0.0));
        *e += c;
        if e.norm() <= ZERO_THRESHOLD {
            self.terms.remove(&(k, m));
        }
    }

    pub fn scale(&self, c: impl Into<Complex64>) -> Self {
        let c = c.into();
        let mut out = Self::zero();
        for (&(k, m), &v) in &self.terms {
            out.add_term(k, m, v * c);
        }
        out
    }

    /// Complex conjugate function: `m -> -m`.
    pub fn conj(&self) -> Self {
        let mut out = Self::zero();
        for (&(k, m), &v) in &self.terms {
            out.add_term(k, -m, v.conj());
        }
        out
    }

    /// `d_s^i d_theta^j` of the function.
    pub fn derivative(&self, i: u32, j: u32) -> Self {
        let mut out = Self::zero();
        for (&(k, m), &v) in &self.terms {
            let f = Complex64::new(k as f64 / 2.0, 0.0).powu(i) * Complex64::new(0.0, m as f64).powu(j);
            out.add_term(k, m, v * f);
        }
        out
    }

    pub fn eval(&self, s: f64, theta: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|(&(k, m), &c)| c * Complex64::from_polar((k as f64 * s / 2.0).exp(), m as f64 * theta))
            .sum()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

impl Add for &ExpTrig {
    type Output = ExpTrig;
    fn add(self, rhs: &ExpTrig) -> ExpTrig {
        let mut out = self.clone();
        for (&(k, m), &v) in &rhs.terms {
            out.add_term(k, m, v);
        }
        out
    }
}

impl Mul for &ExpTrig {
    type Output = ExpTrig;
    fn mul(self, rhs: &ExpTrig) -> ExpTrig {
        let mut out = ExpTrig::zero();
        for (&(k1, m1), &a) in &self.terms {
            for (&(k2, m2), &b) in &rhs.terms {
                out.add_term(k1 + k2, m1 + m2, a * b);
            }
        }
        out
    }
}

/// `sum_{(a, b)} c_{ab} d_s^a d_theta^b`, coefficients on the left.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PolarDiffSymbol {
    terms: BTreeMap<(u32, u32), ExpTrig>,
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

impl PolarDiffSymbol {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn multiplication(c: ExpTrig) -> Self {
        Self::monomial(0, 0, c)
    }

    pub fn monomial(a: u32, b: u32, c: ExpTrig) -> Self {
        let mut out = Self::zero();
        out.add_term(a, b, &c);
        out
    }

    pub fn ds() -> Self {
        Self::monomial(1, 0, ExpTrig::constant(1.0))
    }

    pub fn dtheta() -> Self {
        Self::monomial(0, 1, ExpTrig::constant(1.0))
    }

    /// `D_1 = -i e^{-s/2} (2 cos theta d_s - sin theta d_theta)`.
    pub fn d1() -> Self {
        let cos = &ExpTrig::term(-1, 1, 0.5) + &ExpTrig::term(-1, -1, 0.5);
        let sin = &ExpTrig::term(-1, 1, Complex64::new(0.0, -0.5)) + &ExpTrig::term(-1, -1, Complex64::new(0.0, 0.5));
        let mi = Complex64::new(0.0, -1.0);
        &Self::monomial(1, 0, cos.scale(2.0 * mi)) + &Self::monomial(0, 1, sin.scale(-mi))
    }

    /// `D_2 = -i e^{-s/2} (2 sin theta d_s + cos theta d_theta)`.
    pub fn d2() -> Self {
        let cos = &ExpTrig::term(-1, 1, 0.5) + &ExpTrig::term(-1, -1, 0.5);
        let sin = &ExpTrig::term(-1, 1, Complex64::new(0.0, -0.5)) + &ExpTrig::term(-1, -1, Complex64::new(0.0, 0.5));
        let mi = Complex64::new(0.0, -1.0);
        &Self::monomial(1, 0, sin.scale(2.0 * mi)) + &Self::monomial(0, 1, cos.scale(mi))
    }

    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32), &ExpTrig)> {
        self.terms.iter().map(|(&k, v)| (k, v))
    }

    pub fn coefficient(&self, a: u32, b: u32) -> Option<&ExpTrig> {
        self.terms.get(&(a, b))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest power of `d_s` present.
    pub fn order_s(&self) -> u32 {
        self.terms.keys().map(|&(a, _)| a).max().unwrap_or(0)
    }

    pub fn order_theta(&self) -> u32 {
        self.terms.keys().map(|&(_, b)| b).max().unwrap_or(0)
    }

    fn add_term(&mut self, a: u32, b: u32, c: &ExpTrig) {
        let e = self.terms.entry((a, b)).or_default();
        *e = &*e + c;
        if e.is_zero() {
            self.terms.remove(&(a, b));
        }
    }

    pub fn scale(&self, c: impl Into<Complex64>) -> Self {
        let c = c.into();
        let mut out = Self::zero();
        for (&(a, b), v) in &self.terms {
            out.add_term(a, b, &v.scale(c));
        }
        out
    }

    /// Composition `self o other`, normal ordered by the Leibniz rule.
    pub fn compose(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (&(a, b), c) in &self.terms {
            for (&(a2, b2), d) in &other.terms {
                for i in 0..=a {
                    for j in 0..=b {
                        let w = binomial(a, i) * binomial(b, j);
                        let coef = (c * &d.derivative(i, j)).scale(w);
                        out.add_term(a - i + a2, b - j + b2, &coef);
                    }
                }
            }
        }
        out
    }

    /// Formal adjoint for the measure `e^s ds dtheta`:
    /// `d_s^+ = -d_s - 1`, `d_theta^+ = -d_theta`.
    pub fn adjoint(&self) -> Self {
        let ds_adj = &Self::ds().scale(-1.0) + &Self::multiplication(ExpTrig::constant(-1.0));
        let dt_adj = Self::dtheta().scale(-1.0);
        let one = Self::multiplication(ExpTrig::constant(1.0));
        let mut out = Self::zero();
        for (&(a, b), c) in &self.terms {
            let mut op = one.clone();
            for _ in 0..b {
                op = op.compose(&dt_adj);
            }
            for _ in 0..a {
                op = op.compose(&ds_adj);
            }
            out = &out + &op.compose(&Self::multiplication(c.conj()));
        }
        out
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.max_abs_coeff()).fold(0.0, f64::max)
    }
}

impl Add for &PolarDiffSymbol {
    type Output = PolarDiffSymbol;
    fn add(self, rhs: &PolarDiffSymbol) -> PolarDiffSymbol {
        let mut out = self.clone();
        for (&(a, b), c) in &rhs.terms {
            out.add_term(a, b, c);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exptrig_algebra() {
        let q1 = ExpTrig::q1();
        let q2 = ExpTrig::q2();
        let r2 = &(&q1 * &q1) + &(&q2 * &q2);
        assert_eq!(r2, ExpTrig::term(2, 0, 1.0));
        for (s, t) in [(0.3, 1.1), (-1.0, 4.0)] {
            assert!((q1.eval(s, t).re - (s / 2.0).exp() * t.cos()).abs() < 1e-14);
            assert!((q2.eval(s, t).re - (s / 2.0).exp() * t.sin()).abs() < 1e-14);
            assert!((q1.conj().eval(s, t) - q1.eval(s, t).conj()).norm() < 1e-14);
        }
    }

    #[test]
    fn cartesian_derivatives_commute() {
        let d1 = PolarDiffSymbol::d1();
        let d2 = PolarDiffSymbol::d2();
        let c = &d1.compose(&d2) + &d2.compose(&d1).scale(-1.0);
        assert!(c.is_zero(), "{c:?}");
    }

    #[test]
    fn canonical_commutation() {
        // [D_1, q_1] = -i, [D_1, q_2] = 0
        let d1 = PolarDiffSymbol::d1();
        let q1 = PolarDiffSymbol::multiplication(ExpTrig::q1());
        let q2 = PolarDiffSymbol::multiplication(ExpTrig::q2());
        let c11 = &d1.compose(&q1) + &q1.compose(&d1).scale(-1.0);
        assert_eq!(c11, PolarDiffSymbol::multiplication(ExpTrig::constant(Complex64::new(0.0, -1.0))));
        let c12 = &d1.compose(&q2) + &q2.compose(&d1).scale(-1.0);
        assert!(c12.is_zero());
    }

    #[test]
    fn adjoint_is_an_involution_and_dilation_generator_is_symmetric() {
        let d1 = PolarDiffSymbol::d1();
        assert_eq!(d1.adjoint().adjoint(), d1);
        // D_j are symmetric
        assert_eq!(d1.adjoint(), d1);
        assert_eq!(PolarDiffSymbol::d2().adjoint(), PolarDiffSymbol::d2());
        // -i(2 d_s + 1) is symmetric
        let h0 = &PolarDiffSymbol::ds().scale(Complex64::new(0.0, -2.0))
            + &PolarDiffSymbol::multiplication(ExpTrig::constant(Complex64::new(0.0, -1.0)));
        assert_eq!(h0.adjoint(), h0);
    }
}
