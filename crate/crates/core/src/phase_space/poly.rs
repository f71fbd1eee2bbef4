//! Sparse multivariate polynomials with complex coefficients.
//!
//! [`Polynomial`] is the generic container (any number of variables);
//! [`PolySymbol`] fixes the phase-space layout `(q_1..q_n, p_1..p_n)`.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Coefficients with modulus at or below this are dropped on normalization.
pub const ZERO_THRESHOLD: f64 = 1e-12;

/// Exponent vector of a monomial.
pub type Exponents = Vec<u32>;

#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Exponents, Complex64>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: impl Into<Complex64>) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c.into());
        p
    }

    pub fn variable(nvars: usize, index: usize) -> Self {
        assert!(index < nvars, "variable index {index} out of range for {nvars} variables");
        let mut e = vec![0; nvars];
        e[index] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(e, Complex64::new(1.0, 0.0));
        p
    }

    pub fn monomial(exponents: Exponents, c: impl Into<Complex64>) -> Self {
        let mut p = Self::zero(exponents.len());
        p.add_term(exponents, c.into());
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Complex64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exponents: &[u32]) -> Complex64 {
        self.terms.get(exponents).copied().unwrap_or_default()
    }

    /// Accumulates `c` onto the monomial; the entry is removed if it falls
    /// below [`ZERO_THRESHOLD`].
    pub fn add_term(&mut self, exponents: Exponents, c: Complex64) {
        assert_eq!(exponents.len(), self.nvars, "exponent vector has wrong length");
        match self.terms.entry(exponents) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().norm() <= ZERO_THRESHOLD {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                if c.norm() > ZERO_THRESHOLD {
                    v.insert(c);
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    /// Total degree restricted to the variables in `vars`.
    pub fn degree_in(&self, vars: std::ops::Range<usize>) -> u32 {
        self.terms
            .keys()
            .map(|e| e[vars.clone()].iter().sum())
            .max()
            .unwrap_or(0)
    }

    pub fn scale(&self, c: impl Into<Complex64>) -> Self {
        let c = c.into();
        let mut out = Self::zero(self.nvars);
        for (e, v) in &self.terms {
            out.add_term(e.clone(), v * c);
        }
        out
    }

    pub fn conj(&self) -> Self {
        Self {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v.conj())).collect(),
        }
    }

    pub fn derivative(&self, var: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, v) in &self.terms {
            if e[var] == 0 {
                continue;
            }
            let mut d = e.clone();
            d[var] -= 1;
            out.add_term(d, v * f64::from(e[var]));
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::constant(self.nvars, 1.0);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    pub fn eval(&self, point: &[Complex64]) -> Complex64 {
        assert_eq!(point.len(), self.nvars);
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .zip(point)
                    .fold(*c, |acc, (&k, x)| acc * x.powu(k))
            })
            .sum()
    }

    pub fn eval_real(&self, point: &[f64]) -> Complex64 {
        assert_eq!(point.len(), self.nvars);
        self.terms
            .iter()
            .map(|(e, c)| {
                let m: f64 = e.iter().zip(point).map(|(&k, x)| x.powi(k as i32)).product();
                c * m
            })
            .sum()
    }

    /// Replaces variable `i` by `subs[i]`; all substitutes share one variable set.
    pub fn substitute(&self, subs: &[Polynomial]) -> Result<Polynomial> {
        if subs.len() != self.nvars {
            return Err(Error::DimensionMismatch { expected: self.nvars, found: subs.len() });
        }
        let target = match subs.first() {
            Some(s) => s.nvars,
            None => return Ok(Polynomial::zero(0)),
        };
        if let Some(bad) = subs.iter().find(|s| s.nvars != target) {
            return Err(Error::DimensionMismatch { expected: target, found: bad.nvars });
        }
        // cache powers of each substitute
        let mut powers: Vec<Vec<Polynomial>> = subs
            .iter()
            .map(|s| vec![Polynomial::constant(target, 1.0), s.clone()])
            .collect();
        let mut out = Polynomial::zero(target);
        for (e, c) in &self.terms {
            let mut term = Polynomial::constant(target, *c);
            for (i, &k) in e.iter().enumerate() {
                while powers[i].len() <= k as usize {
                    let next = powers[i].last().unwrap() * &subs[i];
                    powers[i].push(next);
                }
                if k > 0 {
                    term = &term * &powers[i][k as usize];
                }
            }
            out = &out + &term;
        }
        Ok(out)
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars, "polynomial variable count mismatch");
        let mut out = self.clone();
        for (e, v) in &rhs.terms {
            out.add_term(e.clone(), *v);
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars, "polynomial variable count mismatch");
        let mut out = self.clone();
        for (e, v) in &rhs.terms {
            out.add_term(e.clone(), -v);
        }
        out
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars, "polynomial variable count mismatch");
        let mut acc: BTreeMap<Exponents, Complex64> = BTreeMap::new();
        for (ea, va) in &self.terms {
            for (eb, vb) in &rhs.terms {
                let e: Exponents = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                *acc.entry(e).or_default() += va * vb;
            }
        }
        acc.retain(|_, v| v.norm() > ZERO_THRESHOLD);
        Polynomial { nvars: self.nvars, terms: acc }
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

/// Polynomial symbol on phase space `R^{2n}`, variables ordered `(q, p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolySymbol {
    n: usize,
    poly: Polynomial,
}

impl PolySymbol {
    pub fn from_polynomial(n: usize, poly: Polynomial) -> Result<Self> {
        if poly.nvars() != 2 * n {
            return Err(Error::DimensionMismatch { expected: 2 * n, found: poly.nvars() });
        }
        Ok(Self { n, poly })
    }

    pub fn zero(n: usize) -> Self {
        Self { n, poly: Polynomial::zero(2 * n) }
    }

    pub fn constant(n: usize, c: impl Into<Complex64>) -> Self {
        Self { n, poly: Polynomial::constant(2 * n, c) }
    }

    /// `q_i`, zero-based.
    pub fn q(n: usize, i: usize) -> Self {
        Self { n, poly: Polynomial::variable(2 * n, i) }
    }

    /// `p_i`, zero-based.
    pub fn p(n: usize, i: usize) -> Self {
        Self { n, poly: Polynomial::variable(2 * n, n + i) }
    }

    /// `c q^alpha p^beta`.
    pub fn monomial(alpha: &[u32], beta: &[u32], c: impl Into<Complex64>) -> Result<Self> {
        if alpha.len() != beta.len() {
            return Err(Error::DimensionMismatch { expected: alpha.len(), found: beta.len() });
        }
        let e: Exponents = alpha.iter().chain(beta).copied().collect();
        Ok(Self { n: alpha.len(), poly: Polynomial::monomial(e, c) })
    }

    /// `h(q, p) = |q|^2`.
    pub fn norm_q2(n: usize) -> Self {
        (0..n).fold(Self::zero(n), |acc, i| {
            let qi = Self::q(n, i);
            &acc + &(&qi * &qi)
        })
    }

    /// `|p|^2`.
    pub fn norm_p2(n: usize) -> Self {
        (0..n).fold(Self::zero(n), |acc, i| {
            let pi = Self::p(n, i);
            &acc + &(&pi * &pi)
        })
    }

    /// `h_0(q, p) = sum_j q_j p_j`.
    pub fn dilation_generator(n: usize) -> Self {
        (0..n).fold(Self::zero(n), |acc, i| &acc + &(&Self::q(n, i) * &Self::p(n, i)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn polynomial(&self) -> &Polynomial {
        &self.poly
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &[u32], Complex64)> {
        let n = self.n;
        self.poly.terms().map(move |(e, c)| (&e[..n], &e[n..], *c))
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn degree(&self) -> u32 {
        self.poly.degree()
    }

    pub fn degree_q(&self) -> u32 {
        self.poly.degree_in(0..self.n)
    }

    pub fn degree_p(&self) -> u32 {
        self.poly.degree_in(self.n..2 * self.n)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.poly.max_abs_coeff()
    }

    pub fn scale(&self, c: impl Into<Complex64>) -> Self {
        Self { n: self.n, poly: self.poly.scale(c) }
    }

    pub fn conj(&self) -> Self {
        Self { n: self.n, poly: self.poly.conj() }
    }

    pub fn pow(&self, k: u32) -> Self {
        Self { n: self.n, poly: self.poly.pow(k) }
    }

    pub fn dq(&self, i: usize) -> Self {
        Self { n: self.n, poly: self.poly.derivative(i) }
    }

    pub fn dp(&self, i: usize) -> Self {
        Self { n: self.n, poly: self.poly.derivative(self.n + i) }
    }

    pub fn eval(&self, q: &[f64], p: &[f64]) -> Complex64 {
        let z: Vec<f64> = q.iter().chain(p).copied().collect();
        self.poly.eval_real(&z)
    }

    pub(crate) fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: other.n });
        }
        Ok(())
    }

    /// Serializes to the line format `alpha=(..) beta=(..) re im`,
    /// preceded by a `# n=<n>` header.
    pub fn to_text(&self) -> String {
        let mut out = format!("# n={}\n", self.n);
        let join = |v: &[u32]| v.iter().map(u32::to_string).collect::<Vec<_>>().join(",");
        for (alpha, beta, c) in self.terms() {
            let _ = writeln!(
                out,
                "alpha=({}) beta=({}) {:e} {:e}",
                join(alpha),
                join(beta),
                c.re,
                c.im
            );
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut n: Option<usize> = None;
        let mut poly: Option<Polynomial> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let perr = |msg: String| Error::Parse { line: lineno + 1, msg };
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                if let Some(v) = comment.trim().strip_prefix("n=") {
                    n = Some(v.trim().parse().map_err(|_| perr(format!("bad dimension {v:?}")))?);
                }
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 4 {
                return Err(perr(format!("expected 4 fields, found {}", fields.len())));
            }
            let alpha = parse_tuple(fields[0], "alpha").map_err(perr)?;
            let beta = parse_tuple(fields[1], "beta").map_err(perr)?;
            if alpha.len() != beta.len() {
                return Err(perr("alpha and beta differ in length".into()));
            }
            let dim = *n.get_or_insert(alpha.len());
            if alpha.len() != dim {
                return Err(perr(format!("expected {dim} exponents, found {}", alpha.len())));
            }
            let re: f64 = fields[2].parse().map_err(|_| perr(format!("bad real part {:?}", fields[2])))?;
            let im: f64 = fields[3].parse().map_err(|_| perr(format!("bad imaginary part {:?}", fields[3])))?;
            let e: Exponents = alpha.into_iter().chain(beta).collect();
            poly.get_or_insert_with(|| Polynomial::zero(2 * dim))
                .add_term(e, Complex64::new(re, im));
        }
        let n = n.ok_or(Error::Parse { line: 0, msg: "empty symbol without `# n=` header".into() })?;
        Ok(Self { n, poly: poly.unwrap_or_else(|| Polynomial::zero(2 * n)) })
    }
}

fn parse_tuple(field: &str, name: &str) -> std::result::Result<Vec<u32>, String> {
    let body = field
        .strip_prefix(name)
        .and_then(|s| s.strip_prefix("=("))
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| format!("expected {name}=(..), found {field:?}"))?;
    if body.is_empty() {
        return Ok(Vec::new());
    }
    body.split(',')
        .map(|t| t.trim().parse::<u32>().map_err(|_| format!("bad exponent {t:?}")))
        .collect()
}

impl Add for &PolySymbol {
    type Output = PolySymbol;
    fn add(self, rhs: &PolySymbol) -> PolySymbol {
        PolySymbol { n: self.n, poly: &self.poly + &rhs.poly }
    }
}

impl Sub for &PolySymbol {
    type Output = PolySymbol;
    fn sub(self, rhs: &PolySymbol) -> PolySymbol {
        PolySymbol { n: self.n, poly: &self.poly - &rhs.poly }
    }
}

impl Mul for &PolySymbol {
    type Output = PolySymbol;
    fn mul(self, rhs: &PolySymbol) -> PolySymbol {
        PolySymbol { n: self.n, poly: &self.poly * &rhs.poly }
    }
}

impl Neg for &PolySymbol {
    type Output = PolySymbol;
    fn neg(self) -> PolySymbol {
        self.scale(-1.0)
    }
}
