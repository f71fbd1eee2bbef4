use std::ops::Range;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert_field::{connection_apply, ConnectionFormula, PolarGrid, PolarSection};
use crate::numeric::spectral_norm;
use crate::phase_space::RadialVectorField;
use crate::weyl::PolarDiffOperator;

/// Fiber matrices `A^(lambda_i)` for the consecutive rows `first..first+len`
/// of a polar grid, acting on trivialized angular values.
///
/// For `n = 2` the trivialization is multiplication by the constant
/// `2^{-1/2}`, so a fiber matrix is the same in both pictures and its
/// operator norm is the Euclidean spectral norm.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorField {
    grid: PolarGrid,
    first: usize,
    fibers: Vec<DMatrix<Complex64>>,
}

impl OperatorField {
    pub fn new(grid: &PolarGrid, first: usize, fibers: Vec<DMatrix<Complex64>>) -> Result<Self> {
        let m = grid.m();
        if first + fibers.len() > grid.s_count() {
            return Err(Error::IndexOutOfRange(format!(
                "fibers {first}..{} beyond {} rows",
                first + fibers.len(),
                grid.s_count()
            )));
        }
        if let Some(bad) = fibers.iter().find(|f| f.nrows() != m || f.ncols() != m) {
            return Err(Error::DimensionMismatch { expected: m, found: bad.nrows() });
        }
        Ok(Self { grid: grid.clone(), first, fibers })
    }

    pub fn from_fn(grid: &PolarGrid, rows: Range<usize>, f: impl Fn(usize) -> DMatrix<Complex64>) -> Result<Self> {
        let first = rows.start;
        Self::new(grid, first, rows.map(f).collect())
    }

    /// The same matrix on every row.
    pub fn constant(grid: &PolarGrid, fiber: DMatrix<Complex64>) -> Result<Self> {
        Self::from_fn(grid, 0..grid.s_count(), |_| fiber.clone())
    }

    /// `f(lambda_i) * fiber`.
    pub fn radial(grid: &PolarGrid, fiber: &DMatrix<Complex64>, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_fn(grid, 0..grid.s_count(), |i| fiber * Complex64::new(f(grid.lambda(i)), 0.0))
    }

    pub fn grid(&self) -> &PolarGrid {
        &self.grid
    }

    pub fn rows(&self) -> Range<usize> {
        self.first..self.first + self.fibers.len()
    }

    pub fn fibers(&self) -> &[DMatrix<Complex64>] {
        &self.fibers
    }

    /// Fiber at absolute grid row `i`.
    pub fn fiber(&self, i: usize) -> Option<&DMatrix<Complex64>> {
        i.checked_sub(self.first).and_then(|k| self.fibers.get(k))
    }

    pub fn fiber_norm(&self, i: usize) -> Option<f64> {
        self.fiber(i).map(spectral_norm)
    }

    pub fn fiber_norms(&self) -> Vec<f64> {
        self.fibers.iter().map(spectral_norm).collect()
    }

    pub fn max_fiber_norm(&self) -> f64 {
        self.fiber_norms().into_iter().fold(0.0, f64::max)
    }

    /// Restriction to the rows in `rows` (intersected with the field's own).
    pub fn restrict(&self, rows: Range<usize>) -> Self {
        let lo = rows.start.max(self.first);
        let hi = rows.end.min(self.rows().end).max(lo);
        Self {
            grid: self.grid.clone(),
            first: lo,
            fibers: self.fibers[lo - self.first..hi - self.first].to_vec(),
        }
    }

    fn common_rows(&self, other: &Self) -> Result<Range<usize>> {
        self.grid.check_same(&other.grid)?;
        let lo = self.first.max(other.first);
        let hi = self.rows().end.min(other.rows().end).max(lo);
        Ok(lo..hi)
    }

    fn zip_with(
        &self,
        other: &Self,
        f: impl Fn(&DMatrix<Complex64>, &DMatrix<Complex64>) -> DMatrix<Complex64>,
    ) -> Result<Self> {
        let rows = self.common_rows(other)?;
        let fibers = rows.clone().map(|i| f(&self.fibers[i - self.first], &other.fibers[i - other.first])).collect();
        Ok(Self { grid: self.grid.clone(), first: rows.start, fibers })
    }

    /// Sum on the common rows.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Fiberwise product `A(lambda) B(lambda)`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn adjoint(&self) -> Self {
        Self { grid: self.grid.clone(), first: self.first, fibers: self.fibers.iter().map(|f| f.adjoint()).collect() }
    }

    pub fn scale(&self, c: impl Into<Complex64>) -> Self {
        let c = c.into();
        Self { grid: self.grid.clone(), first: self.first, fibers: self.fibers.iter().map(|f| f * c).collect() }
    }

    /// `f(lambda_i) A(lambda_i)`.
    pub fn scale_radial(&self, f: impl Fn(f64) -> f64) -> Self {
        let fibers = self
            .rows()
            .zip(&self.fibers)
            .map(|(i, a)| a * Complex64::new(f(self.grid.lambda(i)), 0.0))
            .collect();
        Self { grid: self.grid.clone(), first: self.first, fibers }
    }

    /// `max_i ||A(lambda_i) - B(lambda_i)||` over the common rows.
    pub fn max_norm_difference(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.max_fiber_norm())
    }
}

/// A linear map on polar sections, the grid form of an operator on the
/// direct integral.
pub trait GlobalOperator: Sync {
    fn grid(&self) -> &PolarGrid;
    fn apply(&self, phi: &PolarSection) -> Result<PolarSection>;
}

impl GlobalOperator for PolarDiffOperator {
    fn grid(&self) -> &PolarGrid {
        PolarDiffOperator::grid(self)
    }

    fn apply(&self, phi: &PolarSection) -> Result<PolarSection> {
        PolarDiffOperator::apply(self, phi)
    }
}

/// Fiberwise action; rows outside the field map to zero.
impl GlobalOperator for OperatorField {
    fn grid(&self) -> &PolarGrid {
        &self.grid
    }

    fn apply(&self, phi: &PolarSection) -> Result<PolarSection> {
        self.grid.check_same(phi.grid())?;
        let mut out = PolarSection::zeros(&self.grid);
        for (i, a) in self.rows().zip(&self.fibers) {
            let v = a * DVector::from_column_slice(phi.row(i));
            out.row_mut(i).copy_from_slice(v.as_slice());
        }
        Ok(out)
    }
}

/// Pointwise multiplication by a sampled function.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplicationOperator {
    grid: PolarGrid,
    values: Vec<Complex64>,
}

impl MultiplicationOperator {
    pub fn new(grid: &PolarGrid, f: impl Fn(f64, f64) -> Complex64) -> Self {
        Self { grid: grid.clone(), values: PolarSection::from_fn(grid, f).into_values() }
    }

    pub fn radial(grid: &PolarGrid, f: impl Fn(f64) -> f64) -> Self {
        Self::new(grid, |s, _| Complex64::new(f(s.exp()), 0.0))
    }
}

impl GlobalOperator for MultiplicationOperator {
    fn grid(&self) -> &PolarGrid {
        &self.grid
    }

    fn apply(&self, phi: &PolarSection) -> Result<PolarSection> {
        self.grid.check_same(phi.grid())?;
        let v = phi.values().iter().zip(&self.values).map(|(a, b)| a * b).collect();
        PolarSection::from_values(&self.grid, v)
    }
}

/// Any closure on sections.
pub struct FnOperator<F> {
    grid: PolarGrid,
    f: F,
}

impl<F> FnOperator<F>
where
    F: Fn(&PolarSection) -> Result<PolarSection> + Sync,
{
    pub fn new(grid: &PolarGrid, f: F) -> Self {
        Self { grid: grid.clone(), f }
    }
}

impl<F> GlobalOperator for FnOperator<F>
where
    F: Fn(&PolarSection) -> Result<PolarSection> + Sync,
{
    fn grid(&self) -> &PolarGrid {
        &self.grid
    }

    fn apply(&self, phi: &PolarSection) -> Result<PolarSection> {
        self.grid.check_same(phi.grid())?;
        (self.f)(phi)
    }
}

/// `[nabla_X, O]` as a global operator.
pub struct Commutator<'a, O: ?Sized> {
    x: &'a RadialVectorField,
    op: &'a O,
}

impl<'a, O: GlobalOperator + ?Sized> Commutator<'a, O> {
    pub fn new(x: &'a RadialVectorField, op: &'a O) -> Self {
        Self { x, op }
    }
}

impl<O: GlobalOperator + ?Sized> GlobalOperator for Commutator<'_, O> {
    fn grid(&self) -> &PolarGrid {
        self.op.grid()
    }

    fn apply(&self, phi: &PolarSection) -> Result<PolarSection> {
        let a = connection_apply(self.x, &self.op.apply(phi)?, ConnectionFormula::A);
        let b = self.op.apply(&connection_apply(self.x, phi, ConnectionFormula::A))?;
        a.sub(&b)
    }
}

/// Block-banded operator: `blocks[i][d]` maps row `i + d - bandwidth` into
/// row `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedOperator {
    grid: PolarGrid,
    bandwidth: usize,
    blocks: Vec<Vec<DMatrix<Complex64>>>,
}

impl BandedOperator {
    pub fn new(grid: &PolarGrid, bandwidth: usize, blocks: Vec<Vec<DMatrix<Complex64>>>) -> Result<Self> {
        let m = grid.m();
        if blocks.len() != grid.s_count() {
            return Err(Error::DimensionMismatch { expected: grid.s_count(), found: blocks.len() });
        }
        for row in &blocks {
            if row.len() != 2 * bandwidth + 1 {
                return Err(Error::DimensionMismatch { expected: 2 * bandwidth + 1, found: row.len() });
            }
            if let Some(bad) = row.iter().find(|b| b.nrows() != m || b.ncols() != m) {
                return Err(Error::DimensionMismatch { expected: m, found: bad.nrows() });
            }
        }
        Ok(Self { grid: grid.clone(), bandwidth, blocks })
    }

    /// Reads the blocks of `op` off its responses to row deltas, assuming it
    /// couples rows at most `bandwidth` apart. Entry count is capped at `cap`.
    pub fn probe(op: &dyn GlobalOperator, bandwidth: usize, cap: usize) -> Result<Self> {
        let g = op.grid().clone();
        let (s, m) = (g.s_count(), g.m());
        let width = 2 * bandwidth + 1;
        let entries = s * width * m * m;
        if entries > cap {
            return Err(Error::GridTooLarge { entries, cap });
        }
        let mut blocks = vec![vec![DMatrix::zeros(m, m); width]; s];
        let stride = width.min(s);
        for class in 0..stride {
            for j in 0..m {
                let mut probe = PolarSection::zeros(&g);
                for src in (class..s).step_by(stride) {
                    probe.row_mut(src)[j] = Complex64::new(1.0, 0.0);
                }
                let resp = op.apply(&probe)?;
                for (i, row_blocks) in blocks.iter_mut().enumerate() {
                    // the unique source row of this class within reach of i
                    let lo = i.saturating_sub(bandwidth);
                    let Some(src) = (lo..=(i + bandwidth).min(s - 1)).find(|r| r % stride == class) else {
                        continue;
                    };
                    let d = src + bandwidth - i;
                    for (k, v) in resp.row(i).iter().enumerate() {
                        row_blocks[d][(k, j)] = *v;
                    }
                }
            }
        }
        Self::new(&g, bandwidth, blocks)
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    pub fn blocks(&self) -> &[Vec<DMatrix<Complex64>>] {
        &self.blocks
    }
}

impl GlobalOperator for BandedOperator {
    fn grid(&self) -> &PolarGrid {
        &self.grid
    }

    fn apply(&self, phi: &PolarSection) -> Result<PolarSection> {
        self.grid.check_same(phi.grid())?;
        let s = self.grid.s_count();
        let mut out = PolarSection::zeros(&self.grid);
        for (i, row_blocks) in self.blocks.iter().enumerate() {
            let mut acc = DVector::<Complex64>::zeros(self.grid.m());
            for (d, b) in row_blocks.iter().enumerate() {
                let src = i as isize + d as isize - self.bandwidth as isize;
                if (0..s as isize).contains(&src) {
                    acc += b * DVector::from_column_slice(phi.row(src as usize));
                }
            }
            out.row_mut(i).copy_from_slice(acc.as_slice());
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert_field::battery::battery;
    use crate::phase_space::{angular_momentum, PolySymbol};
    use crate::weyl::quantize_diffop;

    #[test]
    fn field_algebra_on_common_rows() {
        let g = PolarGrid::default();
        let id = DMatrix::<Complex64>::identity(g.m(), g.m());
        let a = OperatorField::radial(&g, &id, |l| l).unwrap();
        let b = a.restrict(10..20);
        assert_eq!(b.rows(), 10..20);
        let c = a.sub(&b).unwrap();
        assert_eq!(c.rows(), 10..20);
        assert_eq!(c.max_fiber_norm(), 0.0);
        assert!((a.fiber_norm(128).unwrap() - 1.0).abs() < 1e-12);
        assert!(a.fiber(g.s_count()).is_none());
        assert!(OperatorField::new(&g, 250, vec![id; 10]).is_err());
    }

    #[test]
    fn banded_probe_reproduces_operators() {
        let g = PolarGrid::new(2, 40, 16, -1.0, 1.0).unwrap();
        let u = &PolySymbol::dilation_generator(2) + &angular_momentum(1, 2, 2).unwrap();
        let op = quantize_diffop(&u, &g).unwrap();
        let banded = BandedOperator::probe(&op, 8, 1 << 24).unwrap();
        let phi = PolarSection::from_fn(&g, |s, t| Complex64::from_polar((-s * s * 4.0).exp(), 2.0 * t));
        let a = op.apply(&phi).unwrap();
        let b = banded.apply(&phi).unwrap();
        assert!(a.sub(&b).unwrap().values().iter().all(|z| z.norm() < 1e-9));
        assert!(matches!(BandedOperator::probe(&op, 8, 1000), Err(Error::GridTooLarge { .. })));
    }

    #[test]
    fn commutator_with_radial_multiplication() {
        // [nabla_X0, lambda] = 2 lambda
        let g = PolarGrid::default();
        let op = MultiplicationOperator::radial(&g, |l| l);
        let x0 = RadialVectorField::x0();
        let c = Commutator::new(&x0, &op);
        for phi in battery(&g).iter().take(3) {
            let got = c.apply(phi).unwrap();
            let expected = phi.multiply_radial(|l| 2.0 * l);
            let err = got.sub(&expected).unwrap().values().iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(err < 1e-9, "{err}");
        }
    }
}
