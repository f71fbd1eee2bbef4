//! Weyl quantization through the integral kernel
//! `K(x, y) = (2 pi)^{-n} int u((x + y)/2, p) e^{i p (x - y)} dp`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use super::cartesian::{CartesianGrid, DenseOperator};
use crate::error::{Error, Result};
use crate::phase_space::PolySymbol;

/// Default cap on the number of matrix entries `N^{2n}`.
pub const DEFAULT_ENTRY_CAP: usize = 1 << 24;

/// Midpoints handled per parallel batch in two dimensions.
const BATCH: usize = 8;

/// `A_kl = N^{-n} sum'_j u(m_kl, p_j) e^{2 pi i j (k - l) / N}` with
/// `j = -N/2..N/2` and half weights on `+-N/2`. Real `u` gives a Hermitian
/// matrix and `u = 1` the identity.
pub fn quantize_kernel<F>(u: F, grid: CartesianGrid, cap: usize) -> Result<DenseOperator>
where
    F: Fn(&[f64], &[f64]) -> Complex64 + Sync,
{
    let dim = grid.len();
    let entries = dim.saturating_mul(dim);
    if entries > cap {
        return Err(Error::GridTooLarge { entries, cap });
    }
    let matrix = match grid.n() {
        1 => assemble_1d(&u, grid),
        _ => assemble_2d(&u, grid),
    };
    DenseOperator::from_matrix(grid, matrix)
}

pub fn quantize_kernel_symbol(u: &PolySymbol, grid: CartesianGrid, cap: usize) -> Result<DenseOperator> {
    if u.n() != grid.n() {
        return Err(Error::DimensionMismatch { expected: grid.n(), found: u.n() });
    }
    let compiled = CompiledSymbol::new(u);
    quantize_kernel(|q, p| compiled.eval(q, p), grid, cap)
}

/// Flat term list for fast repeated evaluation.
struct CompiledSymbol {
    n: usize,
    terms: Vec<(Vec<u32>, Vec<u32>, Complex64)>,
}

impl CompiledSymbol {
    fn new(u: &PolySymbol) -> Self {
        let terms = u.terms().map(|(a, b, c)| (a.to_vec(), b.to_vec(), c)).collect();
        Self { n: u.n(), terms }
    }

    fn eval(&self, q: &[f64], p: &[f64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(a, b, c)| {
                let mut m = 1.0;
                for i in 0..self.n {
                    m *= q[i].powi(a[i] as i32) * p[i].powi(b[i] as i32);
                }
                c * m
            })
            .sum()
    }
}

/// `u` sampled on `j = -N/2..N/2` and folded to `N` periodic slots, the two
/// Nyquist samples averaged.
fn folded_axis(n: usize, mut sample: impl FnMut(i64) -> Complex64) -> Vec<Complex64> {
    let half = n as i64 / 2;
    let mut v = vec![Complex64::new(0.0, 0.0); n];
    for j in (-half + 1)..half {
        v[j.rem_euclid(n as i64) as usize] = sample(j);
    }
    v[half as usize] = (sample(-half) + sample(half)) * 0.5;
    v
}

fn midpoint(grid: &CartesianGrid, sum_index: usize) -> f64 {
    -grid.half_width() + (sum_index as f64 + 1.0) * grid.dx() / 2.0
}

fn assemble_1d<F>(u: &F, grid: CartesianGrid) -> DMatrix<Complex64>
where
    F: Fn(&[f64], &[f64]) -> Complex64 + Sync,
{
    let n = grid.points();
    let ifft = FftPlanner::new().plan_fft_inverse(n);
    let tables: Vec<Vec<Complex64>> = (0..2 * n - 1)
        .into_par_iter()
        .map(|sum| {
            let m = midpoint(&grid, sum);
            let mut v = folded_axis(n, |j| u(&[m], &[grid.momentum(j)]));
            ifft.process(&mut v);
            v.iter_mut().for_each(|z| *z /= n as f64);
            v
        })
        .collect();
    DMatrix::from_fn(n, n, |k, l| tables[k + l][(k as i64 - l as i64).rem_euclid(n as i64) as usize])
}

fn assemble_2d<F>(u: &F, grid: CartesianGrid) -> DMatrix<Complex64>
where
    F: Fn(&[f64], &[f64]) -> Complex64 + Sync,
{
    let n = grid.points();
    let dim = n * n;
    let ifft = FftPlanner::new().plan_fft_inverse(n);
    let scale = 1.0 / (n * n) as f64;
    let mut matrix = DMatrix::zeros(dim, dim);
    let sums: Vec<usize> = (0..2 * n - 1).collect();
    for batch in sums.chunks(BATCH) {
        // for each first-axis midpoint: one N x N table per second-axis midpoint
        let tables: Vec<(usize, Vec<Vec<Complex64>>)> = batch
            .par_iter()
            .map(|&s1| {
                let m1 = midpoint(&grid, s1);
                let per_s2 = (0..2 * n - 1)
                    .map(|s2| {
                        let m2 = midpoint(&grid, s2);
                        let mut table = vec![Complex64::new(0.0, 0.0); dim];
                        // fold and transform along the second axis for every j1
                        let rows: Vec<Vec<Complex64>> = {
                            let half = n as i64 / 2;
                            let mut raw: Vec<(i64, Vec<Complex64>)> = Vec::with_capacity(n + 1);
                            for j1 in -half..=half {
                                let p1 = grid.momentum(j1);
                                let mut v = folded_axis(n, |j2| u(&[m1, m2], &[p1, grid.momentum(j2)]));
                                ifft.process(&mut v);
                                raw.push((j1, v));
                            }
                            let mut folded = vec![vec![Complex64::new(0.0, 0.0); n]; n];
                            for (j1, v) in raw {
                                let slot = j1.rem_euclid(n as i64) as usize;
                                let w = if j1.abs() == half { 0.5 } else { 1.0 };
                                for (f, x) in folded[slot].iter_mut().zip(v) {
                                    *f += x * w;
                                }
                            }
                            folded
                        };
                        // transform along the first axis
                        let mut col = vec![Complex64::new(0.0, 0.0); n];
                        for d2 in 0..n {
                            for (j1, c) in col.iter_mut().enumerate() {
                                *c = rows[j1][d2];
                            }
                            ifft.process(&mut col);
                            for d1 in 0..n {
                                table[d1 * n + d2] = col[d1] * scale;
                            }
                        }
                        table
                    })
                    .collect();
                (s1, per_s2)
            })
            .collect();
        for (s1, per_s2) in tables {
            for k1 in s1.saturating_sub(n - 1)..=s1.min(n - 1) {
                let l1 = s1 - k1;
                let d1 = (k1 as i64 - l1 as i64).rem_euclid(n as i64) as usize;
                for (s2, table) in per_s2.iter().enumerate() {
                    for k2 in s2.saturating_sub(n - 1)..=s2.min(n - 1) {
                        let l2 = s2 - k2;
                        let d2 = (k2 as i64 - l2 as i64).rem_euclid(n as i64) as usize;
                        matrix[(k1 * n + k2, l1 * n + l2)] = table[d1 * n + d2];
                    }
                }
            }
        }
    }
    matrix
}
