use num_complex::Complex64;

use super::grid::{PolarGrid, PolarSection};
use crate::numeric::lagrange_weights;

/// A transported section and whether the transport was an exact grid
/// shift (`false` means interpolation in `s` was used).
#[derive(Debug, Clone, PartialEq)]
pub struct Transported {
    pub section: PolarSection,
    pub exact: bool,
}

/// Row of `phi` at an arbitrary `s`: exact row on grid points, 8-point
/// Lagrange interpolation otherwise, zero outside the grid.
pub(crate) fn row_at_s(phi: &PolarSection, s: f64) -> Vec<Complex64> {
    let g = phi.grid();
    let m = g.m();
    let x = (s - g.s_min()) / g.h();
    let last = (g.s_count() - 1) as f64;
    if x < -1e-9 || x > last + 1e-9 {
        return vec![Complex64::new(0.0, 0.0); m];
    }
    let k = x.round();
    if (x - k).abs() <= 1e-9 {
        return phi.row(k as usize).to_vec();
    }
    let width = 8usize.min(g.s_count());
    let start = (x.floor() as isize - 3).clamp(0, (g.s_count() - width) as isize) as usize;
    let nodes: Vec<f64> = (start..start + width).map(|i| i as f64).collect();
    let w = lagrange_weights(x, &nodes);
    let mut out = vec![Complex64::new(0.0, 0.0); m];
    for (r, wr) in (start..start + width).zip(w) {
        for (o, v) in out.iter_mut().zip(phi.row(r)) {
            *o += v * wr;
        }
    }
    out
}

/// `(weight * phi)(s + 2t)`.
fn shifted(phi: &PolarSection, t: f64, weight: f64) -> Transported {
    let g = phi.grid();
    let mut out = PolarSection::zeros(g);
    let exact = match g.shift_rows(t) {
        Some(k) => {
            for i in 0..g.s_count() {
                let src = i as isize + k;
                if (0..g.s_count() as isize).contains(&src) {
                    let row: Vec<Complex64> = phi.row(src as usize).iter().map(|z| z * weight).collect();
                    out.row_mut(i).copy_from_slice(&row);
                }
            }
            true
        }
        None => {
            for i in 0..g.s_count() {
                let row: Vec<Complex64> = row_at_s(phi, g.s(i) + 2.0 * t).iter().map(|z| z * weight).collect();
                out.row_mut(i).copy_from_slice(&row);
            }
            false
        }
    };
    Transported { section: out, exact }
}

/// `R_t^0 phi(q) = e^{(n-2)t/2} phi(e^t q)`.
pub fn flow_transport(t: f64, phi: &PolarSection) -> Transported {
    let n = phi.grid().n() as f64;
    shifted(phi, t, ((n - 2.0) * t / 2.0).exp())
}

/// `W~_t^0 phi(q) = e^{nt/2} phi(e^t q)`.
pub fn dilation_group(t: f64, phi: &PolarSection) -> Transported {
    let n = phi.grid().n() as f64;
    shifted(phi, t, (n * t / 2.0).exp())
}

/// `t` values that shift the grid by `k` rows.
pub fn shift_time(grid: &PolarGrid, rows: isize) -> f64 {
    rows as f64 * grid.h() / 2.0
}
