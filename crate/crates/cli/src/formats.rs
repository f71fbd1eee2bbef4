//! Binary exports: little-endian complex128 (re, im) data plus a JSON
//! sidecar at `<path>.json`.
//!
//! * dense: one `dim x dim` matrix, row-major.
//! * banded: `S` rows of `2 b + 1` blocks, each `M x M` row-major; block `d`
//!   of row `i` maps fiber `i + d - b` into fiber `i`.
//! * field: `count` blocks of `M x M`, row-major, for fibers
//!   `first..first + count`.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use opfield::hilbert_field::{resample_cartesian, resample_polar, PolarGrid, PolarSection};
use opfield::op_field::{BandedOperator, FnOperator, GlobalOperator, OperatorField};
use opfield::weyl::{CartesianGrid, DenseOperator};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarMeta {
    pub n: usize,
    #[serde(rename = "S")]
    pub s_count: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub s_min: f64,
    pub s_max: f64,
}

impl PolarMeta {
    pub fn of(g: &PolarGrid) -> Self {
        Self { n: g.n(), s_count: g.s_count(), m: g.m(), s_min: g.s_min(), s_max: g.s_max() }
    }

    pub fn grid(&self) -> Result<PolarGrid> {
        Ok(PolarGrid::new(self.n, self.s_count, self.m, self.s_min, self.s_max)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Header {
    Dense {
        n: usize,
        #[serde(rename = "N")]
        points: usize,
        #[serde(rename = "L")]
        half_width: f64,
        dim: usize,
    },
    Banded {
        #[serde(flatten)]
        grid: PolarMeta,
        bandwidth: usize,
    },
    Field {
        #[serde(flatten)]
        grid: PolarMeta,
        first: usize,
        count: usize,
        leakage: f64,
    },
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn push_matrix(out: &mut Vec<u8>, m: &DMatrix<Complex64>) {
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.extend_from_slice(&m[(i, j)].re.to_le_bytes());
            out.extend_from_slice(&m[(i, j)].im.to_le_bytes());
        }
    }
}

fn read_matrices(bytes: &[u8], count: usize, dim: usize) -> Result<Vec<DMatrix<Complex64>>> {
    let expected = count * dim * dim * 16;
    if bytes.len() != expected {
        bail!("data has {} bytes, header implies {expected}", bytes.len());
    }
    let value = |k: usize| {
        let f = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().expect("8 bytes"));
        Complex64::new(f(16 * k), f(16 * k + 8))
    };
    Ok((0..count).map(|b| DMatrix::from_fn(dim, dim, |i, j| value(b * dim * dim + i * dim + j))).collect())
}

fn write_pair(path: &Path, header: &Header, data: &[u8]) -> Result<()> {
    fs::write(path, data).with_context(|| format!("cannot write {}", path.display()))?;
    let side = sidecar_path(path);
    fs::write(&side, serde_json::to_string_pretty(header)? + "\n")
        .with_context(|| format!("cannot write {}", side.display()))?;
    Ok(())
}

pub fn read_header(path: &Path) -> Result<Header> {
    let side = sidecar_path(path);
    let text = fs::read_to_string(&side).with_context(|| format!("cannot read {}", side.display()))?;
    serde_json::from_str(&text).with_context(|| format!("bad header {}", side.display()))
}

fn read_data(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).with_context(|| format!("cannot read {}", path.display()))
}

pub fn write_dense(path: &Path, op: &DenseOperator) -> Result<()> {
    let g = op.grid();
    let mut data = Vec::with_capacity(g.len() * g.len() * 16);
    push_matrix(&mut data, op.matrix());
    let header = Header::Dense { n: g.n(), points: g.points(), half_width: g.half_width(), dim: g.len() };
    write_pair(path, &header, &data)
}

pub fn write_banded(path: &Path, op: &BandedOperator) -> Result<()> {
    let mut data = Vec::new();
    for row in op.blocks() {
        for block in row {
            push_matrix(&mut data, block);
        }
    }
    let header = Header::Banded { grid: PolarMeta::of(op.grid()), bandwidth: op.bandwidth() };
    write_pair(path, &header, &data)
}

pub fn write_field(path: &Path, field: &OperatorField, leakage: f64) -> Result<()> {
    let mut data = Vec::new();
    for f in field.fibers() {
        push_matrix(&mut data, f);
    }
    let rows = field.rows();
    let header = Header::Field { grid: PolarMeta::of(field.grid()), first: rows.start, count: rows.len(), leakage };
    write_pair(path, &header, &data)
}

/// An operator read back from disk.
pub enum StoredOperator {
    Dense(DenseOperator),
    Banded(BandedOperator),
}

pub fn read_operator(path: &Path) -> Result<StoredOperator> {
    let bytes = read_data(path)?;
    match read_header(path)? {
        Header::Dense { n, points, half_width, dim } => {
            let grid = CartesianGrid::new(n, points, half_width)?;
            if grid.len() != dim {
                bail!("header dim {dim} does not match grid size {}", grid.len());
            }
            let m = read_matrices(&bytes, 1, dim)?.remove(0);
            Ok(StoredOperator::Dense(DenseOperator::from_matrix(grid, m)?))
        }
        Header::Banded { grid, bandwidth } => {
            let g = grid.grid()?;
            let width = 2 * bandwidth + 1;
            let blocks = read_matrices(&bytes, g.s_count() * width, g.m())?;
            let rows = blocks.chunks(width).map(<[_]>::to_vec).collect();
            Ok(StoredOperator::Banded(BandedOperator::new(&g, bandwidth, rows)?))
        }
        Header::Field { .. } => bail!("{} holds an operator field, not an operator", path.display()),
    }
}

pub fn read_field(path: &Path) -> Result<(OperatorField, f64)> {
    let bytes = read_data(path)?;
    let Header::Field { grid, first, count, leakage } = read_header(path)? else {
        bail!("{} does not hold an operator field", path.display());
    };
    let g = grid.grid()?;
    let fibers = read_matrices(&bytes, count, g.m())?;
    Ok((OperatorField::new(&g, first, fibers)?, leakage))
}

/// A planar dense operator seen on polar sections: resample to the
/// Cartesian grid, apply, resample back.
pub fn dense_on_polar<'a>(op: &'a DenseOperator, polar: &PolarGrid) -> impl GlobalOperator + 'a {
    let cart = *op.grid();
    let polar = polar.clone();
    let target = polar.clone();
    FnOperator::new(&polar, move |phi: &PolarSection| {
        let f = resample_cartesian(phi, cart)?;
        resample_polar(&op.apply(&f)?, &target)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use opfield::op_field::extract_fibers;
    use opfield::phase_space::PolySymbol;
    use opfield::weyl::{quantize_diffop, quantize_kernel_symbol, DEFAULT_ENTRY_CAP};

    #[test]
    fn header_json_shape() {
        let h = Header::Field { grid: PolarMeta::of(&PolarGrid::default()), first: 4, count: 249, leakage: 0.0 };
        let text = serde_json::to_string(&h).unwrap();
        assert!(text.starts_with("{\"kind\":\"field\",\"n\":2,\"S\":257,\"M\":64,"), "{text}");
        assert_eq!(serde_json::from_str::<Header>(&text).unwrap(), h);
    }

    #[test]
    fn dense_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("op.bin");
        let grid = CartesianGrid::new(1, 16, 4.0).unwrap();
        let u = &PolySymbol::q(1, 0) * &PolySymbol::p(1, 0);
        let op = quantize_kernel_symbol(&u, grid, DEFAULT_ENTRY_CAP).unwrap();
        write_dense(&path, &op).unwrap();
        let StoredOperator::Dense(back) = read_operator(&path).unwrap() else { panic!("expected dense") };
        assert_eq!(back, op);
    }

    #[test]
    fn banded_and_field_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let g = PolarGrid::new(2, 32, 8, -1.0, 1.0).unwrap();
        let op = quantize_diffop(&PolySymbol::dilation_generator(2), &g).unwrap();
        let banded = BandedOperator::probe(&op, 8, DEFAULT_ENTRY_CAP).unwrap();
        let path = dir.path().join("op.bin");
        write_banded(&path, &banded).unwrap();
        let StoredOperator::Banded(back) = read_operator(&path).unwrap() else { panic!("expected banded") };
        assert_eq!(back, banded);

        let (field, leakage) = extract_fibers(&back).unwrap();
        let fpath = dir.path().join("field.bin");
        write_field(&fpath, &field, leakage).unwrap();
        let (f2, l2) = read_field(&fpath).unwrap();
        assert_eq!((f2, l2), (field, leakage));
        assert!(read_field(&path).is_err());
    }

    #[test]
    fn truncated_data_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("op.bin");
        let grid = CartesianGrid::new(1, 8, 4.0).unwrap();
        write_dense(&path, &DenseOperator::identity(grid)).unwrap();
        fs::write(&path, [0u8; 17]).unwrap();
        assert!(read_operator(&path).is_err());
    }
}
