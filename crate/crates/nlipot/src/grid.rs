//! Centered boxes, uniform tensor grids, and scalar fields.
//!
//! Grid node `n_j` on axis `j` sits at `-R_j/2 + n_j h_j` with `h_j = R_j/N_j`.
//! Fields are stored row-major, last axis fastest.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::{Error, Result};

const MAGIC: &[u8; 8] = b"NLIF0001";

/// Box `∏_j [-R_j/2, R_j/2]` in 2 or 3 dimensions.
#[derive(Clone, Debug, PartialEq)]
pub struct Domain {
    extents: Vec<f64>,
}

impl Domain {
    pub fn new(extents: &[f64]) -> Result<Self> {
        if !(2..=3).contains(&extents.len()) {
            return Err(Error::InvalidGrid(format!(
                "dimension must be 2 or 3, got {}",
                extents.len()
            )));
        }
        if extents.iter().any(|&r| !(r.is_finite() && r > 0.0)) {
            return Err(Error::InvalidGrid("box extents must be positive".into()));
        }
        Ok(Self { extents: extents.to_vec() })
    }

    /// Box `[-r/2, r/2]^dim`.
    pub fn cube(dim: usize, r: f64) -> Result<Self> {
        Self::new(&vec![r; dim])
    }

    pub fn dim(&self) -> usize {
        self.extents.len()
    }

    pub fn extents(&self) -> &[f64] {
        &self.extents
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct UniformGrid {
    domain: Domain,
    counts: Vec<usize>,
}

impl UniformGrid {
    pub fn new(domain: Domain, counts: &[usize]) -> Result<Self> {
        if counts.len() != domain.dim() {
            return Err(Error::InvalidGrid(format!(
                "{} counts for a {}-dimensional box",
                counts.len(),
                domain.dim()
            )));
        }
        if let Some(&n) = counts.iter().find(|&&n| n < 4 || n % 2 != 0) {
            return Err(Error::InvalidGrid(format!("count {n} must be even and at least 4")));
        }
        Ok(Self { domain, counts: counts.to_vec() })
    }

    pub fn dim(&self) -> usize {
        self.counts.len()
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn extents(&self) -> &[f64] {
        self.domain.extents()
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.extents()[axis] / self.counts[axis] as f64
    }

    pub fn spacings(&self) -> Vec<f64> {
        (0..self.dim()).map(|j| self.spacing(j)).collect()
    }

    /// Product of the mesh sizes, the trapezoidal cell volume.
    pub fn cell_volume(&self) -> f64 {
        (0..self.dim()).map(|j| self.spacing(j)).product()
    }

    pub fn coordinate(&self, axis: usize, n: usize) -> f64 {
        -0.5 * self.extents()[axis] + n as f64 * self.spacing(axis)
    }

    /// Multi-index of a flat row-major offset.
    pub fn unflatten(&self, mut flat: usize) -> [usize; 3] {
        let mut idx = [0; 3];
        for j in (0..self.dim()).rev() {
            idx[j] = flat % self.counts[j];
            flat /= self.counts[j];
        }
        idx
    }

    /// Position of a flat row-major offset; unused trailing entries are zero.
    pub fn node(&self, flat: usize) -> [f64; 3] {
        let idx = self.unflatten(flat);
        let mut x = [0.0; 3];
        for j in 0..self.dim() {
            x[j] = self.coordinate(j, idx[j]);
        }
        x
    }

    /// Samples `f` at every node.
    pub fn sample<F: FnMut(&[f64]) -> f64>(&self, mut f: F) -> Result<ScalarField> {
        let d = self.dim();
        let mut values = Vec::with_capacity(self.len());
        for flat in 0..self.len() {
            let x = self.node(flat);
            let v = f(&x[..d]);
            if !v.is_finite() {
                return Err(Error::NonFinite(flat));
            }
            values.push(v);
        }
        Ok(ScalarField::real(self.clone(), values).expect("length matches grid"))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Values {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    grid: UniformGrid,
    values: Values,
}

impl ScalarField {
    pub fn real(grid: UniformGrid, values: Vec<f64>) -> Result<Self> {
        Self::check_len(&grid, values.len())?;
        Ok(Self { grid, values: Values::Real(values) })
    }

    pub fn complex(grid: UniformGrid, values: Vec<Complex64>) -> Result<Self> {
        Self::check_len(&grid, values.len())?;
        Ok(Self { grid, values: Values::Complex(values) })
    }

    pub fn zeros(grid: UniformGrid) -> Self {
        let n = grid.len();
        Self { grid, values: Values::Real(vec![0.0; n]) }
    }

    fn check_len(grid: &UniformGrid, len: usize) -> Result<()> {
        if len != grid.len() {
            return Err(Error::Mismatch(format!(
                "{len} values for a grid of {} nodes",
                grid.len()
            )));
        }
        Ok(())
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn values(&self) -> &Values {
        &self.values
    }

    pub fn is_complex(&self) -> bool {
        matches!(self.values, Values::Complex(_))
    }

    /// Real samples, or `None` for a complex field.
    pub fn as_real(&self) -> Option<&[f64]> {
        match &self.values {
            Values::Real(v) => Some(v),
            Values::Complex(_) => None,
        }
    }

    pub fn as_complex(&self) -> Option<&[Complex64]> {
        match &self.values {
            Values::Complex(v) => Some(v),
            Values::Real(_) => None,
        }
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        match &self.values {
            Values::Real(v) => v.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            Values::Complex(v) => v.clone(),
        }
    }

    /// Real parts of the samples.
    pub fn re(&self) -> Vec<f64> {
        match &self.values {
            Values::Real(v) => v.clone(),
            Values::Complex(v) => v.iter().map(|z| z.re).collect(),
        }
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_from(&mut BufReader::new(File::open(path)?))
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&(self.grid.dim() as u32).to_le_bytes())?;
        w.write_all(&(self.is_complex() as u32).to_le_bytes())?;
        for &n in self.grid.counts() {
            w.write_all(&(n as u32).to_le_bytes())?;
        }
        for &r in self.grid.extents() {
            w.write_all(&r.to_le_bytes())?;
        }
        match &self.values {
            Values::Real(v) => {
                for x in v {
                    w.write_all(&x.to_le_bytes())?;
                }
            }
            Values::Complex(v) => {
                for z in v {
                    w.write_all(&z.re.to_le_bytes())?;
                    w.write_all(&z.im.to_le_bytes())?;
                }
            }
        }
        Ok(())
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        let mut cur = Cursor { bytes: &bytes, pos: 0 };
        if cur.take(8)? != MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        let dim = cur.u32()? as usize;
        if !(2..=3).contains(&dim) {
            return Err(Error::Format(format!("unsupported dimension {dim}")));
        }
        let kind = cur.u32()?;
        if kind > 1 {
            return Err(Error::Format(format!("unknown kind {kind}")));
        }
        let counts = (0..dim).map(|_| cur.u32().map(|n| n as usize)).collect::<Result<Vec<_>>>()?;
        let extents = (0..dim).map(|_| cur.f64()).collect::<Result<Vec<_>>>()?;
        let grid = UniformGrid::new(Domain::new(&extents)?, &counts)
            .map_err(|e| Error::Format(e.to_string()))?;
        let per = if kind == 1 { 16 } else { 8 };
        let expected = grid.len() * per;
        let rest = bytes.len() - cur.pos;
        if rest != expected {
            return Err(Error::Format(format!(
                "payload has {rest} bytes, header implies {expected}"
            )));
        }
        if kind == 1 {
            let v = (0..grid.len())
                .map(|_| Ok(Complex64::new(cur.f64()?, cur.f64()?)))
                .collect::<Result<Vec<_>>>()?;
            Self::complex(grid, v)
        } else {
            let v = (0..grid.len()).map(|_| cur.f64()).collect::<Result<Vec<_>>>()?;
            Self::real(grid, v)
        }
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos + n;
        if end > self.bytes.len() {
            return Err(Error::Format("truncated file".into()));
        }
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}
