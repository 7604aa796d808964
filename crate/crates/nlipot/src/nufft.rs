//! Type-1 and type-2 nonuniform FFTs by Gaussian gridding on a twofold
//! oversampled grid.
//!
//! Frequencies are physical: on a grid with spacing `h_j` the canonical angle
//! is `θ_j = k_j h_j`, which must lie in `[-π, π]`. Because the grid is
//! centered, node `n_j` sits at `x = (n_j - N_j/2) h_j` and no extra phase
//! is needed.
//!
//! - type 2: `F(k) = (∏ h_j) Σ_n f(x_n) e^{σ i k·x_n}`
//! - type 1: `g(x_n) = Σ_q c_q e^{σ i k_q·x_n}`

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::fft::{FftNd, Sign};
use crate::grid::{ScalarField, UniformGrid};
use crate::{Error, Result};

/// Accuracy preset of the Gaussian gridding.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    Digits6,
    Digits12,
}

impl Preset {
    /// Half-width of the spreading window in oversampled grid points.
    pub fn half_width(self) -> usize {
        match self {
            Preset::Digits6 => 8,
            Preset::Digits12 => 15,
        }
    }

    /// Gaussian variance `τ` in canonical units for `m` uniform modes.
    pub fn tau(self, m: usize) -> f64 {
        PI * self.half_width() as f64 / (3.0 * (m * m) as f64)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Type1,
    Type2,
}

const OVERSAMPLING: usize = 2;
const BATCH: usize = 4096;

#[derive(Debug)]
pub struct NufftPlan {
    kind: Kind,
    grid: UniformGrid,
    sign: Sign,
    preset: Preset,
    width: usize,
    m: Vec<usize>,
    mr: Vec<usize>,
    padded: Vec<usize>,
    tau: Vec<f64>,
    /// Canonical node angles reduced to `[0, 2π)`.
    theta: Vec<[f64; 3]>,
    /// `e^{m²τ}` per axis, indexed by grid node.
    deconv: Vec<Vec<f64>>,
    scale: f64,
    fft: FftNd,
}

pub fn plan_type2(
    grid: &UniformGrid,
    nodes: &[[f64; 3]],
    preset: Preset,
    sign: Sign,
) -> Result<NufftPlan> {
    NufftPlan::new(Kind::Type2, grid, nodes, preset, sign)
}

pub fn plan_type1(
    nodes: &[[f64; 3]],
    grid: &UniformGrid,
    preset: Preset,
    sign: Sign,
) -> Result<NufftPlan> {
    NufftPlan::new(Kind::Type1, grid, nodes, preset, sign)
}

impl NufftPlan {
    pub fn new(
        kind: Kind,
        grid: &UniformGrid,
        nodes: &[[f64; 3]],
        preset: Preset,
        sign: Sign,
    ) -> Result<Self> {
        crate::init_threads();
        let d = grid.dim();
        let width = preset.half_width();
        let m = grid.counts().to_vec();
        let mr: Vec<usize> = m.iter().map(|&n| OVERSAMPLING * n).collect();
        let h = grid.spacings();
        let mut theta = Vec::with_capacity(nodes.len());
        for (q, k) in nodes.iter().enumerate() {
            let mut t = [0.0; 3];
            for j in 0..d {
                let c = k[j] * h[j];
                if !(c.abs() <= PI * (1.0 + 1e-12)) {
                    return Err(Error::Nyquist { index: q, axis: j });
                }
                t[j] = c.rem_euclid(2.0 * PI);
                if t[j] >= 2.0 * PI {
                    t[j] = 0.0;
                }
            }
            theta.push(t);
        }
        let tau: Vec<f64> = m.iter().map(|&n| preset.tau(n)).collect();
        let deconv = (0..d)
            .map(|j| {
                (0..m[j])
                    .map(|n| {
                        let c = n as f64 - (m[j] / 2) as f64;
                        (c * c * tau[j]).exp()
                    })
                    .collect()
            })
            .collect();
        let mut scale: f64 = (0..d).map(|j| (PI / tau[j]).sqrt() / mr[j] as f64).product();
        if kind == Kind::Type2 {
            scale *= grid.cell_volume();
        }
        Ok(Self {
            kind,
            grid: grid.clone(),
            sign,
            preset,
            width,
            padded: mr.iter().map(|&n| n + 2 * width).collect(),
            fft: FftNd::new(&mr),
            m,
            mr,
            tau,
            theta,
            deconv,
            scale,
        })
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn preset(&self) -> Preset {
        self.preset
    }

    pub fn num_nodes(&self) -> usize {
        self.theta.len()
    }

    /// Oversampled grid sizes.
    pub fn oversampled(&self) -> &[usize] {
        &self.mr
    }

    fn dim(&self) -> usize {
        self.m.len()
    }

    /// First padded index of the window and the Gaussian weights along one axis.
    fn window(&self, t: f64, axis: usize, w: &mut [f64]) -> usize {
        let mr = self.mr[axis];
        let dx = 2.0 * PI / mr as f64;
        let j0 = ((t / dx).floor() as usize).min(mr - 1);
        let inv = 1.0 / (4.0 * self.tau[axis]);
        let first = j0 as f64 + 1.0 - self.width as f64;
        for (l, v) in w.iter_mut().enumerate() {
            let s = (first + l as f64) * dx - t;
            *v = (-s * s * inv).exp();
        }
        j0 + 1
    }

    fn weights(&self, q: usize, w: &mut [f64]) -> [usize; 3] {
        let len = 2 * self.width;
        let mut start = [0; 3];
        for j in 0..self.dim() {
            start[j] = self.window(self.theta[q][j], j, &mut w[j * len..(j + 1) * len]);
        }
        start
    }

    fn uniform_offset(&self, flat: usize) -> (usize, f64) {
        let idx = self.grid.unflatten(flat);
        let mut off = 0;
        let mut dec = 1.0;
        for j in 0..self.dim() {
            let c = (idx[j] + self.mr[j] - self.m[j] / 2) % self.mr[j];
            off = off * self.mr[j] + c;
            dec *= self.deconv[j][idx[j]];
        }
        (off, dec)
    }

    /// Values at the nodes from a field on the planned grid.
    pub fn execute_type2(&self, field: &ScalarField) -> Result<Vec<Complex64>> {
        self.expect(Kind::Type2, field.grid())?;
        let d = self.dim();
        let mut over = vec![Complex64::default(); self.fft.len()];
        let input = field.to_complex();
        for (flat, v) in input.iter().enumerate() {
            let (off, dec) = self.uniform_offset(flat);
            over[off] = v * dec;
        }
        self.fft.process(&mut over, self.sign);

        // periodic extension so every window is contiguous
        let p = &self.padded;
        let total: usize = p[..d].iter().product();
        let mut ext = vec![Complex64::default(); total];
        let w = self.width;
        ext.par_iter_mut().enumerate().for_each(|(flat, v)| {
            let mut rem = flat;
            let mut src = 0;
            let mut idx = [0; 3];
            for j in (0..d).rev() {
                idx[j] = rem % p[j];
                rem /= p[j];
            }
            for j in 0..d {
                src = src * self.mr[j] + (idx[j] as isize - w as isize).rem_euclid(self.mr[j] as isize) as usize;
            }
            *v = over[src];
        });

        let len = 2 * w;
        let out: Vec<Complex64> = (0..self.num_nodes())
            .into_par_iter()
            .map_init(
                || vec![0.0; 3 * len],
                |buf, q| {
                    let s = self.weights(q, buf);
                    let acc = if d == 2 {
                        let (w0, w1) = (&buf[..len], &buf[len..2 * len]);
                        let mut acc = Complex64::default();
                        for (l0, &a) in w0.iter().enumerate() {
                            let row = &ext[(s[0] + l0) * p[1] + s[1]..][..len];
                            let mut r = Complex64::default();
                            for (v, &b) in row.iter().zip(w1) {
                                r += v * b;
                            }
                            acc += r * a;
                        }
                        acc
                    } else {
                        let (w0, w1, w2) = (&buf[..len], &buf[len..2 * len], &buf[2 * len..]);
                        let mut acc = Complex64::default();
                        for (l0, &a) in w0.iter().enumerate() {
                            let slab = (s[0] + l0) * p[1];
                            let mut r1 = Complex64::default();
                            for (l1, &b) in w1.iter().enumerate() {
                                let row = &ext[(slab + s[1] + l1) * p[2] + s[2]..][..len];
                                let mut r = Complex64::default();
                                for (v, &c) in row.iter().zip(w2) {
                                    r += v * c;
                                }
                                r1 += r * b;
                            }
                            acc += r1 * a;
                        }
                        acc
                    };
                    acc * self.scale
                },
            )
            .collect();
        Ok(out)
    }

    /// Field on the planned grid from coefficients at the nodes.
    pub fn execute_type1(&self, coeffs: &[Complex64]) -> Result<ScalarField> {
        if self.kind != Kind::Type1 {
            return Err(Error::InvalidArgument("plan was built for type 2".into()));
        }
        if coeffs.len() != self.num_nodes() {
            return Err(Error::Mismatch(format!(
                "{} coefficients for {} nodes",
                coeffs.len(),
                self.num_nodes()
            )));
        }
        let d = self.dim();
        let p = &self.padded;
        let row_len: usize = p[1..d].iter().product();
        let mut ext = vec![Complex64::default(); p[0] * row_len];
        let len = 2 * self.width;
        let mut weights = vec![0.0; BATCH * 3 * len];
        let mut starts = vec![[0usize; 3]; BATCH];
        let mut order: Vec<usize> = Vec::with_capacity(BATCH);

        for first in (0..self.num_nodes()).step_by(BATCH) {
            let count = BATCH.min(self.num_nodes() - first);
            weights[..count * 3 * len]
                .par_chunks_mut(3 * len)
                .zip(starts[..count].par_iter_mut())
                .enumerate()
                .for_each(|(i, (w, s))| *s = self.weights(first + i, w));
            order.clear();
            order.extend(0..count);
            order.sort_by_key(|&i| starts[i][0]);
            let firsts: Vec<usize> = order.iter().map(|&i| starts[i][0]).collect();

            // each row is owned by one task; within a row nodes are visited in a fixed order
            ext.par_chunks_mut(row_len).enumerate().for_each(|(r, row)| {
                let lo = firsts.partition_point(|&s| s + len <= r);
                let hi = firsts.partition_point(|&s| s <= r);
                for &i in &order[lo..hi] {
                    let s = starts[i];
                    let w = &weights[i * 3 * len..(i + 1) * 3 * len];
                    let c = coeffs[first + i] * w[r - s[0]];
                    if d == 2 {
                        let seg = &mut row[s[1]..s[1] + len];
                        for (v, &b) in seg.iter_mut().zip(&w[len..2 * len]) {
                            *v += c * b;
                        }
                    } else {
                        for (l1, &b) in w[len..2 * len].iter().enumerate() {
                            let cb = c * b;
                            let base = (s[1] + l1) * p[2] + s[2];
                            for (v, &e) in row[base..base + len].iter_mut().zip(&w[2 * len..]) {
                                *v += cb * e;
                            }
                        }
                    }
                }
            });
        }

        // fold the padding back onto the periodic grid
        let mut over = vec![Complex64::default(); self.fft.len()];
        let w = self.width;
        for (flat, v) in ext.iter().enumerate() {
            if *v == Complex64::default() {
                continue;
            }
            let mut rem = flat;
            let mut idx = [0; 3];
            for j in (0..d).rev() {
                idx[j] = rem % p[j];
                rem /= p[j];
            }
            let mut dst = 0;
            for j in 0..d {
                dst = dst * self.mr[j] + (idx[j] as isize - w as isize).rem_euclid(self.mr[j] as isize) as usize;
            }
            over[dst] += v;
        }
        self.fft.process(&mut over, self.sign);

        let values: Vec<Complex64> = (0..self.grid.len())
            .map(|flat| {
                let (off, dec) = self.uniform_offset(flat);
                over[off] * (dec * self.scale)
            })
            .collect();
        ScalarField::complex(self.grid.clone(), values)
    }

    fn expect(&self, kind: Kind, grid: &UniformGrid) -> Result<()> {
        if self.kind != kind {
            return Err(Error::InvalidArgument(format!("plan was built for {:?}", self.kind)));
        }
        if grid != &self.grid {
            return Err(Error::Mismatch("field grid differs from the planned grid".into()));
        }
        Ok(())
    }
}

/// Direct `O(N·K)` evaluation of both transform types, used by the self-test.
pub mod direct {
    use super::*;

    // e^{i σ k_j x_j} for every coordinate of every axis.
    fn phases(grid: &UniformGrid, k: &[f64; 3], sign: f64) -> Vec<Vec<Complex64>> {
        (0..grid.dim())
            .map(|j| {
                (0..grid.counts()[j])
                    .map(|n| Complex64::from_polar(1.0, sign * k[j] * grid.coordinate(j, n)))
                    .collect()
            })
            .collect()
    }

    fn phase_at(t: &[Vec<Complex64>], idx: &[usize; 3]) -> Complex64 {
        t.iter().enumerate().fold(Complex64::new(1.0, 0.0), |acc, (j, row)| acc * row[idx[j]])
    }

    /// `F(k) = (∏ h_j) Σ_x f(x) e^{i σ k·x}`.
    pub fn type2(grid: &UniformGrid, field: &[Complex64], nodes: &[[f64; 3]], sign: f64) -> Vec<Complex64> {
        let vol = grid.cell_volume();
        let idx: Vec<[usize; 3]> = (0..grid.len()).map(|i| grid.unflatten(i)).collect();
        nodes
            .par_iter()
            .map(|k| {
                let t = phases(grid, k, sign);
                let s: Complex64 = idx.iter().zip(field).map(|(i, &f)| f * phase_at(&t, i)).sum();
                s * vol
            })
            .collect()
    }

    /// `f(x) = Σ_k c_k e^{i σ k·x}`.
    pub fn type1(grid: &UniformGrid, coeffs: &[Complex64], nodes: &[[f64; 3]], sign: f64) -> Vec<Complex64> {
        let tables: Vec<Vec<Vec<Complex64>>> = nodes.par_iter().map(|k| phases(grid, k, sign)).collect();
        (0..grid.len())
            .into_par_iter()
            .map(|i| {
                let idx = grid.unflatten(i);
                tables.iter().zip(coeffs).map(|(t, &c)| c * phase_at(t, &idx)).sum()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Domain;

    fn grid(dim: usize, n: usize) -> UniformGrid {
        UniformGrid::new(Domain::cube(dim, 4.0).unwrap(), &vec![n; dim]).unwrap()
    }

    #[test]
    fn delta_at_origin() {
        let g = grid(2, 16);
        let mut v = vec![0.0; g.len()];
        v[8 * 16 + 8] = 1.0;
        let f = ScalarField::real(g.clone(), v).unwrap();
        let nodes = [[0.3, -2.0, 0.0], [7.0, 7.5, 0.0], [0.0, 0.0, 0.0]];
        let plan = plan_type2(&g, &nodes, Preset::Digits12, Sign::Minus).unwrap();
        for z in plan.execute_type2(&f).unwrap() {
            assert!((z - Complex64::new(g.cell_volume(), 0.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn zero_input() {
        let g = grid(3, 16);
        let nodes = [[1.0, 2.0, 3.0]];
        let t2 = plan_type2(&g, &nodes, Preset::Digits6, Sign::Plus).unwrap();
        assert!(t2.execute_type2(&ScalarField::zeros(g.clone())).unwrap()[0] == Complex64::default());
        let t1 = plan_type1(&nodes, &g, Preset::Digits6, Sign::Plus).unwrap();
        let out = t1.execute_type1(&[Complex64::default()]).unwrap();
        assert!(out.as_complex().unwrap().iter().all(|z| *z == Complex64::default()));
    }

    #[test]
    fn single_zero_frequency() {
        let g = grid(3, 16);
        let t1 = plan_type1(&[[0.0; 3]], &g, Preset::Digits12, Sign::Plus).unwrap();
        let out = t1.execute_type1(&[Complex64::new(1.0, 0.0)]).unwrap();
        for z in out.as_complex().unwrap() {
            assert!((z - 1.0).norm() < 1e-12, "{z}");
        }
    }

    #[test]
    fn rejects_out_of_band_nodes() {
        let g = grid(2, 16);
        let nyq = PI / g.spacing(0);
        assert!(plan_type2(&g, &[[nyq, -nyq, 0.0]], Preset::Digits12, Sign::Minus).is_ok());
        assert!(matches!(
            plan_type2(&g, &[[0.0, 1.01 * nyq, 0.0]], Preset::Digits12, Sign::Minus),
            Err(Error::Nyquist { index: 0, axis: 1 })
        ));
    }

    #[test]
    fn kind_and_grid_checks() {
        let g = grid(2, 16);
        let t1 = plan_type1(&[[0.0; 3]], &g, Preset::Digits6, Sign::Plus).unwrap();
        assert!(t1.execute_type2(&ScalarField::zeros(g.clone())).is_err());
        let t2 = plan_type2(&g, &[[0.0; 3]], Preset::Digits6, Sign::Plus).unwrap();
        assert!(t2.execute_type1(&[Complex64::default()]).is_err());
        assert!(t2.execute_type2(&ScalarField::zeros(grid(2, 18))).is_err());
    }
}
