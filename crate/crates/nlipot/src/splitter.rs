//! Partition of unity separating the smooth far field (I₁) from the
//! singular neighborhood of the origin (I₂), and its parameter presets.
//!
//! All scales are tied to the coarsest Fourier spacing `Δk = 2π / max_j R_j`.

use std::f64::consts::PI;

use crate::grid::UniformGrid;
use crate::specfun::erfc;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct SplitParams {
    pub dim: usize,
    /// Inner and outer radii of the 2D transition band.
    pub r0: f64,
    pub r1: f64,
    /// Width of the 3D Gaussian `e^{-|k|²/a}`.
    pub a: f64,
    /// Zero-padding factor of the I₁ FFT.
    pub oversampling: usize,
    /// `(N_r, N_φ)` in 2D, `(N_r, N_θ, N_φ)` in 3D.
    pub sizes: Vec<usize>,
    /// Radial extent of the I₂ grid.
    pub cutoff: f64,
}

pub fn select_params(grid: &UniformGrid, prec: u8) -> Result<SplitParams> {
    if prec > 1 {
        return Err(Error::InvalidArgument(format!("prec must be 0 or 1, got {prec}")));
    }
    let rmax = grid.extents().iter().cloned().fold(0.0, f64::max);
    let dk = 2.0 * PI / rmax;
    match grid.dim() {
        2 => {
            let (s, n) = if prec == 1 { (3, 60) } else { (2, 40) };
            let (r0, r1) = (0.8 * dk, 10.0 * dk);
            Ok(SplitParams { dim: 2, r0, r1, a: 0.0, oversampling: s, sizes: vec![n, n], cutoff: r1 })
        }
        3 => {
            let n = if prec == 1 { 40 } else { 24 };
            let a = 2.0 * dk * dk;
            Ok(SplitParams {
                dim: 3,
                r0: 0.0,
                r1: 0.0,
                a,
                oversampling: 2,
                sizes: vec![n, n, n],
                cutoff: 6.0 * a.sqrt(),
            })
        }
        d => Err(Error::InvalidArgument(format!("unsupported dimension {d}"))),
    }
}

impl SplitParams {
    /// Same split with a different I₂ grid.
    pub fn with_sizes(mut self, sizes: &[usize]) -> Result<Self> {
        if sizes.len() != self.dim {
            return Err(Error::InvalidArgument(format!(
                "{} I2 grid sizes given for dimension {}",
                sizes.len(),
                self.dim
            )));
        }
        self.sizes = sizes.to_vec();
        Ok(self)
    }

    /// `p_d(k)` for a `k` of the split's dimension.
    pub fn p(&self, k: &[f64]) -> f64 {
        let k2: f64 = k.iter().map(|x| x * x).sum();
        if self.dim == 2 {
            p2_radial(self.r0, self.r1, k2.sqrt())
        } else {
            (-k2 / self.a).exp()
        }
    }

    pub fn p2(&self, k: &[f64; 2]) -> f64 {
        p2_radial(self.r0, self.r1, k[0].hypot(k[1]))
    }

    pub fn p3(&self, k: &[f64; 3]) -> f64 {
        (-(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) / self.a).exp()
    }
}

fn p2_radial(r0: f64, r1: f64, r: f64) -> f64 {
    0.5 * erfc(12.0 * (r - 0.5 * (r0 + r1)) / (r1 - r0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Domain;

    fn grid(dim: usize, r: f64, n: usize) -> UniformGrid {
        UniformGrid::new(Domain::cube(dim, r).unwrap(), &vec![n; dim]).unwrap()
    }

    #[test]
    fn presets() {
        let dk = 2.0 * PI / 32.0;
        let p = select_params(&grid(2, 32.0, 64), 1).unwrap();
        assert!((p.r0 - 0.8 * dk).abs() < 1e-15 && (p.r1 - 10.0 * dk).abs() < 1e-14);
        assert_eq!((p.oversampling, p.sizes.clone()), (3, vec![60, 60]));
        assert_eq!(p.cutoff, p.r1);
        let p = select_params(&grid(2, 32.0, 64), 0).unwrap();
        assert_eq!((p.oversampling, p.sizes.clone()), (2, vec![40, 40]));

        let p = select_params(&grid(3, 16.0, 32), 0).unwrap();
        let dk = 2.0 * PI / 16.0;
        assert!((p.a - 2.0 * dk * dk).abs() < 1e-15);
        assert_eq!((p.oversampling, p.sizes.clone()), (2, vec![24, 24, 24]));
        assert!((p.p3(&[p.cutoff, 0.0, 0.0]) - (-36f64).exp()).abs() < 1e-30);
        assert!(p.p3(&[0.0, 0.0, p.cutoff]) <= 2.4e-16);
        assert_eq!(select_params(&grid(3, 16.0, 32), 1).unwrap().sizes, vec![40, 40, 40]);
        assert!(select_params(&grid(3, 16.0, 32), 2).is_err());
    }

    #[test]
    fn p2_values() {
        let p = select_params(&grid(2, 16.0, 64), 1).unwrap();
        let mid = 0.5 * (p.r0 + p.r1);
        assert!((p.p2(&[mid, 0.0]) - 0.5).abs() < 1e-16);
        assert!((1.0 - p.p2(&[0.0, 0.0])) <= 1e-15);
        assert!(p.p2(&[0.0, 2.0 * p.r1]) < 1e-15);
        assert!(p.p2(&[p.r1, 0.0]) < 1e-16);
    }

    #[test]
    fn p3_values() {
        let p = select_params(&grid(3, 16.0, 32), 1).unwrap();
        assert_eq!(p.p3(&[0.0; 3]), 1.0);
        let s = p.a.sqrt();
        assert!((p.p3(&[0.0, s, 0.0]) - (-1f64).exp()).abs() < 1e-16);
        assert!((p.p3(&[6.0 * s, 0.0, 0.0]) - (-36f64).exp()).abs() < 1e-30);
    }

    #[test]
    fn removable_singularity() {
        let p = select_params(&grid(3, 16.0, 32), 1).unwrap();
        let r = 1e-4 * p.a.sqrt();
        let v = (1.0 - p.p3(&[r, 0.0, 0.0])) / (r * r);
        assert!((v - 1.0 / p.a).abs() <= 1e-6 / p.a);

        let p = select_params(&grid(2, 16.0, 64), 1).unwrap();
        let r = 0.5 * p.r0;
        let v = (1.0 - p.p2(&[r, 0.0])) / r;
        assert!(v <= 1e-15 * 2.0 / p.r0);
    }

    #[test]
    fn monotone_and_complementary() {
        for (dim, n) in [(2, 64), (3, 32)] {
            let p = select_params(&grid(dim, 16.0, n), 1).unwrap();
            let dir = [0.6, -0.48, 0.64];
            let mut prev = 1.0;
            for i in 0..1000 {
                let r = 3.0 * p.cutoff * i as f64 / 999.0;
                let k: Vec<f64> = dir[..dim].iter().map(|d| d * r / dir[..dim].iter().map(|x| x * x).sum::<f64>().sqrt()).collect();
                let v = p.p(&k);
                assert!(v <= prev && (0.0..=1.0).contains(&v));
                assert_eq!((1.0 - v) + v, 1.0);
                prev = v;
            }
        }
    }
}
