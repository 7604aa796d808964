//! Potential evaluation and interaction energy.
//!
//! The split algorithm writes `u = I₁ + I₂` with
//! `I₁ = (2π)^{-d} ∫ Û(1 - p_d) ρ̂ e^{ik·x} dk` evaluated by a zero-padded FFT
//! and `I₂ = (2π)^{-d} ∫ Û p_d ρ̂ e^{ik·x} dk` evaluated by polar or spherical
//! quadrature with a type-2 / type-1 NUFFT pair. The simple algorithm applies
//! the quadrature to the whole ball `|k| ≤ P`.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::fft::{FftNd, Sign};
use crate::grid::{ScalarField, UniformGrid};
use crate::kernels::KernelSpec;
use crate::nufft::{plan_type1, plan_type2, NufftPlan, Preset};
use crate::quadrature::{build_polar_grid, build_spherical_grid, NonuniformFourierGrid};
use crate::splitter::{select_params, SplitParams};
use crate::{Error, Result};

pub use crate::init_threads;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algorithm {
    /// Whole-ball NUFFT quadrature.
    Simple,
    /// FFT far field plus NUFFT near field.
    Split,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Timings {
    pub fft: f64,
    pub nufft: f64,
    pub total: f64,
}

#[derive(Clone, Debug)]
pub struct PotentialResult {
    pub u: ScalarField,
    /// Largest imaginary part discarded when taking the real potential.
    pub imag_residual: f64,
    pub timings: Timings,
}

#[derive(Debug)]
struct FarField {
    fft: FftNd,
    symbol: Vec<f64>,
}

#[derive(Debug)]
pub struct SolverPlan {
    grid: UniformGrid,
    kernel: KernelSpec,
    algorithm: Algorithm,
    prec: u8,
    split: Option<SplitParams>,
    cutoff: f64,
    phase: NonuniformFourierGrid,
    coef: Vec<f64>,
    forward: NufftPlan,
    backward: NufftPlan,
    far: Option<FarField>,
}

/// Nyquist cutoff `P = π min_j(N_j / R_j)`.
pub fn nyquist_cutoff(grid: &UniformGrid) -> f64 {
    let inv_h = (0..grid.dim()).map(|j| 1.0 / grid.spacing(j)).fold(f64::INFINITY, f64::min);
    PI * inv_h
}

impl SolverPlan {
    /// Split-algorithm plan with the preset parameters for `prec`.
    pub fn new(grid: &UniformGrid, kernel: KernelSpec, prec: u8) -> Result<Self> {
        let split = select_params(grid, prec)?;
        Self::with_split(grid, kernel, prec, split)
    }

    /// Split-algorithm plan with explicit split parameters.
    pub fn with_split(grid: &UniformGrid, kernel: KernelSpec, prec: u8, split: SplitParams) -> Result<Self> {
        check_dims(grid, &kernel)?;
        if split.dim != grid.dim() {
            return Err(Error::Mismatch("split parameters have the wrong dimension".into()));
        }
        let phase = match grid.dim() {
            2 => build_polar_grid(split.cutoff, split.sizes[0], split.sizes[1])?,
            _ => build_spherical_grid(split.cutoff, split.sizes[0], split.sizes[1], split.sizes[2])?,
        };
        let coef = near_coefficients(&phase, &kernel, |k| split.p(k));
        let (forward, backward) = nufft_pair(grid, &phase)?;
        let far = Some(far_field(grid, &kernel, &split));
        Ok(Self {
            grid: grid.clone(),
            kernel,
            algorithm: Algorithm::Split,
            prec,
            cutoff: nyquist_cutoff(grid),
            split: Some(split),
            phase,
            coef,
            forward,
            backward,
            far,
        })
    }

    /// Whole-ball plan: `N_r = ⌈P max_j R_j / 4⌉ + 20`, `N_φ = 2 N_r` and
    /// `N_θ = ⌈P D / 4⌉ + 20` with `D` the box diagonal.
    pub fn simple(grid: &UniformGrid, kernel: KernelSpec) -> Result<Self> {
        check_dims(grid, &kernel)?;
        let p = nyquist_cutoff(grid);
        let rmax = grid.extents().iter().cloned().fold(0.0, f64::max);
        let diag = grid.extents().iter().map(|r| r * r).sum::<f64>().sqrt();
        let n_r = (p * rmax / 4.0).ceil() as usize + 20;
        let phase = match grid.dim() {
            2 => build_polar_grid(p, n_r, 2 * n_r)?,
            _ => {
                let n_theta = (p * diag / 4.0).ceil() as usize + 20;
                build_spherical_grid(p, n_r, n_theta, 2 * n_r)?
            }
        };
        Self::simple_with_grid(grid, kernel, phase)
    }

    /// Whole-ball plan on a caller-supplied phase-space grid.
    pub fn simple_with_grid(grid: &UniformGrid, kernel: KernelSpec, phase: NonuniformFourierGrid) -> Result<Self> {
        check_dims(grid, &kernel)?;
        if phase.dim != grid.dim() {
            return Err(Error::Mismatch("phase-space grid has the wrong dimension".into()));
        }
        let coef = near_coefficients(&phase, &kernel, |_| 1.0);
        let (forward, backward) = nufft_pair(grid, &phase)?;
        Ok(Self {
            grid: grid.clone(),
            kernel,
            algorithm: Algorithm::Simple,
            prec: 1,
            split: None,
            cutoff: phase.radius,
            phase,
            coef,
            forward,
            backward,
            far: None,
        })
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn algorithm(&self) -> Algorithm {
        self.algorithm
    }

    pub fn prec(&self) -> u8 {
        self.prec
    }

    pub fn split(&self) -> Option<&SplitParams> {
        self.split.as_ref()
    }

    /// High-frequency cutoff `P`.
    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn phase_grid(&self) -> &NonuniformFourierGrid {
        &self.phase
    }

    /// Zero-padded FFT sizes of the far-field part, if any.
    pub fn far_field_shape(&self) -> Option<&[usize]> {
        self.far.as_ref().map(|f| f.fft.shape())
    }

    /// Evaluates `u = U * ρ` with the plan's algorithm.
    pub fn solve(&self, rho: &ScalarField) -> Result<PotentialResult> {
        let start = Instant::now();
        if rho.grid() != &self.grid {
            return Err(Error::Mismatch("density grid differs from the planned grid".into()));
        }
        let values = rho
            .as_real()
            .ok_or_else(|| Error::InvalidArgument("density must be real".into()))?;
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }

        let t_fft = Instant::now();
        let mut u = match &self.far {
            Some(far) => self.far_part(far, values),
            None => vec![Complex64::default(); values.len()],
        };
        let t_fft = t_fft.elapsed().as_secs_f64();

        let t_nufft = Instant::now();
        let rhohat = self.forward.execute_type2(rho)?;
        let c: Vec<Complex64> = rhohat.iter().zip(&self.coef).map(|(r, &w)| r * w).collect();
        let near = self.backward.execute_type1(&c)?;
        let t_nufft = t_nufft.elapsed().as_secs_f64();

        for (a, b) in u.iter_mut().zip(near.as_complex().expect("type-1 output is complex")) {
            *a += b;
        }
        let imag_residual = u.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        let u = ScalarField::real(self.grid.clone(), u.iter().map(|z| z.re).collect())?;
        Ok(PotentialResult {
            u,
            imag_residual,
            timings: Timings { fft: t_fft, nufft: t_nufft, total: start.elapsed().as_secs_f64() },
        })
    }

    /// Replaces the `k = 0` value of the far-field symbol.
    #[doc(hidden)]
    pub fn set_zero_mode(&mut self, value: f64) {
        if let Some(far) = self.far.as_mut() {
            far.symbol[0] = value / far.symbol.len() as f64;
        }
    }

    /// Whole-ball evaluation; the plan must come from [`SolverPlan::simple`].
    pub fn solve_simple(&self, rho: &ScalarField) -> Result<PotentialResult> {
        if self.algorithm != Algorithm::Simple {
            return Err(Error::InvalidArgument("plan was built for the split algorithm".into()));
        }
        self.solve(rho)
    }

    fn far_part(&self, far: &FarField, rho: &[f64]) -> Vec<Complex64> {
        let n = self.grid.counts();
        let shape = far.fft.shape();
        let d = n.len();
        let mut buf = vec![Complex64::default(); far.fft.len()];
        for (flat, &v) in rho.iter().enumerate() {
            buf[padded_offset(&self.grid.unflatten(flat), shape, d)] = Complex64::new(v, 0.0);
        }
        far.fft.process(&mut buf, Sign::Minus);
        buf.par_iter_mut().zip(&far.symbol).for_each(|(z, &s)| *z *= s);
        far.fft.process(&mut buf, Sign::Plus);
        (0..rho.len()).map(|flat| buf[padded_offset(&self.grid.unflatten(flat), shape, d)]).collect()
    }
}

fn padded_offset(idx: &[usize; 3], shape: &[usize], d: usize) -> usize {
    (0..d).fold(0, |off, j| off * shape[j] + idx[j])
}

fn check_dims(grid: &UniformGrid, kernel: &KernelSpec) -> Result<()> {
    if kernel.dim() != grid.dim() {
        return Err(Error::Mismatch(format!(
            "{} kernel needs a {}D grid, got {}D",
            kernel.name(),
            kernel.dim(),
            grid.dim()
        )));
    }
    Ok(())
}

fn nufft_pair(grid: &UniformGrid, phase: &NonuniformFourierGrid) -> Result<(NufftPlan, NufftPlan)> {
    Ok((
        plan_type2(grid, &phase.nodes, Preset::Digits12, Sign::Minus)?,
        plan_type1(&phase.nodes, grid, Preset::Digits12, Sign::Plus)?,
    ))
}

// w_j Û(k_j) p(k_j) / (2π)^d, with the Jacobian already inside w_j.
fn near_coefficients<F: Fn(&[f64]) -> f64>(
    phase: &NonuniformFourierGrid,
    kernel: &KernelSpec,
    p: F,
) -> Vec<f64> {
    let d = phase.dim;
    let norm = (2.0 * PI).powi(d as i32);
    phase
        .nodes
        .iter()
        .zip(&phase.weights)
        .map(|(k, &w)| {
            let k = &k[..d];
            let r2: f64 = k.iter().map(|x| x * x).sum();
            let jac = r2.powf(0.5 * (d - 1) as f64);
            let reg = kernel.regularized_symbol(k).expect("dimension checked");
            w / jac * reg * p(k) / norm
        })
        .collect()
}

fn far_field(grid: &UniformGrid, kernel: &KernelSpec, split: &SplitParams) -> FarField {
    let d = grid.dim();
    let s = split.oversampling;
    let shape: Vec<usize> = grid.counts().iter().map(|&n| s * n).collect();
    let total: usize = shape.iter().product();
    let dk: Vec<f64> = (0..d).map(|j| 2.0 * PI / (s as f64 * grid.extents()[j])).collect();
    let c = 1.0 / total as f64;
    let zero = match kernel {
        KernelSpec::Coulomb3D => 1.0 / split.a,
        _ => 0.0,
    };
    let symbol = (0..total)
        .into_par_iter()
        .map(|flat| {
            let mut rem = flat;
            let mut k = [0.0; 3];
            let mut nyquist = Vec::new();
            for j in (0..d).rev() {
                let i = rem % shape[j];
                rem /= shape[j];
                let f = if i < shape[j] / 2 { i as f64 } else { i as f64 - shape[j] as f64 };
                k[j] = f * dk[j];
                if i == shape[j] / 2 {
                    nyquist.push(j);
                }
            }
            if k[..d].iter().all(|&x| x == 0.0) {
                return zero * c;
            }
            // unpaired Nyquist components: average over their signs to keep the operator real
            let mut v = 0.0;
            for flips in 0..1usize << nyquist.len() {
                let mut q = k;
                for (b, &j) in nyquist.iter().enumerate() {
                    if flips >> b & 1 == 1 {
                        q[j] = -q[j];
                    }
                }
                let q = &q[..d];
                v += kernel.uhat(q).expect("nonzero k") * (1.0 - split.p(q));
            }
            v / (1usize << nyquist.len()) as f64 * c
        })
        .collect();
    FarField { fft: FftNd::new(&shape), symbol }
}

/// `E = (λ/2) (∏ h_j) Σ_n u(x_n) ρ(x_n)`.
pub fn energy(u: &ScalarField, rho: &ScalarField, lambda: f64) -> Result<f64> {
    if u.grid() != rho.grid() {
        return Err(Error::Mismatch("potential and density live on different grids".into()));
    }
    let (a, b) = (u.re(), rho.re());
    let s: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
    Ok(0.5 * lambda * u.grid().cell_volume() * s)
}
