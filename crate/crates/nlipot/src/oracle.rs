//! Test problems with closed-form potentials and energies.
//!
//! Signs follow the kernel symbols in [`crate::kernels`]: every potential here
//! is the true convolution `U * ρ` for the kernel returned by
//! [`Example::kernel`].

use std::f64::consts::PI;

use crate::grid::{ScalarField, UniformGrid};
use crate::kernels::KernelSpec;
use crate::specfun::{bessel_i0_scaled, bessel_i1_over_r_scaled, bessel_i1_scaled};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Example {
    /// 2.5D Coulomb, `ρ = e^{-|x|²/a}`.
    Ex1 { a: f64 },
    /// 2.5D dipoles with a common in-plane orientation.
    Ex2 { a: f64, n: [f64; 2] },
    /// 2.5D dipoles with two in-plane orientations.
    Ex3 { a: f64, n: [f64; 2], m: [f64; 2] },
    /// 3D Coulomb with an anisotropic Gaussian potential.
    Ex4 { a: [f64; 3] },
    /// 3D dipoles, one orientation.
    Ex5 { a: [f64; 3], n: [f64; 3] },
    /// 3D dipoles, two orientations.
    Ex6 { a: [f64; 3], n: [f64; 3], m: [f64; 3] },
    /// 3D dipolar energy of an axially symmetric Gaussian.
    Ex7 { gx: f64, gz: f64, lambda: f64 },
}

fn unit<const N: usize>(v: [f64; N]) -> [f64; N] {
    let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.map(|x| x / len)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl Example {
    pub fn ex1(a: f64) -> Self {
        Self::Ex1 { a }
    }

    pub fn ex2(a: f64, n: [f64; 2]) -> Self {
        Self::Ex2 { a, n: unit(n) }
    }

    pub fn ex3(a: f64, n: [f64; 2], m: [f64; 2]) -> Self {
        Self::Ex3 { a, n: unit(n), m: unit(m) }
    }

    pub fn ex4(a: [f64; 3]) -> Self {
        Self::Ex4 { a }
    }

    pub fn ex5(a: [f64; 3], n: [f64; 3]) -> Self {
        Self::Ex5 { a, n: unit(n) }
    }

    pub fn ex6(a: [f64; 3], n: [f64; 3], m: [f64; 3]) -> Self {
        Self::Ex6 { a, n: unit(n), m: unit(m) }
    }

    pub fn ex7(gx: f64, gz: f64, lambda: f64) -> Self {
        Self::Ex7 { gx, gz, lambda }
    }

    /// Parameters of the published benchmark tables; Example 7 is Case II.
    pub fn standard(id: u8) -> Result<Self> {
        Ok(match id {
            1 => Self::ex1(1.3),
            2 => Self::ex2(1.3, [0.52460, -0.85135]),
            3 => Self::ex3(1.8, [-0.44404, -0.89600], [0.85125, -0.52476]),
            4 => Self::ex4([1.0, 1.3, 1.5]),
            5 => Self::ex5([1.3, 1.5, 1.8], [-0.36589, -0.69481, 0.61916]),
            6 => Self::ex6([1.2, 1.45, 1.73], [0.82778, 0.41505, -0.37751], [0.31180, 0.93780, -0.15214]),
            7 => Self::ex7(1.0, 1.0, 8.0 * PI / 3.0),
            _ => return Err(Error::InvalidArgument(format!("no example {id}"))),
        })
    }

    /// Example 7 cases I, II, III.
    pub fn energy_case(case: u8) -> Result<Self> {
        let lambda = 8.0 * PI / 3.0;
        Ok(match case {
            1 => Self::ex7(0.25, 1.0, lambda),
            2 => Self::ex7(1.0, 1.0, lambda),
            3 => Self::ex7(2.0, 1.0, lambda),
            _ => return Err(Error::InvalidArgument(format!("no energy case {case}"))),
        })
    }

    pub fn id(&self) -> u8 {
        match self {
            Self::Ex1 { .. } => 1,
            Self::Ex2 { .. } => 2,
            Self::Ex3 { .. } => 3,
            Self::Ex4 { .. } => 4,
            Self::Ex5 { .. } => 5,
            Self::Ex6 { .. } => 6,
            Self::Ex7 { .. } => 7,
        }
    }

    pub fn dim(&self) -> usize {
        if self.id() <= 3 {
            2
        } else {
            3
        }
    }

    pub fn kernel(&self) -> KernelSpec {
        match *self {
            Self::Ex1 { .. } => KernelSpec::Coulomb25D,
            Self::Ex2 { n, .. } => KernelSpec::Dipole25D { n: [n[0], n[1], 0.0], m: [n[0], n[1], 0.0], alpha: 0.0 },
            Self::Ex3 { n, m, .. } => KernelSpec::Dipole25D { n: [n[0], n[1], 0.0], m: [m[0], m[1], 0.0], alpha: 0.0 },
            Self::Ex4 { .. } => KernelSpec::Coulomb3D,
            Self::Ex5 { n, .. } => KernelSpec::Dipole3D { n, m: n },
            Self::Ex6 { n, m, .. } => KernelSpec::Dipole3D { n, m },
            Self::Ex7 { .. } => KernelSpec::Dipole3D { n: [0.0, 0.0, 1.0], m: [0.0, 0.0, 1.0] },
        }
    }

    /// Coupling constant of the energy; 1 for potential-only examples.
    pub fn lambda(&self) -> f64 {
        match self {
            Self::Ex7 { lambda, .. } => *lambda,
            _ => 1.0,
        }
    }

    pub fn density(&self, x: &[f64]) -> f64 {
        match *self {
            Self::Ex1 { a } | Self::Ex2 { a, .. } | Self::Ex3 { a, .. } => (-dot(x, x) / a).exp(),
            Self::Ex4 { a } | Self::Ex5 { a, .. } | Self::Ex6 { a, .. } => aniso_density(&a, x),
            Self::Ex7 { gx, gz, .. } => {
                PI.powf(-1.5) * gx * gz.sqrt() * (-(gx * (x[0] * x[0] + x[1] * x[1]) + gz * x[2] * x[2])).exp()
            }
        }
    }

    pub fn exact_potential(&self, x: &[f64]) -> Result<f64> {
        Ok(match *self {
            Self::Ex1 { a } => {
                let r = dot(x, x) / (2.0 * a);
                0.5 * (PI * a).sqrt() * bessel_i0_scaled(r)?
            }
            Self::Ex2 { a, n } => planar_dipole(a, 1.0, dot(x, &n).powi(2), x)?,
            Self::Ex3 { a, n, m } => planar_dipole(a, dot(&n, &m), dot(x, &n) * dot(x, &m), x)?,
            Self::Ex4 { a } => -(-g(&a, x)).exp(),
            Self::Ex5 { a, n } => spatial_dipole(&a, &n, &n, x),
            Self::Ex6 { a, n, m } => spatial_dipole(&a, &n, &m, x),
            Self::Ex7 { .. } => {
                return Err(Error::InvalidArgument("example 7 only has a closed-form energy".into()))
            }
        })
    }

    pub fn exact_energy(&self) -> Result<f64> {
        let Self::Ex7 { gx, gz, lambda } = *self else {
            return Err(Error::InvalidArgument(format!("example {} has no closed-form energy", self.id())));
        };
        let kappa = (gz / gx).sqrt();
        let pre = -lambda * gx * gz.sqrt() / (4.0 * PI * (2.0 * PI).sqrt());
        let k2 = kappa * kappa;
        let branch = if (kappa - 1.0).abs() < 1e-8 {
            0.0
        } else if kappa > 1.0 {
            let s = (k2 - 1.0).sqrt();
            (1.0 + 2.0 * k2) / (1.0 - k2) - 3.0 * k2 * s.atan() / ((1.0 - k2) * s)
        } else {
            let s = (1.0 - k2).sqrt();
            (1.0 + 2.0 * k2) / (1.0 - k2) - 3.0 * k2 / (2.0 * (1.0 - k2) * s) * ((1.0 + s) / (1.0 - s)).ln()
        };
        Ok(pre * branch)
    }

    fn check_grid(&self, grid: &UniformGrid) -> Result<()> {
        if grid.dim() != self.dim() {
            return Err(Error::Mismatch(format!(
                "example {} is {}D, grid is {}D",
                self.id(),
                self.dim(),
                grid.dim()
            )));
        }
        Ok(())
    }

    pub fn density_field(&self, grid: &UniformGrid) -> Result<ScalarField> {
        self.check_grid(grid)?;
        grid.sample(|x| self.density(x))
    }

    pub fn exact_field(&self, grid: &UniformGrid) -> Result<ScalarField> {
        self.check_grid(grid)?;
        let mut err = None;
        let f = grid.sample(|x| match self.exact_potential(x) {
            Ok(v) => v,
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        })?;
        match err {
            Some(e) => Err(e),
            None => Ok(f),
        }
    }

    /// `‖u - u_exact‖₂ / ‖u_exact‖₂` over the grid nodes.
    pub fn rel_l2_error(&self, computed: &ScalarField) -> Result<f64> {
        rel_l2(&computed.re(), &self.exact_field(computed.grid())?.re())
    }
}

pub fn rel_l2(computed: &[f64], exact: &[f64]) -> Result<f64> {
    if computed.len() != exact.len() {
        return Err(Error::Mismatch("fields differ in length".into()));
    }
    let num: f64 = computed.iter().zip(exact).map(|(a, b)| (a - b) * (a - b)).sum();
    let den: f64 = exact.iter().map(|b| b * b).sum();
    if den == 0.0 {
        return Err(Error::InvalidArgument("exact solution has zero norm".into()));
    }
    Ok((num / den).sqrt())
}

fn g(a: &[f64; 3], x: &[f64]) -> f64 {
    (0..3).map(|j| x[j] * x[j] / a[j]).sum()
}

fn aniso_density(a: &[f64; 3], x: &[f64]) -> f64 {
    let beta: f64 = a.iter().map(|v| 1.0 / v).sum();
    let q: f64 = (0..3).map(|j| x[j] * x[j] / (a[j] * a[j])).sum();
    (-2.0 * beta + 4.0 * q) * (-g(a, x)).exp()
}

// u = -(m·n) ρ + 6[2 g_n g_m - Σ n_j m_j / a_j] e^{-g}
fn spatial_dipole(a: &[f64; 3], n: &[f64; 3], m: &[f64; 3], x: &[f64]) -> f64 {
    let gn: f64 = (0..3).map(|j| x[j] * n[j] / a[j]).sum();
    let gm: f64 = (0..3).map(|j| x[j] * m[j] / a[j]).sum();
    let s: f64 = (0..3).map(|j| n[j] * m[j] / a[j]).sum();
    -dot(n, m) * aniso_density(a, x) + 6.0 * (2.0 * gn * gm - s) * (-g(a, x)).exp()
}

// u = -(3√π / 4√a) e^{-r} [c (I₁ - I₀) + (q/a)(2 I₀ - (1 + 2r) I₁ / r)], r = |x|²/2a
fn planar_dipole(a: f64, c: f64, q: f64, x: &[f64]) -> Result<f64> {
    let r = dot(x, x) / (2.0 * a);
    let i0 = bessel_i0_scaled(r)?;
    let i1 = bessel_i1_scaled(r)?;
    let i1r = bessel_i1_over_r_scaled(r)?;
    let bracket = c * (i1 - i0) + q / a * (2.0 * i0 - i1r - 2.0 * i1);
    Ok(-3.0 * PI.sqrt() / (4.0 * a.sqrt()) * bracket)
}
