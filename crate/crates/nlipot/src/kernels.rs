//! Fourier symbols of the Coulomb and dipole-dipole kernels.

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum KernelSpec {
    /// `Û = 1/|k|²`
    Coulomb3D,
    /// `Û = -(m·n) + 3(n·k)(m·k)/|k|²`
    Dipole3D { n: [f64; 3], m: [f64; 3] },
    /// `Û = 1/|k|`
    Coulomb25D,
    /// `Û = -α + 3[(n⊥·k)(m⊥·k) - n₃m₃|k|²] / (2|k|)`
    Dipole25D { n: [f64; 3], m: [f64; 3], alpha: f64 },
}

fn normalize(v: [f64; 3]) -> Result<[f64; 3]> {
    let len = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if !(len > 0.0 && len.is_finite()) {
        return Err(Error::InvalidArgument(format!("orientation {v:?} cannot be normalized")));
    }
    Ok([v[0] / len, v[1] / len, v[2] / len])
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl KernelSpec {
    /// 3D dipolar kernel; orientations are normalized.
    pub fn dipole3d(n: [f64; 3], m: [f64; 3]) -> Result<Self> {
        Ok(Self::Dipole3D { n: normalize(n)?, m: normalize(m)? })
    }

    /// 2.5D dipolar kernel; orientations are normalized.
    pub fn dipole25d(n: [f64; 3], m: [f64; 3], alpha: f64) -> Result<Self> {
        Ok(Self::Dipole25D { n: normalize(n)?, m: normalize(m)?, alpha })
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Coulomb3D | Self::Dipole3D { .. } => 3,
            Self::Coulomb25D | Self::Dipole25D { .. } => 2,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Coulomb3D => "coulomb3d",
            Self::Dipole3D { .. } => "dipole3d",
            Self::Coulomb25D => "coulomb25d",
            Self::Dipole25D { .. } => "dipole25d",
        }
    }

    /// `Û(k)` for `k ≠ 0`.
    pub fn uhat(&self, k: &[f64]) -> Result<f64> {
        self.check_dim(k)?;
        let k2 = dot(k, k);
        if k2 == 0.0 {
            return Err(Error::InvalidArgument("symbol is singular at k = 0".into()));
        }
        Ok(match self {
            Self::Coulomb3D => 1.0 / k2,
            Self::Coulomb25D => 1.0 / k2.sqrt(),
            _ => self.regularized(k, k2) / k2.powf(0.5 * (self.dim() - 1) as f64),
        })
    }

    /// `|k|^{d-1} Û(k)`, extended continuously to `k = 0`.
    pub fn regularized_symbol(&self, k: &[f64]) -> Result<f64> {
        self.check_dim(k)?;
        Ok(self.regularized(k, dot(k, k)))
    }

    fn regularized(&self, k: &[f64], k2: f64) -> f64 {
        match self {
            Self::Coulomb3D | Self::Coulomb25D => 1.0,
            Self::Dipole3D { n, m } => -dot(n, m) * k2 + 3.0 * dot(n, k) * dot(m, k),
            Self::Dipole25D { n, m, alpha } => {
                let kn = k2.sqrt();
                -alpha * kn + 1.5 * (dot(&n[..2], k) * dot(&m[..2], k) - n[2] * m[2] * k2)
            }
        }
    }

    fn check_dim(&self, k: &[f64]) -> Result<()> {
        if k.len() != self.dim() {
            return Err(Error::Mismatch(format!(
                "{} kernel evaluated at a {}-vector",
                self.name(),
                k.len()
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const Z: [f64; 3] = [0.0, 0.0, 1.0];

    #[test]
    fn reference_values() {
        assert_eq!(KernelSpec::Coulomb3D.uhat(&[1.0, 0.0, 0.0]).unwrap(), 1.0);
        let dip = KernelSpec::dipole3d(Z, Z).unwrap();
        assert!((dip.uhat(&[0.0, 0.0, 2.0]).unwrap() - 2.0).abs() < 1e-15);
        assert!((dip.regularized_symbol(&[0.0, 0.0, 2.0]).unwrap() - 8.0).abs() < 1e-14);
        let d25 = KernelSpec::dipole25d(Z, Z, 0.0).unwrap();
        assert!((d25.uhat(&[1.0, 0.0]).unwrap() + 1.5).abs() < 1e-15);
        assert!(KernelSpec::Coulomb3D.uhat(&[0.0; 3]).is_err());
        assert!(KernelSpec::Coulomb3D.uhat(&[1.0, 0.0]).is_err());
    }

    #[test]
    fn origin_limits() {
        assert_eq!(KernelSpec::Coulomb3D.regularized_symbol(&[0.0; 3]).unwrap(), 1.0);
        assert_eq!(KernelSpec::Coulomb25D.regularized_symbol(&[0.0; 2]).unwrap(), 1.0);
        let dip = KernelSpec::dipole3d([0.3, -0.2, 0.9], [1.0, 1.0, 0.0]).unwrap();
        assert_eq!(dip.regularized_symbol(&[0.0; 3]).unwrap(), 0.0);
        let d25 = KernelSpec::dipole25d([0.3, -0.2, 0.9], Z, 0.7).unwrap();
        assert_eq!(d25.regularized_symbol(&[0.0; 2]).unwrap(), 0.0);
    }

    #[test]
    fn normalization() {
        let KernelSpec::Dipole3D { n, .. } = KernelSpec::dipole3d([3.0, 0.0, 4.0], Z).unwrap() else {
            unreachable!()
        };
        assert!((dot(&n, &n) - 1.0).abs() < 1e-15);
        assert!(KernelSpec::dipole3d([0.0; 3], Z).is_err());
    }
}
