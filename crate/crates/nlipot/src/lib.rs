//! Free-space Coulomb and dipole-dipole potentials on uniform grids.
//!
//! The potential `u = U * ρ` is evaluated in Fourier space. The singular
//! symbol is tamed by polar or spherical coordinates, the resulting
//! quadrature is applied with a nonuniform FFT, and a smooth far-field part
//! is handled by a plain zero-padded FFT.
//!
//! ```
//! use nlipot::{grid::{Domain, UniformGrid}, kernels::KernelSpec, oracle::Example, solver};
//!
//! let grid = UniformGrid::new(Domain::cube(2, 16.0)?, &[32, 32])?;
//! let case = Example::ex1(1.3);
//! let rho = case.density_field(&grid)?;
//! let plan = solver::SolverPlan::new(&grid, KernelSpec::Coulomb25D, 0)?;
//! let u = plan.solve(&rho)?;
//! assert!(case.rel_l2_error(&u.u)? < 1e-6);
//! # Ok::<(), nlipot::Error>(())
//! ```

pub mod bench;
mod error;
pub mod fft;
pub mod grid;
pub mod kernels;
pub mod nufft;
pub mod oracle;
pub mod quadrature;
pub mod selftest;
pub mod solver;
pub mod specfun;
pub mod splitter;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Caps the global rayon pool at `NLIPOT_THREADS` threads when that variable
/// is set. Called by every planner; later calls are no-ops.
pub fn init_threads() {
    static ONCE: std::sync::Once = std::sync::Once::new();
    ONCE.call_once(|| {
        if let Some(n) = std::env::var("NLIPOT_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
        }
    });
}
