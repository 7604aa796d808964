//! Release self-checks: NUFFT against direct summation, quadrature exactness,
//! splitter limits and end-to-end example errors.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bench::{default_grid, run_energy};
use crate::fft::Sign;
use crate::grid::{Domain, ScalarField, UniformGrid};
use crate::kernels::KernelSpec;
use crate::nufft::{direct, Kind, NufftPlan, Preset};
use crate::oracle::{rel_l2, Example};
use crate::quadrature::{build_polar_grid, build_spherical_grid, gauss_legendre, scale_rule};
use crate::solver::SolverPlan;
use crate::splitter::select_params;
use crate::Result;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn below(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            passed: value <= limit,
            detail: format!("{value:.2e} (limit {limit:.0e})"),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

/// Deliberate faults used to confirm that the checks can fail.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Faults {
    /// Run type-1 transforms with the opposite exponent sign.
    pub flip_type1_sign: bool,
    /// Replace the Coulomb far-field value at `k = 0`.
    pub zero_mode: Option<f64>,
}

#[derive(Clone, Copy, Debug)]
pub struct NufftSuite {
    pub instances: usize,
    pub seed: u64,
}

impl Default for NufftSuite {
    fn default() -> Self {
        Self { instances: 100, seed: 20090101 }
    }
}

/// Tolerance on the relative ℓ2 deviation from direct summation.
pub fn nufft_tolerance(preset: Preset) -> f64 {
    match preset {
        Preset::Digits12 => 1e-12,
        Preset::Digits6 => 1e-6,
    }
}

fn random_instance(rng: &mut ChaCha8Rng, dim: usize) -> Result<(UniformGrid, Vec<[f64; 3]>)> {
    let counts: Vec<usize> = (0..dim).map(|_| 2 * rng.gen_range(4..=16)).collect();
    let extents: Vec<f64> = (0..dim).map(|_| rng.gen_range(1.0..20.0)).collect();
    let grid = UniformGrid::new(Domain::new(&extents)?, &counts)?;
    let h = grid.spacings();
    let nodes = (0..rng.gen_range(10..=500))
        .map(|_| {
            let mut k = [0.0; 3];
            for j in 0..dim {
                k[j] = rng.gen_range(-1.0..=1.0) * PI / h[j];
            }
            k
        })
        .collect();
    Ok((grid, nodes))
}

fn random_complex(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

fn rel_dev(a: &[Complex64], b: &[Complex64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (num / den).sqrt()
}

/// Largest deviation over randomized instances of one `(dim, kind, preset)`.
pub fn nufft_max_deviation(
    dim: usize,
    kind: Kind,
    preset: Preset,
    suite: NufftSuite,
    faults: Faults,
) -> Result<f64> {
    let tag = dim as u64 * 4 + (kind == Kind::Type1) as u64 * 2 + (preset == Preset::Digits12) as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(suite.seed ^ (tag << 32));
    let mut worst: f64 = 0.0;
    for _ in 0..suite.instances {
        let (grid, nodes) = random_instance(&mut rng, dim)?;
        let sign = if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus };
        let s = sign.value();
        let dev = match kind {
            Kind::Type2 => {
                let f = random_complex(&mut rng, grid.len());
                let plan = NufftPlan::new(Kind::Type2, &grid, &nodes, preset, sign)?;
                let got = plan.execute_type2(&ScalarField::complex(grid.clone(), f.clone())?)?;
                rel_dev(&got, &direct::type2(&grid, &f, &nodes, s))
            }
            Kind::Type1 => {
                let c = random_complex(&mut rng, nodes.len());
                let used = if faults.flip_type1_sign {
                    if sign == Sign::Plus {
                        Sign::Minus
                    } else {
                        Sign::Plus
                    }
                } else {
                    sign
                };
                let plan = NufftPlan::new(Kind::Type1, &grid, &nodes, preset, used)?;
                let got = plan.execute_type1(&c)?;
                let got = got.as_complex().expect("type-1 output is complex");
                rel_dev(got, &direct::type1(&grid, &c, &nodes, s))
            }
        };
        worst = worst.max(dev);
    }
    Ok(worst)
}

pub fn nufft_checks(suite: NufftSuite, faults: Faults) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for dim in [2, 3] {
        for kind in [Kind::Type1, Kind::Type2] {
            for preset in [Preset::Digits6, Preset::Digits12] {
                let dev = nufft_max_deviation(dim, kind, preset, suite, faults)?;
                let name = format!("nufft {dim}d {kind:?} {preset:?}");
                out.push(Check::below(name, dev, nufft_tolerance(preset)));
            }
        }
    }
    Ok(out)
}

/// Largest relative error of `∫_0^1 x^p dx` for `p ≤ 2n - 1`, `n ∈ 1..=max_n`.
pub fn gauss_legendre_exactness(max_n: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for n in 1..=max_n {
        let rule = scale_rule(&gauss_legendre(n)?, 0.0, 1.0)?;
        for p in 0..2 * n {
            let got = rule.integrate(|x| x.powi(p as i32));
            let exact = 1.0 / (p + 1) as f64;
            worst = worst.max((got - exact).abs() / exact);
        }
    }
    Ok(worst)
}

/// Relative errors of the disc area and ball volume from the quadrature weights.
pub fn ball_volume_errors() -> Result<(f64, f64)> {
    let p = 3.7;
    let disc: f64 = build_polar_grid(p, 8, 16)?.weights.iter().sum();
    let ball: f64 = build_spherical_grid(p, 6, 16, 8)?.weights.iter().sum();
    let area = PI * p * p;
    let volume = 4.0 / 3.0 * PI * p.powi(3);
    Ok(((disc - area).abs() / area, (ball - volume).abs() / volume))
}

/// Errors of the disc integral of `e^{-|k|²/4}` over `|k| ≤ 12` with `n` and `2n` radial points.
pub fn radial_gaussian_errors(n: usize) -> Result<(f64, f64)> {
    let p = 12.0;
    let exact = 4.0 * PI * (1.0 - (-p * p / 4.0f64).exp());
    let err = |m: usize| -> Result<f64> {
        let g = build_polar_grid(p, m, 8)?;
        Ok((g.integrate(|k| (-(k[0] * k[0] + k[1] * k[1]) / 4.0).exp()) - exact).abs())
    };
    Ok((err(n)?, err(2 * n)?))
}

pub fn quadrature_checks() -> Result<Vec<Check>> {
    let (disc, ball) = ball_volume_errors()?;
    let (coarse, fine) = radial_gaussian_errors(10)?;
    let drop = coarse / fine.max(f64::MIN_POSITIVE);
    Ok(vec![
        Check::below("gauss-legendre exactness n <= 64", gauss_legendre_exactness(64)?, 1e-14),
        Check::below("polar disc area", disc, 1e-12),
        Check::below("spherical ball volume", ball, 1e-12),
        Check {
            name: "radial gaussian convergence".into(),
            passed: drop >= 1e4,
            detail: format!("{coarse:.2e} -> {fine:.2e}"),
        },
    ])
}

pub fn splitter_checks() -> Result<Vec<Check>> {
    let g2 = UniformGrid::new(Domain::cube(2, 16.0)?, &[64, 64])?;
    let g3 = UniformGrid::new(Domain::cube(3, 16.0)?, &[16, 16, 16])?;
    let s2 = select_params(&g2, 1)?;
    let s3 = select_params(&g3, 1)?;
    let tiny = 1e-4 * s3.a.sqrt();
    let far3 = (1.0 - s3.p(&[tiny, 0.0, 0.0])) / (tiny * tiny);
    let half = 0.5 * s2.r0;
    let far2 = (1.0 - s2.p(&[half, 0.0])) / half;
    let limits2 = [
        (s2.p(&[0.0, 0.0]) - 1.0).abs(),
        s2.p(&[s2.r1, 0.0]).abs(),
        s2.p(&[0.0, 2.0 * s2.r1]).abs(),
    ];
    Ok(vec![
        Check::below("2d partition limits", limits2.iter().cloned().fold(0.0, f64::max), 1e-15),
        Check::below("2d far-field integrand near origin", far2 * s2.r0 / 2.0, 1e-15),
        Check::below("3d partition at origin", (s3.p(&[0.0; 3]) - 1.0).abs(), 1e-15),
        Check::below("3d far-field symbol at k -> 0", (far3 * s3.a - 1.0).abs(), 1e-6),
        Check::below("3d partition at cutoff", s3.p(&[s3.cutoff, 0.0, 0.0]), 1e-15),
    ])
}

fn example_error(id: u8, n: usize, prec: u8, faults: Faults) -> Result<f64> {
    let example = Example::standard(id)?;
    let grid = default_grid(&example, n)?;
    let mut plan = SolverPlan::new(&grid, example.kernel(), prec)?;
    if let (Some(v), KernelSpec::Coulomb3D) = (faults.zero_mode, example.kernel()) {
        plan.set_zero_mode(v);
    }
    let rho = example.density_field(&grid)?;
    example.rel_l2_error(&plan.solve(&rho)?.u)
}

fn algorithm_gap(id: u8, n: usize) -> Result<f64> {
    let example = Example::standard(id)?;
    let grid = default_grid(&example, n)?;
    let rho = example.density_field(&grid)?;
    let a = SolverPlan::simple(&grid, example.kernel())?.solve(&rho)?.u.re();
    let b = SolverPlan::new(&grid, example.kernel(), 1)?.solve(&rho)?.u.re();
    rel_l2(&a, &b)
}

pub fn example_checks(faults: Faults) -> Result<Vec<Check>> {
    Ok(vec![
        Check::below("example 1 64x64 prec 1", example_error(1, 64, 1, faults)?, 1e-13),
        Check::below("example 3 64x64 prec 1", example_error(3, 64, 1, faults)?, 1e-13),
        Check::below("example 4 32^3 prec 0", example_error(4, 32, 0, faults)?, 1e-6),
        Check::below("energy case II 32^3", run_energy(2, 32, 15)?.error, 1e-7),
        Check::below("algorithms agree on example 2", algorithm_gap(2, 64)?, 1e-11),
    ])
}

/// Every check, in report order.
pub fn run(suite: NufftSuite, faults: Faults) -> Result<Vec<Check>> {
    let mut out = nufft_checks(suite, faults)?;
    out.extend(quadrature_checks()?);
    out.extend(splitter_checks()?);
    out.extend(example_checks(faults)?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_nufft_suite_passes() {
        let suite = NufftSuite { instances: 3, seed: 7 };
        for c in nufft_checks(suite, Faults::default()).unwrap() {
            assert!(c.passed, "{c}");
        }
    }

    #[test]
    fn flipped_sign_is_caught() {
        let suite = NufftSuite { instances: 2, seed: 7 };
        let faults = Faults { flip_type1_sign: true, ..Faults::default() };
        let dev = nufft_max_deviation(2, Kind::Type1, Preset::Digits6, suite, faults).unwrap();
        assert!(dev > 1e-2);
    }

    #[test]
    fn quadrature_and_splitter() {
        for c in quadrature_checks().unwrap().into_iter().chain(splitter_checks().unwrap()) {
            assert!(c.passed, "{c}");
        }
    }

    #[test]
    fn display() {
        let c = Check::below("x", 1e-3, 1e-2);
        assert_eq!(c.to_string(), "PASS x: 1.00e-3 (limit 1e-2)");
    }
}
