use std::f64::consts::PI;

use nlipot::grid::{Domain, ScalarField, UniformGrid};
use nlipot::kernels::KernelSpec;
use nlipot::oracle::Example;
use nlipot::quadrature::{build_polar_grid, build_spherical_grid, gauss_legendre, scale_rule};
use nlipot::specfun::{bessel_i0_scaled, bessel_i1_scaled, erfc};
use nlipot::splitter::select_params;
use nlipot::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn unit3() -> impl Strategy<Value = [f64; 3]> {
    (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0)
        .prop_filter("nonzero", |(x, y, z)| x * x + y * y + z * z > 1e-2)
        .prop_map(|(x, y, z)| {
            let r = (x * x + y * y + z * z).sqrt();
            [x / r, y / r, z / r]
        })
}

fn nonzero3() -> impl Strategy<Value = [f64; 3]> {
    (-5.0f64..5.0, -5.0f64..5.0, -5.0f64..5.0).prop_filter("nonzero", |(x, y, z)| x * x + y * y + z * z > 1e-6)
        .prop_map(|(x, y, z)| [x, y, z])
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[test]
fn same_orientation_dipole_range() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let kernel = KernelSpec::dipole3d([0.3, -0.2, 0.93], [0.3, -0.2, 0.93]).unwrap();
    for _ in 0..100_000 {
        let k = [rng.gen_range(-1e3..1e3), rng.gen_range(-1e3..1e3), rng.gen_range(-1e3..1e3)];
        let u = kernel.uhat(&k).unwrap();
        assert!((-1.0 - 1e-14..=2.0 + 1e-14).contains(&u));
    }
}

proptest! {
    #[test]
    fn symbol_scale_laws(k in nonzero3(), c in 0.01f64..100.0, n in unit3(), m in unit3()) {
        let ck = [c * k[0], c * k[1], c * k[2]];
        let c3 = KernelSpec::Coulomb3D;
        prop_assert!((c3.uhat(&ck).unwrap() * c * c / c3.uhat(&k).unwrap() - 1.0).abs() < 1e-13);
        let d3 = KernelSpec::dipole3d(n, m).unwrap();
        prop_assert!((d3.uhat(&ck).unwrap() - d3.uhat(&k).unwrap()).abs() < 1e-12);
        let c25 = KernelSpec::Coulomb25D;
        prop_assert!((c25.uhat(&ck[..2]).unwrap() * c / c25.uhat(&k[..2]).unwrap() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn regularized_symbol_consistency(dir in unit3(), e in -3.0f64..3.0, n in unit3(), m in unit3(), alpha in -1.0f64..1.0) {
        let r = 10f64.powf(e);
        let k = [r * dir[0], r * dir[1], r * dir[2]];
        for (kernel, d) in [
            (KernelSpec::Coulomb3D, 3),
            (KernelSpec::dipole3d(n, m).unwrap(), 3),
            (KernelSpec::Coulomb25D, 2),
            (KernelSpec::dipole25d(n, m, alpha).unwrap(), 2),
        ] {
            let k = &k[..d];
            let norm = dot(k, k).sqrt();
            let reg = kernel.regularized_symbol(k).unwrap();
            let expect = norm.powi(d as i32 - 1) * kernel.uhat(k).unwrap();
            prop_assert!((reg - expect).abs() <= 1e-14 * expect.abs().max(norm.powi(d as i32 - 1) * 1e-300) + 1e-14 * reg.abs());
        }
    }

    #[test]
    fn same_orientation_formula(k in nonzero3(), n in unit3()) {
        let kernel = KernelSpec::dipole3d(n, n).unwrap();
        let cos2 = dot(&n, &k).powi(2) / dot(&k, &k);
        prop_assert!((kernel.uhat(&k).unwrap() - (-1.0 + 3.0 * cos2)).abs() < 1e-13);
    }

    #[test]
    fn partition_is_monotone_along_rays(dir in unit3(), dim in 2usize..=3) {
        let grid = UniformGrid::new(Domain::cube(dim, 16.0).unwrap(), &vec![32; dim]).unwrap();
        let split = select_params(&grid, 1).unwrap();
        let mut prev = split.p(&[0.0; 3][..dim]);
        for i in 1..=1000 {
            let r = split.cutoff * 1.2 * i as f64 / 1000.0;
            let k: Vec<f64> = dir[..dim].iter().map(|c| c * r).collect();
            let p = split.p(&k);
            prop_assert!(p <= prev);
            prop_assert_eq!((1.0 - p) + p, 1.0);
            prev = p;
        }
    }

    #[test]
    fn quadrature_weights_fill_the_ball(p in 0.1f64..50.0, nr in 2usize..20, nt in 16usize..24, nphi in 4usize..24) {
        let disc = build_polar_grid(p, nr, nphi).unwrap();
        prop_assert!(disc.weights.iter().all(|&w| w > 0.0));
        let area: f64 = disc.weights.iter().sum();
        prop_assert!((area / (PI * p * p) - 1.0).abs() < 1e-12);
        let ball = build_spherical_grid(p, nr, nt, nphi).unwrap();
        prop_assert!(ball.weights.iter().all(|&w| w > 0.0));
        let vol: f64 = ball.weights.iter().sum();
        prop_assert!((vol / (4.0 / 3.0 * PI * p.powi(3)) - 1.0).abs() < 1e-12);
        prop_assert_eq!(ball.len(), nr * nt * nphi);
    }

    #[test]
    fn gauss_legendre_polynomial_exactness(n in 1usize..=64, lo in -5.0f64..5.0, width in 0.1f64..4.0, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coef: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(0.0..1.0)).collect();
        let hi = lo + width;
        let rule = scale_rule(&gauss_legendre(n).unwrap(), lo, hi).unwrap();
        // positive coefficients in powers of (x - lo) keep the exact value free of cancellation
        let got = rule.integrate(|x| coef.iter().rev().fold(0.0, |acc, c| acc * (x - lo) + c));
        let exact: f64 = coef.iter().enumerate().map(|(p, c)| c * width.powi(p as i32 + 1) / (p + 1) as f64).sum();
        prop_assert!((got / exact - 1.0).abs() < 1e-13);
    }

    #[test]
    fn closed_forms_collapse(x in -6.0f64..6.0, y in -6.0f64..6.0, z in -6.0f64..6.0, n in unit3()) {
        let n2 = {
            let r = n[0].hypot(n[1]).max(1e-3);
            [n[0] / r, n[1] / r]
        };
        let e2 = Example::ex2(1.3, n2).exact_potential(&[x, y]).unwrap();
        let e3 = Example::ex3(1.3, n2, n2).exact_potential(&[x, y]).unwrap();
        prop_assert!((e2 - e3).abs() <= 1e-14 * e2.abs().max(1.0));
        let a = [1.2, 1.45, 1.73];
        let e5 = Example::ex5(a, n).exact_potential(&[x, y, z]).unwrap();
        let e6 = Example::ex6(a, n, n).exact_potential(&[x, y, z]).unwrap();
        prop_assert!((e5 - e6).abs() <= 1e-14 * e5.abs().max(1.0));
    }

    #[test]
    fn field_files_round_trip(nx in 2usize..8, ny in 2usize..8, rx in 0.1f64..30.0, complex in any::<bool>(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let grid = UniformGrid::new(Domain::new(&[rx, 2.0 * rx]).unwrap(), &[2 * nx, 2 * ny]).unwrap();
        let field = if complex {
            let v = (0..grid.len()).map(|_| Complex64::new(rng.gen(), rng.gen())).collect();
            ScalarField::complex(grid, v).unwrap()
        } else {
            let v = (0..grid.len()).map(|_| rng.gen_range(-1e300..1e300)).collect();
            ScalarField::real(grid, v).unwrap()
        };
        let mut bytes = Vec::new();
        field.write_to(&mut bytes).unwrap();
        let back = ScalarField::read_from(&mut bytes.as_slice()).unwrap();
        prop_assert_eq!(back, field);
    }

    #[test]
    fn scaled_bessel_wronskian(r in 0.05f64..60.0) {
        let h = 1e-5 * r.max(1.0);
        let fd = (bessel_i0_scaled(r + h).unwrap() - bessel_i0_scaled(r - h).unwrap()) / (2.0 * h);
        let exact = bessel_i1_scaled(r).unwrap() - bessel_i0_scaled(r).unwrap();
        prop_assert!((fd - exact).abs() <= 1e-8);
    }

    #[test]
    fn erfc_reflection(x in -6.0f64..6.0) {
        prop_assert!((erfc(x) + erfc(-x) - 2.0).abs() <= 4e-16);
    }
}

#[test]
fn energy_branches_meet_at_isotropy() {
    let lambda = 8.0 * PI / 3.0;
    for kappa in [1.0 - 1e-6, 1.0 + 1e-6] {
        // κ = sqrt(γ_z / γ_x)
        let e = Example::ex7(1.0 / (kappa * kappa), 1.0, lambda).exact_energy().unwrap();
        assert!(e.abs() <= 1e-5);
    }
}
