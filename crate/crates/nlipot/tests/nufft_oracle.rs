use std::f64::consts::PI;

use nlipot::fft::Sign;
use nlipot::grid::{Domain, ScalarField, UniformGrid};
use nlipot::nufft::{plan_type1, plan_type2, Preset};
use nlipot::{Complex64, Error};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn exact_type2(grid: &UniformGrid, f: &[Complex64], k: &[f64; 3], sign: f64) -> Complex64 {
    let d = grid.dim();
    let mut s = Complex64::default();
    for (i, &v) in f.iter().enumerate() {
        let x = grid.node(i);
        let ph: f64 = (0..d).map(|j| k[j] * x[j]).sum();
        s += v * Complex64::new(0.0, sign * ph).exp();
    }
    s * grid.cell_volume()
}

fn exact_type1(grid: &UniformGrid, c: &[Complex64], nodes: &[[f64; 3]], i: usize, sign: f64) -> Complex64 {
    let d = grid.dim();
    let x = grid.node(i);
    nodes
        .iter()
        .zip(c)
        .map(|(k, &v)| {
            let ph: f64 = (0..d).map(|j| k[j] * x[j]).sum();
            v * Complex64::new(0.0, sign * ph).exp()
        })
        .sum()
}

fn rel(a: &[Complex64], b: &[Complex64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (num / den).sqrt()
}

struct Case {
    grid: UniformGrid,
    nodes: Vec<[f64; 3]>,
    f: Vec<Complex64>,
    c: Vec<Complex64>,
}

fn case(seed: u64, counts: &[usize], extents: &[f64], n_nodes: usize) -> Case {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = UniformGrid::new(Domain::new(extents).unwrap(), counts).unwrap();
    let h = grid.spacings();
    let nodes = (0..n_nodes)
        .map(|_| {
            let mut k = [0.0; 3];
            for j in 0..grid.dim() {
                k[j] = rng.gen_range(-PI..=PI) / h[j];
            }
            k
        })
        .collect();
    let mut z = || Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let f = (0..grid.len()).map(|_| z()).collect();
    let c = (0..n_nodes).map(|_| z()).collect();
    Case { grid, nodes, f, c }
}

fn type2_error(cs: &Case, preset: Preset, sign: Sign) -> f64 {
    let plan = plan_type2(&cs.grid, &cs.nodes, preset, sign).unwrap();
    let got = plan.execute_type2(&ScalarField::complex(cs.grid.clone(), cs.f.clone()).unwrap()).unwrap();
    let want: Vec<Complex64> = cs.nodes.iter().map(|k| exact_type2(&cs.grid, &cs.f, k, sign.value())).collect();
    rel(&got, &want)
}

fn type1_error(cs: &Case, preset: Preset, sign: Sign) -> f64 {
    let plan = plan_type1(&cs.nodes, &cs.grid, preset, sign).unwrap();
    let got = plan.execute_type1(&cs.c).unwrap();
    let want: Vec<Complex64> =
        (0..cs.grid.len()).map(|i| exact_type1(&cs.grid, &cs.c, &cs.nodes, i, sign.value())).collect();
    rel(got.as_complex().unwrap(), &want)
}

#[test]
fn both_types_match_direct_sums_2d() {
    let cs = case(1, &[24, 16], &[7.0, 3.5], 300);
    for sign in [Sign::Plus, Sign::Minus] {
        assert!(type2_error(&cs, Preset::Digits12, sign) <= 1e-12);
        assert!(type1_error(&cs, Preset::Digits12, sign) <= 1e-12);
        assert!(type2_error(&cs, Preset::Digits6, sign) <= 1e-6);
        assert!(type1_error(&cs, Preset::Digits6, sign) <= 1e-6);
    }
}

#[test]
fn both_types_match_direct_sums_3d() {
    let cs = case(2, &[8, 12, 10], &[2.0, 9.0, 4.0], 120);
    assert!(type2_error(&cs, Preset::Digits12, Sign::Minus) <= 1e-12);
    assert!(type1_error(&cs, Preset::Digits12, Sign::Plus) <= 1e-12);
    assert!(type2_error(&cs, Preset::Digits6, Sign::Plus) <= 1e-6);
    assert!(type1_error(&cs, Preset::Digits6, Sign::Minus) <= 1e-6);
}

#[test]
fn nodes_on_the_band_edge() {
    let mut cs = case(3, &[16, 16], &[4.0, 4.0], 4);
    let kmax = PI / cs.grid.spacing(0);
    cs.nodes = vec![[kmax, kmax, 0.0], [-kmax, kmax, 0.0], [kmax, -kmax, 0.0], [-kmax, -kmax, 0.0]];
    assert!(type2_error(&cs, Preset::Digits12, Sign::Minus) <= 1e-12);
    assert!(type1_error(&cs, Preset::Digits12, Sign::Plus) <= 1e-12);
}

#[test]
fn type1_and_type2_are_adjoint() {
    let cs = case(4, &[20, 14], &[5.0, 8.0], 200);
    let plan2 = plan_type2(&cs.grid, &cs.nodes, Preset::Digits12, Sign::Minus).unwrap();
    let plan1 = plan_type1(&cs.nodes, &cs.grid, Preset::Digits12, Sign::Plus).unwrap();
    let t2 = plan2.execute_type2(&ScalarField::complex(cs.grid.clone(), cs.f.clone()).unwrap()).unwrap();
    let t1 = plan1.execute_type1(&cs.c).unwrap();
    let lhs: Complex64 = t2.iter().zip(&cs.c).map(|(a, b)| a * b.conj()).sum();
    let rhs: Complex64 = cs.f.iter().zip(t1.as_complex().unwrap()).map(|(a, b)| a * b.conj()).sum();
    let rhs = rhs * cs.grid.cell_volume();
    assert!((lhs - rhs).norm() <= 1e-12 * lhs.norm().max(rhs.norm()));
}

#[test]
fn plan_reuse_is_bitwise_identical() {
    let cs = case(5, &[12, 12, 12], &[3.0, 3.0, 3.0], 5000);
    let field = ScalarField::complex(cs.grid.clone(), cs.f.clone()).unwrap();
    let plan2 = plan_type2(&cs.grid, &cs.nodes, Preset::Digits12, Sign::Minus).unwrap();
    assert_eq!(plan2.execute_type2(&field).unwrap(), plan2.execute_type2(&field).unwrap());
    let c: Vec<Complex64> = (0..cs.nodes.len()).map(|q| Complex64::new(q as f64, 1.0)).collect();
    let plan1 = plan_type1(&cs.nodes, &cs.grid, Preset::Digits12, Sign::Plus).unwrap();
    assert_eq!(plan1.execute_type1(&c).unwrap(), plan1.execute_type1(&c).unwrap());
}

#[test]
fn real_fields_are_accepted() {
    let cs = case(6, &[10, 10], &[2.0, 2.0], 30);
    let re: Vec<f64> = cs.f.iter().map(|z| z.re).collect();
    let plan = plan_type2(&cs.grid, &cs.nodes, Preset::Digits12, Sign::Minus).unwrap();
    let a = plan.execute_type2(&ScalarField::real(cs.grid.clone(), re.clone()).unwrap()).unwrap();
    let as_complex: Vec<Complex64> = re.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let b = plan.execute_type2(&ScalarField::complex(cs.grid.clone(), as_complex).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn contract_violations() {
    let cs = case(7, &[8, 8], &[1.0, 1.0], 3);
    let beyond = [[1.01 * PI / cs.grid.spacing(0), 0.0, 0.0]];
    assert!(matches!(
        plan_type2(&cs.grid, &beyond, Preset::Digits12, Sign::Minus),
        Err(Error::Nyquist { index: 0, axis: 0 })
    ));
    let plan = plan_type1(&cs.nodes, &cs.grid, Preset::Digits6, Sign::Plus).unwrap();
    assert!(plan.execute_type1(&cs.c[..2]).is_err());
    let other = UniformGrid::new(Domain::new(&[1.0, 1.0]).unwrap(), &[10, 8]).unwrap();
    let plan = plan_type2(&cs.grid, &cs.nodes, Preset::Digits6, Sign::Plus).unwrap();
    assert!(plan.execute_type2(&ScalarField::zeros(other)).is_err());
    assert!(plan.execute_type1(&cs.c).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_2d_instances(
        seed in any::<u64>(),
        nx in 4usize..=16,
        ny in 4usize..=16,
        rx in 0.5f64..20.0,
        ry in 0.5f64..20.0,
        n_nodes in 10usize..=120,
    ) {
        let cs = case(seed, &[2 * nx, 2 * ny], &[rx, ry], n_nodes);
        prop_assert!(type2_error(&cs, Preset::Digits12, Sign::Minus) <= 1e-12);
        prop_assert!(type1_error(&cs, Preset::Digits12, Sign::Plus) <= 1e-12);
        prop_assert!(type2_error(&cs, Preset::Digits6, Sign::Plus) <= 1e-6);
        prop_assert!(type1_error(&cs, Preset::Digits6, Sign::Minus) <= 1e-6);
    }

    #[test]
    fn linear_in_the_input(seed in any::<u64>(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let cs = case(seed, &[12, 8], &[3.0, 2.0], 40);
        let other = case(seed.wrapping_add(1), &[12, 8], &[3.0, 2.0], 40);
        let plan = plan_type1(&cs.nodes, &cs.grid, Preset::Digits12, Sign::Plus).unwrap();
        let mix: Vec<Complex64> = cs.c.iter().zip(&other.c).map(|(x, y)| x * a + y * b).collect();
        let lhs = plan.execute_type1(&mix).unwrap();
        let u = plan.execute_type1(&cs.c).unwrap();
        let v = plan.execute_type1(&other.c).unwrap();
        let rhs: Vec<Complex64> =
            u.as_complex().unwrap().iter().zip(v.as_complex().unwrap()).map(|(x, y)| x * a + y * b).collect();
        prop_assert!(rel(lhs.as_complex().unwrap(), &rhs) <= 1e-13);
    }
}
