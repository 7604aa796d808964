//! Gauss-Legendre rules and the polar/spherical product grids used to
//! discretize Fourier integrals over a ball.

use std::f64::consts::PI;

use crate::{Error, Result};

/// One-dimensional quadrature rule on `[lo, hi]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Rule1D {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub lo: f64,
    pub hi: f64,
}

impl Rule1D {
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Result<Rule1D> {
    if n == 0 {
        return Err(Error::InvalidArgument("Gauss-Legendre rule needs n >= 1".into()));
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // largest roots first
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        // polish in double-double so that x is the correctly rounded root
        let mut xx = (x, 0.0);
        for _ in 0..2 {
            let (p, d) = legendre_dd(n, xx);
            xx = dd_add(xx, (-(p.0 + p.1) / (d.0 + d.1), 0.0));
        }
        let d = legendre_dd(n, xx).1;
        let d2 = dd_mul(d, d);
        let one_minus_x2 = dd_add((1.0, 0.0), dd_mul((-xx.0, -xx.1), xx));
        let den = dd_mul(one_minus_x2, d2);
        let w = 2.0 / (den.0 + den.1);
        let x = xx.0;
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok(Rule1D { nodes, weights, lo: -1.0, hi: 1.0 })
}

// P_n(x) and P_n'(x) by the three-term recurrence and P_k' = k P_{k-1} + x P_{k-1}'.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p0, mut p1) = (1.0, x);
    let mut d1 = 1.0;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        d1 = kf * p1 + x * d1;
        p0 = p1;
        p1 = p2;
    }
    (p1, d1)
}

type Dd = (f64, f64);

fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    (s, b - (s - a))
}

fn dd_add(a: Dd, b: Dd) -> Dd {
    let (s, e) = two_sum(a.0, b.0);
    quick_two_sum(s, e + a.1 + b.1)
}

fn dd_mul(a: Dd, b: Dd) -> Dd {
    let p = a.0 * b.0;
    let e = a.0.mul_add(b.0, -p) + a.0 * b.1 + a.1 * b.0;
    quick_two_sum(p, e)
}

fn dd_div(a: Dd, c: f64) -> Dd {
    let q = a.0 / c;
    let r = dd_add(a, dd_mul((q, 0.0), (-c, 0.0)));
    quick_two_sum(q, r.0 / c)
}

// P_n(x) and P_n'(x) in double-double arithmetic.
fn legendre_dd(n: usize, x: Dd) -> (Dd, Dd) {
    if n == 0 {
        return ((1.0, 0.0), (0.0, 0.0));
    }
    let (mut p0, mut p1) = ((1.0, 0.0), x);
    let mut d1 = (1.0, 0.0);
    for k in 2..=n {
        let kf = k as f64;
        let a = dd_mul(dd_mul((2.0 * kf - 1.0, 0.0), x), p1);
        let b = dd_mul((-(kf - 1.0), 0.0), p0);
        let p2 = dd_div(dd_add(a, b), kf);
        d1 = dd_add(dd_mul((kf, 0.0), p1), dd_mul(x, d1));
        p0 = p1;
        p1 = p2;
    }
    (p1, d1)
}

/// Affine image of `rule` on `[lo, hi]`.
pub fn scale_rule(rule: &Rule1D, lo: f64, hi: f64) -> Result<Rule1D> {
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidArgument(format!("degenerate interval [{lo}, {hi}]")));
    }
    let s = (hi - lo) / (rule.hi - rule.lo);
    Ok(Rule1D {
        nodes: rule.nodes.iter().map(|&x| lo + (x - rule.lo) * s).collect(),
        weights: rule.weights.iter().map(|&w| w * s).collect(),
        lo,
        hi,
    })
}

/// Phase-space nodes with weights that include the polar or spherical Jacobian.
#[derive(Clone, Debug)]
pub struct NonuniformFourierGrid {
    pub dim: usize,
    pub nodes: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    pub radius: f64,
    /// `(N_r, N_φ)` in 2D, `(N_r, N_θ, N_φ)` in 3D.
    pub sizes: Vec<usize>,
}

impl NonuniformFourierGrid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: Fn(&[f64]) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(k, &w)| w * f(&k[..self.dim])).sum()
    }
}

fn trapezoid_angles(n: usize) -> Vec<f64> {
    (0..n).map(|i| 2.0 * PI * i as f64 / n as f64).collect()
}

/// Gauss-Legendre in `r ∈ [0, P]` times the periodic trapezoidal rule in `φ`.
pub fn build_polar_grid(p: f64, n_r: usize, n_phi: usize) -> Result<NonuniformFourierGrid> {
    if !(p > 0.0) || n_r == 0 || n_phi < 4 {
        return Err(Error::InvalidArgument(format!(
            "polar grid needs P > 0, N_r >= 1, N_phi >= 4 (got {p}, {n_r}, {n_phi})"
        )));
    }
    let radial = scale_rule(&gauss_legendre(n_r)?, 0.0, p)?;
    let dphi = 2.0 * PI / n_phi as f64;
    let phis = trapezoid_angles(n_phi);
    let mut nodes = Vec::with_capacity(n_r * n_phi);
    let mut weights = Vec::with_capacity(n_r * n_phi);
    for (&r, &wr) in radial.nodes.iter().zip(&radial.weights) {
        for &phi in &phis {
            nodes.push([r * phi.cos(), r * phi.sin(), 0.0]);
            weights.push(wr * dphi * r);
        }
    }
    Ok(NonuniformFourierGrid { dim: 2, nodes, weights, radius: p, sizes: vec![n_r, n_phi] })
}

/// Gauss-Legendre in `r ∈ [0, P]` and `θ ∈ [0, π]`, trapezoidal in `φ`.
pub fn build_spherical_grid(
    p: f64,
    n_r: usize,
    n_theta: usize,
    n_phi: usize,
) -> Result<NonuniformFourierGrid> {
    if !(p > 0.0) || n_r == 0 || n_theta == 0 || n_phi < 4 {
        return Err(Error::InvalidArgument(format!(
            "spherical grid needs P > 0, N_r, N_theta >= 1, N_phi >= 4 (got {p}, {n_r}, {n_theta}, {n_phi})"
        )));
    }
    let radial = scale_rule(&gauss_legendre(n_r)?, 0.0, p)?;
    let polar = scale_rule(&gauss_legendre(n_theta)?, 0.0, PI)?;
    let dphi = 2.0 * PI / n_phi as f64;
    let phis = trapezoid_angles(n_phi);
    let mut nodes = Vec::with_capacity(n_r * n_theta * n_phi);
    let mut weights = Vec::with_capacity(n_r * n_theta * n_phi);
    for (&r, &wr) in radial.nodes.iter().zip(&radial.weights) {
        for (&t, &wt) in polar.nodes.iter().zip(&polar.weights) {
            let (st, ct) = t.sin_cos();
            for &phi in &phis {
                let (sp, cp) = phi.sin_cos();
                nodes.push([r * st * cp, r * st * sp, r * ct]);
                weights.push(wr * wt * st * dphi * r * r);
            }
        }
    }
    Ok(NonuniformFourierGrid {
        dim: 3,
        nodes,
        weights,
        radius: p,
        sizes: vec![n_r, n_theta, n_phi],
    })
}
