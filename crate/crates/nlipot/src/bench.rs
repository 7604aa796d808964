//! Benchmark tables: per-example box policy, size ladders and CSV rows.

use std::fmt::Write as _;

use crate::grid::{Domain, UniformGrid};
use crate::oracle::Example;
use crate::solver::{energy, SolverPlan};
use crate::splitter::select_params;
use crate::{Error, Result};

/// Total point counts of the default 2D ladder.
pub const SIZES_2D: [usize; 4] = [1024, 4096, 16384, 65536];
/// Total point counts of the default 3D ladder.
pub const SIZES_3D: [usize; 2] = [32768, 262144];
/// Larger 3D sizes, only run on request.
pub const SIZES_3D_LARGE: [usize; 2] = [2097152, 16777216];

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub n: usize,
    pub prec: u8,
    pub t_fft: f64,
    pub t_nufft: f64,
    pub t_total: f64,
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnergyRow {
    pub case: u8,
    pub n: usize,
    pub n_i: usize,
    pub computed: f64,
    pub error: f64,
    pub time: f64,
}

/// Points per axis for a total of `total` points in `dim` dimensions.
pub fn per_axis(total: usize, dim: usize) -> Result<usize> {
    let n = (total as f64).powf(1.0 / dim as f64).round() as usize;
    if n.pow(dim as u32) != total {
        return Err(Error::InvalidArgument(format!("{total} is not a {dim}D cube of points")));
    }
    Ok(n)
}

/// Box extents used for `example` with `n` points per axis.
pub fn default_box(example: &Example, n: usize) -> Vec<f64> {
    let d = example.dim();
    let fine = n >= 64;
    match *example {
        Example::Ex7 { gx, .. } if gx < 0.5 => {
            if fine {
                vec![24.0, 24.0, 16.0]
            } else {
                vec![16.0; 3]
            }
        }
        Example::Ex7 { gx, .. } if gx > 1.5 => {
            if fine {
                vec![16.0; 3]
            } else {
                vec![11.0, 11.0, 12.0]
            }
        }
        Example::Ex7 { .. } => vec![16.0; 3],
        _ if fine => vec![16.0; d],
        _ => vec![12.0; d],
    }
}

pub fn default_grid(example: &Example, n: usize) -> Result<UniformGrid> {
    let d = example.dim();
    UniformGrid::new(Domain::new(&default_box(example, n))?, &vec![n; d])
}

/// Solves `example` on `grid` and returns the relative L2 error row.
pub fn run_case(example: &Example, grid: &UniformGrid, prec: u8, simple: bool) -> Result<Row> {
    let plan = if simple {
        SolverPlan::simple(grid, example.kernel())?
    } else {
        SolverPlan::new(grid, example.kernel(), prec)?
    };
    let rho = example.density_field(grid)?;
    let res = plan.solve(&rho)?;
    Ok(Row {
        n: grid.len(),
        prec,
        t_fft: res.timings.fft,
        t_nufft: res.timings.nufft,
        t_total: res.timings.total,
        error: example.rel_l2_error(&res.u)?,
    })
}

/// Energy of case `case` with `n` points per axis and an `n_i`-per-axis I₂ grid.
pub fn run_energy(case: u8, n: usize, n_i: usize) -> Result<EnergyRow> {
    let example = Example::energy_case(case)?;
    let grid = default_grid(&example, n)?;
    let split = select_params(&grid, 1)?.with_sizes(&[n_i; 3])?;
    let plan = SolverPlan::with_split(&grid, example.kernel(), 1, split)?;
    let rho = example.density_field(&grid)?;
    let res = plan.solve(&rho)?;
    let computed = energy(&res.u, &rho, example.lambda())?;
    Ok(EnergyRow {
        case,
        n: grid.len(),
        n_i: n_i.pow(3),
        computed,
        error: (computed - example.exact_energy()?).abs(),
        time: res.timings.total,
    })
}

/// Rows of table `table` (1..=6) for the given precisions and total sizes.
pub fn table(table: u8, precs: &[u8], sizes: &[usize]) -> Result<Vec<Row>> {
    if !(1..=6).contains(&table) {
        return Err(Error::InvalidArgument(format!("no error table {table}; expected 1..6")));
    }
    let example = Example::standard(table)?;
    let mut rows = Vec::new();
    for &prec in precs {
        for &total in sizes {
            let n = per_axis(total, example.dim())?;
            rows.push(run_case(&example, &default_grid(&example, n)?, prec, false)?);
        }
    }
    Ok(rows)
}

/// Default `(n, n_i)` pairs of the energy table.
pub const ENERGY_LADDER: [(usize, usize); 4] = [(32, 10), (32, 15), (64, 20), (64, 30)];

pub fn energy_table(pairs: &[(usize, usize)]) -> Result<Vec<EnergyRow>> {
    let mut rows = Vec::new();
    for case in 1..=3 {
        for &(n, n_i) in pairs {
            rows.push(run_energy(case, n, n_i)?);
        }
    }
    Ok(rows)
}

/// Default size ladder of table `table`.
pub fn default_sizes(table: u8, large: bool) -> Vec<usize> {
    match table {
        1..=3 => SIZES_2D.to_vec(),
        _ if large => SIZES_3D.iter().chain(&SIZES_3D_LARGE).copied().collect(),
        _ => SIZES_3D.to_vec(),
    }
}

/// Seconds with three significant digits.
pub fn sig3(t: f64) -> String {
    if t <= 0.0 || !t.is_finite() {
        return format!("{t}");
    }
    let digits = (2 - t.log10().floor() as i32).max(0) as usize;
    format!("{t:.digits$}")
}

pub fn csv(rows: &[Row]) -> String {
    let mut out = String::from("N,Prec,T_FFT,T_NUFFT,T_Total,E\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{:.2e}",
            r.n,
            r.prec,
            sig3(r.t_fft),
            sig3(r.t_nufft),
            sig3(r.t_total),
            r.error
        );
    }
    out
}

pub fn energy_csv(rows: &[EnergyRow]) -> String {
    let mut out = String::from("Case,N,N_I,E_c,E,T\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{:.16e},{:.1e},{}", r.case, r.n, r.n_i, r.computed, r.error, sig3(r.time));
    }
    out
}

/// Error threshold a row of table `table` must meet.
pub fn threshold(table: u8, prec: u8, n: usize) -> f64 {
    match (table, prec) {
        (1, 0) => 1e-7,
        (1..=3, 1) if n >= 4096 => 1e-13,
        (2 | 3, 0) => 1e-5,
        (4..=6, 1) if n >= 262144 => 1e-12,
        (4..=6, 0) => 1e-6,
        _ => f64::INFINITY,
    }
}

/// Error threshold of an energy row.
pub fn energy_threshold(case: u8, n: usize, n_i: usize) -> f64 {
    match (n, n_i) {
        (262144, 27000) if case == 2 => 1e-13,
        (262144, 27000) => 1e-12,
        (32768, 3375) => 1e-7,
        _ => f64::INFINITY,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_and_formatting() {
        assert_eq!(per_axis(4096, 2).unwrap(), 64);
        assert_eq!(per_axis(262144, 3).unwrap(), 64);
        assert!(per_axis(1000, 2).is_err());
        assert_eq!(sig3(0.012345), "0.0123");
        assert_eq!(sig3(1.23456), "1.23");
        assert_eq!(sig3(123.456), "123");
        assert!(table(9, &[0], &[1024]).is_err());
    }

    #[test]
    fn boxes() {
        let ex1 = Example::standard(1).unwrap();
        assert_eq!(default_box(&ex1, 32), vec![12.0, 12.0]);
        assert_eq!(default_box(&ex1, 256), vec![16.0, 16.0]);
        let c1 = Example::energy_case(1).unwrap();
        assert_eq!(default_box(&c1, 64), vec![24.0, 24.0, 16.0]);
        let c3 = Example::energy_case(3).unwrap();
        assert_eq!(default_box(&c3, 32), vec![11.0, 11.0, 12.0]);
    }

    #[test]
    fn small_table_row() {
        let rows = table(1, &[0], &[1024]).unwrap();
        assert_eq!(rows.len(), 1);
        assert!(rows[0].error <= threshold(1, 0, 1024));
        let text = csv(&rows);
        assert!(text.starts_with("N,Prec,T_FFT,T_NUFFT,T_Total,E\n1024,0,"));
    }
}
