mod config;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nlipot::bench::{self, EnergyRow, Row};
use nlipot::grid::{Domain, ScalarField, UniformGrid};
use nlipot::kernels::KernelSpec;
use nlipot::oracle::Example;
use nlipot::selftest::{self, Faults, NufftSuite};
use nlipot::solver::{energy, PotentialResult, SolverPlan};
use nlipot::splitter::select_params;

use config::{Inject, KernelKind, RunArgs};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Mismatch(String),
    #[error("{0}")]
    Compute(String),
    #[error("{0}")]
    Threshold(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            Self::Threshold(_) => 1,
            Self::Usage(_) => 2,
            Self::Config(_) => 3,
            Self::Io(_) => 4,
            Self::Mismatch(_) => 5,
            Self::Compute(_) => 6,
        }
    }
}

impl From<nlipot::Error> for CliError {
    fn from(e: nlipot::Error) -> Self {
        use nlipot::Error as E;
        let msg = e.to_string();
        match e {
            E::Io(_) | E::Format(_) => Self::Io(msg),
            E::Mismatch(_) => Self::Mismatch(msg),
            E::InvalidGrid(_) | E::InvalidArgument(_) => Self::Config(msg),
            E::NonFinite(_) | E::Nyquist { .. } => Self::Compute(msg),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "nlipot", version, about = "Free-space Coulomb and dipolar potentials and energies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate the potential and write it to --out
    Solve(RunArgs),
    /// Evaluate the interaction energy
    Energy(RunArgs),
    /// Reproduce a benchmark table
    Bench(RunArgs),
    /// Run the release self-checks
    Selftest(RunArgs),
}

struct Setup {
    grid: UniformGrid,
    rho: ScalarField,
    kernel: KernelSpec,
    example: Option<Example>,
    default_box: bool,
}

fn vec3(v: &[f64], what: &str) -> Result<[f64; 3], CliError> {
    match *v {
        [x, y] => Ok([x, y, 0.0]),
        [x, y, z] => Ok([x, y, z]),
        _ => Err(CliError::Config(format!("--{what} needs 2 or 3 components"))),
    }
}

fn kernel_from_args(args: &RunArgs, kind: KernelKind) -> Result<KernelSpec, CliError> {
    let n = || {
        args.n
            .as_deref()
            .ok_or_else(|| CliError::Config("dipole kernels need --n".into()))
            .and_then(|v| vec3(v, "n"))
    };
    let m = || match args.m.as_deref() {
        Some(v) => vec3(v, "m"),
        None => n(),
    };
    Ok(match kind {
        KernelKind::Coulomb3d => KernelSpec::Coulomb3D,
        KernelKind::Coulomb25d => KernelSpec::Coulomb25D,
        KernelKind::Dipole3d => KernelSpec::dipole3d(n()?, m()?)?,
        KernelKind::Dipole25d => KernelSpec::dipole25d(n()?, m()?, args.alpha.unwrap_or(0.0))?,
    })
}

fn example_from_args(args: &RunArgs) -> Result<Option<Example>, CliError> {
    let Some(id) = args.example else {
        return Ok(None);
    };
    if !(1..=7).contains(&id) {
        return Err(CliError::Config(format!("--example must be 1..7, got {id}")));
    }
    Ok(Some(match (id, args.case) {
        (7, Some(c)) => Example::energy_case(c)?,
        (_, Some(_)) => return Err(CliError::Config("--case only applies to example 7".into())),
        _ => Example::standard(id)?,
    }))
}

fn per_axis<T: Copy>(v: &[T], dim: usize, what: &str) -> Result<Vec<T>, CliError> {
    match v.len() {
        1 => Ok(vec![v[0]; dim]),
        l if l == dim => Ok(v.to_vec()),
        l => Err(CliError::Mismatch(format!("--{what} has {l} values for a {dim}D problem"))),
    }
}

fn setup(args: &RunArgs) -> Result<Setup, CliError> {
    let example = example_from_args(args)?;
    let (grid, rho, default_box) = match (&example, &args.density_file) {
        (Some(_), Some(_)) => {
            return Err(CliError::Config("give either --example or --density-file, not both".into()))
        }
        (None, None) => return Err(CliError::Config("no density: give --example or --density-file".into())),
        (None, Some(path)) => {
            let rho = ScalarField::read(path).map_err(|e| match e {
                nlipot::Error::Io(io) => CliError::Io(format!("{}: {io}", path.display())),
                other => other.into(),
            })?;
            if rho.is_complex() {
                return Err(CliError::Config("density file holds a complex field".into()));
            }
            (rho.grid().clone(), rho, false)
        }
        (Some(ex), None) => {
            let d = ex.dim();
            let counts = match &args.grid {
                Some(g) => per_axis(g, d, "grid")?,
                None => vec![if d == 2 { 64 } else { 32 }; d],
            };
            let extents = match &args.box_ {
                Some(b) => per_axis(b, d, "box")?,
                None => bench::default_box(ex, counts[0]),
            };
            let grid = UniformGrid::new(Domain::new(&extents)?, &counts)?;
            let rho = ex.density_field(&grid)?;
            (grid, rho, args.box_.is_none() && counts.iter().all(|&c| c == counts[0]))
        }
    };
    if let Some(d) = args.dim {
        if d != grid.dim() {
            return Err(CliError::Mismatch(format!("--dim {d} but the density is {}D", grid.dim())));
        }
    }
    let kernel = match (args.kernel, &example) {
        (Some(kind), _) => kernel_from_args(args, kind)?,
        (None, Some(ex)) => ex.kernel(),
        (None, None) => return Err(CliError::Config("no kernel: give --kernel".into())),
    };
    if kernel.dim() != grid.dim() {
        return Err(CliError::Mismatch(format!(
            "{} kernel is {}D but the density is {}D",
            kernel.name(),
            kernel.dim(),
            grid.dim()
        )));
    }
    let example = if args.kernel.is_some() { None } else { example };
    Ok(Setup { grid, rho, kernel, example, default_box })
}

fn plan(args: &RunArgs, s: &Setup, prec: u8) -> Result<SolverPlan, CliError> {
    match args.alg.unwrap_or(2) {
        1 => Ok(SolverPlan::simple(&s.grid, s.kernel.clone())?),
        2 => {
            let mut split = select_params(&s.grid, prec)?;
            if let Some(ni) = args.ni {
                split = split.with_sizes(&vec![ni; s.grid.dim()])?;
            }
            Ok(SolverPlan::with_split(&s.grid, s.kernel.clone(), prec, split)?)
        }
        a => Err(CliError::Config(format!("--alg must be 1 or 2, got {a}"))),
    }
}

fn timing_fields(r: &PotentialResult) -> String {
    format!(
        "t_fft={} t_nufft={} t_total={}",
        bench::sig3(r.timings.fft),
        bench::sig3(r.timings.nufft),
        bench::sig3(r.timings.total)
    )
}

fn cmd_solve(args: RunArgs) -> Result<(), CliError> {
    let out = args.out_path()?.to_path_buf();
    let prec = args.single_prec()?;
    let s = setup(&args)?;
    let res = plan(&args, &s, prec)?.solve(&s.rho)?;
    res.u.write(&out)?;
    let error = match &s.example {
        Some(ex) if ex.id() <= 6 => Some(ex.rel_l2_error(&res.u)?),
        _ => None,
    };
    let shown = error.map_or("n/a".to_string(), |e| format!("{e:.2e}"));
    println!("N={} prec={prec} {} error={shown}", s.grid.len(), timing_fields(&res));
    if let (Some(e), Some(ex), true) = (error, &s.example, s.default_box) {
        let limit = bench::threshold(ex.id(), prec, s.grid.len());
        if e > limit {
            return Err(CliError::Threshold(format!("error {e:.2e} exceeds {limit:.0e}")));
        }
    }
    Ok(())
}

fn cmd_energy(args: RunArgs) -> Result<(), CliError> {
    let prec = args.single_prec()?;
    let s = setup(&args)?;
    let plan = plan(&args, &s, prec)?;
    let res = plan.solve(&s.rho)?;
    if let Some(out) = &args.out {
        res.u.write(out)?;
    }
    let lambda = args.lambda.or(s.example.as_ref().map(Example::lambda)).unwrap_or(1.0);
    let e = energy(&res.u, &s.rho, lambda)?;
    let exact = match &s.example {
        Some(ex @ Example::Ex7 { .. }) if args.lambda.is_none() => Some(ex.exact_energy()?),
        _ => None,
    };
    let error = exact.map(|x| (e - x).abs());
    let shown = error.map_or("n/a".to_string(), |v| format!("{v:.1e}"));
    let n_i = if args.alg.unwrap_or(2) == 2 { plan.phase_grid().len() } else { 0 };
    println!("N={} N_I={n_i} E={e:.16e} error={shown} {}", s.grid.len(), timing_fields(&res));
    if let (Some(err), Some(ex), true) = (error, &s.example, s.default_box) {
        let case = match ex {
            Example::Ex7 { gx, .. } if *gx < 0.5 => 1,
            Example::Ex7 { gx, .. } if *gx > 1.5 => 3,
            _ => 2,
        };
        let limit = bench::energy_threshold(case, s.grid.len(), n_i);
        if err > limit {
            return Err(CliError::Threshold(format!("energy error {err:.1e} exceeds {limit:.0e}")));
        }
    }
    Ok(())
}

fn aligned(csv: &str) -> String {
    csv.lines()
        .map(|l| l.split(',').map(|c| format!("{c:>24}")).collect::<String>().trim_start().to_string() + "\n")
        .collect()
}

fn cmd_bench(args: RunArgs) -> Result<(), CliError> {
    let table = args.table.ok_or_else(|| CliError::Usage("bench needs --table 1..7".into()))?;
    if !(1..=7).contains(&table) {
        return Err(CliError::Config(format!("no table {table}; expected 1..7")));
    }
    let precs = args.prec.clone().unwrap_or_else(|| vec![0, 1]);
    if precs.iter().any(|&p| p > 1) {
        return Err(CliError::Config("prec values must be 0 or 1".into()));
    }
    let mut failures = Vec::new();
    let text = if table == 7 {
        let pairs: Vec<(usize, usize)> = bench::ENERGY_LADDER
            .iter()
            .copied()
            .filter(|(n, _)| args.sizes.as_ref().is_none_or(|s| s.contains(&n.pow(3))))
            .collect();
        let rows = bench::energy_table(&pairs)?;
        for r in &rows {
            check_energy(r, &mut failures);
        }
        bench::energy_csv(&rows)
    } else {
        let sizes = args.sizes.clone().unwrap_or_else(|| bench::default_sizes(table, args.large));
        let rows = bench::table(table, &precs, &sizes)?;
        for r in &rows {
            check_row(table, r, &mut failures);
        }
        bench::csv(&rows)
    };
    if args.csv {
        print!("{text}");
    } else {
        print!("{}", aligned(&text));
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Threshold(failures.join("; ")))
    }
}

fn check_row(table: u8, r: &Row, failures: &mut Vec<String>) {
    let limit = bench::threshold(table, r.prec, r.n);
    if r.error > limit {
        failures.push(format!("N={} prec={} error {:.2e} > {limit:.0e}", r.n, r.prec, r.error));
    }
}

fn check_energy(r: &EnergyRow, failures: &mut Vec<String>) {
    let limit = bench::energy_threshold(r.case, r.n, r.n_i);
    if r.error > limit {
        failures.push(format!("case {} N={} N_I={} error {:.1e} > {limit:.0e}", r.case, r.n, r.n_i, r.error));
    }
}

fn cmd_selftest(args: RunArgs) -> Result<(), CliError> {
    let suite = NufftSuite { instances: args.instances.unwrap_or(100), ..NufftSuite::default() };
    let faults = match args.inject {
        None => Faults::default(),
        Some(Inject::Type1Sign) => Faults { flip_type1_sign: true, ..Faults::default() },
        Some(Inject::ZeroMode) => Faults { zero_mode: Some(f64::NAN), ..Faults::default() },
    };
    let checks = selftest::run(suite, faults)?;
    for c in &checks {
        println!("{c}");
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    println!("{} of {} checks passed", checks.len() - failed, checks.len());
    if failed == 0 {
        Ok(())
    } else {
        Err(CliError::Threshold(format!("{failed} self-checks failed")))
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    nlipot::init_threads();
    match cli.command {
        Command::Solve(a) => cmd_solve(a.resolve()?),
        Command::Energy(a) => cmd_energy(a.resolve()?),
        Command::Bench(a) => cmd_bench(a.resolve()?),
        Command::Selftest(a) => cmd_selftest(a.resolve()?),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("nlipot: {e}");
            ExitCode::from(e.code())
        }
    }
}
