//! Run configuration: command-line flags merged over an optional `key=value` file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KernelKind {
    Coulomb3d,
    Dipole3d,
    Coulomb25d,
    Dipole25d,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Inject {
    /// Flip the exponent sign of every type-1 transform.
    Type1Sign,
    /// Corrupt the Coulomb far-field value at k = 0.
    ZeroMode,
}

/// Flags shared by all subcommands. Every long flag can also be given as
/// `name=value` in the file passed with `--config`.
#[derive(Args, Clone, Debug, Default)]
pub struct RunArgs {
    /// key=value file; flags on the command line take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub kernel: Option<KernelKind>,
    /// dipole orientation n, comma separated
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub n: Option<Vec<f64>>,
    /// dipole orientation m, comma separated
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub m: Option<Vec<f64>>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub dim: Option<usize>,
    /// box extents, one value or one per axis
    #[arg(long = "box", value_delimiter = ',')]
    pub box_: Option<Vec<f64>>,
    /// points per axis, one value or one per axis
    #[arg(long, value_delimiter = ',')]
    pub grid: Option<Vec<usize>>,
    /// 0 or 1; a comma separated list for bench
    #[arg(long, value_delimiter = ',')]
    pub prec: Option<Vec<u8>>,
    /// built-in example 1..7
    #[arg(long)]
    pub example: Option<u8>,
    /// energy case 1..3 of example 7
    #[arg(long)]
    pub case: Option<u8>,
    #[arg(long)]
    pub density_file: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    /// 1 for whole-ball quadrature, 2 for the split algorithm
    #[arg(long)]
    pub alg: Option<u8>,
    /// benchmark table 1..7
    #[arg(long)]
    pub table: Option<u8>,
    /// total point counts for bench, comma separated
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    /// include the 2097152 and 16777216 point 3D rows
    #[arg(long)]
    pub large: bool,
    /// I2 points per axis (3D energy runs)
    #[arg(long)]
    pub ni: Option<usize>,
    /// print CSV instead of aligned columns
    #[arg(long)]
    pub csv: bool,
    /// randomized NUFFT instances per configuration (selftest)
    #[arg(long)]
    pub instances: Option<usize>,
    #[arg(long, value_enum)]
    pub inject: Option<Inject>,
}

fn bad(key: &str, value: &str) -> CliError {
    CliError::Config(format!("invalid value {value:?} for {key}"))
}

fn list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>, CliError> {
    value.split(',').map(|s| s.trim().parse().map_err(|_| bad(key, value))).collect()
}

fn one<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value.trim().parse().map_err(|_| bad(key, value))
}

fn flag(key: &str, value: &str) -> Result<bool, CliError> {
    match value.trim() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(bad(key, value)),
    }
}

/// Parses `key=value` lines; `#` starts a comment.
pub fn parse_file(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected key=value", no + 1)))?;
        out.insert(k.trim().replace('_', "-"), v.trim().to_string());
    }
    Ok(out)
}

impl RunArgs {
    /// Fills unset fields from the config file, if one was given.
    pub fn resolve(mut self) -> Result<Self, CliError> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let text = std::fs::read_to_string(&path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        for (k, v) in parse_file(&text)? {
            self.apply(&k, &v)?;
        }
        Ok(self)
    }

    fn apply(&mut self, key: &str, v: &str) -> Result<(), CliError> {
        fn set<T>(slot: &mut Option<T>, value: T) {
            if slot.is_none() {
                *slot = Some(value);
            }
        }
        match key {
            "kernel" => set(&mut self.kernel, KernelKind::from_str(v, true).map_err(|_| bad(key, v))?),
            "n" => set(&mut self.n, list(key, v)?),
            "m" => set(&mut self.m, list(key, v)?),
            "alpha" => set(&mut self.alpha, one(key, v)?),
            "dim" => set(&mut self.dim, one(key, v)?),
            "box" => set(&mut self.box_, list(key, v)?),
            "grid" => set(&mut self.grid, list(key, v)?),
            "prec" => set(&mut self.prec, list(key, v)?),
            "example" => set(&mut self.example, one(key, v)?),
            "case" => set(&mut self.case, one(key, v)?),
            "density-file" => set(&mut self.density_file, PathBuf::from(v)),
            "out" => set(&mut self.out, PathBuf::from(v)),
            "lambda" => set(&mut self.lambda, one(key, v)?),
            "alg" => set(&mut self.alg, one(key, v)?),
            "table" => set(&mut self.table, one(key, v)?),
            "sizes" => set(&mut self.sizes, list(key, v)?),
            "ni" => set(&mut self.ni, one(key, v)?),
            "instances" => set(&mut self.instances, one(key, v)?),
            "inject" => set(&mut self.inject, Inject::from_str(v, true).map_err(|_| bad(key, v))?),
            "large" => self.large |= flag(key, v)?,
            "csv" => self.csv |= flag(key, v)?,
            _ => return Err(CliError::Config(format!("unknown config key {key:?}"))),
        }
        Ok(())
    }

    /// The single precision preset of a solve or energy run.
    pub fn single_prec(&self) -> Result<u8, CliError> {
        match self.prec.as_deref() {
            None => Ok(1),
            Some([p]) if *p <= 1 => Ok(*p),
            Some(_) => Err(CliError::Config("prec must be a single value 0 or 1".into())),
        }
    }

    pub fn out_path(&self) -> Result<&Path, CliError> {
        self.out.as_deref().ok_or_else(|| CliError::Usage("--out PATH is required".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_parsing() {
        let map = parse_file("# comment\nexample = 1\n\ndensity_file=a.bin # trailing\n").unwrap();
        assert_eq!(map["example"], "1");
        assert_eq!(map["density-file"], "a.bin");
        assert!(parse_file("nonsense").is_err());
    }

    #[test]
    fn flags_win_over_file() {
        let mut args = RunArgs { example: Some(2), ..RunArgs::default() };
        args.apply("example", "3").unwrap();
        args.apply("grid", "32,32").unwrap();
        args.apply("kernel", "dipole25d").unwrap();
        assert_eq!(args.example, Some(2));
        assert_eq!(args.grid, Some(vec![32, 32]));
        assert_eq!(args.kernel, Some(KernelKind::Dipole25d));
        assert!(matches!(args.apply("colour", "red"), Err(CliError::Config(_))));
        assert!(matches!(args.apply("alpha", "x"), Err(CliError::Config(_))));
    }

    #[test]
    fn prec_selection() {
        assert_eq!(RunArgs::default().single_prec().unwrap(), 1);
        let args = RunArgs { prec: Some(vec![0, 1]), ..RunArgs::default() };
        assert!(args.single_prec().is_err());
    }
}
