//! Command-line driver.
//!
//! Every command writes one file per interval size (plus summary files)
//! into `--out`. JSON files have the layout
//! `{"meta": {"model", "size", "epsilon", "l"}, "data": ...}` with floats
//! rounded to 12 significant digits; CSV tables carry a header row.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use faer::{c64, Mat};
use serde::Serialize;
use serde_json::{json, Value};

use crate::cft::ExactTable;
use crate::error::{Error, Result};
use crate::oracle::{self, OracleReport};
use crate::pipeline::{self, FitRun, Model, Preset, SpectrumRun, VirasoroRun};

/// Exit code for invalid input.
pub const EXIT_VALIDATION: u8 = 2;
/// Exit code for numerical failures, including oracle mismatches.
pub const EXIT_NUMERICAL: u8 = 3;

/// Entanglement spectra and lattice Virasoro generators of critical XY chains.
#[derive(Debug, Parser)]
#[command(name = "entvir", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Entanglement spectrum and rescaled dimensions per size.
    Spectrum(RunArgs),
    /// Cutoff and central charge from the gap and entropy over the ladder.
    FitEpsilon(RunArgs),
    /// Lattice H_n tables compared with the boundary CFT.
    Virasoro(RunArgs),
    /// Dense Fock-space cross-check; `--sizes` are interval lengths.
    Oracle(RunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Preset model point: ising, xy09 or xx.
    #[arg(long)]
    pub model: Option<Preset>,
    /// Transverse field of a custom critical point.
    #[arg(long, requires = "gamma", conflicts_with = "model")]
    pub lambda: Option<f64>,
    /// Anisotropy of a custom critical point.
    #[arg(long, requires = "lambda", conflicts_with = "model")]
    pub gamma: Option<f64>,
    /// Interval sizes 2N; defaults to the preset ladder.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Vec<usize>,
    /// Number of Schmidt states.
    #[arg(long = "K", default_value_t = pipeline::DEFAULT_STATES)]
    pub k: usize,
    /// Generator indices n.
    #[arg(long = "n", value_delimiter = ',', default_values_t = [0, 1, 2], allow_negative_numbers = true)]
    pub ns: Vec<i32>,
    /// Cutoff; fitted from the sizes (or the preset ladder) when absent.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Reserved; the computations are deterministic.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub model: Model,
    pub sizes: Vec<usize>,
    pub k: usize,
    pub ns: Vec<i32>,
    pub epsilon: Option<f64>,
    pub out: PathBuf,
    pub format: Format,
}

impl RunConfig {
    pub fn from_args(args: &RunArgs, oracle: bool) -> Result<Self> {
        let model = match (args.model, args.lambda, args.gamma) {
            (Some(p), _, _) => Model::preset(p),
            (None, Some(l), Some(g)) => Model::custom(l, g)?,
            _ => {
                return Err(Error::InvalidArgument(
                    "pass --model or both --lambda and --gamma".into(),
                ))
            }
        };
        let sizes = if !args.sizes.is_empty() {
            args.sizes.clone()
        } else if oracle {
            vec![2, 4, 6, 8, 10]
        } else {
            model.preset.map(Preset::ladder).ok_or_else(|| {
                Error::InvalidArgument("--sizes is required for a custom model".into())
            })?
        };
        for &s in &sizes {
            let valid = if oracle {
                s >= 2 && s % 2 == 0 && s <= oracle::MAX_SITES
            } else {
                s >= 4 && s % 2 == 0
            };
            if !valid {
                return Err(Error::InvalidArgument(format!("invalid size {s}")));
            }
        }
        if args.k == 0 {
            return Err(Error::InvalidArgument("--K must be at least 1".into()));
        }
        if args.ns.is_empty() {
            return Err(Error::InvalidArgument(
                "--n needs at least one value".into(),
            ));
        }
        Ok(Self {
            model,
            sizes,
            k: args.k,
            ns: args.ns.clone(),
            epsilon: args.epsilon,
            out: args.out.clone(),
            format: args.format,
        })
    }
}

/// Rounds every float to 12 significant digits.
fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64");
            let rounded: f64 = format!("{x:.11e}").parse().expect("round trip");
            serde_json::Number::from_f64(rounded).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_floats).collect()),
        Value::Object(o) => {
            Value::Object(o.into_iter().map(|(k, v)| (k, round_floats(v))).collect())
        }
        other => other,
    }
}

fn fmt_float(x: f64) -> String {
    let rounded: f64 = format!("{x:.11e}").parse().expect("round trip");
    format!("{rounded}")
}

fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

fn write_json(path: &Path, meta: Value, data: impl Serialize) -> Result<()> {
    let doc = round_floats(json!({ "meta": meta, "data": serde_json::to_value(data)? }));
    let mut s = serde_json::to_string_pretty(&doc)?;
    s.push('\n');
    write_atomic(path, &s)
}

fn meta(model: &Model, size: Option<usize>, epsilon: Option<f64>) -> Value {
    let l = match (size, epsilon) {
        (Some(s), Some(e)) => Some((s as f64 / e).ln()),
        _ => None,
    };
    json!({ "model": model.name, "size": size, "epsilon": epsilon, "l": l })
}

fn complex_rows(m: &Mat<c64>) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                .collect()
        })
        .collect()
}

fn csv_matrix(rows: &[Vec<f64>]) -> String {
    let mut s = String::from("α\\α'");
    for j in 0..rows.first().map_or(0, Vec::len) {
        let _ = write!(s, ",{}", j + 1);
    }
    s.push('\n');
    for (i, row) in rows.iter().enumerate() {
        let _ = write!(s, "{}", i + 1);
        for x in row {
            let _ = write!(s, ",{}", fmt_float(*x));
        }
        s.push('\n');
    }
    s
}

fn spectrum_files(cfg: &RunConfig, run: &SpectrumRun) -> Result<()> {
    let stem = cfg
        .out
        .join(format!("spectrum_{}_{}", cfg.model.name, run.size));
    match cfg.format {
        Format::Json => write_json(
            &stem.with_extension("json"),
            meta(&cfg.model, Some(run.size), Some(run.epsilon)),
            run,
        ),
        Format::Csv => {
            let mut s = String::from("alpha,energy,weight,h,occupation\n");
            for (st, h) in run.states.iter().zip(&run.dimensions) {
                let occ: Vec<String> = st.occupation.iter().map(|k| (k + 1).to_string()).collect();
                let _ = writeln!(
                    s,
                    "{},{},{},{},{}",
                    st.index + 1,
                    fmt_float(st.energy),
                    fmt_float(st.weight),
                    fmt_float(*h),
                    occ.join(" ")
                );
            }
            write_atomic(&stem.with_extension("csv"), &s)
        }
    }
}

fn fit_files(cfg: &RunConfig, run: &FitRun) -> Result<()> {
    let largest = run.fit.sizes.iter().copied().max();
    let path = cfg.out.join(format!("fit_{}", cfg.model.name));
    let points: Vec<(f64, f64)> = run
        .points
        .iter()
        .map(|p| ((p.size as f64).ln(), 1.0 / p.gap))
        .collect();
    match cfg.format {
        Format::Json => write_json(
            &path.with_extension("json"),
            meta(&cfg.model, largest, Some(run.fit.epsilon)),
            json!({
                "fit": run.fit,
                "central_charge": run.central_charge,
                "entropies": run.points.iter().map(|p| (p.size, p.entropy)).collect::<Vec<_>>(),
                "points": points.iter().map(|(x, y)| json!({ "x": x, "y": y })).collect::<Vec<_>>(),
            }),
        ),
        Format::Csv => {
            let mut s = String::from("size,log_size,inverse_gap,entropy\n");
            for (p, (x, y)) in run.points.iter().zip(&points) {
                let _ = writeln!(
                    s,
                    "{},{},{},{}",
                    p.size,
                    fmt_float(*x),
                    fmt_float(*y),
                    fmt_float(p.entropy)
                );
            }
            let _ = writeln!(
                s,
                "# epsilon={} slope={} intercept={} central_charge={}",
                fmt_float(run.fit.epsilon),
                fmt_float(run.fit.slope),
                fmt_float(run.fit.intercept),
                fmt_float(run.central_charge)
            );
            write_atomic(&path.with_extension("csv"), &s)
        }
    }
}

fn virasoro_files(cfg: &RunConfig, run: &VirasoroRun) -> Result<()> {
    let stem = format!("virasoro_{}_{}", cfg.model.name, run.size);
    match cfg.format {
        Format::Json => {
            let tables: Vec<Value> = run
                .comparisons
                .iter()
                .zip(&run.cft_tables)
                .map(|(c, exact): (_, &ExactTable)| {
                    json!({
                        "n": c.n,
                        "lattice": complex_rows(&c.lattice),
                        "aligned": complex_rows(&c.aligned),
                        "cft": c.cft,
                        "cft_exact": exact,
                        "raw_corrections": complex_rows(&c.raw_corrections),
                        "corrections": complex_rows(&c.corrections),
                        "gauge": c.gauge.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
                        "max_abs_correction": c.max_abs_correction(),
                    })
                })
                .collect();
            write_json(
                &cfg.out.join(format!("{stem}.json")),
                meta(&cfg.model, Some(run.size), Some(run.epsilon)),
                json!({
                    "cft_dimensions": run.cft_dimensions,
                    "lattice_levels": run.levels,
                    "assignment": run.assignment.iter().map(|a| a + 1).collect::<Vec<_>>(),
                    "tables": tables,
                }),
            )
        }
        Format::Csv => {
            for c in &run.comparisons {
                let k = c.aligned.nrows();
                let re = |m: &Mat<c64>| -> Vec<Vec<f64>> {
                    (0..k)
                        .map(|i| (0..k).map(|j| m[(i, j)].re).collect())
                        .collect()
                };
                let abs = |m: &Mat<c64>| -> Vec<Vec<f64>> {
                    (0..k)
                        .map(|i| (0..k).map(|j| m[(i, j)].norm()).collect())
                        .collect()
                };
                write_atomic(
                    &cfg.out.join(format!("{stem}_H{}_aligned.csv", c.n)),
                    &csv_matrix(&re(&c.aligned)),
                )?;
                write_atomic(
                    &cfg.out.join(format!("{stem}_H{}_cft.csv", c.n)),
                    &csv_matrix(&c.cft),
                )?;
                write_atomic(
                    &cfg.out.join(format!("{stem}_H{}_F.csv", c.n)),
                    &csv_matrix(&abs(&c.corrections)),
                )?;
            }
            Ok(())
        }
    }
}

/// `|F|` against size for every (n, a, b), written across the ladder.
fn series_file(cfg: &RunConfig, runs: &[VirasoroRun], epsilon: f64) -> Result<()> {
    let mut entries = Vec::new();
    for &n in &cfg.ns {
        for a in 0..cfg.k {
            for b in 0..cfg.k {
                let series = pipeline::correction_series(runs, n, a, b)?;
                entries.push((n, a, b, series));
            }
        }
    }
    let path = cfg.out.join(format!("corrections_{}", cfg.model.name));
    let largest = runs.iter().map(|r| r.size).max();
    match cfg.format {
        Format::Json => write_json(
            &path.with_extension("json"),
            meta(&cfg.model, largest, Some(epsilon)),
            entries
                .iter()
                .map(|(n, a, b, s)| {
                    json!({
                        "n": n, "alpha": a + 1, "alpha_prime": b + 1,
                        "points": s.iter().map(|(size, f)| json!({ "size": size, "abs_f": f })).collect::<Vec<_>>(),
                    })
                })
                .collect::<Vec<_>>(),
        ),
        Format::Csv => {
            let mut s = String::from("n,alpha,alpha_prime,size,abs_f\n");
            for (n, a, b, series) in &entries {
                for (size, f) in series {
                    let _ = writeln!(s, "{n},{},{},{size},{}", a + 1, b + 1, fmt_float(*f));
                }
            }
            write_atomic(&path.with_extension("csv"), &s)
        }
    }
}

fn oracle_file(cfg: &RunConfig, report: &OracleReport) -> Result<()> {
    let path = cfg
        .out
        .join(format!("oracle_{}_{}.json", cfg.model.name, report.sites));
    write_json(
        &path,
        meta(&cfg.model, Some(report.sites), cfg.epsilon),
        report,
    )
}

/// Oracle cutoff when none is given; any positive value exercises the same code.
const ORACLE_EPSILON: f64 = 0.04;

/// Runs one command. Returns `Ok(false)` when the oracle reports a mismatch.
pub fn execute(command: &Command) -> Result<bool> {
    match command {
        Command::Spectrum(args) => {
            let cfg = RunConfig::from_args(args, false)?;
            let epsilon = pipeline::resolve_epsilon(&cfg.model, &cfg.sizes, cfg.epsilon)?;
            for &size in &cfg.sizes {
                let run = pipeline::run_spectrum(&cfg.model.params, size, cfg.k, epsilon)?;
                spectrum_files(&cfg, &run)?;
            }
            Ok(true)
        }
        Command::FitEpsilon(args) => {
            let cfg = RunConfig::from_args(args, false)?;
            fit_files(&cfg, &pipeline::run_fit(&cfg.model.params, &cfg.sizes)?)?;
            Ok(true)
        }
        Command::Virasoro(args) => {
            let cfg = RunConfig::from_args(args, false)?;
            let epsilon = pipeline::resolve_epsilon(&cfg.model, &cfg.sizes, cfg.epsilon)?;
            let tower = cfg.model.tower()?;
            let runs = pipeline::virasoro_ladder(
                &cfg.model.params,
                &tower,
                &cfg.sizes,
                cfg.k,
                &cfg.ns,
                epsilon,
            )?;
            for run in &runs {
                virasoro_files(&cfg, run)?;
            }
            series_file(&cfg, &runs, epsilon)?;
            Ok(true)
        }
        Command::Oracle(args) => {
            let cfg = RunConfig::from_args(args, true)?;
            let epsilon = cfg.epsilon.unwrap_or(ORACLE_EPSILON);
            let mut passed = true;
            for &sites in &cfg.sizes {
                let report = oracle::crosscheck(&cfg.model.params, sites, &cfg.ns, cfg.k, epsilon)?;
                oracle_file(&cfg, &report)?;
                passed &= report.passed;
            }
            Ok(passed)
        }
    }
}

/// Caps the global worker pool at `ENTVIR_THREADS` when set.
pub fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("ENTVIR_THREADS") {
        let n: usize = v.parse().ok().filter(|&n| n > 0).ok_or_else(|| {
            Error::InvalidArgument(format!(
                "ENTVIR_THREADS must be a positive integer, got '{v}'"
            ))
        })?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    }
    Ok(())
}

pub fn exit_code(result: &Result<bool>) -> ExitCode {
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_NUMERICAL),
        Err(e) if e.is_numerical() => ExitCode::from(EXIT_NUMERICAL),
        Err(_) => ExitCode::from(EXIT_VALIDATION),
    }
}

pub fn main_with<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_VALIDATION)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = configure_threads().and_then(|()| execute(&cli.command));
    match &result {
        Err(e) => eprintln!("error: {e}"),
        Ok(false) => eprintln!("error: oracle deviation exceeds {:e}", oracle::TOLERANCE),
        Ok(true) => {}
    }
    exit_code(&result)
}
