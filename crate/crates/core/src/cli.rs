//! Command-line front end: `gen`, `estimate`, `bench` and `report`.
//!
//! Exit status is 0 on success, 1 on internal failure and 2 on bad flags
//! or bad input data.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bench::ingest::{ingest_csv, DatasetRecord, IngestOptions, LabelColumn, Preprocessing};
use crate::bench::run::{run_method, write_runs_csv, BenchResult};
use crate::bench::suites::{self, standard_methods, SuiteOptions, SuiteReport};
use crate::bench::synth::{generate, ComponentSpec, SyntheticSpec};
use crate::bench::xmeans::{xmeans_baseline, XMeansConfig};
use crate::error::Error;
use crate::search::LoopLimits;
use crate::sphere::UnitVector;
use crate::sxmeans::Method;

#[derive(Debug, Parser)]
#[command(name = "sxmeans", version, about = "Estimate the number of clusters on the unit hypersphere")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a vMF mixture to CSV.
    Gen(GenArgs),
    /// Estimate k for a CSV of points.
    Estimate(EstimateArgs),
    /// Run a benchmark suite.
    Bench(BenchArgs),
    /// Re-render the Markdown table of a bench output directory.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
    /// `n,kappa[,mu_1,...,mu_d]`; repeat once per component. Without mu the
    /// direction is drawn uniformly.
    #[arg(long = "component", required = true, allow_hyphen_values = true)]
    pub components: Vec<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Points CSV.
    #[arg(long)]
    pub out: PathBuf,
    /// Labels CSV; defaults to `<out stem>.labels.csv` beside the points.
    #[arg(long)]
    pub labels: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Sx,
    Fixed,
    Xmeans,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = Mode::Sx)]
    pub mode: Mode,
    /// Concentration for `--mode fixed`.
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Subtract column means before anything else.
    #[arg(long)]
    pub center: bool,
    /// Scale rows to unit length (ignored by xmeans).
    #[arg(long)]
    pub normalize: bool,
    /// `last`, a zero-based index, or a header name; the column is excluded
    /// from the features.
    #[arg(long)]
    pub label_column: Option<LabelColumn>,
    #[arg(long, default_value_t = 2)]
    pub initial_k: usize,
    #[arg(long)]
    pub max_k: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Report JSON.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Table3,
    Table5,
    Custom,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    #[arg(long, default_value_t = 20)]
    pub runs: usize,
    #[arg(long, default_value_t = 0)]
    pub base_seed: u64,
    /// Directory holding `<name>.csv` files for table5.
    #[arg(long)]
    pub datasets_dir: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Comma-separated methods: `sx`, `fixed:<kappa>`, `xmeans`.
    #[arg(long, value_delimiter = ',')]
    pub methods: Option<Vec<String>>,
    /// Custom suite: true k values.
    #[arg(long, value_delimiter = ',', default_value = "2,3,4,5,6")]
    pub true_k: Vec<usize>,
    /// Custom suite: points per cluster.
    #[arg(long, default_value_t = 500)]
    pub n_per_cluster: usize,
    /// Custom suite: concentration of every cluster.
    #[arg(long, default_value_t = 100.0)]
    pub kappa: f64,
    /// Custom suite: dimension.
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
    #[arg(long, default_value_t = 2)]
    pub initial_k: usize,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// A directory written by `bench`.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Error with the exit status it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }

    fn internal(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: if e.is_input_error() { 2 } else { 1 },
            message: e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Reading user-supplied files: every failure is the user's input.
fn input_err(e: Error) -> Failure {
    Failure::input(e.to_string())
}

fn write_err(path: &Path) -> impl Fn(std::io::Error) -> Failure + '_ {
    move |e| Failure::internal(format!("cannot write {}: {e}", path.display()))
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let stdout = std::io::stdout();
    match run(cli.command, &mut stdout.lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

pub fn run<W: Write>(command: Command, out: &mut W) -> CliResult<()> {
    match command {
        Command::Gen(a) => cmd_gen(&a, out),
        Command::Estimate(a) => cmd_estimate(&a, out),
        Command::Bench(a) => cmd_bench(&a, out),
        Command::Report(a) => cmd_report(&a, out),
    }
}

fn parse_component(text: &str, dim: usize) -> CliResult<ComponentSpec> {
    let bad = |why: &str| Failure::input(format!("--component '{text}': {why}"));
    let fields: Vec<&str> = text.split(',').map(str::trim).collect();
    if fields.len() < 2 {
        return Err(bad("expected n,kappa[,mu...]"));
    }
    let n = fields[0].parse().map_err(|_| bad("n is not a count"))?;
    let kappa = fields[1].parse().map_err(|_| bad("kappa is not a number"))?;
    let mu = if fields.len() > 2 {
        let v = fields[2..]
            .iter()
            .map(|f| f.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| bad("mu has a non-numeric entry"))?;
        if v.len() != dim {
            return Err(bad(&format!("mu has {} entries, --dim is {dim}", v.len())));
        }
        let u = crate::sphere::normalize(&v).map_err(|e| bad(&e.to_string()))?;
        Some(UnitVector::new(u.into_inner())?)
    } else {
        None
    };
    Ok(ComponentSpec { n, mu, kappa })
}

fn labels_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.labels.csv"))
}

fn cmd_gen<W: Write>(a: &GenArgs, out: &mut W) -> CliResult<()> {
    let components = a
        .components
        .iter()
        .map(|c| parse_component(c, a.dim))
        .collect::<CliResult<Vec<_>>>()?;
    let spec = SyntheticSpec { d: a.dim, components, seed: a.seed };
    let data = generate(&spec).map_err(input_err)?;

    let mut w = csv::Writer::from_path(&a.out).map_err(|e| Failure::internal(e.to_string()))?;
    let header: Vec<String> = (1..=a.dim).map(|i| format!("x{i}")).collect();
    let csv_err = |e: csv::Error| Failure::internal(e.to_string());
    w.write_record(&header).map_err(csv_err)?;
    for p in data.points.iter() {
        w.write_record(p.as_slice().iter().map(|v| v.to_string())).map_err(csv_err)?;
    }
    w.flush().map_err(write_err(&a.out))?;

    let lpath = a.labels.clone().unwrap_or_else(|| labels_path(&a.out));
    let mut w = csv::Writer::from_path(&lpath).map_err(csv_err)?;
    w.write_record(["label"]).map_err(csv_err)?;
    for l in &data.labels {
        w.write_record([l.to_string()]).map_err(csv_err)?;
    }
    w.flush().map_err(write_err(&lpath))?;

    let record = DatasetRecord {
        name: a.out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
        n: data.points.len(),
        d: a.dim,
        true_k: Some(data.true_k()),
        preprocessing: Preprocessing { centered: false, normalized: true },
    };
    writeln!(out, "{}", ser(&record)?).map_err(|e| Failure::internal(e.to_string()))
}

fn cmd_estimate<W: Write>(a: &EstimateArgs, out: &mut W) -> CliResult<()> {
    let method = match (a.mode, a.kappa) {
        (Mode::Fixed, Some(kappa)) => Method::Fixed { kappa },
        (Mode::Fixed, None) => return Err(Failure::input("--mode fixed requires --kappa")),
        (_, Some(_)) => return Err(Failure::input("--kappa is only valid with --mode fixed")),
        (Mode::Sx, None) => Method::Sx,
        (Mode::Xmeans, None) => Method::Xmeans,
    };
    let normalize = if a.mode == Mode::Xmeans && a.normalize {
        eprintln!("warning: --normalize is ignored by xmeans, which works on raw rows");
        false
    } else {
        a.normalize
    };
    let options = IngestOptions {
        center: a.center,
        normalize,
        label_column: a.label_column.clone(),
        ..Default::default()
    };
    let data = ingest_csv(&a.input, &options)
        .map_err(|e| Failure::input(format!("{}: {e}", a.input.display())))?;
    if data.dropped > 0 {
        eprintln!("warning: dropped {} rows that were zero after centering", data.dropped);
    }
    let limits = LoopLimits { initial_k: a.initial_k, max_k: a.max_k, ..LoopLimits::default() };
    let report = if method == Method::Xmeans {
        let raw = data.raw().map_err(input_err)?;
        xmeans_baseline(&raw, &XMeansConfig { limits, seed: a.seed, ..Default::default() })?
    } else {
        // sx requires unit rows; non-unit rows are normalized on load
        let unit = data.point_set().map_err(input_err)?;
        run_method(method, &unit, None, limits, a.seed)?
    };
    if let Some(path) = &a.output {
        fs::write(path, ser(&report)? + "\n").map_err(write_err(path))?;
    }
    writeln!(out, "{}", report.k).map_err(|e| Failure::internal(e.to_string()))
}

fn parse_method(text: &str) -> CliResult<Method> {
    let t = text.trim();
    match t {
        "sx" => Ok(Method::Sx),
        "xmeans" => Ok(Method::Xmeans),
        _ => t
            .strip_prefix("fixed:")
            .and_then(|k| k.parse().ok())
            .map(|kappa| Method::Fixed { kappa })
            .ok_or_else(|| Failure::input(format!("unknown method '{t}'"))),
    }
}

fn cmd_bench<W: Write>(a: &BenchArgs, out: &mut W) -> CliResult<()> {
    if a.runs == 0 {
        return Err(Failure::input("--runs must be at least 1"));
    }
    let methods = match &a.methods {
        Some(m) => m.iter().map(|s| parse_method(s)).collect::<CliResult<Vec<_>>>()?,
        None => standard_methods(),
    };
    let opts = SuiteOptions {
        runs: a.runs,
        base_seed: a.base_seed,
        methods,
        limits: LoopLimits { initial_k: a.initial_k, ..LoopLimits::default() },
    };
    let report = match a.suite {
        Suite::Table3 => suites::table3(&opts)?,
        Suite::Table5 => suites::table5(a.datasets_dir.as_deref(), &opts)?,
        Suite::Custom => suites::synthetic_suite("custom", &a.true_k, a.n_per_cluster, a.kappa, a.dim, &opts)?,
    };
    write_bench_dir(&a.out_dir, &report)?;
    write!(out, "{}", report.to_markdown()).map_err(|e| Failure::internal(e.to_string()))
}

fn cell_file_name(row: &suites::Row, method: &Method) -> String {
    match &row.dataset {
        Some(name) => format!("{name}_{}.json", method.slug()),
        None => format!("k{:02}_{}.json", row.true_k, method.slug()),
    }
}

/// `suite.json`, `cells/*.json`, `runs.csv` and `table.md`.
pub fn write_bench_dir(dir: &Path, report: &SuiteReport) -> CliResult<()> {
    let cells = dir.join("cells");
    fs::create_dir_all(&cells).map_err(write_err(&cells))?;
    for row in &report.rows {
        for (cell, method) in row.cells.iter().zip(&report.methods) {
            if let Some(result) = cell.result() {
                let path = cells.join(cell_file_name(row, method));
                fs::write(&path, ser(result)? + "\n").map_err(write_err(&path))?;
            }
        }
    }
    let path = dir.join("suite.json");
    fs::write(&path, ser(report)? + "\n").map_err(write_err(&path))?;
    let path = dir.join("runs.csv");
    let results: Vec<BenchResult> = report.results().cloned().collect();
    let file = fs::File::create(&path).map_err(write_err(&path))?;
    write_runs_csv(file, &results)?;
    let path = dir.join("table.md");
    fs::write(&path, report.to_markdown()).map_err(write_err(&path))
}

fn ser<T: serde::Serialize>(value: &T) -> CliResult<String> {
    serde_json::to_string_pretty(value).map_err(|e| Failure::internal(e.to_string()))
}

fn cmd_report<W: Write>(a: &ReportArgs, out: &mut W) -> CliResult<()> {
    let suite_path = a.input.join("suite.json");
    let report: SuiteReport = if suite_path.exists() {
        let text = fs::read_to_string(&suite_path).map_err(|e| Failure::input(e.to_string()))?;
        serde_json::from_str(&text).map_err(|e| Failure::input(format!("{}: {e}", suite_path.display())))?
    } else {
        let cells = a.input.join("cells");
        let mut paths: Vec<PathBuf> = fs::read_dir(&cells)
            .map_err(|e| Failure::input(format!("{}: {e}", cells.display())))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        paths.sort();
        let results = paths
            .iter()
            .map(|p| {
                let text = fs::read_to_string(p).map_err(|e| Failure::input(e.to_string()))?;
                serde_json::from_str(&text).map_err(|e| Failure::input(format!("{}: {e}", p.display())))
            })
            .collect::<CliResult<Vec<BenchResult>>>()?;
        if results.is_empty() {
            return Err(Failure::input(format!("no results under {}", a.input.display())));
        }
        SuiteReport::from_results("report", &results)
    };
    let md = report.to_markdown();
    if let Some(path) = &a.output {
        fs::write(path, &md).map_err(write_err(path))?;
    }
    write!(out, "{md}").map_err(|e| Failure::internal(e.to_string()))
}
