//! The `erw` command line.
//!
//! Each subcommand resolves its settings with precedence flag > config file >
//! default, runs on a local rayon pool, and renders one artifact. Every
//! artifact repeats the resolved settings: CSV as leading `# key=value`
//! lines, JSON under a `config` object. The worker count is left out of the
//! echo because it never changes results.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Display;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::coefficients::{ratios_at, CoefficientTable, Regime, WalkParams};
use crate::error::ErwError;
use crate::martingale::{qv_deviation_mc, FirstIncrement};
use crate::rates::{w1_scan_exact_with_ceiling, w1_scan_mc, RateReport};
use crate::rng::{derive_seed, DEFAULT_SEED};
use crate::verify::{run_suite, VerifySizes};
use crate::walk::{
    exact_distribution_with_ceiling, normalize_distribution, simulate_terminal, SimMode,
    DEFAULT_DP_CEILING,
};

pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "erw", version, about = "Elephant random walk experiments")]
pub struct Cli {
    /// Worker threads (falls back to ERW_THREADS, then all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Flat key=value file supplying defaults for any flag.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write the artifact here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate a_k, v_k and their asymptotic ratios.
    Coeffs(CoeffsArgs),
    /// Monte Carlo terminal positions.
    Simulate(SimulateArgs),
    /// Exact law of S_n.
    Exact(ExactArgs),
    /// Mean deviation of the normalized quadratic variation from 1.
    QvScan(QvScanArgs),
    /// W1 against the regime rate over a list of horizons.
    RateScan(RateScanArgs),
    /// Run the invariant suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct CoeffsArgs {
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    n: Option<u64>,
    /// Emit every stride-th k (k = n is always included).
    #[arg(long)]
    stride: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    reps: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Sample the copy/flip mechanism over the full history.
    #[arg(long)]
    literal: bool,
    #[arg(long, value_enum)]
    emit: Option<Emit>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Samples,
    Summary,
}

#[derive(Debug, Args)]
pub struct ExactArgs {
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    n: Option<u64>,
    /// Report atoms on the a_n S_n / sqrt(v_n) scale.
    #[arg(long)]
    normalize: bool,
    /// Subtract 2q - 1 before scaling.
    #[arg(long, requires = "normalize")]
    center: bool,
    #[arg(long)]
    dp_ceiling: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Convention {
    Unit,
    Exact,
}

#[derive(Debug, Args)]
pub struct QvScanArgs {
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    n_list: Option<String>,
    #[arg(long)]
    reps: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Variance charged to the first step.
    #[arg(long, value_enum)]
    convention: Option<Convention>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScanModeArg {
    Exact,
    Mc,
}

#[derive(Debug, Args)]
pub struct RateScanArgs {
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    n_list: Option<String>,
    #[arg(long, value_enum)]
    mode: Option<ScanModeArg>,
    #[arg(long)]
    reps: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    center: bool,
    #[arg(long)]
    dp_ceiling: Option<u64>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Smaller problem sizes.
    #[arg(long)]
    quick: bool,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Erw(#[from] ErwError),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0} verification check(s) failed")]
    VerifyFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Erw(ErwError::ResourceLimit { .. }) => EXIT_RESOURCE,
            CliError::Erw(ErwError::NoiseFloor(_)) => EXIT_FAILURE,
            CliError::Erw(_) => EXIT_USAGE,
            CliError::Io(_) | CliError::VerifyFailed(_) => EXIT_FAILURE,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

const CONFIG_KEYS: &[&str] = &[
    "p",
    "q",
    "n",
    "stride",
    "reps",
    "seed",
    "literal",
    "emit",
    "normalize",
    "center",
    "dp-ceiling",
    "n-list",
    "convention",
    "mode",
    "quick",
    "threads",
    "out",
    "format",
];

/// Parses a flat `key = value` file; `#` starts a comment line.
pub fn parse_config(text: &str) -> CliResult<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key=value", i + 1)))?;
        let key = key.trim().replace('_', "-");
        if !CONFIG_KEYS.contains(&key.as_str()) {
            return Err(CliError::Usage(format!(
                "config line {}: unknown key '{key}'",
                i + 1
            )));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

/// Applies flag > config > default and records what was chosen.
struct Resolver {
    file: BTreeMap<String, String>,
    echo: BTreeMap<String, String>,
}

impl Resolver {
    fn from_config(file: BTreeMap<String, String>) -> Self {
        Resolver {
            file,
            echo: BTreeMap::new(),
        }
    }

    fn lookup<T: FromStr>(&self, key: &str) -> CliResult<Option<T>> {
        match self.file.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|_| CliError::Usage(format!("config: bad value '{raw}' for {key}"))),
        }
    }

    fn value<T: FromStr + Display>(
        &mut self,
        key: &str,
        flag: Option<T>,
        default: Option<T>,
    ) -> CliResult<T> {
        let chosen = match flag {
            Some(v) => Some(v),
            None => self.lookup(key)?.or(default),
        };
        let v = chosen.ok_or_else(|| CliError::Usage(format!("missing required --{key}")))?;
        self.echo.insert(key.to_string(), v.to_string());
        Ok(v)
    }

    fn switch(&mut self, key: &str, flag: bool) -> CliResult<bool> {
        let v = flag || self.lookup::<bool>(key)?.unwrap_or(false);
        self.echo.insert(key.to_string(), v.to_string());
        Ok(v)
    }

    fn choice<T: ValueEnum>(&mut self, key: &str, flag: Option<T>, default: T) -> CliResult<T> {
        let v = match flag {
            Some(v) => v,
            None => match self.file.get(key) {
                Some(raw) => T::from_str(raw, true)
                    .map_err(|_| CliError::Usage(format!("config: bad value '{raw}' for {key}")))?,
                None => default,
            },
        };
        let name = v
            .to_possible_value()
            .expect("no skipped variants")
            .get_name()
            .to_string();
        self.echo.insert(key.to_string(), name);
        Ok(v)
    }

    fn walk_params(
        &mut self,
        p: Option<f64>,
        q: Option<f64>,
        n: Option<u64>,
    ) -> CliResult<WalkParams> {
        let p = self.value("p", p, None)?;
        let q = self.value("q", q, None)?;
        let n = self.value("n", n, None)?;
        Ok(WalkParams::new(p, q, n)?)
    }
}

fn parse_n_list(raw: &str) -> CliResult<Vec<u64>> {
    raw.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("--n-list: '{t}' is not a positive integer")))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Empty,
}

impl Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Float(v) => write!(f, "{v}"),
            Cell::Empty => Ok(()),
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Cell::Int(v) => s.serialize_i64(*v),
            Cell::Float(v) => s.serialize_f64(*v),
            Cell::Empty => s.serialize_none(),
        }
    }
}

pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

/// One rendered output with its settings echo.
pub enum Artifact {
    Table(Table),
    Json(Value),
}

pub fn render_csv(config: &BTreeMap<String, String>, table: &Table) -> String {
    let mut out = String::new();
    for (k, v) in config {
        out.push_str(&format!("# {k}={v}\n"));
    }
    out.push_str(&table.columns.join(","));
    out.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(Cell::to_string).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn render_json(config: &BTreeMap<String, String>, body: Value) -> String {
    let mut obj = match body {
        Value::Object(m) => m,
        other => {
            let mut m = serde_json::Map::new();
            m.insert("result".into(), other);
            m
        }
    };
    obj.insert("config".into(), json!(config));
    let mut s = serde_json::to_string_pretty(&Value::Object(obj)).expect("serializable");
    s.push('\n');
    s
}

fn table_json(table: &Table) -> Value {
    json!({ "columns": table.columns, "rows": table.rows })
}

fn coeffs(args: &CoeffsArgs, r: &mut Resolver) -> CliResult<Table> {
    let p = r.value("p", args.p, None)?;
    let n = r.value("n", args.n, None)?;
    let stride = r.value("stride", args.stride, Some(1))?;
    if n == 0 || stride == 0 {
        return Err(CliError::Usage("--n and --stride must be positive".into()));
    }
    let table = CoefficientTable::new(p, n)?;
    let supercritical = Regime::of(p) == Regime::Superdiffusive;
    let mut ks: Vec<u64> = (1..=n).step_by(stride as usize).collect();
    if *ks.last().unwrap() != n {
        ks.push(n);
    }
    let rows = ks
        .into_iter()
        .map(|k| {
            let ku = k as usize;
            let (a_ratio, v_ratio) = if k >= 2 && !supercritical {
                let r = ratios_at(&table, ku).expect("k within table");
                (Cell::Float(r.a_ratio), Cell::Float(r.v_ratio))
            } else {
                (Cell::Empty, Cell::Empty)
            };
            vec![
                Cell::Int(k as i64),
                Cell::Float(table.a(ku)),
                Cell::Float(table.v(ku)),
                a_ratio,
                v_ratio,
            ]
        })
        .collect();
    Ok(Table {
        columns: vec!["k", "a_k", "v_k", "a_ratio", "v_ratio"],
        rows,
    })
}

/// Summary of `reps` terminal positions. Normalized values are `a_n S_n / √v_n`.
#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
struct SimulateSummary {
    reps: u64,
    mean: f64,
    variance: f64,
    normalized_mean: f64,
    normalized_variance: f64,
    /// Raw moments of orders 1 to 4 on the normalized scale.
    normalized_moments: [f64; 4],
}

fn summarize(samples: &[i64], table: &CoefficientTable) -> SimulateSummary {
    let m = samples.len() as f64;
    let mean = samples.iter().map(|&s| s as f64).sum::<f64>() / m;
    let variance = if samples.len() > 1 {
        samples
            .iter()
            .map(|&s| (s as f64 - mean).powi(2))
            .sum::<f64>()
            / (m - 1.0)
    } else {
        0.0
    };
    let scale = table.a_n() / table.v_n().sqrt();
    let mut moments = [0.0; 4];
    for &s in samples {
        let x = scale * s as f64;
        let mut pw = 1.0;
        for mo in moments.iter_mut() {
            pw *= x;
            *mo += pw;
        }
    }
    moments.iter_mut().for_each(|mo| *mo /= m);
    SimulateSummary {
        reps: samples.len() as u64,
        mean,
        variance,
        normalized_mean: scale * mean,
        normalized_variance: scale * scale * variance,
        normalized_moments: moments,
    }
}

fn simulate(args: &SimulateArgs, r: &mut Resolver, format: Option<Format>) -> CliResult<Artifact> {
    let params = r.walk_params(args.p, args.q, args.n)?;
    let reps = r.value("reps", args.reps, Some(10_000))?;
    let seed = r.value("seed", args.seed, Some(DEFAULT_SEED))?;
    let literal = r.switch("literal", args.literal)?;
    let emit = r.choice("emit", args.emit, Emit::Samples)?;
    if reps == 0 {
        return Err(CliError::Usage("--reps must be positive".into()));
    }
    if emit == Emit::Summary && format == Some(Format::Csv) {
        return Err(CliError::Usage(
            "--emit summary is JSON only; drop --format csv".into(),
        ));
    }
    let mode = if literal {
        SimMode::Literal
    } else {
        SimMode::Marginal
    };
    let samples = simulate_terminal(&params, mode, reps, seed);
    Ok(match emit {
        Emit::Samples => Artifact::Table(Table {
            columns: vec!["replicate", "s_n"],
            rows: samples
                .iter()
                .enumerate()
                .map(|(i, &s)| vec![Cell::Int(i as i64), Cell::Int(s)])
                .collect(),
        }),
        Emit::Summary => {
            let table = CoefficientTable::new(params.p, params.n)?;
            Artifact::Json(json!({ "summary": summarize(&samples, &table) }))
        }
    })
}

fn exact(args: &ExactArgs, r: &mut Resolver) -> CliResult<Table> {
    let params = r.walk_params(args.p, args.q, args.n)?;
    let normalize = r.switch("normalize", args.normalize)?;
    let center = r.switch("center", args.center)?;
    let ceiling = r.value("dp-ceiling", args.dp_ceiling, Some(DEFAULT_DP_CEILING))?;
    if center && !normalize {
        return Err(CliError::Usage(
            "center only applies together with normalize".into(),
        ));
    }
    let mut law = exact_distribution_with_ceiling(&params, ceiling)?;
    if normalize {
        let table = CoefficientTable::new(params.p, params.n)?;
        law = normalize_distribution(&law, &table, params.q, center)?;
    }
    let rows = law
        .iter()
        .map(|(x, w)| {
            let atom = if normalize {
                Cell::Float(x)
            } else {
                Cell::Int(x as i64)
            };
            vec![atom, Cell::Float(w)]
        })
        .collect();
    Ok(Table {
        columns: vec!["atom", "weight"],
        rows,
    })
}

fn qv_scan(args: &QvScanArgs, r: &mut Resolver) -> CliResult<Table> {
    let p = r.value("p", args.p, None)?;
    let q = r.value("q", args.q, None)?;
    let raw = r.value("n-list", args.n_list.clone(), None)?;
    let reps = r.value("reps", args.reps, Some(10_000))?;
    let seed = r.value("seed", args.seed, Some(DEFAULT_SEED))?;
    let convention = match r.choice("convention", args.convention, Convention::Unit)? {
        Convention::Unit => FirstIncrement::Unit,
        Convention::Exact => FirstIncrement::Exact,
    };
    let mut rows = Vec::new();
    for n in parse_n_list(&raw)? {
        let params = WalkParams::new(p, q, n)?;
        let est = qv_deviation_mc(&params, reps, derive_seed(seed, n), convention)?;
        rows.push(vec![
            Cell::Int(n as i64),
            Cell::Float(est.mean),
            Cell::Float(est.stderr),
        ]);
    }
    Ok(Table {
        columns: vec!["n", "mean_abs_dev", "stderr"],
        rows,
    })
}

fn rate_table(report: &RateReport) -> Table {
    let rows = (0..report.ns.len())
        .map(|i| {
            vec![
                Cell::Int(report.ns[i] as i64),
                Cell::Float(report.w1[i]),
                Cell::Float(report.rate[i]),
                Cell::Float(report.ratio[i]),
            ]
        })
        .collect();
    Table {
        columns: vec!["n", "w1", "rate", "ratio"],
        rows,
    }
}

fn rate_scan(args: &RateScanArgs, r: &mut Resolver) -> CliResult<RateReport> {
    let p = r.value("p", args.p, None)?;
    let q = r.value("q", args.q, None)?;
    let raw = r.value("n-list", args.n_list.clone(), None)?;
    let ns = parse_n_list(&raw)?;
    let mode = r.choice("mode", args.mode, ScanModeArg::Exact)?;
    let center = r.switch("center", args.center)?;
    Ok(match mode {
        ScanModeArg::Exact => {
            let ceiling = r.value("dp-ceiling", args.dp_ceiling, Some(DEFAULT_DP_CEILING))?;
            w1_scan_exact_with_ceiling(p, q, &ns, center, ceiling)?
        }
        ScanModeArg::Mc => {
            let reps = r.value("reps", args.reps, Some(100_000))?;
            let seed = r.value("seed", args.seed, Some(DEFAULT_SEED))?;
            w1_scan_mc(p, q, &ns, reps, seed, center)?
        }
    })
}

fn resolve_threads(flag: Option<usize>, file: &BTreeMap<String, String>) -> CliResult<usize> {
    if let Some(t) = flag {
        return Ok(t);
    }
    if let Some(raw) = file.get("threads") {
        return raw
            .parse()
            .map_err(|_| CliError::Usage(format!("config: bad value '{raw}' for threads")));
    }
    match std::env::var("ERW_THREADS") {
        Ok(raw) => raw
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("ERW_THREADS: '{raw}' is not a thread count"))),
        Err(_) => Ok(0),
    }
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, text)?;
    Ok(())
}

/// Runs a parsed command line, writing to `stdout` unless `--out` is set.
pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> CliResult<()> {
    let file = match &cli.config {
        Some(path) => parse_config(&std::fs::read_to_string(path)?)?,
        None => BTreeMap::new(),
    };
    let threads = resolve_threads(cli.threads, &file)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {threads} workers: {e}")))?;
    let mut r = Resolver::from_config(file);
    let out = match &cli.out {
        Some(p) => Some(p.clone()),
        None => r.lookup::<PathBuf>("out")?,
    };
    let format_cfg =
        match cli.format {
            Some(f) => Some(f),
            None => match r.file.get("format") {
                Some(raw) => Some(Format::from_str(raw, true).map_err(|_| {
                    CliError::Usage(format!("config: bad value '{raw}' for format"))
                })?),
                None => None,
            },
        };

    enum Outcome {
        Rendered(&'static str, Artifact),
        Report(String, usize),
        Written,
    }
    let outcome = pool.install(|| -> CliResult<Outcome> {
        Ok(match &cli.command {
            Command::Coeffs(a) => Outcome::Rendered("coeffs", Artifact::Table(coeffs(a, &mut r)?)),
            Command::Simulate(a) => Outcome::Rendered("simulate", simulate(a, &mut r, format_cfg)?),
            Command::Exact(a) => Outcome::Rendered("exact", Artifact::Table(exact(a, &mut r)?)),
            Command::QvScan(a) => {
                Outcome::Rendered("qv-scan", Artifact::Table(qv_scan(a, &mut r)?))
            }
            Command::RateScan(a) => {
                let path = out
                    .clone()
                    .ok_or_else(|| CliError::Usage("rate-scan needs --out <path>".into()))?;
                let report = rate_scan(a, &mut r)?;
                r.echo.insert("command".into(), "rate-scan".into());
                let body = json!({ "report": report });
                write_file(&path.with_extension("json"), &render_json(&r.echo, body))?;
                write_file(
                    &path.with_extension("csv"),
                    &render_csv(&r.echo, &rate_table(&report)),
                )?;
                Outcome::Written
            }
            Command::Verify(a) => {
                let quick = r.switch("quick", a.quick)?;
                let seed = r.value("seed", a.seed, Some(DEFAULT_SEED))?;
                let sizes = if quick {
                    VerifySizes::quick()
                } else {
                    VerifySizes::full()
                };
                let report = run_suite(sizes, seed);
                let failed = report.iter().filter(|c| !c.passed).count();
                r.echo.insert("command".into(), "verify".into());
                let text = if format_cfg == Some(Format::Json) {
                    render_json(&r.echo, json!({ "checks": report, "passed": failed == 0 }))
                } else {
                    report
                        .iter()
                        .map(|c| {
                            let tag = if c.passed { "pass" } else { "FAIL" };
                            format!("{tag}  {}  ({})\n", c.name, c.detail)
                        })
                        .collect()
                };
                Outcome::Report(text, failed)
            }
        })
    })?;
    let text = match outcome {
        Outcome::Written => return Ok(()),
        Outcome::Report(text, failed) => {
            emit(out.as_deref(), stdout, &text)?;
            return if failed > 0 {
                Err(CliError::VerifyFailed(failed))
            } else {
                Ok(())
            };
        }
        Outcome::Rendered(name, artifact) => {
            r.echo.insert("command".into(), name.into());
            match (artifact, format_cfg) {
                (Artifact::Table(t), Some(Format::Json)) => render_json(&r.echo, table_json(&t)),
                (Artifact::Table(t), _) => render_csv(&r.echo, &t),
                (Artifact::Json(v), _) => render_json(&r.echo, v),
            }
        }
    };
    emit(out.as_deref(), stdout, &text)
}

fn emit(out: Option<&Path>, stdout: &mut dyn Write, text: &str) -> CliResult<()> {
    match out {
        Some(path) => write_file(path, text),
        None => {
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

/// Parses `args`, runs, reports errors on stderr and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match execute(&cli, &mut lock) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("erw: {e}");
            e.exit_code()
        }
    }
}
