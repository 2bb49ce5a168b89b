//! Command-line front end.
//!
//! Five subcommands: `generate`, `metrics`, `boxdim`, `sweep`, `transition`.
//! An optional flat `key=value` config file mirrors the long flag names;
//! explicit flags always win over config values. Every output file starts
//! with `# `-prefixed header lines echoing the fully resolved configuration,
//! so any artifact can be regenerated from its own header.
//!
//! Exit codes: 0 success, 1 usage error (bad flags, missing or out-of-range
//! parameters), 2 runtime error (I/O, malformed inputs, disconnected graphs).

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::boxcover::{classify_fractality_with, nb_curve, FractalityReport, DEFAULT_R2_THRESHOLD};
use crate::error::Error;
use crate::experiments::{
    emit_csv, sweep_grid_jobs, transition_study, Axis, SweepSpec, DEFAULT_N_REPS,
};
use crate::graph::{read_edge_list, write_edge_list};
use crate::metrics::{metric_suite, MetricRecord};
use crate::models::{ModelSpec, DEFAULT_LOGISTIC_STEEPNESS};
use crate::plot::{emit_svg_contour, emit_svg_loglog};

#[derive(Parser, Debug)]
#[command(
    name = "fractalnet",
    version,
    about = "Fractal network models: generation, box-covering analysis, metrics and experiments"
)]
struct Cli {
    /// Flat key=value config file mirroring the long flag names; flags override it
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Worker threads for replicated experiments (default 1)
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Generate one model realisation and write it as an edge list
    Generate(GenerateArgs),
    /// Compute the seven structural metrics of an edge-list graph
    Metrics(MetricsArgs),
    /// Box-counting curve and fractality report for an edge-list graph
    Boxdim(BoxdimArgs),
    /// Replicated parameter sweep over one or two axes
    Sweep(SweepArgs),
    /// Fractal to small-world transition study (LSwTM over grids and p values)
    Transition(TransitionArgs),
}

/// Model parameters shared by `generate` and `sweep`.
#[derive(Args, Debug, Clone)]
struct ModelArgs {
    /// Model kind: shm, rbfm or lswtm
    #[arg(long)]
    model: Option<String>,

    /// Offspring factor (SHM/RBFM)
    #[arg(short = 'm', long = "m")]
    m: Option<u32>,

    /// Rewiring probability (SHM/LSwTM)
    #[arg(short = 'p', long = "p", allow_hyphen_values = true)]
    p: Option<f64>,

    /// Repulsion target in [0,1] (RBFM)
    #[arg(short = 'Y', long = "y", allow_hyphen_values = true)]
    y: Option<f64>,

    /// Iteration count (SHM/RBFM)
    #[arg(short = 't', long = "t")]
    t: Option<u32>,

    /// Grid dimensions, e.g. 32x32 (LSwTM)
    #[arg(long)]
    dims: Option<String>,

    /// Logistic steepness (LSwTM, default 10)
    #[arg(short = 'a', long = "a", allow_hyphen_values = true)]
    a: Option<f64>,

    /// RNG seed (default 0)
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[command(flatten)]
    model: ModelArgs,

    /// Output edge-list file
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct MetricsArgs {
    /// Input edge-list file
    #[arg(short = 'i', long)]
    input: Option<PathBuf>,

    /// Output CSV file
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BoxdimArgs {
    /// Input edge-list file
    #[arg(short = 'i', long)]
    input: Option<PathBuf>,

    /// Output CSV for the N_B(l_B) curve
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,

    /// Output CSV for the fractality report
    #[arg(long)]
    report: Option<PathBuf>,

    /// Optional log-log SVG of the curve
    #[arg(long)]
    svg: Option<PathBuf>,

    /// Greedy orderings per box size (default 10)
    #[arg(long)]
    n_orderings: Option<usize>,

    /// r² threshold for the fractal / non-fractal labels (default 0.98)
    #[arg(long, allow_hyphen_values = true)]
    r2_threshold: Option<f64>,

    /// RNG seed for the covering orderings (default 0)
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    model: ModelArgs,

    /// Sweep axis as name=v1,v2,... (repeat for a second axis)
    #[arg(long)]
    axis: Vec<String>,

    /// Replications per cell (default 30)
    #[arg(long)]
    n_reps: Option<usize>,

    /// Output CSV file
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,

    /// Metric column for an optional heatmap SVG
    #[arg(long)]
    contour_metric: Option<String>,

    /// Heatmap SVG output path (needs --contour-metric and two axes)
    #[arg(long)]
    contour_svg: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TransitionArgs {
    /// Comma-separated grid list, e.g. 16x16,32x32
    #[arg(long)]
    dims_list: Option<String>,

    /// Comma-separated rewiring probabilities, e.g. 0,0.05,0.1,1
    #[arg(long)]
    p_values: Option<String>,

    /// Logistic steepness (default 10)
    #[arg(short = 'a', long = "a", allow_hyphen_values = true)]
    a: Option<f64>,

    /// Replications per cell (default 10)
    #[arg(long)]
    n_reps: Option<usize>,

    /// Greedy orderings per box size (default 10)
    #[arg(long)]
    n_orderings: Option<usize>,

    /// Master seed (default 0)
    #[arg(long)]
    seed: Option<u64>,

    /// Output CSV file
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,

    /// Optional log-log SVG with one box-counting curve per cell
    #[arg(long)]
    curves_svg: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Runtime(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_) => CliError::Usage(e.to_string()),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Flat key=value file; '#' starts a comment line.
fn load_config(path: &Path) -> CliResult<HashMap<String, String>> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
    let mut map = HashMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            usage(format!(
                "{}:{}: expected key=value, got '{line}'",
                path.display(),
                lineno + 1
            ))
        })?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

/// Flag-over-config resolution for one option.
struct Resolver {
    cfg: HashMap<String, String>,
}

impl Resolver {
    fn get<T: std::str::FromStr>(&self, flag: Option<T>, key: &str) -> CliResult<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.cfg.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|_| usage(format!("config key '{key}': cannot parse '{raw}'"))),
        }
    }

    fn require<T: std::str::FromStr>(&self, flag: Option<T>, key: &str) -> CliResult<T> {
        self.get(flag, key)?
            .ok_or_else(|| usage(format!("missing required parameter --{key}")))
    }
}

fn parse_dims(text: &str) -> CliResult<Vec<usize>> {
    let dims: Option<Vec<usize>> = text
        .split('x')
        .map(|t| t.trim().parse::<usize>().ok().filter(|&n| n > 0))
        .collect();
    dims.filter(|d| !d.is_empty())
        .ok_or_else(|| usage(format!("bad dims '{text}', expected e.g. 32x32")))
}

fn parse_f64_list(text: &str) -> CliResult<Vec<f64>> {
    let vals: Option<Vec<f64>> = text.split(',').map(|t| t.trim().parse().ok()).collect();
    vals.filter(|v| !v.is_empty())
        .ok_or_else(|| usage(format!("bad value list '{text}'")))
}

fn parse_axis(text: &str) -> CliResult<Axis> {
    let (name, values) = text
        .split_once('=')
        .ok_or_else(|| usage(format!("bad axis '{text}', expected name=v1,v2,...")))?;
    Ok(Axis {
        param: name.trim().to_string(),
        values: parse_f64_list(values)?,
    })
}

/// Builds the ModelSpec from resolved flags, erroring on parameters that do
/// not belong to the chosen model.
fn resolve_model(r: &Resolver, args: &ModelArgs) -> CliResult<(ModelSpec, String)> {
    let model: String = r.require(args.model.clone(), "model")?;
    let seed = r.get(args.seed, "seed")?.unwrap_or(0);
    let m = r.get(args.m, "m")?;
    let p = r.get(args.p, "p")?;
    let y = r.get(args.y, "y")?;
    let t = r.get(args.t, "t")?;
    let a = r.get(args.a, "a")?;
    let dims = r.get(args.dims.clone(), "dims")?;

    let reject = |cond: bool, what: &str| -> CliResult<()> {
        if cond {
            Err(usage(format!("--{what} does not apply to model '{model}'")))
        } else {
            Ok(())
        }
    };
    let spec = match model.as_str() {
        "shm" => {
            reject(y.is_some(), "y")?;
            reject(dims.is_some(), "dims")?;
            reject(a.is_some(), "a")?;
            ModelSpec::Shm {
                m: r.require(m, "m")?,
                p: r.require(p, "p")?,
                t: r.require(t, "t")?,
                seed,
            }
        }
        "rbfm" => {
            reject(p.is_some(), "p")?;
            reject(dims.is_some(), "dims")?;
            reject(a.is_some(), "a")?;
            ModelSpec::Rbfm {
                m: r.require(m, "m")?,
                y: r.require(y, "y")?,
                t: r.require(t, "t")?,
                seed,
            }
        }
        "lswtm" => {
            reject(m.is_some(), "m")?;
            reject(y.is_some(), "y")?;
            reject(t.is_some(), "t")?;
            ModelSpec::Lswtm {
                dims: parse_dims(&r.require(dims, "dims")?)?,
                p: r.require(p, "p")?,
                a: a.unwrap_or(DEFAULT_LOGISTIC_STEEPNESS),
                seed,
            }
        }
        other => return Err(usage(format!("unknown model '{other}'"))),
    };
    Ok((spec, model))
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
}

fn cmd_generate(r: &Resolver, args: &GenerateArgs, jobs: usize) -> CliResult<()> {
    let (spec, _) = resolve_model(r, &args.model)?;
    let output: PathBuf = r.require(args.output.clone(), "output")?;
    let _ = jobs; // generation is a single realisation
    let g = spec.generate()?;
    let provenance = vec![
        format!("command=generate {}", spec.provenance()),
        format!("output={}", output.display()),
    ];
    write_edge_list(&g, &provenance, &output)?;
    Ok(())
}

fn cmd_metrics(r: &Resolver, args: &MetricsArgs) -> CliResult<()> {
    let input: PathBuf = r.require(args.input.clone(), "input")?;
    let output: PathBuf = r.require(args.output.clone(), "output")?;
    let (g, _) = read_edge_list(&input)?;
    let record = metric_suite(&g).map_err(|e| CliError::Runtime(e.to_string()))?;
    let mut out = String::new();
    let _ = writeln!(out, "# command=metrics input={}", input.display());
    let _ = writeln!(out, "{}", MetricRecord::CSV_HEADER);
    let _ = writeln!(out, "{}", record.to_csv_row());
    write_file(&output, &out)
}

fn cmd_boxdim(r: &Resolver, args: &BoxdimArgs, origin_cfg: &str) -> CliResult<()> {
    let input: PathBuf = r.require(args.input.clone(), "input")?;
    let output: PathBuf = r.require(args.output.clone(), "output")?;
    let report_path = r.get(args.report.clone(), "report")?;
    let svg_path = r.get(args.svg.clone(), "svg")?;
    let n_orderings = r.get(args.n_orderings, "n-orderings")?.unwrap_or(10);
    let threshold = r
        .get(args.r2_threshold, "r2-threshold")?
        .unwrap_or(DEFAULT_R2_THRESHOLD);
    let seed = r.get(args.seed, "seed")?.unwrap_or(0);

    let (g, _) = read_edge_list(&input)?;
    let curve = nb_curve(&g, seed, n_orderings).map_err(|e| CliError::Runtime(e.to_string()))?;
    let resolved = format!(
        "command=boxdim input={} seed={seed} n-orderings={n_orderings} \
r2-threshold={threshold}{origin_cfg}",
        input.display()
    );
    write_file(&output, &curve.to_csv(&[resolved.clone()]))?;

    if let Some(path) = report_path {
        let report: FractalityReport = classify_fractality_with(&curve, threshold)
            .map_err(|e| CliError::Runtime(e.to_string()))?;
        let text = format!(
            "# {resolved}\n{}\n{}\n",
            FractalityReport::CSV_HEADER,
            report.to_csv_row()
        );
        write_file(&path, &text)?;
    }
    if let Some(path) = svg_path {
        let label = input
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "graph".into());
        emit_svg_loglog(&[(label, curve)], &path)?;
    }
    Ok(())
}

fn cmd_sweep(r: &Resolver, args: &SweepArgs, jobs: usize) -> CliResult<()> {
    let (template, _) = resolve_model_with_axis_gaps(r, &args.model, &args.axis)?;
    let output: PathBuf = r.require(args.output.clone(), "output")?;
    let n_reps = r.get(args.n_reps, "n-reps")?.unwrap_or(DEFAULT_N_REPS);

    let axis_texts: Vec<String> = if args.axis.is_empty() {
        match r.cfg.get("axis") {
            Some(raw) => raw.split(';').map(|s| s.trim().to_string()).collect(),
            None => vec![],
        }
    } else {
        args.axis.clone()
    };
    if axis_texts.is_empty() {
        return Err(usage("sweep needs at least one --axis name=v1,v2,..."));
    }
    let axes: Vec<Axis> = axis_texts
        .iter()
        .map(|t| parse_axis(t))
        .collect::<CliResult<_>>()?;

    let sweep = SweepSpec {
        master_seed: template.seed(),
        template,
        axes,
        n_reps,
    };
    let table = sweep_grid_jobs(&sweep, jobs)?;
    let provenance = vec![format!(
        "command=sweep {} axis={} n-reps={n_reps} jobs={jobs}",
        sweep.template.provenance(),
        axis_texts.join(";")
    )];
    emit_csv(&table, &provenance, &output)?;

    let contour_metric: Option<String> = r.get(args.contour_metric.clone(), "contour-metric")?;
    let contour_svg: Option<PathBuf> = r.get(args.contour_svg.clone(), "contour-svg")?;
    match (contour_metric, contour_svg) {
        (Some(metric), Some(path)) => emit_svg_contour(&table, &metric, &path)?,
        (None, None) => {}
        _ => {
            return Err(usage(
                "--contour-metric and --contour-svg must be given together",
            ))
        }
    }
    Ok(())
}

/// Like [`resolve_model`] but parameters covered by a sweep axis may be
/// omitted from the fixed flags (placeholder 0 is patched in per cell).
fn resolve_model_with_axis_gaps(
    r: &Resolver,
    args: &ModelArgs,
    axes: &[String],
) -> CliResult<(ModelSpec, String)> {
    let mut patched = args.clone();
    for axis in axes {
        let name = axis.split('=').next().unwrap_or("").trim();
        match name {
            "m" if patched.m.is_none() => patched.m = Some(1),
            "t" if patched.t.is_none() => patched.t = Some(0),
            "p" if patched.p.is_none() => patched.p = Some(0.0),
            "Y" | "y" if patched.y.is_none() => patched.y = Some(0.0),
            "a" if patched.a.is_none() => patched.a = Some(DEFAULT_LOGISTIC_STEEPNESS),
            _ => {}
        }
    }
    resolve_model(r, &patched)
}

fn cmd_transition(r: &Resolver, args: &TransitionArgs, jobs: usize) -> CliResult<()> {
    let dims_text: String = r.require(args.dims_list.clone(), "dims-list")?;
    let p_text: String = r.require(args.p_values.clone(), "p-values")?;
    let output: PathBuf = r.require(args.output.clone(), "output")?;
    let a = r.get(args.a, "a")?.unwrap_or(DEFAULT_LOGISTIC_STEEPNESS);
    let n_reps = r.get(args.n_reps, "n-reps")?.unwrap_or(10);
    let n_orderings = r.get(args.n_orderings, "n-orderings")?.unwrap_or(10);
    let seed = r.get(args.seed, "seed")?.unwrap_or(0);

    let dims_list: Vec<Vec<usize>> = dims_text
        .split(',')
        .map(|t| parse_dims(t.trim()))
        .collect::<CliResult<_>>()?;
    let p_values = parse_f64_list(&p_text)?;

    let result = transition_study(&dims_list, &p_values, a, n_reps, seed, n_orderings, jobs)?;
    let provenance = vec![format!(
        "command=transition dims-list={dims_text} p-values={p_text} a={a} \
n-reps={n_reps} n-orderings={n_orderings} seed={seed} jobs={jobs}"
    )];
    emit_csv(&result.table, &provenance, &output)?;
    if let Some(path) = r.get(args.curves_svg.clone(), "curves-svg")? {
        emit_svg_loglog(&result.curves, &path)?;
    }
    Ok(())
}

fn dispatch(cli: Cli) -> CliResult<()> {
    let cfg = match &cli.config {
        Some(path) => load_config(path)?,
        None => HashMap::new(),
    };
    let r = Resolver { cfg };
    let jobs = r.get(cli.jobs, "jobs")?.unwrap_or(1).max(1);
    let cfg_note = cli
        .config
        .as_ref()
        .map(|p| format!(" config={}", p.display()))
        .unwrap_or_default();
    match &cli.command {
        Cmd::Generate(args) => cmd_generate(&r, args, jobs),
        Cmd::Metrics(args) => cmd_metrics(&r, args),
        Cmd::Boxdim(args) => cmd_boxdim(&r, args, &cfg_note),
        Cmd::Sweep(args) => cmd_sweep(&r, args, jobs),
        Cmd::Transition(args) => cmd_transition(&r, args, jobs),
    }
}

/// Entry point used by the binary; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("run with --help for usage");
            1
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            2
        }
    }
}
