//! Batch experiment drivers: replication stability, parameter sweeps and the
//! fractal to small-world transition study. Results are aggregated per
//! parameter cell into a [`StatsTable`] and written as CSV.
//!
//! Seeding: replication i of cell c runs with
//! `master_seed + c * CELL_SEED_STRIDE + i`, so cells never share seeds and
//! a table is reproducible from its master seed alone.

use std::fs;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::boxcover::{classify_fractality, nb_curve, FractalityReport, NbCurve};
use crate::error::{Error, Result};
use crate::metrics::{metric_suite, MetricRecord, METRIC_COLUMNS};
use crate::models::ModelSpec;

/// Seed offset between sweep cells; far larger than any replication count.
pub const CELL_SEED_STRIDE: u64 = 1 << 20;

/// Replications per cell when the caller does not choose.
pub const DEFAULT_N_REPS: usize = 30;

/// A sweep: a model template plus one or two parameter axes.
#[derive(Clone, Debug)]
pub struct SweepSpec {
    pub template: ModelSpec,
    pub axes: Vec<Axis>,
    pub n_reps: usize,
    pub master_seed: u64,
}

#[derive(Clone, Debug)]
pub struct Axis {
    pub param: String,
    pub values: Vec<f64>,
}

/// Aggregate of one metric column over the replications of a cell.
#[derive(Clone, Copy, Debug)]
pub struct ColumnStats {
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
    /// Coefficient of variation, std / |mean|.
    pub cv: f64,
    /// How many replications had the metric defined.
    pub defined: usize,
}

impl ColumnStats {
    fn from_values(values: &[f64]) -> ColumnStats {
        let n = values.len();
        if n == 0 {
            return ColumnStats {
                mean: f64::NAN,
                std: f64::NAN,
                min: f64::NAN,
                max: f64::NAN,
                cv: f64::NAN,
                defined: 0,
            };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
        let std = var.sqrt();
        let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let cv = if mean == 0.0 { f64::NAN } else { std / mean.abs() };
        ColumnStats {
            mean,
            std,
            min,
            max,
            cv,
            defined: n,
        }
    }
}

#[derive(Clone, Debug)]
pub struct StatsRow {
    /// Values of the key columns (parameter combination of the cell).
    pub key: Vec<f64>,
    pub stats: Vec<ColumnStats>,
    /// Free-form per-row annotation (fractality label in transition runs).
    pub label: Option<String>,
}

/// One row per parameter cell, one [`ColumnStats`] per metric column.
#[derive(Clone, Debug)]
pub struct StatsTable {
    pub key_names: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<StatsRow>,
}

impl StatsTable {
    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Mean of `column` per row, in row order.
    pub fn column_means(&self, column: &str) -> Option<Vec<f64>> {
        let idx = self.column_index(column)?;
        Some(self.rows.iter().map(|r| r.stats[idx].mean).collect())
    }

    pub fn to_csv(&self, provenance: &[String]) -> String {
        let mut out = String::new();
        for line in provenance {
            out.push_str(&format!("# {line}\n"));
        }
        let mut header: Vec<String> = self.key_names.clone();
        for c in &self.columns {
            for suffix in ["mean", "std", "min", "max", "cv"] {
                header.push(format!("{c}_{suffix}"));
            }
        }
        let has_labels = self.rows.iter().any(|r| r.label.is_some());
        if has_labels {
            header.push("label".into());
        }
        out.push_str(&header.join(","));
        out.push('\n');
        let fmt = |v: f64| {
            if v.is_nan() {
                String::new()
            } else {
                v.to_string()
            }
        };
        for row in &self.rows {
            let mut fields: Vec<String> = row.key.iter().map(|v| fmt(*v)).collect();
            for s in &row.stats {
                fields.push(fmt(s.mean));
                fields.push(fmt(s.std));
                fields.push(fmt(s.min));
                fields.push(fmt(s.max));
                fields.push(fmt(s.cv));
            }
            if has_labels {
                fields.push(row.label.clone().unwrap_or_default());
            }
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }
}

/// Writes `table` to `destination` with `# `-prefixed provenance lines.
pub fn emit_csv(table: &StatsTable, provenance: &[String], destination: &Path) -> Result<()> {
    fs::write(destination, table.to_csv(provenance)).map_err(|e| Error::io(destination, e))
}

fn aggregate(records: &[MetricRecord]) -> Vec<ColumnStats> {
    let ncols = METRIC_COLUMNS.len();
    let mut per_col: Vec<Vec<f64>> = vec![Vec::with_capacity(records.len()); ncols];
    for rec in records {
        for (col, v) in rec.values().into_iter().enumerate() {
            if let Some(v) = v {
                per_col[col].push(v);
            }
        }
    }
    per_col.iter().map(|v| ColumnStats::from_values(v)).collect()
}

/// Generates and measures `n_reps` replications with seeds
/// `seed_base + 0 .. seed_base + n_reps`, optionally on `jobs` worker
/// threads. Records come back in replication order regardless of scheduling.
fn replicate(spec: &ModelSpec, n_reps: usize, seed_base: u64, jobs: usize) -> Result<Vec<MetricRecord>> {
    if n_reps == 0 {
        return Err(Error::InvalidParameter("n_reps must be positive".into()));
    }
    let run_one = |i: usize| -> Result<MetricRecord> {
        let seed = seed_base.wrapping_add(i as u64);
        let g = spec.with_seed(seed).generate().map_err(|e| {
            Error::InvalidParameter(format!("generation failed for seed {seed}: {e}"))
        })?;
        metric_suite(&g)
            .map_err(|e| Error::InvalidParameter(format!("metrics failed for seed {seed}: {e}")))
    };

    if jobs <= 1 {
        return (0..n_reps).map(run_one).collect();
    }

    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<MetricRecord>>>> =
        Mutex::new((0..n_reps).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..jobs.min(n_reps) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n_reps {
                    break;
                }
                let r = run_one(i);
                results.lock().unwrap()[i] = Some(r);
            });
        }
    });
    results
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("every replication index visited"))
        .collect()
}

/// Single-cell replication study: `n_reps` realisations seeded
/// `master_seed + i`, aggregated into one row.
pub fn run_replications(spec: &ModelSpec, n_reps: usize, master_seed: u64) -> Result<StatsTable> {
    run_replications_jobs(spec, n_reps, master_seed, 1)
}

pub fn run_replications_jobs(
    spec: &ModelSpec,
    n_reps: usize,
    master_seed: u64,
    jobs: usize,
) -> Result<StatsTable> {
    let records = replicate(spec, n_reps, master_seed, jobs)?;
    Ok(StatsTable {
        key_names: vec![],
        columns: METRIC_COLUMNS.iter().map(|s| s.to_string()).collect(),
        rows: vec![StatsRow {
            key: vec![],
            stats: aggregate(&records),
            label: None,
        }],
    })
}

fn cell_combinations(axes: &[Axis]) -> Vec<Vec<f64>> {
    let mut combos: Vec<Vec<f64>> = vec![vec![]];
    for axis in axes {
        let mut next = Vec::with_capacity(combos.len() * axis.values.len());
        for combo in &combos {
            for &v in &axis.values {
                let mut c = combo.clone();
                c.push(v);
                next.push(c);
            }
        }
        combos = next;
    }
    combos
}

/// Cartesian-product sweep over one or two parameter axes; one aggregated
/// row per cell.
pub fn sweep_grid(sweep: &SweepSpec) -> Result<StatsTable> {
    sweep_grid_jobs(sweep, 1)
}

pub fn sweep_grid_jobs(sweep: &SweepSpec, jobs: usize) -> Result<StatsTable> {
    if sweep.axes.is_empty() || sweep.axes.len() > 2 {
        return Err(Error::InvalidParameter(
            "sweep needs one or two axes".into(),
        ));
    }
    for axis in &sweep.axes {
        if axis.values.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "axis '{}' has no values",
                axis.param
            )));
        }
        // fail early on axis names that do not fit the model kind
        sweep
            .template
            .clone()
            .set_param(&axis.param, axis.values[0])?;
    }
    let combos = cell_combinations(&sweep.axes);
    let mut rows = Vec::with_capacity(combos.len());
    for (cell_idx, combo) in combos.iter().enumerate() {
        let mut spec = sweep.template.clone();
        for (axis, &value) in sweep.axes.iter().zip(combo) {
            spec.set_param(&axis.param, value)?;
        }
        let base = sweep
            .master_seed
            .wrapping_add(cell_idx as u64 * CELL_SEED_STRIDE);
        let records = replicate(&spec, sweep.n_reps, base, jobs)?;
        rows.push(StatsRow {
            key: combo.clone(),
            stats: aggregate(&records),
            label: None,
        });
    }
    Ok(StatsTable {
        key_names: sweep.axes.iter().map(|a| a.param.clone()).collect(),
        columns: METRIC_COLUMNS.iter().map(|s| s.to_string()).collect(),
        rows,
    })
}

/// Transition study output: metric statistics per (grid, p) cell plus the
/// box-counting curve and fractality fit of each cell's first replication.
pub struct TransitionResult {
    pub table: StatsTable,
    /// `(label, curve)` per cell, in row order.
    pub curves: Vec<(String, NbCurve)>,
    pub reports: Vec<FractalityReport>,
}

/// Runs LSwTM over every `(dims, p)` pair: normalised distance metrics over
/// `n_reps` replications, plus a box-covering fractality fit per cell.
pub fn transition_study(
    dims_list: &[Vec<usize>],
    p_values: &[f64],
    a: f64,
    n_reps: usize,
    master_seed: u64,
    n_orderings: usize,
    jobs: usize,
) -> Result<TransitionResult> {
    if dims_list.is_empty() || p_values.is_empty() {
        return Err(Error::InvalidParameter(
            "transition study needs dims and p values".into(),
        ));
    }
    let mut columns: Vec<String> = METRIC_COLUMNS.iter().map(|s| s.to_string()).collect();
    columns.extend(["d_b", "r2_power", "r2_exp"].map(String::from));

    let mut rows = Vec::new();
    let mut curves = Vec::new();
    let mut reports = Vec::new();
    let mut cell_idx = 0u64;
    for dims in dims_list {
        for &p in p_values {
            let spec = ModelSpec::Lswtm {
                dims: dims.clone(),
                p,
                a,
                seed: 0,
            };
            let base = master_seed.wrapping_add(cell_idx * CELL_SEED_STRIDE);
            let records = replicate(&spec, n_reps, base, jobs)?;
            let mut stats = aggregate(&records);

            // fractality of the cell's first replication
            let g = spec.with_seed(base).generate()?;
            let curve = nb_curve(&g, base, n_orderings)?;
            let report = classify_fractality(&curve)?;
            for v in [report.d_b, report.r2_power, report.r2_exp] {
                stats.push(ColumnStats::from_values(&[v]));
            }

            let n_nodes: usize = dims.iter().product();
            rows.push(StatsRow {
                key: vec![n_nodes as f64, p],
                stats,
                label: Some(report.label.to_string()),
            });
            let dims_str: Vec<String> = dims.iter().map(|d| d.to_string()).collect();
            curves.push((format!("{} p={p}", dims_str.join("x")), curve));
            reports.push(report);
            cell_idx += 1;
        }
    }
    Ok(TransitionResult {
        table: StatsTable {
            key_names: vec!["n_nodes".into(), "p".into()],
            columns,
            rows,
        },
        curves,
        reports,
    })
}
