use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::exponent::PExponent;
use crate::harness::config::{ExperimentConfig, OutputFormat};
use crate::harness::trial::{run_trial, TrialRecord};
use crate::rng::{trial_stream, RandomSource};
use crate::vertex_file::fmt_f64;
use crate::{Error, Result};

/// Aggregated statistics of one `(p, n, N)` cell.
#[derive(Debug, Clone, Serialize)]
pub struct ReportRow {
    pub p: f64,
    pub n: usize,
    #[serde(rename = "N")]
    pub n_points: usize,
    pub count: usize,
    pub ok_count: usize,
    pub l_mean: Option<f64>,
    pub l_median: Option<f64>,
    pub l_q90: Option<f64>,
    pub l_max: Option<f64>,
    /// min over trials of `vol_radius · n^{1/2+1/p} / √(ln(2N/n))`.
    pub volstat_min: Option<f64>,
    /// max over trials of `trace_cov · n^{2/p} / ln(2N/n)`.
    pub covstat_max: Option<f64>,
    pub subset_pass: usize,
    pub facet_pass: usize,
    pub coupling_pass: usize,
}

/// Normalization of the volume radius against its regime lower-bound shape.
pub fn vol_radius_statistic(vol_radius: f64, p: f64, n: usize, n_points: usize) -> f64 {
    let nf = n as f64;
    vol_radius * nf.powf(0.5 + 1.0 / p) / (2.0 * n_points as f64 / nf).ln().sqrt()
}

/// Normalization of the covariance trace against its regime upper-bound shape.
pub fn trace_cov_statistic(trace_cov: f64, p: f64, n: usize, n_points: usize) -> f64 {
    let nf = n as f64;
    trace_cov * nf.powf(2.0 / p) / (2.0 * n_points as f64 / nf).ln()
}

fn quantile(sorted: &[f64], q: f64) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let rank = ((sorted.len() as f64 * q).ceil() as usize).clamp(1, sorted.len());
    Some(sorted[rank - 1])
}

fn aggregate_cell(p: f64, n: usize, n_points: usize, records: &[&TrialRecord]) -> ReportRow {
    let mut ls: Vec<f64> = records.iter().filter_map(|r| r.l_isotropic).collect();
    ls.sort_by(f64::total_cmp);
    let ok: Vec<&&TrialRecord> = records.iter().filter(|r| r.is_ok()).collect();
    let volstat_min = ok
        .iter()
        .filter_map(|r| r.vol_radius)
        .map(|v| vol_radius_statistic(v, p, n, n_points))
        .min_by(f64::total_cmp);
    let covstat_max = ok
        .iter()
        .filter_map(|r| r.trace_cov)
        .map(|t| trace_cov_statistic(t, p, n, n_points))
        .max_by(f64::total_cmp);
    let subset_pass = ok
        .iter()
        .filter(|r| match (r.trace_cov, r.subset_bound) {
            (Some(t), Some(b)) => t <= b + 1e-12,
            _ => false,
        })
        .count();
    let facet_pass = ok
        .iter()
        .filter(|r| match (r.l1_mean, r.l1_se, r.facet_bound) {
            (Some(m), Some(se), Some(b)) => m <= b + 3.0 * se,
            _ => false,
        })
        .count();
    let coupling_pass = records
        .iter()
        .filter(|r| r.coupling_ok == Some(true))
        .count();
    ReportRow {
        p,
        n,
        n_points,
        count: records.len(),
        ok_count: ok.len(),
        l_mean: if ls.is_empty() {
            None
        } else {
            Some(ls.iter().sum::<f64>() / ls.len() as f64)
        },
        l_median: quantile(&ls, 0.5),
        l_q90: quantile(&ls, 0.9),
        l_max: ls.last().copied(),
        volstat_min,
        covstat_max,
        subset_pass,
        facet_pass,
        coupling_pass,
    }
}

/// Records plus per-cell aggregation of one grid run.
#[derive(Debug)]
pub struct GridOutput {
    pub records: Vec<TrialRecord>,
    pub report: Vec<ReportRow>,
}

/// Execute the full grid. Each trial owns the random stream
/// `trial_stream(p, n, N, trial)` of the master seed, so the outputs do not
/// depend on scheduling or the worker count, and extending the grid never
/// reshuffles existing trials. Records come back sorted by `(p, n, N, trial)`.
pub fn run_grid(cfg: &ExperimentConfig) -> Result<GridOutput> {
    cfg.validate()?;
    let mut tasks: Vec<(f64, usize, usize, usize)> = Vec::new();
    for &p in &cfg.p_grid {
        for &n in &cfg.n_grid {
            for n_points in cfg.n_rule.counts_for(n) {
                for t in 0..cfg.trials {
                    tasks.push((p, n, n_points, t));
                }
            }
        }
    }
    let master_seed = cfg.master_seed;
    let mc_samples = cfg.mc_samples;
    let run_one = |&(p, n, n_points, t): &(f64, usize, usize, usize)| -> Result<TrialRecord> {
        let pe = PExponent::new(p)?;
        let mut rng = RandomSource::new(master_seed, trial_stream(p, n, n_points, t));
        let mut rec = run_trial(pe, n, n_points, &mut rng, mc_samples);
        rec.trial_index = t;
        Ok(rec)
    };
    let mut records: Vec<TrialRecord> = if cfg.parallel_workers > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.parallel_workers)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("worker pool: {e}")))?;
        pool.install(|| tasks.par_iter().map(run_one).collect::<Result<Vec<_>>>())?
    } else {
        tasks.iter().map(run_one).collect::<Result<Vec<_>>>()?
    };
    records.sort_by(|a, b| {
        a.p.total_cmp(&b.p)
            .then(a.n.cmp(&b.n))
            .then(a.n_points.cmp(&b.n_points))
            .then(a.trial_index.cmp(&b.trial_index))
    });

    let mut report: Vec<ReportRow> = Vec::new();
    let mut idx = 0;
    while idx < records.len() {
        let key = (records[idx].p, records[idx].n, records[idx].n_points);
        let mut end = idx;
        while end < records.len()
            && (records[end].p, records[end].n, records[end].n_points) == key
        {
            end += 1;
        }
        let cell: Vec<&TrialRecord> = records[idx..end].iter().collect();
        report.push(aggregate_cell(key.0, key.1, key.2, &cell));
        idx = end;
    }
    Ok(GridOutput { records, report })
}

const CSV_HEADER: &str = "schema_version,p,n,N,trial_index,seed_stream,status,l_isotropic,\
vol_radius,trace_cov,l1_mean,l1_se,subset_bound,facet_bound,coupling_ok,regime_ok,notes";

fn csv_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

/// Records as CSV, floats with 17 significant digits, schema-versioned header.
pub fn records_to_csv(records: &[TrialRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        let coupling = r
            .coupling_ok
            .map(|b| b.to_string())
            .unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.schema_version,
            fmt_f64(r.p),
            r.n,
            r.n_points,
            r.trial_index,
            r.seed_stream,
            r.status,
            csv_opt(r.l_isotropic),
            csv_opt(r.vol_radius),
            csv_opt(r.trace_cov),
            csv_opt(r.l1_mean),
            csv_opt(r.l1_se),
            csv_opt(r.subset_bound),
            csv_opt(r.facet_bound),
            coupling,
            r.regime_ok,
            r.notes.replace(',', ";"),
        ));
    }
    out
}

pub fn report_to_csv(report: &[ReportRow]) -> String {
    let mut out = String::from(
        "p,n,N,count,ok_count,l_mean,l_median,l_q90,l_max,volstat_min,covstat_max,\
subset_pass,facet_pass,coupling_pass",
    );
    out.push('\n');
    for r in report {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            fmt_f64(r.p),
            r.n,
            r.n_points,
            r.count,
            r.ok_count,
            csv_opt(r.l_mean),
            csv_opt(r.l_median),
            csv_opt(r.l_q90),
            csv_opt(r.l_max),
            csv_opt(r.volstat_min),
            csv_opt(r.covstat_max),
            r.subset_pass,
            r.facet_pass,
            r.coupling_pass,
        ));
    }
    out
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::InvalidArgument(format!("cannot write {}: {e}", path.display()))
}

/// Sibling path carrying the aggregated report.
pub fn report_path(output_path: &Path) -> PathBuf {
    let ext = output_path
        .extension()
        .map(|e| e.to_string_lossy().into_owned())
        .unwrap_or_else(|| "csv".into());
    output_path.with_extension(format!("report.{ext}"))
}

/// Write records and the per-cell report next to each other in the format
/// the config asks for. Whatever was written before a failure is flushed.
pub fn write_outputs(cfg: &ExperimentConfig, output: &GridOutput) -> Result<()> {
    let (records_text, report_text) = match cfg.output_format {
        OutputFormat::Csv => (
            records_to_csv(&output.records),
            report_to_csv(&output.report),
        ),
        OutputFormat::Json => (
            serde_json::to_string_pretty(&output.records)
                .map_err(|e| Error::InvalidArgument(format!("serialize records: {e}")))?
                + "\n",
            serde_json::to_string_pretty(&output.report)
                .map_err(|e| Error::InvalidArgument(format!("serialize report: {e}")))?
                + "\n",
        ),
    };
    for (path, text) in [
        (cfg.output_path.clone(), records_text),
        (report_path(&cfg.output_path), report_text),
    ] {
        if let Some(dir) = path.parent() {
            if !dir.as_os_str().is_empty() {
                std::fs::create_dir_all(dir).map_err(|e| io_err(&path, e))?;
            }
        }
        let file = File::create(&path).map_err(|e| io_err(&path, e))?;
        let mut writer = BufWriter::new(file);
        writer
            .write_all(text.as_bytes())
            .and_then(|_| writer.flush())
            .map_err(|e| io_err(&path, e))?;
    }
    Ok(())
}
