//! Pilot run over the stability grid: prints per-cell aggregates and the
//! cross-cell spreads, and emits the reference-table JSON used by the
//! acceptance suite.

use std::path::PathBuf;

use lplab::harness::{
    run_grid, ExperimentConfig, NFormula, NRule,
    OutputFormat,
};

fn main() {
    let trials: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(200);
    let cfg = ExperimentConfig {
        p_grid: vec![1.0, 1.5, 2.0, 3.0],
        n_grid: vec![4, 5, 6, 7, 8],
        n_rule: NRule::Formula(NFormula::CapExpSqrtN),
        trials,
        master_seed: 7_240_821,
        mc_samples: 2_000,
        band: 10.0,
        parallel_workers: std::thread::available_parallelism().map(|v| v.get()).unwrap_or(1),
        output_path: PathBuf::from("/tmp/pilot.csv"),
        output_format: OutputFormat::Csv,
    };
    let t0 = std::time::Instant::now();
    let out = run_grid(&cfg).expect("grid runs");
    let wall = t0.elapsed().as_secs_f64();

    let mut rows = Vec::new();
    println!("p,n,N,ok,l_max,volstat_min,covstat_max");
    for row in &out.report {
        println!(
            "{},{},{},{},{:.6},{:.6},{:.6}",
            row.p,
            row.n,
            row.n_points,
            row.ok_count,
            row.l_max.unwrap_or(f64::NAN),
            row.volstat_min.unwrap_or(f64::NAN),
            row.covstat_max.unwrap_or(f64::NAN),
        );
        rows.push(serde_json::json!({
            "p": row.p,
            "n": row.n,
            "N": row.n_points,
            "l_max": row.l_max,
            "volstat_min": row.volstat_min,
            "covstat_max": row.covstat_max,
        }));
    }
    let l_max: Vec<f64> = out.report.iter().filter_map(|r| r.l_max).collect();
    let vol: Vec<f64> = out.report.iter().filter_map(|r| r.volstat_min).collect();
    let cov: Vec<f64> = out
        .report
        .iter()
        .filter(|r| r.p >= 2.0)
        .filter_map(|r| r.covstat_max)
        .collect();
    let spread = |v: &[f64]| {
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(0.0f64, f64::max);
        (lo, hi, hi / lo)
    };
    println!("L max spread: {:?}", spread(&l_max));
    println!("volstat spread: {:?}", spread(&vol));
    println!("covstat spread (p>=2): {:?}", spread(&cov));
    println!("wall {wall:.1}s with {} workers", cfg.parallel_workers);

    // Sanity stats used while sizing the acceptance run.
    let failed = out.records.iter().filter(|r| !r.is_ok()).count();
    let skipped_facet = out
        .records
        .iter()
        .filter(|r| r.notes.contains("facet_bound"))
        .count();
    println!("failed trials: {failed}, facet-bound skips: {skipped_facet}");
    std::fs::write(
        "/tmp/reference_stats.json",
        serde_json::to_string_pretty(&serde_json::json!({
            "master_seed": cfg.master_seed,
            "trials": trials,
            "cells": rows,
        }))
        .unwrap(),
    )
    .unwrap();
}
