//! Output files.
//!
//! `bench.csv`, `bench.json`, `orders.json` and `sweep.csv` hold only values
//! that are reproducible from the config and master seed. Wall-clock timings
//! and the run timestamp go to `timing.csv`, `timing.json` and
//! `run_report.json`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use super::config::ExperimentConfig;
use super::cv::{RunReport, SweepRow, REPORT_FORMAT_VERSION};
use crate::cooccurrence::{build_cr_matrix, determine_head};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::metrics::{Averages, BenchTable, MetricsReport, Normalized};
use crate::ordering::{gocc_order, ngram_order, random_order, tocc_order};

fn config_line(cfg: &ExperimentConfig) -> Result<String> {
    Ok(format!(
        "# format_version: {REPORT_FORMAT_VERSION}\n# config: {}\n",
        serde_json::to_string(cfg)?
    ))
}

type MetricOf = fn(&MetricsReport) -> f64;
type AverageOf = fn(&Averages) -> f64;
type NormalizedOf = fn(&Normalized) -> f64;

fn csv_row(out: &mut String, cells: impl IntoIterator<Item = String>) {
    let cells: Vec<String> = cells.into_iter().collect();
    out.push_str(&cells.join(","));
    out.push('\n');
}

/// Tables laid out as datasets × algorithms, one block per metric with an
/// average row, followed by the normalised rows.
pub fn bench_csv(table: &BenchTable, cfg: &ExperimentConfig) -> Result<String> {
    let mut out = config_line(cfg)?;
    csv_row(
        &mut out,
        ["metric".to_string(), "dataset".to_string()]
            .into_iter()
            .chain(table.algorithms.iter().cloned()),
    );
    let blocks: [(&str, &str, MetricOf, AverageOf); 3] = [
        ("accuracy", "avg_Acc", |m| m.accuracy, |a| a.avg_accuracy),
        ("f1", "avg_F1", |m| m.f1, |a| a.avg_f1),
        (
            "hamming_loss",
            "avg_HLoss",
            |m| m.hamming_loss,
            |a| a.avg_hloss,
        ),
    ];
    for (metric, avg_name, cell, avg) in blocks {
        for d in &table.datasets {
            csv_row(
                &mut out,
                [metric.to_string(), d.clone()].into_iter().chain(
                    table
                        .algorithms
                        .iter()
                        .map(|a| cell(table.cell(a, d).expect("bench cell")).to_string()),
                ),
            );
        }
        csv_row(
            &mut out,
            [metric.to_string(), avg_name.to_string()]
                .into_iter()
                .chain(
                    table
                        .algorithms
                        .iter()
                        .map(|a| avg(&table.averages[a]).to_string()),
                ),
        );
    }
    if !table.normalized.is_empty() {
        let rows: [(&str, NormalizedOf); 3] = [
            ("accuracy*", |n| n.accuracy),
            ("f1*", |n| n.f1),
            ("hloss*", |n| n.hloss),
        ];
        for (name, get) in rows {
            let label = if name == "hloss*" {
                "normalized (lower is better)"
            } else {
                "normalized"
            };
            csv_row(
                &mut out,
                [name.to_string(), label.to_string()].into_iter().chain(
                    table
                        .algorithms
                        .iter()
                        .map(|a| get(&table.normalized[a]).to_string()),
                ),
            );
        }
    }
    Ok(out)
}

pub fn bench_json(table: &BenchTable, report: &RunReport) -> Value {
    let cells: serde_json::Map<String, Value> = table
        .algorithms
        .iter()
        .map(|a| {
            let per_ds: serde_json::Map<String, Value> = table
                .datasets
                .iter()
                .map(|d| {
                    let m = table.cell(a, d).expect("bench cell");
                    (
                        d.clone(),
                        json!({"accuracy": m.accuracy, "f1": m.f1, "hamming_loss": m.hamming_loss}),
                    )
                })
                .collect();
            (a.clone(), Value::Object(per_ds))
        })
        .collect();
    let averages: serde_json::Map<String, Value> = table
        .algorithms
        .iter()
        .map(|a| {
            let av = &table.averages[a];
            (
                a.clone(),
                json!({"avg_accuracy": av.avg_accuracy, "avg_f1": av.avg_f1, "avg_hloss": av.avg_hloss}),
            )
        })
        .collect();
    let normalized: serde_json::Map<String, Value> = table
        .normalized
        .iter()
        .map(|(a, n)| {
            (
                a.clone(),
                json!({"accuracy": n.accuracy, "f1": n.f1, "hloss_lower_is_better": n.hloss}),
            )
        })
        .collect();
    let degenerate: Vec<&String> = table.degenerate.iter().filter(|d| *d != "time").collect();
    json!({
        "format_version": REPORT_FORMAT_VERSION,
        "config": report.config,
        "fold_seeds": report.fold_seeds,
        "algorithms": table.algorithms,
        "datasets": table.datasets,
        "cells": cells,
        "averages": averages,
        "normalized": normalized,
        "degenerate": degenerate,
    })
}

pub fn orders_json(report: &RunReport) -> Value {
    let orders: Vec<Value> = report
        .cells
        .iter()
        .flat_map(|c| {
            c.folds.iter().filter_map(move |f| {
                f.order.as_ref().map(|o| {
                    json!({"dataset": c.dataset, "algorithm": c.algorithm, "fold": f.fold, "order": o})
                })
            })
        })
        .collect();
    json!({
        "format_version": REPORT_FORMAT_VERSION,
        "config": report.config,
        "orders": orders,
    })
}

pub fn timing_json(table: &BenchTable, report: &RunReport) -> Value {
    let cells: Vec<Value> = report
        .cells
        .iter()
        .map(|c| {
            json!({
                "dataset": c.dataset,
                "algorithm": c.algorithm,
                "order_seconds": c.folds.iter().map(|f| f.order_seconds).sum::<f64>(),
                "train_predict_seconds": c.folds.iter().map(|f| f.train_predict_seconds).sum::<f64>(),
                "total_seconds": c.summary.wall_time_seconds,
            })
        })
        .collect();
    let avg: serde_json::Map<String, Value> = table
        .averages
        .iter()
        .map(|(a, v)| (a.clone(), json!(v.avg_time)))
        .collect();
    let norm: serde_json::Map<String, Value> = table
        .normalized
        .iter()
        .map(|(a, v)| (a.clone(), json!(v.time)))
        .collect();
    json!({
        "format_version": REPORT_FORMAT_VERSION,
        "created_at": report.created_at,
        "config": report.config,
        "cells": cells,
        "avg_time": avg,
        "normalized_time": norm,
        "time_degenerate": table.degenerate.iter().any(|d| d == "time"),
    })
}

pub fn timing_csv(table: &BenchTable, report: &RunReport) -> Result<String> {
    let mut out = config_line(&report.config)?;
    out.push_str("dataset,algorithm,order_seconds,train_predict_seconds,total_seconds\n");
    for c in &report.cells {
        let order: f64 = c.folds.iter().map(|f| f.order_seconds).sum();
        let tp: f64 = c.folds.iter().map(|f| f.train_predict_seconds).sum();
        let _ = writeln!(
            out,
            "{},{},{order},{tp},{}",
            c.dataset, c.algorithm, c.summary.wall_time_seconds
        );
    }
    for a in &table.algorithms {
        let _ = writeln!(out, "avg_Time,{a},,,{}", table.averages[a].avg_time);
    }
    for (a, n) in &table.normalized {
        let _ = writeln!(out, "Time*,{a},,,{}", n.time);
    }
    Ok(out)
}

pub fn sweep_csv(rows: &[SweepRow], cfg: &ExperimentConfig) -> Result<String> {
    let mut out = config_line(cfg)?;
    out.push_str("dataset,n,accuracy,f1,hamming_loss\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.dataset, r.n, r.accuracy, r.f1, r.hamming_loss
        );
    }
    Ok(out)
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

fn pretty(v: &Value) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

/// Writes every bench output into `dir` (created if missing).
pub fn write_bench_outputs(
    dir: &Path,
    table: &BenchTable,
    report: &RunReport,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    Ok(vec![
        write_file(dir, "bench.csv", &bench_csv(table, &report.config)?)?,
        write_file(dir, "bench.json", &pretty(&bench_json(table, report))?)?,
        write_file(dir, "orders.json", &pretty(&orders_json(report))?)?,
        write_file(dir, "timing.csv", &timing_csv(table, report)?)?,
        write_file(dir, "timing.json", &pretty(&timing_json(table, report))?)?,
        write_file(
            dir,
            "run_report.json",
            &pretty(&serde_json::to_value(report)?)?,
        )?,
    ])
}

pub fn write_sweep_outputs(
    dir: &Path,
    rows: &[SweepRow],
    report: &RunReport,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    Ok(vec![
        write_file(dir, "sweep.csv", &sweep_csv(rows, &report.config)?)?,
        write_file(dir, "orders.json", &pretty(&orders_json(report))?)?,
        write_file(
            dir,
            "run_report.json",
            &pretty(&serde_json::to_value(report)?)?,
        )?,
    ])
}

/// Ordering strategies for the standalone `order` command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderRequest {
    Gocc,
    Tocc,
    Ngram(usize),
    Random(u64),
}

/// CR matrix, head pair and chain order for a whole dataset, without training.
pub fn order_report(d: &Dataset, request: OrderRequest, emit_matrix: bool) -> Result<Value> {
    let m = build_cr_matrix(d)?;
    let names = d.label_names();
    let order = match request {
        OrderRequest::Random(seed) => random_order(d.n_labels(), seed)?,
        _ => {
            let head = determine_head(&m)?;
            match request {
                OrderRequest::Gocc => gocc_order(&m, &head)?,
                OrderRequest::Tocc => tocc_order(d, &head)?,
                OrderRequest::Ngram(n) => ngram_order(d, &head, n)?,
                OrderRequest::Random(_) => unreachable!(),
            }
        }
    };
    let head = order.head.as_ref().map(|h| {
        json!({
            "first": names[h.first],
            "second": names[h.second],
            "max_rate": m.at(h.first, h.second),
            "tied_candidates": h
                .tied_candidates
                .iter()
                .map(|&(i, j)| [names[i].clone(), names[j].clone()])
                .collect::<Vec<_>>(),
            "no_third_label": h.no_third_label,
        })
    });
    let mut out = json!({
        "format_version": REPORT_FORMAT_VERSION,
        "dataset": d.name(),
        "labels": names,
        "head": head,
        "order": order.record(names),
    });
    if emit_matrix {
        out["cr_matrix"] = serde_json::to_value(&m)?;
    }
    Ok(out)
}
