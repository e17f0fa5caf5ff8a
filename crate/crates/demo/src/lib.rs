//! Browser bindings. Every operation is a plain function returning JSON so it
//! can be tested natively; the `#[wasm_bindgen]` wrappers only convert errors.

use ccorder::dataset::parse_csv;
use ccorder::harness::{order_report, run_bench_on, Algorithm, ExperimentConfig, OrderRequest};
use ccorder::synth::PlantedChain;
use ccorder::{
    build_cr_matrix, determine_head, gocc_order, ngram_order, random_order, tocc_order, Dataset,
};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Keeps a single call well under a second in the browser.
pub const MAX_INSTANCES: usize = 5000;
pub const MAX_LABELS: usize = 16;

fn planted(n: usize, q: usize, noise: f64, seed: u32) -> Result<Dataset, String> {
    if n > MAX_INSTANCES || q > MAX_LABELS {
        return Err(format!(
            "demo limits: n <= {MAX_INSTANCES}, q <= {MAX_LABELS}"
        ));
    }
    PlantedChain {
        n,
        q,
        k: 4,
        noise,
        seed: u64::from(seed),
    }
    .generate()
    .map_err(|e| e.to_string())
}

fn names(d: &Dataset, order: &[usize]) -> Vec<String> {
    order.iter().map(|&j| d.label_names()[j].clone()).collect()
}

/// CR matrix (rows, `null` on the diagonal), head pair and the orders every
/// method picks on a planted chain.
pub fn planted_orders_json(
    n: usize,
    q: usize,
    noise: f64,
    seed: u32,
    window: usize,
) -> Result<String, String> {
    let d = planted(n, q, noise, seed)?;
    let m = build_cr_matrix(&d).map_err(|e| e.to_string())?;
    let head = determine_head(&m).map_err(|e| e.to_string())?;
    let orders = (|| -> ccorder::Result<Value> {
        Ok(json!({
            "gocc": names(&d, &gocc_order(&m, &head)?.order),
            "tocc": names(&d, &tocc_order(&d, &head)?.order),
            "ngram": names(&d, &ngram_order(&d, &head, window)?.order),
            "random": names(&d, &random_order(q, u64::from(seed))?.order),
        }))
    })()
    .map_err(|e| e.to_string())?;
    let rows: Vec<Vec<Option<f64>>> = (0..q)
        .map(|i| (0..q).map(|j| m.get(i, j)).collect())
        .collect();
    let out = json!({
        "labels": d.label_names(),
        "cr_matrix": rows,
        "head": {
            "first": d.label_names()[head.first],
            "second": d.label_names()[head.second],
            "max_rate": m.at(head.first, head.second),
            "tied": head.tied_candidates.len(),
        },
        "window": window,
        "orders": orders,
    });
    Ok(out.to_string())
}

/// Order report for CSV text whose last `labels` columns are the labels.
pub fn order_csv_json(
    text: &str,
    labels: usize,
    method: &str,
    window: usize,
    seed: u32,
) -> Result<String, String> {
    let d = parse_csv(text.as_bytes(), "pasted", labels).map_err(|e| e.to_string())?;
    if d.n_instances() > MAX_INSTANCES || d.n_labels() > MAX_LABELS {
        return Err(format!(
            "demo limits: n <= {MAX_INSTANCES}, q <= {MAX_LABELS}"
        ));
    }
    let request = match method {
        "gocc" => OrderRequest::Gocc,
        "tocc" => OrderRequest::Tocc,
        "ngram" => OrderRequest::Ngram(window),
        "random" => OrderRequest::Random(u64::from(seed)),
        other => return Err(format!("unknown method `{other}`")),
    };
    order_report(&d, request, true)
        .map(|v| v.to_string())
        .map_err(|e| e.to_string())
}

/// Cross-validated accuracy, F1 and Hamming loss of the main algorithms on a
/// planted chain.
pub fn compare_json(
    n: usize,
    q: usize,
    noise: f64,
    seed: u32,
    folds: usize,
) -> Result<String, String> {
    let d = planted(n, q, noise, seed)?;
    let algorithms = vec![
        Algorithm::Gocc,
        Algorithm::Tocc,
        Algorithm::CcRandom,
        Algorithm::Br,
        Algorithm::Ecc,
    ];
    let mut cfg = ExperimentConfig::new(algorithms);
    cfg.n_folds = folds;
    cfg.master_seed = u64::from(seed);
    cfg.learner.iterations = 100;
    let (table, _) = run_bench_on(&[d], &cfg).map_err(|e| e.to_string())?;
    let rows: Vec<Value> = table
        .algorithms
        .iter()
        .map(|a| {
            let avg = &table.averages[a];
            json!({
                "algorithm": a,
                "accuracy": avg.avg_accuracy,
                "f1": avg.avg_f1,
                "hamming_loss": avg.avg_hloss,
            })
        })
        .collect();
    Ok(json!({ "folds": folds, "rows": rows }).to_string())
}

fn js(r: Result<String, String>) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = plantedOrders)]
pub fn planted_orders(
    n: usize,
    q: usize,
    noise: f64,
    seed: u32,
    window: usize,
) -> Result<String, JsValue> {
    js(planted_orders_json(n, q, noise, seed, window))
}

#[wasm_bindgen(js_name = orderCsv)]
pub fn order_csv(
    text: &str,
    labels: usize,
    method: &str,
    window: usize,
    seed: u32,
) -> Result<String, JsValue> {
    js(order_csv_json(text, labels, method, window, seed))
}

#[wasm_bindgen(js_name = compareAlgorithms)]
pub fn compare_algorithms(
    n: usize,
    q: usize,
    noise: f64,
    seed: u32,
    folds: usize,
) -> Result<String, JsValue> {
    js(compare_json(n, q, noise, seed, folds))
}
