use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use ccorder::dataset::{load_dataset, DatasetFormat};
use ccorder::harness::{
    bench_table, fit_algorithm, order_report, run_cv_on, run_nsweep_on, write_bench_outputs,
    write_sweep_outputs, Algorithm, DatasetSpec, ExperimentConfig, OrderRequest,
};
use ccorder::metrics::example_f1;
use ccorder::{
    example_accuracy, hamming_loss, label_stats, macro_f1, Dataset, Error, LearnerConfig,
    ModelDocument, MultiLabelPredictor, PredictionSet, Result,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

const EXIT_CONFIG: u8 = 2;
const EXIT_DATA: u8 = 3;

/// Co-occurrence based label ordering for classifier chains.
#[derive(Parser)]
#[command(name = "ccorder", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Instance, feature and label counts plus label cardinality.
    Stats(DataArgs),
    /// CR matrix, head pair and chain order of a whole dataset, without training.
    Order(OrderArgs),
    /// Train one algorithm on a whole dataset and save the model as JSON.
    Train(TrainArgs),
    /// Apply a saved model to a dataset and report metrics and predictions.
    Predict(PredictArgs),
    /// Cross-validated benchmark over the configured datasets and algorithms.
    Bench(BenchArgs),
    /// Cross-validated n-gram ordered chains for several n.
    SweepN(SweepArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Arff,
    Csv,
}

impl From<FormatArg> for DatasetFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Arff => DatasetFormat::Arff,
            FormatArg::Csv => DatasetFormat::Csv,
        }
    }
}

#[derive(Args)]
struct DataArgs {
    /// ARFF or CSV file.
    path: PathBuf,
    /// Defaults to the file extension.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Label count for CSV (labels are the last columns); for ARFF overrides
    /// the `-C` spec of the relation (negative = last |n| attributes).
    #[arg(long, allow_negative_numbers = true)]
    labels: Option<i64>,
}

impl DataArgs {
    fn load(&self) -> Result<Dataset> {
        load_dataset(&self.path, self.format.map(Into::into), self.labels)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Gocc,
    Tocc,
    Ngram,
    Random,
}

#[derive(Args)]
struct OrderArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, value_enum, default_value = "tocc")]
    method: MethodArg,
    /// Window length for `--method ngram`.
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// Seed for `--method random`.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Include the full CR matrix.
    #[arg(long)]
    emit_matrix: bool,
}

#[derive(Args)]
struct LearnerArgs {
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    l2: Option<f64>,
}

impl LearnerArgs {
    fn apply(&self, cfg: &mut LearnerConfig) {
        if let Some(v) = self.learning_rate {
            cfg.learning_rate = v;
        }
        if let Some(v) = self.iterations {
            cfg.iterations = v;
        }
        if let Some(v) = self.l2 {
            cfg.l2 = v;
        }
    }
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    data: DataArgs,
    /// gocc, tocc, ngram:N, cc_random, br or ecc.
    #[arg(long, default_value = "tocc")]
    algorithm: String,
    /// Seed for random orders and ECC members.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    learner: LearnerArgs,
}

#[derive(Args)]
struct PredictArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long)]
    model: PathBuf,
    /// Leave the per-instance predictions out of the output.
    #[arg(long)]
    metrics_only: bool,
}

#[derive(Args)]
struct RunArgs {
    /// JSON experiment config.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Extra dataset files (CSV needs `--labels`).
    #[arg(long = "dataset")]
    datasets: Vec<PathBuf>,
    /// Label count / spec applied to `--dataset` files.
    #[arg(long, allow_negative_numbers = true)]
    labels: Option<i64>,
    /// Comma-separated algorithm list, replacing the config's.
    #[arg(long, value_delimiter = ',')]
    algorithms: Vec<String>,
    #[arg(long)]
    folds: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; defaults to the config's `output_dir`, then `results`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    learner: LearnerArgs,
}

impl RunArgs {
    /// Config file merged with the command-line overrides, plus the
    /// directory relative dataset paths resolve against.
    fn config(&self) -> Result<(ExperimentConfig, Option<PathBuf>)> {
        let (mut cfg, base) = match &self.config {
            Some(path) => (
                ExperimentConfig::load(path)?,
                path.parent().map(Path::to_path_buf),
            ),
            None => (ExperimentConfig::new(Vec::new()), None),
        };
        cfg.datasets
            .extend(self.datasets.iter().map(|p| DatasetSpec {
                path: p.clone(),
                format: None,
                labels: self.labels,
                name: None,
            }));
        if !self.algorithms.is_empty() {
            cfg.algorithms = self
                .algorithms
                .iter()
                .map(|a| a.parse())
                .collect::<Result<Vec<Algorithm>>>()?;
        }
        if let Some(f) = self.folds {
            cfg.n_folds = f;
        }
        if let Some(s) = self.seed {
            cfg.master_seed = s;
        }
        if let Some(out) = &self.out {
            cfg.output_dir = Some(out.clone());
        }
        self.learner.apply(&mut cfg.learner);
        Ok((cfg, base))
    }
}

fn out_dir(cfg: &ExperimentConfig) -> PathBuf {
    cfg.output_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from("results"))
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Comma-separated window lengths.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5")]
    n: Vec<usize>,
}

fn stats(args: &DataArgs) -> Result<Value> {
    let d = args.load()?;
    let s = label_stats(&d);
    Ok(json!({
        "dataset": d.name(),
        "n": s.n,
        "k": s.k,
        "q": s.q,
        "lcard": s.lcard,
        "labels": d.label_names(),
    }))
}

fn order(args: &OrderArgs) -> Result<Value> {
    let d = args.data.load()?;
    let request = match args.method {
        MethodArg::Gocc => OrderRequest::Gocc,
        MethodArg::Tocc => OrderRequest::Tocc,
        MethodArg::Ngram => OrderRequest::Ngram(args.n),
        MethodArg::Random => OrderRequest::Random(args.seed),
    };
    order_report(&d, request, args.emit_matrix)
}

fn train(args: &TrainArgs) -> Result<Value> {
    let algorithm: Algorithm = args.algorithm.parse()?;
    let mut learner = LearnerConfig::default();
    args.learner.apply(&mut learner);
    learner.validate()?;
    let d = args.data.load()?;
    let fitted = fit_algorithm(&d, algorithm, &learner, &Default::default(), args.seed)?;
    ModelDocument::new(fitted.model).save(&args.out)?;
    Ok(json!({
        "dataset": d.name(),
        "algorithm": algorithm,
        "seed": args.seed,
        "order": fitted.order.map(|o| o.record(d.label_names())),
        "model": args.out,
    }))
}

fn predict(args: &PredictArgs) -> Result<Value> {
    let doc = ModelDocument::load(&args.model)?;
    let d = args.data.load()?;
    if doc.model.n_labels() != d.n_labels() {
        return Err(Error::InvalidDataset(format!(
            "model predicts {} labels but the dataset has {}",
            doc.model.n_labels(),
            d.n_labels()
        )));
    }
    let predicted = doc.model.predict_all(d.features())?;
    let set = PredictionSet::new(d.labels().clone(), predicted)?;
    let mut out = json!({
        "dataset": d.name(),
        "metrics": {
            "accuracy": example_accuracy(&set),
            "f1": macro_f1(&set),
            "example_f1": example_f1(&set),
            "hamming_loss": hamming_loss(&set),
        },
        "labels": doc.model.label_names(),
    });
    if !args.metrics_only {
        out["predictions"] = set.predicted().iter_rows().map(|r| r.to_vec()).collect();
    }
    Ok(out)
}

fn bench(args: &BenchArgs) -> Result<Value> {
    let (cfg, base) = args.run.config()?;
    cfg.validate()?;
    let data = cfg.load_datasets(base.as_deref())?;
    let report = run_cv_on(&data, &cfg)?;
    let table = bench_table(&report)?;
    let files = write_bench_outputs(&out_dir(&cfg), &table, &report)?;
    Ok(json!({ "files": files, "averages": table.averages, "normalized": table.normalized }))
}

fn sweep(args: &SweepArgs) -> Result<Value> {
    let (mut cfg, base) = args.run.config()?;
    if cfg.algorithms.is_empty() {
        // the sweep replaces the algorithm list; keep validation happy
        cfg.algorithms = vec![Algorithm::Tocc];
    }
    cfg.validate()?;
    let data = cfg.load_datasets(base.as_deref())?;
    let (rows, report) = run_nsweep_on(&data, &cfg, &args.n)?;
    let files = write_sweep_outputs(&out_dir(&cfg), &rows, &report)?;
    Ok(json!({ "files": files, "rows": rows }))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Stats(a) => stats(a),
        Command::Order(a) => order(a),
        Command::Train(a) => train(a),
        Command::Predict(a) => predict(a),
        Command::Bench(a) => bench(a),
        Command::SweepN(a) => sweep(a),
    };
    match result.and_then(|v| Ok(serde_json::to_string_pretty(&v)?)) {
        Ok(text) => {
            // a closed pipe (`| head`) is not an error worth reporting
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_data_error() {
                EXIT_DATA
            } else {
                EXIT_CONFIG
            })
        }
    }
}
