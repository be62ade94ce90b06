use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use mofqnlp_core::dataset::{
    assign_labels, class_name, class_significance, compute_ucic, default_anchors, split_dataset,
    synthesize_properties, BinaryRule, LabelMode, LabeledDataset, MofDataset, Property, PropertyRecord,
    SignificanceTable, SplitName,
};
use mofqnlp_core::ensemble::{train_ensemble, Ensemble, EnsembleFile, LabelOracle, RelativePredictor};
use mofqnlp_core::generator::run_benchmark;
use mofqnlp_core::training::{
    compile_examples, evaluate_compiled, sweep_big_a, train_model, MetricsHistory, TrainConfig,
};
use mofqnlp_core::{Checkpoint, ModelKind, ParamStore, Vocabulary};

use crate::config::{ConfigLayer, RunConfig, SEED_ENV};

/// Stream for test-split evaluation, apart from the training streams.
const STREAM_TEST: u64 = 7 << 32;

#[derive(Debug, Parser)]
#[command(name = "mofqnlp", version, about = "Quantum circuit classifiers and inverse design for MOF names")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Synthesize or summarize the property dataset
    #[command(subcommand)]
    Dataset(DatasetCommand),
    /// Train one model and write its checkpoint and metrics
    Train(TrainArgs),
    /// Train all four model kinds on the same split
    Compare(TrainArgs),
    /// Train the four one-vs-rest models
    EnsembleTrain(TrainArgs),
    /// Benchmark inverse design against an ensemble
    Generate(GenerateArgs),
}

#[derive(Debug, Subcommand)]
pub enum DatasetCommand {
    /// Write the synthetic 150-MOF property dataset
    Gen(GenArgs),
    /// Class boundaries and building-block significance
    Stats(StatsArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON config file; flags override its values
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub layer: ConfigLayer,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[command(flatten)]
    pub common: Common,
    /// Dataset JSON; synthesized from the seed when absent
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub common: Common,
    /// Dataset JSON; synthesized from the seed when absent
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub common: Common,
    /// Dataset JSON providing ground-truth labels
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// Trained ensemble; one is trained and saved when absent
    #[arg(long, conflicts_with = "oracle")]
    pub ensemble: Option<PathBuf>,
    /// Score candidates with the dataset labels instead of a model
    #[arg(long)]
    pub oracle: bool,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Serialize)]
struct Meta<'a> {
    command: &'a str,
    version: &'a str,
    seed: u64,
    /// Shots per circuit after width-dependent defaults.
    #[serde(skip_serializing_if = "Option::is_none")]
    shots: Option<u64>,
    config: &'a RunConfig,
    inputs: BTreeMap<&'a str, String>,
}

fn resolve(common: Common) -> Result<RunConfig> {
    let env = std::env::var(SEED_ENV).ok();
    RunConfig::resolve(common.config.as_deref(), common.layer, env.as_deref())
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write(path, &(serde_json::to_string_pretty(value)? + "\n"))
}

fn write_meta(
    path: &Path,
    command: &str,
    cfg: &RunConfig,
    label_width: Option<usize>,
    inputs: &[(&str, Option<&Path>)],
) -> Result<()> {
    let meta = Meta {
        command,
        version: env!("CARGO_PKG_VERSION"),
        seed: cfg.seed,
        shots: label_width.map(|w| cfg.shots_for(w)),
        config: cfg,
        inputs: inputs
            .iter()
            .filter_map(|(k, p)| p.map(|p| (*k, p.display().to_string())))
            .collect(),
    };
    write_json(path, &meta)
}

/// `mofs.json` → `mofs.meta.json`.
fn meta_beside(out: &Path) -> PathBuf {
    out.with_extension("meta.json")
}

fn load_records(path: Option<&Path>, seed: u64) -> Result<Vec<PropertyRecord>> {
    match path {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading dataset {}", p.display()))?;
            Ok(MofDataset::from_json(&text)
                .with_context(|| format!("parsing dataset {}", p.display()))?
                .mofs)
        }
        None => Ok(synthesize_properties(&Vocabulary::default(), seed, &default_anchors())?),
    }
}

fn labeled(path: Option<&Path>, cfg: &RunConfig, mode: LabelMode) -> Result<LabeledDataset> {
    let records = load_records(path, cfg.seed)?;
    Ok(split_dataset(assign_labels(records, cfg.property, mode, cfg.binary_rule)?, cfg.seed)?)
}

fn test_accuracy(params: &ParamStore, data: &LabeledDataset, config: &TrainConfig) -> Result<(f64, f64)> {
    let test = compile_examples(&data.examples(SplitName::Test)?, config)?;
    let e = evaluate_compiled(params, &test, config, config.seed, STREAM_TEST, 0)?;
    Ok((e.loss, e.accuracy))
}

pub fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Dataset(DatasetCommand::Gen(a)) => dataset_gen(a),
        Command::Dataset(DatasetCommand::Stats(a)) => dataset_stats(a),
        Command::Train(a) => train(a),
        Command::Compare(a) => compare(a),
        Command::EnsembleTrain(a) => ensemble_train(a),
        Command::Generate(a) => generate(a),
    }
}

fn dataset_gen(args: GenArgs) -> Result<()> {
    let cfg = resolve(args.common)?;
    let mofs = load_records(None, cfg.seed)?;
    write(&args.out, &(MofDataset { mofs }.to_json()? + "\n"))?;
    write_meta(&meta_beside(&args.out), "dataset gen", &cfg, None, &[])?;
    println!("wrote {}", args.out.display());
    Ok(())
}

#[derive(Serialize)]
struct StatsReport {
    property: Property,
    n_records: usize,
    quaternary_boundaries: Vec<f64>,
    class_sizes: BTreeMap<String, usize>,
    binary_rule: BinaryRule,
    binary_boundary: f64,
    absolute_boundary: f64,
    /// Name-space size: product of the role multiplicities.
    ucic: u64,
    significance: SignificanceTable,
}

fn dataset_stats(args: StatsArgs) -> Result<()> {
    let cfg = resolve(args.common)?;
    let records = load_records(args.dataset.as_deref(), cfg.seed)?;
    let quaternary = assign_labels(records.clone(), cfg.property, LabelMode::Quaternary, cfg.binary_rule)?;
    let binary = assign_labels(records, cfg.property, LabelMode::Binary, cfg.binary_rule)?;
    let vocab = quaternary.vocabulary()?;
    let multiplicities = [vocab.topologies.len(), vocab.nodes.len(), vocab.edges.len()].map(|n| n as i64);
    let report = StatsReport {
        property: cfg.property,
        n_records: quaternary.len(),
        quaternary_boundaries: quaternary.boundaries.clone(),
        class_sizes: quaternary
            .class_sizes()
            .into_iter()
            .enumerate()
            .map(|(k, n)| (class_name(k, 2), n))
            .collect(),
        binary_rule: cfg.binary_rule,
        binary_boundary: binary.boundaries[0],
        absolute_boundary: cfg.property.absolute_boundary(),
        ucic: compute_ucic(&multiplicities)?,
        significance: class_significance(&quaternary)?,
    };
    write_json(&args.out, &report)?;
    write_meta(&meta_beside(&args.out), "dataset stats", &cfg, None, &[("dataset", args.dataset.as_deref())])?;
    println!("wrote {}", args.out.display());
    Ok(())
}

#[derive(Serialize)]
struct TrainSummary {
    model_kind: ModelKind,
    epochs: usize,
    best_epoch: Option<usize>,
    best_val_loss: Option<f64>,
    final_val_acc: Option<f64>,
    max_val_acc: Option<f64>,
    test_loss: f64,
    test_acc: f64,
    /// Chosen A when sweeping.
    #[serde(rename = "A")]
    big_a: f64,
}

fn summarize(history: &MetricsHistory, tc: &TrainConfig, test: (f64, f64)) -> TrainSummary {
    TrainSummary {
        model_kind: tc.model_kind,
        epochs: tc.epochs,
        best_epoch: history.best().map(|m| m.epoch),
        best_val_loss: history.best().map(|m| m.val_loss),
        final_val_acc: history.last().map(|m| m.val_acc),
        max_val_acc: history.max_val_acc(),
        test_loss: test.0,
        test_acc: test.1,
        big_a: tc.spsa.big_a,
    }
}

fn train(args: TrainArgs) -> Result<()> {
    let cfg = resolve(args.common)?;
    let mode = cfg.task.label_mode();
    let data = labeled(args.dataset.as_deref(), &cfg, mode)?;
    let mut tc = cfg.train_config(cfg.model_kind, mode.label_width());
    let (params, history) = if cfg.a_sweep.is_empty() {
        train_model(&tc, &data)?
    } else {
        let (runs, best) = sweep_big_a(&tc, &data, &cfg.a_sweep)?;
        for r in &runs {
            write(&args.out_dir.join(format!("metrics_A{}.csv", r.big_a)), &r.history.to_csv())?;
        }
        tc.spsa.big_a = runs[best].big_a;
        let r = runs.into_iter().nth(best).expect("best index in range");
        (r.params, r.history)
    };
    let ckpt = Checkpoint {
        model_kind: tc.model_kind,
        label_width: tc.label_width,
        ansatz: tc.ansatz.clone(),
        angles: params.clone(),
    };
    write(&args.out_dir.join("checkpoint.json"), &(ckpt.to_json()? + "\n"))?;
    write(&args.out_dir.join("metrics.csv"), &history.to_csv())?;
    write_json(&args.out_dir.join("labels.json"), &data.sidecar())?;
    let summary = summarize(&history, &tc, test_accuracy(&params, &data, &tc)?);
    write_json(&args.out_dir.join("summary.json"), &summary)?;
    write_meta(&args.out_dir.join("meta.json"), "train", &cfg, Some(mode.label_width()), &[("dataset", args.dataset.as_deref())])?;
    println!(
        "{}: best val loss {:.4} at epoch {}, test accuracy {:.3}",
        tc.model_kind,
        summary.best_val_loss.unwrap_or(f64::NAN),
        summary.best_epoch.map_or("-".into(), |e| e.to_string()),
        summary.test_acc
    );
    Ok(())
}

fn compare(args: TrainArgs) -> Result<()> {
    let cfg = resolve(args.common)?;
    let mode = cfg.task.label_mode();
    let data = labeled(args.dataset.as_deref(), &cfg, mode)?;
    let mut table = String::from("model,final_val_acc,max_val_acc,best_epoch,best_val_loss,test_acc\n");
    println!("{:<10} {:>9} {:>9} {:>9}", "model", "final val", "max val", "test");
    for kind in ModelKind::ALL {
        let tc = cfg.train_config(kind, mode.label_width());
        let (params, history) = train_model(&tc, &data)?;
        write(&args.out_dir.join(format!("metrics_{}.csv", kind.label().to_lowercase())), &history.to_csv())?;
        let s = summarize(&history, &tc, test_accuracy(&params, &data, &tc)?);
        let opt = |v: Option<f64>| v.map_or(String::new(), |v| v.to_string());
        table.push_str(&format!(
            "{},{},{},{},{},{}\n",
            kind.label(),
            opt(s.final_val_acc),
            opt(s.max_val_acc),
            s.best_epoch.map_or(String::new(), |e| e.to_string()),
            opt(s.best_val_loss),
            s.test_acc
        ));
        println!(
            "{:<10} {:>9.3} {:>9.3} {:>9.3}",
            kind.label(),
            s.final_val_acc.unwrap_or(f64::NAN),
            s.max_val_acc.unwrap_or(f64::NAN),
            s.test_acc
        );
    }
    write(&args.out_dir.join("compare.csv"), &table)?;
    write_meta(&args.out_dir.join("meta.json"), "compare", &cfg, Some(mode.label_width()), &[("dataset", args.dataset.as_deref())])?;
    Ok(())
}

fn ensemble_config(cfg: &RunConfig) -> TrainConfig {
    cfg.train_config(cfg.model_kind, 1)
}

fn fit_ensemble(cfg: &RunConfig, data: &LabeledDataset, out_dir: &Path) -> Result<Ensemble> {
    let (mut ensemble, histories) = train_ensemble(data, &ensemble_config(cfg))?;
    ensemble.threshold = cfg.threshold;
    for (k, h) in histories.iter().enumerate() {
        write(&out_dir.join(format!("metrics_{}.csv", class_name(k, 2))), &h.to_csv())?;
    }
    write_json(&out_dir.join("ensemble.json"), &ensemble.to_file())?;
    Ok(ensemble)
}

fn ensemble_train(args: TrainArgs) -> Result<()> {
    let cfg = resolve(args.common)?;
    let data = labeled(args.dataset.as_deref(), &cfg, LabelMode::Quaternary)?;
    let ensemble = fit_ensemble(&cfg, &data, &args.out_dir)?;
    let acc: BTreeMap<String, f64> = ensemble
        .test_accuracies(&data)?
        .into_iter()
        .enumerate()
        .map(|(k, a)| (class_name(k, 2), a))
        .collect();
    for (k, a) in &acc {
        println!("model {k}: test accuracy {a:.3}");
    }
    write_json(&args.out_dir.join("summary.json"), &acc)?;
    write_json(&args.out_dir.join("labels.json"), &data.sidecar())?;
    write_meta(&args.out_dir.join("meta.json"), "ensemble-train", &cfg, Some(1), &[("dataset", args.dataset.as_deref())])?;
    Ok(())
}

fn generate(args: GenerateArgs) -> Result<()> {
    let cfg = resolve(args.common)?;
    let data = labeled(args.dataset.as_deref(), &cfg, LabelMode::Quaternary)?;
    let vocab = data.vocabulary()?;
    let predictor: Box<dyn RelativePredictor> = if args.oracle {
        Box::new(LabelOracle::new(&data)?)
    } else if let Some(path) = &args.ensemble {
        let text = fs::read_to_string(path).with_context(|| format!("reading ensemble {}", path.display()))?;
        let file: EnsembleFile =
            serde_json::from_str(&text).with_context(|| format!("parsing ensemble {}", path.display()))?;
        let ensemble = Ensemble::from_file(file)?;
        if ensemble.property != cfg.property {
            bail!(
                "ensemble was trained for {} but the run targets {}",
                ensemble.property,
                cfg.property
            );
        }
        Box::new(ensemble)
    } else {
        Box::new(fit_ensemble(&cfg, &data, &args.out_dir)?)
    };
    let targets: Vec<usize> = cfg.target.map_or_else(|| (0..4).collect(), |t| vec![t]);
    let report = run_benchmark(
        &targets,
        cfg.trials,
        predictor.as_ref(),
        &data,
        &vocab,
        &cfg.design_options(),
        cfg.seed,
    )?;
    write(&args.out_dir.join("report.json"), &(report.to_json()? + "\n"))?;
    write(&args.out_dir.join("report.csv"), &report.to_csv())?;
    write_meta(
        &args.out_dir.join("meta.json"),
        "generate",
        &cfg,
        (!args.oracle).then_some(1),
        &[("dataset", args.dataset.as_deref()), ("ensemble", args.ensemble.as_deref())],
    )?;
    println!("{:<6} {:>7} {:>9} {:>7} {:>8} {:>10}", "class", "correct", "incorrect", "timeout", "accuracy", "avg guess");
    for r in &report.rows {
        println!(
            "{:<6} {:>7} {:>9} {:>7} {:>8.2} {:>10.2}",
            r.class, r.correct, r.incorrect, r.timeout, r.accuracy, r.avg_guesses
        );
    }
    Ok(())
}
