//! Cross-entropy evaluation from post-selected shots and SPSA training.

mod spsa;

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use spsa::{Probes, Spsa};

use crate::compiler::{compile_mof, init_params_with, wrap_unit, AnsatzConfig, ModelKind, ParamCircuit, ParamStore};
use crate::dataset::{Example, LabeledDataset, SplitName};
use crate::error::{Error, Result};
use crate::quantum::{measure, ProbVector, Readout};

/// Shots per circuit for single-open-wire models.
pub const BINARY_SHOTS: u64 = 2048;
/// Shots per circuit for two-open-wire models.
pub const MULTICLASS_SHOTS: u64 = 8192;

const PRED_FLOOR: f64 = 1e-9;

/// −Σ label_i · ln(pred_i) with predictions clamped to [1e-9, 1].
pub fn cross_entropy(pred: &[f64], label: &[f64]) -> Result<f64> {
    if pred.len() != label.len() {
        return Err(Error::LengthMismatch {
            expected: label.len(),
            got: pred.len(),
        });
    }
    Ok(-pred
        .iter()
        .zip(label)
        .map(|(&p, &l)| l * p.clamp(PRED_FLOOR, 1.0).ln())
        .sum::<f64>())
}

/// One-hot vector of length `n` with a 1 at `class`.
pub fn one_hot(class: usize, n: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[class] = 1.0;
    v
}

/// SplitMix64 finalizer over the three inputs.
pub fn mix(seed: u64, index: u64, epoch: u64) -> u64 {
    fn sm(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    sm(sm(sm(seed) ^ index) ^ epoch)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub model_kind: ModelKind,
    pub label_width: usize,
    pub shots: u64,
    pub epochs: usize,
    #[serde(flatten)]
    pub spsa: Spsa,
    pub seed: u64,
    /// Post-select exact probabilities instead of sampling.
    pub exact: bool,
    pub ansatz: AnsatzConfig,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            model_kind: ModelKind::Bow,
            label_width: 1,
            shots: BINARY_SHOTS,
            epochs: 120,
            spsa: Spsa::default(),
            seed: 0,
            exact: false,
            ansatz: AnsatzConfig::default(),
        }
    }
}

impl TrainConfig {
    /// Defaults for a model with `label_width` open wires.
    pub fn for_width(model_kind: ModelKind, label_width: usize) -> Self {
        Self {
            model_kind,
            label_width,
            shots: if label_width > 1 { MULTICLASS_SHOTS } else { BINARY_SHOTS },
            ..Self::default()
        }
    }

    pub fn readout(&self, seed: u64) -> Readout {
        if self.exact {
            Readout::Exact
        } else {
            Readout::Shots {
                shots: self.shots,
                seed,
            }
        }
    }
}

/// An example with its circuit compiled once.
#[derive(Debug, Clone)]
pub struct CompiledExample {
    pub circuit: ParamCircuit,
    pub label: usize,
}

pub fn compile_examples(examples: &[Example], config: &TrainConfig) -> Result<Vec<CompiledExample>> {
    examples
        .iter()
        .map(|e| {
            Ok(CompiledExample {
                circuit: compile_mof(&e.mof, config.model_kind, config.label_width, &config.ansatz)?,
                label: e.label,
            })
        })
        .collect()
}

/// Prediction for one circuit; the uniform vector when nothing was retained.
pub fn predict(circuit: &ParamCircuit, params: &ParamStore, readout: Readout) -> Result<(ProbVector, bool)> {
    let m = measure(circuit, params, readout)?;
    let empty = m.probs.is_none();
    Ok((m.probs_or_uniform(circuit.open_wires.len()), empty))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub loss: f64,
    pub accuracy: f64,
    /// Examples whose post-selection kept no shots.
    pub empty_retentions: usize,
}

/// Mean loss and accuracy over compiled examples. Example `i` samples with
/// seed `mix(seed, stream + i, epoch)`.
pub fn evaluate_compiled(
    params: &ParamStore,
    examples: &[CompiledExample],
    config: &TrainConfig,
    seed: u64,
    stream: u64,
    epoch: usize,
) -> Result<Evaluation> {
    if examples.is_empty() {
        return Err(Error::EmptySplit);
    }
    let per: Vec<(f64, bool, bool)> = examples
        .par_iter()
        .enumerate()
        .map(|(i, ex)| {
            let readout = config.readout(mix(seed, stream + i as u64, epoch as u64));
            let (pred, empty) = predict(&ex.circuit, params, readout)?;
            let loss = cross_entropy(pred.as_slice(), &one_hot(ex.label, pred.len()))?;
            Ok((loss, pred.argmax() == ex.label, empty))
        })
        .collect::<Result<_>>()?;
    // fixed-order reduction
    let (mut loss, mut correct, mut empty) = (0.0, 0usize, 0usize);
    for (l, c, e) in per {
        loss += l;
        correct += usize::from(c);
        empty += usize::from(e);
    }
    let n = examples.len() as f64;
    Ok(Evaluation {
        loss: loss / n,
        accuracy: correct as f64 / n,
        empty_retentions: empty,
    })
}

/// Compiles and evaluates `examples` at `epoch`.
pub fn evaluate(params: &ParamStore, examples: &[Example], config: &TrainConfig, epoch: usize) -> Result<Evaluation> {
    let compiled = compile_examples(examples, config)?;
    evaluate_compiled(params, &compiled, config, config.seed, 0, epoch)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochMetrics {
    pub epoch: usize,
    pub train_loss: f64,
    pub train_acc: f64,
    pub val_loss: f64,
    pub val_acc: f64,
    pub empty_retentions: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricsHistory {
    pub rows: Vec<EpochMetrics>,
}

impl MetricsHistory {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Row with the lowest validation loss, earliest on ties.
    pub fn best(&self) -> Option<&EpochMetrics> {
        self.rows
            .iter()
            .fold(None, |best: Option<&EpochMetrics>, r| match best {
                Some(b) if b.val_loss <= r.val_loss => Some(b),
                _ => Some(r),
            })
    }

    pub fn max_val_acc(&self) -> Option<f64> {
        self.rows.iter().map(|r| r.val_acc).reduce(f64::max)
    }

    pub fn last(&self) -> Option<&EpochMetrics> {
        self.rows.last()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("epoch,train_loss,train_acc,val_loss,val_acc\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                r.epoch, r.train_loss, r.train_acc, r.val_loss, r.val_acc
            );
        }
        s
    }
}

// Seed streams keep probe, train-metric and validation samples independent.
const STREAM_TRAIN_METRIC: u64 = 1 << 32;
const STREAM_VAL: u64 = 2 << 32;
const STREAM_DELTA: u64 = 3 << 32;

/// Trains one model with batch SPSA and returns the parameters of the epoch
/// with the lowest validation loss.
pub fn train_model(config: &TrainConfig, dataset: &LabeledDataset) -> Result<(ParamStore, MetricsHistory)> {
    if config.label_width != dataset.mode.label_width() {
        return Err(Error::Precondition(format!(
            "label width {} does not fit {} classes",
            config.label_width,
            dataset.mode.n_classes()
        )));
    }
    let vocab = dataset.vocabulary()?;
    let train = compile_examples(&dataset.examples(SplitName::Train)?, config)?;
    let val = compile_examples(&dataset.examples(SplitName::Val)?, config)?;
    let init = init_params_with(&vocab, config.model_kind, config.label_width, &config.ansatz, config.seed);
    train_compiled(config, init, &train, &val)
}

/// Training loop over precompiled splits.
pub fn train_compiled(
    config: &TrainConfig,
    init: ParamStore,
    train: &[CompiledExample],
    val: &[CompiledExample],
) -> Result<(ParamStore, MetricsHistory)> {
    let mut history = MetricsHistory::default();
    if config.epochs == 0 {
        return Ok((init, history));
    }
    if train.is_empty() || val.is_empty() {
        return Err(Error::EmptySplit);
    }
    let seed = config.seed;
    let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, STREAM_DELTA, 0));
    let mut theta = init.to_flat();
    let mut params = init;
    let mut best: Option<(f64, ParamStore)> = None;

    for k in 0..config.epochs {
        let mut probe = 0;
        config.spsa.step(k, &mut theta, &mut rng, |point| {
            let name = if probe == 0 { "plus probe" } else { "minus probe" };
            probe += 1;
            let loss = evaluate_compiled(&params.with_flat(point)?, train, config, seed, 0, k)?.loss;
            if loss.is_finite() {
                Ok(loss)
            } else {
                Err(Error::NonFiniteLoss { epoch: k, probe: name })
            }
        })?;
        for t in &mut theta {
            *t = wrap_unit(*t);
        }
        params.set_flat(&theta)?;

        let tr = evaluate_compiled(&params, train, config, seed, STREAM_TRAIN_METRIC, k)?;
        let va = evaluate_compiled(&params, val, config, seed, STREAM_VAL, k)?;
        if !(tr.loss.is_finite() && va.loss.is_finite()) {
            return Err(Error::NonFiniteLoss { epoch: k, probe: "metrics" });
        }
        history.rows.push(EpochMetrics {
            epoch: k,
            train_loss: tr.loss,
            train_acc: tr.accuracy,
            val_loss: va.loss,
            val_acc: va.accuracy,
            empty_retentions: tr.empty_retentions + va.empty_retentions,
        });
        if best.as_ref().is_none_or(|(b, _)| va.loss < *b) {
            best = Some((va.loss, params.clone()));
        }
    }
    let (_, best_params) = best.expect("at least one epoch");
    Ok((best_params, history))
}

/// One entry of an A sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRun {
    pub big_a: f64,
    pub params: ParamStore,
    pub history: MetricsHistory,
}

/// Trains once per stability constant in `grid` and returns every run plus
/// the index of the one with the lowest best validation loss (earliest on
/// ties).
pub fn sweep_big_a(config: &TrainConfig, dataset: &LabeledDataset, grid: &[f64]) -> Result<(Vec<SweepRun>, usize)> {
    if grid.is_empty() {
        return Err(Error::Precondition("A sweep needs at least one value".into()));
    }
    let runs = grid
        .iter()
        .map(|&big_a| {
            let cfg = TrainConfig {
                spsa: Spsa { big_a, ..config.spsa },
                ..config.clone()
            };
            let (params, history) = train_model(&cfg, dataset)?;
            Ok(SweepRun { big_a, params, history })
        })
        .collect::<Result<Vec<_>>>()?;
    let score = |r: &SweepRun| r.history.best().map_or(f64::INFINITY, |m| m.val_loss);
    let mut best = 0;
    for (i, r) in runs.iter().enumerate() {
        if score(r) < score(&runs[best]) {
            best = i;
        }
    }
    Ok((runs, best))
}
