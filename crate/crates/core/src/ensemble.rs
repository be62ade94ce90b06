//! Four one-vs-rest binary models combined into relative class
//! probabilities.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::compiler::{compile_mof, Checkpoint, ModelKind, MofName, ParamStore, Vocabulary};
use crate::dataset::{class_name, LabelMode, LabeledDataset, Property, SplitName};
use crate::error::{Error, Result};
use crate::quantum::{measure, ProbVector};
use crate::training::{compile_examples, evaluate_compiled, mix, train_model, MetricsHistory, TrainConfig};

/// Default acceptance threshold on the relative probability.
pub const DEFAULT_THRESHOLD: f64 = 0.85;

/// Number of quaternary classes.
pub const N_CLASSES: usize = 4;

/// Anything that can score a MOF against each class's specialist.
pub trait RelativePredictor: Sync {
    /// Probability that model `k`'s open wire reads 0, for each class `k`.
    fn p_zero(&self, mof: &MofName, seed: u64) -> Result<[f64; N_CLASSES]>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsemblePrediction {
    pub p_zero: [f64; N_CLASSES],
    pub relative: ProbVector,
    pub accepted_class: Option<usize>,
    /// Set when every p_zero was 0 and `relative` fell back to uniform.
    pub degenerate: bool,
}

/// Normalizes p_zero into relative probabilities.
pub fn relative_from_p_zero(p_zero: [f64; N_CLASSES]) -> (ProbVector, bool) {
    match ProbVector::from_weights(p_zero.to_vec()) {
        Some(p) => (p, false),
        None => (ProbVector::uniform(N_CLASSES), true),
    }
}

/// Argmax class (lowest id on ties) if its relative probability reaches
/// `threshold`.
pub fn classify(prediction: &EnsemblePrediction, threshold: f64) -> Option<usize> {
    let k = prediction.relative.argmax();
    (prediction.relative.as_slice()[k] >= threshold).then_some(k)
}

/// Scores `mof` with every model and applies `threshold`.
pub fn predict_relative<P: RelativePredictor + ?Sized>(
    predictor: &P,
    mof: &MofName,
    seed: u64,
    threshold: f64,
) -> Result<EnsemblePrediction> {
    let p_zero = predictor.p_zero(mof, seed)?;
    let (relative, degenerate) = relative_from_p_zero(p_zero);
    let mut pred = EnsemblePrediction {
        p_zero,
        relative,
        accepted_class: None,
        degenerate,
    };
    pred.accepted_class = classify(&pred, threshold);
    Ok(pred)
}

/// Four trained binary BoW models, one per quaternary class.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    pub property: Property,
    pub threshold: f64,
    pub config: TrainConfig,
    pub vocab: Vocabulary,
    /// Indexed by class id.
    pub models: Vec<ParamStore>,
}

impl RelativePredictor for Ensemble {
    fn p_zero(&self, mof: &MofName, seed: u64) -> Result<[f64; N_CLASSES]> {
        self.vocab.check(mof)?;
        let circuit = compile_mof(mof, self.config.model_kind, 1, &self.config.ansatz)?;
        let probs: Vec<f64> = self
            .models
            .par_iter()
            .enumerate()
            .map(|(k, params)| {
                let m = measure(&circuit, params, self.config.readout(mix(seed, k as u64, 0)))?;
                Ok(m.probs.map_or(0.0, |p| p.as_slice()[0]))
            })
            .collect::<Result<_>>()?;
        Ok([probs[0], probs[1], probs[2], probs[3]])
    }
}

impl Ensemble {
    /// Test accuracy of each specialist on its own one-vs-rest labels.
    pub fn test_accuracies(&self, dataset: &LabeledDataset) -> Result<Vec<f64>> {
        (0..N_CLASSES)
            .map(|k| {
                let ovr = dataset.one_vs_rest(k)?;
                let test = compile_examples(&ovr.examples(SplitName::Test)?, &self.config)?;
                let eval = evaluate_compiled(&self.models[k], &test, &self.config, self.config.seed, 7 << 32, 0)?;
                Ok(eval.accuracy)
            })
            .collect()
    }

    pub fn to_file(&self) -> EnsembleFile {
        EnsembleFile {
            property: self.property,
            threshold: self.threshold,
            config: self.config.clone(),
            vocab: self.vocab.clone(),
            models: self
                .models
                .iter()
                .enumerate()
                .map(|(k, p)| {
                    (
                        class_name(k, 2),
                        Checkpoint {
                            model_kind: self.config.model_kind,
                            label_width: 1,
                            ansatz: self.config.ansatz.clone(),
                            angles: p.clone(),
                        },
                    )
                })
                .collect(),
        }
    }

    pub fn from_file(file: EnsembleFile) -> Result<Self> {
        let models = (0..N_CLASSES)
            .map(|k| {
                let key = class_name(k, 2);
                file.models
                    .get(&key)
                    .map(|c| c.angles.clone())
                    .ok_or_else(|| Error::Precondition(format!("ensemble is missing model {key}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if file.models.len() != N_CLASSES {
            return Err(Error::Precondition("ensemble must hold exactly four models".into()));
        }
        Ok(Self {
            property: file.property,
            threshold: file.threshold,
            config: file.config,
            vocab: file.vocab,
            models,
        })
    }
}

/// On-disk ensemble: four checkpoints keyed "00".."11" plus metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleFile {
    pub property: Property,
    pub threshold: f64,
    pub config: TrainConfig,
    pub vocab: Vocabulary,
    pub models: BTreeMap<String, Checkpoint>,
}

/// Trains the four one-vs-rest specialists on a quaternary dataset. Model
/// `k` uses seed `config.seed + k`.
pub fn train_ensemble(dataset: &LabeledDataset, config: &TrainConfig) -> Result<(Ensemble, Vec<MetricsHistory>)> {
    if dataset.mode != LabelMode::Quaternary {
        return Err(Error::Labeling("ensemble training needs quaternary labels".into()));
    }
    if config.label_width != 1 {
        return Err(Error::Precondition("ensemble members are binary models".into()));
    }
    if config.model_kind != ModelKind::Bow {
        return Err(Error::Precondition("ensemble members are BoW models".into()));
    }
    let mut models = Vec::with_capacity(N_CLASSES);
    let mut histories = Vec::with_capacity(N_CLASSES);
    for k in 0..N_CLASSES {
        let cfg = TrainConfig {
            seed: config.seed.wrapping_add(k as u64),
            ..config.clone()
        };
        let (params, history) = train_model(&cfg, &dataset.one_vs_rest(k)?)?;
        models.push(params);
        histories.push(history);
    }
    Ok((
        Ensemble {
            property: dataset.property,
            threshold: DEFAULT_THRESHOLD,
            config: config.clone(),
            vocab: dataset.vocabulary()?,
            models,
        },
        histories,
    ))
}

/// Answers with full confidence from known labels.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelOracle {
    labels: BTreeMap<MofName, usize>,
}

impl LabelOracle {
    pub fn new(dataset: &LabeledDataset) -> Result<Self> {
        if dataset.mode != LabelMode::Quaternary {
            return Err(Error::Labeling("oracle needs quaternary labels".into()));
        }
        Ok(Self {
            labels: dataset
                .records
                .iter()
                .zip(&dataset.labels)
                .map(|(r, &l)| (r.mof.clone(), l))
                .collect(),
        })
    }
}

impl RelativePredictor for LabelOracle {
    fn p_zero(&self, mof: &MofName, _seed: u64) -> Result<[f64; N_CLASSES]> {
        let k = *self
            .labels
            .get(mof)
            .ok_or_else(|| Error::UnknownToken(mof.to_string()))?;
        let mut p = [0.0; N_CLASSES];
        p[k] = 1.0;
        Ok(p)
    }
}
