use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::circuit::{AnsatzConfig, ParamRef, STAIR_SLOTS};
use super::diagram::{stair_key, ModelKind, START_TOKEN};
use super::mof::Vocabulary;
use crate::error::{Error, Result};

/// Trainable weights: per component, a slot list of turns in [0, 1).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParamStore {
    angles: BTreeMap<String, Vec<f64>>,
}

impl ParamStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, component: impl Into<String>, slots: Vec<f64>) {
        self.angles.insert(component.into(), slots);
    }

    pub fn slots(&self, component: &str) -> Option<&[f64]> {
        self.angles.get(component).map(Vec::as_slice)
    }

    pub fn get(&self, r: &ParamRef) -> Result<f64> {
        self.angles
            .get(&r.component)
            .and_then(|s| s.get(r.slot))
            .copied()
            .ok_or_else(|| Error::UnboundParameter {
                component: r.component.clone(),
                slot: r.slot,
            })
    }

    pub fn contains(&self, r: &ParamRef) -> bool {
        self.get(r).is_ok()
    }

    pub fn components(&self) -> impl Iterator<Item = &str> {
        self.angles.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.angles.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    pub fn n_components(&self) -> usize {
        self.angles.len()
    }

    /// Total number of scalar parameters.
    pub fn len(&self) -> usize {
        self.angles.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All values, components in key order.
    pub fn to_flat(&self) -> Vec<f64> {
        self.angles.values().flatten().copied().collect()
    }

    /// Overwrites every value from a slice laid out as in [`to_flat`](Self::to_flat).
    pub fn set_flat(&mut self, values: &[f64]) -> Result<()> {
        if values.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                got: values.len(),
            });
        }
        let mut it = values.iter();
        for v in self.angles.values_mut().flatten() {
            *v = *it.next().expect("length checked");
        }
        Ok(())
    }

    /// Same layout, new values.
    pub fn with_flat(&self, values: &[f64]) -> Result<Self> {
        let mut out = self.clone();
        out.set_flat(values)?;
        Ok(out)
    }

    /// Maps every value into [0, 1).
    pub fn wrap(&mut self) {
        for v in self.angles.values_mut().flatten() {
            *v = wrap_unit(*v);
        }
    }
}

/// x mod 1, landing in [0, 1) even when rounding would give exactly 1.
pub fn wrap_unit(x: f64) -> f64 {
    let r = x.rem_euclid(1.0);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Component keys and slot counts a model needs over `vocab`.
pub fn param_schema(
    vocab: &Vocabulary,
    model_kind: ModelKind,
    label_width: usize,
    ansatz: &AnsatzConfig,
) -> BTreeMap<String, usize> {
    let per = ansatz.slots_per_component(label_width);
    let mut schema: BTreeMap<String, usize> = vocab.all_tokens().map(|t| (t.clone(), per)).collect();
    match model_kind {
        ModelKind::Sequence => {
            schema.insert(START_TOKEN.to_string(), per);
        }
        ModelKind::Stair => {
            // one connector between each adjacent pair of the three role boxes
            for p in 1..3 {
                schema.insert(stair_key(p), STAIR_SLOTS);
            }
        }
        ModelKind::Bow | ModelKind::DisCoCat => {}
    }
    schema
}

/// Seeded uniform initialization in [0, 1) with the default ansatz.
pub fn init_params(vocab: &Vocabulary, model_kind: ModelKind, label_width: usize, seed: u64) -> ParamStore {
    init_params_with(vocab, model_kind, label_width, &AnsatzConfig::default(), seed)
}

pub fn init_params_with(
    vocab: &Vocabulary,
    model_kind: ModelKind,
    label_width: usize,
    ansatz: &AnsatzConfig,
    seed: u64,
) -> ParamStore {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let angles = param_schema(vocab, model_kind, label_width, ansatz)
        .into_iter()
        .map(|(k, n)| (k, (0..n).map(|_| rng.random::<f64>()).collect()))
        .collect();
    ParamStore { angles }
}

/// Trained model on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Checkpoint {
    pub model_kind: ModelKind,
    pub label_width: usize,
    pub ansatz: AnsatzConfig,
    pub angles: ParamStore,
}

impl Checkpoint {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_bow_binary_has_78() {
        let p = init_params(&Vocabulary::default(), ModelKind::Bow, 1, 0);
        assert_eq!(p.n_components(), 26);
        assert_eq!(p.len(), 78);
    }

    #[test]
    fn tiny_vocab_has_9() {
        let v = Vocabulary::new(["pcu"], ["N1"], ["E1"]).unwrap();
        assert_eq!(init_params(&v, ModelKind::Bow, 1, 3).len(), 9);
    }

    #[test]
    fn extra_components() {
        let v = Vocabulary::default();
        assert_eq!(init_params(&v, ModelKind::Bow, 2, 0).len(), 156);
        assert_eq!(init_params(&v, ModelKind::Sequence, 1, 0).len(), 81);
        assert_eq!(init_params(&v, ModelKind::Stair, 1, 0).len(), 84);
        assert_eq!(init_params(&v, ModelKind::DisCoCat, 1, 0).len(), 78);
    }

    #[test]
    fn seeded_and_in_range() {
        let v = Vocabulary::default();
        let a = init_params(&v, ModelKind::Bow, 1, 11);
        assert_eq!(a, init_params(&v, ModelKind::Bow, 1, 11));
        assert_ne!(a, init_params(&v, ModelKind::Bow, 1, 12));
        assert!(a.to_flat().iter().all(|&x| (0.0..1.0).contains(&x)));
    }

    #[test]
    fn flat_round_trip_and_wrap() {
        let v = Vocabulary::default();
        let mut p = init_params(&v, ModelKind::Bow, 1, 1);
        let shifted: Vec<f64> = p.to_flat().iter().map(|x| x + 2.5).collect();
        p.set_flat(&shifted).unwrap();
        p.wrap();
        assert!(p.to_flat().iter().all(|&x| (0.0..1.0).contains(&x)));
        assert!(p.set_flat(&[0.0]).is_err());
        assert_eq!(wrap_unit(-1e-18), 0.0);
        assert_eq!(wrap_unit(-0.25), 0.75);
    }

    #[test]
    fn checkpoint_round_trips_losslessly() {
        let v = Vocabulary::default();
        let c = Checkpoint {
            model_kind: ModelKind::Stair,
            label_width: 1,
            ansatz: AnsatzConfig::default(),
            angles: init_params(&v, ModelKind::Stair, 1, 9),
        };
        let back = Checkpoint::from_json(&c.to_json().unwrap()).unwrap();
        assert_eq!(back, c);
    }
}
