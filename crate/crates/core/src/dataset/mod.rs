//! Synthetic MOF property records, class labels, splits and building-block
//! statistics.

mod labels;
mod split;
mod stats;
mod synth;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use labels::{
    assign_labels, class_name, parse_quaternary_class, percentile, quaternary_class_label, BinaryRule, LabelMode,
    Property,
};
pub use split::{default_split_sizes, split_dataset, split_with_sizes, stratified_counts, SplitName, Splits};
pub use stats::{class_significance, compute_ucic, SignificanceTable, TokenCounts, SIGNIFICANCE_COUNT};
pub use synth::{
    default_anchors, fit_property_model, synthesize_properties, synthesize_with_noise, Anchor, Descriptors,
    PropertyModel, DEFAULT_NOISE, EDGE_LENGTH_RANGE,
};

use crate::compiler::{MofName, Vocabulary};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropertyRecord {
    #[serde(rename = "name")]
    pub mof: MofName,
    /// cm³/g
    pub pore_volume: f64,
    /// wt%
    pub h2_uptake: f64,
}

impl PropertyRecord {
    pub fn value(&self, property: Property) -> f64 {
        match property {
            Property::PoreVolume => self.pore_volume,
            Property::H2Uptake => self.h2_uptake,
        }
    }
}

/// On-disk dataset: `{"mofs": [{"name", "pore_volume", "h2_uptake"}, ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MofDataset {
    pub mofs: Vec<PropertyRecord>,
}

impl MofDataset {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// A labeled MOF ready for evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Example {
    pub mof: MofName,
    pub label: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledDataset {
    pub records: Vec<PropertyRecord>,
    /// Class id per record.
    pub labels: Vec<usize>,
    pub property: Property,
    pub mode: LabelMode,
    pub boundaries: Vec<f64>,
    pub splits: Option<Splits>,
}

impl LabeledDataset {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        let mut out = vec![0; self.mode.n_classes()];
        for &l in &self.labels {
            out[l] += 1;
        }
        out
    }

    pub fn splits(&self) -> Result<&Splits> {
        self.splits
            .as_ref()
            .ok_or_else(|| Error::Precondition("dataset has no splits".into()))
    }

    /// Examples of one split, in record order.
    pub fn examples(&self, which: SplitName) -> Result<Vec<Example>> {
        Ok(self
            .splits()?
            .get(which)
            .iter()
            .map(|&i| Example {
                mof: self.records[i].mof.clone(),
                label: self.labels[i],
            })
            .collect())
    }

    pub fn all_examples(&self) -> Vec<Example> {
        self.records
            .iter()
            .zip(&self.labels)
            .map(|(r, &label)| Example {
                mof: r.mof.clone(),
                label,
            })
            .collect()
    }

    /// Tokens used by the records, per role in order of first appearance.
    pub fn vocabulary(&self) -> Result<Vocabulary> {
        let mut v = Vocabulary {
            topologies: Vec::new(),
            nodes: Vec::new(),
            edges: Vec::new(),
        };
        for r in &self.records {
            for (list, tok) in [
                (&mut v.topologies, &r.mof.topology),
                (&mut v.nodes, &r.mof.node),
                (&mut v.edges, &r.mof.edge),
            ] {
                if !list.contains(tok) {
                    list.push(tok.clone());
                }
            }
        }
        v.validate()?;
        Ok(v)
    }

    /// Ground-truth class of `mof`, if it is in the dataset.
    pub fn label_of(&self, mof: &MofName) -> Option<usize> {
        self.records
            .iter()
            .position(|r| &r.mof == mof)
            .map(|i| self.labels[i])
    }

    /// Relabels one-vs-rest for quaternary class `k`, keeping splits.
    pub fn one_vs_rest(&self, k: usize) -> Result<LabeledDataset> {
        if self.mode != LabelMode::Quaternary {
            return Err(Error::Labeling("one-vs-rest needs quaternary labels".into()));
        }
        if k >= 4 {
            return Err(Error::Labeling(format!("class {k} is not quaternary")));
        }
        Ok(LabeledDataset {
            labels: self.labels.iter().map(|&l| usize::from(l != k)).collect(),
            mode: LabelMode::OneVsRest(k),
            ..self.clone()
        })
    }

    pub fn sidecar(&self) -> LabelSidecar {
        let width = self.mode.label_width();
        let names = |idx: &[usize]| idx.iter().map(|&i| self.records[i].mof.to_string()).collect();
        LabelSidecar {
            property: self.property,
            mode: self.mode,
            boundaries: self.boundaries.clone(),
            labels: self
                .records
                .iter()
                .zip(&self.labels)
                .map(|(r, &l)| (r.mof.to_string(), class_name(l, width)))
                .collect(),
            splits: self.splits.as_ref().map(|s| SplitNames {
                train: names(&s.train),
                val: names(&s.val),
                test: names(&s.test),
            }),
        }
    }

    /// Rebuilds a labeled dataset from records plus a sidecar.
    pub fn from_sidecar(records: Vec<PropertyRecord>, sidecar: &LabelSidecar) -> Result<Self> {
        let index: BTreeMap<String, usize> = records
            .iter()
            .enumerate()
            .map(|(i, r)| (r.mof.to_string(), i))
            .collect();
        let labels = records
            .iter()
            .map(|r| {
                let name = r.mof.to_string();
                let bits = sidecar
                    .labels
                    .get(&name)
                    .ok_or_else(|| Error::Labeling(format!("no label for {name}")))?;
                usize::from_str_radix(bits, 2)
                    .ok()
                    .filter(|&l| l < sidecar.mode.n_classes())
                    .ok_or_else(|| Error::Labeling(format!("bad label `{bits}` for {name}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let lookup = |names: &[String]| {
            names
                .iter()
                .map(|n| {
                    index
                        .get(n)
                        .copied()
                        .ok_or_else(|| Error::Labeling(format!("split names unknown MOF {n}")))
                })
                .collect::<Result<Vec<_>>>()
        };
        let splits = match &sidecar.splits {
            Some(s) => Some(Splits {
                train: lookup(&s.train)?,
                val: lookup(&s.val)?,
                test: lookup(&s.test)?,
            }),
            None => None,
        };
        Ok(Self {
            records,
            labels,
            property: sidecar.property,
            mode: sidecar.mode,
            boundaries: sidecar.boundaries.clone(),
            splits,
        })
    }
}

/// Labels and split membership by MOF name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelSidecar {
    pub property: Property,
    pub mode: LabelMode,
    pub boundaries: Vec<f64>,
    pub labels: BTreeMap<String, String>,
    pub splits: Option<SplitNames>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitNames {
    pub train: Vec<String>,
    pub val: Vec<String>,
    pub test: Vec<String>,
}

/// Default pipeline: synthesize, label and split.
pub fn build_labeled(
    vocab: &Vocabulary,
    seed: u64,
    property: Property,
    mode: LabelMode,
    rule: BinaryRule,
) -> Result<LabeledDataset> {
    let records = synthesize_properties(vocab, seed, &default_anchors())?;
    split_dataset(assign_labels(records, property, mode, rule)?, seed)
}
