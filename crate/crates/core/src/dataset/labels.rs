use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{LabeledDataset, PropertyRecord};
use crate::error::{Error, Result};

/// Target property used for labeling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    #[serde(alias = "pv")]
    PoreVolume,
    #[serde(alias = "h2")]
    H2Uptake,
}

impl Property {
    /// Absolute binary boundary: 1.05 cm³/g or 9.8 wt%.
    pub fn absolute_boundary(self) -> f64 {
        match self {
            Property::PoreVolume => 1.05,
            Property::H2Uptake => 9.8,
        }
    }

    pub fn short(self) -> &'static str {
        match self {
            Property::PoreVolume => "pv",
            Property::H2Uptake => "h2",
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short())
    }
}

impl FromStr for Property {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pv" | "pore_volume" | "pore-volume" => Ok(Property::PoreVolume),
            "h2" | "h2_uptake" | "h2-uptake" => Ok(Property::H2Uptake),
            other => Err(Error::Precondition(format!("unknown property `{other}`"))),
        }
    }
}

/// How records are mapped to class ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelMode {
    Binary,
    Quaternary,
    /// Quaternary class `k` becomes 0, every other class 1.
    OneVsRest(usize),
}

impl LabelMode {
    pub fn n_classes(self) -> usize {
        match self {
            LabelMode::Quaternary => 4,
            LabelMode::Binary | LabelMode::OneVsRest(_) => 2,
        }
    }

    /// Open wires needed to read a label.
    pub fn label_width(self) -> usize {
        match self {
            LabelMode::Quaternary => 2,
            LabelMode::Binary | LabelMode::OneVsRest(_) => 1,
        }
    }
}

/// Where the binary boundary sits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BinaryRule {
    /// Median of the records, so classes are balanced.
    #[default]
    Median,
    /// [`Property::absolute_boundary`].
    Absolute,
}

impl FromStr for BinaryRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "median" => Ok(Self::Median),
            "absolute" => Ok(Self::Absolute),
            other => Err(Error::Precondition(format!("unknown binary rule `{other}`"))),
        }
    }
}

/// Human-readable name of a quaternary class.
pub fn quaternary_class_label(class: usize) -> &'static str {
    match class {
        0 => "low",
        1 => "moderately-low",
        2 => "moderately-high",
        _ => "high",
    }
}

/// Bit-string name of a class id, e.g. 2 → "10" at width 2.
pub fn class_name(class: usize, width: usize) -> String {
    format!("{class:0width$b}")
}

/// Parses "00".."11", a class name (low, moderately-low, moderately-high,
/// high) or a plain integer into a quaternary class id.
pub fn parse_quaternary_class(s: &str) -> Result<usize> {
    let k = match s.to_ascii_lowercase().as_str() {
        "00" | "low" => 0,
        "01" | "moderately-low" | "moderately_low" => 1,
        "10" | "moderately-high" | "moderately_high" => 2,
        "11" | "high" => 3,
        other => other
            .parse::<usize>()
            .ok()
            .filter(|&k| k < 4)
            .ok_or_else(|| Error::Precondition(format!("unknown class `{other}`")))?,
    };
    Ok(k)
}

/// Linear-interpolated percentile of sorted values, `q` in [0, 1].
pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Record indices ordered by value; equal values keep record order.
fn ranking(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    idx
}

/// Quaternary labels from rank against the 25/50/75 percentiles, plus those
/// percentile values.
fn quaternary(values: &[f64]) -> Result<(Vec<usize>, Vec<f64>)> {
    let n = values.len();
    if n < 4 {
        return Err(Error::Labeling(format!(
            "quaternary labels need at least 4 records, got {n}"
        )));
    }
    let order = ranking(values);
    let mut labels = vec![0; n];
    for (rank, &i) in order.iter().enumerate() {
        let r = rank as f64;
        labels[i] = [0.25, 0.5, 0.75]
            .iter()
            .filter(|&&q| r > q * (n - 1) as f64)
            .count();
    }
    let sorted: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    let bounds = [0.25, 0.5, 0.75].iter().map(|&q| percentile(&sorted, q)).collect();
    Ok((labels, bounds))
}

/// Labels `records` by `property` under `mode`.
pub fn assign_labels(
    records: Vec<PropertyRecord>,
    property: Property,
    mode: LabelMode,
    rule: BinaryRule,
) -> Result<LabeledDataset> {
    if records.is_empty() {
        return Err(Error::Labeling("no records".into()));
    }
    let values: Vec<f64> = records.iter().map(|r| r.value(property)).collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Labeling("non-finite property value".into()));
    }
    let (labels, boundaries) = match mode {
        LabelMode::Binary => match rule {
            BinaryRule::Median => {
                let n = values.len();
                let order = ranking(&values);
                let mut labels = vec![0; n];
                for (rank, &i) in order.iter().enumerate() {
                    labels[i] = usize::from(rank as f64 > 0.5 * (n - 1) as f64);
                }
                let sorted: Vec<f64> = order.iter().map(|&i| values[i]).collect();
                (labels, vec![percentile(&sorted, 0.5)])
            }
            BinaryRule::Absolute => {
                let b = property.absolute_boundary();
                (values.iter().map(|&v| usize::from(v > b)).collect(), vec![b])
            }
        },
        LabelMode::Quaternary => quaternary(&values)?,
        LabelMode::OneVsRest(k) => {
            if k >= 4 {
                return Err(Error::Labeling(format!("one-vs-rest class {k} is not quaternary")));
            }
            let (q, bounds) = quaternary(&values)?;
            (q.into_iter().map(|c| usize::from(c != k)).collect(), bounds)
        }
    };
    Ok(LabeledDataset {
        records,
        labels,
        property,
        mode,
        boundaries,
        splits: None,
    })
}
