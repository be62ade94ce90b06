//! Layered run configuration: flags over file over `MOFQNLP_SEED` over
//! defaults.

use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use mofqnlp_core::dataset::{parse_quaternary_class, BinaryRule, LabelMode, Property};
use mofqnlp_core::ensemble::DEFAULT_THRESHOLD;
use mofqnlp_core::generator::{DesignOptions, DEFAULT_MAX_ITER};
use mofqnlp_core::training::{Spsa, TrainConfig, BINARY_SHOTS, MULTICLASS_SHOTS};
use mofqnlp_core::ModelKind;

pub const SEED_ENV: &str = "MOFQNLP_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    /// Two classes split at the binary boundary.
    #[default]
    Binary,
    /// Four quantile classes on two open wires.
    Multiclass,
}

impl Task {
    pub fn label_mode(self) -> LabelMode {
        match self {
            Task::Binary => LabelMode::Binary,
            Task::Multiclass => LabelMode::Quaternary,
        }
    }
}

/// One layer of settings. Every field is optional so layers can be stacked;
/// the same struct is the config-file schema and the flag set.
#[derive(Debug, Clone, Default, PartialEq, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigLayer {
    /// Seed for synthesis, splits, initialization and sampling [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Target property: pv or h2 [default: pv]
    #[arg(long)]
    pub property: Option<Property>,
    /// Labeling task [default: binary]
    #[arg(long, value_enum)]
    pub task: Option<Task>,
    /// Binary boundary: median or absolute [default: median]
    #[arg(long)]
    pub binary_rule: Option<BinaryRule>,
    /// Model kind: bow, discocat, sequence or stair [default: bow]
    #[arg(long = "model")]
    pub model_kind: Option<ModelKind>,
    /// Shots per circuit [default: 2048 for one open wire, 8192 for two]
    #[arg(long)]
    pub shots: Option<u64>,
    /// SPSA iterations [default: 120]
    #[arg(long)]
    pub epochs: Option<usize>,
    /// SPSA step gain a [default: 0.05]
    #[arg(long)]
    pub a: Option<f64>,
    /// SPSA perturbation gain c [default: 0.06]
    #[arg(long)]
    pub c: Option<f64>,
    /// SPSA stability constant A [default: 0.01]
    #[arg(long = "A")]
    #[serde(rename = "A")]
    pub big_a: Option<f64>,
    /// SPSA step decay exponent [default: 0.602]
    #[arg(long)]
    pub alpha: Option<f64>,
    /// SPSA perturbation decay exponent [default: 0.101]
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Use exact probabilities instead of sampled shots [default: false]
    #[arg(long)]
    pub exact: Option<bool>,
    /// Relative-probability acceptance threshold [default: 0.85]
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Inverse-design iterations before timeout [default: 100]
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Inverse-design trials per class [default: 100]
    #[arg(long)]
    pub trials: Option<usize>,
    /// Draw candidates without replacement [default: false]
    #[arg(long)]
    pub dedup: Option<bool>,
    /// Target class: low, moderately-low, moderately-high, high or 00..11
    /// [default: all four]
    #[arg(long)]
    pub target: Option<String>,
    /// Values of A to sweep, comma separated [default: none]
    #[arg(long = "A-sweep", value_delimiter = ',')]
    #[serde(rename = "A_sweep")]
    pub a_sweep: Option<Vec<f64>>,
}

macro_rules! overlay {
    ($base:expr, $top:expr, $($f:ident),*) => {
        ConfigLayer { $($f: $top.$f.or($base.$f)),* }
    };
}

impl ConfigLayer {
    /// Fields set in `top` win.
    pub fn overlay(self, top: ConfigLayer) -> ConfigLayer {
        overlay!(
            self, top, seed, property, task, binary_rule, model_kind, shots, epochs, a, c, big_a, alpha, gamma,
            exact, threshold, max_iter, trials, dedup, target, a_sweep
        )
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

/// Fully resolved settings, echoed into run metadata.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub seed: u64,
    pub property: Property,
    pub task: Task,
    pub binary_rule: BinaryRule,
    pub model_kind: ModelKind,
    /// `None` picks the width-dependent default.
    pub shots: Option<u64>,
    pub epochs: usize,
    #[serde(flatten)]
    pub spsa: Spsa,
    pub exact: bool,
    pub threshold: f64,
    pub max_iter: usize,
    pub trials: usize,
    pub dedup: bool,
    pub target: Option<usize>,
    #[serde(rename = "A_sweep")]
    pub a_sweep: Vec<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            property: Property::PoreVolume,
            task: Task::Binary,
            binary_rule: BinaryRule::Median,
            model_kind: ModelKind::Bow,
            shots: None,
            epochs: TrainConfig::default().epochs,
            spsa: Spsa::default(),
            exact: false,
            threshold: DEFAULT_THRESHOLD,
            max_iter: DEFAULT_MAX_ITER,
            trials: 100,
            dedup: false,
            target: None,
            a_sweep: Vec::new(),
        }
    }
}

impl RunConfig {
    /// Stacks defaults, the seed environment value, the file and the flags.
    pub fn resolve(file: Option<&Path>, flags: ConfigLayer, env_seed: Option<&str>) -> Result<Self> {
        let mut layer = ConfigLayer::default();
        if let Some(s) = env_seed {
            let seed = s.trim().parse().with_context(|| format!("{SEED_ENV}=`{s}` is not a seed"))?;
            layer.seed = Some(seed);
        }
        if let Some(path) = file {
            layer = layer.overlay(ConfigLayer::from_file(path)?);
        }
        Self::from_layer(layer.overlay(flags))
    }

    pub fn from_layer(l: ConfigLayer) -> Result<Self> {
        let d = Self::default();
        let spsa = Spsa {
            a: l.a.unwrap_or(d.spsa.a),
            c: l.c.unwrap_or(d.spsa.c),
            big_a: l.big_a.unwrap_or(d.spsa.big_a),
            alpha: l.alpha.unwrap_or(d.spsa.alpha),
            gamma: l.gamma.unwrap_or(d.spsa.gamma),
        };
        let cfg = Self {
            seed: l.seed.unwrap_or(d.seed),
            property: l.property.unwrap_or(d.property),
            task: l.task.unwrap_or(d.task),
            binary_rule: l.binary_rule.unwrap_or(d.binary_rule),
            model_kind: l.model_kind.unwrap_or(d.model_kind),
            shots: l.shots,
            epochs: l.epochs.unwrap_or(d.epochs),
            spsa,
            exact: l.exact.unwrap_or(d.exact),
            threshold: l.threshold.unwrap_or(d.threshold),
            max_iter: l.max_iter.unwrap_or(d.max_iter),
            trials: l.trials.unwrap_or(d.trials),
            dedup: l.dedup.unwrap_or(d.dedup),
            target: l.target.as_deref().map(parse_quaternary_class).transpose()?,
            a_sweep: l.a_sweep.unwrap_or_default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                bail!("{name} must be positive, got {v}")
            }
        };
        if !(0.0..=1.0).contains(&self.threshold) {
            bail!("threshold must lie in [0, 1], got {}", self.threshold);
        }
        if self.shots == Some(0) {
            bail!("shots must be at least 1");
        }
        if self.max_iter == 0 {
            bail!("max_iter must be at least 1");
        }
        if self.trials == 0 {
            bail!("trials must be at least 1");
        }
        positive("a", self.spsa.a)?;
        positive("c", self.spsa.c)?;
        positive("alpha", self.spsa.alpha)?;
        positive("gamma", self.spsa.gamma)?;
        for &v in std::iter::once(&self.spsa.big_a).chain(&self.a_sweep) {
            if !(v.is_finite() && v >= 0.0) {
                bail!("A must be non-negative, got {v}");
            }
        }
        Ok(())
    }

    pub fn shots_for(&self, label_width: usize) -> u64 {
        self.shots
            .unwrap_or(if label_width > 1 { MULTICLASS_SHOTS } else { BINARY_SHOTS })
    }

    pub fn train_config(&self, model_kind: ModelKind, label_width: usize) -> TrainConfig {
        TrainConfig {
            model_kind,
            label_width,
            shots: self.shots_for(label_width),
            epochs: self.epochs,
            spsa: self.spsa,
            seed: self.seed,
            exact: self.exact,
            ..TrainConfig::default()
        }
    }

    pub fn design_options(&self) -> DesignOptions {
        DesignOptions {
            threshold: self.threshold,
            max_iter: self.max_iter,
            dedup: self.dedup,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_when_nothing_given() {
        let c = RunConfig::resolve(None, ConfigLayer::default(), None).unwrap();
        assert_eq!(c, RunConfig::default());
        assert_eq!(c.threshold, 0.85);
        assert_eq!(c.shots_for(1), 2048);
        assert_eq!(c.shots_for(2), 8192);
    }

    #[test]
    fn threshold_out_of_range() {
        let flags = ConfigLayer {
            threshold: Some(1.5),
            ..Default::default()
        };
        assert!(RunConfig::resolve(None, flags, None).is_err());
    }

    #[test]
    fn flag_beats_file_beats_env() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.json");
        std::fs::write(&path, r#"{"A": 0.01, "seed": 7}"#).unwrap();
        let flags = ConfigLayer {
            big_a: Some(0.1),
            ..Default::default()
        };
        let c = RunConfig::resolve(Some(&path), flags, Some("3")).unwrap();
        assert_eq!(c.spsa.big_a, 0.1);
        assert_eq!(c.seed, 7);
        let c = RunConfig::resolve(None, ConfigLayer::default(), Some("3")).unwrap();
        assert_eq!(c.seed, 3);
    }

    #[test]
    fn unknown_key_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.json");
        std::fs::write(&path, r#"{"thresold": 0.5}"#).unwrap();
        assert!(RunConfig::resolve(Some(&path), ConfigLayer::default(), None).is_err());
    }

    #[test]
    fn file_accepts_short_property_and_class_names() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.json");
        std::fs::write(&path, r#"{"property": "h2", "target": "high", "model_kind": "stair"}"#).unwrap();
        let c = RunConfig::resolve(Some(&path), ConfigLayer::default(), None).unwrap();
        assert_eq!(c.property, Property::H2Uptake);
        assert_eq!(c.target, Some(3));
        assert_eq!(c.model_kind, ModelKind::Stair);
    }
}
