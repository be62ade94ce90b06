//! Random MOF-name generation and the inverse-design loop.

mod grammar;

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use grammar::{Grammar, Symbol};

use crate::compiler::{MofName, Vocabulary};
use crate::dataset::{class_name, LabelMode, LabeledDataset};
use crate::ensemble::{predict_relative, RelativePredictor, DEFAULT_THRESHOLD, N_CLASSES};
use crate::error::{Error, Result};
use crate::quantum::ProbVector;
use crate::training::mix;

pub const DEFAULT_MAX_ITER: usize = 100;

/// Seeded stream of grammar-generated candidates.
pub struct CandidateStream {
    grammar: Grammar,
    rng: ChaCha8Rng,
    /// Names already emitted, when drawing without replacement.
    seen: Option<BTreeSet<MofName>>,
    space: usize,
}

impl CandidateStream {
    pub fn new(vocab: &Vocabulary, seed: u64, dedup: bool) -> Result<Self> {
        Ok(Self {
            grammar: Grammar::from_vocab(vocab)?,
            rng: ChaCha8Rng::seed_from_u64(seed),
            seen: dedup.then(BTreeSet::new),
            space: vocab.topologies.len() * vocab.nodes.len() * vocab.edges.len(),
        })
    }

    /// Next candidate. With de-duplication, repeats are redrawn and the
    /// memory resets once every name has been emitted.
    pub fn next_candidate(&mut self) -> Result<MofName> {
        loop {
            let m = self.grammar.sample(&mut self.rng)?;
            let Some(seen) = self.seen.as_mut() else {
                return Ok(m);
            };
            if seen.len() >= self.space {
                seen.clear();
            }
            if seen.insert(m.clone()) {
                return Ok(m);
            }
        }
    }
}

/// Single draw with a fresh generator.
pub fn generate_candidate(vocab: &Vocabulary, seed: u64) -> Result<MofName> {
    CandidateStream::new(vocab, seed, false)?.next_candidate()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DesignOptions {
    pub threshold: f64,
    pub max_iter: usize,
    pub dedup: bool,
}

impl Default for DesignOptions {
    fn default() -> Self {
        Self {
            threshold: DEFAULT_THRESHOLD,
            max_iter: DEFAULT_MAX_ITER,
            dedup: false,
        }
    }
}

impl DesignOptions {
    fn check(&self) -> Result<()> {
        if self.max_iter == 0 {
            return Err(Error::Precondition("max_iter must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(Error::Precondition(format!("threshold {} outside [0, 1]", self.threshold)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DesignStatus {
    Correct,
    Incorrect,
    Timeout,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationOutcome {
    pub target: usize,
    pub status: DesignStatus,
    pub guesses: usize,
    pub mof: Option<MofName>,
    /// Relative probabilities of the accepted candidate.
    pub relative: Option<ProbVector>,
}

fn check_truth(truth: &LabeledDataset, target: usize) -> Result<()> {
    if truth.mode != LabelMode::Quaternary {
        return Err(Error::Labeling("ground truth needs quaternary labels".into()));
    }
    if target >= N_CLASSES {
        return Err(Error::Labeling(format!("class {target} is not quaternary")));
    }
    Ok(())
}

/// Draws candidates until the predictor accepts one into `target`, then
/// scores it against the dataset labels. Acceptances into another class
/// are discarded.
pub fn inverse_design<P: RelativePredictor + ?Sized>(
    target: usize,
    predictor: &P,
    truth: &LabeledDataset,
    vocab: &Vocabulary,
    options: &DesignOptions,
    seed: u64,
) -> Result<GenerationOutcome> {
    options.check()?;
    check_truth(truth, target)?;
    let mut stream = CandidateStream::new(vocab, seed, options.dedup)?;
    for guess in 1..=options.max_iter {
        let mof = stream.next_candidate()?;
        let pred = predict_relative(predictor, &mof, mix(seed, guess as u64, 1), options.threshold)?;
        if pred.accepted_class == Some(target) {
            let status = if truth.label_of(&mof) == Some(target) {
                DesignStatus::Correct
            } else {
                DesignStatus::Incorrect
            };
            return Ok(GenerationOutcome {
                target,
                status,
                guesses: guess,
                mof: Some(mof),
                relative: Some(pred.relative),
            });
        }
    }
    Ok(GenerationOutcome {
        target,
        status: DesignStatus::Timeout,
        guesses: options.max_iter,
        mof: None,
        relative: None,
    })
}

/// One row per target class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassReport {
    /// Class bit string, "00".."11".
    pub class: String,
    pub correct: usize,
    pub incorrect: usize,
    pub timeout: usize,
    pub trials: usize,
    pub accuracy: f64,
    pub avg_guesses: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationReport {
    pub threshold: f64,
    pub max_iter: usize,
    pub trials: usize,
    pub seed: u64,
    pub rows: Vec<ClassReport>,
}

impl GenerationReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("class,correct,incorrect,timeout,accuracy,avg_guesses\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.class, r.correct, r.incorrect, r.timeout, r.accuracy, r.avg_guesses
            ));
        }
        out
    }
}

/// Runs `trials` inverse-design loops per target. Trial `t` for class `k`
/// uses seed `mix(seed, k, t)`, so trials run in parallel and the report
/// does not depend on scheduling.
pub fn run_benchmark<P: RelativePredictor + ?Sized>(
    targets: &[usize],
    trials: usize,
    predictor: &P,
    truth: &LabeledDataset,
    vocab: &Vocabulary,
    options: &DesignOptions,
    seed: u64,
) -> Result<GenerationReport> {
    if trials == 0 {
        return Err(Error::Precondition("trials must be at least 1".into()));
    }
    options.check()?;
    let rows = targets
        .iter()
        .map(|&k| {
            check_truth(truth, k)?;
            let outcomes = (0..trials)
                .into_par_iter()
                .map(|t| inverse_design(k, predictor, truth, vocab, options, mix(seed, k as u64, t as u64)))
                .collect::<Result<Vec<_>>>()?;
            let count = |s| outcomes.iter().filter(|o| o.status == s).count();
            let correct = count(DesignStatus::Correct);
            Ok(ClassReport {
                class: class_name(k, 2),
                correct,
                incorrect: count(DesignStatus::Incorrect),
                timeout: count(DesignStatus::Timeout),
                trials,
                accuracy: correct as f64 / trials as f64,
                avg_guesses: outcomes.iter().map(|o| o.guesses).sum::<usize>() as f64 / trials as f64,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GenerationReport {
        threshold: options.threshold,
        max_iter: options.max_iter,
        trials,
        seed,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{build_labeled, BinaryRule, Property};
    use crate::ensemble::LabelOracle;

    struct Rejecting;
    impl RelativePredictor for Rejecting {
        fn p_zero(&self, _: &MofName, _: u64) -> Result<[f64; 4]> {
            Ok([0.5; 4])
        }
    }

    fn truth() -> LabeledDataset {
        build_labeled(&Vocabulary::default(), 0, Property::PoreVolume, LabelMode::Quaternary, BinaryRule::Median)
            .unwrap()
    }

    #[test]
    fn rejecting_predictor_times_out() {
        let d = truth();
        let o = inverse_design(0, &Rejecting, &d, &Vocabulary::default(), &DesignOptions::default(), 3).unwrap();
        assert_eq!(o.status, DesignStatus::Timeout);
        assert_eq!(o.guesses, 100);
        assert!(o.mof.is_none());
    }

    #[test]
    fn zero_threshold_accepts_first_guess() {
        let d = truth();
        let opts = DesignOptions {
            threshold: 0.0,
            max_iter: 1,
            dedup: false,
        };
        // Equal scores resolve to class 0.
        let o = inverse_design(0, &Rejecting, &d, &Vocabulary::default(), &opts, 9).unwrap();
        assert_eq!(o.guesses, 1);
        assert_ne!(o.status, DesignStatus::Timeout);
    }

    #[test]
    fn oracle_never_wrong_and_report_accounts() {
        let d = truth();
        let oracle = LabelOracle::new(&d).unwrap();
        let r = run_benchmark(&[0, 1, 2, 3], 20, &oracle, &d, &Vocabulary::default(), &DesignOptions::default(), 5)
            .unwrap();
        for row in &r.rows {
            assert_eq!(row.correct + row.incorrect + row.timeout, row.trials);
            assert_eq!(row.incorrect, 0);
        }
        let again =
            run_benchmark(&[0, 1, 2, 3], 20, &oracle, &d, &Vocabulary::default(), &DesignOptions::default(), 5)
                .unwrap();
        assert_eq!(r, again);
        assert!(r.to_csv().starts_with("class,correct,incorrect,timeout,accuracy,avg_guesses\n00,"));
    }

    #[test]
    fn dedup_visits_every_name_before_repeating() {
        let v = Vocabulary::default();
        let mut s = CandidateStream::new(&v, 4, true).unwrap();
        let first: BTreeSet<_> = (0..150).map(|_| s.next_candidate().unwrap()).collect();
        assert_eq!(first.len(), 150);
        s.next_candidate().unwrap();
    }

    #[test]
    fn bad_options_rejected() {
        let d = truth();
        let v = Vocabulary::default();
        let zero = DesignOptions {
            max_iter: 0,
            ..Default::default()
        };
        assert!(inverse_design(0, &Rejecting, &d, &v, &zero, 0).is_err());
        let high = DesignOptions {
            threshold: 1.5,
            ..Default::default()
        };
        assert!(inverse_design(0, &Rejecting, &d, &v, &high, 0).is_err());
    }
}
