use mofqnlp_core::dataset::{build_labeled, BinaryRule, LabelMode, Property};
use mofqnlp_core::ensemble::{
    classify, predict_relative, train_ensemble, Ensemble, EnsembleFile, RelativePredictor, DEFAULT_THRESHOLD,
};
use mofqnlp_core::training::TrainConfig;
use mofqnlp_core::{ModelKind, MofName, Result, Vocabulary};

struct Fixed([f64; 4]);

impl RelativePredictor for Fixed {
    fn p_zero(&self, _: &MofName, _: u64) -> Result<[f64; 4]> {
        Ok(self.0)
    }
}

#[test]
fn worked_relative_probability() {
    let mof = MofName::new("pcu", "N248", "E70");
    let p = predict_relative(&Fixed([0.05, 0.01, 0.03, 0.95]), &mof, 0, DEFAULT_THRESHOLD).unwrap();
    assert!((p.relative.as_slice()[3] - 0.913).abs() < 1e-3);
    assert_eq!(p.accepted_class, Some(3));
    assert_eq!(classify(&p, 0.92), None);
}

fn small_config() -> TrainConfig {
    TrainConfig {
        epochs: 4,
        ..TrainConfig::for_width(ModelKind::Bow, 1)
    }
}

#[test]
fn ensemble_has_four_bow_models_and_round_trips() {
    let d = build_labeled(&Vocabulary::default(), 0, Property::H2Uptake, LabelMode::Quaternary, BinaryRule::Median)
        .unwrap();
    let (e, histories) = train_ensemble(&d, &small_config()).unwrap();
    assert_eq!(e.models.len(), 4);
    assert!(e.models.iter().all(|m| m.len() == 78));
    assert_eq!(histories.len(), 4);

    let json = serde_json::to_string_pretty(&e.to_file()).unwrap();
    for key in ["\"00\"", "\"01\"", "\"10\"", "\"11\""] {
        assert!(json.contains(key));
    }
    let back = Ensemble::from_file(serde_json::from_str::<EnsembleFile>(&json).unwrap()).unwrap();
    assert_eq!(back, e);
    let mof = MofName::new("pcu", "N155", "E9");
    assert_eq!(
        predict_relative(&e, &mof, 3, 0.5).unwrap(),
        predict_relative(&back, &mof, 3, 0.5).unwrap()
    );
}

#[test]
fn ensemble_needs_quaternary_labels() {
    let d = build_labeled(&Vocabulary::default(), 0, Property::PoreVolume, LabelMode::Binary, BinaryRule::Median)
        .unwrap();
    assert!(train_ensemble(&d, &small_config()).is_err());
}

#[test]
fn unknown_candidate_is_rejected() {
    let d = build_labeled(&Vocabulary::default(), 0, Property::PoreVolume, LabelMode::Quaternary, BinaryRule::Median)
        .unwrap();
    let (e, _) = train_ensemble(&d, &small_config()).unwrap();
    assert!(e.p_zero(&MofName::new("pcu", "N999", "E70"), 0).is_err());
}
