use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::PropertyRecord;
use crate::compiler::{MofName, Vocabulary};
use crate::error::{Error, Result};

/// Shortest and longest ligand lengths in Å.
pub const EDGE_LENGTH_RANGE: (f64, f64) = (3.56, 16.12);

/// Relative half-width of the multiplicative noise on each property.
pub const DEFAULT_NOISE: f64 = 0.03;

const DEFAULT_EDGE_LENGTHS: [(&str, f64); 15] = [
    ("E220", 3.56),
    ("E70", 4.12),
    ("E14", 4.74),
    ("E2", 5.45),
    ("E43", 6.20),
    ("E88", 6.98),
    ("E5", 7.77),
    ("E102", 8.55),
    ("E21", 9.33),
    ("E35", 10.14),
    ("E167", 11.30),
    ("E56", 12.45),
    ("E229", 13.60),
    ("E11", 14.85),
    ("E9", 16.12),
];

/// Molar mass (g/mol) of the metal in each default node.
const DEFAULT_NODE_MASSES: [(&str, f64); 10] = [
    ("N106", 88.906),  // Y
    ("N123", 140.116), // Ce
    ("N139", 173.045), // Yb
    ("N144", 167.259), // Er
    ("N155", 164.930), // Ho
    ("N173", 157.25),  // Gd
    ("N205", 88.906),  // Y
    ("N248", 173.045), // Yb
    ("N394", 140.908), // Pr
    ("N505", 173.045), // Yb
];

/// Per-token physical descriptors feeding the property model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Descriptors {
    /// Ligand length in Å.
    pub edge_length: BTreeMap<String, f64>,
    /// Metal mass in g/mol.
    pub node_mass: BTreeMap<String, f64>,
}

impl Descriptors {
    /// Known values for the default library; other tokens are spread evenly
    /// over the default ranges in vocabulary order.
    pub fn for_vocab(vocab: &Vocabulary) -> Self {
        let known_len: BTreeMap<&str, f64> = DEFAULT_EDGE_LENGTHS.into_iter().collect();
        let known_mass: BTreeMap<&str, f64> = DEFAULT_NODE_MASSES.into_iter().collect();
        let spread = |i: usize, n: usize, (lo, hi): (f64, f64)| {
            if n <= 1 {
                lo
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        };
        let edge_length = vocab
            .edges
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let v = known_len
                    .get(e.as_str())
                    .copied()
                    .unwrap_or_else(|| spread(i, vocab.edges.len(), EDGE_LENGTH_RANGE));
                (e.clone(), v)
            })
            .collect();
        let node_mass = vocab
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| {
                let v = known_mass
                    .get(n.as_str())
                    .copied()
                    .unwrap_or_else(|| spread(i, vocab.nodes.len(), (88.906, 173.045)));
                (n.clone(), v)
            })
            .collect();
        Self { edge_length, node_mass }
    }

    fn lookup(&self, mof: &MofName) -> Result<(f64, f64)> {
        let l = self
            .edge_length
            .get(&mof.edge)
            .ok_or_else(|| Error::UnknownToken(mof.edge.clone()))?;
        let m = self
            .node_mass
            .get(&mof.node)
            .ok_or_else(|| Error::UnknownToken(mof.node.clone()))?;
        Ok((*l, *m))
    }
}

/// A MOF with reference property values used to fit the model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Anchor {
    #[serde(rename = "name")]
    pub mof: MofName,
    pub pore_volume: f64,
    pub h2_uptake: f64,
}

/// Reference structures spanning the low and high ends of both properties.
pub fn default_anchors() -> Vec<Anchor> {
    [
        ("N248", "E220", 0.262, 4.06),
        ("N205", "E14", 0.757, 8.0),
        ("N205", "E35", 1.91, 14.02),
        ("N155", "E9", 2.97, 15.58),
    ]
    .into_iter()
    .map(|(n, e, pv, h2)| Anchor {
        mof: MofName::new("pcu", n, e),
        pore_volume: pv,
        h2_uptake: h2,
    })
    .collect()
}

/// Fitted coefficients of
/// `pv = alpha·L + beta·(M/100)` and `h2 = gamma·pv + delta·(100/M)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropertyModel {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl PropertyModel {
    pub fn pore_volume(&self, length: f64, mass: f64) -> f64 {
        self.alpha * length + self.beta * mass / 100.0
    }

    pub fn h2_uptake(&self, pore_volume: f64, mass: f64) -> f64 {
        self.gamma * pore_volume + self.delta * 100.0 / mass
    }
}

/// Least squares for y ≈ c0·x0 + c1·x1 via the normal equations.
fn lstsq2(rows: &[([f64; 2], f64)]) -> Result<[f64; 2]> {
    let (mut a, mut b, mut d, mut r0, mut r1) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &([x0, x1], y) in rows {
        a += x0 * x0;
        b += x0 * x1;
        d += x1 * x1;
        r0 += x0 * y;
        r1 += x1 * y;
    }
    let det = a * d - b * b;
    if det.abs() <= 1e-12 * (a * d).abs().max(f64::MIN_POSITIVE) {
        return Err(Error::Calibration("anchors do not determine the fit".into()));
    }
    Ok([(d * r0 - b * r1) / det, (a * r1 - b * r0) / det])
}

/// Fits the property model to `anchors`.
pub fn fit_property_model(descriptors: &Descriptors, anchors: &[Anchor]) -> Result<PropertyModel> {
    if anchors.len() < 2 {
        return Err(Error::TooFewAnchors(anchors.len()));
    }
    let feats = anchors
        .iter()
        .map(|a| descriptors.lookup(&a.mof))
        .collect::<Result<Vec<_>>>()?;
    let pv_rows: Vec<_> = feats
        .iter()
        .zip(anchors)
        .map(|(&(l, m), a)| ([l, m / 100.0], a.pore_volume))
        .collect();
    let [alpha, beta] = lstsq2(&pv_rows)?;
    let h2_rows: Vec<_> = feats
        .iter()
        .zip(anchors)
        .map(|(&(l, m), a)| ([alpha * l + beta * m / 100.0, 100.0 / m], a.h2_uptake))
        .collect();
    let [gamma, delta] = lstsq2(&h2_rows)?;
    Ok(PropertyModel {
        alpha,
        beta,
        gamma,
        delta,
    })
}

/// One record per (topology, node, edge) combination, with seeded
/// multiplicative noise of relative half-width `noise` on each property.
pub fn synthesize_properties(vocab: &Vocabulary, seed: u64, anchors: &[Anchor]) -> Result<Vec<PropertyRecord>> {
    synthesize_with_noise(vocab, seed, anchors, DEFAULT_NOISE)
}

pub fn synthesize_with_noise(
    vocab: &Vocabulary,
    seed: u64,
    anchors: &[Anchor],
    noise: f64,
) -> Result<Vec<PropertyRecord>> {
    vocab.validate()?;
    if !(0.0..1.0).contains(&noise) {
        return Err(Error::Precondition(format!("noise must be in [0, 1), got {noise}")));
    }
    for a in anchors {
        vocab.check(&a.mof)?;
    }
    let desc = Descriptors::for_vocab(vocab);
    let model = fit_property_model(&desc, anchors)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut jitter = || 1.0 + noise * rng.random_range(-1.0..=1.0);
    vocab
        .combinations()
        .into_iter()
        .map(|mof| {
            let (l, m) = desc.lookup(&mof)?;
            let pv0 = model.pore_volume(l, m);
            let h20 = model.h2_uptake(pv0, m);
            let pore_volume = pv0 * jitter();
            let h2_uptake = h20 * jitter();
            if !(pore_volume > 0.0 && h2_uptake > 0.0) {
                return Err(Error::Calibration(format!("non-positive property for {mof}")));
            }
            Ok(PropertyRecord {
                mof,
                pore_volume,
                h2_uptake,
            })
        })
        .collect()
}
