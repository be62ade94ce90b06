use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use super::state::Statevector;
use crate::error::{Error, Result};

/// Measurement counts over all basis states of an `n_qubits` register.
///
/// Stored densely by basis index; bitstring keys put qubit 0 first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ShotsRepr", into = "ShotsRepr")]
pub struct ShotDistribution {
    n_qubits: usize,
    counts: Vec<u64>,
    total_shots: u64,
}

#[derive(Serialize, Deserialize)]
struct ShotsRepr {
    n_qubits: usize,
    total_shots: u64,
    counts: BTreeMap<String, u64>,
}

impl From<ShotDistribution> for ShotsRepr {
    fn from(d: ShotDistribution) -> Self {
        ShotsRepr {
            n_qubits: d.n_qubits,
            total_shots: d.total_shots,
            counts: d.iter().collect(),
        }
    }
}

impl TryFrom<ShotsRepr> for ShotDistribution {
    type Error = Error;

    fn try_from(r: ShotsRepr) -> Result<Self> {
        let d = ShotDistribution::from_counts(r.n_qubits, r.counts)?;
        if d.total_shots != r.total_shots {
            return Err(Error::Precondition(format!(
                "counts sum to {} but total_shots is {}",
                d.total_shots, r.total_shots
            )));
        }
        Ok(d)
    }
}

pub fn bitstring(index: usize, width: usize) -> String {
    if width == 0 {
        return String::new();
    }
    format!("{index:0width$b}")
}

fn parse_bitstring(key: &str, width: usize) -> Result<usize> {
    if key.len() != width || !key.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(Error::Precondition(format!(
            "bitstring `{key}` is not a {width}-bit string"
        )));
    }
    if width == 0 {
        return Ok(0);
    }
    Ok(usize::from_str_radix(key, 2).expect("validated binary digits"))
}

/// Index of `index` restricted to the qubits in `keep`, in `keep` order.
fn project(index: usize, n_qubits: usize, keep: &[usize]) -> usize {
    keep.iter().fold(0, |acc, &q| (acc << 1) | ((index >> (n_qubits - 1 - q)) & 1))
}

fn check_qubits(qubits: &[usize], n_qubits: usize) -> Result<()> {
    for &q in qubits {
        if q >= n_qubits {
            return Err(Error::QubitOutOfRange { qubit: q, n_qubits });
        }
    }
    Ok(())
}

impl ShotDistribution {
    /// Builds a distribution from bitstring counts; missing states count 0.
    pub fn from_counts<K, I>(n_qubits: usize, counts: I) -> Result<Self>
    where
        K: AsRef<str>,
        I: IntoIterator<Item = (K, u64)>,
    {
        let mut dense = vec![0u64; 1 << n_qubits];
        for (k, v) in counts {
            dense[parse_bitstring(k.as_ref(), n_qubits)?] += v;
        }
        Ok(Self::from_dense(n_qubits, dense))
    }

    fn from_dense(n_qubits: usize, counts: Vec<u64>) -> Self {
        let total_shots = counts.iter().sum();
        Self { n_qubits, counts, total_shots }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn total_shots(&self) -> u64 {
        self.total_shots
    }

    /// Count for a basis index.
    pub fn count(&self, index: usize) -> u64 {
        self.counts.get(index).copied().unwrap_or(0)
    }

    /// Count for a bitstring key; malformed keys count 0.
    pub fn get(&self, key: &str) -> u64 {
        parse_bitstring(key, self.n_qubits).map_or(0, |i| self.counts[i])
    }

    pub fn dense_counts(&self) -> &[u64] {
        &self.counts
    }

    /// Nonzero entries as (bitstring, count), in basis order.
    pub fn iter(&self) -> impl Iterator<Item = (String, u64)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(move |(i, &c)| (bitstring(i, self.n_qubits), c))
    }

    /// Sums out every qubit not in `keep`; result is ordered as `keep`.
    pub fn marginal(&self, keep: &[usize]) -> Result<ShotDistribution> {
        check_qubits(keep, self.n_qubits)?;
        let mut out = vec![0u64; 1 << keep.len()];
        for (i, &c) in self.counts.iter().enumerate() {
            out[project(i, self.n_qubits, keep)] += c;
        }
        Ok(Self::from_dense(keep.len(), out))
    }
}

/// Draws `shots` measurements of `state` in the computational basis.
///
/// Counts follow the multinomial over squared amplitudes, drawn as a chain of
/// conditional binomials from a ChaCha8 stream seeded with `seed`.
pub fn sample_shots(state: &Statevector, shots: u64, seed: u64) -> Result<ShotDistribution> {
    if shots == 0 {
        return Err(Error::ZeroShots);
    }
    let probs = state.probabilities();
    Ok(ShotDistribution::from_dense(
        state.n_qubits(),
        sample_multinomial(&probs, shots, seed),
    ))
}

fn sample_multinomial(probs: &[f64], shots: u64, seed: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; probs.len()];
    let Some(last) = probs.iter().rposition(|&p| p > 0.0) else {
        return counts;
    };
    let mut remaining = shots;
    let mut mass: f64 = probs[..=last].iter().sum();
    for (i, &p) in probs[..=last].iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if i == last {
            counts[i] = remaining;
            break;
        }
        if p <= 0.0 {
            continue;
        }
        let q = if mass > 0.0 { (p / mass).clamp(0.0, 1.0) } else { 1.0 };
        let k = Binomial::new(remaining, q)
            .expect("probability clamped to [0, 1]")
            .sample(&mut rng);
        counts[i] = k;
        remaining -= k;
        mass -= p;
    }
    counts
}

fn remaining_qubits(n_qubits: usize, zero_qubits: &[usize]) -> Vec<usize> {
    (0..n_qubits).filter(|q| !zero_qubits.contains(q)).collect()
}

fn passes(index: usize, n_qubits: usize, zero_qubits: &[usize]) -> bool {
    zero_qubits
        .iter()
        .all(|&q| (index >> (n_qubits - 1 - q)) & 1 == 0)
}

/// Keeps the shots where every qubit in `zero_qubits` reads 0 and projects
/// them onto the remaining qubits (ascending order).
///
/// Returns the projected counts and the retained fraction of all shots.
pub fn post_select(
    dist: &ShotDistribution,
    zero_qubits: &[usize],
) -> Result<(ShotDistribution, f64)> {
    check_qubits(zero_qubits, dist.n_qubits)?;
    if zero_qubits.is_empty() {
        return Ok((dist.clone(), 1.0));
    }
    let n = dist.n_qubits;
    let keep = remaining_qubits(n, zero_qubits);
    let mut out = vec![0u64; 1 << keep.len()];
    for (i, &c) in dist.counts.iter().enumerate() {
        if c > 0 && passes(i, n, zero_qubits) {
            out[project(i, n, &keep)] += c;
        }
    }
    let retained = ShotDistribution::from_dense(keep.len(), out);
    let fraction = if dist.total_shots == 0 {
        0.0
    } else {
        retained.total_shots as f64 / dist.total_shots as f64
    };
    Ok((retained, fraction))
}

/// Post-selection on exact probabilities instead of sampled counts.
///
/// Returns unnormalized weights over the remaining qubits and their mass.
pub fn post_select_exact(
    probs: &[f64],
    n_qubits: usize,
    zero_qubits: &[usize],
) -> Result<(Vec<f64>, f64)> {
    if probs.len() != 1 << n_qubits {
        return Err(Error::LengthMismatch {
            expected: 1 << n_qubits,
            got: probs.len(),
        });
    }
    check_qubits(zero_qubits, n_qubits)?;
    let keep = remaining_qubits(n_qubits, zero_qubits);
    let mut out = vec![0.0; 1 << keep.len()];
    for (i, &p) in probs.iter().enumerate() {
        if passes(i, n_qubits, zero_qubits) {
            out[project(i, n_qubits, &keep)] += p;
        }
    }
    let mass = out.iter().sum();
    Ok((out, mass))
}

/// Normalized probabilities over the basis states of the open wires.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProbVector(pub Vec<f64>);

impl ProbVector {
    pub fn uniform(len: usize) -> Self {
        ProbVector(vec![1.0 / len as f64; len])
    }

    /// Normalizes nonnegative weights; `None` when they sum to zero.
    pub fn from_weights(weights: Vec<f64>) -> Option<Self> {
        let total: f64 = weights.iter().sum();
        if total > 0.0 && total.is_finite() {
            Some(ProbVector(weights.into_iter().map(|w| w / total).collect()))
        } else {
            None
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Index of the largest entry; ties go to the lower index.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &p) in self.0.iter().enumerate() {
            if p > self.0[best] {
                best = i;
            }
        }
        best
    }
}

/// Turns post-selected counts over `width` open wires into probabilities.
///
/// Fails with [`Error::EmptyRetention`] when no shots survived.
pub fn vectorize(dist: &ShotDistribution, width: usize) -> Result<ProbVector> {
    if dist.n_qubits != width {
        return Err(Error::LengthMismatch {
            expected: width,
            got: dist.n_qubits,
        });
    }
    if dist.total_shots == 0 {
        return Err(Error::EmptyRetention);
    }
    let total = dist.total_shots as f64;
    Ok(ProbVector(
        dist.counts.iter().map(|&c| c as f64 / total).collect(),
    ))
}
