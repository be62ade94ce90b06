use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Simultaneous perturbation stochastic approximation with the usual gain
/// sequences `a_k = a / (A + k + 1)^alpha` and `c_k = c / (k + 1)^gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spsa {
    pub a: f64,
    pub c: f64,
    #[serde(rename = "A")]
    pub big_a: f64,
    pub alpha: f64,
    pub gamma: f64,
}

impl Default for Spsa {
    fn default() -> Self {
        Self {
            a: 0.05,
            c: 0.06,
            big_a: 0.01,
            alpha: 0.602,
            gamma: 0.101,
        }
    }
}

/// Losses seen by one SPSA iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Probes {
    pub plus: f64,
    pub minus: f64,
}

impl Spsa {
    pub fn a_k(&self, k: usize) -> f64 {
        self.a / (self.big_a + k as f64 + 1.0).powf(self.alpha)
    }

    pub fn c_k(&self, k: usize) -> f64 {
        self.c / (k as f64 + 1.0).powf(self.gamma)
    }

    /// Random ±1 direction.
    pub fn perturbation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
        (0..n)
            .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
            .collect()
    }

    /// One iteration in place. `loss` is called on θ + c_k·Δ, then θ − c_k·Δ.
    pub fn step<R, F>(&self, k: usize, theta: &mut [f64], rng: &mut R, mut loss: F) -> Result<Probes>
    where
        R: Rng + ?Sized,
        F: FnMut(&[f64]) -> Result<f64>,
    {
        let delta = Self::perturbation(theta.len(), rng);
        let ck = self.c_k(k);
        let plus_pt: Vec<f64> = theta.iter().zip(&delta).map(|(t, d)| t + ck * d).collect();
        let minus_pt: Vec<f64> = theta.iter().zip(&delta).map(|(t, d)| t - ck * d).collect();
        let plus = loss(&plus_pt)?;
        let minus = loss(&minus_pt)?;
        let ak = self.a_k(k);
        let diff = (plus - minus) / (2.0 * ck);
        for (t, d) in theta.iter_mut().zip(&delta) {
            // Δᵢ = ±1, so dividing by it is multiplying by it
            *t -= ak * diff * d;
        }
        Ok(Probes { plus, minus })
    }

    /// Runs `iterations` steps from `theta` and returns the final point.
    pub fn minimize<R, F>(&self, mut theta: Vec<f64>, iterations: usize, rng: &mut R, mut loss: F) -> Result<Vec<f64>>
    where
        R: Rng + ?Sized,
        F: FnMut(&[f64]) -> Result<f64>,
    {
        for k in 0..iterations {
            self.step(k, &mut theta, rng, &mut loss)?;
        }
        Ok(theta)
    }
}
