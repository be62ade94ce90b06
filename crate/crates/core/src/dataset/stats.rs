use serde::{Deserialize, Serialize};

use super::{LabelMode, LabeledDataset};
use crate::error::{Error, Result};

/// A building block is significant for a class when it occurs in at least
/// this many of the class's MOFs.
pub const SIGNIFICANCE_COUNT: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenCounts {
    pub token: String,
    /// Occurrences per quaternary class.
    pub counts: Vec<usize>,
    pub significant: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignificanceTable {
    pub nodes: Vec<TokenCounts>,
    pub edges: Vec<TokenCounts>,
}

fn tally<'a>(tokens: impl Iterator<Item = (&'a str, usize)>) -> Vec<TokenCounts> {
    let mut out: Vec<TokenCounts> = Vec::new();
    for (tok, class) in tokens {
        let pos = match out.iter().position(|t| t.token == tok) {
            Some(p) => p,
            None => {
                out.push(TokenCounts {
                    token: tok.to_string(),
                    counts: vec![0; 4],
                    significant: vec![false; 4],
                });
                out.len() - 1
            }
        };
        out[pos].counts[class] += 1;
    }
    for t in &mut out {
        t.significant = t.counts.iter().map(|&c| c >= SIGNIFICANCE_COUNT).collect();
    }
    out
}

/// Per-class occurrence counts of every node and edge token, in order of
/// first appearance.
pub fn class_significance(labeled: &LabeledDataset) -> Result<SignificanceTable> {
    if labeled.mode != LabelMode::Quaternary {
        return Err(Error::Labeling("significance needs quaternary labels".into()));
    }
    let rows = || labeled.records.iter().zip(labeled.labels.iter().copied());
    Ok(SignificanceTable {
        nodes: tally(rows().map(|(r, l)| (r.mof.node.as_str(), l))),
        edges: tally(rows().map(|(r, l)| (r.mof.edge.as_str(), l))),
    })
}

/// Unit-cell information capacity: the product of the multiplicities.
pub fn compute_ucic(multiplicities: &[i64]) -> Result<u64> {
    multiplicities.iter().try_fold(1u64, |acc, &m| {
        if m < 1 {
            return Err(Error::InvalidMultiplicity(m));
        }
        acc.checked_mul(m as u64).ok_or(Error::MultiplicityOverflow)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compiler::MofName;
    use crate::dataset::{BinaryRule, Property, PropertyRecord};

    #[test]
    fn ucic_examples() {
        assert_eq!(compute_ucic(&[2, 3]).unwrap(), 6);
        assert_eq!(compute_ucic(&[]).unwrap(), 1);
        assert_eq!(compute_ucic(&[1, 10, 15]).unwrap(), 150);
        assert!(matches!(compute_ucic(&[2, 0]), Err(Error::InvalidMultiplicity(0))));
        assert!(matches!(compute_ucic(&[-3]), Err(Error::InvalidMultiplicity(-3))));
        assert!(matches!(compute_ucic(&[i64::MAX, 3]), Err(Error::MultiplicityOverflow)));
    }

    #[test]
    fn edge_concentrated_in_one_class() {
        // 10 MOFs share edge E1 and hold the 10 lowest values; 30 others
        // use distinct edges.
        let mut records = Vec::new();
        for i in 0..10 {
            records.push(PropertyRecord {
                mof: MofName::new("pcu", format!("N{i}"), "E1"),
                pore_volume: 0.1 + i as f64 * 0.001,
                h2_uptake: 1.0,
            });
        }
        for i in 0..30 {
            records.push(PropertyRecord {
                mof: MofName::new("pcu", format!("N{i}"), format!("X{i}")),
                pore_volume: 1.0 + i as f64,
                h2_uptake: 1.0,
            });
        }
        let d = crate::dataset::assign_labels(records, Property::PoreVolume, LabelMode::Quaternary, BinaryRule::Median)
            .unwrap();
        let t = class_significance(&d).unwrap();
        let e1 = t.edges.iter().find(|t| t.token == "E1").unwrap();
        assert_eq!(e1.counts, vec![10, 0, 0, 0]);
        assert_eq!(e1.significant, vec![true, false, false, false]);
        // conservation
        for class in 0..4 {
            let size = d.labels.iter().filter(|&&l| l == class).count();
            assert_eq!(t.nodes.iter().map(|n| n.counts[class]).sum::<usize>(), size);
            assert_eq!(t.edges.iter().map(|n| n.counts[class]).sum::<usize>(), size);
        }
    }
}
