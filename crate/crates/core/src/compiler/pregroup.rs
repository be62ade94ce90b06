use std::fmt;

use serde::{Deserialize, Serialize};

/// Simple pregroup types over the single base type `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PregroupType {
    #[serde(rename = "n")]
    N,
    /// Left adjoint nˡ.
    #[serde(rename = "nl")]
    NLeft,
    /// Right adjoint nʳ.
    #[serde(rename = "nr")]
    NRight,
}

impl PregroupType {
    /// Whether `self · other` reduces to the unit: p·pʳ → 1 or pˡ·p → 1.
    pub fn cancels_with(self, other: PregroupType) -> bool {
        matches!(
            (self, other),
            (PregroupType::N, PregroupType::NRight) | (PregroupType::NLeft, PregroupType::N)
        )
    }
}

impl fmt::Display for PregroupType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PregroupType::N => "n",
            PregroupType::NLeft => "nˡ",
            PregroupType::NRight => "nʳ",
        })
    }
}

/// Result of contracting a type list: the cups used and what is left over.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction {
    /// Pairs of positions in the input list joined by a cup, left < right.
    pub cups: Vec<(usize, usize)>,
    /// Positions in the input list that survive.
    pub residual_positions: Vec<usize>,
    pub residual: Vec<PregroupType>,
}

/// Contracts adjacent reducible pairs left to right until none remain.
///
/// A stack pass: each incoming type cancels against the current top if the
/// pair reduces, which is the same as always reducing the leftmost pair.
pub fn pregroup_contract(types: &[PregroupType]) -> Reduction {
    let mut stack: Vec<usize> = Vec::with_capacity(types.len());
    let mut cups = Vec::new();
    for (i, &t) in types.iter().enumerate() {
        match stack.last() {
            Some(&top) if types[top].cancels_with(t) => {
                stack.pop();
                cups.push((top, i));
            }
            _ => stack.push(i),
        }
    }
    Reduction {
        residual: stack.iter().map(|&i| types[i]).collect(),
        residual_positions: stack,
        cups,
    }
}

/// Residual type list after exhaustive adjacent reduction.
pub fn pregroup_reduce(types: &[PregroupType]) -> Vec<PregroupType> {
    pregroup_contract(types).residual
}

#[cfg(test)]
mod tests {
    use super::PregroupType::{NLeft as L, NRight as R, N};
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sentence_reduces_to_n() {
        assert_eq!(pregroup_reduce(&[N, L, N, R, N]), vec![N]);
    }

    #[test]
    fn already_reduced() {
        assert_eq!(pregroup_reduce(&[N]), vec![N]);
        assert_eq!(pregroup_reduce(&[]), vec![]);
    }

    #[test]
    fn no_rule_applies() {
        assert_eq!(pregroup_reduce(&[R, N]), vec![R, N]);
        assert_eq!(pregroup_reduce(&[N, L]), vec![N, L]);
    }

    #[test]
    fn cups_are_nested() {
        let r = pregroup_contract(&[N, L, N, R, N]);
        assert_eq!(r.cups, vec![(1, 2), (0, 3)]);
        assert_eq!(r.residual_positions, vec![4]);
    }

    fn naive(mut t: Vec<PregroupType>) -> Vec<PregroupType> {
        loop {
            let hit = (0..t.len().saturating_sub(1)).find(|&i| t[i].cancels_with(t[i + 1]));
            match hit {
                Some(i) => {
                    t.drain(i..i + 2);
                }
                None => return t,
            }
        }
    }

    proptest! {
        #[test]
        fn matches_leftmost_rewriting(v in prop::collection::vec(prop_oneof![Just(N), Just(L), Just(R)], 0..12)) {
            let r = pregroup_contract(&v);
            prop_assert_eq!(&r.residual, &naive(v.clone()));
            // every input position is either cupped or residual, exactly once
            let mut seen = vec![0u8; v.len()];
            for &(a, b) in &r.cups {
                prop_assert!(a < b);
                prop_assert!(v[a].cancels_with(v[b]));
                seen[a] += 1;
                seen[b] += 1;
            }
            for &p in &r.residual_positions {
                seen[p] += 1;
            }
            prop_assert!(seen.iter().all(|&s| s == 1));
        }
    }
}
