use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::LabeledDataset;
use crate::error::{Error, Result};

/// Train/validation/test record indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Splits {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitName {
    Train,
    Val,
    Test,
}

impl Splits {
    pub fn get(&self, which: SplitName) -> &[usize] {
        match which {
            SplitName::Train => &self.train,
            SplitName::Val => &self.val,
            SplitName::Test => &self.test,
        }
    }

    pub fn sizes(&self) -> [usize; 3] {
        [self.train.len(), self.val.len(), self.test.len()]
    }
}

/// 17:7:6 proportions, i.e. 85/35/30 for 150 records.
pub fn default_split_sizes(n: usize) -> [usize; 3] {
    let train = ((17 * n) as f64 / 30.0).round() as usize;
    let val = ((7 * n) as f64 / 30.0).round() as usize;
    let val = val.min(n - train.min(n));
    [train.min(n), val, n - train.min(n) - val]
}

/// Per-(class, split) counts whose row sums are the class sizes, column sums
/// the split sizes, and every cell within one of its proportional share.
pub fn stratified_counts(class_sizes: &[usize], split_sizes: &[usize]) -> Vec<Vec<usize>> {
    let total: usize = class_sizes.iter().sum();
    let mut cells: Vec<Vec<usize>> = class_sizes
        .iter()
        .map(|&c| {
            split_sizes
                .iter()
                .map(|&s| (c * s).checked_div(total).unwrap_or(0))
                .collect()
        })
        .collect();
    let mut row_need: Vec<usize> = class_sizes
        .iter()
        .zip(&cells)
        .map(|(&c, row)| c - row.iter().sum::<usize>())
        .collect();
    let mut col_need: Vec<usize> = split_sizes
        .iter()
        .enumerate()
        .map(|(j, &s)| s - cells.iter().map(|r| r[j]).sum::<usize>())
        .collect();
    // Deficits go to cells with a nonzero fractional share, at most one
    // each. The fractional parts are a feasible fractional solution, so an
    // integral one exists; find it with augmenting paths.
    let eligible = |i: usize, j: usize| total > 0 && !(class_sizes[i] * split_sizes[j]).is_multiple_of(total);
    let (rows, cols) = (class_sizes.len(), split_sizes.len());
    let mut extra = vec![vec![false; cols]; rows];
    for (i, need) in row_need.iter_mut().enumerate() {
        while *need > 0 {
            let mut seen = vec![false; cols];
            if !augment(i, &eligible, &mut extra, &mut col_need, &mut seen) {
                break;
            }
            *need -= 1;
        }
    }
    for (row, ex) in cells.iter_mut().zip(&extra) {
        for (c, &e) in row.iter_mut().zip(ex) {
            *c += usize::from(e);
        }
    }
    debug_assert!(row_need.iter().all(|&r| r == 0) && col_need.iter().all(|&c| c == 0));
    cells
}

/// Finds one more unit for row `i`: a free eligible column, or a column whose
/// unit can be handed to another row.
fn augment(
    i: usize,
    eligible: &dyn Fn(usize, usize) -> bool,
    extra: &mut [Vec<bool>],
    col_need: &mut [usize],
    seen: &mut [bool],
) -> bool {
    for j in 0..col_need.len() {
        if seen[j] || extra[i][j] || !eligible(i, j) {
            continue;
        }
        seen[j] = true;
        if col_need[j] > 0 {
            col_need[j] -= 1;
            extra[i][j] = true;
            return true;
        }
        // column j is full: try to move one of its holders elsewhere
        for k in 0..extra.len() {
            if k != i && extra[k][j] && augment(k, eligible, extra, col_need, seen) {
                extra[k][j] = false;
                extra[i][j] = true;
                return true;
            }
        }
    }
    false
}

/// Stratified seeded split with explicit sizes, which must sum to the
/// number of records.
pub fn split_with_sizes(labeled: &LabeledDataset, sizes: [usize; 3], seed: u64) -> Result<Splits> {
    let n = labeled.records.len();
    let requested: usize = sizes.iter().sum();
    if requested > n {
        return Err(Error::SplitTooLarge {
            requested,
            available: n,
        });
    }
    if requested < n {
        return Err(Error::Precondition(format!(
            "split sizes {requested} leave {} records unassigned",
            n - requested
        )));
    }
    let k = labeled.mode.n_classes();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (i, &l) in labeled.labels.iter().enumerate() {
        members[l].push(i);
    }
    let class_sizes: Vec<usize> = members.iter().map(Vec::len).collect();
    let counts = stratified_counts(&class_sizes, &sizes);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = [Vec::new(), Vec::new(), Vec::new()];
    for (class, mut idx) in members.into_iter().enumerate() {
        idx.shuffle(&mut rng);
        let mut it = idx.into_iter();
        for (s, bucket) in out.iter_mut().enumerate() {
            bucket.extend(it.by_ref().take(counts[class][s]));
        }
    }
    for b in &mut out {
        b.sort_unstable();
    }
    let [train, val, test] = out;
    Ok(Splits { train, val, test })
}

/// Stratified 17:7:6 split; returns the dataset with splits attached.
pub fn split_dataset(mut labeled: LabeledDataset, seed: u64) -> Result<LabeledDataset> {
    let sizes = default_split_sizes(labeled.records.len());
    labeled.splits = Some(split_with_sizes(&labeled, sizes, seed)?);
    Ok(labeled)
}
