//! CART-style decision tree over numeric slots.
//!
//! Splits test `x[slot] <= threshold` with thresholds at midpoints of
//! consecutive distinct values, chosen by Gini impurity reduction. Ties are
//! broken toward the lowest slot index, then the lowest threshold, by
//! scanning slots and thresholds in ascending order and keeping the first
//! strictly better split. Training is deterministic.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    /// `None` grows the tree until leaves are pure or indivisible.
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            max_depth: None,
            min_samples_split: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
enum Node {
    Split {
        slot: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        distribution: Vec<f64>,
    },
}

/// A fitted multiclass tree. Leaves hold class-probability distributions
/// over the training class set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeModel {
    nodes: Vec<Node>,
    width: usize,
    class_count: usize,
}

impl TreeModel {
    /// Fit on row-major features and class ids in `0..class_count`.
    pub fn fit(
        rows: &[Vec<f64>],
        classes: &[usize],
        class_count: usize,
        params: &TreeParams,
    ) -> Result<Self> {
        if rows.is_empty() || rows.len() != classes.len() {
            return Err(Error::EmptyTrainingSet);
        }
        let width = rows[0].len();
        for row in rows {
            if row.len() != width {
                return Err(Error::WidthMismatch {
                    expected: width,
                    actual: row.len(),
                });
            }
        }
        if let Some(&bad) = classes.iter().find(|&&c| c >= class_count) {
            return Err(Error::Internal(format!(
                "class id {bad} out of range {class_count}"
            )));
        }

        let mut builder = Builder {
            rows,
            classes,
            class_count,
            params,
            nodes: Vec::new(),
        };
        let indices: Vec<usize> = (0..rows.len()).collect();
        builder.build(&indices, 0);
        Ok(TreeModel {
            nodes: builder.nodes,
            width,
            class_count,
        })
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn depth(&self) -> usize {
        self.depth_from(self.root())
    }

    // nodes are pushed in post-order, so the root is the last node
    fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    fn depth_from(&self, index: usize) -> usize {
        match &self.nodes[index] {
            Node::Leaf { .. } => 0,
            Node::Split { left, right, .. } => {
                1 + self.depth_from(*left).max(self.depth_from(*right))
            }
        }
    }

    /// Class-probability distribution for one input.
    pub fn predict_proba(&self, x: &[f64]) -> Result<&[f64]> {
        if x.len() != self.width {
            return Err(Error::WidthMismatch {
                expected: self.width,
                actual: x.len(),
            });
        }
        let mut index = self.root();
        loop {
            match &self.nodes[index] {
                Node::Leaf { distribution } => return Ok(distribution),
                Node::Split {
                    slot,
                    threshold,
                    left,
                    right,
                } => {
                    index = if x[*slot] <= *threshold { *left } else { *right };
                }
            }
        }
    }

    /// Most likely class, ties broken toward the lowest class id.
    pub fn predict(&self, x: &[f64]) -> Result<usize> {
        let dist = self.predict_proba(x)?;
        let mut best = 0;
        for (c, p) in dist.iter().enumerate() {
            if *p > dist[best] {
                best = c;
            }
        }
        Ok(best)
    }

    pub fn training_accuracy(&self, rows: &[Vec<f64>], classes: &[usize]) -> Result<f64> {
        let mut hits = 0;
        for (row, class) in rows.iter().zip(classes) {
            if self.predict(row)? == *class {
                hits += 1;
            }
        }
        Ok(hits as f64 / rows.len().max(1) as f64)
    }
}

struct Builder<'a> {
    rows: &'a [Vec<f64>],
    classes: &'a [usize],
    class_count: usize,
    params: &'a TreeParams,
    nodes: Vec<Node>,
}

struct BestSplit {
    gain: f64,
    slot: usize,
    threshold: f64,
}

impl<'a> Builder<'a> {
    fn build(&mut self, indices: &[usize], depth: usize) -> usize {
        let counts = self.class_counts(indices);
        let total = indices.len();

        let depth_exhausted = self
            .params
            .max_depth
            .is_some_and(|limit| depth >= limit);
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;

        if pure || total < self.params.min_samples_split || depth_exhausted {
            return self.push_leaf(&counts, total);
        }
        match self.best_split(indices, &counts) {
            None => self.push_leaf(&counts, total),
            Some(split) => {
                let (left_idx, right_idx): (Vec<usize>, Vec<usize>) = indices
                    .iter()
                    .partition(|&&i| self.rows[i][split.slot] <= split.threshold);
                let slot = split.slot;
                let threshold = split.threshold;
                let left = self.build(&left_idx, depth + 1);
                let right = self.build(&right_idx, depth + 1);
                self.nodes.push(Node::Split {
                    slot,
                    threshold,
                    left,
                    right,
                });
                self.nodes.len() - 1
            }
        }
    }

    fn push_leaf(&mut self, counts: &[u32], total: usize) -> usize {
        let distribution = counts
            .iter()
            .map(|&c| c as f64 / total.max(1) as f64)
            .collect();
        self.nodes.push(Node::Leaf { distribution });
        self.nodes.len() - 1
    }

    fn class_counts(&self, indices: &[usize]) -> Vec<u32> {
        let mut counts = vec![0u32; self.class_count];
        for &i in indices {
            counts[self.classes[i]] += 1;
        }
        counts
    }

    fn best_split(&self, indices: &[usize], parent_counts: &[u32]) -> Option<BestSplit> {
        let total = indices.len() as f64;
        let parent_impurity = gini(parent_counts, total);
        let width = self.rows[indices[0]].len();

        let mut best: Option<BestSplit> = None;
        let mut order: Vec<usize> = indices.to_vec();
        for slot in 0..width {
            order.sort_by(|&a, &b| self.rows[a][slot].total_cmp(&self.rows[b][slot]));

            let mut left_counts = vec![0u32; self.class_count];
            let mut right_counts = parent_counts.to_vec();
            for pos in 0..order.len() - 1 {
                let class = self.classes[order[pos]];
                left_counts[class] += 1;
                right_counts[class] -= 1;

                let here = self.rows[order[pos]][slot];
                let next = self.rows[order[pos + 1]][slot];
                if here == next {
                    continue;
                }
                let left_n = (pos + 1) as f64;
                let right_n = total - left_n;
                let weighted = left_n / total * gini(&left_counts, left_n)
                    + right_n / total * gini(&right_counts, right_n);
                let gain = parent_impurity - weighted;
                if gain > 0.0 && best.as_ref().is_none_or(|b| gain > b.gain) {
                    best = Some(BestSplit {
                        gain,
                        slot,
                        threshold: here + (next - here) / 2.0,
                    });
                }
            }
        }
        best
    }
}

fn gini(counts: &[u32], total: f64) -> f64 {
    if total <= 0.0 {
        return 0.0;
    }
    let mut sum = 0.0;
    for &c in counts {
        let p = c as f64 / total;
        sum += p * p;
    }
    1.0 - sum
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fit(rows: &[Vec<f64>], classes: &[usize], classes_n: usize) -> TreeModel {
        TreeModel::fit(rows, classes, classes_n, &TreeParams::default()).unwrap()
    }

    #[test]
    fn single_point_gives_single_leaf() {
        let model = fit(&[vec![1.0, 2.0]], &[0], 2);
        assert_eq!(model.depth(), 0);
        assert_eq!(model.predict_proba(&[9.0, 9.0]).unwrap(), &[1.0, 0.0]);
    }

    #[test]
    fn separable_data_trains_to_depth_one() {
        let rows = vec![vec![0.0], vec![1.0]];
        let model = fit(&rows, &[0, 1], 2);
        assert_eq!(model.depth(), 1);
        assert_eq!(model.training_accuracy(&rows, &[0, 1]).unwrap(), 1.0);
        assert_eq!(model.predict_proba(&[0.2]).unwrap(), &[1.0, 0.0]);
        assert_eq!(model.predict_proba(&[0.8]).unwrap(), &[0.0, 1.0]);
    }

    #[test]
    fn leaf_distributions_sum_to_one() {
        let rows = vec![vec![0.0], vec![0.0], vec![1.0], vec![1.0], vec![2.0]];
        let classes = vec![0, 1, 1, 1, 2];
        let model = fit(&rows, &classes, 3);
        for row in &rows {
            let dist = model.predict_proba(row).unwrap();
            let sum: f64 = dist.iter().sum();
            assert!((sum - 1.0).abs() < 1e-9);
            assert!(dist.iter().all(|p| *p >= 0.0));
        }
    }

    #[test]
    fn mixed_identical_rows_stay_mixed() {
        let rows = vec![vec![1.0], vec![1.0]];
        let model = fit(&rows, &[0, 1], 2);
        assert_eq!(model.depth(), 0);
        assert_eq!(model.predict_proba(&[1.0]).unwrap(), &[0.5, 0.5]);
    }

    #[test]
    fn accuracy_is_monotone_in_depth() {
        // same slot values with noisy classes: deeper trees can only fit
        // the training data better
        let rows: Vec<Vec<f64>> = (0..32)
            .map(|i| vec![(i % 8) as f64, (i / 8) as f64, (i % 3) as f64])
            .collect();
        let classes: Vec<usize> = (0..32).map(|i| (i * 7 + i / 5) % 3).collect();
        let mut previous = 0.0;
        for depth in 0..8 {
            let params = TreeParams {
                max_depth: Some(depth),
                min_samples_split: 2,
            };
            let model = TreeModel::fit(&rows, &classes, 3, &params).unwrap();
            let acc = model.training_accuracy(&rows, &classes).unwrap();
            assert!(
                acc + 1e-12 >= previous,
                "accuracy dropped from {previous} to {acc} at depth {depth}"
            );
            previous = acc;
        }
    }

    #[test]
    fn refit_is_deterministic() {
        let rows: Vec<Vec<f64>> = (0..50)
            .map(|i| vec![(i % 5) as f64, (i % 7) as f64, (i % 2) as f64])
            .collect();
        let classes: Vec<usize> = (0..50).map(|i| (i * 3) % 4).collect();
        let a = fit(&rows, &classes, 4);
        let b = fit(&rows, &classes, 4);
        assert_eq!(a, b);
    }

    #[test]
    fn width_mismatch_is_rejected() {
        let model = fit(&[vec![0.0, 1.0]], &[0], 1);
        assert!(matches!(
            model.predict_proba(&[0.0]),
            Err(Error::WidthMismatch { .. })
        ));
        assert!(TreeModel::fit(
            &[vec![0.0], vec![0.0, 1.0]],
            &[0, 0],
            1,
            &TreeParams::default()
        )
        .is_err());
    }

    #[test]
    fn empty_data_is_rejected() {
        assert!(matches!(
            TreeModel::fit(&[], &[], 2, &TreeParams::default()),
            Err(Error::EmptyTrainingSet)
        ));
    }

    #[test]
    fn fixture_memorization_bound() {
        use crate::evaluation::PreparedDataset;
        use crate::fixture;

        let prep = PreparedDataset::from_dataset(&fixture::dataset(), &fixture::gazetteer());
        let rows: Vec<Vec<f64>> = prep.vectors.iter().map(|v| v.slots.clone()).collect();
        // classes: distinct label combination ids
        let mut combos: Vec<&crate::dataset::LabelVector> = Vec::new();
        let classes: Vec<usize> = prep
            .labels
            .iter()
            .map(|l| {
                match combos.iter().position(|c| *c == l) {
                    Some(i) => i,
                    None => {
                        combos.push(l);
                        combos.len() - 1
                    }
                }
            })
            .collect();
        let model = fit(&rows, &classes, combos.len());
        let accuracy = model.training_accuracy(&rows, &classes).unwrap();

        // count questions whose full feature vector is unique
        let unique = rows
            .iter()
            .filter(|r| rows.iter().filter(|o| o == r).count() == 1)
            .count();
        assert!(
            accuracy >= unique as f64 / rows.len() as f64,
            "accuracy {accuracy} below memorization bound {unique}/100"
        );
    }
}
