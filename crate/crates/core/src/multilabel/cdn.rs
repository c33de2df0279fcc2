//! Conditional dependency network: one logistic node per label, each
//! conditioned on the features plus all other labels, with marginals
//! estimated by Gibbs sampling.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::learners::{LogisticModel, LogisticParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub(crate) struct CdnModel {
    nodes: Vec<LogisticModel>,
}

impl CdnModel {
    pub(crate) fn fit(
        rows: &[Vec<f64>],
        labels: &[Vec<bool>],
        logistic: &LogisticParams,
    ) -> Result<Self> {
        let label_count = labels.first().map(Vec::len).unwrap_or(0);
        let mut nodes = Vec::with_capacity(label_count);
        for label in 0..label_count {
            let augmented: Vec<Vec<f64>> = rows
                .iter()
                .zip(labels)
                .map(|(row, combo)| augment(row, combo, label))
                .collect();
            let targets: Vec<bool> = labels.iter().map(|l| l[label]).collect();
            nodes.push(LogisticModel::fit(&augmented, &targets, logistic)?);
        }
        Ok(CdnModel { nodes })
    }

    /// Build a test-only network directly from node models.
    #[cfg(test)]
    pub(crate) fn from_nodes(nodes: Vec<LogisticModel>) -> Self {
        CdnModel { nodes }
    }

    /// Gibbs sweeps over the labels in index order, re-sampling each label
    /// from its node conditioned on the current state of the others. The
    /// reported marginal is the mean of the conditional probabilities over
    /// the post-burn-in sweeps, which is exact for an uninformative network.
    pub(crate) fn scores(
        &self,
        x: &[f64],
        seed: u64,
        iterations: usize,
        burn_in: usize,
    ) -> Result<Vec<f64>> {
        let label_count = self.nodes.len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut state: Vec<bool> = (0..label_count).map(|_| rng.random_bool(0.5)).collect();
        let mut sums = vec![0.0; label_count];

        for sweep in 0..iterations {
            for label in 0..label_count {
                let augmented = augment(x, &state, label);
                let p = self.nodes[label].predict_proba(&augmented)?;
                if sweep >= burn_in {
                    sums[label] += p;
                }
                state[label] = rng.random_bool(p.clamp(0.0, 1.0));
            }
        }
        let samples = (iterations - burn_in) as f64;
        Ok(sums.iter().map(|s| s / samples).collect())
    }
}

fn augment(row: &[f64], combo: &[bool], skip: usize) -> Vec<f64> {
    let mut x = row.to_vec();
    for (label, &value) in combo.iter().enumerate() {
        if label != skip {
            x.push(value as u8 as f64);
        }
    }
    x
}
