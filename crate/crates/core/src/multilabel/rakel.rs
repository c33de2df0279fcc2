//! Random k-labelset ensembles over label-combination submodels.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::learners::TreeParams;
use crate::multilabel::powerset::PowersetModel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct RakelCell {
    labels: Vec<usize>,
    model: PowersetModel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub(crate) struct RakelModel {
    cells: Vec<RakelCell>,
}

fn fit_cell(
    rows: &[Vec<f64>],
    labels: &[Vec<bool>],
    members: Vec<usize>,
    tree_params: &TreeParams,
) -> Result<RakelCell> {
    let local: Vec<Vec<bool>> = labels
        .iter()
        .map(|combo| members.iter().map(|&l| combo[l]).collect())
        .collect();
    let model = PowersetModel::fit(rows, &local, tree_params)?;
    Ok(RakelCell {
        labels: members,
        model,
    })
}

impl RakelModel {
    /// Disjoint variant: shuffle the labels with the seeded RNG and cut the
    /// sequence into cells of k; a remainder shorter than k forms the final
    /// cell.
    pub(crate) fn fit_disjoint(
        rows: &[Vec<f64>],
        labels: &[Vec<bool>],
        k: usize,
        tree_params: &TreeParams,
        seed: u64,
    ) -> Result<Self> {
        let label_count = labels.first().map(Vec::len).unwrap_or(0);
        let k = k.min(label_count).max(1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut order: Vec<usize> = (0..label_count).collect();
        order.shuffle(&mut rng);

        let mut cells = Vec::new();
        for chunk in order.chunks(k) {
            cells.push(fit_cell(rows, labels, chunk.to_vec(), tree_params)?);
        }
        Ok(RakelModel { cells })
    }

    /// Overlapping variant: sample `ensemble` distinct k-subsets.
    pub(crate) fn fit_overlapping(
        rows: &[Vec<f64>],
        labels: &[Vec<bool>],
        k: usize,
        ensemble: usize,
        tree_params: &TreeParams,
        seed: u64,
    ) -> Result<Self> {
        let label_count = labels.first().map(Vec::len).unwrap_or(0);
        let k = k.min(label_count).max(1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);

        let mut subsets: Vec<Vec<usize>> = Vec::new();
        let mut attempts = 0;
        while subsets.len() < ensemble && attempts < ensemble * 50 {
            attempts += 1;
            let mut order: Vec<usize> = (0..label_count).collect();
            order.shuffle(&mut rng);
            let mut subset: Vec<usize> = order.into_iter().take(k).collect();
            subset.sort_unstable();
            if !subsets.contains(&subset) {
                subsets.push(subset);
            }
        }

        let mut cells = Vec::new();
        for subset in subsets {
            cells.push(fit_cell(rows, labels, subset, tree_params)?);
        }
        Ok(RakelModel { cells })
    }

    /// Per-label score averaged over the cells containing the label
    /// (disjoint cells cover each label exactly once, so the average is the
    /// cell marginal itself). A label covered by no cell scores zero.
    pub(crate) fn scores(&self, x: &[f64], label_count: usize) -> Result<Vec<f64>> {
        let mut sums = vec![0.0; label_count];
        let mut coverage = vec![0u32; label_count];
        for cell in &self.cells {
            let local = cell.model.scores(x)?;
            for (&label, score) in cell.labels.iter().zip(&local) {
                sums[label] += score;
                coverage[label] += 1;
            }
        }
        Ok(sums
            .iter()
            .zip(&coverage)
            .map(|(sum, &count)| if count == 0 { 0.0 } else { sum / count as f64 })
            .collect())
    }
}
