//! Binary relevance and the classifier-chain family.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learners::{TreeModel, TreeParams};
use crate::multilabel::MultiLabelParams;
use crate::selection::{argmax_with_policy, SelectionPolicy, TieBreak};

/// Fit a two-class tree on boolean targets (false maps to class 0).
pub(crate) fn binary_tree_fit(
    rows: &[Vec<f64>],
    targets: &[bool],
    params: &TreeParams,
) -> Result<TreeModel> {
    let classes: Vec<usize> = targets.iter().map(|&t| t as usize).collect();
    TreeModel::fit(rows, &classes, 2, params)
}

/// Probability of the positive class.
pub(crate) fn binary_score(model: &TreeModel, x: &[f64]) -> Result<f64> {
    Ok(model.predict_proba(x)?[1])
}

/// One independent binary tree per label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub(crate) struct BinaryRelevance {
    models: Vec<TreeModel>,
}

impl BinaryRelevance {
    pub(crate) fn fit(
        rows: &[Vec<f64>],
        labels: &[Vec<bool>],
        tree_params: &TreeParams,
    ) -> Result<Self> {
        let label_count = labels.first().map(Vec::len).unwrap_or(0);
        let mut models = Vec::with_capacity(label_count);
        for label in 0..label_count {
            let targets: Vec<bool> = labels.iter().map(|l| l[label]).collect();
            models.push(binary_tree_fit(rows, &targets, tree_params)?);
        }
        Ok(BinaryRelevance { models })
    }

    pub(crate) fn scores(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.models.iter().map(|m| binary_score(m, x)).collect()
    }
}

/// Binary classifiers in a fixed chain order; the model at position `p`
/// sees the features augmented with the labels of the earlier positions —
/// true labels at training time, thresholded predictions at prediction
/// time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub(crate) struct ChainModel {
    order: Vec<usize>,
    models: Vec<TreeModel>,
}

impl ChainModel {
    pub(crate) fn fit(
        rows: &[Vec<f64>],
        labels: &[Vec<bool>],
        order: Vec<usize>,
        tree_params: &TreeParams,
    ) -> Result<Self> {
        let mut models = Vec::with_capacity(order.len());
        for position in 0..order.len() {
            let augmented: Vec<Vec<f64>> = rows
                .iter()
                .zip(labels)
                .map(|(row, combo)| {
                    let mut x = row.clone();
                    for &earlier in &order[..position] {
                        x.push(combo[earlier] as u8 as f64);
                    }
                    x
                })
                .collect();
            let targets: Vec<bool> = labels.iter().map(|l| l[order[position]]).collect();
            models.push(binary_tree_fit(&augmented, &targets, tree_params)?);
        }
        Ok(ChainModel { order, models })
    }

    pub(crate) fn scores(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut scores = vec![0.0; self.order.len()];
        let mut augmented = x.to_vec();
        for (position, model) in self.models.iter().enumerate() {
            let score = binary_score(model, &augmented)?;
            scores[self.order[position]] = score;
            augmented.push(if score >= 0.5 { 1.0 } else { 0.0 });
        }
        Ok(scores)
    }
}

/// Sample chain orders with the seeded RNG, fit a chain per order, and keep
/// the order whose selections score best on the training set itself.
pub(crate) fn fit_monte_carlo_chain(
    rows: &[Vec<f64>],
    labels: &[Vec<bool>],
    scores: Option<&[Vec<f64>]>,
    params: &MultiLabelParams,
    seed: u64,
) -> Result<ChainModel> {
    let score_rows = scores.ok_or_else(|| {
        Error::InvalidParams("mcc needs per-question F1 rows to rate candidate chains".into())
    })?;
    let label_count = labels.first().map(Vec::len).unwrap_or(0);

    let system_count = label_count;
    let mut means = vec![0.0; system_count];
    for row in score_rows {
        for (m, v) in means.iter_mut().zip(row) {
            *m += v;
        }
    }
    for m in &mut means {
        *m /= score_rows.len() as f64;
    }
    let fallback = argmax_by_mean(&means);
    let policy = SelectionPolicy {
        tie_break: TieBreak::TrainingMeanF1,
        fallback,
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(f64, ChainModel)> = None;
    for _ in 0..params.ensemble {
        let mut order: Vec<usize> = (0..label_count).collect();
        order.shuffle(&mut rng);
        let chain = ChainModel::fit(rows, labels, order, &params.tree)?;
        let mut total = 0.0;
        for (row, f1_row) in rows.iter().zip(score_rows) {
            let confidences = chain.scores(row)?;
            let chosen = argmax_with_policy(&confidences, &means, &policy);
            total += f1_row[chosen];
        }
        let in_sample = total / rows.len() as f64;
        if best.as_ref().is_none_or(|(score, _)| in_sample > *score) {
            best = Some((in_sample, chain));
        }
    }
    Ok(best.expect("ensemble size is validated to be at least 1").1)
}

fn argmax_by_mean(means: &[f64]) -> usize {
    let mut best = 0;
    for (i, m) in means.iter().enumerate() {
        if *m > means[best] {
            best = i;
        }
    }
    best
}
