//! Label-combination models: LC, the pruned-set variants, and the
//! ranking-by-copies reduction.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learners::{TreeModel, TreeParams};

/// One multiclass model whose classes are distinct label combinations.
/// Class ids follow first appearance in the training sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub(crate) struct PowersetModel {
    tree: TreeModel,
    combos: Vec<Vec<bool>>,
}

impl PowersetModel {
    pub(crate) fn fit(
        rows: &[Vec<f64>],
        labels: &[Vec<bool>],
        tree_params: &TreeParams,
    ) -> Result<Self> {
        if rows.is_empty() || rows.len() != labels.len() {
            return Err(Error::EmptyTrainingSet);
        }
        let mut combos: Vec<Vec<bool>> = Vec::new();
        let mut classes = Vec::with_capacity(labels.len());
        for combo in labels {
            let class = match combos.iter().position(|c| c == combo) {
                Some(i) => i,
                None => {
                    combos.push(combo.clone());
                    combos.len() - 1
                }
            };
            classes.push(class);
        }
        let tree = TreeModel::fit(rows, &classes, combos.len(), tree_params)?;
        Ok(PowersetModel { tree, combos })
    }

    /// Prune label combinations occurring at most `prune` times, then refit
    /// as LC. A pruned example is reintroduced once per maximal surviving
    /// sub-combination of its positive labels; examples with no surviving
    /// sub-combination are dropped.
    pub(crate) fn fit_pruned(
        rows: &[Vec<f64>],
        labels: &[Vec<bool>],
        prune: usize,
        tree_params: &TreeParams,
    ) -> Result<Self> {
        if prune == 0 {
            return PowersetModel::fit(rows, labels, tree_params);
        }
        if rows.is_empty() || rows.len() != labels.len() {
            return Err(Error::EmptyTrainingSet);
        }
        let mut counts: HashMap<&[bool], usize> = HashMap::new();
        for combo in labels {
            *counts.entry(combo.as_slice()).or_insert(0) += 1;
        }
        let survives = |combo: &[bool]| counts.get(combo).copied().unwrap_or(0) > prune;

        let mut out_rows = Vec::with_capacity(rows.len());
        let mut out_labels = Vec::with_capacity(labels.len());
        for (row, combo) in rows.iter().zip(labels) {
            if survives(combo) {
                out_rows.push(row.clone());
                out_labels.push(combo.clone());
                continue;
            }
            for sub in maximal_surviving_subsets(combo, &survives) {
                out_rows.push(row.clone());
                out_labels.push(sub);
            }
        }
        if out_rows.is_empty() {
            return Err(Error::InvalidParams(format!(
                "pruning at {prune} removed every training example"
            )));
        }
        PowersetModel::fit(&out_rows, &out_labels, tree_params)
    }

    pub(crate) fn class_count(&self) -> usize {
        self.combos.len()
    }

    /// Marginal per-label scores: for each label, the total probability of
    /// the predicted combination classes containing it.
    pub(crate) fn scores(&self, x: &[f64]) -> Result<Vec<f64>> {
        let dist = self.tree.predict_proba(x)?;
        let label_count = self.combos.first().map(Vec::len).unwrap_or(0);
        let mut scores = vec![0.0; label_count];
        for (p, combo) in dist.iter().zip(&self.combos) {
            for (score, member) in scores.iter_mut().zip(combo) {
                if *member {
                    *score += p;
                }
            }
        }
        Ok(scores)
    }
}

/// All maximal sub-combinations of `combo`'s positive labels that survive
/// pruning, in subset-mask enumeration order.
fn maximal_surviving_subsets(
    combo: &[bool],
    survives: &dyn Fn(&[bool]) -> bool,
) -> Vec<Vec<bool>> {
    let positives: Vec<usize> = combo
        .iter()
        .enumerate()
        .filter(|(_, v)| **v)
        .map(|(i, _)| i)
        .collect();
    // the decomposition enumerates subsets of the positive labels; label
    // rosters are small by construction
    if positives.len() > 16 {
        return Vec::new();
    }
    let mut candidates: Vec<Vec<bool>> = Vec::new();
    for mask in 1u32..(1 << positives.len()) {
        let mut sub = vec![false; combo.len()];
        for (bit, &label) in positives.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                sub[label] = true;
            }
        }
        if sub.as_slice() != combo && survives(&sub) {
            candidates.push(sub);
        }
    }
    let maximal: Vec<Vec<bool>> = candidates
        .iter()
        .filter(|s| {
            !candidates
                .iter()
                .any(|t| t != *s && s.iter().zip(t).all(|(a, b)| !a || *b))
        })
        .cloned()
        .collect();
    maximal
}

/// Ranking by label copies: every training example is duplicated once per
/// positive label and assigned that label as its class; the multiclass
/// distribution read off at prediction time is the label ranking.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub(crate) struct RankingModel {
    tree: TreeModel,
}

impl RankingModel {
    pub(crate) fn fit(
        rows: &[Vec<f64>],
        labels: &[Vec<bool>],
        tree_params: &TreeParams,
    ) -> Result<Self> {
        let label_count = labels.first().map(Vec::len).unwrap_or(0);
        let mut out_rows = Vec::new();
        let mut classes = Vec::new();
        for (row, combo) in rows.iter().zip(labels) {
            for (label, &positive) in combo.iter().enumerate() {
                if positive {
                    out_rows.push(row.clone());
                    classes.push(label);
                }
            }
        }
        if out_rows.is_empty() {
            return Err(Error::EmptyTrainingSet);
        }
        let tree = TreeModel::fit(&out_rows, &classes, label_count, tree_params)?;
        Ok(RankingModel { tree })
    }

    pub(crate) fn scores(&self, x: &[f64], label_count: usize) -> Result<Vec<f64>> {
        let dist = self.tree.predict_proba(x)?;
        debug_assert_eq!(dist.len(), label_count);
        Ok(dist.to_vec())
    }
}
