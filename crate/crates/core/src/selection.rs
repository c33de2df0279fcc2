//! Turning a per-label confidence vector into one chosen QA system, plus
//! the optimal-selection oracle used as the upper bound in reports.

use serde::{Deserialize, Serialize};

use crate::dataset::{PerformanceMatrix, QuestionRecord};
use crate::error::Result;
use crate::features::{extract, EncodingSchema, FeatureGroup, Gazetteer};
use crate::multilabel::{LabelConfidence, MultiLabelModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TieBreak {
    /// Prefer the system with the higher training-set mean F1, then the
    /// lower index.
    TrainingMeanF1,
    LowestIndex,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionPolicy {
    pub tie_break: TieBreak,
    /// Chosen when every confidence is zero.
    pub fallback: usize,
}

/// Argmax over confidences with explicit tie handling; total over any
/// score vector.
pub fn argmax_with_policy(scores: &[f64], means: &[f64], policy: &SelectionPolicy) -> usize {
    let mut best = f64::NEG_INFINITY;
    for &s in scores {
        if s > best {
            best = s;
        }
    }
    if best == 0.0 {
        return policy.fallback.min(scores.len().saturating_sub(1));
    }
    let tied: Vec<usize> = (0..scores.len()).filter(|&i| scores[i] == best).collect();
    match policy.tie_break {
        TieBreak::LowestIndex => tied[0],
        TieBreak::TrainingMeanF1 => {
            let mut chosen = tied[0];
            for &i in &tied[1..] {
                if means.get(i) > means.get(chosen) {
                    chosen = i;
                }
            }
            chosen
        }
    }
}

/// A trained metasystem: the multi-label model plus everything needed to
/// turn raw question text into a system choice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaModel {
    pub model: MultiLabelModel,
    pub schema: EncodingSchema,
    pub systems: Vec<String>,
    pub policy: SelectionPolicy,
    pub training_mean_f1: Vec<f64>,
    pub seed: u64,
}

impl MetaModel {
    pub fn feature_groups(&self) -> &[FeatureGroup] {
        self.schema.groups()
    }

    /// Confidence vector for one question.
    pub fn confidences(&self, question: &QuestionRecord, gazetteer: &Gazetteer) -> Result<LabelConfidence> {
        let features = extract(question, gazetteer);
        let vector = self.schema.encode(&features);
        self.model.predict(&vector)
    }

    /// System index for an already-computed confidence vector.
    pub fn choose(&self, confidence: &LabelConfidence) -> usize {
        argmax_with_policy(&confidence.scores, &self.training_mean_f1, &self.policy)
    }

    /// The routed system index for one question.
    pub fn select(&self, question: &QuestionRecord, gazetteer: &Gazetteer) -> Result<usize> {
        Ok(self.choose(&self.confidences(question, gazetteer)?))
    }
}

/// The best attainable choice for a question: row argmax with ties broken
/// toward the lower index.
pub fn oracle_select(matrix: &PerformanceMatrix, question_id: u64) -> Result<(usize, f64)> {
    let scores = matrix.scores(question_id)?;
    let mut best = 0;
    for (i, v) in scores.iter().enumerate() {
        if *v > scores[best] {
            best = i;
        }
    }
    Ok((best, scores[best]))
}

/// F1 of the chosen system on a question, looked up from the matrix.
pub fn selection_f1(matrix: &PerformanceMatrix, question_id: u64, system: usize) -> Result<f64> {
    matrix.score(question_id, system)
}

/// Mean oracle F1 over all questions in the matrix.
pub fn oracle_mean(matrix: &PerformanceMatrix) -> Result<f64> {
    let mut total = 0.0;
    for id in matrix.question_ids() {
        total += oracle_select(matrix, *id)?.1;
    }
    Ok(total / matrix.len().max(1) as f64)
}
