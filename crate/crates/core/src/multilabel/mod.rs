//! Problem-transformation multi-label classifiers over the base learners.
//!
//! Ten methods share one surface: fit on encoded feature vectors plus
//! per-system answerability labels, predict a per-label confidence vector
//! in [0, 1]. All methods are deterministic under a fixed seed.

mod cdn;
mod chains;
mod powerset;
mod rakel;

use serde::{Deserialize, Serialize};

use crate::dataset::LabelVector;
use crate::error::{Error, Result};
use crate::features::FeatureVector;
use crate::learners::{LogisticParams, TreeParams};

/// The supported problem-transformation methods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    /// Binary relevance: one independent binary classifier per label.
    Br,
    /// Label combination: each distinct label set is one multiclass class.
    Lc,
    /// Classifier chain in a fixed label order.
    Cc,
    /// Monte-Carlo chain search over sampled label orders.
    Mcc,
    /// Ranking by a multiclass model over label copies, plus a threshold.
    Rt,
    /// Pruned sets: label combination with infrequent combinations pruned.
    Ps,
    /// Pruned sets with a per-label confidence threshold.
    Pst,
    /// Disjoint random k-labelset ensemble.
    RakelD,
    /// Overlapping random k-labelset ensemble.
    RakelO,
    /// Conditional dependency network with Gibbs inference.
    Cdn,
}

impl Method {
    pub const ALL: [Method; 10] = [
        Method::Br,
        Method::Lc,
        Method::Cc,
        Method::Mcc,
        Method::Rt,
        Method::Ps,
        Method::Pst,
        Method::RakelD,
        Method::RakelO,
        Method::Cdn,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Br => "br",
            Method::Lc => "lc",
            Method::Cc => "cc",
            Method::Mcc => "mcc",
            Method::Rt => "rt",
            Method::Ps => "ps",
            Method::Pst => "pst",
            Method::RakelD => "rakeld",
            Method::RakelO => "rakelo",
            Method::Cdn => "cdn",
        }
    }

    /// Parse a method name. `pcc` and `pmcc` are accepted as aliases for
    /// the Monte-Carlo chain search.
    pub fn parse(s: &str) -> Result<Self> {
        let needle = s.trim().to_lowercase();
        if needle == "pcc" || needle == "pmcc" {
            return Ok(Method::Mcc);
        }
        Method::ALL
            .iter()
            .find(|m| m.name() == needle)
            .copied()
            .ok_or_else(|| Error::UnknownMethod(s.to_string()))
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Method parameters. Methods read only the fields they use.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiLabelParams {
    /// Labelset size for RAkELd / RAkELo.
    pub k: usize,
    /// Prune label combinations occurring at most this many times (PS, PSt).
    pub prune: usize,
    /// Per-label confidence threshold (PSt, RT, `predict_set`).
    pub threshold: f64,
    /// Ensemble size for MCC chain sampling and RAkELo subsets.
    pub ensemble: usize,
    /// Gibbs sweeps for CDN inference.
    pub gibbs_iterations: usize,
    /// Gibbs sweeps discarded before accumulating marginals.
    pub gibbs_burn_in: usize,
    /// Explicit chain order for CC; identity when absent.
    pub chain_order: Option<Vec<usize>>,
    pub tree: TreeParams,
    pub logistic: LogisticParams,
}

impl Default for MultiLabelParams {
    fn default() -> Self {
        MultiLabelParams {
            k: 3,
            prune: 1,
            threshold: 0.5,
            ensemble: 10,
            gibbs_iterations: 100,
            gibbs_burn_in: 10,
            chain_order: None,
            tree: TreeParams::default(),
            logistic: LogisticParams::default(),
        }
    }
}

impl MultiLabelParams {
    fn validate(&self, label_count: usize) -> Result<()> {
        if self.k < 1 {
            return Err(Error::InvalidParams("k must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(Error::InvalidParams(format!(
                "threshold {} outside [0, 1]",
                self.threshold
            )));
        }
        if self.ensemble < 1 {
            return Err(Error::InvalidParams("ensemble size must be at least 1".into()));
        }
        if self.gibbs_iterations <= self.gibbs_burn_in {
            return Err(Error::InvalidParams(
                "gibbs iterations must exceed burn-in".into(),
            ));
        }
        if let Some(order) = &self.chain_order {
            let mut seen = vec![false; label_count];
            if order.len() != label_count {
                return Err(Error::InvalidParams("chain order length mismatch".into()));
            }
            for &i in order {
                if i >= label_count || seen[i] {
                    return Err(Error::InvalidParams(
                        "chain order is not a permutation".into(),
                    ));
                }
                seen[i] = true;
            }
        }
        Ok(())
    }
}

/// A training view: encoded vectors, answerability labels, and (optionally)
/// the raw per-system F1 rows behind the labels. MCC needs the scores to
/// rate candidate chain orders in-sample.
#[derive(Debug, Clone, Copy)]
pub struct TrainingSet<'a> {
    pub features: &'a [FeatureVector],
    pub labels: &'a [LabelVector],
    pub scores: Option<&'a [Vec<f64>]>,
}

impl<'a> TrainingSet<'a> {
    fn validate(&self) -> Result<(usize, usize)> {
        if self.features.is_empty() || self.features.len() != self.labels.len() {
            return Err(Error::EmptyTrainingSet);
        }
        let width = self.features[0].slots.len();
        for v in self.features {
            if v.slots.len() != width {
                return Err(Error::WidthMismatch {
                    expected: width,
                    actual: v.slots.len(),
                });
            }
        }
        let label_count = self.labels[0].len();
        if label_count == 0 {
            return Err(Error::InvalidParams("empty label vectors".into()));
        }
        for l in self.labels {
            if l.len() != label_count {
                return Err(Error::WidthMismatch {
                    expected: label_count,
                    actual: l.len(),
                });
            }
        }
        if let Some(scores) = self.scores {
            if scores.len() != self.labels.len() {
                return Err(Error::InvalidParams(
                    "score rows do not match training examples".into(),
                ));
            }
        }
        Ok((width, label_count))
    }

    pub(crate) fn rows(&self) -> Vec<Vec<f64>> {
        self.features.iter().map(|v| v.slots.clone()).collect()
    }

    pub(crate) fn label_matrix(&self) -> Vec<Vec<bool>> {
        self.labels.iter().map(|l| l.as_slice().to_vec()).collect()
    }
}

/// Per-label confidence scores, each in [0, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelConfidence {
    pub scores: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
enum ModelKind {
    Binary(chains::BinaryRelevance),
    Powerset(powerset::PowersetModel),
    Chain(chains::ChainModel),
    Ranking(powerset::RankingModel),
    Rakel(rakel::RakelModel),
    Cdn(cdn::CdnModel),
}

/// A fitted multi-label model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiLabelModel {
    method: Method,
    label_count: usize,
    width: usize,
    params: MultiLabelParams,
    seed: u64,
    kind: ModelKind,
}

impl MultiLabelModel {
    /// Fit `method` on the training set. Deterministic given the seed.
    pub fn fit(
        method: Method,
        data: &TrainingSet,
        params: &MultiLabelParams,
        seed: u64,
    ) -> Result<Self> {
        let (width, label_count) = data.validate()?;
        params.validate(label_count)?;
        let rows = data.rows();
        let labels = data.label_matrix();

        let kind = match method {
            Method::Br => ModelKind::Binary(chains::BinaryRelevance::fit(
                &rows,
                &labels,
                &params.tree,
            )?),
            Method::Lc => ModelKind::Powerset(powerset::PowersetModel::fit(
                &rows,
                &labels,
                &params.tree,
            )?),
            Method::Ps | Method::Pst => ModelKind::Powerset(powerset::PowersetModel::fit_pruned(
                &rows,
                &labels,
                params.prune,
                &params.tree,
            )?),
            Method::Cc => {
                let order: Vec<usize> = params
                    .chain_order
                    .clone()
                    .unwrap_or_else(|| (0..label_count).collect());
                ModelKind::Chain(chains::ChainModel::fit(&rows, &labels, order, &params.tree)?)
            }
            Method::Mcc => ModelKind::Chain(chains::fit_monte_carlo_chain(
                &rows,
                &labels,
                data.scores,
                params,
                seed,
            )?),
            Method::Rt => ModelKind::Ranking(powerset::RankingModel::fit(
                &rows,
                &labels,
                &params.tree,
            )?),
            Method::RakelD => ModelKind::Rakel(rakel::RakelModel::fit_disjoint(
                &rows,
                &labels,
                params.k,
                &params.tree,
                seed,
            )?),
            Method::RakelO => ModelKind::Rakel(rakel::RakelModel::fit_overlapping(
                &rows,
                &labels,
                params.k,
                params.ensemble,
                &params.tree,
                seed,
            )?),
            Method::Cdn => ModelKind::Cdn(cdn::CdnModel::fit(&rows, &labels, &params.logistic)?),
        };

        Ok(MultiLabelModel {
            method,
            label_count,
            width,
            params: params.clone(),
            seed,
            kind,
        })
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn label_count(&self) -> usize {
        self.label_count
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn params(&self) -> &MultiLabelParams {
        &self.params
    }

    /// Number of multiclass classes behind a label-combination model.
    pub fn class_count(&self) -> Option<usize> {
        match &self.kind {
            ModelKind::Powerset(m) => Some(m.class_count()),
            _ => None,
        }
    }

    /// Per-label confidence for one encoded question.
    pub fn predict(&self, x: &FeatureVector) -> Result<LabelConfidence> {
        self.predict_slots(&x.slots)
    }

    pub fn predict_slots(&self, slots: &[f64]) -> Result<LabelConfidence> {
        if slots.len() != self.width {
            return Err(Error::WidthMismatch {
                expected: self.width,
                actual: slots.len(),
            });
        }
        let scores = match &self.kind {
            ModelKind::Binary(m) => m.scores(slots)?,
            ModelKind::Powerset(m) => m.scores(slots)?,
            ModelKind::Chain(m) => m.scores(slots)?,
            ModelKind::Ranking(m) => m.scores(slots, self.label_count)?,
            ModelKind::Rakel(m) => m.scores(slots, self.label_count)?,
            ModelKind::Cdn(m) => m.scores(
                slots,
                self.seed,
                self.params.gibbs_iterations,
                self.params.gibbs_burn_in,
            )?,
        };
        debug_assert_eq!(scores.len(), self.label_count);
        debug_assert!(scores.iter().all(|s| (0.0..=1.0).contains(s)));
        Ok(LabelConfidence { scores })
    }

    /// Threshold the confidence vector: `labels[i] = scores[i] >= t`.
    pub fn predict_set(&self, x: &FeatureVector, threshold: f64) -> Result<LabelVector> {
        if !(0.0..=1.0).contains(&threshold) {
            return Err(Error::InvalidParams(format!(
                "threshold {threshold} outside [0, 1]"
            )));
        }
        let confidence = self.predict(x)?;
        Ok(LabelVector(
            confidence.scores.iter().map(|s| *s >= threshold).collect(),
        ))
    }
}
