//! Evaluation protocols: cross-validation, leave-one-out, and full-train,
//! plus the exhaustive feature-subset search and report assembly.
//!
//! Per-question quality is the matrix F1 of the routed system; a fold's
//! score is the mean over its test questions, and a report's aggregate is
//! the mean over all evaluated questions. Under cross-validation nothing
//! derived from a test question (features, labels, or tie-break means)
//! enters its fold's training.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{derive_labels, Dataset, LabelVector, PerformanceMatrix};
use crate::error::{Error, Result};
use crate::features::{extract, EncodingSchema, FeatureGroup, FeatureVector, Gazetteer};
use crate::multilabel::{Method, MultiLabelModel, MultiLabelParams, TrainingSet};
use crate::selection::{MetaModel, SelectionPolicy, TieBreak};

/// Extraction and encoding of a whole dataset under the full schema,
/// done once and shared by every protocol run.
#[derive(Debug, Clone)]
pub struct PreparedDataset {
    pub ids: Vec<u64>,
    pub vectors: Vec<FeatureVector>,
    pub labels: Vec<LabelVector>,
    pub scores: Vec<Vec<f64>>,
    pub systems: Vec<String>,
    pub schema: EncodingSchema,
}

impl PreparedDataset {
    pub fn from_dataset(dataset: &Dataset, gazetteer: &Gazetteer) -> Self {
        let schema = EncodingSchema::full();
        let mut ids = Vec::with_capacity(dataset.len());
        let mut vectors = Vec::with_capacity(dataset.len());
        let mut labels = Vec::with_capacity(dataset.len());
        let mut scores = Vec::with_capacity(dataset.len());
        for q in &dataset.questions {
            ids.push(q.id);
            vectors.push(schema.encode(&extract(q, gazetteer)));
            labels.push(derive_labels(&dataset.matrix, q.id).expect("joined dataset"));
            scores.push(dataset.matrix.scores(q.id).expect("joined dataset").to_vec());
        }
        PreparedDataset {
            ids,
            vectors,
            labels,
            scores,
            systems: dataset.matrix.systems().to_vec(),
            schema,
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

/// Train a metasystem on the given subset of the prepared dataset.
pub fn train_meta(
    prep: &PreparedDataset,
    indices: &[usize],
    groups: &[FeatureGroup],
    method: Method,
    params: &MultiLabelParams,
    seed: u64,
) -> Result<MetaModel> {
    if indices.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    let schema = prep.schema.restrict(groups)?;
    let vectors: Vec<FeatureVector> = indices
        .iter()
        .map(|&i| prep.schema.project(&schema, &prep.vectors[i]))
        .collect::<Result<_>>()?;
    let labels: Vec<LabelVector> = indices.iter().map(|&i| prep.labels[i].clone()).collect();
    let scores: Vec<Vec<f64>> = indices.iter().map(|&i| prep.scores[i].clone()).collect();

    let system_count = prep.systems.len();
    let mut means = vec![0.0; system_count];
    for row in &scores {
        for (m, v) in means.iter_mut().zip(row) {
            *m += v;
        }
    }
    for m in &mut means {
        *m /= indices.len() as f64;
    }
    let fallback = means
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))
        .map(|(i, _)| i)
        .unwrap_or(0);

    let training = TrainingSet {
        features: &vectors,
        labels: &labels,
        scores: Some(&scores),
    };
    let model = MultiLabelModel::fit(method, &training, params, seed)?;

    Ok(MetaModel {
        model,
        schema,
        systems: prep.systems.clone(),
        policy: SelectionPolicy {
            tie_break: TieBreak::TrainingMeanF1,
            fallback,
        },
        training_mean_f1: means,
        seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Protocol {
    Cv { folds: usize },
    Loo,
    Full,
}

impl Protocol {
    pub fn name(&self) -> String {
        match self {
            Protocol::Cv { folds } => format!("cv{folds}"),
            Protocol::Loo => "loo".into(),
            Protocol::Full => "full".into(),
        }
    }
}

/// One evaluated question.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub fold: usize,
    pub question_id: u64,
    pub chosen_system: usize,
    pub f1: f64,
}

/// The outcome of one protocol run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub protocol: Protocol,
    pub method: Method,
    pub params: MultiLabelParams,
    pub feature_groups: Vec<FeatureGroup>,
    pub seed: u64,
    pub systems: Vec<String>,
    pub fold_scores: Vec<f64>,
    pub rows: Vec<ReportRow>,
    pub aggregate: f64,
}

/// Composition of one fold, exposed to test observers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldSplit {
    pub fold: usize,
    pub train_ids: Vec<u64>,
    pub test_ids: Vec<u64>,
}

/// Run a protocol, reporting each fold to `observer` before training on it.
pub fn evaluate_with_observer(
    prep: &PreparedDataset,
    groups: &[FeatureGroup],
    method: Method,
    params: &MultiLabelParams,
    protocol: Protocol,
    seed: u64,
    observer: &mut dyn FnMut(&FoldSplit),
) -> Result<EvaluationReport> {
    let n = prep.len();
    let folds = match protocol {
        Protocol::Full => {
            if n == 0 {
                return Err(Error::EmptyTrainingSet);
            }
            let all: Vec<usize> = (0..n).collect();
            vec![(all.clone(), all)]
        }
        Protocol::Loo => {
            if n < 2 {
                return Err(Error::TooFewQuestions { needed: 2, have: n });
            }
            partition_folds(n, n, seed)
        }
        Protocol::Cv { folds } => {
            if folds < 2 {
                return Err(Error::InvalidParams(
                    "cross-validation needs at least 2 folds".into(),
                ));
            }
            if n < folds {
                return Err(Error::TooFewQuestions {
                    needed: folds,
                    have: n,
                });
            }
            partition_folds(n, folds, seed)
        }
    };

    let mut rows = Vec::with_capacity(n);
    let mut fold_scores = Vec::with_capacity(folds.len());
    for (fold, (train, test)) in folds.iter().enumerate() {
        observer(&FoldSplit {
            fold,
            train_ids: train.iter().map(|&i| prep.ids[i]).collect(),
            test_ids: test.iter().map(|&i| prep.ids[i]).collect(),
        });
        let meta = train_meta(prep, train, groups, method, params, seed)?;
        let mut fold_total = 0.0;
        for &i in test {
            let projected = prep.schema.project(&meta.schema, &prep.vectors[i])?;
            let confidence = meta.model.predict(&projected)?;
            let chosen = meta.choose(&confidence);
            let f1 = prep.scores[i][chosen];
            fold_total += f1;
            rows.push(ReportRow {
                fold,
                question_id: prep.ids[i],
                chosen_system: chosen,
                f1,
            });
        }
        fold_scores.push(fold_total / test.len().max(1) as f64);
    }

    let aggregate = rows.iter().map(|r| r.f1).sum::<f64>() / rows.len().max(1) as f64;
    Ok(EvaluationReport {
        protocol,
        method,
        params: params.clone(),
        feature_groups: groups_canonical(groups),
        seed,
        systems: prep.systems.clone(),
        fold_scores,
        rows,
        aggregate,
    })
}

pub fn evaluate(
    prep: &PreparedDataset,
    groups: &[FeatureGroup],
    method: Method,
    params: &MultiLabelParams,
    protocol: Protocol,
    seed: u64,
) -> Result<EvaluationReport> {
    evaluate_with_observer(prep, groups, method, params, protocol, seed, &mut |_| {})
}

/// Seeded shuffle then contiguous slices; fold sizes differ by at most one.
fn partition_folds(n: usize, folds: usize, seed: u64) -> Vec<(Vec<usize>, Vec<usize>)> {
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);

    let base = n / folds;
    let extra = n % folds;
    let mut splits = Vec::with_capacity(folds);
    let mut start = 0;
    for fold in 0..folds {
        let size = base + usize::from(fold < extra);
        let test: Vec<usize> = order[start..start + size].to_vec();
        let train: Vec<usize> = order[..start]
            .iter()
            .chain(&order[start + size..])
            .copied()
            .collect();
        splits.push((train, test));
        start += size;
    }
    splits
}

fn groups_canonical(groups: &[FeatureGroup]) -> Vec<FeatureGroup> {
    FeatureGroup::ALL
        .iter()
        .filter(|g| groups.contains(g))
        .copied()
        .collect()
}

pub fn group_list_name(groups: &[FeatureGroup]) -> String {
    groups_canonical(groups)
        .iter()
        .map(FeatureGroup::name)
        .collect::<Vec<_>>()
        .join("+")
}

/// Search mode for [`subset_search`].
#[derive(Debug, Clone, PartialEq)]
pub enum SearchMode {
    /// All 2^13 - 1 non-empty feature-group subsets.
    Exhaustive,
    /// Only the listed combinations.
    Listed(Vec<Vec<FeatureGroup>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetResult {
    pub groups: Vec<FeatureGroup>,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetSearchReport {
    pub method: Method,
    pub seed: u64,
    /// Ranked best first; ties prefer smaller subsets, then the canonical
    /// name order.
    pub results: Vec<SubsetResult>,
}

impl SubsetSearchReport {
    pub fn best(&self) -> &SubsetResult {
        &self.results[0]
    }

    pub fn score_for(&self, groups: &[FeatureGroup]) -> Option<f64> {
        let canonical = groups_canonical(groups);
        self.results
            .iter()
            .find(|r| r.groups == canonical)
            .map(|r| r.score)
    }
}

/// Full-train score for every candidate feature subset. Candidates are
/// independent and evaluated in parallel; the ranking is deterministic.
pub fn subset_search(
    prep: &PreparedDataset,
    method: Method,
    params: &MultiLabelParams,
    mode: SearchMode,
    seed: u64,
) -> Result<SubsetSearchReport> {
    let candidates: Vec<Vec<FeatureGroup>> = match mode {
        SearchMode::Exhaustive => (1u16..(1 << FeatureGroup::ALL.len()))
            .map(|mask| {
                FeatureGroup::ALL
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, g)| *g)
                    .collect()
            })
            .collect(),
        SearchMode::Listed(listed) => {
            if listed.is_empty() {
                return Err(Error::EmptySelection);
            }
            listed.into_iter().map(|g| groups_canonical(&g)).collect()
        }
    };

    let mut results: Vec<SubsetResult> = candidates
        .into_par_iter()
        .map(|groups| {
            evaluate(prep, &groups, method, params, Protocol::Full, seed).map(|report| {
                SubsetResult {
                    groups,
                    score: report.aggregate,
                }
            })
        })
        .collect::<Result<_>>()?;

    results.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then(a.groups.len().cmp(&b.groups.len()))
            .then_with(|| group_list_name(&a.groups).cmp(&group_list_name(&b.groups)))
    });
    Ok(SubsetSearchReport {
        method,
        seed,
        results,
    })
}

/// Side-by-side means: each single system, the oracle, and each report's
/// metasystem aggregate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTable {
    pub entries: Vec<(String, f64)>,
}

pub fn compare_report(
    matrix: &PerformanceMatrix,
    reports: &[&EvaluationReport],
) -> Result<ComparisonTable> {
    if reports.is_empty() {
        return Err(Error::NoReports);
    }
    let mut fixture_ids: Vec<u64> = matrix.question_ids().to_vec();
    fixture_ids.sort_unstable();
    for report in reports {
        if report.systems != matrix.systems() {
            return Err(Error::MismatchedFixture);
        }
        let mut ids: Vec<u64> = report.rows.iter().map(|r| r.question_id).collect();
        ids.sort_unstable();
        ids.dedup();
        if ids != fixture_ids {
            return Err(Error::MismatchedFixture);
        }
    }

    let mut entries = Vec::new();
    for (system, mean) in matrix.systems().iter().zip(matrix.system_means()) {
        entries.push((system.clone(), mean));
    }
    entries.push(("oracle".into(), crate::selection::oracle_mean(matrix)?));
    for report in reports {
        entries.push((
            format!("metasystem {} ({})", report.method, report.protocol.name()),
            report.aggregate,
        ));
    }
    Ok(ComparisonTable { entries })
}

impl ComparisonTable {
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("entry,mean_f1\n");
        for (name, value) in &self.entries {
            out.push_str(&format!("{name},{value}\n"));
        }
        out
    }
}

impl EvaluationReport {
    /// CSV with one row per evaluated question.
    pub fn to_csv_string(&self) -> String {
        let protocol = self.protocol.name();
        let features = group_list_name(&self.feature_groups);
        let mut out = String::from("protocol,method,features,fold,question_id,chosen_system,f1\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{protocol},{},{features},{},{},{},{}\n",
                self.method, row.fold, row.question_id, self.systems[row.chosen_system], row.f1
            ));
        }
        out
    }

    /// Per-fold scores in boxplot-friendly form.
    pub fn boxplot_csv_string(&self) -> String {
        let mut out = String::from("method,fold,score\n");
        for (fold, score) in self.fold_scores.iter().enumerate() {
            out.push_str(&format!("{},{fold},{score}\n", self.method));
        }
        out
    }

    /// Human-readable summary of one run.
    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        out.push_str("# Evaluation summary\n\n");
        out.push_str(&format!(
            "- protocol: {}\n- method: {}\n- features: {}\n- seed: {}\n- questions: {}\n\n",
            self.protocol.name(),
            self.method,
            group_list_name(&self.feature_groups),
            self.seed,
            self.rows.len()
        ));
        out.push_str(&format!("**Aggregate mean F1: {:.4}**\n\n", self.aggregate));
        if self.fold_scores.len() > 1 {
            out.push_str("| Fold | Score |\n|---:|---:|\n");
            for (fold, score) in self.fold_scores.iter().enumerate() {
                out.push_str(&format!("| {fold} | {score:.4} |\n"));
            }
            out.push('\n');
        }
        out
    }
}

/// Markdown table comparing classifiers by leave-one-out and full-train
/// aggregate F1.
pub fn classifier_table_markdown(rows: &[(Method, f64, f64)]) -> String {
    let mut out = String::new();
    out.push_str("# Classifier comparison\n\n");
    out.push_str("| Classifier | Leave-one-out F1 | Full-train F1 |\n|:---|---:|---:|\n");
    for (method, loo, full) in rows {
        out.push_str(&format!("| {method} | {loo:.4} | {full:.4} |\n"));
    }
    out.push('\n');
    out
}

impl SubsetSearchReport {
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("rank,features,score\n");
        for (rank, result) in self.results.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{}\n",
                rank + 1,
                group_list_name(&result.groups),
                result.score
            ));
        }
        out
    }

    /// Markdown table of the strongest combinations plus the all-features
    /// reference row.
    pub fn to_markdown(&self, top: usize) -> String {
        let mut out = String::new();
        out.push_str("# Feature combination search\n\n");
        out.push_str(&format!(
            "- method: {}\n- seed: {}\n- combinations evaluated: {}\n\n",
            self.method,
            self.seed,
            self.results.len()
        ));
        out.push_str("| Feature combination | Mean F1 |\n|:---|---:|\n");
        for result in self.results.iter().take(top) {
            out.push_str(&format!(
                "| {} | {:.4} |\n",
                group_list_name(&result.groups),
                result.score
            ));
        }
        if let Some(score) = self.score_for(&FeatureGroup::ALL) {
            out.push_str(&format!("| all features | {score:.4} |\n"));
        }
        out.push('\n');
        out
    }
}
