//! Question sets, per-system performance matrices, and the derived
//! multi-label training targets.
//!
//! A question is answerable by a system exactly when the system's recorded
//! F1 score is strictly greater than zero; the matrix keeps small positives
//! such as 0.01 and 0.02 distinct from zero, so the comparison is exact and
//! carries no epsilon.

use std::collections::{BTreeMap, HashSet};
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{QuestionType, ResourceType};

/// One benchmark question.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuestionRecord {
    pub id: u64,
    pub text: String,
    #[serde(default)]
    pub annotations: Annotations,
}

/// Optional gold annotations carried by some question files. When present
/// they override the heuristic feature extraction.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Annotations {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub question_type: Option<QuestionType>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub query_resource_type: Option<ResourceType>,
}

impl QuestionRecord {
    pub fn new(id: u64, text: impl Into<String>) -> Self {
        QuestionRecord {
            id,
            text: text.into(),
            annotations: Annotations::default(),
        }
    }
}

/// Per-question, per-system F1 scores, all in [0, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerformanceMatrix {
    systems: Vec<String>,
    ids: Vec<u64>,
    rows: BTreeMap<u64, Vec<f64>>,
}

/// Boolean answerability targets for one question, one entry per system.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LabelVector(pub Vec<bool>);

impl LabelVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }
}

impl PerformanceMatrix {
    /// Build a matrix from rows in file order, validating shape and ranges.
    pub fn from_rows(systems: Vec<String>, rows: Vec<(u64, Vec<f64>)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        let mut ids = Vec::with_capacity(rows.len());
        for (id, scores) in rows {
            if scores.len() != systems.len() {
                return Err(Error::Parse {
                    path: "<rows>".into(),
                    location: format!("question {id}"),
                    message: format!(
                        "expected {} scores, got {}",
                        systems.len(),
                        scores.len()
                    ),
                });
            }
            for (value, system) in scores.iter().zip(&systems) {
                if !value.is_finite() || *value < 0.0 || *value > 1.0 {
                    return Err(Error::ScoreOutOfRange {
                        id,
                        system: system.clone(),
                        value: *value,
                    });
                }
            }
            if map.insert(id, scores).is_some() {
                return Err(Error::DuplicateQuestionId { id });
            }
            ids.push(id);
        }
        Ok(PerformanceMatrix {
            systems,
            ids,
            rows: map,
        })
    }

    pub fn systems(&self) -> &[String] {
        &self.systems
    }

    pub fn system_count(&self) -> usize {
        self.systems.len()
    }

    /// Question ids in file order.
    pub fn question_ids(&self) -> &[u64] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn contains(&self, id: u64) -> bool {
        self.rows.contains_key(&id)
    }

    pub fn scores(&self, id: u64) -> Result<&[f64]> {
        self.rows
            .get(&id)
            .map(Vec::as_slice)
            .ok_or(Error::UnknownQuestion { id })
    }

    pub fn score(&self, id: u64, system: usize) -> Result<f64> {
        let row = self.scores(id)?;
        row.get(system).copied().ok_or(Error::UnknownSystem {
            index: system,
            count: self.systems.len(),
        })
    }

    /// Mean F1 per system over all questions.
    pub fn system_means(&self) -> Vec<f64> {
        let n = self.ids.len().max(1) as f64;
        let mut sums = vec![0.0; self.systems.len()];
        for scores in self.rows.values() {
            for (sum, v) in sums.iter_mut().zip(scores) {
                *sum += v;
            }
        }
        sums.iter().map(|s| s / n).collect()
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("question_id,");
        out.push_str(&self.systems.join(","));
        out.push('\n');
        for id in &self.ids {
            out.push_str(&id.to_string());
            for v in &self.rows[id] {
                out.push(',');
                out.push_str(&v.to_string());
            }
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        file.write_all(self.to_csv_string().as_bytes())
            .map_err(|e| Error::io(path, e))
    }
}

/// `labels[i]` is true exactly when system i scored strictly above zero.
pub fn derive_labels(matrix: &PerformanceMatrix, question_id: u64) -> Result<LabelVector> {
    let scores = matrix.scores(question_id)?;
    Ok(LabelVector(scores.iter().map(|&v| v > 0.0).collect()))
}

/// Question file formats accepted by [`load_questions`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuestionFormat {
    Json,
    Tsv,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawQuestionText {
    Plain(String),
    Tagged(Vec<RawLangString>),
}

#[derive(Deserialize)]
struct RawLangString {
    language: String,
    string: String,
}

#[derive(Deserialize)]
struct RawQuestion {
    id: u64,
    question: RawQuestionText,
    #[serde(default)]
    answertype: Option<String>,
    #[serde(default)]
    resourcetype: Option<String>,
}

pub fn load_questions(path: &Path, format: QuestionFormat) -> Result<Vec<QuestionRecord>> {
    let content = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let name = path.display().to_string();
    match format {
        QuestionFormat::Json => parse_questions_json(&content, &name),
        QuestionFormat::Tsv => parse_questions_tsv(&content, &name),
    }
}

/// Parse a QALD-style JSON array: each element is `{id, question, answertype?,
/// resourcetype?}` where `question` is either a bare string or a list of
/// `{language, string}` objects, in which case the English entry is used.
/// Annotation values outside the known enums are ignored; QALD files in the
/// wild carry answer types the classifier vocabulary does not model.
pub fn parse_questions_json(content: &str, source: &str) -> Result<Vec<QuestionRecord>> {
    let raw: Vec<RawQuestion> = serde_json::from_str(content)
        .map_err(|e| Error::parse(source, format!("line {}", e.line()), e.to_string()))?;
    let mut records = Vec::with_capacity(raw.len());
    let mut seen = HashSet::new();
    for (index, rq) in raw.into_iter().enumerate() {
        let text = match rq.question {
            RawQuestionText::Plain(s) => s,
            RawQuestionText::Tagged(entries) => entries
                .into_iter()
                .find(|e| e.language == "en")
                .map(|e| e.string)
                .ok_or_else(|| {
                    Error::parse(
                        source,
                        format!("element {index}"),
                        "no English question string",
                    )
                })?,
        };
        if text.trim().is_empty() {
            return Err(Error::EmptyQuestionText { id: rq.id });
        }
        if !seen.insert(rq.id) {
            return Err(Error::DuplicateQuestionId { id: rq.id });
        }
        let annotations = Annotations {
            question_type: rq.answertype.as_deref().and_then(QuestionType::parse),
            query_resource_type: rq.resourcetype.as_deref().and_then(ResourceType::parse),
        };
        records.push(QuestionRecord {
            id: rq.id,
            text,
            annotations,
        });
    }
    Ok(records)
}

/// Parse `id<TAB>text` lines. Blank lines are skipped.
pub fn parse_questions_tsv(content: &str, source: &str) -> Result<Vec<QuestionRecord>> {
    let mut records = Vec::new();
    let mut seen = HashSet::new();
    for (lineno, line) in content.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let loc = format!("line {}", lineno + 1);
        let (id_part, text) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(source, loc.clone(), "expected id<TAB>text"))?;
        let id: u64 = id_part
            .trim()
            .parse()
            .map_err(|_| Error::parse(source, loc.clone(), format!("bad id `{id_part}`")))?;
        if text.trim().is_empty() {
            return Err(Error::EmptyQuestionText { id });
        }
        if !seen.insert(id) {
            return Err(Error::DuplicateQuestionId { id });
        }
        records.push(QuestionRecord::new(id, text));
    }
    Ok(records)
}

pub fn load_performance(path: &Path) -> Result<PerformanceMatrix> {
    let content = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_performance_csv(&content, &path.display().to_string())
}

/// Parse a performance CSV with header `question_id,<system>,...`.
pub fn parse_performance_csv(content: &str, source: &str) -> Result<PerformanceMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(content.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| Error::parse(source, "header", e.to_string()))?
        .clone();
    if headers.is_empty() || headers.get(0) != Some("question_id") {
        return Err(Error::parse(
            source,
            "header",
            "first column must be `question_id`",
        ));
    }
    let systems: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
    if systems.is_empty() {
        return Err(Error::parse(source, "header", "no system columns"));
    }

    let mut rows = Vec::new();
    for (index, record) in reader.records().enumerate() {
        let loc = format!("row {}", index + 1);
        let record = record.map_err(|e| Error::parse(source, loc.clone(), e.to_string()))?;
        let id: u64 = record
            .get(0)
            .unwrap_or("")
            .trim()
            .parse()
            .map_err(|_| Error::parse(source, loc.clone(), "bad question id"))?;
        let mut scores = Vec::with_capacity(systems.len());
        for (col, cell) in record.iter().skip(1).enumerate() {
            let value: f64 = cell.trim().parse().map_err(|_| {
                Error::parse(
                    source,
                    loc.clone(),
                    format!("non-numeric cell `{cell}` in column `{}`", systems[col]),
                )
            })?;
            if !value.is_finite() || !(0.0..=1.0).contains(&value) {
                return Err(Error::ScoreOutOfRange {
                    id,
                    system: systems[col].clone(),
                    value,
                });
            }
            scores.push(value);
        }
        rows.push((id, scores));
    }
    PerformanceMatrix::from_rows(systems, rows)
}

/// A question set joined with its performance matrix.
///
/// Immutable after construction; safe to share across worker threads.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub questions: Vec<QuestionRecord>,
    pub matrix: PerformanceMatrix,
}

impl Dataset {
    /// Join questions with matrix rows. Every matrix row must refer to a
    /// known question; questions without a row are dropped from the joined
    /// view since they carry no training signal.
    pub fn join(questions: Vec<QuestionRecord>, matrix: PerformanceMatrix) -> Result<Self> {
        let known: HashSet<u64> = questions.iter().map(|q| q.id).collect();
        for id in matrix.question_ids() {
            if !known.contains(id) {
                return Err(Error::UnmatchedRow { id: *id });
            }
        }
        let questions = questions
            .into_iter()
            .filter(|q| matrix.contains(q.id))
            .collect();
        Ok(Dataset { questions, matrix })
    }

    pub fn len(&self) -> usize {
        self.questions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.questions.is_empty()
    }

    pub fn labels(&self) -> Result<Vec<LabelVector>> {
        self.questions
            .iter()
            .map(|q| derive_labels(&self.matrix, q.id))
            .collect()
    }
}
