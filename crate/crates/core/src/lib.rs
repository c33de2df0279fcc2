//! Routing natural-language questions to the QA system most likely to
//! answer them.
//!
//! The pipeline: extract hand-crafted features from question text
//! ([`features`]), derive per-system answerability labels from a benchmark
//! performance matrix ([`dataset`]), train a problem-transformation
//! multi-label classifier ([`multilabel`]) over from-scratch base learners
//! ([`learners`]), and pick the top-ranked system per question
//! ([`selection`]). The [`evaluation`] module holds the cross-validation,
//! leave-one-out, and full-train protocols plus the feature-subset search;
//! [`stats`] computes feature/answerability association via Cramér's V.

pub mod dataset;
pub mod error;
pub mod evaluation;
pub mod features;
pub mod fixture;
pub mod learners;
pub mod model;
pub mod multilabel;
pub mod selection;
pub mod stats;

pub use dataset::{Dataset, LabelVector, PerformanceMatrix, QuestionRecord};
pub use error::{Error, Result};
pub use evaluation::{EvaluationReport, PreparedDataset, Protocol};
pub use features::{EncodingSchema, FeatureGroup, FeatureVector, Gazetteer, QuestionFeatures};
pub use model::ModelFile;
pub use multilabel::{LabelConfidence, Method, MultiLabelModel, MultiLabelParams};
pub use selection::{MetaModel, SelectionPolicy, TieBreak};
