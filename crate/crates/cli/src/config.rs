//! Run configuration: JSON config files with flat keys mirroring the CLI
//! flags, merged so that explicit flags win over config values, which win
//! over the built-in defaults (embedded fixture, seed 42).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use qa_router_core::dataset::{load_performance, load_questions, parse_performance_csv,
    parse_questions_json, QuestionFormat};
use qa_router_core::evaluation::Protocol;
use qa_router_core::features::FeatureGroup;
use qa_router_core::multilabel::{Method, MultiLabelParams};
use qa_router_core::selection::MetaModel;
use qa_router_core::{fixture, Dataset, Error, Gazetteer, Result};

pub const DEFAULT_SEED: u64 = 42;

/// Flat JSON config; every key mirrors a CLI flag.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub questions: Option<PathBuf>,
    pub matrix: Option<PathBuf>,
    pub gazetteer: Option<PathBuf>,
    pub method: Option<String>,
    pub features: Option<String>,
    pub protocol: Option<String>,
    pub folds: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub prune: Option<usize>,
    pub threshold: Option<f64>,
    pub k: Option<usize>,
    pub ensemble: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let content = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        serde_json::from_str(&content).map_err(|e| Error::InvalidParams(format!(
            "config {}: {e}",
            path.display()
        )))
    }

    pub fn load_opt(path: Option<&PathBuf>) -> Result<Self> {
        match path {
            Some(p) => FileConfig::load(p),
            None => Ok(FileConfig::default()),
        }
    }
}

/// Loaded input data plus the raw bytes that feed the model fingerprint.
pub struct LoadedData {
    pub dataset: Dataset,
    pub gazetteer: Gazetteer,
    pub questions_bytes: Vec<u8>,
    pub matrix_bytes: Vec<u8>,
}

pub fn load_gazetteer(path: Option<&PathBuf>) -> Result<Gazetteer> {
    match path {
        Some(p) => Gazetteer::load(p),
        None => Ok(fixture::gazetteer()),
    }
}

pub fn load_question_records(
    path: Option<&PathBuf>,
) -> Result<(Vec<qa_router_core::QuestionRecord>, Vec<u8>)> {
    match path {
        Some(p) => {
            let format = match p.extension().and_then(|e| e.to_str()) {
                Some("tsv") | Some("txt") => QuestionFormat::Tsv,
                _ => QuestionFormat::Json,
            };
            let records = load_questions(p, format)?;
            let bytes = std::fs::read(p).map_err(|e| Error::Io {
                path: p.display().to_string(),
                source: e,
            })?;
            Ok((records, bytes))
        }
        None => Ok((
            parse_questions_json(fixture::QUESTIONS_JSON, "embedded:questions")?,
            fixture::QUESTIONS_JSON.as_bytes().to_vec(),
        )),
    }
}

pub fn load_data(
    questions: Option<&PathBuf>,
    matrix: Option<&PathBuf>,
    gazetteer: Option<&PathBuf>,
) -> Result<LoadedData> {
    let (records, questions_bytes) = load_question_records(questions)?;
    let (matrix, matrix_bytes) = match matrix {
        Some(p) => {
            let m = load_performance(p)?;
            let bytes = std::fs::read(p).map_err(|e| Error::Io {
                path: p.display().to_string(),
                source: e,
            })?;
            (m, bytes)
        }
        None => (
            parse_performance_csv(fixture::PERFORMANCE_CSV, "embedded:performance")?,
            fixture::PERFORMANCE_CSV.as_bytes().to_vec(),
        ),
    };
    Ok(LoadedData {
        dataset: Dataset::join(records, matrix)?,
        gazetteer: load_gazetteer(gazetteer)?,
        questions_bytes,
        matrix_bytes,
    })
}

pub fn parse_method(name: &str) -> Result<Method> {
    Method::parse(name)
}

pub fn parse_features(spec: Option<&str>) -> Result<Vec<FeatureGroup>> {
    match spec {
        Some(s) => FeatureGroup::parse_list(s),
        None => Ok(FeatureGroup::ALL.to_vec()),
    }
}

pub fn parse_protocol(name: &str, folds: Option<usize>) -> Result<Protocol> {
    match name.trim().to_lowercase().as_str() {
        "full" => Ok(Protocol::Full),
        "loo" => Ok(Protocol::Loo),
        "cv" | "cv10" => Ok(Protocol::Cv {
            folds: folds.unwrap_or(10),
        }),
        other => Err(Error::InvalidParams(format!(
            "unknown protocol `{other}` (expected cv10, loo, or full)"
        ))),
    }
}

/// Method parameters assembled from defaults plus any overrides.
pub fn build_params(
    prune: Option<usize>,
    threshold: Option<f64>,
    k: Option<usize>,
    ensemble: Option<usize>,
) -> MultiLabelParams {
    let mut params = MultiLabelParams::default();
    if let Some(p) = prune {
        params.prune = p;
    }
    if let Some(t) = threshold {
        params.threshold = t;
    }
    if let Some(k) = k {
        params.k = k;
    }
    if let Some(m) = ensemble {
        params.ensemble = m;
    }
    params
}

#[derive(Serialize)]
struct TrainingConfig<'a> {
    method: &'a str,
    features: String,
    params: &'a MultiLabelParams,
    seed: u64,
}

/// Canonical string of everything that shaped a trained model; hashed into
/// the model fingerprint together with the input file bytes.
pub fn training_config_string(meta: &MetaModel) -> String {
    let config = TrainingConfig {
        method: meta.model.method().name(),
        features: qa_router_core::evaluation::group_list_name(meta.feature_groups()),
        params: meta.model.params(),
        seed: meta.seed,
    };
    serde_json::to_string(&config).expect("config serialization cannot fail")
}

/// Process exit code for an error, per the documented convention:
/// 1 usage/config, 2 data, 3 internal invariant.
pub fn exit_code(error: &Error) -> i32 {
    match error {
        Error::UnknownMethod(_)
        | Error::UnknownFeatureGroup(_)
        | Error::EmptySelection
        | Error::InvalidParams(_)
        | Error::NoReports => 1,
        Error::Internal(_) => 3,
        _ => 2,
    }
}
