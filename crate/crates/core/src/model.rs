//! Model persistence: a versioned JSON file holding the trained metasystem
//! plus a fingerprint of the training inputs.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::selection::MetaModel;

pub const FORMAT_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format_version: String,
    /// Hash of (question file bytes, matrix bytes, training configuration),
    /// guarding against reusing a model with different data.
    pub fingerprint: String,
    pub meta: MetaModel,
}

impl ModelFile {
    pub fn new(meta: MetaModel, fingerprint: String) -> Self {
        ModelFile {
            format_version: FORMAT_VERSION.to_string(),
            fingerprint,
            meta,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serialization cannot fail")
    }

    pub fn from_json(content: &str, source: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(content)
            .map_err(|e| Error::parse(source, format!("line {}", e.line()), e.to_string()))?;
        let version = value
            .get("format_version")
            .and_then(|v| v.as_str())
            .unwrap_or("<missing>");
        if version != FORMAT_VERSION {
            return Err(Error::ModelVersion {
                expected: FORMAT_VERSION.to_string(),
                found: version.to_string(),
            });
        }
        serde_json::from_value(value)
            .map_err(|e| Error::parse(source, "model body", e.to_string()))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut body = self.to_json();
        body.push('\n');
        std::fs::write(path, body).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let content = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        ModelFile::from_json(&content, &path.display().to_string())
    }

    pub fn verify_fingerprint(&self, expected: &str) -> Result<()> {
        if self.fingerprint == expected {
            Ok(())
        } else {
            Err(Error::FingerprintMismatch)
        }
    }
}

/// Stable hash of the training inputs and configuration.
pub fn fingerprint(questions: &[u8], matrix: &[u8], config: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update((questions.len() as u64).to_le_bytes());
    hasher.update(questions);
    hasher.update((matrix.len() as u64).to_le_bytes());
    hasher.update(matrix);
    hasher.update(config.as_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluation::{train_meta, PreparedDataset};
    use crate::features::FeatureGroup;
    use crate::fixture;
    use crate::multilabel::{Method, MultiLabelParams};

    fn trained() -> MetaModel {
        let prep = PreparedDataset::from_dataset(&fixture::dataset(), &fixture::gazetteer());
        let indices: Vec<usize> = (0..prep.len()).collect();
        train_meta(
            &prep,
            &indices,
            &FeatureGroup::ALL,
            Method::Pst,
            &MultiLabelParams::default(),
            42,
        )
        .unwrap()
    }

    #[test]
    fn round_trip_reproduces_predictions_exactly() {
        let meta = trained();
        let file = ModelFile::new(meta.clone(), fingerprint(b"q", b"m", "cfg"));
        let loaded = ModelFile::from_json(&file.to_json(), "<mem>").unwrap();
        let gaz = fixture::gazetteer();
        for q in fixture::questions() {
            let a = meta.confidences(&q, &gaz).unwrap();
            let b = loaded.meta.confidences(&q, &gaz).unwrap();
            assert_eq!(a, b, "question {}", q.id);
        }
        assert_eq!(meta, loaded.meta);
    }

    #[test]
    fn version_mismatch_is_reported() {
        let meta = trained();
        let file = ModelFile::new(meta, "fp".into());
        let body = file.to_json().replace("\"format_version\": \"1\"", "\"format_version\": \"9\"");
        match ModelFile::from_json(&body, "<mem>") {
            Err(Error::ModelVersion { found, .. }) => assert_eq!(found, "9"),
            other => panic!("expected version error, got {other:?}"),
        }
    }

    #[test]
    fn fingerprint_is_stable_and_input_sensitive() {
        let a = fingerprint(b"questions", b"matrix", "config");
        let b = fingerprint(b"questions", b"matrix", "config");
        assert_eq!(a, b);
        assert_ne!(a, fingerprint(b"questions", b"matrix", "other"));
        assert_ne!(a, fingerprint(b"question", b"smatrix", "config"));
        let file = ModelFile::new(trained(), a.clone());
        assert!(file.verify_fingerprint(&a).is_ok());
        assert!(matches!(
            file.verify_fingerprint("deadbeef"),
            Err(Error::FingerprintMismatch)
        ));
    }

    #[test]
    fn save_and_load_via_disk() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        let file = ModelFile::new(trained(), "fp".into());
        file.save(&path).unwrap();
        let loaded = ModelFile::load(&path).unwrap();
        assert_eq!(file, loaded);
    }
}
