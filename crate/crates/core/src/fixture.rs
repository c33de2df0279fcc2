//! The QALD-6 evaluation fixture embedded in the binary: 100 questions,
//! the six-system performance matrix, the reference optimal/metasystem
//! columns, and the gazetteer covering the fixture's entity surface forms.

use crate::dataset::{
    parse_performance_csv, parse_questions_json, Dataset, PerformanceMatrix, QuestionRecord,
};
use crate::features::Gazetteer;

pub const QUESTIONS_JSON: &str =
    include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/qald6_questions.json"));
pub const PERFORMANCE_CSV: &str =
    include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/qald6_performance.csv"));
pub const REFERENCE_CSV: &str =
    include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/qald6_reference.csv"));
pub const GAZETTEER_JSON: &str =
    include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/gazetteer.json"));

pub fn questions() -> Vec<QuestionRecord> {
    parse_questions_json(QUESTIONS_JSON, "embedded:qald6_questions.json")
        .expect("embedded question fixture is valid")
}

pub fn matrix() -> PerformanceMatrix {
    parse_performance_csv(PERFORMANCE_CSV, "embedded:qald6_performance.csv")
        .expect("embedded performance fixture is valid")
}

pub fn gazetteer() -> Gazetteer {
    Gazetteer::from_json_str(GAZETTEER_JSON, "embedded:gazetteer.json")
        .expect("embedded gazetteer is valid")
}

pub fn dataset() -> Dataset {
    Dataset::join(questions(), matrix()).expect("embedded fixture joins cleanly")
}

/// Reference `(question_id, optimal, metasystem)` rows from the published
/// result table, used to validate the scoring plumbing.
pub fn reference() -> Vec<(u64, f64, f64)> {
    REFERENCE_CSV
        .lines()
        .skip(1)
        .filter(|line| !line.trim().is_empty())
        .map(|line| {
            let mut parts = line.split(',');
            let id = parts.next().unwrap().parse().unwrap();
            let optimal = parts.next().unwrap().parse().unwrap();
            let metasystem = parts.next().unwrap().parse().unwrap();
            (id, optimal, metasystem)
        })
        .collect()
}
