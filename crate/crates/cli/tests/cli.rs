//! End-to-end tests of the `qa-router` binary.

use std::path::Path;
use std::process::{Command, Output};

fn qa_router(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qa-router"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

#[test]
fn oracle_reports_fixture_baselines() {
    let out = qa_router(&["oracle"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("oracle mean F1: 0.8935"), "{text}");
    assert!(text.contains("UTQA_English"));
    assert!(text.contains("0.6861"));
}

#[test]
fn extract_writes_feature_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("features.csv");
    let out = qa_router(&["extract", "--out", out_path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let content = std::fs::read_to_string(&out_path).unwrap();
    let lines: Vec<&str> = content.lines().collect();
    assert_eq!(lines.len(), 101);
    assert!(lines[0].starts_with("question_id,qt_list,"));
    assert_eq!(lines[0].split(',').count(), 31);
}

#[test]
fn extract_of_empty_question_file_is_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let questions = dir.path().join("empty.json");
    std::fs::write(&questions, "[]").unwrap();
    let out_path = dir.path().join("features.csv");
    let out = qa_router(&[
        "extract",
        "--questions",
        questions.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let content = std::fs::read_to_string(&out_path).unwrap();
    assert_eq!(content.lines().count(), 1);
}

#[test]
fn missing_gazetteer_is_an_explicit_error() {
    let out = qa_router(&["extract", "--gazetteer", "/no/such/gazetteer.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("gazetteer.json"));
}

fn train_model(dir: &Path, extra: &[&str]) -> std::path::PathBuf {
    let model = dir.join("model.json");
    let mut args = vec![
        "train",
        "--method",
        "pst",
        "--features",
        "#T,Loc,QW,QRT",
        "--model",
        model.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    let out = qa_router(&args);
    assert!(out.status.success(), "{}", stderr(&out));
    model
}

#[test]
fn train_reports_summary_and_writes_model() {
    let dir = tempfile::tempdir().unwrap();
    let model = train_model(dir.path(), &[]);
    let out_text = std::fs::read_to_string(&model).unwrap();
    let value: serde_json::Value = serde_json::from_str(&out_text).unwrap();
    assert_eq!(value["format_version"], "1");
    assert!(value["fingerprint"].as_str().unwrap().len() == 64);
}

#[test]
fn route_emits_ranked_confidences() {
    let dir = tempfile::tempdir().unwrap();
    let model = train_model(dir.path(), &[]);
    let out = qa_router(&[
        "route",
        "--model",
        model.to_str().unwrap(),
        "--question",
        "Who is the mayor of Paris?",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let confidences = value["confidences"].as_array().unwrap();
    assert_eq!(confidences.len(), 6);
    let scores: Vec<f64> = confidences
        .iter()
        .map(|c| c["score"].as_f64().unwrap())
        .collect();
    for window in scores.windows(2) {
        assert!(window[0] >= window[1], "confidences not sorted: {scores:?}");
    }
    let chosen = value["chosen_system"].as_str().unwrap();
    assert!(confidences
        .iter()
        .any(|c| c["system"].as_str().unwrap() == chosen));
}

#[test]
fn route_rejects_empty_question_and_bad_model() {
    let dir = tempfile::tempdir().unwrap();
    let model = train_model(dir.path(), &[]);
    let out = qa_router(&["route", "--model", model.to_str().unwrap(), "--question", "  "]);
    assert_eq!(out.status.code(), Some(2));

    // tamper with the format version
    let tampered = dir.path().join("tampered.json");
    let body = std::fs::read_to_string(&model)
        .unwrap()
        .replace("\"format_version\": \"1\"", "\"format_version\": \"0\"");
    std::fs::write(&tampered, body).unwrap();
    let out = qa_router(&[
        "route",
        "--model",
        tampered.to_str().unwrap(),
        "--question",
        "Who is the mayor of Paris?",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("format version"));
}

#[test]
fn route_verifies_fingerprint_when_inputs_are_given() {
    let dir = tempfile::tempdir().unwrap();
    let model = train_model(dir.path(), &[]);
    // a different question file than the model was trained on
    let other = dir.path().join("other.json");
    std::fs::write(&other, r#"[{"id": 0, "question": "Who?"}]"#).unwrap();
    let matrix = dir.path().join("matrix.csv");
    std::fs::write(&matrix, "question_id,A\n0,1.0\n").unwrap();
    let out = qa_router(&[
        "route",
        "--model",
        model.to_str().unwrap(),
        "--question",
        "Who is the mayor of Paris?",
        "--questions",
        other.to_str().unwrap(),
        "--matrix",
        matrix.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("fingerprint"));
}

#[test]
fn evaluate_writes_all_report_files() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("eval");
    let out = qa_router(&[
        "evaluate",
        "--method",
        "cc",
        "--protocol",
        "cv10",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    for name in ["report.csv", "boxplot.csv", "summary.md", "comparison.csv"] {
        assert!(out_dir.join(name).exists(), "missing {name}");
    }
    let boxplot = std::fs::read_to_string(out_dir.join("boxplot.csv")).unwrap();
    assert_eq!(boxplot.lines().count(), 11); // header + 10 folds
    let report = std::fs::read_to_string(out_dir.join("report.csv")).unwrap();
    assert_eq!(report.lines().count(), 101);
}

#[test]
fn evaluate_all_compares_every_classifier() {
    let dir = tempfile::tempdir().unwrap();
    let questions = dir.path().join("questions.tsv");
    let matrix = dir.path().join("matrix.csv");
    let texts = [
        "Who is the mayor of Paris?",
        "What do ants eat?",
        "Where do the Red Sox play?",
        "Can you cry underwater?",
        "How many moons does Mars have?",
        "Which films did Stanley Kubrick direct?",
        "When did princess Diana die?",
        "Show me all museums in London.",
        "What is the biggest stadium in Spain?",
        "Who wrote Harry Potter?",
        "In which city does Sylvester Stallone live?",
        "Give me all South American countries.",
    ];
    let tsv: String = texts
        .iter()
        .enumerate()
        .map(|(i, t)| format!("{i}\t{t}\n"))
        .collect();
    std::fs::write(&questions, tsv).unwrap();
    let mut csv = String::from("question_id,A,B\n");
    for i in 0..12 {
        csv.push_str(&format!("{i},{},{}\n", (i % 2) as f64, ((i + 1) % 2) as f64));
    }
    std::fs::write(&matrix, csv).unwrap();

    let out_dir = dir.path().join("all");
    let out = qa_router(&[
        "evaluate",
        "--method",
        "all",
        "--questions",
        questions.to_str().unwrap(),
        "--matrix",
        matrix.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    for name in [
        "report.csv",
        "boxplot.csv",
        "summary.md",
        "classifiers.csv",
        "comparison.csv",
    ] {
        assert!(out_dir.join(name).exists(), "missing {name}");
    }
    let classifiers = std::fs::read_to_string(out_dir.join("classifiers.csv")).unwrap();
    assert_eq!(classifiers.lines().count(), 11); // header + 10 methods
    let boxplot = std::fs::read_to_string(out_dir.join("boxplot.csv")).unwrap();
    assert_eq!(boxplot.lines().count(), 1 + 10 * 10); // 10 methods x 10 cv folds
    let summary = std::fs::read_to_string(out_dir.join("summary.md")).unwrap();
    assert!(summary.contains("| Classifier | Leave-one-out F1 | Full-train F1 |"));
}

#[test]
fn associate_emits_six_by_thirteen_table() {
    let out = qa_router(&["associate"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 1 + 6 * 13);
    assert!(text.starts_with("system,feature,v,chi2,n\n"));
}

#[test]
fn feature_search_listed_mode_echoes_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("search");
    let out = qa_router(&[
        "feature-search",
        "--method",
        "pst",
        "--listed",
        "QRT;QT;QW;#T;QW,Loc;QRT,QW;QRT,QW,Loc;#T,Loc,QW,QRT,Pers;#T,Loc,QW,QRT",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = std::fs::read_to_string(out_dir.join("feature_search.csv")).unwrap();
    assert_eq!(csv.lines().count(), 10); // header + 9 listed combinations
    assert!(out_dir.join("feature_search.md").exists());
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    let model = dir.path().join("model.json");
    std::fs::write(
        &config,
        format!(
            r##"{{"method": "pst", "features": "#T,Loc,QW,QRT", "model": "{}", "seed": 7}}"##,
            model.display()
        ),
    )
    .unwrap();
    let out = qa_router(&["train", "--config", config.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("seed:      7"));

    // explicit flag wins over the config value
    let out = qa_router(&[
        "train",
        "--config",
        config.to_str().unwrap(),
        "--method",
        "lc",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("method:    lc"));
}

#[test]
fn unknown_config_key_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    std::fs::write(&config, r#"{"methodd": "pst"}"#).unwrap();
    let out = qa_router(&["oracle", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_one_data_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("m.json");
    let out = qa_router(&["train", "--method", "bogus", "--model", model.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));

    let out = qa_router(&["train", "--method", "pst"]);
    assert_eq!(out.status.code(), Some(1), "missing --model is a usage error");

    let out = qa_router(&[
        "train",
        "--method",
        "pst",
        "--model",
        model.to_str().unwrap(),
        "--matrix",
        "/no/such/file.csv",
    ]);
    assert_eq!(out.status.code(), Some(2));

    let out = qa_router(&["evaluate", "--method", "pst", "--protocol", "weekly", "--out", "/tmp/x"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn tsv_questions_are_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let questions = dir.path().join("questions.tsv");
    std::fs::write(&questions, "0\tWho is the mayor of Paris?\n1\tWhat do ants eat?\n").unwrap();
    let out = qa_router(&["extract", "--questions", questions.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(stdout(&out).lines().count(), 3);
}
