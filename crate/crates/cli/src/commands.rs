//! Implementations of the CLI subcommands.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use qa_router_core::evaluation::{
    compare_report, evaluate, group_list_name, subset_search, ComparisonTable, PreparedDataset,
    Protocol, SearchMode,
};
use qa_router_core::features::{extract, EncodingSchema, FeatureGroup};
use qa_router_core::model::{fingerprint, ModelFile};
use qa_router_core::multilabel::{Method, MultiLabelParams};
use qa_router_core::selection::oracle_mean;
use qa_router_core::stats::association_profile;
use qa_router_core::{Error, Gazetteer, QuestionRecord, Result};

use crate::config::{training_config_string, LoadedData};

fn write_output(path: Option<&PathBuf>, content: &str) -> Result<()> {
    match path {
        Some(p) => {
            if let Some(parent) = p.parent() {
                if !parent.as_os_str().is_empty() {
                    std::fs::create_dir_all(parent).map_err(|e| Error::Io {
                        path: parent.display().to_string(),
                        source: e,
                    })?;
                }
            }
            std::fs::write(p, content).map_err(|e| Error::Io {
                path: p.display().to_string(),
                source: e,
            })
        }
        None => {
            print!("{content}");
            std::io::stdout().flush().ok();
            Ok(())
        }
    }
}

fn write_into_dir(dir: &Path, name: &str, content: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.display().to_string(),
        source: e,
    })?;
    let path = dir.join(name);
    std::fs::write(&path, content).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    Ok(path)
}

/// One row per question, one column per feature slot.
pub fn cmd_extract(
    questions: &[QuestionRecord],
    gazetteer: &Gazetteer,
    groups: &[FeatureGroup],
    out: Option<&PathBuf>,
) -> Result<()> {
    let schema = EncodingSchema::full().restrict(groups)?;
    let mut csv = String::from("question_id");
    for name in schema.slot_names() {
        csv.push(',');
        csv.push_str(&name);
    }
    csv.push('\n');
    for q in questions {
        let vector = schema.encode(&extract(q, gazetteer));
        csv.push_str(&q.id.to_string());
        for slot in &vector.slots {
            csv.push(',');
            csv.push_str(&slot.to_string());
        }
        csv.push('\n');
    }
    write_output(out, &csv)
}

pub struct TrainOptions {
    pub method: Method,
    pub groups: Vec<FeatureGroup>,
    pub params: MultiLabelParams,
    pub seed: u64,
    pub model_out: PathBuf,
}

pub fn cmd_train(data: &LoadedData, options: &TrainOptions) -> Result<()> {
    let prep = PreparedDataset::from_dataset(&data.dataset, &data.gazetteer);
    let indices: Vec<usize> = (0..prep.len()).collect();
    let meta = qa_router_core::evaluation::train_meta(
        &prep,
        &indices,
        &options.groups,
        options.method,
        &options.params,
        options.seed,
    )?;
    let report = evaluate(
        &prep,
        &options.groups,
        options.method,
        &options.params,
        Protocol::Full,
        options.seed,
    )?;

    let config = training_config_string(&meta);
    let file = ModelFile::new(
        meta,
        fingerprint(&data.questions_bytes, &data.matrix_bytes, &config),
    );
    file.save(&options.model_out)?;

    println!("method:    {}", options.method);
    println!("features:  {}", group_list_name(&options.groups));
    println!("seed:      {}", options.seed);
    println!("questions: {}", prep.len());
    println!("training aggregate F1: {:.4}", report.aggregate);
    println!("model written to {}", options.model_out.display());
    Ok(())
}

#[derive(Serialize)]
struct RouteConfidence {
    system: String,
    score: f64,
}

#[derive(Serialize)]
struct RouteOutput {
    question: String,
    chosen_system: String,
    confidences: Vec<RouteConfidence>,
}

pub fn cmd_route(
    model_path: &Path,
    question: &str,
    gazetteer: &Gazetteer,
    verify: Option<(&[u8], &[u8])>,
) -> Result<()> {
    if question.trim().is_empty() {
        return Err(Error::EmptyQuestionText { id: 0 });
    }
    let file = ModelFile::load(model_path)?;
    if let Some((questions_bytes, matrix_bytes)) = verify {
        let config = training_config_string(&file.meta);
        file.verify_fingerprint(&fingerprint(questions_bytes, matrix_bytes, &config))?;
    }

    let record = QuestionRecord::new(0, question);
    let confidence = file.meta.confidences(&record, gazetteer)?;
    let chosen = file.meta.choose(&confidence);

    let mut ranked: Vec<usize> = (0..confidence.scores.len()).collect();
    ranked.sort_by(|&a, &b| confidence.scores[b].total_cmp(&confidence.scores[a]).then(a.cmp(&b)));
    let output = RouteOutput {
        question: question.to_string(),
        chosen_system: file.meta.systems[chosen].clone(),
        confidences: ranked
            .into_iter()
            .map(|i| RouteConfidence {
                system: file.meta.systems[i].clone(),
                score: confidence.scores[i],
            })
            .collect(),
    };
    println!(
        "{}",
        serde_json::to_string_pretty(&output).expect("route output serializes")
    );
    Ok(())
}

pub struct EvaluateOptions {
    pub method: Method,
    pub groups: Vec<FeatureGroup>,
    pub params: MultiLabelParams,
    pub protocol: Protocol,
    pub seed: u64,
    pub out: PathBuf,
}

/// Run every classifier under leave-one-out, full-train, and 10-fold
/// cross-validation, and emit the comparison artifacts: a classifier table
/// (markdown + CSV), per-question rows for all runs, and cross-validation
/// boxplot data.
pub fn cmd_evaluate_all(
    data: &LoadedData,
    groups: &[FeatureGroup],
    params: &MultiLabelParams,
    seed: u64,
    out: &Path,
) -> Result<()> {
    let prep = PreparedDataset::from_dataset(&data.dataset, &data.gazetteer);

    let mut table_rows = Vec::new();
    let mut report_csv = String::from("protocol,method,features,fold,question_id,chosen_system,f1\n");
    let mut boxplot_csv = String::from("method,fold,score\n");
    let mut classifier_csv = String::from("method,loo_f1,full_f1,cv10_mean_f1\n");
    let mut full_reports = Vec::new();

    for method in Method::ALL {
        let loo = evaluate(&prep, groups, method, params, Protocol::Loo, seed)?;
        let full = evaluate(&prep, groups, method, params, Protocol::Full, seed)?;
        let cv = evaluate(&prep, groups, method, params, Protocol::Cv { folds: 10 }, seed)?;

        for report in [&loo, &full, &cv] {
            for line in report.to_csv_string().lines().skip(1) {
                report_csv.push_str(line);
                report_csv.push('\n');
            }
        }
        for line in cv.boxplot_csv_string().lines().skip(1) {
            boxplot_csv.push_str(line);
            boxplot_csv.push('\n');
        }
        classifier_csv.push_str(&format!(
            "{method},{},{},{}\n",
            loo.aggregate, full.aggregate, cv.aggregate
        ));
        table_rows.push((method, loo.aggregate, full.aggregate));
        full_reports.push(full);
    }

    let comparison = compare_report(
        &data.dataset.matrix,
        &full_reports.iter().collect::<Vec<_>>(),
    )?;

    write_into_dir(out, "report.csv", &report_csv)?;
    write_into_dir(out, "boxplot.csv", &boxplot_csv)?;
    write_into_dir(out, "summary.md", &qa_router_core::evaluation::classifier_table_markdown(&table_rows))?;
    write_into_dir(out, "classifiers.csv", &classifier_csv)?;
    write_into_dir(out, "comparison.csv", &comparison.to_csv_string())?;

    println!("classifier        loo     full");
    for (method, loo, full) in &table_rows {
        println!("{:<14} {loo:>8.4} {full:>8.4}", method.name());
    }
    println!("reports written to {}", out.display());
    Ok(())
}

pub fn cmd_evaluate(data: &LoadedData, options: &EvaluateOptions) -> Result<()> {
    let prep = PreparedDataset::from_dataset(&data.dataset, &data.gazetteer);
    let report = evaluate(
        &prep,
        &options.groups,
        options.method,
        &options.params,
        options.protocol,
        options.seed,
    )?;
    let comparison = compare_report(&data.dataset.matrix, &[&report])?;

    write_into_dir(&options.out, "report.csv", &report.to_csv_string())?;
    write_into_dir(&options.out, "boxplot.csv", &report.boxplot_csv_string())?;
    write_into_dir(&options.out, "summary.md", &report.to_markdown())?;
    write_into_dir(&options.out, "comparison.csv", &comparison.to_csv_string())?;

    println!(
        "{} {} on {} questions ({} folds)",
        options.protocol.name(),
        options.method,
        report.rows.len(),
        report.fold_scores.len()
    );
    println!("aggregate F1: {:.4}", report.aggregate);
    let best_single = data
        .dataset
        .matrix
        .system_means()
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    let delta = report.aggregate - best_single;
    println!(
        "vs best single system ({best_single:.4}): {delta:+.4} absolute, {:+.1}%",
        delta / best_single * 100.0
    );
    println!("reports written to {}", options.out.display());
    Ok(())
}

pub fn cmd_associate(data: &LoadedData, out: Option<&PathBuf>) -> Result<()> {
    let profile = association_profile(&data.dataset, &data.gazetteer)?;
    let csv = profile.to_csv_string(data.dataset.len() as u64);
    write_output(out, &csv)?;
    if out.is_some() {
        let mut means: Vec<(FeatureGroup, f64)> = profile
            .group_means()
            .into_iter()
            .filter_map(|(g, m)| m.map(|m| (g, m)))
            .collect();
        means.sort_by(|a, b| b.1.total_cmp(&a.1));
        println!("strongest associations (mean V over systems):");
        for (group, v) in means.iter().take(3) {
            println!("  {:8} {v:.4}", group.name());
        }
    }
    Ok(())
}

pub struct SearchOptions {
    pub method: Method,
    pub params: MultiLabelParams,
    pub mode: SearchMode,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

pub fn cmd_feature_search(data: &LoadedData, options: &SearchOptions) -> Result<()> {
    let prep = PreparedDataset::from_dataset(&data.dataset, &data.gazetteer);
    let report = subset_search(
        &prep,
        options.method,
        &options.params,
        options.mode.clone(),
        options.seed,
    )?;

    if let Some(dir) = &options.out {
        write_into_dir(dir, "feature_search.csv", &report.to_csv_string())?;
        write_into_dir(dir, "feature_search.md", &report.to_markdown(15))?;
    }
    let best = report.best();
    println!("combinations evaluated: {}", report.results.len());
    println!(
        "best: {} with F1 {:.4}",
        group_list_name(&best.groups),
        best.score
    );
    if let Some(all) = report.score_for(&FeatureGroup::ALL) {
        println!("all features: F1 {all:.4}");
    }
    if let Some(dir) = &options.out {
        println!("reports written to {}", dir.display());
    }
    Ok(())
}

pub fn cmd_oracle(data: &LoadedData, out: Option<&PathBuf>) -> Result<()> {
    let matrix = &data.dataset.matrix;
    let mut entries: Vec<(String, f64)> = matrix
        .systems()
        .iter()
        .cloned()
        .zip(matrix.system_means())
        .collect();
    entries.push(("oracle".into(), oracle_mean(matrix)?));

    println!("mean F1 per system:");
    for (name, value) in &entries[..entries.len() - 1] {
        println!("  {name:<16} {value:.4}");
    }
    let oracle = entries.last().expect("oracle entry").1;
    println!("oracle mean F1: {oracle:.4}");

    if let Some(path) = out {
        let table = ComparisonTable { entries };
        write_output(Some(path), &table.to_csv_string())?;
        println!("comparison written to {}", path.display());
    }
    Ok(())
}
