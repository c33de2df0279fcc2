//! `qa-router`: train, evaluate, and apply a question-routing metasystem
//! over a benchmark performance matrix.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 data error,
//! 3 internal invariant violation.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qa_router_core::evaluation::SearchMode;
use qa_router_core::features::FeatureGroup;
use qa_router_core::Result;

use config::{
    build_params, exit_code, load_data, load_gazetteer, load_question_records, parse_features,
    parse_method, parse_protocol, FileConfig, DEFAULT_SEED,
};

#[derive(Parser)]
#[command(
    name = "qa-router",
    version,
    about = "Route natural-language questions to the QA system most likely to answer them"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every data-consuming subcommand. Paths omitted here and
/// in the config file fall back to the embedded benchmark fixture.
#[derive(Args, Debug, Clone, Default)]
struct DataArgs {
    /// Question file, JSON (QALD-style) or TSV `id<TAB>text`
    #[arg(long)]
    questions: Option<PathBuf>,
    /// Performance matrix CSV with header `question_id,<system>,...`
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Gazetteer JSON (entities, comparatives, superlatives)
    #[arg(long)]
    gazetteer: Option<PathBuf>,
    /// JSON config file; explicit flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// RNG seed for every stochastic step
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug, Clone, Default)]
struct MethodArgs {
    /// Classifier: br, lc, cc, mcc, rt, ps, pst, rakeld, rakelo, cdn;
    /// `evaluate` also accepts `all` to compare every classifier under
    /// loo, full, and cv10 at once
    #[arg(long)]
    method: Option<String>,
    /// Comma-separated feature groups (QT,QRT,QW,#T,Comp,Sup,Pers,Money,Loc,Percent,Org,Date,Misc)
    #[arg(long)]
    features: Option<String>,
    /// Prune label combinations occurring at most this many times (ps, pst)
    #[arg(long)]
    prune: Option<usize>,
    /// Per-label confidence threshold (pst, rt)
    #[arg(long)]
    threshold: Option<f64>,
    /// Labelset size (rakeld, rakelo)
    #[arg(long)]
    k: Option<usize>,
    /// Ensemble size (mcc, rakelo)
    #[arg(long)]
    ensemble: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Extract feature vectors to CSV
    Extract {
        #[command(flatten)]
        data: DataArgs,
        /// Comma-separated feature groups; all groups when omitted
        #[arg(long)]
        features: Option<String>,
        /// Output CSV path; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train a metasystem and write the model file
    Train {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        method: MethodArgs,
        /// Output model path
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Route one question through a trained model
    Route {
        /// Trained model file
        #[arg(long)]
        model: PathBuf,
        /// Question text
        #[arg(long)]
        question: String,
        /// Gazetteer JSON; embedded fixture gazetteer when omitted
        #[arg(long)]
        gazetteer: Option<PathBuf>,
        /// Verify the model fingerprint against these training inputs
        #[arg(long)]
        questions: Option<PathBuf>,
        #[arg(long)]
        matrix: Option<PathBuf>,
    },
    /// Evaluate a classifier under a protocol and write report files
    Evaluate {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        method: MethodArgs,
        /// Protocol: cv10, loo, or full
        #[arg(long)]
        protocol: Option<String>,
        /// Fold count for cross-validation
        #[arg(long)]
        folds: Option<usize>,
        /// Output directory for report.csv, boxplot.csv, summary.md, comparison.csv
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-system, per-feature association table (Cramér's V)
    Associate {
        #[command(flatten)]
        data: DataArgs,
        /// Output CSV path; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score feature-group combinations with full-train evaluation
    FeatureSearch {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        method: MethodArgs,
        /// Evaluate only these combinations, `;`-separated lists of groups
        /// (e.g. "QW;QRT,QW;#T,Loc,QW,QRT"); exhaustive when omitted
        #[arg(long)]
        listed: Option<String>,
        /// Output directory for feature_search.csv and feature_search.md
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Single-system and optimal-selection baselines
    Oracle {
        #[command(flatten)]
        data: DataArgs,
        /// Output CSV path for the comparison table
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version as "errors" that exit cleanly
            let code = if e.use_stderr() { 1 } else { 0 };
            e.print().ok();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Extract {
            data,
            features,
            out,
        } => {
            let file_config = FileConfig::load_opt(data.config.as_ref())?;
            let (questions, _) =
                load_question_records(data.questions.as_ref().or(file_config.questions.as_ref()))?;
            let gazetteer =
                load_gazetteer(data.gazetteer.as_ref().or(file_config.gazetteer.as_ref()))?;
            let groups = parse_features(features.as_deref().or(file_config.features.as_deref()))?;
            let out = out.or(file_config.out);
            commands::cmd_extract(&questions, &gazetteer, &groups, out.as_ref())
        }
        Command::Train {
            data,
            method,
            model,
        } => {
            let file_config = FileConfig::load_opt(data.config.as_ref())?;
            let loaded = load_merged(&data, &file_config)?;
            let options = commands::TrainOptions {
                method: parse_method(required(
                    method.method.as_deref().or(file_config.method.as_deref()),
                    "--method",
                )?)?,
                groups: parse_features(
                    method.features.as_deref().or(file_config.features.as_deref()),
                )?,
                params: merged_params(&method, &file_config),
                seed: data.seed.or(file_config.seed).unwrap_or(DEFAULT_SEED),
                model_out: model
                    .or(file_config.model)
                    .ok_or_else(|| usage("--model is required to write the trained model"))?,
            };
            commands::cmd_train(&loaded, &options)
        }
        Command::Route {
            model,
            question,
            gazetteer,
            questions,
            matrix,
        } => {
            let gazetteer = load_gazetteer(gazetteer.as_ref())?;
            let verify = match (&questions, &matrix) {
                (None, None) => None,
                _ => {
                    let loaded = load_data(questions.as_ref(), matrix.as_ref(), None)?;
                    Some((loaded.questions_bytes, loaded.matrix_bytes))
                }
            };
            commands::cmd_route(
                &model,
                &question,
                &gazetteer,
                verify.as_ref().map(|(q, m)| (q.as_slice(), m.as_slice())),
            )
        }
        Command::Evaluate {
            data,
            method,
            protocol,
            folds,
            out,
        } => {
            let file_config = FileConfig::load_opt(data.config.as_ref())?;
            let loaded = load_merged(&data, &file_config)?;
            let method_name = required(
                method.method.as_deref().or(file_config.method.as_deref()),
                "--method",
            )?
            .to_string();
            let groups = parse_features(
                method.features.as_deref().or(file_config.features.as_deref()),
            )?;
            let params = merged_params(&method, &file_config);
            let seed = data.seed.or(file_config.seed).unwrap_or(DEFAULT_SEED);
            let out = out
                .or(file_config.out)
                .ok_or_else(|| usage("--out directory is required for evaluation reports"))?;
            if method_name.eq_ignore_ascii_case("all") {
                return commands::cmd_evaluate_all(&loaded, &groups, &params, seed, &out);
            }
            let options = commands::EvaluateOptions {
                method: parse_method(&method_name)?,
                groups,
                params,
                protocol: parse_protocol(
                    protocol
                        .as_deref()
                        .or(file_config.protocol.as_deref())
                        .unwrap_or("full"),
                    folds.or(file_config.folds),
                )?,
                seed,
                out,
            };
            commands::cmd_evaluate(&loaded, &options)
        }
        Command::Associate { data, out } => {
            let file_config = FileConfig::load_opt(data.config.as_ref())?;
            let loaded = load_merged(&data, &file_config)?;
            commands::cmd_associate(&loaded, out.or(file_config.out).as_ref())
        }
        Command::FeatureSearch {
            data,
            method,
            listed,
            out,
        } => {
            let file_config = FileConfig::load_opt(data.config.as_ref())?;
            let loaded = load_merged(&data, &file_config)?;
            let mode = match listed {
                None => SearchMode::Exhaustive,
                Some(spec) => SearchMode::Listed(
                    spec.split(';')
                        .filter(|part| !part.trim().is_empty())
                        .map(FeatureGroup::parse_list)
                        .collect::<Result<Vec<Vec<FeatureGroup>>>>()?,
                ),
            };
            let options = commands::SearchOptions {
                method: parse_method(
                    method.method.as_deref().or(file_config.method.as_deref()).unwrap_or("pst"),
                )?,
                params: merged_params(&method, &file_config),
                mode,
                seed: data.seed.or(file_config.seed).unwrap_or(DEFAULT_SEED),
                out: out.or(file_config.out),
            };
            commands::cmd_feature_search(&loaded, &options)
        }
        Command::Oracle { data, out } => {
            let file_config = FileConfig::load_opt(data.config.as_ref())?;
            let loaded = load_merged(&data, &file_config)?;
            commands::cmd_oracle(&loaded, out.or(file_config.out).as_ref())
        }
    }
}

fn load_merged(data: &DataArgs, file_config: &FileConfig) -> Result<config::LoadedData> {
    load_data(
        data.questions.as_ref().or(file_config.questions.as_ref()),
        data.matrix.as_ref().or(file_config.matrix.as_ref()),
        data.gazetteer.as_ref().or(file_config.gazetteer.as_ref()),
    )
}

fn merged_params(
    method: &MethodArgs,
    file_config: &FileConfig,
) -> qa_router_core::MultiLabelParams {
    build_params(
        method.prune.or(file_config.prune),
        method.threshold.or(file_config.threshold),
        method.k.or(file_config.k),
        method.ensemble.or(file_config.ensemble),
    )
}

fn required<'a>(value: Option<&'a str>, flag: &str) -> Result<&'a str> {
    value.ok_or_else(|| usage(&format!("{flag} is required")))
}

fn usage(message: &str) -> qa_router_core::Error {
    qa_router_core::Error::InvalidParams(message.to_string())
}
