use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use qa_router_bench::{bench_dataset, bench_prepared};
use qa_router_core::evaluation::{evaluate, subset_search, Protocol, SearchMode};
use qa_router_core::features::{extract, FeatureGroup};
use qa_router_core::multilabel::{Method, MultiLabelModel, MultiLabelParams, TrainingSet};
use qa_router_core::stats::association_profile;

fn feature_extraction(c: &mut Criterion) {
    let (dataset, gazetteer) = bench_dataset();
    c.bench_function("extract_100_questions", |b| {
        b.iter(|| {
            for q in &dataset.questions {
                black_box(extract(q, &gazetteer));
            }
        })
    });
}

fn association(c: &mut Criterion) {
    let (dataset, gazetteer) = bench_dataset();
    c.bench_function("association_profile_6x13", |b| {
        b.iter(|| black_box(association_profile(&dataset, &gazetteer).unwrap()))
    });
}

fn classifier_fits(c: &mut Criterion) {
    let prep = bench_prepared();
    let data = TrainingSet {
        features: &prep.vectors,
        labels: &prep.labels,
        scores: Some(&prep.scores),
    };
    let params = MultiLabelParams::default();
    let mut group = c.benchmark_group("fit_full_fixture");
    for method in [Method::Pst, Method::Br, Method::Cc, Method::Cdn] {
        group.bench_function(method.name(), |b| {
            b.iter(|| black_box(MultiLabelModel::fit(method, &data, &params, 42).unwrap()))
        });
    }
    group.finish();
}

fn full_train_evaluation(c: &mut Criterion) {
    let prep = bench_prepared();
    let params = MultiLabelParams::default();
    let groups = [
        FeatureGroup::TokenCount,
        FeatureGroup::EntityLocation,
        FeatureGroup::WhWord,
        FeatureGroup::ResourceType,
    ];
    c.bench_function("evaluate_full_pst_restricted", |b| {
        b.iter(|| {
            black_box(
                evaluate(&prep, &groups, Method::Pst, &params, Protocol::Full, 42).unwrap(),
            )
        })
    });
}

fn listed_subset_search(c: &mut Criterion) {
    let prep = bench_prepared();
    let params = MultiLabelParams::default();
    let listed: Vec<Vec<FeatureGroup>> = FeatureGroup::ALL.iter().map(|g| vec![*g]).collect();
    c.bench_function("subset_search_13_singletons", |b| {
        b.iter(|| {
            black_box(
                subset_search(
                    &prep,
                    Method::Pst,
                    &params,
                    SearchMode::Listed(listed.clone()),
                    42,
                )
                .unwrap(),
            )
        })
    });
}

criterion_group!(
    benches,
    feature_extraction,
    association,
    classifier_fits,
    full_train_evaluation,
    listed_subset_search
);
criterion_main!(benches);
