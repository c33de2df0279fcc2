//! Shared setup for the pipeline benchmarks.

use qa_router_core::evaluation::PreparedDataset;
use qa_router_core::{fixture, Dataset, Gazetteer};

pub fn bench_dataset() -> (Dataset, Gazetteer) {
    (fixture::dataset(), fixture::gazetteer())
}

pub fn bench_prepared() -> PreparedDataset {
    let (dataset, gazetteer) = bench_dataset();
    PreparedDataset::from_dataset(&dataset, &gazetteer)
}
