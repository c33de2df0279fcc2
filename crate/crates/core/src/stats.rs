//! Contingency tables and the Cramér's V association between question
//! features and per-system answerability.
//!
//! For a table with observed counts `c[i][j]`, row margins `r[i]`, column
//! margins `m[j]` and total `n`, the chi-squared statistic is
//! `n * Σ_ij (c[i][j] - r[i]*m[j]/n)^2 / (r[i]*m[j])`, which equals the
//! textbook Pearson statistic, and `V = sqrt(chi2 / (n * (k - 1)))` with
//! `k = min(I, J)`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, PerformanceMatrix};
use crate::error::{Error, Result};
use crate::features::{extract, EntityType, FeatureGroup, Gazetteer, QuestionFeatures};

/// Observed counts of (answerability class, feature state) pairs.
/// Row 0 is "can answer" (F1 > 0), row 1 is "cannot answer".
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContingencyTable {
    counts: Vec<Vec<u64>>,
    row_labels: Vec<String>,
    col_labels: Vec<String>,
}

impl ContingencyTable {
    pub fn new(
        counts: Vec<Vec<u64>>,
        row_labels: Vec<String>,
        col_labels: Vec<String>,
    ) -> Result<Self> {
        if counts.len() != row_labels.len() {
            return Err(Error::Internal("row label count mismatch".into()));
        }
        if counts.iter().any(|row| row.len() != col_labels.len()) {
            return Err(Error::Internal("ragged contingency rows".into()));
        }
        Ok(ContingencyTable {
            counts,
            row_labels,
            col_labels,
        })
    }

    pub fn from_counts(counts: Vec<Vec<u64>>) -> Result<Self> {
        let rows = counts.len();
        let cols = counts.first().map(Vec::len).unwrap_or(0);
        let row_labels = (0..rows).map(|i| format!("row{i}")).collect();
        let col_labels = (0..cols).map(|j| format!("col{j}")).collect();
        ContingencyTable::new(counts, row_labels, col_labels)
    }

    pub fn rows(&self) -> usize {
        self.counts.len()
    }

    pub fn cols(&self) -> usize {
        self.counts.first().map(Vec::len).unwrap_or(0)
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn n(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn row_margins(&self) -> Vec<u64> {
        self.counts.iter().map(|row| row.iter().sum()).collect()
    }

    pub fn col_margins(&self) -> Vec<u64> {
        let mut margins = vec![0; self.cols()];
        for row in &self.counts {
            for (m, v) in margins.iter_mut().zip(row) {
                *m += v;
            }
        }
        margins
    }

    pub fn transpose(&self) -> ContingencyTable {
        let mut counts = vec![vec![0; self.rows()]; self.cols()];
        for (i, row) in self.counts.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                counts[j][i] = *v;
            }
        }
        ContingencyTable {
            counts,
            row_labels: self.col_labels.clone(),
            col_labels: self.row_labels.clone(),
        }
    }
}

/// Pearson chi-squared statistic. Fails on tables with a zero margin.
pub fn chi_squared(table: &ContingencyTable) -> Result<f64> {
    let n = table.n();
    if n == 0 {
        return Err(Error::DegenerateTable {
            reason: "empty table".into(),
        });
    }
    let rows = table.row_margins();
    let cols = table.col_margins();
    if rows.contains(&0) || cols.contains(&0) {
        return Err(Error::DegenerateTable {
            reason: "zero margin".into(),
        });
    }
    let n = n as f64;
    let mut chi2 = 0.0;
    for (i, row) in table.counts().iter().enumerate() {
        for (j, &observed) in row.iter().enumerate() {
            let expected = rows[i] as f64 * cols[j] as f64 / n;
            let diff = observed as f64 - expected;
            chi2 += diff * diff / expected;
        }
    }
    Ok(chi2)
}

/// Chi-squared with the derived V coefficient and `k = min(I, J)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssociationResult {
    pub chi_squared: f64,
    pub v: f64,
    pub k: usize,
}

pub fn cramers_v(table: &ContingencyTable) -> Result<AssociationResult> {
    let k = table.rows().min(table.cols());
    if k < 2 {
        return Err(Error::DegenerateTable {
            reason: format!("min(I, J) = {k} < 2"),
        });
    }
    let chi2 = chi_squared(table)?;
    let n = table.n() as f64;
    let v = (chi2 / (n * (k - 1) as f64)).sqrt().min(1.0);
    Ok(AssociationResult {
        chi_squared: chi2,
        v,
        k,
    })
}

/// Count (answerability, feature state) pairs for one system over a
/// question set. Column order is the lexicographic order of the observed
/// state names.
pub fn build_table(
    matrix: &PerformanceMatrix,
    system: usize,
    feature_values: &BTreeMap<u64, String>,
) -> Result<ContingencyTable> {
    if system >= matrix.system_count() {
        return Err(Error::UnknownSystem {
            index: system,
            count: matrix.system_count(),
        });
    }
    if matrix.is_empty() {
        return Err(Error::DegenerateTable {
            reason: "no observations".into(),
        });
    }
    let mut states: Vec<&str> = Vec::new();
    for id in matrix.question_ids() {
        let state = feature_values
            .get(id)
            .ok_or(Error::MissingFeatureState { id: *id })?;
        if !states.contains(&state.as_str()) {
            states.push(state);
        }
    }
    states.sort_unstable();
    let col_of = |state: &str| states.iter().position(|s| *s == state).unwrap();

    let mut counts = vec![vec![0u64; states.len()]; 2];
    for id in matrix.question_ids() {
        let score = matrix.score(*id, system)?;
        let class = if score > 0.0 { 0 } else { 1 };
        counts[class][col_of(&feature_values[id])] += 1;
    }
    ContingencyTable::new(
        counts,
        vec!["can answer".into(), "cannot answer".into()],
        states.iter().map(|s| s.to_string()).collect(),
    )
}

/// Token-count bucket used for association analysis only; the classifier
/// path keeps the raw count. Edges are empirical quartiles of the fixture's
/// merged token counts.
pub fn token_bucket(count: usize) -> &'static str {
    match count {
        0..=5 => "<=5",
        6 => "6",
        7..=8 => "7-8",
        _ => ">=9",
    }
}

/// The categorical state of one feature group, as used in contingency
/// tables.
pub fn group_state(features: &QuestionFeatures, group: FeatureGroup) -> String {
    let flag = |t: EntityType| features.entity_flags.get(t).to_string();
    match group {
        FeatureGroup::QuestionType => features.question_type.label().to_string(),
        FeatureGroup::ResourceType => features.query_resource_type.label().to_string(),
        FeatureGroup::WhWord => features.wh_type.label().to_string(),
        FeatureGroup::TokenCount => token_bucket(features.token_count).to_string(),
        FeatureGroup::Comparative => features.comparative.to_string(),
        FeatureGroup::Superlative => features.superlative.to_string(),
        FeatureGroup::EntityPerson => flag(EntityType::Person),
        FeatureGroup::EntityMoney => flag(EntityType::Money),
        FeatureGroup::EntityLocation => flag(EntityType::Location),
        FeatureGroup::EntityPercent => flag(EntityType::Percent),
        FeatureGroup::EntityOrganization => flag(EntityType::Organization),
        FeatureGroup::EntityDate => flag(EntityType::Date),
        FeatureGroup::EntityMisc => flag(EntityType::Misc),
    }
}

/// One non-degenerate cell of the association profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssociationCell {
    pub v: f64,
    pub chi_squared: f64,
    pub n: u64,
}

/// Per-system, per-feature-group Cramér's V over a dataset. Degenerate
/// tables yield `None` cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssociationProfile {
    pub systems: Vec<String>,
    pub groups: Vec<FeatureGroup>,
    /// Indexed `cells[system][group]`.
    pub cells: Vec<Vec<Option<AssociationCell>>>,
}

impl AssociationProfile {
    /// Mean V per feature group over systems, skipping degenerate cells.
    /// Groups that are degenerate for every system give `None`.
    pub fn group_means(&self) -> Vec<(FeatureGroup, Option<f64>)> {
        self.groups
            .iter()
            .enumerate()
            .map(|(g, group)| {
                let values: Vec<f64> = self
                    .cells
                    .iter()
                    .filter_map(|row| row[g].map(|c| c.v))
                    .collect();
                let mean = if values.is_empty() {
                    None
                } else {
                    Some(values.iter().sum::<f64>() / values.len() as f64)
                };
                (*group, mean)
            })
            .collect()
    }

    /// CSV with header `system,feature,v,chi2,n`; degenerate cells keep
    /// their count but leave v and chi2 empty.
    pub fn to_csv_string(&self, total: u64) -> String {
        let mut out = String::from("system,feature,v,chi2,n\n");
        for (s, system) in self.systems.iter().enumerate() {
            for (g, group) in self.groups.iter().enumerate() {
                match self.cells[s][g] {
                    Some(cell) => out.push_str(&format!(
                        "{system},{},{},{},{}\n",
                        group.name(),
                        cell.v,
                        cell.chi_squared,
                        cell.n
                    )),
                    None => out.push_str(&format!("{system},{},,,{total}\n", group.name())),
                }
            }
        }
        out
    }
}

/// Compute the full association profile of a dataset.
pub fn association_profile(dataset: &Dataset, gazetteer: &Gazetteer) -> Result<AssociationProfile> {
    let features: Vec<(u64, QuestionFeatures)> = dataset
        .questions
        .iter()
        .map(|q| (q.id, extract(q, gazetteer)))
        .collect();

    let groups = FeatureGroup::ALL.to_vec();
    let mut cells = Vec::with_capacity(dataset.matrix.system_count());
    for system in 0..dataset.matrix.system_count() {
        let mut row = Vec::with_capacity(groups.len());
        for group in &groups {
            let states: BTreeMap<u64, String> = features
                .iter()
                .map(|(id, f)| (*id, group_state(f, *group)))
                .collect();
            let cell = build_table(&dataset.matrix, system, &states)
                .and_then(|t| cramers_v(&t).map(|r| (r, t.n())));
            match cell {
                Ok((r, n)) => row.push(Some(AssociationCell {
                    v: r.v,
                    chi_squared: r.chi_squared,
                    n,
                })),
                Err(Error::DegenerateTable { .. }) => row.push(None),
                Err(e) => return Err(e),
            }
        }
        cells.push(row);
    }
    Ok(AssociationProfile {
        systems: dataset.matrix.systems().to_vec(),
        groups,
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture;
    use proptest::prelude::*;

    fn table(counts: &[&[u64]]) -> ContingencyTable {
        ContingencyTable::from_counts(counts.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn perfect_association() {
        let t = table(&[&[10, 0], &[0, 10]]);
        assert_eq!(chi_squared(&t).unwrap(), 20.0);
        let r = cramers_v(&t).unwrap();
        assert_eq!(r.v, 1.0);
        assert_eq!(r.k, 2);
    }

    #[test]
    fn exact_independence() {
        let t = table(&[&[5, 5], &[5, 5]]);
        assert_eq!(chi_squared(&t).unwrap(), 0.0);
        assert_eq!(cramers_v(&t).unwrap().v, 0.0);
    }

    #[test]
    fn hand_computed_case() {
        let t = table(&[&[20, 5], &[10, 15]]);
        let chi2 = chi_squared(&t).unwrap();
        assert!((chi2 - 25.0 / 3.0).abs() < 1e-12, "chi2 = {chi2}");
        let v = cramers_v(&t).unwrap().v;
        assert!((v - (1.0f64 / 6.0).sqrt()).abs() < 1e-12, "v = {v}");
    }

    #[test]
    fn degenerate_tables_are_errors() {
        let zero_margin = table(&[&[5, 5], &[0, 0]]);
        assert!(matches!(
            chi_squared(&zero_margin),
            Err(Error::DegenerateTable { .. })
        ));
        let single_column = table(&[&[5], &[5]]);
        assert!(matches!(
            cramers_v(&single_column),
            Err(Error::DegenerateTable { .. })
        ));
    }

    #[test]
    fn build_table_counts_fixture_states() {
        let dataset = fixture::dataset();
        let gaz = fixture::gazetteer();
        let states: BTreeMap<u64, String> = dataset
            .questions
            .iter()
            .map(|q| {
                let f = extract(q, &gaz);
                (q.id, group_state(&f, FeatureGroup::Superlative))
            })
            .collect();
        // UTQA is system index 5
        let t = build_table(&dataset.matrix, 5, &states).unwrap();
        assert_eq!(t.n(), 100);
        assert_eq!(t.rows(), 2);
        assert_eq!(t.cols(), 2);
        // hand count: UTQA answers 74 questions; of the six superlative
        // questions it answers exactly three (columns sort false, true)
        assert_eq!(t.counts(), [[71, 3], [23, 3]]);
        let r = cramers_v(&t).unwrap();
        assert!(r.v > 0.0 && r.v <= 1.0);
    }

    #[test]
    fn build_table_reports_missing_states() {
        let dataset = fixture::dataset();
        let states = BTreeMap::new();
        assert!(matches!(
            build_table(&dataset.matrix, 0, &states),
            Err(Error::MissingFeatureState { .. })
        ));
    }

    #[test]
    fn fixture_profile_is_6_by_13_with_null_constant_columns() {
        let dataset = fixture::dataset();
        let profile = association_profile(&dataset, &fixture::gazetteer()).unwrap();
        assert_eq!(profile.systems.len(), 6);
        assert_eq!(profile.groups.len(), 13);
        for row in &profile.cells {
            assert_eq!(row.len(), 13);
            for cell in row.iter().flatten() {
                assert!(cell.v >= 0.0 && cell.v <= 1.0);
                assert_eq!(cell.n, 100);
            }
        }
        // no question mentions money or percentages, so those columns are
        // constant and their cells degenerate
        let money = profile
            .groups
            .iter()
            .position(|g| *g == FeatureGroup::EntityMoney)
            .unwrap();
        let percent = profile
            .groups
            .iter()
            .position(|g| *g == FeatureGroup::EntityPercent)
            .unwrap();
        for row in &profile.cells {
            assert!(row[money].is_none());
            assert!(row[percent].is_none());
        }
        let csv = profile.to_csv_string(100);
        assert!(csv.starts_with("system,feature,v,chi2,n\n"));
        assert_eq!(csv.lines().count(), 1 + 6 * 13);
    }

    #[test]
    fn token_buckets_cover_all_counts() {
        assert_eq!(token_bucket(1), "<=5");
        assert_eq!(token_bucket(5), "<=5");
        assert_eq!(token_bucket(6), "6");
        assert_eq!(token_bucket(7), "7-8");
        assert_eq!(token_bucket(8), "7-8");
        assert_eq!(token_bucket(9), ">=9");
        assert_eq!(token_bucket(40), ">=9");
    }

    fn arbitrary_table() -> impl Strategy<Value = ContingencyTable> {
        (2usize..=4, 2usize..=4).prop_flat_map(|(rows, cols)| {
            proptest::collection::vec(
                proptest::collection::vec(1u64..=20, cols),
                rows,
            )
            .prop_map(|counts| ContingencyTable::from_counts(counts).unwrap())
        })
    }

    proptest! {
        #[test]
        fn v_is_in_unit_interval(t in arbitrary_table()) {
            let r = cramers_v(&t).unwrap();
            prop_assert!(r.v >= 0.0 && r.v <= 1.0);
            prop_assert!(r.chi_squared >= 0.0);
        }

        #[test]
        fn transpose_preserves_v(t in arbitrary_table()) {
            let a = cramers_v(&t).unwrap();
            let b = cramers_v(&t.transpose()).unwrap();
            prop_assert!((a.v - b.v).abs() <= 1e-12);
        }

        #[test]
        fn count_scaling_preserves_v(t in arbitrary_table(), c in 1u64..=5) {
            let scaled = ContingencyTable::from_counts(
                t.counts().iter().map(|row| row.iter().map(|v| v * c).collect()).collect(),
            ).unwrap();
            let a = cramers_v(&t).unwrap();
            let b = cramers_v(&scaled).unwrap();
            prop_assert!((a.v - b.v).abs() <= 1e-12);
            prop_assert!((a.chi_squared * c as f64 - b.chi_squared).abs() <= 1e-9 * (1.0 + a.chi_squared));
        }

        #[test]
        fn permutation_preserves_v(t in arbitrary_table(), seed in 0u64..1000) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut row_order: Vec<usize> = (0..t.rows()).collect();
            let mut col_order: Vec<usize> = (0..t.cols()).collect();
            row_order.shuffle(&mut rng);
            col_order.shuffle(&mut rng);
            let permuted = ContingencyTable::from_counts(
                row_order
                    .iter()
                    .map(|&i| col_order.iter().map(|&j| t.counts()[i][j]).collect())
                    .collect(),
            ).unwrap();
            let a = cramers_v(&t).unwrap();
            let b = cramers_v(&permuted).unwrap();
            prop_assert!((a.v - b.v).abs() <= 1e-12);
        }

        // v == 0 exactly when the counts factor through the margins
        #[test]
        fn v_zero_iff_independent(r0 in 1u64..=6, r1 in 1u64..=6, c0 in 1u64..=6, c1 in 1u64..=6) {
            let counts = vec![
                vec![r0 * c0, r0 * c1],
                vec![r1 * c0, r1 * c1],
            ];
            let t = ContingencyTable::from_counts(counts).unwrap();
            let v = cramers_v(&t).unwrap().v;
            prop_assert!(v.abs() <= 1e-12);
        }
    }
}
