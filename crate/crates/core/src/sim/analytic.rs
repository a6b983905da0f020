//! Closed-form daily totals: duration × frequency and cost × frequency per
//! reporting label, with exact decimal sums.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::decimal::Decimal;
use crate::ontology::ValidatedModel;

use super::config::SimConfig;
use super::SimError;

/// Average daily time (minutes) and cost (EUR) booked under one label.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScenarioRow {
    pub label: String,
    pub daily_time: Decimal,
    pub daily_cost: Decimal,
}

/// Per-label daily results of one scenario run. Totals are the exact
/// column sums of the rows; rows are sorted by label (case-insensitive,
/// byte order breaking ties).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScenarioResult {
    pub scenario: String,
    pub rows: Vec<ScenarioRow>,
    pub total_time: Decimal,
    pub total_cost: Decimal,
    pub replication_count: u32,
    /// Present for simulation runs; analytic totals have no configuration.
    pub config: Option<SimConfig>,
    pub warnings: Vec<String>,
}

impl ScenarioResult {
    pub(crate) fn from_label_totals(
        scenario: String,
        totals: BTreeMap<String, (Decimal, Decimal)>,
        replication_count: u32,
        config: Option<SimConfig>,
        warnings: Vec<String>,
    ) -> ScenarioResult {
        let mut rows: Vec<ScenarioRow> = totals
            .into_iter()
            .map(|(label, (daily_time, daily_cost))| ScenarioRow {
                label,
                daily_time,
                daily_cost,
            })
            .collect();
        rows.sort_by(|a, b| {
            (a.label.to_lowercase(), &a.label).cmp(&(b.label.to_lowercase(), &b.label))
        });
        let total_time = rows.iter().map(|r| r.daily_time).sum();
        let total_cost = rows.iter().map(|r| r.daily_cost).sum();
        ScenarioResult {
            scenario,
            rows,
            total_time,
            total_cost,
            replication_count,
            config,
            warnings,
        }
    }

    pub fn row(&self, label: &str) -> Option<&ScenarioRow> {
        self.rows.iter().find(|r| r.label == label)
    }
}

/// Sums `duration × daily_frequency` and `cost × daily_frequency` per label
/// over all metrics records. Errors when the model carries no metrics.
pub fn analytic_totals(model: &ValidatedModel) -> Result<ScenarioResult, SimError> {
    if model.metrics.is_empty() {
        return Err(SimError::NoMetrics);
    }
    let mut totals: BTreeMap<String, (Decimal, Decimal)> = BTreeMap::new();
    for metrics in model.metrics.values() {
        let entry = totals
            .entry(metrics.label.clone())
            .or_insert((Decimal::ZERO, Decimal::ZERO));
        entry.0 += metrics.duration * metrics.daily_frequency;
        entry.1 += metrics.cost * metrics.daily_frequency;
    }
    Ok(ScenarioResult::from_label_totals(
        model.name.clone(),
        totals,
        1,
        None,
        Vec::new(),
    ))
}
