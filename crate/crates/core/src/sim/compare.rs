//! Current-state vs redesigned-state comparison with exact reduction
//! percentages.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::decimal::Decimal;

use super::analytic::ScenarioResult;
use super::SimError;

/// Per-label daily values from both scenarios; labels present on one side
/// only are listed one-sided (their deltas are then undefined).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComparisonRow {
    pub label: String,
    pub asis_cost: Option<Decimal>,
    pub asis_time: Option<Decimal>,
    pub tobe_cost: Option<Decimal>,
    pub tobe_time: Option<Decimal>,
    /// tobe − asis, when both sides exist.
    pub cost_delta: Option<Decimal>,
    pub time_delta: Option<Decimal>,
}

/// The current-vs-redesigned delta. Reductions are stored exactly
/// (`100·(1 − tobe/asis)`); rendering rounds half-up to one decimal.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub rows: Vec<ComparisonRow>,
    pub asis_total_cost: Decimal,
    pub asis_total_time: Decimal,
    pub tobe_total_cost: Decimal,
    pub tobe_total_time: Decimal,
    pub cost_reduction_pct: Decimal,
    pub time_reduction_pct: Decimal,
}

impl ComparisonReport {
    /// Display form of the cost reduction, one decimal, half-up.
    pub fn cost_reduction_display(&self) -> String {
        self.cost_reduction_pct.display(1)
    }

    pub fn time_reduction_display(&self) -> String {
        self.time_reduction_pct.display(1)
    }
}

/// Joins two scenario results by label and derives total reductions.
/// Errors when either result is empty or the current-state sums are not
/// positive (the reduction would be undefined).
pub fn compare(asis: &ScenarioResult, tobe: &ScenarioResult) -> Result<ComparisonReport, SimError> {
    if asis.rows.is_empty() || tobe.rows.is_empty() {
        return Err(SimError::EmptyScenario);
    }
    if !(asis.total_cost > Decimal::ZERO) || !(asis.total_time > Decimal::ZERO) {
        return Err(SimError::UndefinedReduction);
    }

    let mut labels: BTreeMap<(String, String), ComparisonRow> = BTreeMap::new();
    let sort_key = |label: &str| (label.to_lowercase(), label.to_string());
    let empty_row = |label: &str| ComparisonRow {
        label: label.to_string(),
        asis_cost: None,
        asis_time: None,
        tobe_cost: None,
        tobe_time: None,
        cost_delta: None,
        time_delta: None,
    };
    for row in &asis.rows {
        let entry = labels
            .entry(sort_key(&row.label))
            .or_insert_with(|| empty_row(&row.label));
        entry.asis_cost = Some(row.daily_cost);
        entry.asis_time = Some(row.daily_time);
    }
    for row in &tobe.rows {
        let entry = labels
            .entry(sort_key(&row.label))
            .or_insert_with(|| empty_row(&row.label));
        entry.tobe_cost = Some(row.daily_cost);
        entry.tobe_time = Some(row.daily_time);
    }
    for row in labels.values_mut() {
        if let (Some(a), Some(b)) = (row.asis_cost, row.tobe_cost) {
            row.cost_delta = Some(b - a);
        }
        if let (Some(a), Some(b)) = (row.asis_time, row.tobe_time) {
            row.time_delta = Some(b - a);
        }
    }

    let hundred = Decimal::from_int(100);
    Ok(ComparisonReport {
        rows: labels.into_values().collect(),
        asis_total_cost: asis.total_cost,
        asis_total_time: asis.total_time,
        tobe_total_cost: tobe.total_cost,
        tobe_total_time: tobe.total_time,
        cost_reduction_pct: hundred * (Decimal::ONE - tobe.total_cost / asis.total_cost),
        time_reduction_pct: hundred * (Decimal::ONE - tobe.total_time / asis.total_time),
    })
}
