//! Transaction-pattern execution and scenario simulation: analytic totals,
//! discrete-event runs over a simulated calendar, and current-vs-redesigned
//! comparison.

mod analytic;
mod compare;
mod config;
mod engine;
mod pattern;

use thiserror::Error;

pub use analytic::{analytic_totals, ScenarioResult, ScenarioRow};
pub use compare::{compare, ComparisonReport, ComparisonRow};
pub use config::{ArrivalModel, SimConfig};
pub use engine::{simulate, simulate_traced, SimTrace};
pub use pattern::{pattern_next, trace_valid, InvalidTransition, TransactionState, HAPPY_PATH};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("model has no step metrics; nothing to simulate")]
    NoMetrics,
    #[error("causal links form a cycle: {0}")]
    CausalCycle(String),
    #[error("process links are contradictory: {0}")]
    PsdCycle(String),
    #[error("invalid simulation configuration: {0}")]
    InvalidConfig(String),
    #[error("scenario result is empty")]
    EmptyScenario,
    #[error("current-state totals are zero; reduction percentages are undefined")]
    UndefinedReduction,
}
