//! Python bindings: the validated model as a `Model` class plus the
//! pattern-automaton helpers. Structured results cross the boundary as
//! JSON strings (numeric values are exact decimal strings), simple results
//! as native Python types.

use std::collections::BTreeSet;
use std::str::FromStr;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use ontobpr::decimal::Decimal;
use ontobpr::dsl;
use ontobpr::graph::{self, SelectionPolicy, WeightConfig};
use ontobpr::ontology::{self, ModelExt, StepKind, TransactionId, ValidatedModel};
use ontobpr::report;
use ontobpr::sim;

fn value_error(error: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(error.to_string())
}

fn to_json(value: serde_json::Value) -> PyResult<String> {
    serde_json::to_string_pretty(&value).map_err(value_error)
}

fn build_config(
    months: u32,
    workdays_per_week: u32,
    hours_per_day: u32,
    replications: u32,
    arrival: &str,
    seed: u64,
) -> PyResult<sim::SimConfig> {
    let config = sim::SimConfig {
        months,
        workdays_per_week,
        hours_per_day,
        replications,
        arrival_model: sim::ArrivalModel::from_str(arrival).map_err(value_error)?,
        seed,
        ..Default::default()
    };
    config.validate().map_err(value_error)?;
    Ok(config)
}

/// A parsed and validated enterprise model.
#[pyclass]
struct Model {
    inner: ValidatedModel,
}

impl Model {
    fn scenario(
        &self,
        mode: &str,
        months: u32,
        workdays_per_week: u32,
        hours_per_day: u32,
        replications: u32,
        seed: u64,
    ) -> PyResult<sim::ScenarioResult> {
        match mode {
            "analytic" => sim::analytic_totals(&self.inner).map_err(value_error),
            "deterministic" | "poisson" => {
                let config = build_config(
                    months,
                    workdays_per_week,
                    hours_per_day,
                    replications,
                    mode,
                    seed,
                )?;
                sim::simulate(&self.inner, &config).map_err(value_error)
            }
            other => Err(value_error(format!(
                "unknown mode {other:?} (expected analytic, deterministic or poisson)"
            ))),
        }
    }
}

#[pymethods]
impl Model {
    /// Parse model text; raises ValueError listing diagnostics or
    /// validation errors.
    #[staticmethod]
    #[pyo3(signature = (text, name = "<python>"))]
    fn from_text(text: &str, name: &str) -> PyResult<Model> {
        let model = dsl::parse(text, name).map_err(|diags| {
            let lines: Vec<String> = diags.iter().map(|d| d.to_string()).collect();
            value_error(lines.join("\n"))
        })?;
        let inner = model
            .validated()
            .map_err(|report| value_error(report.to_string()))?;
        Ok(Model { inner })
    }

    /// Load and validate a `.demo` file.
    #[staticmethod]
    fn from_file(path: &str) -> PyResult<Model> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| value_error(format!("cannot read {path}: {e}")))?;
        Model::from_text(&text, path)
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    fn __repr__(&self) -> String {
        format!(
            "Model(name={:?}, actors={}, transactions={}, banks={}, metrics={})",
            self.inner.name,
            self.inner.actors.len(),
            self.inner.transactions.len(),
            self.inner.banks.len(),
            self.inner.metrics.len(),
        )
    }

    /// Validation warnings (the model is error-free by construction).
    fn warnings(&self) -> Vec<String> {
        self.inner
            .warnings()
            .iter()
            .map(|w| format!("{} at {}: {}", w.code, w.location, w.message))
            .collect()
    }

    /// Canonical model text.
    fn serialize(&self) -> String {
        dsl::serialize(&self.inner)
    }

    /// Transaction result table as (id, name, result, statement) tuples.
    fn trt(&self) -> Vec<(String, String, String, String)> {
        ontology::transaction_result_table(&self.inner)
            .into_iter()
            .map(|r| {
                (
                    r.transaction.to_string(),
                    r.name,
                    r.result.to_string(),
                    r.statement,
                )
            })
            .collect()
    }

    /// Boundary split as JSON.
    fn boundary_json(&self) -> PyResult<String> {
        to_json(report::boundary_to_value(&ontology::boundary(&self.inner)))
    }

    /// Per-actor (executes, initiates) counts.
    fn actor_load(&self) -> Vec<(String, usize, usize)> {
        graph::actor_load(&self.inner)
            .into_iter()
            .map(|r| (r.actor.to_string(), r.executes, r.initiates))
            .collect()
    }

    /// DOT text of the actor-transaction diagram or the full construction
    /// diagram (`kind` = "atd" or "ocd").
    #[pyo3(signature = (kind = "ocd"))]
    fn graph_dot(&self, kind: &str) -> PyResult<String> {
        let graph = match kind {
            "atd" => graph::build_atd(&self.inner),
            "ocd" => graph::build_ocd(&self.inner),
            other => return Err(value_error(format!("unknown graph kind {other:?}"))),
        };
        report::render_graph(&graph, report::OutputFormat::Dot).map_err(value_error)
    }

    /// Node/edge list of a graph as JSON.
    #[pyo3(signature = (kind = "ocd"))]
    fn graph_json(&self, kind: &str) -> PyResult<String> {
        let graph = match kind {
            "atd" => graph::build_atd(&self.inner),
            "ocd" => graph::build_ocd(&self.inner),
            other => return Err(value_error(format!("unknown graph kind {other:?}"))),
        };
        to_json(report::graph_to_value(&graph))
    }

    /// Connection weight between two transactions under unit weights.
    fn connection_weight(&self, a: &str, b: &str) -> PyResult<f64> {
        graph::connection_weight(
            &self.inner,
            &TransactionId::new(a),
            &TransactionId::new(b),
            &WeightConfig::default(),
        )
        .map(|w| w.to_f64())
        .map_err(value_error)
    }

    /// Expand a reengineering seed set; returns the selection as JSON.
    #[pyo3(signature = (seed, policy = "argmax", k = None, theta = None, internal_only = false))]
    fn expand_selection_json(
        &self,
        seed: Vec<String>,
        policy: &str,
        k: Option<usize>,
        theta: Option<f64>,
        internal_only: bool,
    ) -> PyResult<String> {
        let seed_set: BTreeSet<TransactionId> =
            seed.iter().map(|s| TransactionId::new(s)).collect();
        let policy = match policy {
            "argmax" => SelectionPolicy::Argmax,
            "top_k" => SelectionPolicy::TopK(
                k.ok_or_else(|| value_error("k is required for the top_k policy"))?,
            ),
            "threshold" => {
                let theta = theta
                    .ok_or_else(|| value_error("theta is required for the threshold policy"))?;
                SelectionPolicy::Threshold(
                    Decimal::from_str(&theta.to_string()).map_err(value_error)?,
                )
            }
            other => return Err(value_error(format!("unknown policy {other:?}"))),
        };
        let result = graph::expand_selection(
            &self.inner,
            &seed_set,
            &policy,
            &WeightConfig::default(),
            internal_only,
        )
        .map_err(value_error)?;
        to_json(report::selection_to_value(&result))
    }

    /// Daily per-label time/cost as JSON. Modes: analytic (default),
    /// deterministic, poisson.
    #[pyo3(signature = (
        mode = "analytic", months = 6, workdays_per_week = 6, hours_per_day = 8,
        replications = 3, seed = 0
    ))]
    fn totals_json(
        &self,
        mode: &str,
        months: u32,
        workdays_per_week: u32,
        hours_per_day: u32,
        replications: u32,
        seed: u64,
    ) -> PyResult<String> {
        let result = self.scenario(
            mode,
            months,
            workdays_per_week,
            hours_per_day,
            replications,
            seed,
        )?;
        to_json(report::scenario_to_value(&result))
    }

    /// Entity-level difference to another model as JSON.
    fn diff_json(&self, other: &Model) -> PyResult<String> {
        to_json(report::diff_to_value(&dsl::model_diff(
            &self.inner,
            &other.inner,
        )))
    }
}

/// Compare a current-state and a redesigned-state model; returns the
/// comparison (rows, sums, reduction percentages) as JSON.
#[pyfunction]
#[pyo3(signature = (
    asis, tobe, mode = "analytic", months = 6, workdays_per_week = 6,
    hours_per_day = 8, replications = 3, seed = 0
))]
#[allow(clippy::too_many_arguments)]
fn compare_json(
    asis: &Model,
    tobe: &Model,
    mode: &str,
    months: u32,
    workdays_per_week: u32,
    hours_per_day: u32,
    replications: u32,
    seed: u64,
) -> PyResult<String> {
    let asis_result = asis.scenario(
        mode,
        months,
        workdays_per_week,
        hours_per_day,
        replications,
        seed,
    )?;
    let tobe_result = tobe.scenario(
        mode,
        months,
        workdays_per_week,
        hours_per_day,
        replications,
        seed,
    )?;
    let report = sim::compare(&asis_result, &tobe_result).map_err(value_error)?;
    to_json(report::comparison_to_value(&report))
}

/// One transition of the transaction pattern; raises ValueError on an
/// invalid (state, step) pair.
#[pyfunction]
fn pattern_next(state: &str, step: &str) -> PyResult<String> {
    let state = match state {
        "Initial" => sim::TransactionState::Initial,
        "Requested" => sim::TransactionState::Requested,
        "Promised" => sim::TransactionState::Promised,
        "Declined" => sim::TransactionState::Declined,
        "Quit" => sim::TransactionState::Quit,
        "Executed" => sim::TransactionState::Executed,
        "Stated" => sim::TransactionState::Stated,
        "Accepted" => sim::TransactionState::Accepted,
        "Rejected" => sim::TransactionState::Rejected,
        "Stopped" => sim::TransactionState::Stopped,
        other => return Err(value_error(format!("unknown state {other:?}"))),
    };
    let step =
        StepKind::from_str(step).map_err(|()| value_error(format!("unknown step {step:?}")))?;
    sim::pattern_next(state, step)
        .map(|next| next.to_string())
        .map_err(value_error)
}

/// True when the step sequence walks the transaction pattern without an
/// invalid transition.
#[pyfunction]
fn trace_valid(steps: Vec<String>) -> PyResult<bool> {
    let mut parsed = Vec::with_capacity(steps.len());
    for step in &steps {
        parsed.push(
            StepKind::from_str(step).map_err(|()| value_error(format!("unknown step {step:?}")))?,
        );
    }
    Ok(sim::trace_valid(&parsed))
}

#[pymodule]
fn ontobpr_python(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<Model>()?;
    m.add_function(wrap_pyfunction!(compare_json, m)?)?;
    m.add_function(wrap_pyfunction!(pattern_next, m)?)?;
    m.add_function(wrap_pyfunction!(trace_valid, m)?)?;
    Ok(())
}
