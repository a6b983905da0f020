//! Output rendering: tables, CSV, Markdown, JSON values and DOT graphs.
//!
//! Rendering is byte-deterministic for a fixed input: every collection is
//! ordered before it gets here, numbers print with at most three decimals
//! (trailing zeros trimmed, never scientific notation), and JSON objects
//! keep a stable key order.

use std::fmt::Write as _;
use std::str::FromStr;

use serde_json::{json, Value};
use thiserror::Error;

use crate::decimal::Decimal;
use crate::dsl::DiffReport;
use crate::graph::{ActorLoadRow, EdgeRel, NodeRef, OntologyGraph, SelectionResult};
use crate::ontology::{Boundary, Severity, TrtRow, ValidationReport};
use crate::sim::{ComparisonReport, ScenarioResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Table,
    Csv,
    Json,
    Markdown,
    Dot,
}

impl OutputFormat {
    pub fn as_str(&self) -> &'static str {
        match self {
            OutputFormat::Table => "table",
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
            OutputFormat::Markdown => "markdown",
            OutputFormat::Dot => "dot",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "table" => Ok(OutputFormat::Table),
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            "markdown" | "md" => Ok(OutputFormat::Markdown),
            "dot" => Ok(OutputFormat::Dot),
            other => Err(format!(
                "unknown format {other:?} (expected table, csv, json, markdown or dot)"
            )),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("format {format} is not supported for {what}")]
pub struct UnsupportedFormat {
    pub what: &'static str,
    pub format: &'static str,
}

fn unsupported(what: &'static str, format: OutputFormat) -> UnsupportedFormat {
    UnsupportedFormat {
        what,
        format: format.as_str(),
    }
}

/// Number cell: up to three decimals, trimmed.
fn num(value: &Decimal) -> String {
    value.display(3)
}

fn opt_num(value: &Option<Decimal>) -> String {
    value.as_ref().map(num).unwrap_or_default()
}

// ---------------------------------------------------------------------------
// Generic tabular rendering
// ---------------------------------------------------------------------------

fn csv_escape(cell: &str) -> String {
    if cell.contains(',') || cell.contains('"') || cell.contains('\n') {
        format!("\"{}\"", cell.replace('"', "\"\""))
    } else {
        cell.to_string()
    }
}

fn render_csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    writeln!(out, "{}", header.join(",")).unwrap();
    for row in rows {
        let cells: Vec<String> = row.iter().map(|c| csv_escape(c)).collect();
        writeln!(out, "{}", cells.join(",")).unwrap();
    }
    out
}

fn render_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let fmt_row = |cells: &[String], widths: &[usize]| -> String {
        cells
            .iter()
            .enumerate()
            .map(|(i, c)| format!("{:<width$}", c, width = widths[i]))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    let header_cells: Vec<String> = header.iter().map(|h| h.to_string()).collect();
    writeln!(out, "{}", fmt_row(&header_cells, &widths)).unwrap();
    writeln!(
        out,
        "{}",
        "-".repeat(widths.iter().sum::<usize>() + 2 * widths.len().saturating_sub(1))
    )
    .unwrap();
    for row in rows {
        writeln!(out, "{}", fmt_row(row, &widths)).unwrap();
    }
    out
}

fn render_markdown(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    writeln!(out, "| {} |", header.join(" | ")).unwrap();
    writeln!(
        out,
        "|{}|",
        header.iter().map(|_| " --- ").collect::<Vec<_>>().join("|")
    )
    .unwrap();
    for row in rows {
        let cells: Vec<String> = row.iter().map(|c| c.replace('|', "\\|")).collect();
        writeln!(out, "| {} |", cells.join(" | ")).unwrap();
    }
    out
}

fn render_tabular(
    what: &'static str,
    format: OutputFormat,
    header: &[&str],
    rows: &[Vec<String>],
) -> Result<String, UnsupportedFormat> {
    match format {
        OutputFormat::Table => Ok(render_table(header, rows)),
        OutputFormat::Csv => Ok(render_csv(header, rows)),
        OutputFormat::Markdown => Ok(render_markdown(header, rows)),
        OutputFormat::Json | OutputFormat::Dot => Err(unsupported(what, format)),
    }
}

// ---------------------------------------------------------------------------
// Per-artifact renderers
// ---------------------------------------------------------------------------

pub fn validation_to_value(report: &ValidationReport) -> Value {
    json!({
        "errors": report.error_count(),
        "warnings": report.warning_count(),
        "issues": report.issues,
    })
}

pub fn render_validation(
    report: &ValidationReport,
    format: OutputFormat,
) -> Result<String, UnsupportedFormat> {
    let rows: Vec<Vec<String>> = report
        .issues
        .iter()
        .map(|i| {
            vec![
                match i.severity {
                    Severity::Error => "error".to_string(),
                    Severity::Warning => "warning".to_string(),
                },
                i.code.to_string(),
                i.location.clone(),
                i.message.clone(),
            ]
        })
        .collect();
    let header = ["severity", "code", "location", "message"];
    let mut text = render_tabular("validation report", format, &header, &rows)?;
    if format == OutputFormat::Table {
        writeln!(
            text,
            "{} errors, {} warnings",
            report.error_count(),
            report.warning_count()
        )
        .unwrap();
    }
    Ok(text)
}

pub fn trt_to_value(rows: &[TrtRow]) -> Value {
    json!(rows)
}

pub fn render_trt(rows: &[TrtRow], format: OutputFormat) -> Result<String, UnsupportedFormat> {
    let header = ["transaction", "name", "result", "statement"];
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.transaction.to_string(),
                r.name.clone(),
                r.result.to_string(),
                r.statement.clone(),
            ]
        })
        .collect();
    render_tabular("transaction result table", format, &header, &cells)
}

pub fn boundary_to_value(boundary: &Boundary) -> Value {
    json!(boundary)
}

pub fn render_boundary(
    boundary: &Boundary,
    format: OutputFormat,
) -> Result<String, UnsupportedFormat> {
    let rows = vec![
        vec![
            "internal actors".to_string(),
            boundary
                .internal_actors
                .iter()
                .map(|a| a.to_string())
                .collect::<Vec<_>>()
                .join(" "),
        ],
        vec![
            "environmental actors".to_string(),
            boundary
                .environmental_actors
                .iter()
                .map(|a| a.to_string())
                .collect::<Vec<_>>()
                .join(" "),
        ],
        vec![
            "boundary transactions".to_string(),
            boundary
                .boundary_transactions
                .iter()
                .map(|t| t.to_string())
                .collect::<Vec<_>>()
                .join(" "),
        ],
    ];
    render_tabular("boundary", format, &["side", "members"], &rows)
}

pub fn load_to_value(rows: &[ActorLoadRow]) -> Value {
    json!(rows)
}

pub fn render_load(
    rows: &[ActorLoadRow],
    format: OutputFormat,
) -> Result<String, UnsupportedFormat> {
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.actor.to_string(),
                r.executes.to_string(),
                r.initiates.to_string(),
            ]
        })
        .collect();
    render_tabular(
        "actor load",
        format,
        &["actor", "executes", "initiates"],
        &cells,
    )
}

pub fn selection_to_value(result: &SelectionResult) -> Value {
    json!(result)
}

pub fn render_selection(
    result: &SelectionResult,
    format: OutputFormat,
) -> Result<String, UnsupportedFormat> {
    let rows: Vec<Vec<String>> = result
        .weight_table
        .iter()
        .map(|row| {
            vec![
                row.candidate.to_string(),
                num(&row.weight),
                row.shared_actors.to_string(),
                row.psd_links.to_string(),
                row.shared_banks.to_string(),
                if result.added.contains(&row.candidate) {
                    "added".to_string()
                } else {
                    String::new()
                },
            ]
        })
        .collect();
    let header = [
        "candidate",
        "weight",
        "actors",
        "links",
        "banks",
        "selected",
    ];
    let mut text = render_tabular("selection", format, &header, &rows)?;
    if format == OutputFormat::Table {
        writeln!(
            text,
            "seed: {}",
            result
                .seed
                .iter()
                .map(|t| t.to_string())
                .collect::<Vec<_>>()
                .join(",")
        )
        .unwrap();
        writeln!(
            text,
            "added: {}",
            result
                .added
                .iter()
                .map(|t| t.to_string())
                .collect::<Vec<_>>()
                .join(",")
        )
        .unwrap();
    }
    Ok(text)
}

pub fn scenario_to_value(result: &ScenarioResult) -> Value {
    json!(result)
}

pub fn render_scenario(
    result: &ScenarioResult,
    format: OutputFormat,
) -> Result<String, UnsupportedFormat> {
    let mut rows: Vec<Vec<String>> = result
        .rows
        .iter()
        .map(|r| vec![r.label.clone(), num(&r.daily_cost), num(&r.daily_time)])
        .collect();
    rows.push(vec![
        "Sum".to_string(),
        num(&result.total_cost),
        num(&result.total_time),
    ]);
    let header = ["Function", "Daily Cost", "Daily Time"];
    render_tabular("scenario result", format, &header, &rows)
}

pub fn comparison_to_value(report: &ComparisonReport) -> Value {
    json!({
        "rows": report.rows,
        "sum": {
            "asis_cost": report.asis_total_cost,
            "asis_time": report.asis_total_time,
            "tobe_cost": report.tobe_total_cost,
            "tobe_time": report.tobe_total_time,
        },
        "cost_reduction_pct": report.cost_reduction_display(),
        "time_reduction_pct": report.time_reduction_display(),
    })
}

/// Comparison table in the measured-functions layout: one row per label,
/// a final `Sum` row, and a reduction footer line.
pub fn render_comparison(
    report: &ComparisonReport,
    format: OutputFormat,
) -> Result<String, UnsupportedFormat> {
    let mut rows: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| {
            vec![
                r.label.clone(),
                opt_num(&r.asis_cost),
                opt_num(&r.asis_time),
                opt_num(&r.tobe_cost),
                opt_num(&r.tobe_time),
            ]
        })
        .collect();
    rows.push(vec![
        "Sum".to_string(),
        num(&report.asis_total_cost),
        num(&report.asis_total_time),
        num(&report.tobe_total_cost),
        num(&report.tobe_total_time),
    ]);
    let header = [
        "Function",
        "AS-IS Cost",
        "AS-IS Time",
        "To-Be Cost",
        "To-Be Time",
    ];
    let mut text = render_tabular("comparison", format, &header, &rows)?;
    writeln!(
        text,
        "cost_reduction_pct={} time_reduction_pct={}",
        report.cost_reduction_display(),
        report.time_reduction_display()
    )
    .unwrap();
    Ok(text)
}

pub fn diff_to_value(report: &DiffReport) -> Value {
    json!(report)
}

pub fn render_diff(report: &DiffReport, format: OutputFormat) -> Result<String, UnsupportedFormat> {
    let mut rows: Vec<Vec<String>> = Vec::new();
    for entity in &report.removed {
        rows.push(vec!["removed".into(), entity.to_string(), String::new()]);
    }
    for entity in &report.added {
        rows.push(vec!["added".into(), entity.to_string(), String::new()]);
    }
    for change in &report.changed {
        for field in &change.fields {
            rows.push(vec![
                "changed".into(),
                change.entity.to_string(),
                format!("{}: {} -> {}", field.field, field.old, field.new),
            ]);
        }
    }
    for delta in &report.metric_deltas {
        let mut parts = Vec::new();
        for (name, old, new) in [
            ("time", &delta.old.duration, &delta.new.duration),
            ("cost", &delta.old.cost, &delta.new.cost),
            (
                "freq",
                &delta.old.daily_frequency,
                &delta.new.daily_frequency,
            ),
        ] {
            if old != new {
                parts.push(format!("{name}: {} -> {}", num(old), num(new)));
            }
        }
        if delta.old.label != delta.new.label {
            parts.push(format!("label: {} -> {}", delta.old.label, delta.new.label));
        }
        rows.push(vec![
            "metrics".into(),
            format!("metrics {}", delta.step),
            parts.join(", "),
        ]);
    }
    render_tabular("diff", format, &["kind", "entity", "detail"], &rows)
}

// ---------------------------------------------------------------------------
// Graph rendering
// ---------------------------------------------------------------------------

fn dot_escape(text: &str) -> String {
    text.replace('\\', "\\\\").replace('"', "\\\"")
}

pub fn graph_to_value(graph: &OntologyGraph) -> Value {
    let nodes: Vec<Value> = graph
        .nodes
        .iter()
        .map(|(node, info)| {
            let mut obj = serde_json::Map::new();
            let (kind, id) = match node {
                NodeRef::Actor(id) => ("actor", id.to_string()),
                NodeRef::Transaction(id) => ("transaction", id.to_string()),
                NodeRef::Bank(id) => ("bank", id.to_string()),
            };
            obj.insert("kind".into(), json!(kind));
            obj.insert("id".into(), json!(id));
            obj.insert("name".into(), json!(info.name));
            if !info.contents.is_empty() {
                obj.insert("contents".into(), json!(info.contents));
            }
            Value::Object(obj)
        })
        .collect();
    let edges: Vec<Value> = graph.edges.iter().map(|e| json!(e)).collect();
    json!({ "nodes": nodes, "edges": edges })
}

/// DOT form: actors as boxes, transactions as circles, banks as dashed
/// (open) boxes; node order is deterministic.
pub fn render_graph(
    graph: &OntologyGraph,
    format: OutputFormat,
) -> Result<String, UnsupportedFormat> {
    match format {
        OutputFormat::Dot => {}
        OutputFormat::Json => {
            return Ok(serde_json::to_string_pretty(&graph_to_value(graph)).expect("valid json"))
        }
        other => return Err(unsupported("graph", other)),
    }
    let mut out = String::new();
    writeln!(out, "digraph ontology {{").unwrap();
    writeln!(out, "  rankdir=LR;").unwrap();
    for (node, info) in &graph.nodes {
        let (id, shape, style) = match node {
            NodeRef::Actor(id) => (id.to_string(), "box", ""),
            NodeRef::Transaction(id) => (id.to_string(), "circle", ""),
            NodeRef::Bank(id) => (id.to_string(), "box", ", style=dashed"),
        };
        writeln!(
            out,
            "  \"{}\" [shape={shape}{style}, label=\"{}\\n{}\"];",
            dot_escape(&node.to_string()),
            dot_escape(&id),
            dot_escape(&info.name)
        )
        .unwrap();
    }
    for edge in &graph.edges {
        let label = match &edge.rel {
            EdgeRel::Initiates => "initiates".to_string(),
            EdgeRel::Executes => "executes".to_string(),
            EdgeRel::Access => "access".to_string(),
            EdgeRel::Psd {
                link,
                from_step,
                to_step,
            } => format!("{link} {from_step}->{to_step}"),
        };
        let style = match &edge.rel {
            EdgeRel::Psd { .. } => ", style=dotted",
            EdgeRel::Access => ", style=dashed",
            _ => "",
        };
        writeln!(
            out,
            "  \"{}\" -> \"{}\" [label=\"{}\"{style}];",
            dot_escape(&edge.from.to_string()),
            dot_escape(&edge.to.to_string()),
            dot_escape(&label)
        )
        .unwrap();
    }
    writeln!(out, "}}").unwrap();
    Ok(out)
}

// ---------------------------------------------------------------------------
// JSON envelope
// ---------------------------------------------------------------------------

/// Every JSON output shares this envelope.
pub fn envelope(subcommand: &str, data: Value) -> String {
    let wrapped = json!({
        "tool_version": env!("CARGO_PKG_VERSION"),
        "subcommand": subcommand,
        "data": data,
    });
    let mut text = serde_json::to_string_pretty(&wrapped).expect("valid json");
    text.push('\n');
    text
}
