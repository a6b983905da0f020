//! Structural validation of enterprise models.
//!
//! Problems are reported, never thrown: referential breakage and rule
//! violations are errors, modelling smells (metric-less transactions,
//! unused facts) are warnings. The report is deterministic — issues are
//! sorted by location, then code, then message.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::Deref;

use serde::Serialize;

use super::model::{EnterpriseModel, FactId, StepKind, StepRef, TransactionId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

/// One validation finding.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationIssue {
    pub code: &'static str,
    pub severity: Severity,
    pub message: String,
    /// Entity the issue is anchored to, e.g. `transaction B-T05`.
    pub location: String,
}

/// Outcome of [`validate_model`]; empty error list means the model is sound.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub issues: Vec<ValidationIssue>,
}

impl ValidationReport {
    pub fn errors(&self) -> impl Iterator<Item = &ValidationIssue> {
        self.issues.iter().filter(|i| i.severity == Severity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &ValidationIssue> {
        self.issues
            .iter()
            .filter(|i| i.severity == Severity::Warning)
    }

    pub fn error_count(&self) -> usize {
        self.errors().count()
    }

    pub fn warning_count(&self) -> usize {
        self.warnings().count()
    }

    pub fn is_sound(&self) -> bool {
        self.error_count() == 0
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for issue in &self.issues {
            writeln!(
                f,
                "{}: {} at {}: {}",
                match issue.severity {
                    Severity::Error => "error",
                    Severity::Warning => "warning",
                },
                issue.code,
                issue.location,
                issue.message
            )?;
        }
        write!(
            f,
            "{} errors, {} warnings",
            self.error_count(),
            self.warning_count()
        )
    }
}

/// A model that passed validation with zero errors. Operations whose
/// contract requires a sound model take this type, so an unvalidated
/// handle cannot reach them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidatedModel {
    model: EnterpriseModel,
    warnings: Vec<ValidationIssue>,
}

impl ValidatedModel {
    pub fn warnings(&self) -> &[ValidationIssue] {
        &self.warnings
    }

    pub fn model(&self) -> &EnterpriseModel {
        &self.model
    }

    pub fn into_model(self) -> EnterpriseModel {
        self.model
    }
}

impl Deref for ValidatedModel {
    type Target = EnterpriseModel;

    fn deref(&self) -> &EnterpriseModel {
        &self.model
    }
}

/// Validation entry points for [`EnterpriseModel`].
pub trait ModelExt: Sized {
    /// Consumes the model; `Err` carries the full report when any error is
    /// present.
    fn validated(self) -> Result<ValidatedModel, ValidationReport>;
}

impl ModelExt for EnterpriseModel {
    fn validated(self) -> Result<ValidatedModel, ValidationReport> {
        let report = validate_model(&self);
        if report.is_sound() {
            let warnings = report.issues;
            Ok(ValidatedModel {
                model: self,
                warnings,
            })
        } else {
            Err(report)
        }
    }
}

/// Identifier charset admitted by the model text format. Anything else
/// could not be written back to a `.demo` file.
pub(crate) fn is_well_formed_id(id: &str) -> bool {
    !id.is_empty()
        && id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.' | ':'))
}

struct Collector {
    issues: Vec<ValidationIssue>,
}

impl Collector {
    fn error(&mut self, code: &'static str, location: String, message: String) {
        self.issues.push(ValidationIssue {
            code,
            severity: Severity::Error,
            message,
            location,
        });
    }

    fn warning(&mut self, code: &'static str, location: String, message: String) {
        self.issues.push(ValidationIssue {
            code,
            severity: Severity::Warning,
            message,
            location,
        });
    }
}

/// Checks every structural rule of the model and reports all findings.
/// Pure and idempotent: the same model always yields the identical report.
pub fn validate_model(model: &EnterpriseModel) -> ValidationReport {
    let mut c = Collector { issues: Vec::new() };

    check_actors(model, &mut c);
    check_facts(model, &mut c);
    check_transactions(model, &mut c);
    check_banks(model, &mut c);
    check_info_links(model, &mut c);
    check_psd_links(model, &mut c);
    check_iut(model, &mut c);
    check_metrics(model, &mut c);
    check_unused_facts(model, &mut c);

    let mut issues = c.issues;
    issues
        .sort_by(|a, b| (&a.location, a.code, &a.message).cmp(&(&b.location, b.code, &b.message)));
    ValidationReport { issues }
}

fn check_id(raw: &str, loc: &str, c: &mut Collector) {
    if raw.is_empty() {
        c.error("EMPTY_ID", loc.to_string(), "identifier is empty".into());
    } else if !is_well_formed_id(raw) {
        c.error(
            "INVALID_ID",
            loc.to_string(),
            format!("identifier {raw:?} contains characters outside [A-Za-z0-9-_.:]"),
        );
    }
}

fn check_actors(model: &EnterpriseModel, c: &mut Collector) {
    for (id, actor) in &model.actors {
        let loc = format!("actor {id}");
        check_id(id.as_str(), &loc, c);
        if actor.name.trim().is_empty() {
            c.error("EMPTY_NAME", loc, format!("actor {id} has an empty name"));
        }
    }
}

fn check_facts(model: &EnterpriseModel, c: &mut Collector) {
    for (id, fact) in &model.facts {
        let loc = format!("fact {id}");
        check_id(id.as_str(), &loc, c);
        if fact.statement.trim().is_empty() {
            c.error(
                "EMPTY_NAME",
                loc,
                format!("fact {id} has an empty statement"),
            );
        }
    }
}

fn check_transactions(model: &EnterpriseModel, c: &mut Collector) {
    let mut by_result: BTreeMap<&FactId, Vec<&TransactionId>> = BTreeMap::new();
    for (id, tx) in &model.transactions {
        let loc = format!("transaction {id}");
        check_id(id.as_str(), &loc, c);
        if tx.name.trim().is_empty() {
            c.error(
                "EMPTY_NAME",
                loc.clone(),
                format!("transaction {id} has an empty name"),
            );
        }
        if !model.facts.contains_key(&tx.result) {
            c.error(
                "DANGLING_RESULT",
                loc.clone(),
                format!("result fact {} is not declared", tx.result),
            );
        }
        by_result.entry(&tx.result).or_default().push(id);
        if !model.actors.contains_key(&tx.executor) {
            c.error(
                "DANGLING_EXECUTOR",
                loc.clone(),
                format!("executor {} is not declared", tx.executor),
            );
        }
        if tx.initiators.is_empty() {
            c.error(
                "NO_INITIATORS",
                loc.clone(),
                format!("transaction {id} has no initiators"),
            );
        }
        for initiator in &tx.initiators {
            if !model.actors.contains_key(initiator) {
                c.error(
                    "DANGLING_INITIATOR",
                    loc.clone(),
                    format!("initiator {initiator} is not declared"),
                );
            }
        }
        if tx.initiators.contains(&tx.executor) {
            c.error(
                "SELF_INITIATION",
                loc,
                format!(
                    "executor {} also initiates its own transaction",
                    tx.executor
                ),
            );
        }
    }
    for (result, holders) in by_result {
        if holders.len() > 1 {
            let list = holders
                .iter()
                .map(|t| t.to_string())
                .collect::<Vec<_>>()
                .join(", ");
            c.error(
                "DUPLICATE_RESULT",
                format!("fact {result}"),
                format!("result fact {result} is claimed by transactions {list}"),
            );
        }
    }
}

fn check_banks(model: &EnterpriseModel, c: &mut Collector) {
    for (id, bank) in &model.banks {
        let loc = format!("bank {id}");
        check_id(id.as_str(), &loc, c);
        for fact in &bank.contents {
            if !model.facts.contains_key(fact) {
                c.error(
                    "DANGLING_BANK_FACT",
                    loc.clone(),
                    format!("bank {id} contains undeclared fact {fact}"),
                );
            }
        }
    }
}

fn check_info_links(model: &EnterpriseModel, c: &mut Collector) {
    for link in &model.info_links {
        let loc = format!("access {} {}", link.actor, link.bank);
        if !model.actors.contains_key(&link.actor) {
            c.error(
                "DANGLING_ACCESS_ACTOR",
                loc.clone(),
                format!("actor {} is not declared", link.actor),
            );
        }
        if !model.banks.contains_key(&link.bank) {
            c.error(
                "DANGLING_ACCESS_BANK",
                loc,
                format!("bank {} is not declared", link.bank),
            );
        }
    }
}

fn check_step(model: &EnterpriseModel, step: &StepRef, loc: &str, c: &mut Collector) {
    if !model.transactions.contains_key(&step.transaction) {
        c.error(
            "DANGLING_STEP",
            loc.to_string(),
            format!("step {step} references undeclared transaction"),
        );
    }
}

fn check_psd_links(model: &EnterpriseModel, c: &mut Collector) {
    for link in &model.psd_links {
        let loc = format!("{} {} -> {}", link.kind, link.from, link.to);
        check_step(model, &link.from, &loc, c);
        check_step(model, &link.to, &loc, c);
        if link.kind == super::model::PsdLinkKind::Causal {
            if link.from.transaction == link.to.transaction {
                c.error(
                    "CAUSAL_SAME_TRANSACTION",
                    loc.clone(),
                    "a causal link may not stay within one transaction".into(),
                );
            }
            if link.to.step != StepKind::Rq {
                c.error(
                    "CAUSAL_TARGET_NOT_RQ",
                    loc,
                    format!(
                        "a transaction is started only by a request; target step is {}",
                        link.to.step
                    ),
                );
            }
        }
    }
}

fn check_iut(model: &EnterpriseModel, c: &mut Collector) {
    for entry in &model.iut_entries {
        let loc = format!("use {} at {}", entry.fact, entry.step);
        if !model.facts.contains_key(&entry.fact) {
            c.error(
                "DANGLING_IUT_FACT",
                loc.clone(),
                format!("fact {} is not declared", entry.fact),
            );
        }
        check_step(model, &entry.step, &loc, c);
    }
}

fn check_metrics(model: &EnterpriseModel, c: &mut Collector) {
    for (step, metrics) in &model.metrics {
        let loc = format!("metrics {step}");
        check_step(model, step, &loc, c);
        for (field, value) in [
            ("time", metrics.duration),
            ("cost", metrics.cost),
            ("freq", metrics.daily_frequency),
        ] {
            if value.is_negative() {
                c.error(
                    "NEGATIVE_METRIC",
                    loc.clone(),
                    format!("{field} is negative ({value})"),
                );
            }
            // A value needing more than 3 fractional digits cannot be
            // written back in the model format, breaking round-trips.
            if !value.fits_places(3) {
                c.error(
                    "METRIC_PRECISION",
                    loc.clone(),
                    format!("{field} ({value}) needs more than 3 fractional digits"),
                );
            }
        }
    }
    for id in model.transactions.keys() {
        let has_metrics = model.metrics.keys().any(|s| &s.transaction == id);
        if !has_metrics {
            c.warning(
                "NO_METRICS",
                format!("transaction {id}"),
                format!("transaction {id} has no step metrics"),
            );
        }
    }
}

fn check_unused_facts(model: &EnterpriseModel, c: &mut Collector) {
    let mut used: BTreeSet<&FactId> = BTreeSet::new();
    used.extend(model.transactions.values().map(|t| &t.result));
    used.extend(model.iut_entries.iter().map(|e| &e.fact));
    used.extend(model.banks.values().flat_map(|b| b.contents.iter()));
    for id in model.facts.keys() {
        if !used.contains(id) {
            c.warning(
                "UNUSED_FACT",
                format!("fact {id}"),
                format!("fact {id} is never a result, never used, and stored in no bank"),
            );
        }
    }
}
