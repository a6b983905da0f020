//! Structural comparison of two models (the redesign delta).

use std::fmt;

use serde::Serialize;

use crate::ontology::{ActorId, PsdLinkKind};
use crate::ontology::{
    BankId, EnterpriseModel, FactId, InfoLink, IutEntry, PsdLink, StepMetrics, StepRef,
    TransactionId,
};

/// Reference to one model entity, used in added/removed/changed lists.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum EntityRef {
    Model,
    Actor(ActorId),
    Fact(FactId),
    Transaction(TransactionId),
    Bank(BankId),
    Access(InfoLink),
    Link(PsdLink),
    Use(IutEntry),
    Metrics(StepRef),
}

impl fmt::Display for EntityRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EntityRef::Model => write!(f, "model"),
            EntityRef::Actor(id) => write!(f, "actor {id}"),
            EntityRef::Fact(id) => write!(f, "fact {id}"),
            EntityRef::Transaction(id) => write!(f, "transaction {id}"),
            EntityRef::Bank(id) => write!(f, "bank {id}"),
            EntityRef::Access(l) => write!(f, "access {} {}", l.actor, l.bank),
            EntityRef::Link(l) => {
                let kw = match l.kind {
                    PsdLinkKind::Causal => "trigger",
                    PsdLinkKind::Wait => "wait",
                };
                write!(f, "{kw} {} -> {}", l.from, l.to)
            }
            EntityRef::Use(e) => write!(f, "use {} at {}", e.fact, e.step),
            EntityRef::Metrics(s) => write!(f, "metrics {s}"),
        }
    }
}

impl Serialize for EntityRef {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// One changed field of an entity present in both models.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FieldChange {
    pub field: &'static str,
    pub old: String,
    pub new: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EntityChange {
    pub entity: EntityRef,
    pub fields: Vec<FieldChange>,
}

/// Metric values that differ for a step present in both models.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MetricDelta {
    pub step: StepRef,
    pub old: StepMetrics,
    pub new: StepMetrics,
}

/// Entity-level difference of two models plus per-step metric deltas.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DiffReport {
    pub added: Vec<EntityRef>,
    pub removed: Vec<EntityRef>,
    pub changed: Vec<EntityChange>,
    pub metric_deltas: Vec<MetricDelta>,
}

impl DiffReport {
    pub fn is_empty(&self) -> bool {
        self.added.is_empty()
            && self.removed.is_empty()
            && self.changed.is_empty()
            && self.metric_deltas.is_empty()
    }
}

fn change(fields: &mut Vec<FieldChange>, field: &'static str, old: String, new: String) {
    if old != new {
        fields.push(FieldChange { field, old, new });
    }
}

fn join_ids<T: fmt::Display>(set: &std::collections::BTreeSet<T>) -> String {
    set.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Compares two models entity by entity. `model_diff(a, a)` is empty, and
/// swapping the arguments swaps added/removed and flips every old/new pair.
pub fn model_diff(a: &EnterpriseModel, b: &EnterpriseModel) -> DiffReport {
    let mut report = DiffReport::default();

    if a.name != b.name {
        report.changed.push(EntityChange {
            entity: EntityRef::Model,
            fields: vec![FieldChange {
                field: "name",
                old: a.name.clone(),
                new: b.name.clone(),
            }],
        });
    }

    diff_map(
        &a.actors,
        &b.actors,
        |id| EntityRef::Actor(id.clone()),
        |old, new| {
            let mut fields = Vec::new();
            change(&mut fields, "name", old.name.clone(), new.name.clone());
            change(
                &mut fields,
                "locus",
                old.locus.to_string(),
                new.locus.to_string(),
            );
            fields
        },
        &mut report,
    );
    diff_map(
        &a.facts,
        &b.facts,
        |id| EntityRef::Fact(id.clone()),
        |old, new| {
            let mut fields = Vec::new();
            change(
                &mut fields,
                "statement",
                old.statement.clone(),
                new.statement.clone(),
            );
            fields
        },
        &mut report,
    );
    diff_map(
        &a.transactions,
        &b.transactions,
        |id| EntityRef::Transaction(id.clone()),
        |old, new| {
            let mut fields = Vec::new();
            change(&mut fields, "name", old.name.clone(), new.name.clone());
            change(
                &mut fields,
                "result",
                old.result.to_string(),
                new.result.to_string(),
            );
            change(
                &mut fields,
                "executor",
                old.executor.to_string(),
                new.executor.to_string(),
            );
            change(
                &mut fields,
                "initiators",
                join_ids(&old.initiators),
                join_ids(&new.initiators),
            );
            fields
        },
        &mut report,
    );
    diff_map(
        &a.banks,
        &b.banks,
        |id| EntityRef::Bank(id.clone()),
        |old, new| {
            let mut fields = Vec::new();
            change(
                &mut fields,
                "kind",
                old.kind.to_string(),
                new.kind.to_string(),
            );
            change(&mut fields, "name", old.name.clone(), new.name.clone());
            change(
                &mut fields,
                "contents",
                join_ids(&old.contents),
                join_ids(&new.contents),
            );
            fields
        },
        &mut report,
    );

    diff_set(&a.info_links, &b.info_links, EntityRef::Access, &mut report);
    diff_set(&a.psd_links, &b.psd_links, EntityRef::Link, &mut report);
    diff_set(&a.iut_entries, &b.iut_entries, EntityRef::Use, &mut report);

    for (step, old) in &a.metrics {
        match b.metrics.get(step) {
            None => report.removed.push(EntityRef::Metrics(step.clone())),
            Some(new) if old != new => report.metric_deltas.push(MetricDelta {
                step: step.clone(),
                old: old.clone(),
                new: new.clone(),
            }),
            Some(_) => {}
        }
    }
    for step in b.metrics.keys() {
        if !a.metrics.contains_key(step) {
            report.added.push(EntityRef::Metrics(step.clone()));
        }
    }

    report.added.sort();
    report.removed.sort();
    report.changed.sort_by(|x, y| x.entity.cmp(&y.entity));
    report.metric_deltas.sort_by(|x, y| x.step.cmp(&y.step));
    report
}

fn diff_map<K: Ord + Clone, V: PartialEq>(
    a: &std::collections::BTreeMap<K, V>,
    b: &std::collections::BTreeMap<K, V>,
    entity: impl Fn(&K) -> EntityRef,
    fields: impl Fn(&V, &V) -> Vec<FieldChange>,
    report: &mut DiffReport,
) {
    for (id, old) in a {
        match b.get(id) {
            None => report.removed.push(entity(id)),
            Some(new) => {
                let changed = fields(old, new);
                if !changed.is_empty() {
                    report.changed.push(EntityChange {
                        entity: entity(id),
                        fields: changed,
                    });
                }
            }
        }
    }
    for id in b.keys() {
        if !a.contains_key(id) {
            report.added.push(entity(id));
        }
    }
}

fn diff_set<T: Ord + Clone>(
    a: &std::collections::BTreeSet<T>,
    b: &std::collections::BTreeSet<T>,
    entity: impl Fn(T) -> EntityRef,
    report: &mut DiffReport,
) {
    for item in a.difference(b) {
        report.removed.push(entity(item.clone()));
    }
    for item in b.difference(a) {
        report.added.push(entity(item.clone()));
    }
}
