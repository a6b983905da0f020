//! Canonical text form of a model.
//!
//! Block order: model, actors, facts, transactions, banks, access, trigger,
//! wait, use, metrics; each block sorted by id. Output is byte-stable:
//! serializing a parse of serializer output reproduces it exactly.

use std::fmt::Write;

use crate::ontology::{EnterpriseModel, PsdLinkKind};

fn quote(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push('"');
    for c in text.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            other => out.push(other),
        }
    }
    out.push('"');
    out
}

/// Renders the canonical `.demo` text for a model. Metric values are written
/// with three decimal places at most; models that passed validation always
/// fit (see the METRIC_PRECISION rule).
pub fn serialize(model: &EnterpriseModel) -> String {
    let mut out = String::new();
    let w = &mut out;

    writeln!(w, "model {}", quote(&model.name)).unwrap();

    for actor in model.actors.values() {
        writeln!(
            w,
            "actor {} {} {}",
            actor.id,
            quote(&actor.name),
            actor.locus
        )
        .unwrap();
    }
    for fact in model.facts.values() {
        writeln!(w, "fact {} {}", fact.id, quote(&fact.statement)).unwrap();
    }
    for tx in model.transactions.values() {
        let initiators = tx
            .initiators
            .iter()
            .map(|a| a.as_str())
            .collect::<Vec<_>>()
            .join(",");
        writeln!(
            w,
            "transaction {} {} result {} executor {} initiators {}",
            tx.id,
            quote(&tx.name),
            tx.result,
            tx.executor,
            initiators
        )
        .unwrap();
    }
    for bank in model.banks.values() {
        write!(w, "bank {} {} {}", bank.id, bank.kind, quote(&bank.name)).unwrap();
        if !bank.contents.is_empty() {
            let contents = bank
                .contents
                .iter()
                .map(|f| f.as_str())
                .collect::<Vec<_>>()
                .join(",");
            write!(w, " contains {contents}").unwrap();
        }
        writeln!(w).unwrap();
    }
    for link in &model.info_links {
        writeln!(w, "access {} {}", link.actor, link.bank).unwrap();
    }
    for kind in [PsdLinkKind::Causal, PsdLinkKind::Wait] {
        let keyword = match kind {
            PsdLinkKind::Causal => "trigger",
            PsdLinkKind::Wait => "wait",
        };
        for link in model.psd_links.iter().filter(|l| l.kind == kind) {
            writeln!(w, "{keyword} {} -> {}", link.from, link.to).unwrap();
        }
    }
    for entry in &model.iut_entries {
        writeln!(w, "use {} at {}", entry.fact, entry.step).unwrap();
    }
    for metrics in model.metrics.values() {
        write!(
            w,
            "metrics {} time {} cost {} freq {}",
            metrics.step,
            metrics.duration.display(3),
            metrics.cost.display(3),
            metrics.daily_frequency.display(3)
        )
        .unwrap();
        // The step reference itself is the default label; only explicit
        // labels are written, keeping the output canonical.
        if metrics.label != metrics.step.to_string() {
            write!(w, " label {}", quote(&metrics.label)).unwrap();
        }
        writeln!(w).unwrap();
    }

    out
}
