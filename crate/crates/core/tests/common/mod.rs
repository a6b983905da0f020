//! Shared helpers for integration tests: fixture loading and random model
//! generation.
#![allow(dead_code)] // each test target compiles its own copy

use std::collections::BTreeSet;
use std::path::PathBuf;

use proptest::prelude::*;

use ontobpr::decimal::Decimal;
use ontobpr::dsl::parse;
use ontobpr::ontology::{
    EnterpriseModel, Locus, ModelBuilder, ModelExt, PsdLinkKind, StepKind, StepRef, ValidatedModel,
};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

pub fn load_fixture(name: &str) -> EnterpriseModel {
    let path = fixture_path(name);
    let text = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("cannot read {}: {e}", path.display()));
    match parse(&text, name) {
        Ok(model) => model,
        Err(diags) => {
            for d in &diags {
                eprintln!("{d}");
            }
            panic!("fixture {name} failed to parse");
        }
    }
}

pub fn load_validated(name: &str) -> ValidatedModel {
    load_fixture(name)
        .validated()
        .unwrap_or_else(|report| panic!("fixture {name} failed validation:\n{report}"))
}

pub fn dec(s: &str) -> Decimal {
    s.parse().unwrap()
}

// ---------------------------------------------------------------------------
// Random model generation
// ---------------------------------------------------------------------------

/// Blueprint for one generated transaction.
#[derive(Clone, Debug)]
pub struct TxSpec {
    pub executor: usize,
    pub initiator: usize,
    /// Indices of later transactions this one spawns, with the firing step.
    pub children: Vec<(usize, StepKind)>,
    /// Happy-path steps carrying metrics: (step, duration, cost).
    pub measured: Vec<(StepKind, u16, u16)>,
    pub in_bank: bool,
}

/// Blueprint for a whole valid model; index-based so shrinking stays sane.
#[derive(Clone, Debug)]
pub struct ModelSpec {
    pub actor_count: usize,
    pub transactions: Vec<TxSpec>,
    /// Daily frequency shared by every step of one causal tree (keeps the
    /// model flow-consistent, so deterministic simulation matches the
    /// closed form).
    pub frequency: u8,
}

fn happy_step() -> impl Strategy<Value = StepKind> {
    prop::sample::select(vec![
        StepKind::Rq,
        StepKind::Pm,
        StepKind::Ex,
        StepKind::St,
        StepKind::Ac,
    ])
}

pub fn arb_model_spec(max_transactions: usize) -> impl Strategy<Value = ModelSpec> {
    let tx_count = 1..=max_transactions;
    (tx_count, 2usize..=5, 1u8..=4).prop_flat_map(|(txs, actors, frequency)| {
        let tx_specs: Vec<_> = (0..txs)
            .map(|i| {
                let children = if i + 1 < txs {
                    prop::collection::vec((i + 1..txs, happy_step()), 0..=2).boxed()
                } else {
                    Just(Vec::new()).boxed()
                };
                (
                    0..actors,
                    0..actors,
                    children,
                    prop::collection::vec((happy_step(), 0u16..500, 0u16..200), 0..=3),
                    any::<bool>(),
                )
                    .prop_map(
                        |(executor, initiator, children, measured, in_bank)| TxSpec {
                            executor,
                            initiator,
                            children,
                            measured,
                            in_bank,
                        },
                    )
            })
            .collect();
        (Just(actors), tx_specs, Just(frequency)).prop_map(
            |(actor_count, transactions, frequency)| ModelSpec {
                actor_count,
                transactions,
                frequency,
            },
        )
    })
}

impl ModelSpec {
    /// Materializes the blueprint into a model that passes validation.
    pub fn build(&self) -> EnterpriseModel {
        let mut builder = ModelBuilder::new("generated");
        for a in 0..self.actor_count {
            let locus = if a % 3 == 2 {
                Locus::Environmental
            } else {
                Locus::Internal
            };
            builder = builder.actor(&format!("A{a:02}"), &format!("Actor {a}"), locus);
        }

        // Only roots of the causal forest spawn; every transaction in a tree
        // shares the tree root's frequency via its metrics records.
        let tx_ids: Vec<String> = (0..self.transactions.len())
            .map(|i| format!("B-T{:02}", i + 1))
            .collect();
        let mut is_child = vec![false; self.transactions.len()];
        for spec in &self.transactions {
            for (child, _) in &spec.children {
                is_child[*child] = true;
            }
        }

        for (i, spec) in self.transactions.iter().enumerate() {
            let fact_id = format!("B-R{:02}", i + 1);
            builder = builder.fact(&fact_id, &format!("[Result {i}] established"));
            let executor = format!("A{:02}", spec.executor);
            let mut initiator = format!("A{:02}", spec.initiator);
            if initiator == executor {
                // Executors may not initiate their own transaction.
                initiator = format!("A{:02}", (spec.initiator + 1) % self.actor_count);
            }
            if initiator == executor {
                initiator = format!("A{:02}", (spec.initiator + 2) % self.actor_count);
            }
            builder = builder.transaction(
                &tx_ids[i],
                &format!("Process {i}"),
                &fact_id,
                &executor,
                &[&initiator],
            );
        }

        // One shared production bank for the flagged transactions.
        let banked: Vec<&str> = self
            .transactions
            .iter()
            .enumerate()
            .filter(|(_, s)| s.in_bank)
            .map(|(i, _)| tx_ids[i].as_str())
            .collect();
        if !banked.is_empty() {
            let facts: Vec<String> = banked.iter().map(|id| format!("B-R{}", &id[3..])).collect();
            let fact_refs: Vec<&str> = facts.iter().map(|s| s.as_str()).collect();
            builder = builder.bank(
                "PB01",
                ontobpr::ontology::BankKind::Production,
                "Shared records",
                &fact_refs,
            );
        }

        for (i, spec) in self.transactions.iter().enumerate() {
            // One causal link per (parent, child) pair; a second entry for
            // the same child would spawn it twice per parent occurrence.
            let mut seen_children = BTreeSet::new();
            for (child, step) in &spec.children {
                if !seen_children.insert(*child) {
                    continue;
                }
                builder = builder.link(
                    PsdLinkKind::Causal,
                    StepRef::new(tx_ids[i].as_str(), *step),
                    StepRef::new(tx_ids[*child].as_str(), StepKind::Rq),
                );
            }
        }

        // Metrics: every measured step of every transaction shares the
        // model-wide frequency. Roots without measured steps still get a
        // zero-valued arrival record so their causal tree is not inert.
        let freq = Decimal::from_int(self.frequency as i64);
        for (i, spec) in self.transactions.iter().enumerate() {
            let mut seen: BTreeSet<StepKind> = BTreeSet::new();
            for (step, duration, cost) in &spec.measured {
                if !seen.insert(*step) {
                    continue;
                }
                builder = builder.metrics(
                    StepRef::new(tx_ids[i].as_str(), *step),
                    Decimal::from_int(*duration as i64),
                    Decimal::from_int(*cost as i64),
                    freq,
                    &format!("Function {i}/{step}"),
                );
            }
            if seen.is_empty() && !is_child[i] {
                builder = builder.metrics(
                    StepRef::new(tx_ids[i].as_str(), StepKind::Rq),
                    Decimal::ZERO,
                    Decimal::ZERO,
                    freq,
                    &format!("Function {i}/arrivals"),
                );
            }
        }

        builder.build()
    }

    /// True when some transaction is spawned by two parents (its steps would
    /// run more often than its declared frequency).
    pub fn has_multi_parent(&self) -> bool {
        let mut spawn_counts = vec![0usize; self.transactions.len()];
        for spec in &self.transactions {
            let mut seen = BTreeSet::new();
            for (child, _) in &spec.children {
                if seen.insert(*child) {
                    spawn_counts[*child] += 1;
                }
            }
        }
        spawn_counts.iter().any(|c| *c > 1)
    }
}

/// A generated model that passed validation.
pub fn arb_valid_model(max_transactions: usize) -> impl Strategy<Value = ValidatedModel> {
    arb_model_spec(max_transactions).prop_map(|spec| {
        spec.build()
            .validated()
            .expect("generated models pass validation")
    })
}

/// A generated model whose causal structure is a forest (each transaction
/// spawned at most once) — deterministic simulation matches the closed form
/// for these.
pub fn arb_flow_consistent_model(max_transactions: usize) -> impl Strategy<Value = ValidatedModel> {
    arb_model_spec(max_transactions)
        .prop_filter("multi-parent spawns break flow consistency", |spec| {
            !spec.has_multi_parent()
        })
        .prop_map(|spec| {
            spec.build()
                .validated()
                .expect("generated models pass validation")
        })
}
