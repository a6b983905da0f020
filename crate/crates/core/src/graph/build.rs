//! Typed actor/transaction/bank graphs built from a model.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::ontology::{
    ActorId, BankId, FactId, PsdLinkKind, StepKind, TransactionId, ValidatedModel,
};

/// A graph node: an actor role, a transaction kind or a bank.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", content = "id", rename_all = "lowercase")]
pub enum NodeRef {
    Actor(ActorId),
    Transaction(TransactionId),
    Bank(BankId),
}

impl fmt::Display for NodeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeRef::Actor(id) => write!(f, "actor:{id}"),
            NodeRef::Transaction(id) => write!(f, "transaction:{id}"),
            NodeRef::Bank(id) => write!(f, "bank:{id}"),
        }
    }
}

/// Node payload: display name, plus stored facts for bank nodes.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct NodeInfo {
    pub name: String,
    #[serde(skip_serializing_if = "BTreeSet::is_empty")]
    pub contents: BTreeSet<FactId>,
}

/// Edge relation. Process-structure edges keep their step detail so each
/// declared link stays a distinct edge.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase", tag = "rel")]
pub enum EdgeRel {
    Initiates,
    Executes,
    Access,
    Psd {
        link: PsdLinkKind,
        from_step: StepKind,
        to_step: StepKind,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct GraphEdge {
    pub from: NodeRef,
    pub to: NodeRef,
    #[serde(flatten)]
    pub rel: EdgeRel,
}

/// Deterministically ordered node/edge view of a model.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct OntologyGraph {
    pub nodes: BTreeMap<NodeRef, NodeInfo>,
    pub edges: BTreeSet<GraphEdge>,
}

impl OntologyGraph {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// The sub-graph containing only actor/transaction nodes and
    /// initiates/executes edges.
    pub fn interaction_restriction(&self) -> OntologyGraph {
        OntologyGraph {
            nodes: self
                .nodes
                .iter()
                .filter(|(n, _)| !matches!(n, NodeRef::Bank(_)))
                .map(|(n, i)| (n.clone(), i.clone()))
                .collect(),
            edges: self
                .edges
                .iter()
                .filter(|e| matches!(e.rel, EdgeRel::Initiates | EdgeRel::Executes))
                .cloned()
                .collect(),
        }
    }
}

/// Actor-transaction diagram: actors and transactions with initiates and
/// executes edges only. One executes edge per transaction, one initiates
/// edge per (initiator, transaction) pair.
pub fn build_atd(model: &ValidatedModel) -> OntologyGraph {
    let mut graph = OntologyGraph::default();
    for (id, actor) in &model.actors {
        graph.nodes.insert(
            NodeRef::Actor(id.clone()),
            NodeInfo {
                name: actor.name.clone(),
                contents: BTreeSet::new(),
            },
        );
    }
    for (id, tx) in &model.transactions {
        graph.nodes.insert(
            NodeRef::Transaction(id.clone()),
            NodeInfo {
                name: tx.name.clone(),
                contents: BTreeSet::new(),
            },
        );
        graph.edges.insert(GraphEdge {
            from: NodeRef::Actor(tx.executor.clone()),
            to: NodeRef::Transaction(id.clone()),
            rel: EdgeRel::Executes,
        });
        for initiator in &tx.initiators {
            graph.edges.insert(GraphEdge {
                from: NodeRef::Actor(initiator.clone()),
                to: NodeRef::Transaction(id.clone()),
                rel: EdgeRel::Initiates,
            });
        }
    }
    graph
}

/// Organization construction diagram: the ATD plus bank nodes (carrying
/// their contents), information-access edges and process-structure edges.
pub fn build_ocd(model: &ValidatedModel) -> OntologyGraph {
    let mut graph = build_atd(model);
    for (id, bank) in &model.banks {
        graph.nodes.insert(
            NodeRef::Bank(id.clone()),
            NodeInfo {
                name: bank.name.clone(),
                contents: bank.contents.clone(),
            },
        );
    }
    for link in &model.info_links {
        graph.edges.insert(GraphEdge {
            from: NodeRef::Actor(link.actor.clone()),
            to: NodeRef::Bank(link.bank.clone()),
            rel: EdgeRel::Access,
        });
    }
    for link in &model.psd_links {
        graph.edges.insert(GraphEdge {
            from: NodeRef::Transaction(link.from.transaction.clone()),
            to: NodeRef::Transaction(link.to.transaction.clone()),
            rel: EdgeRel::Psd {
                link: link.kind,
                from_step: link.from.step,
                to_step: link.to.step,
            },
        });
    }
    graph
}

/// Per-actor executes/initiates counts, one row per actor, sorted by id.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ActorLoadRow {
    pub actor: ActorId,
    pub executes: usize,
    pub initiates: usize,
}

pub fn actor_load(model: &ValidatedModel) -> Vec<ActorLoadRow> {
    model
        .actors
        .keys()
        .map(|id| ActorLoadRow {
            actor: id.clone(),
            executes: model
                .transactions
                .values()
                .filter(|tx| &tx.executor == id)
                .count(),
            initiates: model
                .transactions
                .values()
                .filter(|tx| tx.initiators.contains(id))
                .count(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ontology::{Locus, ModelBuilder, ModelExt, StepRef};

    fn tiny() -> ValidatedModel {
        ModelBuilder::new("m")
            .actor("A01", "Customer", Locus::Environmental)
            .actor("A02", "Seller", Locus::Internal)
            .fact("B-R01", "f")
            .transaction("B-T01", "T", "B-R01", "A02", &["A01"])
            .build()
            .validated()
            .unwrap()
    }

    #[test]
    fn empty_model_builds_empty_graph() {
        let model = ModelBuilder::new("m").build().validated().unwrap();
        let graph = build_atd(&model);
        assert_eq!(graph.node_count(), 0);
        assert_eq!(graph.edge_count(), 0);
    }

    #[test]
    fn one_transaction_one_initiator_gives_three_nodes_two_edges() {
        let graph = build_atd(&tiny());
        assert_eq!(graph.node_count(), 3);
        assert_eq!(graph.edge_count(), 2);
    }

    #[test]
    fn ocd_without_banks_or_links_equals_atd() {
        let model = tiny();
        assert_eq!(build_ocd(&model), build_atd(&model));
    }

    #[test]
    fn single_access_declaration_adds_one_edge() {
        let model = ModelBuilder::new("m")
            .actor("A03", "Accounting", Locus::Internal)
            .bank(
                "PB01",
                crate::ontology::BankKind::Production,
                "Records",
                &[],
            )
            .access("A03", "PB01")
            .build()
            .validated()
            .unwrap();
        let graph = build_ocd(&model);
        assert_eq!(
            graph
                .edges
                .iter()
                .filter(|e| matches!(e.rel, EdgeRel::Access))
                .count(),
            1
        );
    }

    #[test]
    fn parallel_psd_links_stay_distinct_edges() {
        let model = ModelBuilder::new("m")
            .actor("A01", "Customer", Locus::Environmental)
            .actor("A02", "Seller", Locus::Internal)
            .fact("B-R01", "f")
            .fact("B-R02", "g")
            .transaction("B-T01", "T", "B-R01", "A02", &["A01"])
            .transaction("B-T02", "U", "B-R02", "A02", &["A01"])
            .link(
                PsdLinkKind::Causal,
                StepRef::new("B-T01", StepKind::Pm),
                StepRef::new("B-T02", StepKind::Rq),
            )
            .link(
                PsdLinkKind::Causal,
                StepRef::new("B-T01", StepKind::Ex),
                StepRef::new("B-T02", StepKind::Rq),
            )
            .build()
            .validated()
            .unwrap();
        let graph = build_ocd(&model);
        let psd_edges = graph
            .edges
            .iter()
            .filter(|e| matches!(e.rel, EdgeRel::Psd { .. }))
            .count();
        assert_eq!(psd_edges, 2);
    }

    #[test]
    fn actor_load_counts_executes_and_initiates() {
        let model = ModelBuilder::new("m")
            .actor("A01", "One", Locus::Internal)
            .actor("A02", "Two", Locus::Internal)
            .fact("B-R01", "f")
            .fact("B-R02", "g")
            .transaction("B-T01", "T", "B-R01", "A01", &["A02"])
            .transaction("B-T02", "U", "B-R02", "A01", &["A02"])
            .build()
            .validated()
            .unwrap();
        let rows = actor_load(&model);
        assert_eq!(rows.len(), 2);
        assert_eq!((rows[0].executes, rows[0].initiates), (2, 0));
        assert_eq!((rows[1].executes, rows[1].initiates), (0, 2));
    }
}
