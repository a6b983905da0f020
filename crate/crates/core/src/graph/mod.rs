//! Actor/transaction/bank graphs and the connectivity-driven expansion of a
//! reengineering selection.

mod build;
mod selection;
mod weight;

use thiserror::Error;

use crate::ontology::TransactionId;

pub use build::{
    actor_load, build_atd, build_ocd, ActorLoadRow, EdgeRel, GraphEdge, NodeInfo, NodeRef,
    OntologyGraph,
};
pub use selection::{expand_selection, SelectionPolicy, SelectionResult, SelectionRow};
pub use weight::{connection_weight, ConnectionCounts, WeightConfig};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("unknown transaction {0}")]
    UnknownTransaction(TransactionId),
    #[error("connection weight of {0} with itself is undefined")]
    IdenticalTransactions(TransactionId),
    #[error("seed set is empty")]
    EmptySeed,
    #[error("invalid selection policy: {0}")]
    InvalidPolicy(String),
    #[error("invalid weight configuration: {0}")]
    InvalidWeights(String),
}
