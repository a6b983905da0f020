//! Transaction-result table and enterprise-boundary analysis.

use std::collections::BTreeSet;

use serde::Serialize;

use super::model::{ActorId, FactId, Locus, TransactionId};
use super::validate::ValidatedModel;

/// One row of the transaction-result table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TrtRow {
    pub transaction: TransactionId,
    pub name: String,
    pub result: FactId,
    pub statement: String,
}

/// Pairs every transaction with its result fact, sorted by transaction id.
/// On a sound model this is a bijection: one row per transaction, one
/// transaction per result fact.
pub fn transaction_result_table(model: &ValidatedModel) -> Vec<TrtRow> {
    model
        .transactions
        .values()
        .map(|tx| TrtRow {
            transaction: tx.id.clone(),
            name: tx.name.clone(),
            result: tx.result.clone(),
            statement: model.facts[&tx.result].statement.clone(),
        })
        .collect()
}

/// The internal/environmental split of the organization.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Boundary {
    pub internal_actors: BTreeSet<ActorId>,
    pub environmental_actors: BTreeSet<ActorId>,
    /// Transactions crossing the boundary: the executor and at least one
    /// initiator sit on different sides.
    pub boundary_transactions: BTreeSet<TransactionId>,
}

fn is_internal(locus: Locus) -> bool {
    // Composite actors aggregate unknown external structure; they count as
    // environmental for the split.
    matches!(locus, Locus::Internal)
}

/// Splits actors into internal and environmental sides and collects the
/// transactions that cross the split. Every actor lands on exactly one side.
pub fn boundary(model: &ValidatedModel) -> Boundary {
    let mut internal_actors = BTreeSet::new();
    let mut environmental_actors = BTreeSet::new();
    for (id, actor) in &model.actors {
        if is_internal(actor.locus) {
            internal_actors.insert(id.clone());
        } else {
            environmental_actors.insert(id.clone());
        }
    }
    let boundary_transactions = model
        .transactions
        .values()
        .filter(|tx| {
            let executor_internal = internal_actors.contains(&tx.executor);
            tx.initiators
                .iter()
                .any(|i| internal_actors.contains(i) != executor_internal)
        })
        .map(|tx| tx.id.clone())
        .collect();
    Boundary {
        internal_actors,
        environmental_actors,
        boundary_transactions,
    }
}
