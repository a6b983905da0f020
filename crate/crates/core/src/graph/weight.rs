//! Pairwise connection strength between transactions, combining shared
//! actors (construction-model evidence), process links and shared banks
//! (process-model and information evidence).

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::decimal::Decimal;
use crate::ontology::{BankId, TransactionId, ValidatedModel};

use super::GraphError;

/// Relative importance of the three connection components. Defaults to
/// 1/1/1; at least one weight must be positive and none may be negative.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightConfig {
    pub w_actor: Decimal,
    pub w_psd: Decimal,
    pub w_bank: Decimal,
}

impl Default for WeightConfig {
    fn default() -> Self {
        WeightConfig {
            w_actor: Decimal::ONE,
            w_psd: Decimal::ONE,
            w_bank: Decimal::ONE,
        }
    }
}

impl WeightConfig {
    pub fn validate(&self) -> Result<(), GraphError> {
        let all = [self.w_actor, self.w_psd, self.w_bank];
        if all.iter().any(Decimal::is_negative) {
            return Err(GraphError::InvalidWeights(
                "component weights must be non-negative".into(),
            ));
        }
        if all.iter().all(Decimal::is_zero) {
            return Err(GraphError::InvalidWeights(
                "at least one component weight must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Raw shared-evidence counts between two transactions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ConnectionCounts {
    pub shared_actors: usize,
    pub psd_links: usize,
    pub shared_banks: usize,
}

impl ConnectionCounts {
    pub fn weighted(&self, cfg: &WeightConfig) -> Decimal {
        cfg.w_actor * Decimal::from_int(self.shared_actors as i64)
            + cfg.w_psd * Decimal::from_int(self.psd_links as i64)
            + cfg.w_bank * Decimal::from_int(self.shared_banks as i64)
    }
}

/// Precomputed per-transaction evidence used by weight queries.
pub(crate) struct ConnectionIndex<'m> {
    model: &'m ValidatedModel,
    /// Banks a transaction touches: banks containing its result fact or any
    /// fact consulted at one of its steps.
    touched_banks: BTreeMap<TransactionId, BTreeSet<BankId>>,
}

impl<'m> ConnectionIndex<'m> {
    pub(crate) fn new(model: &'m ValidatedModel) -> ConnectionIndex<'m> {
        let mut fact_banks: BTreeMap<_, BTreeSet<BankId>> = BTreeMap::new();
        for (bank_id, bank) in &model.banks {
            for fact in &bank.contents {
                fact_banks
                    .entry(fact.clone())
                    .or_default()
                    .insert(bank_id.clone());
            }
        }
        let mut touched_banks = BTreeMap::new();
        for (tx_id, tx) in &model.transactions {
            let mut banks = BTreeSet::new();
            if let Some(b) = fact_banks.get(&tx.result) {
                banks.extend(b.iter().cloned());
            }
            for fact in model.facts_used_by(tx_id) {
                if let Some(b) = fact_banks.get(fact) {
                    banks.extend(b.iter().cloned());
                }
            }
            touched_banks.insert(tx_id.clone(), banks);
        }
        ConnectionIndex {
            model,
            touched_banks,
        }
    }

    pub(crate) fn counts(&self, a: &TransactionId, b: &TransactionId) -> ConnectionCounts {
        let ta = &self.model.transactions[a];
        let tb = &self.model.transactions[b];
        let shared_actors = ta.participants().intersection(&tb.participants()).count();
        let psd_links = self
            .model
            .psd_links
            .iter()
            .filter(|l| {
                (&l.from.transaction == a && &l.to.transaction == b)
                    || (&l.from.transaction == b && &l.to.transaction == a)
            })
            .count();
        let shared_banks = self.touched_banks[a]
            .intersection(&self.touched_banks[b])
            .count();
        ConnectionCounts {
            shared_actors,
            psd_links,
            shared_banks,
        }
    }
}

fn known(model: &ValidatedModel, id: &TransactionId) -> Result<(), GraphError> {
    if model.transactions.contains_key(id) {
        Ok(())
    } else {
        Err(GraphError::UnknownTransaction(id.clone()))
    }
}

/// Connection weight between two distinct transactions:
/// `w_actor·|shared participants| + w_psd·|links either direction| +
/// w_bank·|banks both touch|`. Symmetric and non-negative.
pub fn connection_weight(
    model: &ValidatedModel,
    a: &TransactionId,
    b: &TransactionId,
    cfg: &WeightConfig,
) -> Result<Decimal, GraphError> {
    cfg.validate()?;
    known(model, a)?;
    known(model, b)?;
    if a == b {
        return Err(GraphError::IdenticalTransactions(a.clone()));
    }
    Ok(ConnectionIndex::new(model).counts(a, b).weighted(cfg))
}
