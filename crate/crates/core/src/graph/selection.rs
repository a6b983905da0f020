//! Expansion of a reengineering selection with the most-connected
//! transactions: one round of weight summation from the chosen seed set.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::decimal::Decimal;
use crate::ontology::{Locus, TransactionId, ValidatedModel};

use super::weight::{ConnectionCounts, ConnectionIndex, WeightConfig};
use super::GraphError;

/// How candidates make it into the expanded set.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "policy", content = "value")]
pub enum SelectionPolicy {
    /// All candidates attaining the maximum positive weight (ties kept).
    #[default]
    Argmax,
    /// The k highest positive-weight candidates, ties broken by id.
    TopK(usize),
    /// All candidates with weight at least the threshold.
    Threshold(Decimal),
}

/// One candidate row: summed weight-to-seed plus the evidence breakdown.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SelectionRow {
    pub candidate: TransactionId,
    pub weight: Decimal,
    pub shared_actors: usize,
    pub psd_links: usize,
    pub shared_banks: usize,
}

/// Result of one expansion round. `added` is disjoint from the seed and the
/// weight table covers every non-seed candidate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SelectionResult {
    pub seed: BTreeSet<TransactionId>,
    pub added: BTreeSet<TransactionId>,
    pub weight_table: Vec<SelectionRow>,
}

/// Sums pairwise connection weights from every candidate to the seed set
/// and applies the policy. Exactly one expansion round — no transitive
/// closure. With `internal_only`, transactions executed by environmental
/// or composite actors are not candidates.
pub fn expand_selection(
    model: &ValidatedModel,
    seed: &BTreeSet<TransactionId>,
    policy: &SelectionPolicy,
    cfg: &WeightConfig,
    internal_only: bool,
) -> Result<SelectionResult, GraphError> {
    cfg.validate()?;
    if seed.is_empty() {
        return Err(GraphError::EmptySeed);
    }
    for id in seed {
        if !model.transactions.contains_key(id) {
            return Err(GraphError::UnknownTransaction(id.clone()));
        }
    }
    match policy {
        SelectionPolicy::TopK(0) => {
            return Err(GraphError::InvalidPolicy("top-k requires k >= 1".into()))
        }
        SelectionPolicy::Threshold(theta) if !(*theta > Decimal::ZERO) => {
            return Err(GraphError::InvalidPolicy(
                "threshold requires a positive value".into(),
            ));
        }
        _ => {}
    }

    let index = ConnectionIndex::new(model);
    let mut weight_table: Vec<SelectionRow> = model
        .transactions
        .values()
        .filter(|tx| !seed.contains(&tx.id))
        .filter(|tx| {
            !internal_only
                || model
                    .actors
                    .get(&tx.executor)
                    .is_some_and(|a| a.locus == Locus::Internal)
        })
        .map(|tx| {
            let mut total = ConnectionCounts::default();
            for s in seed {
                let c = index.counts(&tx.id, s);
                total.shared_actors += c.shared_actors;
                total.psd_links += c.psd_links;
                total.shared_banks += c.shared_banks;
            }
            SelectionRow {
                candidate: tx.id.clone(),
                weight: total.weighted(cfg),
                shared_actors: total.shared_actors,
                psd_links: total.psd_links,
                shared_banks: total.shared_banks,
            }
        })
        .collect();
    weight_table.sort_by(|a, b| b.weight.cmp(&a.weight).then(a.candidate.cmp(&b.candidate)));

    let added: BTreeSet<TransactionId> = match policy {
        SelectionPolicy::Argmax => {
            let max = weight_table.first().map(|r| r.weight);
            match max {
                Some(max) if max > Decimal::ZERO => weight_table
                    .iter()
                    .filter(|r| r.weight == max)
                    .map(|r| r.candidate.clone())
                    .collect(),
                _ => BTreeSet::new(),
            }
        }
        SelectionPolicy::TopK(k) => weight_table
            .iter()
            .filter(|r| r.weight > Decimal::ZERO)
            .take(*k)
            .map(|r| r.candidate.clone())
            .collect(),
        SelectionPolicy::Threshold(theta) => weight_table
            .iter()
            .filter(|r| r.weight >= *theta)
            .map(|r| r.candidate.clone())
            .collect(),
    };

    Ok(SelectionResult {
        seed: seed.clone(),
        added,
        weight_table,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ontology::{Locus, ModelBuilder, ModelExt, PsdLinkKind, StepKind, StepRef};

    fn id(s: &str) -> TransactionId {
        TransactionId::new(s)
    }

    fn seed(ids: &[&str]) -> BTreeSet<TransactionId> {
        ids.iter().map(|s| id(s)).collect()
    }

    /// Chain T01 -(link)- T02, T02 sharing an actor with T03; T04 isolated.
    fn chain() -> ValidatedModel {
        ModelBuilder::new("m")
            .actor("A01", "One", Locus::Internal)
            .actor("A02", "Two", Locus::Internal)
            .actor("A03", "Three", Locus::Internal)
            .actor("A04", "Four", Locus::Internal)
            .actor("A05", "Out", Locus::Environmental)
            .fact("B-R01", "f")
            .fact("B-R02", "g")
            .fact("B-R03", "h")
            .fact("B-R04", "i")
            .transaction("B-T01", "T", "B-R01", "A01", &["A02"])
            .transaction("B-T02", "U", "B-R02", "A03", &["A01"])
            .transaction("B-T03", "V", "B-R03", "A03", &["A04"])
            .transaction("B-T04", "W", "B-R04", "A05", &["A04"])
            .link(
                PsdLinkKind::Causal,
                StepRef::new("B-T01", StepKind::Pm),
                StepRef::new("B-T02", StepKind::Rq),
            )
            .build()
            .validated()
            .unwrap()
    }

    #[test]
    fn seeding_everything_adds_nothing() {
        let model = chain();
        let all = seed(&["B-T01", "B-T02", "B-T03", "B-T04"]);
        let result = expand_selection(
            &model,
            &all,
            &SelectionPolicy::Argmax,
            &Default::default(),
            false,
        )
        .unwrap();
        assert!(result.added.is_empty());
        assert!(result.weight_table.is_empty());
    }

    #[test]
    fn zero_weight_candidates_are_never_added_even_under_argmax() {
        let model = chain();
        // B-T04 shares an actor with B-T03 only; seeding B-T01 leaves both
        // B-T03 and B-T04 at zero weight... except B-T02 which links.
        let result = expand_selection(
            &model,
            &seed(&["B-T03"]),
            &SelectionPolicy::Argmax,
            &Default::default(),
            false,
        )
        .unwrap();
        // B-T02 shares A03 with B-T03; B-T04 shares A04; B-T01 shares nothing.
        assert!(!result.added.contains(&id("B-T01")));

        // Isolate completely: a seed whose candidates all weigh zero.
        let lonely = ModelBuilder::new("m")
            .actor("A01", "One", Locus::Internal)
            .actor("A02", "Two", Locus::Internal)
            .actor("A03", "Three", Locus::Internal)
            .actor("A04", "Four", Locus::Internal)
            .fact("B-R01", "f")
            .fact("B-R02", "g")
            .transaction("B-T01", "T", "B-R01", "A01", &["A02"])
            .transaction("B-T02", "U", "B-R02", "A03", &["A04"])
            .build()
            .validated()
            .unwrap();
        let result = expand_selection(
            &lonely,
            &seed(&["B-T01"]),
            &SelectionPolicy::Argmax,
            &Default::default(),
            false,
        )
        .unwrap();
        assert!(result.added.is_empty());
        assert_eq!(result.weight_table.len(), 1);
    }

    #[test]
    fn argmax_keeps_ties() {
        let model = ModelBuilder::new("m")
            .actor("A01", "Hub", Locus::Internal)
            .actor("A02", "Two", Locus::Internal)
            .actor("A03", "Three", Locus::Internal)
            .fact("B-R01", "f")
            .fact("B-R02", "g")
            .fact("B-R03", "h")
            .transaction("B-T01", "T", "B-R01", "A01", &["A02"])
            .transaction("B-T02", "U", "B-R02", "A01", &["A03"])
            .transaction("B-T03", "V", "B-R03", "A01", &["A02"])
            .build()
            .validated()
            .unwrap();
        let result = expand_selection(
            &model,
            &seed(&["B-T01"]),
            &SelectionPolicy::Argmax,
            &Default::default(),
            false,
        )
        .unwrap();
        // B-T02 shares A01; B-T03 shares A01 and A02 -> unique argmax.
        assert_eq!(result.added, seed(&["B-T03"]));

        let result = expand_selection(
            &model,
            &seed(&["B-T03"]),
            &SelectionPolicy::Argmax,
            &Default::default(),
            false,
        )
        .unwrap();
        // B-T01 shares A01+A02 (2), B-T02 shares A01 (1).
        assert_eq!(result.added, seed(&["B-T01"]));
    }

    #[test]
    fn top_k_breaks_ties_by_id_and_threshold_filters() {
        let model = chain();
        let s = seed(&["B-T02"]);
        let top1 = expand_selection(
            &model,
            &s,
            &SelectionPolicy::TopK(1),
            &Default::default(),
            false,
        )
        .unwrap();
        assert_eq!(top1.added.len(), 1);

        let all_above_zero = expand_selection(
            &model,
            &s,
            &SelectionPolicy::Threshold(Decimal::ONE),
            &Default::default(),
            false,
        )
        .unwrap();
        for row in &all_above_zero.weight_table {
            assert_eq!(
                all_above_zero.added.contains(&row.candidate),
                row.weight >= Decimal::ONE
            );
        }
    }

    #[test]
    fn internal_only_excludes_environment_executed_candidates() {
        let model = chain();
        let result = expand_selection(
            &model,
            &seed(&["B-T03"]),
            &SelectionPolicy::Threshold(Decimal::ONE),
            &Default::default(),
            true,
        )
        .unwrap();
        assert!(result
            .weight_table
            .iter()
            .all(|r| r.candidate != id("B-T04")));
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        let model = chain();
        assert!(matches!(
            expand_selection(
                &model,
                &BTreeSet::new(),
                &SelectionPolicy::Argmax,
                &Default::default(),
                false
            ),
            Err(GraphError::EmptySeed)
        ));
        assert!(matches!(
            expand_selection(
                &model,
                &seed(&["B-T99"]),
                &SelectionPolicy::Argmax,
                &Default::default(),
                false
            ),
            Err(GraphError::UnknownTransaction(_))
        ));
        assert!(matches!(
            expand_selection(
                &model,
                &seed(&["B-T01"]),
                &SelectionPolicy::TopK(0),
                &Default::default(),
                false
            ),
            Err(GraphError::InvalidPolicy(_))
        ));
        assert!(matches!(
            expand_selection(
                &model,
                &seed(&["B-T01"]),
                &SelectionPolicy::Threshold(Decimal::ZERO),
                &Default::default(),
                false
            ),
            Err(GraphError::InvalidPolicy(_))
        ));
    }
}
