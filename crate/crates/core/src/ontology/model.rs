//! In-memory representation of an enterprise ontology: actor roles, fact
//! kinds, transaction kinds, information banks, process-structure links,
//! information-use entries and per-step metrics.
//!
//! Identifiers compare case-insensitively; the canonical form is uppercase
//! for entity ids and lowercase for step codes. Models are plain immutable
//! data once built (no mutation API), so they can be shared freely across
//! threads.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::decimal::Decimal;

macro_rules! identifier {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
        pub struct $name(String);

        impl $name {
            /// Builds the canonical (uppercase) form of the identifier.
            pub fn new(raw: &str) -> $name {
                $name(raw.trim().to_ascii_uppercase())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }

            pub fn is_empty(&self) -> bool {
                self.0.is_empty()
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{:?}", self.0)
            }
        }

        impl From<&str> for $name {
            fn from(raw: &str) -> $name {
                $name::new(raw)
            }
        }

        impl<'de> serde::Deserialize<'de> for $name {
            fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
                String::deserialize(deserializer).map(|raw| $name::new(&raw))
            }
        }
    };
}

identifier!(
    /// Identifier of an actor role (e.g. `A01`).
    ActorId
);
identifier!(
    /// Identifier of a fact kind (e.g. `B-R01`).
    FactId
);
identifier!(
    /// Identifier of a transaction kind (e.g. `B-T01`).
    TransactionId
);
identifier!(
    /// Identifier of an information bank (e.g. `PB01`).
    BankId
);

/// Where an actor role sits relative to the enterprise boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Locus {
    Internal,
    Environmental,
    /// Composite actors aggregate unknown structure; boundary analysis
    /// counts them on the environmental side.
    Composite,
}

impl Locus {
    pub fn as_str(&self) -> &'static str {
        match self {
            Locus::Internal => "internal",
            Locus::Environmental => "environmental",
            Locus::Composite => "composite",
        }
    }
}

impl fmt::Display for Locus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Locus {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "internal" => Ok(Locus::Internal),
            "environmental" => Ok(Locus::Environmental),
            "composite" => Ok(Locus::Composite),
            _ => Err(()),
        }
    }
}

/// Coordination/production step codes of the transaction pattern.
///
/// `rq` request, `pm` promise, `dc` decline, `qt` quit, `ex` execute,
/// `st` state, `ac` accept, `rj` reject, `sp` stop. Parsing is
/// case-insensitive; the canonical spelling is lowercase.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StepKind {
    Rq,
    Pm,
    Dc,
    Qt,
    Ex,
    St,
    Ac,
    Rj,
    Sp,
}

impl StepKind {
    pub const ALL: [StepKind; 9] = [
        StepKind::Rq,
        StepKind::Pm,
        StepKind::Dc,
        StepKind::Qt,
        StepKind::Ex,
        StepKind::St,
        StepKind::Ac,
        StepKind::Rj,
        StepKind::Sp,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            StepKind::Rq => "rq",
            StepKind::Pm => "pm",
            StepKind::Dc => "dc",
            StepKind::Qt => "qt",
            StepKind::Ex => "ex",
            StepKind::St => "st",
            StepKind::Ac => "ac",
            StepKind::Rj => "rj",
            StepKind::Sp => "sp",
        }
    }
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StepKind {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        StepKind::ALL
            .iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
            .copied()
            .ok_or(())
    }
}

/// One process step of one transaction, e.g. `B-T01/rq`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct StepRef {
    pub transaction: TransactionId,
    pub step: StepKind,
}

impl StepRef {
    pub fn new(transaction: impl Into<TransactionId>, step: StepKind) -> StepRef {
        StepRef {
            transaction: transaction.into(),
            step,
        }
    }
}

impl fmt::Display for StepRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.transaction, self.step)
    }
}

impl fmt::Debug for StepRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for StepRef {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (tx, step) = s.split_once('/').ok_or(())?;
        if tx.trim().is_empty() {
            return Err(());
        }
        Ok(StepRef::new(tx, step.trim().parse()?))
    }
}

/// An actor role of the organization or its environment.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ActorRole {
    pub id: ActorId,
    pub name: String,
    pub locus: Locus,
}

/// A production fact kind with its display statement.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FactKind {
    pub id: FactId,
    pub statement: String,
}

/// A transaction kind: one result fact, one executor, one or more initiators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TransactionKind {
    pub id: TransactionId,
    pub name: String,
    pub result: FactId,
    pub executor: ActorId,
    pub initiators: BTreeSet<ActorId>,
}

impl TransactionKind {
    /// Every actor participating in the transaction (initiators + executor).
    pub fn participants(&self) -> BTreeSet<ActorId> {
        let mut all = self.initiators.clone();
        all.insert(self.executor.clone());
        all
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BankKind {
    Production,
    Coordination,
}

impl BankKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            BankKind::Production => "production",
            BankKind::Coordination => "coordination",
        }
    }
}

impl fmt::Display for BankKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BankKind {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "production" => Ok(BankKind::Production),
            "coordination" => Ok(BankKind::Coordination),
            _ => Err(()),
        }
    }
}

/// An information bank and the fact kinds it stores.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Bank {
    pub id: BankId,
    pub kind: BankKind,
    pub name: String,
    pub contents: BTreeSet<FactId>,
}

/// An information link: an actor role with access to a bank.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct InfoLink {
    pub actor: ActorId,
    pub bank: BankId,
}

/// Kind of a process-structure relation between steps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PsdLinkKind {
    /// `from` spawns the target transaction (target step must be `rq`).
    Causal,
    /// `to` may only happen after `from` within one process instance.
    Wait,
}

impl fmt::Display for PsdLinkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PsdLinkKind::Causal => "causal",
            PsdLinkKind::Wait => "wait",
        })
    }
}

/// A process-structure relation between two steps.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct PsdLink {
    pub kind: PsdLinkKind,
    pub from: StepRef,
    pub to: StepRef,
}

/// One information-use entry: a fact consulted at a process step.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct IutEntry {
    pub fact: FactId,
    pub step: StepRef,
}

/// Duration, cost and daily frequency of one process step, reported under a
/// display label (several steps may share a label and are summed per label).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepMetrics {
    pub step: StepRef,
    /// Minutes per execution.
    pub duration: Decimal,
    /// Euro per execution.
    pub cost: Decimal,
    /// Executions per workday.
    pub daily_frequency: Decimal,
    pub label: String,
}

/// A complete enterprise-ontology model.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EnterpriseModel {
    pub name: String,
    pub actors: BTreeMap<ActorId, ActorRole>,
    pub facts: BTreeMap<FactId, FactKind>,
    pub transactions: BTreeMap<TransactionId, TransactionKind>,
    pub banks: BTreeMap<BankId, Bank>,
    pub info_links: BTreeSet<InfoLink>,
    pub psd_links: BTreeSet<PsdLink>,
    pub iut_entries: BTreeSet<IutEntry>,
    pub metrics: BTreeMap<StepRef, StepMetrics>,
}

impl EnterpriseModel {
    pub fn empty(name: impl Into<String>) -> EnterpriseModel {
        EnterpriseModel {
            name: name.into(),
            actors: BTreeMap::new(),
            facts: BTreeMap::new(),
            transactions: BTreeMap::new(),
            banks: BTreeMap::new(),
            info_links: BTreeSet::new(),
            psd_links: BTreeSet::new(),
            iut_entries: BTreeSet::new(),
            metrics: BTreeMap::new(),
        }
    }

    /// Causal links grouped as (source transaction, target transaction).
    pub fn causal_pairs(&self) -> impl Iterator<Item = (&TransactionId, &TransactionId)> {
        self.psd_links
            .iter()
            .filter(|l| l.kind == PsdLinkKind::Causal)
            .map(|l| (&l.from.transaction, &l.to.transaction))
    }

    /// Fact kinds consulted at any step of the given transaction.
    pub fn facts_used_by(&self, tx: &TransactionId) -> BTreeSet<&FactId> {
        self.iut_entries
            .iter()
            .filter(|e| &e.step.transaction == tx)
            .map(|e| &e.fact)
            .collect()
    }
}

/// Incremental construction of an [`EnterpriseModel`]. The builder performs
/// no checking; run [`validate_model`](crate::ontology::validate_model) (or
/// [`EnterpriseModel::validated`](crate::ontology::ModelExt)) on the result.
/// Re-adding an entity with an existing id replaces the previous one.
#[derive(Clone, Debug)]
pub struct ModelBuilder {
    model: EnterpriseModel,
}

impl ModelBuilder {
    pub fn new(name: impl Into<String>) -> ModelBuilder {
        ModelBuilder {
            model: EnterpriseModel::empty(name),
        }
    }

    pub fn actor(mut self, id: &str, name: &str, locus: Locus) -> Self {
        let id = ActorId::new(id);
        self.model.actors.insert(
            id.clone(),
            ActorRole {
                id,
                name: name.to_string(),
                locus,
            },
        );
        self
    }

    pub fn fact(mut self, id: &str, statement: &str) -> Self {
        let id = FactId::new(id);
        self.model.facts.insert(
            id.clone(),
            FactKind {
                id,
                statement: statement.to_string(),
            },
        );
        self
    }

    pub fn transaction(
        mut self,
        id: &str,
        name: &str,
        result: &str,
        executor: &str,
        initiators: &[&str],
    ) -> Self {
        let id = TransactionId::new(id);
        self.model.transactions.insert(
            id.clone(),
            TransactionKind {
                id,
                name: name.to_string(),
                result: FactId::new(result),
                executor: ActorId::new(executor),
                initiators: initiators.iter().map(|i| ActorId::new(i)).collect(),
            },
        );
        self
    }

    pub fn bank(mut self, id: &str, kind: BankKind, name: &str, contents: &[&str]) -> Self {
        let id = BankId::new(id);
        self.model.banks.insert(
            id.clone(),
            Bank {
                id,
                kind,
                name: name.to_string(),
                contents: contents.iter().map(|f| FactId::new(f)).collect(),
            },
        );
        self
    }

    pub fn access(mut self, actor: &str, bank: &str) -> Self {
        self.model.info_links.insert(InfoLink {
            actor: ActorId::new(actor),
            bank: BankId::new(bank),
        });
        self
    }

    pub fn link(mut self, kind: PsdLinkKind, from: StepRef, to: StepRef) -> Self {
        self.model.psd_links.insert(PsdLink { kind, from, to });
        self
    }

    pub fn uses(mut self, fact: &str, step: StepRef) -> Self {
        self.model.iut_entries.insert(IutEntry {
            fact: FactId::new(fact),
            step,
        });
        self
    }

    pub fn metrics(
        mut self,
        step: StepRef,
        duration: Decimal,
        cost: Decimal,
        daily_frequency: Decimal,
        label: &str,
    ) -> Self {
        self.model.metrics.insert(
            step.clone(),
            StepMetrics {
                step,
                duration,
                cost,
                daily_frequency,
                label: label.to_string(),
            },
        );
        self
    }

    pub fn build(self) -> EnterpriseModel {
        self.model
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identifiers_normalize_to_uppercase() {
        assert_eq!(TransactionId::new("b-t01"), TransactionId::new("B-T01"));
        assert_eq!(ActorId::new(" a01 ").as_str(), "A01");
    }

    #[test]
    fn step_kinds_parse_case_insensitively() {
        assert_eq!("RQ".parse::<StepKind>(), Ok(StepKind::Rq));
        assert_eq!("ex".parse::<StepKind>(), Ok(StepKind::Ex));
        assert!("xx".parse::<StepKind>().is_err());
    }

    #[test]
    fn step_refs_round_trip_their_display_form() {
        let step: StepRef = "b-t01/EX".parse().unwrap();
        assert_eq!(step.to_string(), "B-T01/ex");
        assert_eq!(step, StepRef::new("B-T01", StepKind::Ex));
        assert!("bare".parse::<StepRef>().is_err());
        assert!("/rq".parse::<StepRef>().is_err());
    }
}
