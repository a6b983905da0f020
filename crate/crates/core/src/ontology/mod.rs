//! Typed enterprise-ontology model with structural validation: actor roles,
//! fact kinds, transactions with their result facts, information banks,
//! process-structure links, information use and step metrics.

mod analysis;
mod model;
mod validate;

pub use analysis::{boundary, transaction_result_table, Boundary, TrtRow};
pub use model::{
    ActorId, ActorRole, Bank, BankId, BankKind, EnterpriseModel, FactId, FactKind, InfoLink,
    IutEntry, Locus, ModelBuilder, PsdLink, PsdLinkKind, StepKind, StepMetrics, StepRef,
    TransactionId, TransactionKind,
};
pub use validate::{
    validate_model, ModelExt, Severity, ValidatedModel, ValidationIssue, ValidationReport,
};
