//! Enterprise-ontology toolkit for process reengineering studies.
//!
//! The crate models an organization as actor roles, transaction kinds with
//! their result facts, information banks and a process structure; parses and
//! writes a line-oriented model format; analyzes inter-process connectivity
//! to expand a reengineering selection; and simulates current-state vs
//! redesigned-state scenarios to report daily time and cost reductions.

pub mod cli;
pub mod decimal;
pub mod dsl;
pub mod graph;
pub mod ontology;
pub mod report;
pub mod sim;

pub use decimal::Decimal;
pub use ontology::{EnterpriseModel, ModelExt, ValidatedModel};
