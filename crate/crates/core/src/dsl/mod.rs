//! Textual model format: diagnostic-rich parser, canonical serializer and
//! model diffing. Files use the `.demo` extension, UTF-8, LF newlines
//! (CRLF accepted on input).

mod diff;
mod parser;
mod serializer;

pub use diff::{model_diff, DiffReport, EntityChange, EntityRef, FieldChange, MetricDelta};
pub use parser::{parse, DiagnosticKind, ParseDiagnostic, SourceSpan};
pub use serializer::serialize;
