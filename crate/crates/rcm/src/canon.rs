//! Canonical serialization of requirements.
//!
//! The canonical form is a JSON document with a fixed key order (struct
//! declaration order), so `dump_canonical` is deterministic and
//! `load_canonical(dump_canonical(r))` is the identity on the object graph.
//! Loading enforces the schema and the structural invariants; violations are
//! reported with a path-addressed message.

use crate::model::Requirement;
use crate::validate::{validate_primitive, Severity};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CanonError {
    #[error("canonical form at line {line}, column {column}: {message}")]
    Schema {
        message: String,
        line: usize,
        column: usize,
    },
    #[error("invalid requirement at {path}: {message}")]
    Invalid { path: String, message: String },
}

/// Serializes a requirement to canonical JSON (deterministic, stable key
/// order).
pub fn dump_canonical(req: &Requirement) -> String {
    let mut out = serde_json::to_string_pretty(req).expect("requirement serializes");
    out.push('\n');
    out
}

/// Loads a requirement from canonical JSON and checks the structural
/// invariants the constructors would enforce.
pub fn load_canonical(text: &str) -> Result<Requirement, CanonError> {
    let req: Requirement = serde_json::from_str(text).map_err(|e| CanonError::Schema {
        message: e.to_string(),
        line: e.line(),
        column: e.column(),
    })?;
    if req.primitives.is_empty() {
        return Err(CanonError::Invalid {
            path: "primitives".to_string(),
            message: "a requirement needs at least one primitive requirement".to_string(),
        });
    }
    for (i, pr) in req.primitives.iter().enumerate() {
        let report = validate_primitive(pr);
        if let Some(issue) = report.issues.iter().find(|x| x.severity == Severity::Fail) {
            return Err(CanonError::Invalid {
                path: format!("primitives[{i}].{}", issue.path),
                message: issue.message.clone(),
            });
        }
    }
    Ok(req)
}
