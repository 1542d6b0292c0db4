//! Structural validation of primitive requirements.
//!
//! Violations are reported, not thrown: every check yields an issue with a
//! component path, and the report passes exactly when no Fail-severity issue
//! was produced.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{
    Component, ComponentKind, ComponentTree, Predicate, PrimitiveRequirement, Scope, TimeSlot,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ValidationStatus {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Severity {
    Fail,
    Note,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Issue {
    pub severity: Severity,
    pub code: String,
    pub message: String,
    /// Path of the offending component, e.g. `conditions.left.right`.
    pub path: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub status: ValidationStatus,
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.status == ValidationStatus::Pass
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.status {
            ValidationStatus::Pass => writeln!(f, "Pass")?,
            ValidationStatus::Fail => writeln!(f, "Fail")?,
        }
        for issue in &self.issues {
            let tag = match issue.severity {
                Severity::Fail => "fail",
                Severity::Note => "note",
            };
            writeln!(f, "  [{tag}] {} at {}: {}", issue.code, issue.path, issue.message)?;
        }
        Ok(())
    }
}

struct Checker {
    issues: Vec<Issue>,
}

impl Checker {
    fn fail(&mut self, code: &str, path: String, message: String) {
        self.issues.push(Issue {
            severity: Severity::Fail,
            code: code.to_string(),
            message,
            path,
        });
    }

    fn note(&mut self, code: &str, path: String, message: String) {
        self.issues.push(Issue {
            severity: Severity::Note,
            code: code.to_string(),
            message,
            path,
        });
    }

    fn check_tree(&mut self, tree: &ComponentTree, expected: ComponentKind, path: &str) {
        match tree {
            ComponentTree::Leaf(comp) => self.check_component(comp, expected, path),
            ComponentTree::Node { left, right, .. } => {
                self.check_tree(left, expected, &format!("{path}.left"));
                self.check_tree(right, expected, &format!("{path}.right"));
            }
        }
    }

    fn check_component(&mut self, comp: &Component, expected: ComponentKind, path: &str) {
        if comp.kind != expected {
            self.fail(
                "kind-mismatch",
                path.to_string(),
                format!(
                    "component kind {} does not match its tree position ({})",
                    comp.kind.label(),
                    expected.label()
                ),
            );
        }
        for slot in [TimeSlot::PreElapsed, TimeSlot::InBetween] {
            if comp.time(slot).is_some() && !slot.eligible_on(comp.kind) {
                self.fail(
                    &format!("ineligible-{}", slot.label()),
                    path.to_string(),
                    format!("{} ineligible on {}", slot.label(), comp.kind.label()),
                );
            }
        }
        self.check_predicate(&comp.core, &format!("{path}.core"));
    }

    fn check_predicate(&mut self, pred: &Predicate, path: &str) {
        if pred.operands.is_empty() {
            self.fail(
                "empty-predicate",
                path.to_string(),
                "predicate has no operands".to_string(),
            );
        }
        for (i, operand) in pred.operands.iter().enumerate() {
            if let Some(hidden) = &operand.hidden_constraint {
                self.check_predicate(hidden, &format!("{path}.operands[{i}].hidden"));
            }
        }
    }

    fn check_scope(&mut self, scope: &Scope, path: &str) {
        if scope.startup.is_none() && scope.endup.is_none() {
            self.fail(
                "empty-scope",
                path.to_string(),
                "scope needs a startup or an endup phase".to_string(),
            );
        }
        if let Some(c) = &scope.startup {
            self.check_component(c, ComponentKind::ScopeStartup, &format!("{path}.startup"));
        }
        if let Some(c) = &scope.endup {
            self.check_component(c, ComponentKind::ScopeEndup, &format!("{path}.endup"));
        }
    }
}

/// Validates a primitive requirement: at least one action leaf, sub-component
/// eligibility, and leaf kinds matching their tree. Action-only primitives
/// pass with a factual-rule note.
pub fn validate_primitive(pr: &PrimitiveRequirement) -> ValidationReport {
    let mut checker = Checker { issues: Vec::new() };

    if pr.actions.leaf_count() == 0 {
        // Unreachable with the tree type, kept for parity with the contract.
        checker.fail(
            "missing-action",
            "actions".to_string(),
            "missing mandatory action".to_string(),
        );
    }
    checker.check_tree(&pr.actions, ComponentKind::Action, "actions");
    if let Some(tree) = &pr.conditions {
        checker.check_tree(tree, ComponentKind::Condition, "conditions");
    }
    if let Some(tree) = &pr.triggers {
        checker.check_tree(tree, ComponentKind::Trigger, "triggers");
    }
    if let Some(scope) = &pr.pre_scope {
        checker.check_scope(scope, "pre_scope");
        if pr.conditions.is_none() && pr.triggers.is_none() {
            checker.fail(
                "dangling-pre-scope",
                "pre_scope".to_string(),
                "pre-conditional scope requires conditions or triggers".to_string(),
            );
        }
    }
    if let Some(scope) = &pr.action_scope {
        checker.check_scope(scope, "action_scope");
    }

    if pr.is_factual_rule() && checker.issues.iter().all(|i| i.severity != Severity::Fail) {
        checker.note(
            "factual-rule",
            "actions".to_string(),
            "primitive carries actions only: factual rule".to_string(),
        );
    }

    let status = if checker.issues.iter().any(|i| i.severity == Severity::Fail) {
        ValidationStatus::Fail
    } else {
        ValidationStatus::Pass
    };
    ValidationReport {
        status,
        issues: checker.issues,
    }
}

/// Validates a whole requirement: the primitive list must be non-empty, then
/// each primitive is validated on its own.
pub fn validate_requirement(req: &crate::model::Requirement) -> Vec<ValidationReport> {
    req.primitives.iter().map(validate_primitive).collect()
}
