//! Requirement capturing, validation, temporal-logic compilation and
//! template coverage analysis for behavioral system requirements.
//!
//! A requirement is parsed from a structured DSL (or loaded from its
//! canonical JSON form) into a format-agnostic model of conditions,
//! triggers, actions and scopes. Predicates bind to formal semantics through
//! an extendable verb-frame database, and an indexed rule table compiles
//! every valid primitive requirement into MTL and CTL formulas, reporting
//! which properties the target logic could not express. A registry of
//! legacy template approaches supports corpus-level coverage analysis.
//!
//! All model values are immutable after construction and safe to share
//! between threads.

pub mod canon;
pub mod coverage;
pub mod frames;
pub mod model;
pub mod parser;
pub mod profile;
pub mod tl;
pub mod transform;
pub mod validate;

pub use model::{
    complete_predicate, CompareOp, Component, ComponentKind, ComponentTree, EndupKind,
    FormalSemantics, Operand, Predicate, PrimitiveRequirement, Requirement, Scope, TimeRelation,
    TimeSlot, TimeSpec, TreeRelation,
};
pub use profile::{property_profile, PropertyCode, PropertyProfile};
pub use validate::{validate_primitive, validate_requirement, ValidationReport, ValidationStatus};
