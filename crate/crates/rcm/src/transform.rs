//! Compilation of primitive requirements into MTL and CTL formulas.
//!
//! The pipeline prepares each component (formal semantics plus time
//! attachment), aggregates coordination trees, combines preconditions,
//! applies scopes to each side and finally joins the sides with an
//! implication. Constructs a target cannot express never abort the
//! transformation: the best partial formula is emitted together with a
//! machine-readable list of dropped properties.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{
    Component, ComponentTree, EndupKind, FormalSemantics, Predicate, PrimitiveRequirement, Scope,
    TimeRelation, TimeSlot, TimeSpec,
};
use crate::profile::{property_profile, PropertyCode};
use crate::tl::{TLFormula, TimeBound};
use crate::validate::{validate_primitive, ValidationReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Target {
    Mtl,
    Ctl,
}

impl Target {
    pub fn label(self) -> &'static str {
        match self {
            Target::Mtl => "MTL",
            Target::Ctl => "CTL",
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Completeness {
    Full,
    Partial,
}

/// A property the target logic could not express, with the mapping rule that
/// would have applied and the reason for dropping it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DroppedProperty {
    pub property: PropertyCode,
    pub rule: u8,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransformResult {
    pub formula: TLFormula,
    pub target: Target,
    pub completeness: Completeness,
    pub dropped: Vec<DroppedProperty>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct TransformOptions {
    /// Wrap factual rules (action-only primitives) in G / AG instead of
    /// emitting the bare action formula.
    pub wrap_factual: bool,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TransformError {
    #[error("primitive requirement failed validation")]
    InvalidPrimitive { report: ValidationReport },
    #[error("predicate is not frame-bound at {path}")]
    UnboundPredicate { path: String },
    #[error("missing prepared formula for a tree leaf")]
    MissingPrepared,
}

/// One row of the mapping rule table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rule {
    pub index: u8,
    pub version: &'static str,
    pub applicable_on: &'static str,
    pub has_mtl: bool,
    pub has_ctl: bool,
}

/// The indexed mapping rules 1–25. Rows 2–4 combine preconditions, 5–9 apply
/// scopes, 10–14 pre-elapsed-time, 15–19 valid-time, 20–24 in-between-time,
/// 25 hidden constraints. Rows 10–24 have no CTL template and row 25 no MTL
/// template.
pub const RULE_TABLE: [Rule; 25] = [
    Rule { index: 1, version: "A: do something", applicable_on: "", has_mtl: true, has_ctl: true },
    Rule { index: 2, version: "If S", applicable_on: "action", has_mtl: true, has_ctl: true },
    Rule { index: 3, version: "When S", applicable_on: "action", has_mtl: true, has_ctl: true },
    Rule { index: 4, version: "When S, If Q", applicable_on: "action", has_mtl: true, has_ctl: true },
    Rule { index: 5, version: "After S", applicable_on: "precondition/action", has_mtl: true, has_ctl: true },
    Rule { index: 6, version: "Before S", applicable_on: "precondition/action", has_mtl: true, has_ctl: true },
    Rule { index: 7, version: "Until S", applicable_on: "precondition/action", has_mtl: true, has_ctl: true },
    Rule { index: 8, version: "After Q & Before S", applicable_on: "precondition/action", has_mtl: true, has_ctl: true },
    Rule { index: 9, version: "After Q Until S / While Z", applicable_on: "precondition/action", has_mtl: true, has_ctl: true },
    Rule { index: 10, version: "after c time", applicable_on: "condition/action", has_mtl: true, has_ctl: false },
    Rule { index: 11, version: "after at-most c time", applicable_on: "condition/action", has_mtl: true, has_ctl: false },
    Rule { index: 12, version: "after at-least c time", applicable_on: "condition/action", has_mtl: true, has_ctl: false },
    Rule { index: 13, version: "after less-than c time", applicable_on: "condition/action", has_mtl: true, has_ctl: false },
    Rule { index: 14, version: "after greater-than c time", applicable_on: "condition/action", has_mtl: true, has_ctl: false },
    Rule { index: 15, version: "for c time", applicable_on: "condition/trigger/action", has_mtl: true, has_ctl: false },
    Rule { index: 16, version: "for at-most c time", applicable_on: "condition/trigger/action", has_mtl: true, has_ctl: false },
    Rule { index: 17, version: "for at-least c time", applicable_on: "condition/trigger/action", has_mtl: true, has_ctl: false },
    Rule { index: 18, version: "for less-than c time", applicable_on: "condition/trigger/action", has_mtl: true, has_ctl: false },
    Rule { index: 19, version: "for greater-than c time", applicable_on: "condition/trigger/action", has_mtl: true, has_ctl: false },
    Rule { index: 20, version: "every c time", applicable_on: "action/trigger", has_mtl: true, has_ctl: false },
    Rule { index: 21, version: "every at-most c time", applicable_on: "action/trigger", has_mtl: true, has_ctl: false },
    Rule { index: 22, version: "every at-least c time", applicable_on: "action/trigger", has_mtl: true, has_ctl: false },
    Rule { index: 23, version: "every less-than c time", applicable_on: "action/trigger", has_mtl: true, has_ctl: false },
    Rule { index: 24, version: "every greater-than c time", applicable_on: "action/trigger", has_mtl: true, has_ctl: false },
    Rule { index: 25, version: "Whose S", applicable_on: "any component", has_mtl: false, has_ctl: true },
];

fn relation_offset(rel: TimeRelation) -> u8 {
    match rel {
        TimeRelation::Exactly => 0,
        TimeRelation::AtMost => 1,
        TimeRelation::AtLeast => 2,
        TimeRelation::LessThan => 3,
        TimeRelation::GreaterThan => 4,
    }
}

/// Rule index for a time slot and quantifying relation (rows 10–24).
pub fn time_rule_index(slot: TimeSlot, rel: TimeRelation) -> u8 {
    let base = match slot {
        TimeSlot::PreElapsed => 10,
        TimeSlot::Valid => 15,
        TimeSlot::InBetween => 20,
    };
    base + relation_offset(rel)
}

/// Rule index for a scope shape (rows 5–9).
pub fn scope_rule_index(scope: &Scope) -> u8 {
    match (&scope.startup, &scope.endup, scope.endup_kind) {
        (Some(_), None, _) => 5,
        (None, Some(_), EndupKind::Before) => 6,
        (None, Some(_), EndupKind::Until) => 7,
        (Some(_), Some(_), EndupKind::Before) => 8,
        (Some(_), Some(_), EndupKind::Until) => 9,
        (None, None, _) => 5,
    }
}

/// Attaches one time sub-component to a prepared formula: pre-elapsed-time
/// maps to a bounded F (rows 10–14), valid-time to a bounded G (rows 15–19),
/// in-between-time to G of a bounded F (rows 20–24).
pub fn attach_time_semantics(base: TLFormula, t: &TimeSpec, slot: TimeSlot) -> TLFormula {
    let bound = TimeBound::new(t.formal_op(), t.value, t.unit.clone());
    match slot {
        TimeSlot::Valid => TLFormula::globally(base, Some(bound)),
        TimeSlot::PreElapsed => TLFormula::finally(base, Some(bound)),
        TimeSlot::InBetween => {
            TLFormula::globally(TLFormula::finally(base, Some(bound)), None)
        }
    }
}

/// Aggregates a coordination tree over prepared leaf formulas (in leaf
/// order). The output structure mirrors the tree exactly.
pub fn aggregate_tree(
    tree: &ComponentTree,
    prepared: &[TLFormula],
) -> Result<TLFormula, TransformError> {
    let mut cursor = 0usize;
    let formula = aggregate_rec(tree, prepared, &mut cursor)?;
    Ok(formula)
}

fn aggregate_rec(
    tree: &ComponentTree,
    prepared: &[TLFormula],
    cursor: &mut usize,
) -> Result<TLFormula, TransformError> {
    match tree {
        ComponentTree::Leaf(_) => {
            let formula = prepared
                .get(*cursor)
                .cloned()
                .ok_or(TransformError::MissingPrepared)?;
            *cursor += 1;
            Ok(formula)
        }
        ComponentTree::Node { relation, left, right } => {
            let l = aggregate_rec(left, prepared, cursor)?;
            let r = aggregate_rec(right, prepared, cursor)?;
            Ok(match relation {
                crate::model::TreeRelation::And => TLFormula::and(l, r),
                crate::model::TreeRelation::Or => TLFormula::or(l, r),
            })
        }
    }
}

/// Combines aggregated trigger and condition formulas into the precondition
/// antecedent: conditions alone (row 2), triggers alone (row 3), or their
/// conjunction, triggers first (row 4).
pub fn prepare_preconditions(
    triggers: Option<TLFormula>,
    conditions: Option<TLFormula>,
) -> Option<TLFormula> {
    match (triggers, conditions) {
        (None, Some(c)) => Some(c),
        (Some(t), None) => Some(t),
        (Some(t), Some(c)) => Some(TLFormula::and(t, c)),
        (None, None) => None,
    }
}

/// Applies a prepared scope to one side of the formula (rows 5–9).
pub fn apply_scope(
    side: TLFormula,
    startup: Option<TLFormula>,
    endup: Option<(TLFormula, EndupKind)>,
    target: Target,
) -> TLFormula {
    match (startup, endup) {
        (None, None) => side,
        (Some(s), None) => scope_startup(s, side, target),
        (None, Some((s, EndupKind::Before))) => scope_before(s, side, target),
        (None, Some((s, EndupKind::Until))) => scope_until(s, side, target),
        (Some(q), Some((s, EndupKind::Before))) => scope_after_before(q, s, side, target),
        (Some(q), Some((s, EndupKind::Until))) => scope_after_until(q, s, side, target),
    }
}

/// Row 5, "After S": G(S ⟹ F(P)) / AG(S ⟹ AG(AF(P))).
fn scope_startup(s: TLFormula, side: TLFormula, target: Target) -> TLFormula {
    match target {
        Target::Mtl => TLFormula::globally(
            TLFormula::implies(s, TLFormula::finally(side, None)),
            None,
        ),
        Target::Ctl => TLFormula::ag(TLFormula::implies(s, TLFormula::ag(TLFormula::af(side)))),
    }
}

/// Row 6, "Before S": F(S) ⟹ (F(P ∨ S) U S) /
/// A[((AF(P ∨ S)) ∨ AG(¬S)) W S].
fn scope_before(s: TLFormula, side: TLFormula, target: Target) -> TLFormula {
    match target {
        Target::Mtl => TLFormula::implies(
            TLFormula::finally(s.clone(), None),
            TLFormula::until(
                TLFormula::finally(TLFormula::or(side, s.clone()), None),
                s,
            ),
        ),
        Target::Ctl => TLFormula::all_paths(TLFormula::weak_until(
            TLFormula::or(
                TLFormula::af(TLFormula::or(side, s.clone())),
                TLFormula::ag(TLFormula::not(s.clone())),
            ),
            s,
        )),
    }
}

/// Row 7, "Until S": F(P) U S / AF(P) U S.
fn scope_until(s: TLFormula, side: TLFormula, target: Target) -> TLFormula {
    match target {
        Target::Mtl => TLFormula::until(TLFormula::finally(side, None), s),
        Target::Ctl => TLFormula::until(TLFormula::af(side), s),
    }
}

/// Row 8, "After Q & Before S": G((Q ∧ ¬S ∧ F(S)) ⟹ (F(P ∨ S) U S)) /
/// AG((Q ∧ ¬S) ⟹ A[(AF(P ∨ S) ∨ AG(¬S)) W S]).
fn scope_after_before(q: TLFormula, s: TLFormula, side: TLFormula, target: Target) -> TLFormula {
    match target {
        Target::Mtl => TLFormula::globally(
            TLFormula::implies(
                TLFormula::and(
                    TLFormula::and(q, TLFormula::not(s.clone())),
                    TLFormula::finally(s.clone(), None),
                ),
                TLFormula::until(
                    TLFormula::finally(TLFormula::or(side, s.clone()), None),
                    s,
                ),
            ),
            None,
        ),
        Target::Ctl => TLFormula::ag(TLFormula::implies(
            TLFormula::and(q, TLFormula::not(s.clone())),
            TLFormula::all_paths(TLFormula::weak_until(
                TLFormula::or(
                    TLFormula::af(TLFormula::or(side, s.clone())),
                    TLFormula::ag(TLFormula::not(s.clone())),
                ),
                s,
            )),
        )),
    }
}

/// Row 9, "After Q Until S" (and the While normalisation):
/// G((Q ∧ ¬S) ⟹ F(P U S)) / AG((Q ∧ ¬S) ⟹ A[AF(P ∨ S) W S]).
fn scope_after_until(q: TLFormula, s: TLFormula, side: TLFormula, target: Target) -> TLFormula {
    match target {
        Target::Mtl => TLFormula::globally(
            TLFormula::implies(
                TLFormula::and(q, TLFormula::not(s.clone())),
                TLFormula::finally(TLFormula::until(side, s), None),
            ),
            None,
        ),
        Target::Ctl => TLFormula::ag(TLFormula::implies(
            TLFormula::and(q, TLFormula::not(s.clone())),
            TLFormula::all_paths(TLFormula::weak_until(
                TLFormula::af(TLFormula::or(side, s.clone())),
                s,
            )),
        )),
    }
}

/// Instantiates one mapping rule with atomic semantics for S, Q and P. Time
/// rows use c = 1. Returns `None` where the table has no template for the
/// target.
pub fn instantiate_rule(
    index: u8,
    target: Target,
    p: &FormalSemantics,
    s: &FormalSemantics,
    q: &FormalSemantics,
) -> Option<TLFormula> {
    let atom = |sem: &FormalSemantics| TLFormula::atom(sem.clone());
    let p_f = atom(p);
    let s_f = atom(s);
    let q_f = atom(q);
    let rel_for = |offset: u8| TimeRelation::ALL[offset as usize];
    let timespec = |rel: TimeRelation| TimeSpec::new(1.0, "s", rel);

    let formula = match index {
        1 => p_f,
        2 => wrap_precondition(TLFormula::implies(s_f, p_f), target),
        3 => wrap_precondition(TLFormula::implies(s_f, p_f), target),
        4 => wrap_precondition(TLFormula::implies(TLFormula::and(s_f, q_f), p_f), target),
        5 => scope_startup(s_f, p_f, target),
        6 => scope_before(s_f, p_f, target),
        7 => scope_until(s_f, p_f, target),
        8 => scope_after_before(q_f, s_f, p_f, target),
        9 => scope_after_until(q_f, s_f, p_f, target),
        10..=14 if target == Target::Mtl => {
            attach_time_semantics(p_f, &timespec(rel_for(index - 10)), TimeSlot::PreElapsed)
        }
        15..=19 if target == Target::Mtl => {
            attach_time_semantics(p_f, &timespec(rel_for(index - 15)), TimeSlot::Valid)
        }
        20..=24 if target == Target::Mtl => {
            attach_time_semantics(p_f, &timespec(rel_for(index - 20)), TimeSlot::InBetween)
        }
        25 if target == Target::Ctl => {
            TLFormula::ag(TLFormula::exists_constraint(s.clone(), p_f))
        }
        _ => return None,
    };
    Some(formula)
}

/// Rows 2–4 wrap the implication in the outer temporal modality.
fn wrap_precondition(implication: TLFormula, target: Target) -> TLFormula {
    match target {
        Target::Mtl => TLFormula::globally(implication, None),
        Target::Ctl => TLFormula::ag(implication),
    }
}

/// Prepared startup and endup formulas of one scope.
type PreparedScope = (Option<TLFormula>, Option<(TLFormula, EndupKind)>);

struct Prep {
    target: Target,
    dropped: Vec<DroppedProperty>,
}

impl Prep {
    fn drop_property(&mut self, property: PropertyCode, rule: u8, reason: &str) {
        let entry = DroppedProperty {
            property,
            rule,
            reason: reason.to_string(),
        };
        if !self.dropped.contains(&entry) {
            self.dropped.push(entry);
        }
    }

    /// Step 1 for one component: atom from the bound formal semantics,
    /// hidden-constraint handling, then time attachment (valid-time
    /// innermost, then pre-elapsed, then in-between).
    fn prepare_component(
        &mut self,
        comp: &Component,
        scope_is_action: bool,
        path: &str,
    ) -> Result<TLFormula, TransformError> {
        let formal = comp
            .core
            .formal
            .clone()
            .ok_or_else(|| TransformError::UnboundPredicate {
                path: path.to_string(),
            })?;

        let mut formula = match self.target {
            Target::Mtl => {
                if comp.core.has_hidden_constraint() {
                    self.drop_property(
                        PropertyCode::Hidden,
                        25,
                        "hidden constraint needs a branching structure",
                    );
                }
                TLFormula::Atom {
                    semantics: formal,
                    negated: comp.core.negated,
                }
            }
            Target::Ctl => {
                let (semantics, chain) = hidden_semantics(&comp.core, &formal, path)?;
                let mut atom = TLFormula::Atom {
                    semantics,
                    negated: comp.core.negated,
                };
                for bound in chain.into_iter().rev() {
                    atom = TLFormula::exists_constraint(bound, atom);
                }
                atom
            }
        };

        for slot in [TimeSlot::Valid, TimeSlot::PreElapsed, TimeSlot::InBetween] {
            if let Some(t) = comp.time(slot) {
                let rule = time_rule_index(slot, t.relation);
                match self.target {
                    Target::Mtl => formula = attach_time_semantics(formula, t, slot),
                    Target::Ctl => {
                        let code = PropertyCode::time(comp.kind, scope_is_action, slot)
                            .unwrap_or(PropertyCode::Hidden);
                        self.drop_property(code, rule, "time bound not expressible in CTL");
                    }
                }
            }
        }
        Ok(formula)
    }

    fn prepare_tree(
        &mut self,
        tree: &ComponentTree,
        path: &str,
    ) -> Result<TLFormula, TransformError> {
        let leaves = tree.leaves();
        let mut prepared = Vec::with_capacity(leaves.len());
        for (i, leaf) in leaves.iter().enumerate() {
            prepared.push(self.prepare_component(leaf, false, &format!("{path}[{i}]"))?);
        }
        aggregate_tree(tree, &prepared)
    }

    fn prepare_scope(
        &mut self,
        scope: Option<&Scope>,
        scope_is_action: bool,
        path: &str,
    ) -> Result<PreparedScope, TransformError> {
        let Some(scope) = scope else {
            return Ok((None, None));
        };
        let startup = scope
            .startup
            .as_ref()
            .map(|c| self.prepare_component(c, scope_is_action, &format!("{path}.startup")))
            .transpose()?;
        let endup = scope
            .endup
            .as_ref()
            .map(|c| {
                self.prepare_component(c, scope_is_action, &format!("{path}.endup"))
                    .map(|f| (f, scope.endup_kind))
            })
            .transpose()?;
        Ok((startup, endup))
    }
}

/// Collects hidden-constraint semantics for the branching target. Returns
/// the host semantics with each constrained operand's term replaced by the
/// constraint subject, plus the existential chain (deepest constraint
/// first).
fn hidden_semantics(
    pred: &Predicate,
    formal: &FormalSemantics,
    path: &str,
) -> Result<(FormalSemantics, Vec<FormalSemantics>), TransformError> {
    let mut chain = Vec::new();
    let mut semantics = formal.clone();
    for operand in &pred.operands {
        if let Some(hidden) = &operand.hidden_constraint {
            let hidden_formal =
                hidden
                    .formal
                    .clone()
                    .ok_or_else(|| TransformError::UnboundPredicate {
                        path: format!("{path}.hidden"),
                    })?;
            let (hidden_sem, nested) = hidden_semantics(hidden, &hidden_formal, path)?;
            chain.extend(nested);
            let subject = hidden
                .operands
                .first()
                .map(|o| o.text.clone())
                .unwrap_or_default();
            semantics = replace_term(&semantics, &operand.text, &subject);
            chain.push(hidden_sem);
        }
    }
    Ok((semantics, chain))
}

fn replace_term(sem: &FormalSemantics, from: &str, to: &str) -> FormalSemantics {
    let swap = |s: &String| if s == from { to.to_string() } else { s.clone() };
    match sem {
        FormalSemantics::Process { name, args } => FormalSemantics::Process {
            name: name.clone(),
            args: args.iter().map(swap).collect(),
        },
        FormalSemantics::RelationalPlain { lhs, op, rhs } => FormalSemantics::RelationalPlain {
            lhs: swap(lhs),
            op: *op,
            rhs: swap(rhs),
        },
        FormalSemantics::RelationalAggregated { lhs, op, func, args } => {
            FormalSemantics::RelationalAggregated {
                lhs: swap(lhs),
                op: *op,
                func: func.clone(),
                args: args.iter().map(swap).collect(),
            }
        }
    }
}

/// Transforms a validated, frame-bound primitive requirement into a formula
/// for the given target.
pub fn transform(pr: &PrimitiveRequirement, target: Target) -> Result<TransformResult, TransformError> {
    transform_with(pr, target, TransformOptions::default())
}

pub fn transform_with(
    pr: &PrimitiveRequirement,
    target: Target,
    opts: TransformOptions,
) -> Result<TransformResult, TransformError> {
    let report = validate_primitive(pr);
    if !report.passed() {
        return Err(TransformError::InvalidPrimitive { report });
    }

    let mut prep = Prep {
        target,
        dropped: Vec::new(),
    };

    // Steps 1–2: prepare components and aggregate each coordination tree.
    let conditions = pr
        .conditions
        .as_ref()
        .map(|t| prep.prepare_tree(t, "conditions"))
        .transpose()?;
    let triggers = pr
        .triggers
        .as_ref()
        .map(|t| prep.prepare_tree(t, "triggers"))
        .transpose()?;
    let actions = prep.prepare_tree(&pr.actions, "actions")?;

    // Step 3: combine preconditions (rows 2–4).
    let preconditions = prepare_preconditions(triggers, conditions);

    // Step 4: apply each scope to its own side (rows 5–9).
    let (pre_startup, pre_endup) = prep.prepare_scope(pr.pre_scope.as_ref(), false, "pre_scope")?;
    let (act_startup, act_endup) =
        prep.prepare_scope(pr.action_scope.as_ref(), true, "action_scope")?;

    let lhs = preconditions.map(|p| apply_scope(p, pre_startup, pre_endup, target));
    let rhs = apply_scope(actions, act_startup, act_endup, target);

    // Step 5: join the sides; preconditions add the outer modality of rows
    // 2–4.
    let mut formula = match lhs {
        Some(lhs) => wrap_precondition(TLFormula::implies(lhs, rhs), target),
        None => rhs,
    };

    // Row 25: hidden constraints carry their own outer AG; the linear target
    // keeps the plain G remnant around what it can express.
    let has_hidden = property_profile(pr).contains(PropertyCode::Hidden);
    if has_hidden && !is_wrapped(&formula, target) {
        formula = wrap_precondition(formula, target);
    }

    if opts.wrap_factual && pr.is_factual_rule() && !is_wrapped(&formula, target) {
        formula = wrap_precondition(formula, target);
    }

    let completeness = if prep.dropped.is_empty() {
        Completeness::Full
    } else {
        Completeness::Partial
    };
    Ok(TransformResult {
        formula,
        target,
        completeness,
        dropped: prep.dropped,
    })
}

fn is_wrapped(f: &TLFormula, target: Target) -> bool {
    match target {
        Target::Mtl => f.is_globally_wrapped(),
        Target::Ctl => f.is_ag_wrapped(),
    }
}

/// Per instantiated property: whether the target logic expresses it and the
/// mapping rule that applies.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyCapability {
    pub property: PropertyCode,
    pub supported: bool,
    pub rule: u8,
}

/// Reports, per property instantiated by the primitive, whether the target
/// can represent it: MTL supports everything except hidden constraints, CTL
/// everything except the time rows.
pub fn capability_report(pr: &PrimitiveRequirement, target: Target) -> Vec<PropertyCapability> {
    let profile = property_profile(pr);
    profile
        .iter()
        .map(|property| {
            let supported = match target {
                Target::Mtl => property != PropertyCode::Hidden,
                Target::Ctl => !property.is_time_suffixed(),
            };
            PropertyCapability {
                property,
                supported,
                rule: rule_for_property(pr, property),
            }
        })
        .collect()
}

fn rule_for_property(pr: &PrimitiveRequirement, property: PropertyCode) -> u8 {
    let both_preconditions = pr.conditions.is_some() && pr.triggers.is_some();
    let first_time = |kinds: &[crate::model::ComponentKind], slot: TimeSlot| -> u8 {
        for comp in all_components(pr) {
            if kinds.contains(&comp.kind) {
                if let Some(t) = comp.time(slot) {
                    return time_rule_index(slot, t.relation);
                }
            }
        }
        time_rule_index(slot, TimeRelation::Exactly)
    };
    use crate::model::ComponentKind as K;
    match property {
        PropertyCode::A => 1,
        PropertyCode::C => {
            if both_preconditions {
                4
            } else {
                2
            }
        }
        PropertyCode::T => {
            if both_preconditions {
                4
            } else {
                3
            }
        }
        PropertyCode::Sp | PropertyCode::Ep => {
            pr.pre_scope.as_ref().map(scope_rule_index).unwrap_or(5)
        }
        PropertyCode::Sa | PropertyCode::Ea => {
            pr.action_scope.as_ref().map(scope_rule_index).unwrap_or(5)
        }
        PropertyCode::AVt => first_time(&[K::Action], TimeSlot::Valid),
        PropertyCode::APt => first_time(&[K::Action], TimeSlot::PreElapsed),
        PropertyCode::ART => first_time(&[K::Action], TimeSlot::InBetween),
        PropertyCode::CVt => first_time(&[K::Condition], TimeSlot::Valid),
        PropertyCode::CPt => first_time(&[K::Condition], TimeSlot::PreElapsed),
        PropertyCode::TVt => first_time(&[K::Trigger], TimeSlot::Valid),
        PropertyCode::TRt => first_time(&[K::Trigger], TimeSlot::InBetween),
        PropertyCode::SpVt | PropertyCode::EpVt | PropertyCode::SaVt | PropertyCode::EaVt => {
            first_time(&[K::ScopeStartup, K::ScopeEndup], TimeSlot::Valid)
        }
        PropertyCode::Hidden => 25,
    }
}

fn all_components(pr: &PrimitiveRequirement) -> Vec<&Component> {
    let mut out = Vec::new();
    if let Some(t) = &pr.conditions {
        out.extend(t.leaves());
    }
    if let Some(t) = &pr.triggers {
        out.extend(t.leaves());
    }
    out.extend(pr.actions.leaves());
    for scope in [&pr.pre_scope, &pr.action_scope].into_iter().flatten() {
        if let Some(c) = &scope.startup {
            out.push(c);
        }
        if let Some(c) = &scope.endup {
            out.push(c);
        }
    }
    out
}
