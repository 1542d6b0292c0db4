//! Domain model for behavioral requirements.
//!
//! A [`Requirement`] holds one or more [`PrimitiveRequirement`]s, each of
//! which captures a single requirement sentence broken down into condition,
//! trigger, action and scope components. Components carry a core
//! [`Predicate`] plus optional time sub-components, and predicates
//! encapsulate both the semi-formal surface form and a bound
//! [`FormalSemantics`]. All values are immutable after construction and safe
//! to share across threads.

use serde::{Deserialize, Serialize};

/// A named requirement: one or more primitive requirements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Requirement {
    pub id: String,
    pub primitives: Vec<PrimitiveRequirement>,
}

impl Requirement {
    pub fn new(id: impl Into<String>, primitives: Vec<PrimitiveRequirement>) -> Self {
        Requirement {
            id: id.into(),
            primitives,
        }
    }
}

/// One requirement sentence. Actions are the only mandatory component; a
/// primitive carrying nothing but actions is a factual rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrimitiveRequirement {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conditions: Option<ComponentTree>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub triggers: Option<ComponentTree>,
    pub actions: ComponentTree,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pre_scope: Option<Scope>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action_scope: Option<Scope>,
}

impl PrimitiveRequirement {
    /// A primitive with actions only and nothing else.
    pub fn is_factual_rule(&self) -> bool {
        self.conditions.is_none()
            && self.triggers.is_none()
            && self.pre_scope.is_none()
            && self.action_scope.is_none()
    }
}

/// Context bounding either the preconditions (pre-conditional scope) or the
/// actions (action scope). At least one phase must be present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scope {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub startup: Option<Component>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub endup: Option<Component>,
    /// Distinguishes the two ending semantics; meaningful only when `endup`
    /// is present. `Until` mandates holding till the boundary, `Before` does
    /// not.
    #[serde(default)]
    pub endup_kind: EndupKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndupKind {
    #[default]
    Before,
    Until,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComponentKind {
    Condition,
    Trigger,
    Action,
    ScopeStartup,
    ScopeEndup,
}

impl ComponentKind {
    pub const ALL: [ComponentKind; 5] = [
        ComponentKind::Condition,
        ComponentKind::Trigger,
        ComponentKind::Action,
        ComponentKind::ScopeStartup,
        ComponentKind::ScopeEndup,
    ];

    pub fn label(self) -> &'static str {
        match self {
            ComponentKind::Condition => "condition",
            ComponentKind::Trigger => "trigger",
            ComponentKind::Action => "action",
            ComponentKind::ScopeStartup => "scope-startup",
            ComponentKind::ScopeEndup => "scope-endup",
        }
    }
}

/// The three time sub-component slots a component may carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeSlot {
    Valid,
    PreElapsed,
    InBetween,
}

impl TimeSlot {
    pub const ALL: [TimeSlot; 3] = [TimeSlot::Valid, TimeSlot::PreElapsed, TimeSlot::InBetween];

    /// Eligibility matrix: pre-elapsed-time only on conditions and actions,
    /// in-between-time only on triggers and actions, valid-time anywhere.
    pub fn eligible_on(self, kind: ComponentKind) -> bool {
        match self {
            TimeSlot::Valid => true,
            TimeSlot::PreElapsed => {
                matches!(kind, ComponentKind::Condition | ComponentKind::Action)
            }
            TimeSlot::InBetween => matches!(kind, ComponentKind::Trigger | ComponentKind::Action),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            TimeSlot::Valid => "valid-time",
            TimeSlot::PreElapsed => "pre-elapsed-time",
            TimeSlot::InBetween => "in-between-time",
        }
    }
}

/// One requirement component: a core predicate plus optional time
/// sub-components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Component {
    pub kind: ComponentKind,
    pub core: Predicate,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub valid_time: Option<TimeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pre_elapsed_time: Option<TimeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub in_between_time: Option<TimeSpec>,
}

impl Component {
    pub fn new(kind: ComponentKind, core: Predicate) -> Self {
        Component {
            kind,
            core,
            valid_time: None,
            pre_elapsed_time: None,
            in_between_time: None,
        }
    }

    pub fn time(&self, slot: TimeSlot) -> Option<&TimeSpec> {
        match slot {
            TimeSlot::Valid => self.valid_time.as_ref(),
            TimeSlot::PreElapsed => self.pre_elapsed_time.as_ref(),
            TimeSlot::InBetween => self.in_between_time.as_ref(),
        }
    }

    pub fn set_time(&mut self, slot: TimeSlot, spec: TimeSpec) {
        match slot {
            TimeSlot::Valid => self.valid_time = Some(spec),
            TimeSlot::PreElapsed => self.pre_elapsed_time = Some(spec),
            TimeSlot::InBetween => self.in_between_time = Some(spec),
        }
    }
}

/// Components of one type, stored as a binary tree whose inner nodes are
/// coordinating relations. N-ary coordination is expressed by nesting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComponentTree {
    Leaf(Box<Component>),
    Node {
        relation: TreeRelation,
        left: Box<ComponentTree>,
        right: Box<ComponentTree>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TreeRelation {
    And,
    Or,
}

impl ComponentTree {
    pub fn leaf(component: Component) -> Self {
        ComponentTree::Leaf(Box::new(component))
    }

    pub fn node(relation: TreeRelation, left: ComponentTree, right: ComponentTree) -> Self {
        ComponentTree::Node {
            relation,
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    pub fn leaves(&self) -> Vec<&Component> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a Component>) {
        match self {
            ComponentTree::Leaf(c) => out.push(c),
            ComponentTree::Node { left, right, .. } => {
                left.collect_leaves(out);
                right.collect_leaves(out);
            }
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            ComponentTree::Leaf(_) => 1,
            ComponentTree::Node { left, right, .. } => left.leaf_count() + right.leaf_count(),
        }
    }
}

/// Semi-formal predicate: operands, an operator and a negation flag, plus
/// the bound formal semantics once frame lookup has run. `artificial` marks
/// predicates extended by completeness correction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Predicate {
    pub operands: Vec<Operand>,
    /// Surface operator text (e.g. "is", "transitions to"). Empty until
    /// completeness correction for operand-only phrases.
    #[serde(default)]
    pub operator: String,
    #[serde(default)]
    pub negated: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub formal: Option<FormalSemantics>,
    #[serde(default)]
    pub artificial: bool,
}

impl Predicate {
    pub fn new(operands: Vec<Operand>, operator: impl Into<String>) -> Self {
        Predicate {
            operands,
            operator: operator.into(),
            negated: false,
            formal: None,
            artificial: false,
        }
    }

    /// Same predicate with the negation flag flipped.
    pub fn negate(&self) -> Self {
        let mut p = self.clone();
        p.negated = !p.negated;
        p
    }

    /// True when any operand carries a hidden constraint.
    pub fn has_hidden_constraint(&self) -> bool {
        self.operands.iter().any(|o| o.hidden_constraint.is_some())
    }
}

/// A predicate operand: surface text plus an optional hidden constraint,
/// itself a predicate that may nest further.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Operand {
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hidden_constraint: Option<Box<Predicate>>,
}

impl Operand {
    pub fn new(text: impl Into<String>) -> Self {
        Operand {
            text: text.into(),
            hidden_constraint: None,
        }
    }

    pub fn with_hidden(text: impl Into<String>, hidden: Predicate) -> Self {
        Operand {
            text: text.into(),
            hidden_constraint: Some(Box::new(hidden)),
        }
    }
}

/// Comparison operators used by formal semantics and time bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompareOp {
    Eq,
    Ne,
    Lt,
    Gt,
    Le,
    Ge,
}

impl CompareOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CompareOp::Eq => "=",
            CompareOp::Ne => "!=",
            CompareOp::Lt => "<",
            CompareOp::Gt => ">",
            CompareOp::Le => "<=",
            CompareOp::Ge => ">=",
        }
    }
}

/// Formal semantics of a predicate: exactly one of the three formats.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "format", rename_all = "snake_case")]
pub enum FormalSemantics {
    /// Function-like predicates, e.g. `send(the_monitor, the_station, REQ_Sig)`.
    Process { name: String, args: Vec<String> },
    /// Assignment, comparison and changing-state predicates, e.g. `X > Y`.
    RelationalPlain {
        lhs: String,
        op: CompareOp,
        rhs: String,
    },
    /// Relational with an aggregating function on the right-hand side,
    /// e.g. `the_fuel_level < min(Thr1, Thr2)`.
    RelationalAggregated {
        lhs: String,
        op: CompareOp,
        func: String,
        args: Vec<String>,
    },
}

impl FormalSemantics {
    pub fn is_relational(&self) -> bool {
        !matches!(self, FormalSemantics::Process { .. })
    }
}

/// Quantifying relation of a time phrase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeRelation {
    Exactly,
    AtMost,
    AtLeast,
    LessThan,
    GreaterThan,
}

impl TimeRelation {
    pub const ALL: [TimeRelation; 5] = [
        TimeRelation::Exactly,
        TimeRelation::AtMost,
        TimeRelation::AtLeast,
        TimeRelation::LessThan,
        TimeRelation::GreaterThan,
    ];
}

/// A time phrase: value, unit and quantifying relation. The formal
/// comparison operator is derived from the relation by a fixed total
/// mapping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpec {
    pub value: f64,
    pub unit: String,
    pub relation: TimeRelation,
}

impl TimeSpec {
    pub fn new(value: f64, unit: impl Into<String>, relation: TimeRelation) -> Self {
        TimeSpec {
            value,
            unit: unit.into(),
            relation,
        }
    }

    /// Fixed relation-to-operator mapping: Exactly→=, AtMost→≤, AtLeast→≥,
    /// LessThan→<, GreaterThan→>.
    pub fn formal_op(&self) -> CompareOp {
        match self.relation {
            TimeRelation::Exactly => CompareOp::Eq,
            TimeRelation::AtMost => CompareOp::Le,
            TimeRelation::AtLeast => CompareOp::Ge,
            TimeRelation::LessThan => CompareOp::Lt,
            TimeRelation::GreaterThan => CompareOp::Gt,
        }
    }
}

/// Error raised by [`complete_predicate`] on a predicate without operands.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("empty predicate: a predicate needs at least one operand")]
pub struct EmptyPredicate;

/// Completeness correction: an operand-only relational phrase (e.g. "sailing
/// termination") is extended with the artificial operator "equals" and the
/// artificial operand "true"; anything already carrying an operator or a
/// second operand is returned unchanged. Idempotent.
pub fn complete_predicate(p: &Predicate) -> Result<Predicate, EmptyPredicate> {
    if p.operands.is_empty() {
        return Err(EmptyPredicate);
    }
    if p.operator.is_empty() && p.operands.len() == 1 {
        let mut fixed = p.clone();
        fixed.operator = "equals".to_string();
        fixed.operands.push(Operand::new("true"));
        fixed.artificial = true;
        return Ok(fixed);
    }
    Ok(p.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn operand_only(text: &str) -> Predicate {
        Predicate::new(vec![Operand::new(text)], "")
    }

    #[test]
    fn completes_single_operand_with_artificial_equals_true() {
        let p = operand_only("sailing termination");
        let fixed = complete_predicate(&p).unwrap();
        assert_eq!(fixed.operator, "equals");
        assert_eq!(fixed.operands.len(), 2);
        assert_eq!(fixed.operands[1].text, "true");
        assert!(fixed.artificial);
    }

    #[test]
    fn leaves_two_operand_predicates_unchanged() {
        let p = Predicate::new(vec![Operand::new("X"), Operand::new("Y")], "exceeds");
        assert_eq!(complete_predicate(&p).unwrap(), p);
    }

    #[test]
    fn preserves_aggregated_format_on_complete_operands() {
        let mut p = Predicate::new(
            vec![Operand::new("the_fuel_level"), Operand::new("min(Thr1, Thr2)")],
            "is below",
        );
        p.formal = Some(FormalSemantics::RelationalAggregated {
            lhs: "the_fuel_level".into(),
            op: CompareOp::Lt,
            func: "min".into(),
            args: vec!["Thr1".into(), "Thr2".into()],
        });
        let out = complete_predicate(&p).unwrap();
        assert_eq!(out, p);
        assert!(matches!(
            out.formal,
            Some(FormalSemantics::RelationalAggregated { .. })
        ));
    }

    #[test]
    fn empty_predicate_errors() {
        let p = Predicate::new(vec![], "");
        assert_eq!(complete_predicate(&p), Err(EmptyPredicate));
    }

    #[test]
    fn complete_predicate_is_idempotent() {
        let p = operand_only("sailing termination");
        let once = complete_predicate(&p).unwrap();
        let twice = complete_predicate(&once).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn time_relation_maps_to_fixed_operator() {
        let cases = [
            (TimeRelation::Exactly, CompareOp::Eq),
            (TimeRelation::AtMost, CompareOp::Le),
            (TimeRelation::AtLeast, CompareOp::Ge),
            (TimeRelation::LessThan, CompareOp::Lt),
            (TimeRelation::GreaterThan, CompareOp::Gt),
        ];
        for (rel, op) in cases {
            assert_eq!(TimeSpec::new(2.0, "seconds", rel).formal_op(), op);
        }
    }

    #[test]
    fn model_values_are_send_and_sync() {
        fn check<T: Send + Sync>() {}
        check::<Requirement>();
        check::<PrimitiveRequirement>();
        check::<Predicate>();
        check::<TimeSpec>();
    }

    #[test]
    fn eligibility_matrix() {
        use ComponentKind::*;
        for kind in ComponentKind::ALL {
            assert!(TimeSlot::Valid.eligible_on(kind));
            assert_eq!(
                TimeSlot::PreElapsed.eligible_on(kind),
                matches!(kind, Condition | Action)
            );
            assert_eq!(
                TimeSlot::InBetween.eligible_on(kind),
                matches!(kind, Trigger | Action)
            );
        }
    }
}
