//! Temporal-logic formula AST shared by the MTL and CTL targets, with
//! per-target validity checks and deterministic renderers.
//!
//! Rendering is ASCII-first (`->`, `&`, `|`, `!`, `U`, `W`, bounds like
//! `G[t<=2]`); the existential glyph `∃` is the only non-ASCII output and an
//! ASCII fallback (`exists`) is available. No simplification is ever applied:
//! the output mirrors the formula structure verbatim.
//!
//! Parenthesisation rules, applied uniformly:
//! - operands of a binary connective are parenthesised unless they are
//!   self-delimiting (`G`/`F`/quantifier applications and negations);
//! - `G`/`F` bodies are delimited by the operator's own parentheses;
//! - at the top level, `And`/`Or`/`Until`/`WeakUntil` keep explicit outer
//!   parentheses (coordination trees stay visibly grouped), while atoms,
//!   implications and temporal applications print bare.

use std::fmt;

use crate::model::{CompareOp, FormalSemantics};

/// Time bound attached to a temporal operator, e.g. `[t<=3]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeBound {
    pub op: CompareOp,
    pub value: f64,
    pub unit: String,
}

impl TimeBound {
    pub fn new(op: CompareOp, value: f64, unit: impl Into<String>) -> Self {
        TimeBound {
            op,
            value,
            unit: unit.into(),
        }
    }
}

impl fmt::Display for TimeBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t{}{}", self.op.symbol(), format_number(self.value))
    }
}

/// Temporal-logic formula. MTL-valid formulas contain no path quantifiers,
/// weak-until or existential-constraint nodes; CTL-valid formulas contain no
/// time bounds and keep temporal operators beneath path quantifiers.
#[derive(Debug, Clone, PartialEq)]
pub enum TLFormula {
    Atom {
        semantics: FormalSemantics,
        negated: bool,
    },
    Not(Box<TLFormula>),
    And(Box<TLFormula>, Box<TLFormula>),
    Or(Box<TLFormula>, Box<TLFormula>),
    Implies(Box<TLFormula>, Box<TLFormula>),
    /// G — always / globally, with an optional time bound.
    Globally {
        body: Box<TLFormula>,
        bound: Option<TimeBound>,
    },
    /// F — eventually / finally, with an optional time bound.
    Finally {
        body: Box<TLFormula>,
        bound: Option<TimeBound>,
    },
    Until(Box<TLFormula>, Box<TLFormula>),
    WeakUntil(Box<TLFormula>, Box<TLFormula>),
    /// A — along all paths.
    AllPaths(Box<TLFormula>),
    /// E — along at least one path.
    ExistsPath(Box<TLFormula>),
    /// `∃S ⟹ P`: an existential constraint guarding a formula, used for
    /// hidden constraints in the branching target.
    ExistsConstraint {
        bound: FormalSemantics,
        body: Box<TLFormula>,
    },
}

impl TLFormula {
    pub fn atom(semantics: FormalSemantics) -> Self {
        TLFormula::Atom {
            semantics,
            negated: false,
        }
    }

    pub fn negated_atom(semantics: FormalSemantics) -> Self {
        TLFormula::Atom {
            semantics,
            negated: true,
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: TLFormula) -> Self {
        TLFormula::Not(Box::new(f))
    }

    pub fn and(l: TLFormula, r: TLFormula) -> Self {
        TLFormula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: TLFormula, r: TLFormula) -> Self {
        TLFormula::Or(Box::new(l), Box::new(r))
    }

    pub fn implies(l: TLFormula, r: TLFormula) -> Self {
        TLFormula::Implies(Box::new(l), Box::new(r))
    }

    pub fn globally(body: TLFormula, bound: Option<TimeBound>) -> Self {
        TLFormula::Globally {
            body: Box::new(body),
            bound,
        }
    }

    pub fn finally(body: TLFormula, bound: Option<TimeBound>) -> Self {
        TLFormula::Finally {
            body: Box::new(body),
            bound,
        }
    }

    pub fn until(l: TLFormula, r: TLFormula) -> Self {
        TLFormula::Until(Box::new(l), Box::new(r))
    }

    pub fn weak_until(l: TLFormula, r: TLFormula) -> Self {
        TLFormula::WeakUntil(Box::new(l), Box::new(r))
    }

    pub fn all_paths(f: TLFormula) -> Self {
        TLFormula::AllPaths(Box::new(f))
    }

    pub fn exists_path(f: TLFormula) -> Self {
        TLFormula::ExistsPath(Box::new(f))
    }

    /// AG — all-paths globally.
    pub fn ag(body: TLFormula) -> Self {
        TLFormula::all_paths(TLFormula::globally(body, None))
    }

    /// AF — all-paths finally.
    pub fn af(body: TLFormula) -> Self {
        TLFormula::all_paths(TLFormula::finally(body, None))
    }

    pub fn exists_constraint(bound: FormalSemantics, body: TLFormula) -> Self {
        TLFormula::ExistsConstraint {
            bound,
            body: Box::new(body),
        }
    }

    /// True when the formula is wrapped in a plain outer G.
    pub fn is_globally_wrapped(&self) -> bool {
        matches!(self, TLFormula::Globally { bound: None, .. })
    }

    /// True when the formula is wrapped in an outer AG.
    pub fn is_ag_wrapped(&self) -> bool {
        matches!(
            self,
            TLFormula::AllPaths(inner) if inner.is_globally_wrapped()
        )
    }

    pub fn contains_exists_constraint(&self) -> bool {
        self.any_node(&|f| matches!(f, TLFormula::ExistsConstraint { .. }))
    }

    pub fn contains_time_bound(&self) -> bool {
        self.any_node(&|f| {
            matches!(
                f,
                TLFormula::Globally { bound: Some(_), .. }
                    | TLFormula::Finally { bound: Some(_), .. }
            )
        })
    }

    fn any_node(&self, pred: &impl Fn(&TLFormula) -> bool) -> bool {
        if pred(self) {
            return true;
        }
        match self {
            TLFormula::Atom { .. } => false,
            TLFormula::Not(x) => x.any_node(pred),
            TLFormula::And(l, r)
            | TLFormula::Or(l, r)
            | TLFormula::Implies(l, r)
            | TLFormula::Until(l, r)
            | TLFormula::WeakUntil(l, r) => l.any_node(pred) || r.any_node(pred),
            TLFormula::Globally { body, .. } | TLFormula::Finally { body, .. } => {
                body.any_node(pred)
            }
            TLFormula::AllPaths(x) | TLFormula::ExistsPath(x) => x.any_node(pred),
            TLFormula::ExistsConstraint { body, .. } => body.any_node(pred),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RenderError {
    #[error("not expressible in MTL: {node}")]
    NotExpressibleInMtl { node: String },
    #[error("not expressible in CTL: time bound [{bound}]")]
    TimeBoundInCtl { bound: String },
    #[error("not expressible in CTL: {node}")]
    NotExpressibleInCtl { node: String },
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RenderOptions {
    /// Render `∃` as `exists`.
    pub ascii: bool,
}

/// MTL validity: no path quantifier, weak-until or existential-constraint
/// node anywhere.
pub fn mtl_valid(f: &TLFormula) -> bool {
    check_mtl(f).is_ok()
}

/// CTL validity: no time bound anywhere, `G`/`F`/`W` directly beneath a path
/// quantifier, quantifiers directly above a temporal operator. A top-level
/// `U` over state formulas is accepted (the until-scope mapping produces it).
pub fn ctl_valid(f: &TLFormula) -> bool {
    check_ctl(f).is_ok()
}

fn check_mtl(f: &TLFormula) -> Result<(), RenderError> {
    let reject = |node: &str| {
        Err(RenderError::NotExpressibleInMtl {
            node: node.to_string(),
        })
    };
    match f {
        TLFormula::Atom { .. } => Ok(()),
        TLFormula::Not(x) => check_mtl(x),
        TLFormula::And(l, r)
        | TLFormula::Or(l, r)
        | TLFormula::Implies(l, r)
        | TLFormula::Until(l, r) => {
            check_mtl(l)?;
            check_mtl(r)
        }
        TLFormula::Globally { body, .. } | TLFormula::Finally { body, .. } => check_mtl(body),
        TLFormula::WeakUntil(..) => reject("weak-until"),
        TLFormula::AllPaths(_) => reject("path quantifier A"),
        TLFormula::ExistsPath(_) => reject("path quantifier E"),
        TLFormula::ExistsConstraint { .. } => reject("existential constraint"),
    }
}

/// Checks `f` as a CTL state formula.
fn check_ctl(f: &TLFormula) -> Result<(), RenderError> {
    match f {
        TLFormula::Atom { .. } => Ok(()),
        TLFormula::Not(x) => check_ctl(x),
        TLFormula::And(l, r) | TLFormula::Or(l, r) | TLFormula::Implies(l, r) => {
            check_ctl(l)?;
            check_ctl(r)
        }
        TLFormula::Until(l, r) => {
            check_ctl(l)?;
            check_ctl(r)
        }
        TLFormula::ExistsConstraint { body, .. } => check_ctl(body),
        TLFormula::AllPaths(child) | TLFormula::ExistsPath(child) => match child.as_ref() {
            TLFormula::Globally { body, bound } | TLFormula::Finally { body, bound } => {
                if let Some(b) = bound {
                    return Err(RenderError::TimeBoundInCtl {
                        bound: b.to_string(),
                    });
                }
                check_ctl(body)
            }
            TLFormula::Until(l, r) | TLFormula::WeakUntil(l, r) => {
                check_ctl(l)?;
                check_ctl(r)
            }
            other => Err(RenderError::NotExpressibleInCtl {
                node: format!("path quantifier over non-temporal operand ({})", node_name(other)),
            }),
        },
        TLFormula::Globally { bound, .. } | TLFormula::Finally { bound, .. } => {
            if let Some(b) = bound {
                return Err(RenderError::TimeBoundInCtl {
                    bound: b.to_string(),
                });
            }
            Err(RenderError::NotExpressibleInCtl {
                node: format!("unquantified temporal operator ({})", node_name(f)),
            })
        }
        TLFormula::WeakUntil(..) => Err(RenderError::NotExpressibleInCtl {
            node: "unquantified weak-until".to_string(),
        }),
    }
}

fn node_name(f: &TLFormula) -> &'static str {
    match f {
        TLFormula::Atom { .. } => "atom",
        TLFormula::Not(_) => "not",
        TLFormula::And(..) => "and",
        TLFormula::Or(..) => "or",
        TLFormula::Implies(..) => "implies",
        TLFormula::Globally { .. } => "G",
        TLFormula::Finally { .. } => "F",
        TLFormula::Until(..) => "U",
        TLFormula::WeakUntil(..) => "W",
        TLFormula::AllPaths(_) => "A",
        TLFormula::ExistsPath(_) => "E",
        TLFormula::ExistsConstraint { .. } => "exists-constraint",
    }
}

/// Renders an MTL-valid formula. Fails on any CTL-only node; the failure is
/// the partial-result signal for the branching-only constructs.
pub fn render_mtl(f: &TLFormula) -> Result<String, RenderError> {
    render_mtl_opts(f, RenderOptions::default())
}

pub fn render_mtl_opts(f: &TLFormula, opts: RenderOptions) -> Result<String, RenderError> {
    check_mtl(f)?;
    Ok(render_top(f, opts))
}

/// Renders a CTL-valid formula. Fails on any time bound; the failure is the
/// partial-result signal for timed constructs.
pub fn render_ctl(f: &TLFormula) -> Result<String, RenderError> {
    render_ctl_opts(f, RenderOptions::default())
}

pub fn render_ctl_opts(f: &TLFormula, opts: RenderOptions) -> Result<String, RenderError> {
    check_ctl(f)?;
    Ok(render_top(f, opts))
}

/// Renders without a validity check; used for display of whatever a
/// transformation produced.
pub fn render_top(f: &TLFormula, opts: RenderOptions) -> String {
    match f {
        TLFormula::And(..) | TLFormula::Or(..) | TLFormula::Until(..) | TLFormula::WeakUntil(..) => {
            format!("({})", render_core(f, opts))
        }
        _ => render_core(f, opts),
    }
}

fn render_core(f: &TLFormula, opts: RenderOptions) -> String {
    match f {
        TLFormula::Atom { semantics, negated } => {
            let body = render_semantics(semantics);
            if *negated {
                format!("!({body})")
            } else {
                body
            }
        }
        TLFormula::Not(x) => format!("!{}", render_operand_forced(x, opts)),
        TLFormula::And(l, r) => format!(
            "{} & {}",
            render_operand(l, opts),
            render_operand(r, opts)
        ),
        TLFormula::Or(l, r) => format!(
            "{} | {}",
            render_operand(l, opts),
            render_operand(r, opts)
        ),
        TLFormula::Implies(l, r) => format!(
            "{} -> {}",
            render_operand(l, opts),
            render_operand(r, opts)
        ),
        TLFormula::Until(l, r) => format!(
            "{} U {}",
            render_operand(l, opts),
            render_operand(r, opts)
        ),
        TLFormula::WeakUntil(l, r) => format!(
            "{} W {}",
            render_operand(l, opts),
            render_operand(r, opts)
        ),
        TLFormula::Globally { body, bound } => {
            format!("G{}({})", render_bound(bound), render_core(body, opts))
        }
        TLFormula::Finally { body, bound } => {
            format!("F{}({})", render_bound(bound), render_core(body, opts))
        }
        TLFormula::AllPaths(child) => render_quantified("A", child, opts),
        TLFormula::ExistsPath(child) => render_quantified("E", child, opts),
        TLFormula::ExistsConstraint { bound, body } => {
            let glyph = if opts.ascii { "exists" } else { "\u{2203}" };
            format!(
                "({glyph} {}) -> {}",
                render_semantics(bound),
                render_operand(body, opts)
            )
        }
    }
}

fn render_quantified(q: &str, child: &TLFormula, opts: RenderOptions) -> String {
    match child {
        TLFormula::Globally { body, bound } => {
            format!("{q}G{}({})", render_bound(bound), render_core(body, opts))
        }
        TLFormula::Finally { body, bound } => {
            format!("{q}F{}({})", render_bound(bound), render_core(body, opts))
        }
        TLFormula::Until(l, r) => format!(
            "{q}[{} U {}]",
            render_operand(l, opts),
            render_operand(r, opts)
        ),
        TLFormula::WeakUntil(l, r) => format!(
            "{q}[{} W {}]",
            render_operand(l, opts),
            render_operand(r, opts)
        ),
        other => format!("{q}({})", render_core(other, opts)),
    }
}

/// Operand of a binary connective: self-delimiting forms print bare,
/// everything else is parenthesised exactly once.
fn render_operand(f: &TLFormula, opts: RenderOptions) -> String {
    match f {
        TLFormula::Globally { .. }
        | TLFormula::Finally { .. }
        | TLFormula::AllPaths(_)
        | TLFormula::ExistsPath(_)
        | TLFormula::Not(_) => render_core(f, opts),
        TLFormula::Atom { negated: true, .. } => render_core(f, opts),
        _ => format!("({})", render_core(f, opts)),
    }
}

/// Operand of `!`: always ends up parenthesised.
fn render_operand_forced(f: &TLFormula, opts: RenderOptions) -> String {
    match f {
        TLFormula::Globally { .. }
        | TLFormula::Finally { .. }
        | TLFormula::AllPaths(_)
        | TLFormula::ExistsPath(_) => render_core(f, opts),
        _ => format!("({})", render_core(f, opts)),
    }
}

fn render_bound(bound: &Option<TimeBound>) -> String {
    match bound {
        Some(b) => format!("[{b}]"),
        None => String::new(),
    }
}

/// Atoms render as `lhs op rhs` (relational) or `name(args)` (process, bare
/// name when there are no arguments).
pub fn render_semantics(sem: &FormalSemantics) -> String {
    match sem {
        FormalSemantics::Process { name, args } => {
            if args.is_empty() {
                name.clone()
            } else {
                format!("{}({})", name, args.join(", "))
            }
        }
        FormalSemantics::RelationalPlain { lhs, op, rhs } => {
            format!("{} {} {}", lhs, op.symbol(), rhs)
        }
        FormalSemantics::RelationalAggregated { lhs, op, func, args } => {
            format!("{} {} {}({})", lhs, op.symbol(), func, args.join(", "))
        }
    }
}

pub(crate) fn format_number(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prop(name: &str) -> TLFormula {
        TLFormula::atom(FormalSemantics::Process {
            name: name.to_string(),
            args: vec![],
        })
    }

    fn rel(lhs: &str, rhs: &str) -> TLFormula {
        TLFormula::atom(FormalSemantics::RelationalPlain {
            lhs: lhs.into(),
            op: CompareOp::Eq,
            rhs: rhs.into(),
        })
    }

    #[test]
    fn renders_implication_with_until_consequent() {
        let f = TLFormula::implies(
            prop("S"),
            TLFormula::until(prop("q"), TLFormula::and(prop("s"), prop("v"))),
        );
        assert_eq!(render_mtl(&f).unwrap(), "(S) -> ((q) U ((s) & (v)))");
    }

    #[test]
    fn renders_bounded_globally() {
        let f = TLFormula::globally(prop("P"), Some(TimeBound::new(CompareOp::Eq, 1.0, "s")));
        assert_eq!(render_mtl(&f).unwrap(), "G[t=1](P)");
    }

    #[test]
    fn exists_constraint_is_not_mtl() {
        let f = TLFormula::exists_constraint(
            FormalSemantics::RelationalPlain {
                lhs: "deviation".into(),
                op: CompareOp::Lt,
                rhs: "5".into(),
            },
            rel("the_cognitive_threshold", "deviation"),
        );
        let err = render_mtl(&f).unwrap_err();
        assert!(matches!(err, RenderError::NotExpressibleInMtl { .. }));
        assert!(err.to_string().contains("not expressible in MTL"));
    }

    #[test]
    fn renders_ag_implication() {
        let f = TLFormula::ag(TLFormula::implies(prop("S"), prop("P")));
        assert_eq!(render_ctl(&f).unwrap(), "AG((S) -> (P))");
    }

    #[test]
    fn renders_exists_constraint_under_ag() {
        let f = TLFormula::ag(TLFormula::exists_constraint(
            FormalSemantics::RelationalPlain {
                lhs: "deviation".into(),
                op: CompareOp::Lt,
                rhs: "5".into(),
            },
            rel("the_cognitive_threshold", "deviation"),
        ));
        assert_eq!(
            render_ctl(&f).unwrap(),
            "AG((\u{2203} deviation < 5) -> (the_cognitive_threshold = deviation))"
        );
        assert_eq!(
            render_ctl_opts(&f, RenderOptions { ascii: true }).unwrap(),
            "AG((exists deviation < 5) -> (the_cognitive_threshold = deviation))"
        );
    }

    #[test]
    fn time_bound_is_not_ctl() {
        let f = TLFormula::all_paths(TLFormula::finally(
            prop("P"),
            Some(TimeBound::new(CompareOp::Eq, 3.0, "s")),
        ));
        let err = render_ctl(&f).unwrap_err();
        assert!(matches!(err, RenderError::TimeBoundInCtl { .. }));
        assert!(err.to_string().contains("not expressible in CTL"));
    }

    #[test]
    fn validity_agrees_with_render() {
        let formulas = [
            prop("P"),
            TLFormula::globally(prop("P"), None),
            TLFormula::ag(prop("P")),
            TLFormula::weak_until(prop("P"), prop("S")),
            TLFormula::until(TLFormula::af(prop("P")), prop("S")),
            TLFormula::finally(prop("P"), Some(TimeBound::new(CompareOp::Lt, 2.0, "s"))),
        ];
        for f in &formulas {
            assert_eq!(mtl_valid(f), render_mtl(f).is_ok());
            assert_eq!(ctl_valid(f), render_ctl(f).is_ok());
        }
    }

    #[test]
    fn bare_until_over_state_formulas_is_ctl() {
        // The until-scope row prints AF(P) U S.
        let f = TLFormula::until(TLFormula::af(prop("P")), prop("S"));
        assert_eq!(render_ctl(&f).unwrap(), "(AF(P) U (S))");
    }

    #[test]
    fn and_is_not_auto_commuted() {
        let ab = TLFormula::and(prop("a"), prop("b"));
        let ba = TLFormula::and(prop("b"), prop("a"));
        assert_ne!(ab, ba);
        assert_ne!(render_mtl(&ab).unwrap(), render_mtl(&ba).unwrap());
    }

    #[test]
    fn negated_atom_renders_bang_parens() {
        let mut f = rel("X", "ON");
        if let TLFormula::Atom { negated, .. } = &mut f {
            *negated = true;
        }
        assert_eq!(render_mtl(&f).unwrap(), "!(X = ON)");
        let conj = TLFormula::and(f, rel("Y", "ON"));
        assert_eq!(render_mtl(&conj).unwrap(), "(!(X = ON) & (Y = ON))");
    }

    #[test]
    fn number_formatting_trims_integral_values() {
        assert_eq!(format_number(3.0), "3");
        assert_eq!(format_number(0.5), "0.5");
        assert_eq!(format_number(30.0), "30");
    }
}
