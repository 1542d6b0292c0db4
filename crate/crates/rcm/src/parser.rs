//! Parser for the structured requirement DSL.
//!
//! ```text
//! requirement := "req" STRING "{" primitive+ "}"
//! primitive   := "pr" "{" clause+ "}"
//! clause      := scope | cond | trig | act
//! scope       := ("scope-pre" | "scope-act")
//!                (("after" pred) | ("before" pred) | ("until" pred) | ("while" pred))+
//! cond        := "if" predtree          trig := "when" predtree
//! act         := "do" predtree
//! predtree    := pred | predtree ("and"|"or") predtree | "(" predtree ")"
//! pred        := TEXT-UNTIL-KEYWORD time*
//! time        := ("for"|"within"|"after-delay"|"every") REL? NUMBER UNIT
//! REL         := "at-most"|"at-least"|"less-than"|"greater-than"
//! ```
//!
//! `and` binds tighter than `or`; parentheses override. `while P` is
//! normalised at parse time to `after P until ¬P`. `within c` parses as
//! pre-elapsed-time with relation at-most. Hidden constraints attach to the
//! operand preceding `whose`/`that` and parse recursively; a subject-less
//! constraint (`... the deviation that is less than 5`) receives the host
//! operand stripped of its leading determiner as its implicit subject.
//!
//! Predicates are completeness-corrected and frame-bound during parsing, so
//! unbound frames and eligibility violations surface as parse errors with a
//! source span.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::frames::{
    bind_predicate, is_be_form, is_modal, lemma_candidates, FrameDatabase, FrameError,
};
use crate::model::{
    complete_predicate, Component, ComponentKind, ComponentTree, EndupKind, Operand, Predicate,
    PrimitiveRequirement, Requirement, Scope, TimeRelation, TimeSlot, TimeSpec, TreeRelation,
};

/// Byte span into the source text, with the line and column of its start
/// (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
    pub line: usize,
    pub column: usize,
}

impl SourceSpan {
    fn point(offset: usize, line: usize, column: usize) -> Self {
        SourceSpan {
            start: offset,
            end: offset,
            line,
            column,
        }
    }

    fn merge(self, other: SourceSpan) -> SourceSpan {
        SourceSpan {
            start: self.start.min(other.start),
            end: self.end.max(other.end),
            line: self.line,
            column: self.column,
        }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParseErrorKind {
    #[error("{message} (expected {expected})")]
    Syntax { message: String, expected: String },
    #[error("{0}")]
    Frame(FrameError),
    #[error("{message}")]
    Eligibility { message: String },
    #[error("duplicate {what}")]
    Duplicate { what: String },
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{span}: {kind}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub span: SourceSpan,
}

impl ParseError {
    fn syntax(span: SourceSpan, message: impl Into<String>, expected: impl Into<String>) -> Self {
        ParseError {
            kind: ParseErrorKind::Syntax {
                message: message.into(),
                expected: expected.into(),
            },
            span,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Number(f64, String),
    Str(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
}

#[derive(Debug, Clone, PartialEq)]
struct Token {
    tok: Tok,
    span: SourceSpan,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut tokens = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    let mut line = 1usize;
    let mut col = 1usize;

    let word_char = |c: u8| c.is_ascii_alphanumeric() || c == b'_' || c == b'-' || c == b'.';

    while i < bytes.len() {
        let c = bytes[i];
        let span_here = |len: usize| SourceSpan {
            start: i,
            end: i + len,
            line,
            column: col,
        };
        match c {
            b'\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            b' ' | b'\t' | b'\r' => {
                i += 1;
                col += 1;
            }
            b'#' => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            b'{' => {
                tokens.push(Token { tok: Tok::LBrace, span: span_here(1) });
                i += 1;
                col += 1;
            }
            b'}' => {
                tokens.push(Token { tok: Tok::RBrace, span: span_here(1) });
                i += 1;
                col += 1;
            }
            b'(' => {
                tokens.push(Token { tok: Tok::LParen, span: span_here(1) });
                i += 1;
                col += 1;
            }
            b')' => {
                tokens.push(Token { tok: Tok::RParen, span: span_here(1) });
                i += 1;
                col += 1;
            }
            b',' => {
                tokens.push(Token { tok: Tok::Comma, span: span_here(1) });
                i += 1;
                col += 1;
            }
            b'"' => {
                let start = i;
                let start_col = col;
                i += 1;
                col += 1;
                let from = i;
                while i < bytes.len() && bytes[i] != b'"' && bytes[i] != b'\n' {
                    i += 1;
                    col += 1;
                }
                if i >= bytes.len() || bytes[i] != b'"' {
                    return Err(ParseError::syntax(
                        SourceSpan { start, end: i, line, column: start_col },
                        "unterminated string",
                        "closing '\"'",
                    ));
                }
                let s = text[from..i].to_string();
                i += 1;
                col += 1;
                tokens.push(Token {
                    tok: Tok::Str(s),
                    span: SourceSpan { start, end: i, line, column: start_col },
                });
            }
            c if word_char(c) => {
                let start = i;
                let start_col = col;
                while i < bytes.len() && word_char(bytes[i]) {
                    i += 1;
                    col += 1;
                }
                let raw = &text[start..i];
                let span = SourceSpan { start, end: i, line, column: start_col };
                let tok = if raw.as_bytes()[0].is_ascii_digit() {
                    match raw.parse::<f64>() {
                        Ok(v) => Tok::Number(v, raw.to_string()),
                        Err(_) => Tok::Word(raw.to_string()),
                    }
                } else {
                    Tok::Word(raw.to_string())
                };
                tokens.push(Token { tok, span });
            }
            other => {
                return Err(ParseError::syntax(
                    span_here(1),
                    format!("unexpected character {:?}", other as char),
                    "a token",
                ));
            }
        }
    }
    Ok(tokens)
}

const CLAUSE_KEYWORDS: [&str; 7] = ["if", "when", "do", "scope-pre", "scope-act", "pr", "req"];
const SCOPE_KEYWORDS: [&str; 4] = ["after", "before", "until", "while"];
const TIME_KEYWORDS: [&str; 4] = ["for", "within", "after-delay", "every"];
const REL_KEYWORDS: [&str; 4] = ["at-most", "at-least", "less-than", "greater-than"];
const DETERMINERS: [&str; 3] = ["the", "a", "an"];

fn is_terminator(word: &str) -> bool {
    word == "and"
        || word == "or"
        || CLAUSE_KEYWORDS.contains(&word)
        || SCOPE_KEYWORDS.contains(&word)
        || TIME_KEYWORDS.contains(&word)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    db: &'a FrameDatabase,
    eof_span: SourceSpan,
}

impl<'a> Parser<'a> {
    fn new(text: &str, db: &'a FrameDatabase) -> Result<Self, ParseError> {
        let tokens = lex(text)?;
        let lines = text.lines().count().max(1);
        let eof_span = SourceSpan::point(text.len(), lines, text.lines().last().map_or(1, |l| l.len() + 1));
        Ok(Parser { tokens, pos: 0, db, eof_span })
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_word(&self) -> Option<&str> {
        match self.peek() {
            Some(Token { tok: Tok::Word(w), .. }) => Some(w.as_str()),
            _ => None,
        }
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn here(&self) -> SourceSpan {
        self.peek().map(|t| t.span).unwrap_or(self.eof_span)
    }

    fn expect_word(&mut self, word: &str) -> Result<SourceSpan, ParseError> {
        match self.peek() {
            Some(Token { tok: Tok::Word(w), span }) if w == word => {
                let span = *span;
                self.pos += 1;
                Ok(span)
            }
            Some(t) => Err(ParseError::syntax(
                t.span,
                format!("found {}", describe(&t.tok)),
                format!("'{word}'"),
            )),
            None => Err(ParseError::syntax(
                self.eof_span,
                "unexpected end of input",
                format!("'{word}'"),
            )),
        }
    }

    fn expect_tok(&mut self, tok: Tok, what: &str) -> Result<SourceSpan, ParseError> {
        match self.peek() {
            Some(t) if t.tok == tok => {
                let span = t.span;
                self.pos += 1;
                Ok(span)
            }
            Some(t) => Err(ParseError::syntax(
                t.span,
                format!("found {}", describe(&t.tok)),
                what.to_string(),
            )),
            None => Err(ParseError::syntax(
                self.eof_span,
                "unexpected end of input",
                what.to_string(),
            )),
        }
    }

    fn parse_requirement(&mut self) -> Result<Requirement, ParseError> {
        self.expect_word("req")?;
        let id = match self.next() {
            Some(Token { tok: Tok::Str(s), .. }) => s,
            Some(t) => {
                return Err(ParseError::syntax(
                    t.span,
                    format!("found {}", describe(&t.tok)),
                    "a quoted requirement id",
                ))
            }
            None => {
                return Err(ParseError::syntax(
                    self.eof_span,
                    "unexpected end of input",
                    "a quoted requirement id",
                ))
            }
        };
        self.expect_tok(Tok::LBrace, "'{'")?;
        let mut primitives = Vec::new();
        while self.peek_word() == Some("pr") {
            primitives.push(self.parse_primitive()?);
        }
        let close = self.expect_tok(Tok::RBrace, "'}' or 'pr'")?;
        if primitives.is_empty() {
            return Err(ParseError::syntax(
                close,
                "requirement has no primitive requirements",
                "at least one 'pr' block",
            ));
        }
        Ok(Requirement { id, primitives })
    }

    fn parse_primitive(&mut self) -> Result<PrimitiveRequirement, ParseError> {
        self.expect_word("pr")?;
        self.expect_tok(Tok::LBrace, "'{'")?;

        let mut conditions: Option<ComponentTree> = None;
        let mut triggers: Option<ComponentTree> = None;
        let mut actions: Option<ComponentTree> = None;
        let mut pre_scope: Option<Scope> = None;
        let mut action_scope: Option<Scope> = None;

        while let Some(word) = self.peek_word().map(str::to_string) {
            let span = self.here();
            let dup = |what: &str| ParseError {
                kind: ParseErrorKind::Duplicate { what: what.to_string() },
                span,
            };
            match word.as_str() {
                "if" => {
                    if conditions.is_some() {
                        return Err(dup("'if' clause"));
                    }
                    self.pos += 1;
                    conditions = Some(self.parse_predtree(ComponentKind::Condition)?);
                }
                "when" => {
                    if triggers.is_some() {
                        return Err(dup("'when' clause"));
                    }
                    self.pos += 1;
                    triggers = Some(self.parse_predtree(ComponentKind::Trigger)?);
                }
                "do" => {
                    if actions.is_some() {
                        return Err(dup("'do' clause"));
                    }
                    self.pos += 1;
                    actions = Some(self.parse_predtree(ComponentKind::Action)?);
                }
                "scope-pre" => {
                    if pre_scope.is_some() {
                        return Err(dup("'scope-pre' clause"));
                    }
                    self.pos += 1;
                    pre_scope = Some(self.parse_scope()?);
                }
                "scope-act" => {
                    if action_scope.is_some() {
                        return Err(dup("'scope-act' clause"));
                    }
                    self.pos += 1;
                    action_scope = Some(self.parse_scope()?);
                }
                _ => break,
            }
        }

        let close = self.expect_tok(Tok::RBrace, "a clause or '}'")?;
        let Some(actions) = actions else {
            return Err(ParseError::syntax(
                close,
                "primitive requirement has no action",
                "a 'do' clause",
            ));
        };
        Ok(PrimitiveRequirement {
            conditions,
            triggers,
            actions,
            pre_scope,
            action_scope,
        })
    }

    fn parse_scope(&mut self) -> Result<Scope, ParseError> {
        let mut startup: Option<Component> = None;
        let mut endup: Option<Component> = None;
        let mut endup_kind = EndupKind::Before;
        let mut any = false;

        while let Some(word) = self.peek_word().map(str::to_string) {
            if !SCOPE_KEYWORDS.contains(&word.as_str()) {
                break;
            }
            let span = self.here();
            self.pos += 1;
            any = true;
            let dup = |what: &str| ParseError {
                kind: ParseErrorKind::Duplicate { what: what.to_string() },
                span,
            };
            match word.as_str() {
                "after" => {
                    if startup.is_some() {
                        return Err(dup("scope startup phase"));
                    }
                    startup = Some(self.parse_pred_component(ComponentKind::ScopeStartup)?);
                }
                "before" | "until" => {
                    if endup.is_some() {
                        return Err(dup("scope endup phase"));
                    }
                    endup = Some(self.parse_pred_component(ComponentKind::ScopeEndup)?);
                    endup_kind = if word == "before" {
                        EndupKind::Before
                    } else {
                        EndupKind::Until
                    };
                }
                "while" => {
                    if startup.is_some() || endup.is_some() {
                        return Err(dup("scope phase ('while' provides both)"));
                    }
                    let comp = self.parse_pred_component(ComponentKind::ScopeStartup)?;
                    let negated = Component::new(ComponentKind::ScopeEndup, comp.core.negate());
                    startup = Some(comp);
                    endup = Some(negated);
                    endup_kind = EndupKind::Until;
                }
                _ => unreachable!(),
            }
        }

        if !any {
            return Err(ParseError::syntax(
                self.here(),
                "scope clause has no phase",
                "'after', 'before', 'until' or 'while'",
            ));
        }
        Ok(Scope { startup, endup, endup_kind })
    }

    fn parse_predtree(&mut self, kind: ComponentKind) -> Result<ComponentTree, ParseError> {
        let mut lhs = self.parse_and_tree(kind)?;
        while self.peek_word() == Some("or") {
            self.pos += 1;
            let rhs = self.parse_and_tree(kind)?;
            lhs = ComponentTree::node(TreeRelation::Or, lhs, rhs);
        }
        Ok(lhs)
    }

    fn parse_and_tree(&mut self, kind: ComponentKind) -> Result<ComponentTree, ParseError> {
        let mut lhs = self.parse_tree_term(kind)?;
        while self.peek_word() == Some("and") {
            self.pos += 1;
            let rhs = self.parse_tree_term(kind)?;
            lhs = ComponentTree::node(TreeRelation::And, lhs, rhs);
        }
        Ok(lhs)
    }

    fn parse_tree_term(&mut self, kind: ComponentKind) -> Result<ComponentTree, ParseError> {
        if matches!(self.peek(), Some(Token { tok: Tok::LParen, .. })) {
            self.pos += 1;
            let tree = self.parse_predtree(kind)?;
            self.expect_tok(Tok::RParen, "')'")?;
            Ok(tree)
        } else {
            Ok(ComponentTree::leaf(self.parse_pred_component(kind)?))
        }
    }

    /// Parses one predicate with its trailing time phrases into a component.
    fn parse_pred_component(&mut self, kind: ComponentKind) -> Result<Component, ParseError> {
        let (predicate, _span) = self.parse_predicate()?;
        let mut component = Component::new(kind, predicate);

        while let Some(word) = self.peek_word().map(str::to_string) {
            if !TIME_KEYWORDS.contains(&word.as_str()) {
                break;
            }
            let kw_span = self.here();
            self.pos += 1;
            let (slot, default_rel) = match word.as_str() {
                "for" => (TimeSlot::Valid, TimeRelation::Exactly),
                "within" => (TimeSlot::PreElapsed, TimeRelation::AtMost),
                "after-delay" => (TimeSlot::PreElapsed, TimeRelation::Exactly),
                "every" => (TimeSlot::InBetween, TimeRelation::Exactly),
                _ => unreachable!(),
            };
            let relation = match self.peek_word() {
                Some(rel) if REL_KEYWORDS.contains(&rel) => {
                    let rel = rel.to_string();
                    self.pos += 1;
                    match rel.as_str() {
                        "at-most" => TimeRelation::AtMost,
                        "at-least" => TimeRelation::AtLeast,
                        "less-than" => TimeRelation::LessThan,
                        "greater-than" => TimeRelation::GreaterThan,
                        _ => unreachable!(),
                    }
                }
                _ => default_rel,
            };
            let value = match self.next() {
                Some(Token { tok: Tok::Number(v, _), .. }) => v,
                Some(t) => {
                    return Err(ParseError::syntax(
                        t.span,
                        format!("found {}", describe(&t.tok)),
                        "a number",
                    ))
                }
                None => {
                    return Err(ParseError::syntax(
                        self.eof_span,
                        "unexpected end of input",
                        "a number",
                    ))
                }
            };
            let unit = match self.next() {
                Some(Token { tok: Tok::Word(w), .. }) => w,
                Some(t) => {
                    return Err(ParseError::syntax(
                        t.span,
                        format!("found {}", describe(&t.tok)),
                        "a time unit",
                    ))
                }
                None => {
                    return Err(ParseError::syntax(
                        self.eof_span,
                        "unexpected end of input",
                        "a time unit",
                    ))
                }
            };
            if !slot.eligible_on(kind) {
                return Err(ParseError {
                    kind: ParseErrorKind::Eligibility {
                        message: format!("{} ineligible on {}", slot.label(), kind.label()),
                    },
                    span: kw_span,
                });
            }
            if component.time(slot).is_some() {
                return Err(ParseError {
                    kind: ParseErrorKind::Duplicate {
                        what: format!("{} phrase", slot.label()),
                    },
                    span: kw_span,
                });
            }
            component.set_time(slot, TimeSpec::new(value, unit, relation));
        }

        Ok(component)
    }

    /// Collects raw predicate text up to the next keyword and splits it into
    /// operands and an operator using the frame database, then applies
    /// completeness correction and frame binding.
    fn parse_predicate(&mut self) -> Result<(Predicate, SourceSpan), ParseError> {
        let collected = self.collect_pred_words()?;
        let span = collected.span;
        let predicate = self.assemble_predicate(collected)?;
        Ok((predicate, span))
    }

    /// Words of one predicate (modal auxiliaries dropped, negation words
    /// recorded as a flag), plus hidden constraints with the index of the
    /// word each one follows.
    fn collect_pred_words(&mut self) -> Result<Collected, ParseError> {
        let mut words: Vec<String> = Vec::new();
        let mut hidden: Vec<(usize, Collected)> = Vec::new();
        let mut negated = false;
        let start = self.here();
        let mut span = start;

        loop {
            match self.peek() {
                Some(Token { tok: Tok::Word(w), span: tok_span }) => {
                    if is_terminator(w) {
                        break;
                    }
                    if is_modal(w) {
                        self.pos += 1;
                        continue;
                    }
                    if w == "not" || w == "never" {
                        negated = true;
                        self.pos += 1;
                        continue;
                    }
                    if w == "whose" || w == "that" {
                        let intro_span = *tok_span;
                        self.pos += 1;
                        if words.is_empty() {
                            return Err(ParseError::syntax(
                                intro_span,
                                "hidden constraint has no host operand",
                                "an operand before 'whose'/'that'",
                            ));
                        }
                        let inner = self.collect_pred_words()?;
                        span = span.merge(inner.span);
                        hidden.push((words.len() - 1, inner));
                        break;
                    }
                    let mut word = w.clone();
                    let word_span = *tok_span;
                    self.pos += 1;
                    // Aggregation call: WORD ( args )
                    if matches!(self.peek(), Some(Token { tok: Tok::LParen, .. })) {
                        self.pos += 1;
                        let mut args = Vec::new();
                        loop {
                            match self.next() {
                                Some(Token { tok: Tok::Word(a), .. }) => args.push(a),
                                Some(Token { tok: Tok::Number(_, raw), .. }) => args.push(raw),
                                Some(Token { tok: Tok::Comma, .. }) => continue,
                                Some(Token { tok: Tok::RParen, span: s }) => {
                                    span = span.merge(s);
                                    break;
                                }
                                Some(t) => {
                                    return Err(ParseError::syntax(
                                        t.span,
                                        format!("found {}", describe(&t.tok)),
                                        "an aggregation argument or ')'",
                                    ))
                                }
                                None => {
                                    return Err(ParseError::syntax(
                                        self.eof_span,
                                        "unexpected end of input",
                                        "')'",
                                    ))
                                }
                            }
                        }
                        word = format!("{word}({})", args.join(", "));
                    }
                    span = span.merge(word_span);
                    words.push(word);
                }
                Some(Token { tok: Tok::Number(_, raw), span: tok_span }) => {
                    words.push(raw.clone());
                    span = span.merge(*tok_span);
                    self.pos += 1;
                }
                _ => break,
            }
        }

        if words.is_empty() {
            return Err(ParseError::syntax(
                start,
                "empty predicate",
                "predicate text",
            ));
        }
        Ok(Collected {
            words,
            hidden,
            negated,
            span,
        })
    }

    fn assemble_predicate(&self, collected: Collected) -> Result<Predicate, ParseError> {
        let span = collected.span;
        let split = split_predicate(&collected.words, self.db).map_err(|m| {
            ParseError::syntax(span, m, "a predicate the frame database can split")
        })?;
        if split.subject_missing {
            return Err(ParseError::syntax(
                span,
                "predicate has no subject",
                "an operand before the operator",
            ));
        }
        self.finish_predicate(split, collected)
    }

    /// Assembles a hidden-constraint predicate. A subject-less construction
    /// ("that is less than 5") receives the host operand, stripped of its
    /// leading determiner, as its implicit first operand.
    fn assemble_hidden_predicate(
        &self,
        collected: Collected,
        host: &str,
    ) -> Result<Predicate, ParseError> {
        let span = collected.span;
        let mut split = split_predicate(&collected.words, self.db).map_err(|m| {
            ParseError::syntax(span, m, "a predicate the frame database can split")
        })?;
        if split.subject_missing {
            split.operands.insert(0, strip_determiner(host));
            split.hidden_offset += 1;
        }
        self.finish_predicate(split, collected)
    }

    fn finish_predicate(
        &self,
        split: SplitPredicate,
        collected: Collected,
    ) -> Result<Predicate, ParseError> {
        let span = collected.span;
        let mut operands: Vec<Operand> = split.operands.iter().map(Operand::new).collect();
        for (word_idx, inner) in collected.hidden {
            let slot = split
                .operand_of_word(word_idx)
                .map(|i| i + split.hidden_offset)
                .unwrap_or(operands.len().saturating_sub(1));
            if operands[slot].hidden_constraint.is_some() {
                return Err(ParseError {
                    kind: ParseErrorKind::Duplicate {
                        what: "hidden constraint on one operand".to_string(),
                    },
                    span,
                });
            }
            let host_text = operands[slot].text.clone();
            let pred = self.assemble_hidden_predicate(inner, &host_text)?;
            operands[slot].hidden_constraint = Some(Box::new(pred));
        }
        let mut predicate = Predicate::new(operands, split.operator);
        predicate.negated = collected.negated;

        let completed = complete_predicate(&predicate)
            .map_err(|e| ParseError::syntax(span, e.to_string(), "at least one operand"))?;
        bind_predicate(&completed, self.db).map_err(|e| ParseError {
            kind: ParseErrorKind::Frame(e),
            span,
        })
    }
}

struct Collected {
    words: Vec<String>,
    hidden: Vec<(usize, Collected)>,
    negated: bool,
    span: SourceSpan,
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Word(w) => format!("'{w}'"),
        Tok::Number(_, raw) => format!("number '{raw}'"),
        Tok::Str(s) => format!("string {s:?}"),
        Tok::LBrace => "'{'".to_string(),
        Tok::RBrace => "'}'".to_string(),
        Tok::LParen => "'('".to_string(),
        Tok::RParen => "')'".to_string(),
        Tok::Comma => "','".to_string(),
    }
}

fn strip_determiner(operand: &str) -> String {
    let parts: Vec<&str> = operand.split('_').collect();
    if parts.len() > 1 && DETERMINERS.contains(&parts[0].to_ascii_lowercase().as_str()) {
        parts[1..].join("_")
    } else {
        operand.to_string()
    }
}

struct SplitPredicate {
    operands: Vec<String>,
    operator: String,
    subject_missing: bool,
    /// Word-index ranges of each operand, for hidden-constraint placement.
    operand_ranges: Vec<(usize, usize)>,
    /// Offset applied to operand indexes when an implicit subject was added.
    hidden_offset: usize,
}

impl SplitPredicate {
    fn operand_of_word(&self, word_idx: usize) -> Option<usize> {
        self.operand_ranges
            .iter()
            .position(|&(s, e)| word_idx >= s && word_idx < e)
    }
}

/// Splits predicate words into operands and an operator via frame lookup.
fn split_predicate(words: &[String], db: &FrameDatabase) -> Result<SplitPredicate, String> {
    if words.is_empty() {
        return Err("predicate has no content words".to_string());
    }

    let found = find_operator(words, db);
    let Some(op) = found else {
        // Operand-only phrase; completeness correction supplies the rest.
        return Ok(SplitPredicate {
            operands: vec![words.join("_")],
            operator: String::new(),
            subject_missing: false,
            operand_ranges: vec![(0, words.len())],
            hidden_offset: 0,
        });
    };

    let mut operands = Vec::new();
    let mut ranges = Vec::new();
    let subject_missing = if op.start > 0 {
        operands.push(words[..op.start].join("_"));
        ranges.push((0, op.start));
        false
    } else {
        op.be_led
    };

    // Post-operator words split into operand groups on standalone "to".
    let mut group_start = op.end;
    let mut i = op.end;
    while i <= words.len() {
        let boundary = i == words.len() || words[i].eq_ignore_ascii_case("to");
        if boundary {
            if i > group_start {
                operands.push(words[group_start..i].join("_"));
                ranges.push((group_start, i));
            }
            group_start = i + 1;
        }
        i += 1;
    }

    if operands.is_empty() {
        return Err("predicate has no operands around its operator".to_string());
    }

    Ok(SplitPredicate {
        operands,
        operator: words[op.start..op.end].join(" "),
        subject_missing,
        operand_ranges: ranges,
        hidden_offset: 0,
    })
}

struct OperatorMatch {
    start: usize,
    end: usize,
    /// The operator construction opens with a be-form ("is ...").
    be_led: bool,
}

/// Finds the leftmost operator construction whose lemma exists in the frame
/// database.
fn find_operator(words: &[String], db: &FrameDatabase) -> Option<OperatorMatch> {
    for i in 0..words.len() {
        let w = words[i].to_ascii_lowercase();
        if is_be_form(&w) {
            // "is <verb> [to] X" — passive of a content verb, only when an
            // object follows; "is <w1> <w2> ..." comparative constructions
            // ("is less than"); otherwise plain state equality.
            if i + 1 < words.len() {
                let next = words[i + 1].to_ascii_lowercase();
                if i + 2 < words.len() {
                    let two = format!("{next}-{}", words[i + 2].to_ascii_lowercase());
                    if db.has_lemma(&two) {
                        return Some(OperatorMatch { start: i, end: i + 3, be_led: true });
                    }
                }
                for variant in lemma_candidates(&next) {
                    let particle = i + 2 < words.len()
                        && words[i + 2].eq_ignore_ascii_case("to")
                        && (db.has_lemma(&format!("{variant}-to")) || db.has_lemma(&variant));
                    if particle && i + 3 < words.len() {
                        return Some(OperatorMatch { start: i, end: i + 3, be_led: true });
                    }
                    if db.has_lemma(&variant) && !particle && i + 2 < words.len() {
                        return Some(OperatorMatch { start: i, end: i + 2, be_led: true });
                    }
                }
                return Some(OperatorMatch { start: i, end: i + 1, be_led: true });
            }
            return None;
        }
        // Content verb, possibly with a "to" particle.
        for variant in lemma_candidates(&w) {
            if i + 1 < words.len()
                && words[i + 1].eq_ignore_ascii_case("to")
                && db.has_lemma(&format!("{variant}-to"))
            {
                return Some(OperatorMatch { start: i, end: i + 2, be_led: false });
            }
            if db.has_lemma(&variant) {
                return Some(OperatorMatch { start: i, end: i + 1, be_led: false });
            }
        }
    }
    None
}

/// Parses a single requirement from DSL text using the built-in frame
/// database.
pub fn parse_dsl(text: &str) -> Result<Requirement, ParseError> {
    parse_dsl_with(text, &FrameDatabase::builtin())
}

pub fn parse_dsl_with(text: &str, db: &FrameDatabase) -> Result<Requirement, ParseError> {
    let mut parser = Parser::new(text, db)?;
    let req = parser.parse_requirement()?;
    if let Some(t) = parser.peek() {
        return Err(ParseError::syntax(
            t.span,
            format!("trailing input: found {}", describe(&t.tok)),
            "end of input",
        ));
    }
    Ok(req)
}

/// Parses a file that may hold several `req` blocks.
pub fn parse_requirements(text: &str, db: &FrameDatabase) -> Result<Vec<Requirement>, ParseError> {
    let mut parser = Parser::new(text, db)?;
    let mut out = Vec::new();
    loop {
        match parser.peek() {
            None => break,
            Some(Token { tok: Tok::Word(w), .. }) if w == "req" => {
                out.push(parser.parse_requirement()?);
            }
            Some(t) => {
                return Err(ParseError::syntax(
                    t.span,
                    format!("found {}", describe(&t.tok)),
                    "'req'",
                ));
            }
        }
    }
    if out.is_empty() {
        return Err(ParseError::syntax(
            parser.eof_span,
            "empty input",
            "'req'",
        ));
    }
    Ok(out)
}

/// Deterministic DSL pretty-printer; `parse_dsl ∘ render_dsl` is the
/// identity on the object graph.
pub fn render_dsl(req: &Requirement) -> String {
    let mut out = String::new();
    out.push_str(&format!("req \"{}\" {{\n", req.id));
    for pr in &req.primitives {
        out.push_str("  pr {\n");
        if let Some(scope) = &pr.pre_scope {
            out.push_str(&format!("    scope-pre {}\n", render_scope(scope)));
        }
        if let Some(tree) = &pr.conditions {
            out.push_str(&format!("    if {}\n", render_tree(tree, true)));
        }
        if let Some(tree) = &pr.triggers {
            out.push_str(&format!("    when {}\n", render_tree(tree, true)));
        }
        out.push_str(&format!("    do {}\n", render_tree(&pr.actions, true)));
        if let Some(scope) = &pr.action_scope {
            out.push_str(&format!("    scope-act {}\n", render_scope(scope)));
        }
        out.push_str("  }\n");
    }
    out.push_str("}\n");
    out
}

fn render_scope(scope: &Scope) -> String {
    if let (Some(start), Some(end)) = (&scope.startup, &scope.endup) {
        let while_shape = scope.endup_kind == EndupKind::Until
            && end.core == start.core.negate()
            && end.valid_time.is_none()
            && end.pre_elapsed_time.is_none()
            && end.in_between_time.is_none();
        if while_shape {
            return format!("while {}", render_component(start));
        }
    }
    let mut parts = Vec::new();
    if let Some(start) = &scope.startup {
        parts.push(format!("after {}", render_component(start)));
    }
    if let Some(end) = &scope.endup {
        let kw = match scope.endup_kind {
            EndupKind::Before => "before",
            EndupKind::Until => "until",
        };
        parts.push(format!("{kw} {}", render_component(end)));
    }
    parts.join(" ")
}

fn render_tree(tree: &ComponentTree, top: bool) -> String {
    match tree {
        ComponentTree::Leaf(c) => {
            if top {
                render_component(c)
            } else {
                format!("({})", render_component(c))
            }
        }
        ComponentTree::Node { relation, left, right } => {
            let op = match relation {
                TreeRelation::And => "and",
                TreeRelation::Or => "or",
            };
            let body = format!(
                "{} {op} {}",
                render_tree(left, false),
                render_tree(right, false)
            );
            if top {
                body
            } else {
                format!("({body})")
            }
        }
    }
}

fn render_component(comp: &Component) -> String {
    let mut out = render_predicate(&comp.core, None);
    if let Some(t) = &comp.valid_time {
        out.push_str(&render_time("for", t, TimeRelation::Exactly));
    }
    if let Some(t) = &comp.pre_elapsed_time {
        if t.relation == TimeRelation::AtMost {
            out.push_str(&format!(
                " within {} {}",
                crate::tl::format_number(t.value),
                t.unit
            ));
        } else {
            out.push_str(&render_time("after-delay", t, TimeRelation::Exactly));
        }
    }
    if let Some(t) = &comp.in_between_time {
        out.push_str(&render_time("every", t, TimeRelation::Exactly));
    }
    out
}

fn render_time(keyword: &str, t: &TimeSpec, default_rel: TimeRelation) -> String {
    let rel = if t.relation == default_rel {
        String::new()
    } else {
        let word = match t.relation {
            TimeRelation::Exactly => "",
            TimeRelation::AtMost => "at-most ",
            TimeRelation::AtLeast => "at-least ",
            TimeRelation::LessThan => "less-than ",
            TimeRelation::GreaterThan => "greater-than ",
        };
        word.to_string()
    };
    format!(
        " {keyword} {rel}{} {}",
        crate::tl::format_number(t.value),
        t.unit
    )
}

/// Renders a predicate back to DSL text. `elide_subject_of` carries the host
/// operand when rendering a hidden constraint whose subject is implicit.
fn render_predicate(pred: &Predicate, elide_subject_of: Option<&str>) -> String {
    let operand_text = |o: &Operand| -> String {
        let base = o.text.replace('_', " ");
        match &o.hidden_constraint {
            None => base,
            Some(h) => {
                let implied = strip_determiner(&o.text);
                if h.operands.first().map(|s| s.text.as_str()) == Some(implied.as_str()) {
                    format!("{base} that {}", render_predicate(h, Some(&o.text)))
                } else {
                    format!("{base} whose {}", render_predicate(h, None))
                }
            }
        }
    };

    // Completeness-corrected predicates render their original surface only.
    if pred.artificial {
        return pred
            .operands
            .first()
            .map(operand_text)
            .unwrap_or_default();
    }

    let mut operator = pred.operator.clone();
    if pred.negated {
        let mut parts: Vec<&str> = operator.split_whitespace().collect();
        if parts.is_empty() {
            operator = "not".to_string();
        } else {
            parts.insert(1, "not");
            operator = parts.join(" ");
        }
    }

    let skip_subject = elide_subject_of.is_some()
        && pred
            .operands
            .first()
            .map(|o| o.text.as_str())
            .map(|s| Some(s) == elide_subject_of.map(strip_determiner).as_deref())
            .unwrap_or(false);

    let mut parts: Vec<String> = Vec::new();
    if !skip_subject {
        if let Some(first) = pred.operands.first() {
            parts.push(operand_text(first));
        }
    }
    if !operator.is_empty() {
        parts.push(operator);
    }
    let rest: Vec<String> = pred.operands.iter().skip(1).map(operand_text).collect();
    parts.push(rest.join(" to "));
    parts.retain(|p| !p.is_empty());
    parts.join(" ")
}
