//! Extendable verb-frame database.
//!
//! A frame maps an operator lemma plus arity (e.g. `exceed/2`) to a formal
//! semantic template. Binding instantiates the matched template with a
//! predicate's operands; the database ships with a built-in seed and can be
//! extended from a plain text table without recompiling.

use std::collections::BTreeMap;
use std::fmt;

use crate::model::{CompareOp, FormalSemantics, Operand, Predicate, TimeSpec};

const SEED: &str = include_str!("data/frames.tsv");

/// Frame signature: operator lemma and arity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FrameSignature {
    pub lemma: String,
    pub arity: usize,
}

impl fmt::Display for FrameSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.lemma, self.arity)
    }
}

/// Semantic template with `$1..$n` argument placeholders.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SemanticTemplate {
    Process { name: String, args: Vec<usize> },
    Relational { lhs: usize, op: CompareOp, rhs: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerbFrame {
    pub signature: FrameSignature,
    pub template: SemanticTemplate,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FrameError {
    #[error("unbound frame: {signature} (register it in the frame database)")]
    UnboundFrame { signature: FrameSignature },
    #[error("duplicate frame: {signature}")]
    DuplicateFrame { signature: FrameSignature },
    #[error("frame file {path}:{line}: {message}")]
    File {
        path: String,
        line: usize,
        message: String,
    },
    #[error("cannot bind a predicate without operands")]
    EmptyPredicate,
}

/// Immutable frame database; registration returns a new value.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FrameDatabase {
    frames: BTreeMap<(String, usize), VerbFrame>,
}

impl FrameDatabase {
    pub fn empty() -> Self {
        FrameDatabase::default()
    }

    /// The built-in seed database.
    pub fn builtin() -> Self {
        FrameDatabase::parse(SEED, "<builtin>").expect("embedded frame table parses")
    }

    /// Parses the line-oriented frame table format:
    /// `lemma<TAB>arity<TAB>format<TAB>template`, `#` comments.
    pub fn parse(text: &str, path: &str) -> Result<Self, FrameError> {
        let mut db = FrameDatabase::empty();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let file_err = |message: String| FrameError::File {
                path: path.to_string(),
                line: idx + 1,
                message,
            };
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 4 {
                return Err(file_err(format!(
                    "expected 4 tab-separated fields, found {}",
                    fields.len()
                )));
            }
            let lemma = fields[0].trim().to_string();
            let arity: usize = fields[1]
                .trim()
                .parse()
                .map_err(|_| file_err(format!("invalid arity: {:?}", fields[1])))?;
            if arity == 0 {
                return Err(file_err("arity must be at least 1".to_string()));
            }
            let template = parse_template(fields[2].trim(), fields[3].trim(), arity)
                .map_err(file_err)?;
            let frame = VerbFrame {
                signature: FrameSignature {
                    lemma: lemma.clone(),
                    arity,
                },
                template,
            };
            if db.frames.insert((lemma, arity), frame).is_some() {
                return Err(file_err("duplicate frame signature".to_string()));
            }
        }
        Ok(db)
    }

    pub fn lookup(&self, lemma: &str, arity: usize) -> Option<&VerbFrame> {
        self.frames.get(&(lemma.to_string(), arity))
    }

    /// True when any frame with this lemma exists, at any arity.
    pub fn has_lemma(&self, lemma: &str) -> bool {
        self.frames.keys().any(|(l, _)| l == lemma)
    }

    pub fn frames(&self) -> impl Iterator<Item = &VerbFrame> {
        self.frames.values()
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }
}

fn parse_template(format: &str, template: &str, arity: usize) -> Result<SemanticTemplate, String> {
    let check_ref = |n: usize| {
        if n == 0 || n > arity {
            Err(format!("placeholder ${n} out of range for arity {arity}"))
        } else {
            Ok(n)
        }
    };
    match format {
        "process" => {
            let open = template
                .find('(')
                .ok_or_else(|| "process template needs the shape name($1, ...)".to_string())?;
            if !template.ends_with(')') {
                return Err("process template needs the shape name($1, ...)".to_string());
            }
            let name = template[..open].trim().to_string();
            if name.is_empty() {
                return Err("process template needs a function name".to_string());
            }
            let inner = &template[open + 1..template.len() - 1];
            let mut args = Vec::new();
            for part in inner.split(',') {
                let part = part.trim();
                let n = part
                    .strip_prefix('$')
                    .and_then(|d| d.parse::<usize>().ok())
                    .ok_or_else(|| format!("invalid placeholder: {part:?}"))?;
                args.push(check_ref(n)?);
            }
            Ok(SemanticTemplate::Process { name, args })
        }
        "relational" => {
            let parts: Vec<&str> = template.split_whitespace().collect();
            if parts.len() != 3 {
                return Err("relational template needs the shape $1 OP $2".to_string());
            }
            let term = |s: &str| {
                s.strip_prefix('$')
                    .and_then(|d| d.parse::<usize>().ok())
                    .ok_or_else(|| format!("invalid placeholder: {s:?}"))
                    .and_then(check_ref)
            };
            let op = parse_compare_op(parts[1])
                .ok_or_else(|| format!("unknown comparison operator: {:?}", parts[1]))?;
            Ok(SemanticTemplate::Relational {
                lhs: term(parts[0])?,
                op,
                rhs: term(parts[2])?,
            })
        }
        other => Err(format!("unknown format: {other:?} (expected process|relational)")),
    }
}

fn parse_compare_op(s: &str) -> Option<CompareOp> {
    Some(match s {
        "=" => CompareOp::Eq,
        "!=" => CompareOp::Ne,
        "<" => CompareOp::Lt,
        ">" => CompareOp::Gt,
        "<=" => CompareOp::Le,
        ">=" => CompareOp::Ge,
        _ => None?,
    })
}

/// Registers a frame, returning the extended database. Re-registering an
/// existing signature requires `replace`.
pub fn register_frame(
    db: &FrameDatabase,
    frame: VerbFrame,
    replace: bool,
) -> Result<FrameDatabase, FrameError> {
    let key = (frame.signature.lemma.clone(), frame.signature.arity);
    if !replace && db.frames.contains_key(&key) {
        return Err(FrameError::DuplicateFrame {
            signature: frame.signature,
        });
    }
    let mut next = db.clone();
    next.frames.insert(key, frame);
    Ok(next)
}

/// The fixed total mapping from a time phrase's quantifying relation to its
/// formal comparison operator.
pub fn bind_time(t: &TimeSpec) -> CompareOp {
    t.formal_op()
}

/// Binds a predicate's formal semantics by instantiating the matched frame
/// template with its operands. Hidden constraints bind recursively. Operand
/// count, order and the negation flag are never altered.
pub fn bind_predicate(p: &Predicate, db: &FrameDatabase) -> Result<Predicate, FrameError> {
    if p.operands.is_empty() {
        return Err(FrameError::EmptyPredicate);
    }
    let arity = p.operands.len();
    let candidates = operator_lemma_candidates(&p.operator);
    let frame = candidates
        .iter()
        .find_map(|lemma| db.lookup(lemma, arity))
        .ok_or_else(|| FrameError::UnboundFrame {
            signature: FrameSignature {
                lemma: signature_lemma(&p.operator),
                arity,
            },
        })?;

    let mut bound = p.clone();
    bound.formal = Some(instantiate(&frame.template, &p.operands));
    for operand in &mut bound.operands {
        if let Some(hidden) = &operand.hidden_constraint {
            let fixed = crate::model::complete_predicate(hidden)
                .map_err(|_| FrameError::EmptyPredicate)?;
            operand.hidden_constraint = Some(Box::new(bind_predicate(&fixed, db)?));
        }
    }
    Ok(bound)
}

fn instantiate(template: &SemanticTemplate, operands: &[Operand]) -> FormalSemantics {
    let term = |n: usize| operands[n - 1].text.clone();
    match template {
        SemanticTemplate::Process { name, args } => FormalSemantics::Process {
            name: name.clone(),
            args: args.iter().map(|&n| term(n)).collect(),
        },
        SemanticTemplate::Relational { lhs, op, rhs } => {
            let rhs_text = term(*rhs);
            if let Some((func, args)) = parse_aggregation(&rhs_text) {
                FormalSemantics::RelationalAggregated {
                    lhs: term(*lhs),
                    op: *op,
                    func,
                    args,
                }
            } else {
                FormalSemantics::RelationalPlain {
                    lhs: term(*lhs),
                    op: *op,
                    rhs: rhs_text,
                }
            }
        }
    }
}

/// Recognises aggregation-call operands such as `min(Thr1, Thr2)`.
pub(crate) fn parse_aggregation(text: &str) -> Option<(String, Vec<String>)> {
    let open = text.find('(')?;
    if !text.ends_with(')') || open == 0 {
        return None;
    }
    let name = &text[..open];
    if !name.chars().all(|c| c.is_alphanumeric() || c == '_') {
        return None;
    }
    let inner = &text[open + 1..text.len() - 1];
    let args: Vec<String> = inner
        .split(',')
        .map(|a| a.trim().to_string())
        .filter(|a| !a.is_empty())
        .collect();
    if args.is_empty() {
        return None;
    }
    Some((name.to_string(), args))
}

const MODALS: [&str; 9] = [
    "shall", "should", "must", "will", "would", "may", "might", "can", "could",
];
const BE_FORMS: [&str; 8] = ["is", "are", "am", "was", "were", "be", "been", "being"];

pub(crate) fn is_modal(word: &str) -> bool {
    MODALS.contains(&word.to_ascii_lowercase().as_str())
}

pub(crate) fn is_be_form(word: &str) -> bool {
    BE_FORMS.contains(&word.to_ascii_lowercase().as_str())
}

/// Lemma candidates for a single surface word, most specific first.
pub(crate) fn lemma_candidates(word: &str) -> Vec<String> {
    let w = word.to_ascii_lowercase();
    if is_be_form(&w) {
        return vec!["be".to_string()];
    }
    let mut out = vec![w.clone()];
    let mut push = |s: String| {
        if s.len() > 1 && !out.contains(&s) {
            out.push(s);
        }
    };
    if let Some(s) = w.strip_suffix("ies") {
        push(format!("{s}y"));
    }
    if let Some(s) = w.strip_suffix("es") {
        push(s.to_string());
    }
    if let Some(s) = w.strip_suffix('s') {
        push(s.to_string());
    }
    if let Some(s) = w.strip_suffix('d') {
        push(s.to_string());
    }
    if let Some(s) = w.strip_suffix("ed") {
        push(s.to_string());
    }
    if let Some(s) = w.strip_suffix("ing") {
        push(s.to_string());
        push(format!("{s}e"));
    }
    out
}

fn operator_content_tokens(operator: &str) -> Vec<String> {
    let mut tokens: Vec<String> = operator
        .split_whitespace()
        .map(|t| t.to_ascii_lowercase())
        .filter(|t| !is_modal(t))
        .collect();
    if tokens.is_empty() {
        return tokens;
    }
    if tokens.iter().all(|t| is_be_form(t)) {
        return vec!["be".to_string()];
    }
    // Passive/progressive auxiliaries in front of a content verb.
    while tokens.len() > 1 && is_be_form(&tokens[0]) {
        tokens.remove(0);
    }
    tokens
}

/// Lemma candidates for a whole operator phrase (e.g. "is set to" yields
/// `set-to` then `set`), most specific first.
pub fn operator_lemma_candidates(operator: &str) -> Vec<String> {
    let tokens = operator_content_tokens(operator);
    if tokens.is_empty() {
        return Vec::new();
    }
    if tokens[0] == "be" {
        return vec!["be".to_string()];
    }
    let rest = tokens[1..].join("-");
    let mut out = Vec::new();
    for variant in lemma_candidates(&tokens[0]) {
        if !rest.is_empty() {
            let joined = format!("{variant}-{rest}");
            if !out.contains(&joined) {
                out.push(joined);
            }
        }
        if !out.contains(&variant) {
            out.push(variant);
        }
    }
    out
}

/// Best-guess frame lemma for an operator phrase, used when reporting an
/// unbound frame so the signature can be registered directly.
pub fn signature_lemma(operator: &str) -> String {
    let tokens = operator_content_tokens(operator);
    let Some(head) = tokens.first() else {
        return String::new();
    };
    let head = head_lemma_guess(head);
    let rest = tokens[1..].join("-");
    if rest.is_empty() {
        head
    } else {
        format!("{head}-{rest}")
    }
}

fn head_lemma_guess(word: &str) -> String {
    let w = word.to_ascii_lowercase();
    if is_be_form(&w) {
        return "be".to_string();
    }
    if let Some(s) = w.strip_suffix("ies") {
        return format!("{s}y");
    }
    for suffix in ["ches", "shes", "xes", "zes", "sses", "oes"] {
        if let Some(s) = w.strip_suffix(suffix) {
            return format!("{s}{}", &suffix[..suffix.len() - 2]);
        }
    }
    if w.len() > 2 && w.ends_with('s') && !w.ends_with("ss") {
        return w[..w.len() - 1].to_string();
    }
    if w.len() > 3 && w.ends_with("ed") {
        return w[..w.len() - 1].to_string();
    }
    w
}
