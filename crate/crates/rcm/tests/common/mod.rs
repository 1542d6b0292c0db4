//! Shared test support: fixture loading and a deterministic generator of
//! valid, DSL-expressible requirements.

#![allow(dead_code)]

use std::path::{Path, PathBuf};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use rcm::frames::{bind_predicate, FrameDatabase};
use rcm::model::{
    Component, ComponentKind, ComponentTree, EndupKind, Operand, Predicate, PrimitiveRequirement,
    Requirement, Scope, TimeRelation, TimeSlot, TimeSpec, TreeRelation,
};
use rcm::parser::parse_requirements;
use rcm::validate::validate_primitive;

pub fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

/// All fixture requirements, in file-name order.
pub fn load_fixtures() -> Vec<Requirement> {
    let db = FrameDatabase::builtin();
    let mut paths: Vec<PathBuf> = std::fs::read_dir(fixtures_dir())
        .expect("fixtures directory exists")
        .map(|e| e.expect("fixture entry").path())
        .filter(|p| p.extension().is_some_and(|e| e == "rcm"))
        .collect();
    paths.sort();
    let mut out = Vec::new();
    for path in paths {
        let text = std::fs::read_to_string(&path).expect("fixture reads");
        let reqs = parse_requirements(&text, &db)
            .unwrap_or_else(|e| panic!("fixture {} parses: {e}", path.display()));
        out.extend(reqs);
    }
    out
}

/// Fixture primitives flattened to (id, primitive) pairs.
pub fn fixture_primitives() -> Vec<(String, PrimitiveRequirement)> {
    load_fixtures()
        .into_iter()
        .flat_map(|req| {
            req.primitives
                .into_iter()
                .enumerate()
                .map(move |(i, pr)| (format!("{}[{i}]", req.id), pr))
                .collect::<Vec<_>>()
        })
        .collect()
}

const SUBJECTS: &[&str] = &[
    "X",
    "Y",
    "Z",
    "M",
    "the monitor",
    "the rain sensor",
    "R_STATUS",
    "the wipers",
    "the fuel level",
    "the vehicle speed",
    "B_sig",
    "E_sig",
    "the door state",
    "the engine",
    "the pump",
];

const VALUES: &[&str] = &[
    "ON", "OFF", "TRUE", "FALSE", "INIT", "low", "high", "active", "closed", "IDLE", "42",
];

const NOUN_PHRASES: &[&str] = &["sailing termination", "system startup", "mission completion"];

const HIDDEN_HOSTS: &[&str] = &["the deviation", "the threshold", "the offset"];

const UNITS: &[&str] = &["seconds", "minutes", "sec", "ms"];

fn operand_text(surface: &str) -> String {
    surface.replace(' ', "_")
}

/// Deterministic generator of structurally valid requirements whose
/// predicates all bind against the built-in frame database and whose DSL
/// rendering reparses to the same object graph.
pub struct Gen {
    rng: StdRng,
    db: FrameDatabase,
}

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen {
            rng: StdRng::seed_from_u64(seed),
            db: FrameDatabase::builtin(),
        }
    }

    fn pick<'a>(&mut self, items: &'a [&'a str]) -> &'a str {
        items[self.rng.random_range(0..items.len())]
    }

    pub fn requirement(&mut self, index: usize) -> Requirement {
        let count = self.rng.random_range(1..=2);
        let primitives = (0..count).map(|_| self.primitive()).collect();
        Requirement {
            id: format!("gen-{index}"),
            primitives,
        }
    }

    /// A primitive requirement that passes validation.
    pub fn primitive(&mut self) -> PrimitiveRequirement {
        let actions = self.tree(ComponentKind::Action);
        let conditions = self
            .rng
            .random_bool(0.55)
            .then(|| self.tree(ComponentKind::Condition));
        let triggers = self
            .rng
            .random_bool(0.35)
            .then(|| self.tree(ComponentKind::Trigger));
        let pre_scope = (conditions.is_some() || triggers.is_some())
            .then(|| self.rng.random_bool(0.35).then(|| self.scope()))
            .flatten();
        let action_scope = self.rng.random_bool(0.3).then(|| self.scope());

        let pr = PrimitiveRequirement {
            conditions,
            triggers,
            actions,
            pre_scope,
            action_scope,
        };
        let report = validate_primitive(&pr);
        assert!(report.passed(), "generator produced invalid primitive: {report}");
        pr
    }

    fn tree(&mut self, kind: ComponentKind) -> ComponentTree {
        let leaves = self.rng.random_range(1..=3);
        let mut tree = ComponentTree::leaf(self.component(kind));
        for _ in 1..leaves {
            let leaf = ComponentTree::leaf(self.component(kind));
            let relation = if self.rng.random_bool(0.5) {
                TreeRelation::And
            } else {
                TreeRelation::Or
            };
            tree = if self.rng.random_bool(0.5) {
                ComponentTree::node(relation, tree, leaf)
            } else {
                ComponentTree::node(relation, leaf, tree)
            };
        }
        tree
    }

    fn component(&mut self, kind: ComponentKind) -> Component {
        let allow_hidden = self.rng.random_bool(0.15);
        let mut comp = Component::new(kind, self.predicate(allow_hidden));
        if TimeSlot::Valid.eligible_on(kind) && self.rng.random_bool(0.3) {
            comp.valid_time = Some(self.timespec());
        }
        if TimeSlot::PreElapsed.eligible_on(kind) && self.rng.random_bool(0.25) {
            comp.pre_elapsed_time = Some(self.timespec());
        }
        if TimeSlot::InBetween.eligible_on(kind) && self.rng.random_bool(0.25) {
            comp.in_between_time = Some(self.timespec());
        }
        comp
    }

    fn scope(&mut self) -> Scope {
        let startup = || Component::new(ComponentKind::ScopeStartup, Predicate::new(vec![], ""));
        let _ = startup;
        let shape = self.rng.random_range(0..6);
        let mut make = |kind: ComponentKind| {
            let mut c = Component::new(kind, self.predicate(false));
            if self.rng.random_bool(0.25) {
                c.valid_time = Some(self.timespec());
            }
            c
        };
        match shape {
            0 => Scope {
                startup: Some(make(ComponentKind::ScopeStartup)),
                endup: None,
                endup_kind: EndupKind::Before,
            },
            1 | 2 => Scope {
                startup: None,
                endup: Some(make(ComponentKind::ScopeEndup)),
                endup_kind: if shape == 1 {
                    EndupKind::Before
                } else {
                    EndupKind::Until
                },
            },
            3 | 4 => Scope {
                startup: Some(make(ComponentKind::ScopeStartup)),
                endup: Some(make(ComponentKind::ScopeEndup)),
                endup_kind: if shape == 3 {
                    EndupKind::Before
                } else {
                    EndupKind::Until
                },
            },
            _ => {
                // "while P": startup P, endup ¬P, no endup time phrases.
                let start = make(ComponentKind::ScopeStartup);
                let end = Component::new(ComponentKind::ScopeEndup, start.core.negate());
                Scope {
                    startup: Some(start),
                    endup: Some(end),
                    endup_kind: EndupKind::Until,
                }
            }
        }
    }

    fn timespec(&mut self) -> TimeSpec {
        let value = if self.rng.random_bool(0.1) {
            0.5
        } else {
            self.rng.random_range(1..=30) as f64
        };
        let relation = TimeRelation::ALL[self.rng.random_range(0..TimeRelation::ALL.len())];
        TimeSpec::new(value, self.pick(UNITS), relation)
    }

    /// A frame-bound predicate the DSL can express.
    pub fn predicate(&mut self, allow_hidden: bool) -> Predicate {
        let kind = self.rng.random_range(0..10);
        let subject = operand_text(self.pick(SUBJECTS));
        let value = operand_text(self.pick(VALUES));
        let (operands, operator, negatable) = match kind {
            0 => (vec![subject, value], "is".to_string(), true),
            1 => (vec![subject, value], "equals".to_string(), false),
            2 => (
                vec![subject, self.rng.random_range(1..200).to_string()],
                "exceeds".to_string(),
                false,
            ),
            3 => (vec![subject, value], "turns to".to_string(), false),
            4 => (vec![subject, value], "transitions to".to_string(), false),
            5 => (vec![subject, value], "is set to".to_string(), false),
            6 => (vec![subject, value], "becomes".to_string(), false),
            7 => (
                vec![
                    "the_monitor".to_string(),
                    "REQ_Sig".to_string(),
                    "the_station".to_string(),
                ],
                "sends".to_string(),
                false,
            ),
            8 => (vec![subject], "terminates".to_string(), false),
            _ => {
                // Operand-only phrase; completeness correction applies.
                let phrase = operand_text(self.pick(NOUN_PHRASES));
                let p = Predicate::new(vec![Operand::new(phrase)], "");
                let completed = rcm::model::complete_predicate(&p).expect("non-empty");
                return bind_predicate(&completed, &self.db).expect("binds");
            }
        };

        let mut operands: Vec<Operand> = operands.into_iter().map(Operand::new).collect();
        let negated = negatable && self.rng.random_bool(0.15);
        if allow_hidden && !negated && matches!(kind, 0 | 1 | 5) {
            let host = self.pick(HIDDEN_HOSTS).to_string();
            let hidden = self.hidden_predicate(&host, 1);
            let last = operands.len() - 1;
            operands[last] = Operand::with_hidden(operand_text(&host), hidden);
        }
        let mut p = Predicate::new(operands, operator);
        p.negated = negated;
        bind_predicate(&p, &self.db).expect("generated predicate binds")
    }

    fn hidden_predicate(&mut self, host: &str, depth: usize) -> Predicate {
        let subject = operand_text(host.strip_prefix("the ").unwrap_or(host));
        let operator = if self.rng.random_bool(0.5) {
            "is less than"
        } else {
            "is larger than"
        };
        let rhs = if depth > 0 && self.rng.random_bool(0.25) {
            let inner_host = self.pick(HIDDEN_HOSTS).to_string();
            Operand::with_hidden(
                operand_text(&inner_host),
                self.hidden_predicate(&inner_host, depth - 1),
            )
        } else {
            Operand::new(self.rng.random_range(1..100).to_string())
        };
        let p = Predicate::new(vec![Operand::new(subject), rhs], operator);
        bind_predicate(&p, &self.db).expect("hidden predicate binds")
    }
}
