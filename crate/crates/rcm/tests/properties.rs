//! Property tests for the module invariants.

mod common;

use proptest::prelude::*;

use common::Gen;
use rcm::canon::{dump_canonical, load_canonical};
use rcm::model::{
    complete_predicate, CompareOp, FormalSemantics, Operand, Predicate, PrimitiveRequirement,
};
use rcm::parser::{parse_dsl, render_dsl};
use rcm::profile::{property_profile, PropertyCode, PropertyProfile};
use rcm::tl::{ctl_valid, mtl_valid, render_ctl, render_mtl, TLFormula, TimeBound};
use rcm::transform::{transform, Target};

/// Independent profile oracle: walks the canonical JSON document instead of
/// the object graph.
fn profile_oracle(pr: &PrimitiveRequirement) -> PropertyProfile {
    let value = serde_json::to_value(pr).expect("primitive serializes");
    let mut profile = PropertyProfile::new();

    fn component_codes(
        profile: &mut PropertyProfile,
        comp: &serde_json::Value,
        core: PropertyCode,
        vt: Option<PropertyCode>,
        pt: Option<PropertyCode>,
        rt: Option<PropertyCode>,
    ) {
        profile.insert(core);
        if comp.get("valid_time").is_some() {
            profile.insert(vt.expect("valid-time code exists for every component"));
        }
        if comp.get("pre_elapsed_time").is_some() {
            if let Some(code) = pt {
                profile.insert(code);
            }
        }
        if comp.get("in_between_time").is_some() {
            if let Some(code) = rt {
                profile.insert(code);
            }
        }
    }

    fn walk_tree(
        profile: &mut PropertyProfile,
        tree: &serde_json::Value,
        core: PropertyCode,
        vt: Option<PropertyCode>,
        pt: Option<PropertyCode>,
        rt: Option<PropertyCode>,
    ) {
        if let Some(leaf) = tree.get("leaf") {
            component_codes(profile, leaf, core, vt, pt, rt);
        } else if let Some(node) = tree.get("node") {
            walk_tree(profile, &node["left"], core, vt, pt, rt);
            walk_tree(profile, &node["right"], core, vt, pt, rt);
        }
    }

    use PropertyCode::*;
    if let Some(tree) = value.get("conditions") {
        walk_tree(&mut profile, tree, C, Some(CVt), Some(CPt), None);
    }
    if let Some(tree) = value.get("triggers") {
        walk_tree(&mut profile, tree, T, Some(TVt), None, Some(TRt));
    }
    walk_tree(&mut profile, &value["actions"], A, Some(AVt), Some(APt), Some(ART));
    for (key, start_code, end_code) in [("pre_scope", Sp, Ep), ("action_scope", Sa, Ea)] {
        if let Some(scope) = value.get(key) {
            if let Some(c) = scope.get("startup") {
                let vt = match start_code {
                    Sp => SpVt,
                    _ => SaVt,
                };
                component_codes(&mut profile, c, start_code, Some(vt), None, None);
            }
            if let Some(c) = scope.get("endup") {
                let vt = match end_code {
                    Ep => EpVt,
                    _ => EaVt,
                };
                component_codes(&mut profile, c, end_code, Some(vt), None, None);
            }
        }
    }
    // Any hidden_constraint key anywhere in the document sets Hidden.
    if value.to_string().contains("\"hidden_constraint\"") {
        profile.insert(Hidden);
    }
    profile
}

fn semantics_strategy() -> impl Strategy<Value = FormalSemantics> {
    prop_oneof![
        "[a-z]{1,4}".prop_map(|name| FormalSemantics::Process { name, args: vec![] }),
        ("[A-Z]", "[A-Z0-9]{1,3}").prop_map(|(lhs, rhs)| FormalSemantics::RelationalPlain {
            lhs,
            op: CompareOp::Eq,
            rhs,
        }),
    ]
}

fn bound_strategy() -> impl Strategy<Value = Option<TimeBound>> {
    prop_oneof![
        Just(None),
        (0u8..5, 0u32..50).prop_map(|(op, v)| {
            let op = [
                CompareOp::Eq,
                CompareOp::Le,
                CompareOp::Ge,
                CompareOp::Lt,
                CompareOp::Gt,
            ][op as usize];
            Some(TimeBound::new(op, v as f64, "s"))
        }),
    ]
}

fn formula_strategy() -> impl Strategy<Value = TLFormula> {
    let leaf = semantics_strategy().prop_map(TLFormula::atom);
    leaf.prop_recursive(4, 48, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(TLFormula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| TLFormula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| TLFormula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| TLFormula::implies(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| TLFormula::until(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| TLFormula::weak_until(a, b)),
            (inner.clone(), bound_strategy()).prop_map(|(f, b)| TLFormula::globally(f, b)),
            (inner.clone(), bound_strategy()).prop_map(|(f, b)| TLFormula::finally(f, b)),
            inner.clone().prop_map(TLFormula::ag),
            inner.clone().prop_map(TLFormula::af),
            inner.clone().prop_map(|f| TLFormula::all_paths(TLFormula::until(
                TLFormula::atom(FormalSemantics::Process {
                    name: "p".into(),
                    args: vec![]
                }),
                f
            ))),
            inner.clone().prop_map(TLFormula::exists_path),
            (semantics_strategy(), inner).prop_map(|(s, f)| TLFormula::exists_constraint(s, f)),
        ]
    })
}

/// Renderers are injective over the fixture corpus: distinct ASTs render to
/// distinct strings.
#[test]
fn renderers_injective_on_fixture_corpus() {
    use std::collections::HashMap;
    let mut seen: HashMap<String, TLFormula> = HashMap::new();
    for (id, pr) in common::fixture_primitives() {
        for target in [Target::Mtl, Target::Ctl] {
            let result = transform(&pr, target).unwrap();
            let rendered = match target {
                Target::Mtl => render_mtl(&result.formula),
                Target::Ctl => render_ctl(&result.formula),
            }
            .unwrap();
            let key = format!("{target:?}:{rendered}");
            if let Some(previous) = seen.get(&key) {
                assert_eq!(
                    previous, &result.formula,
                    "distinct ASTs render identically for {id}: {rendered}"
                );
            } else {
                seen.insert(key, result.formula);
            }
        }
    }
}

/// Identical time sub-components on several leaves collapse to one dropped
/// entry per (property, rule).
#[test]
fn dropped_entries_deduplicate() {
    let req = parse_dsl(
        r#"req "dup" {
  pr {
    do (X is ON for 2 seconds) and (Y is ON for 3 seconds)
  }
}"#,
    )
    .unwrap();
    let out = transform(&req.primitives[0], Target::Ctl).unwrap();
    assert_eq!(out.dropped.len(), 1);
    assert_eq!(out.dropped[0].property, PropertyCode::AVt);
    assert_eq!(out.dropped[0].rule, 15);
}

/// A requirement needs at least one primitive, on both input routes.
#[test]
fn empty_requirement_is_rejected() {
    let err = parse_dsl(r#"req "empty" { }"#).unwrap_err();
    assert!(err.to_string().contains("no primitive"));

    let err = load_canonical(r#"{ "id": "empty", "primitives": [] }"#).unwrap_err();
    assert!(err.to_string().contains("at least one primitive"));
}

proptest! {
    /// Every valid primitive instantiates the action code.
    #[test]
    fn action_code_always_present(seed in any::<u64>()) {
        let mut gen = Gen::new(seed);
        let pr = gen.primitive();
        prop_assert!(property_profile(&pr).contains(PropertyCode::A));
    }

    /// The profile matches an independent walk over the canonical document.
    #[test]
    fn profile_matches_json_oracle(seed in any::<u64>()) {
        let mut gen = Gen::new(seed);
        let pr = gen.primitive();
        prop_assert_eq!(property_profile(&pr), profile_oracle(&pr));
    }

    /// Completeness correction is idempotent.
    #[test]
    fn complete_predicate_idempotent(
        operands in prop::collection::vec("[a-z]{1,6}", 1..3),
        with_operator in any::<bool>(),
    ) {
        let operator = if with_operator && operands.len() > 1 { "is" } else { "" };
        let p = Predicate::new(
            operands.into_iter().map(Operand::new).collect(),
            operator,
        );
        let once = complete_predicate(&p).unwrap();
        let twice = complete_predicate(&once).unwrap();
        prop_assert_eq!(once, twice);
    }

    /// Renderers succeed exactly when the matching validity check passes.
    #[test]
    fn render_agrees_with_validity(f in formula_strategy()) {
        prop_assert_eq!(mtl_valid(&f), render_mtl(&f).is_ok());
        prop_assert_eq!(ctl_valid(&f), render_ctl(&f).is_ok());
    }

    /// Transformation always emits a formula its target can render.
    #[test]
    fn transform_output_is_target_valid(seed in any::<u64>()) {
        let mut gen = Gen::new(seed);
        let pr = gen.primitive();
        let mtl = transform(&pr, Target::Mtl).unwrap();
        prop_assert!(render_mtl(&mtl.formula).is_ok());
        let ctl = transform(&pr, Target::Ctl).unwrap();
        prop_assert!(render_ctl(&ctl.formula).is_ok());
    }

    /// Distinct random requirements keep both round-trip identities.
    #[test]
    fn round_trips_hold(seed in any::<u64>()) {
        let mut gen = Gen::new(seed);
        let req = gen.requirement(0);
        prop_assert_eq!(&load_canonical(&dump_canonical(&req)).unwrap(), &req);
        prop_assert_eq!(&parse_dsl(&render_dsl(&req)).unwrap(), &req);
    }

    /// Coverage is monotone: shrinking a profile never loses coverage.
    #[test]
    fn covers_is_monotone(bits in any::<u32>(), keep in any::<u32>()) {
        use rcm::coverage::{builtin_approaches, covers};
        let big: PropertyProfile = PropertyCode::ALL
            .iter()
            .enumerate()
            .filter(|(i, _)| bits & (1 << i) != 0)
            .map(|(_, c)| *c)
            .collect();
        let small: PropertyProfile = big
            .iter()
            .enumerate()
            .filter(|(i, _)| keep & (1 << i) != 0)
            .map(|(_, c)| c)
            .collect();
        for approach in builtin_approaches() {
            if covers(&approach, &big) {
                prop_assert!(covers(&approach, &small));
            }
        }
    }
}
