//! Property profiling: which of the 19 requirement properties a primitive
//! requirement instantiates. The profile is the unit of template coverage
//! analysis.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::model::{Component, ComponentKind, ComponentTree, Predicate, PrimitiveRequirement, TimeSlot};

/// The 19 property codes. Suffixes: `-vt` valid-time, `-pt` pre-elapsed-time,
/// `-rt` in-between-time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PropertyCode {
    A,
    AVt,
    ART,
    APt,
    C,
    CVt,
    CPt,
    T,
    TVt,
    TRt,
    Sp,
    SpVt,
    Ep,
    EpVt,
    Sa,
    SaVt,
    Ea,
    EaVt,
    Hidden,
}

impl PropertyCode {
    pub const ALL: [PropertyCode; 19] = [
        PropertyCode::A,
        PropertyCode::AVt,
        PropertyCode::ART,
        PropertyCode::APt,
        PropertyCode::C,
        PropertyCode::CVt,
        PropertyCode::CPt,
        PropertyCode::T,
        PropertyCode::TVt,
        PropertyCode::TRt,
        PropertyCode::Sp,
        PropertyCode::SpVt,
        PropertyCode::Ep,
        PropertyCode::EpVt,
        PropertyCode::Sa,
        PropertyCode::SaVt,
        PropertyCode::Ea,
        PropertyCode::EaVt,
        PropertyCode::Hidden,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PropertyCode::A => "A",
            PropertyCode::AVt => "A-vt",
            PropertyCode::ART => "A-rt",
            PropertyCode::APt => "A-pt",
            PropertyCode::C => "C",
            PropertyCode::CVt => "C-vt",
            PropertyCode::CPt => "C-pt",
            PropertyCode::T => "T",
            PropertyCode::TVt => "T-vt",
            PropertyCode::TRt => "T-rt",
            PropertyCode::Sp => "SP",
            PropertyCode::SpVt => "SP-vt",
            PropertyCode::Ep => "EP",
            PropertyCode::EpVt => "EP-vt",
            PropertyCode::Sa => "SA",
            PropertyCode::SaVt => "SA-vt",
            PropertyCode::Ea => "EA",
            PropertyCode::EaVt => "EA-vt",
            PropertyCode::Hidden => "Hidden",
        }
    }

    /// Whether the code denotes a time sub-component (-vt/-pt/-rt suffix).
    pub fn is_time_suffixed(self) -> bool {
        matches!(
            self,
            PropertyCode::AVt
                | PropertyCode::ART
                | PropertyCode::APt
                | PropertyCode::CVt
                | PropertyCode::CPt
                | PropertyCode::TVt
                | PropertyCode::TRt
                | PropertyCode::SpVt
                | PropertyCode::EpVt
                | PropertyCode::SaVt
                | PropertyCode::EaVt
        )
    }

    /// Core code for a component kind.
    pub fn core(kind: ComponentKind, scope_is_action: bool) -> PropertyCode {
        match kind {
            ComponentKind::Condition => PropertyCode::C,
            ComponentKind::Trigger => PropertyCode::T,
            ComponentKind::Action => PropertyCode::A,
            ComponentKind::ScopeStartup => {
                if scope_is_action {
                    PropertyCode::Sa
                } else {
                    PropertyCode::Sp
                }
            }
            ComponentKind::ScopeEndup => {
                if scope_is_action {
                    PropertyCode::Ea
                } else {
                    PropertyCode::Ep
                }
            }
        }
    }

    /// Time-suffixed code for a component kind and slot, when eligible.
    pub fn time(kind: ComponentKind, scope_is_action: bool, slot: TimeSlot) -> Option<PropertyCode> {
        match (Self::core(kind, scope_is_action), slot) {
            (PropertyCode::A, TimeSlot::Valid) => Some(PropertyCode::AVt),
            (PropertyCode::A, TimeSlot::PreElapsed) => Some(PropertyCode::APt),
            (PropertyCode::A, TimeSlot::InBetween) => Some(PropertyCode::ART),
            (PropertyCode::C, TimeSlot::Valid) => Some(PropertyCode::CVt),
            (PropertyCode::C, TimeSlot::PreElapsed) => Some(PropertyCode::CPt),
            (PropertyCode::T, TimeSlot::Valid) => Some(PropertyCode::TVt),
            (PropertyCode::T, TimeSlot::InBetween) => Some(PropertyCode::TRt),
            (PropertyCode::Sp, TimeSlot::Valid) => Some(PropertyCode::SpVt),
            (PropertyCode::Ep, TimeSlot::Valid) => Some(PropertyCode::EpVt),
            (PropertyCode::Sa, TimeSlot::Valid) => Some(PropertyCode::SaVt),
            (PropertyCode::Ea, TimeSlot::Valid) => Some(PropertyCode::EaVt),
            _ => None,
        }
    }
}

impl fmt::Display for PropertyCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown property code: {0}")]
pub struct UnknownPropertyCode(pub String);

impl FromStr for PropertyCode {
    type Err = UnknownPropertyCode;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PropertyCode::ALL
            .iter()
            .copied()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| UnknownPropertyCode(s.to_string()))
    }
}

/// The set of property codes instantiated by a primitive requirement.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PropertyProfile(pub BTreeSet<PropertyCode>);

impl PropertyProfile {
    pub fn new() -> Self {
        PropertyProfile(BTreeSet::new())
    }

    pub fn from_codes(codes: impl IntoIterator<Item = PropertyCode>) -> Self {
        PropertyProfile(codes.into_iter().collect())
    }

    pub fn insert(&mut self, code: PropertyCode) {
        self.0.insert(code);
    }

    pub fn contains(&self, code: PropertyCode) -> bool {
        self.0.contains(&code)
    }

    pub fn is_subset(&self, other: &PropertyProfile) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = PropertyCode> + '_ {
        self.0.iter().copied()
    }

    pub fn has_time_code(&self) -> bool {
        self.iter().any(|c| c.is_time_suffixed())
    }
}

impl fmt::Display for PropertyProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, code) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{code}")?;
        }
        write!(f, "}}")
    }
}

impl FromIterator<PropertyCode> for PropertyProfile {
    fn from_iter<I: IntoIterator<Item = PropertyCode>>(iter: I) -> Self {
        PropertyProfile(iter.into_iter().collect())
    }
}

/// Computes the property profile of a primitive requirement. Core components
/// map to {A, C, T, SP, EP, SA, EA}, their time sub-components to the
/// suffixed codes, and a hidden constraint anywhere sets `Hidden`.
///
/// The primitive is expected to be structurally valid
/// (`validate_primitive(pr).status == Pass`).
pub fn property_profile(pr: &PrimitiveRequirement) -> PropertyProfile {
    let mut profile = PropertyProfile::new();

    visit_tree(&mut profile, pr.conditions.as_ref(), false);
    visit_tree(&mut profile, pr.triggers.as_ref(), false);
    visit_tree(&mut profile, Some(&pr.actions), false);
    for (scope, is_action) in [(&pr.pre_scope, false), (&pr.action_scope, true)] {
        if let Some(scope) = scope {
            if let Some(c) = &scope.startup {
                visit_component(&mut profile, c, is_action);
            }
            if let Some(c) = &scope.endup {
                visit_component(&mut profile, c, is_action);
            }
        }
    }

    profile
}

fn visit_tree(profile: &mut PropertyProfile, tree: Option<&ComponentTree>, scope_is_action: bool) {
    if let Some(tree) = tree {
        for leaf in tree.leaves() {
            visit_component(profile, leaf, scope_is_action);
        }
    }
}

fn visit_component(profile: &mut PropertyProfile, comp: &Component, scope_is_action: bool) {
    profile.insert(PropertyCode::core(comp.kind, scope_is_action));
    for slot in TimeSlot::ALL {
        if comp.time(slot).is_some() {
            if let Some(code) = PropertyCode::time(comp.kind, scope_is_action, slot) {
                profile.insert(code);
            }
        }
    }
    if predicate_has_hidden(&comp.core) {
        profile.insert(PropertyCode::Hidden);
    }
}

fn predicate_has_hidden(p: &Predicate) -> bool {
    p.operands.iter().any(|o| o.hidden_constraint.is_some())
}
