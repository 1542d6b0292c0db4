//! Coverage analysis of requirement corpora against legacy template
//! approaches.
//!
//! Each approach offers one or more formats; a format is the set of
//! properties it can express. An approach covers a requirement when some
//! single format holds every property the requirement instantiates — format
//! restrictions beyond the property sets (ordering, lexical choices) are not
//! modelled.

use std::collections::BTreeMap;

use crate::model::PrimitiveRequirement;
use crate::profile::{property_profile, PropertyCode, PropertyProfile};
use crate::validate::validate_primitive;

const REGISTRY: &str = include_str!("data/approaches.tsv");

/// Code reserved for the reference model itself, reported as a virtual
/// approach with no property restrictions.
pub const RCM_CODE: &str = "RCM";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Approach {
    pub code: String,
    pub name: String,
    pub citation: String,
    /// One entry per format the approach offers.
    pub formats: Vec<PropertyProfile>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RegistryError {
    #[error("registry {path}:{line}: {message}")]
    Line {
        path: String,
        line: usize,
        message: String,
    },
}

/// Parses the line-oriented registry format `code<TAB>name<TAB>row` (with an
/// optional citation column before the row). Lines with one code accumulate
/// into one approach with several formats.
pub fn parse_registry(text: &str, path: &str) -> Result<Vec<Approach>, RegistryError> {
    let mut order: Vec<String> = Vec::new();
    let mut by_code: BTreeMap<String, Approach> = BTreeMap::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| RegistryError::Line {
            path: path.to_string(),
            line: idx + 1,
            message,
        };
        let fields: Vec<&str> = line.split('\t').collect();
        let (code, name, citation, row) = match fields.as_slice() {
            [code, name, row] => (*code, *name, "", *row),
            [code, name, citation, row] => (*code, *name, *citation, *row),
            _ => {
                return Err(err(format!(
                    "expected 3 or 4 tab-separated fields, found {}",
                    fields.len()
                )))
            }
        };
        let mut profile = PropertyProfile::new();
        for part in row.split(',') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let prop: PropertyCode = part
                .parse()
                .map_err(|e: crate::profile::UnknownPropertyCode| err(e.to_string()))?;
            profile.insert(prop);
        }
        if !profile.contains(PropertyCode::A) {
            return Err(err("format row does not contain the action code A".to_string()));
        }
        if code == RCM_CODE {
            return Err(err(format!("code {RCM_CODE} is reserved")));
        }
        let entry = by_code.entry(code.to_string()).or_insert_with(|| {
            order.push(code.to_string());
            Approach {
                code: code.to_string(),
                name: name.to_string(),
                citation: citation.to_string(),
                formats: Vec::new(),
            }
        });
        entry.formats.push(profile);
    }

    Ok(order
        .into_iter()
        .map(|code| by_code.remove(&code).expect("ordered code exists"))
        .collect())
}

/// The approaches transcribed from the published comparison table (A1–A15).
pub fn builtin_approaches() -> Vec<Approach> {
    parse_registry(REGISTRY, "<builtin>").expect("embedded registry parses")
}

fn profile_mask(p: &PropertyProfile) -> u32 {
    let mut mask = 0u32;
    for code in p.iter() {
        let bit = PropertyCode::ALL
            .iter()
            .position(|c| *c == code)
            .expect("code is in the fixed set");
        mask |= 1 << bit;
    }
    mask
}

/// True when some single format of the approach holds every property of the
/// profile.
pub fn covers(approach: &Approach, profile: &PropertyProfile) -> bool {
    let p = profile_mask(profile);
    approach
        .formats
        .iter()
        .any(|row| p & !profile_mask(row) == 0)
}

/// Per-approach coverage over a corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproachCoverage {
    pub code: String,
    pub name: String,
    pub covered: usize,
    /// Per-requirement coverage flags, in corpus order.
    pub flags: Vec<bool>,
}

impl ApproachCoverage {
    pub fn percentage(&self, total: usize) -> f64 {
        if total == 0 {
            0.0
        } else {
            self.covered as f64 * 100.0 / total as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageStats {
    /// Corpus members that passed validation, with their profiles.
    pub items: Vec<(String, PropertyProfile)>,
    /// Members excluded by validation, with the failure reason.
    pub excluded: Vec<(String, String)>,
    /// One row per approach, the virtual RCM row last.
    pub coverage: Vec<ApproachCoverage>,
    /// Requirements no real approach covers.
    pub uncovered_by_all: Vec<String>,
    /// Occurrences of each property code over the corpus.
    pub property_frequency: Vec<(PropertyCode, usize)>,
    /// Property-count → number of requirements.
    pub histogram: BTreeMap<usize, usize>,
}

impl CoverageStats {
    pub fn total(&self) -> usize {
        self.items.len()
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CoverageError {
    #[error("empty corpus")]
    EmptyCorpus,
}

/// Evaluates which corpus members each approach can represent. Invalid
/// members are excluded and reported. The reference model is added as a
/// virtual approach covering every valid member.
pub fn coverage_matrix(
    corpus: &[(String, PrimitiveRequirement)],
    approaches: &[Approach],
) -> Result<CoverageStats, CoverageError> {
    if corpus.is_empty() {
        return Err(CoverageError::EmptyCorpus);
    }

    let mut items = Vec::new();
    let mut excluded = Vec::new();
    for (id, pr) in corpus {
        let report = validate_primitive(pr);
        if report.passed() {
            items.push((id.clone(), property_profile(pr)));
        } else {
            let reason = report
                .issues
                .iter()
                .find(|i| i.severity == crate::validate::Severity::Fail)
                .map(|i| format!("{} at {}", i.code, i.path))
                .unwrap_or_else(|| "validation failed".to_string());
            excluded.push((id.clone(), reason));
        }
    }
    if items.is_empty() {
        return Err(CoverageError::EmptyCorpus);
    }

    let mut coverage: Vec<ApproachCoverage> = Vec::new();
    for approach in approaches {
        let flags: Vec<bool> = items
            .iter()
            .map(|(_, profile)| covers(approach, profile))
            .collect();
        coverage.push(ApproachCoverage {
            code: approach.code.clone(),
            name: approach.name.clone(),
            covered: flags.iter().filter(|f| **f).count(),
            flags,
        });
    }

    let uncovered_by_all = items
        .iter()
        .enumerate()
        .filter(|(i, _)| coverage.iter().all(|c| !c.flags[*i]))
        .map(|(_, (id, _))| id.clone())
        .collect();

    // The reference model puts no restriction on the included properties.
    coverage.push(ApproachCoverage {
        code: RCM_CODE.to_string(),
        name: "Requirement capturing model".to_string(),
        covered: items.len(),
        flags: vec![true; items.len()],
    });

    let mut property_frequency = Vec::new();
    for code in PropertyCode::ALL {
        let count = items.iter().filter(|(_, p)| p.contains(code)).count();
        property_frequency.push((code, count));
    }

    let histogram = complexity_histogram_profiles(items.iter().map(|(_, p)| p));

    Ok(CoverageStats {
        items,
        excluded,
        coverage,
        uncovered_by_all,
        property_frequency,
        histogram,
    })
}

/// Groups requirements by the count of their properties, regardless of which
/// properties they are.
pub fn complexity_histogram(corpus: &[PrimitiveRequirement]) -> BTreeMap<usize, usize> {
    let profiles: Vec<PropertyProfile> = corpus.iter().map(property_profile).collect();
    complexity_histogram_profiles(profiles.iter())
}

fn complexity_histogram_profiles<'a>(
    profiles: impl Iterator<Item = &'a PropertyProfile>,
) -> BTreeMap<usize, usize> {
    let mut histogram = BTreeMap::new();
    for p in profiles {
        *histogram.entry(p.len()).or_insert(0) += 1;
    }
    histogram
}
