//! If-then metric rules and the knowledge base that holds them.
//!
//! A rule matches one metric against either a closed integer interval (the
//! upper bound may be open) or an explicit value set, and concludes a list of
//! `(attribute, level)` pairs. Within one metric no two rule conditions may
//! share a value, so a fact fires at most one rule.
//!
//! Two bases ship with the crate, both loadable by name:
//! `default` (6 metrics x 7 bands = 42 rules, covering every value) and
//! `reference` (three point rules for DIT=5, WMC=18 and CBO=1).

mod inference;

pub use inference::{
    evaluate_project, filter_by_ranges, forward_chain, round_half_up, Assessment, Derivation,
    EvaluationScope, Fact, FactOutcome, InferenceError, RangeFilter, PROJECT_SCOPE,
};

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::Metric;
use crate::model::SCHEMA_VERSION;

const DEFAULT_RULES: &str = include_str!("../../rules/default.json");
const REFERENCE_RULES: &str = include_str!("../../rules/reference.json");

/// Names of the knowledge bases compiled into the crate.
pub const BUILTIN_BASES: [&str; 2] = ["default", "reference"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Level {
    VeryLow,
    Low,
    #[serde(alias = "inRange")]
    Normal,
    High,
    VeryHigh,
}

impl Level {
    pub const ALL: [Level; 5] = [
        Level::VeryLow,
        Level::Low,
        Level::Normal,
        Level::High,
        Level::VeryHigh,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Level::VeryLow => "veryLow",
            Level::Low => "low",
            Level::Normal => "normal",
            Level::High => "high",
            Level::VeryHigh => "veryHigh",
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The registered quality attributes. Rules files may add to it.
pub const DEFAULT_ATTRIBUTES: [&str; 12] = [
    "complexity",
    "understandability",
    "testability",
    "reusability",
    "robustness",
    "faultLikelihood",
    "maintenanceEffort",
    "quality",
    "coupling",
    "modularDesign",
    "inheritanceDepth",
    "methodCount",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Condition {
    /// `lo ..= hi`; `hi == None` means unbounded above.
    Range { lo: u64, hi: Option<u64> },
    Values(BTreeSet<u64>),
}

impl Condition {
    pub fn range(lo: u64, hi: u64) -> Self {
        Condition::Range { lo, hi: Some(hi) }
    }

    pub fn at_least(lo: u64) -> Self {
        Condition::Range { lo, hi: None }
    }

    pub fn values<I: IntoIterator<Item = u64>>(values: I) -> Self {
        Condition::Values(values.into_iter().collect())
    }

    pub fn contains(&self, value: u64) -> bool {
        match self {
            Condition::Range { lo, hi } => value >= *lo && hi.is_none_or(|h| value <= h),
            Condition::Values(set) => set.contains(&value),
        }
    }

    /// Matching on real values: intervals compare numerically, value sets
    /// only match integral values.
    pub fn matches(&self, value: f64) -> bool {
        if !value.is_finite() || value < 0.0 {
            return false;
        }
        match self {
            Condition::Range { lo, hi } => value >= *lo as f64 && hi.is_none_or(|h| value <= h as f64),
            Condition::Values(set) => value.fract() == 0.0 && set.contains(&(value as u64)),
        }
    }

    /// Smallest value matched by both conditions, if any.
    pub fn first_overlap(&self, other: &Condition) -> Option<u64> {
        match (self, other) {
            (Condition::Range { lo: a, hi: ah }, Condition::Range { lo: b, hi: bh }) => {
                let lo = *a.max(b);
                let hi = match (ah, bh) {
                    (Some(x), Some(y)) => Some(*x.min(y)),
                    (Some(x), None) | (None, Some(x)) => Some(*x),
                    (None, None) => None,
                };
                hi.is_none_or(|h| lo <= h).then_some(lo)
            }
            (Condition::Values(set), other) | (other, Condition::Values(set)) => {
                set.iter().copied().find(|v| other.contains(*v))
            }
        }
    }

    fn check(&self) -> Result<(), String> {
        match self {
            Condition::Range { lo, hi: Some(hi) } if lo > hi => {
                Err(format!("range lower bound {lo} exceeds upper bound {hi}"))
            }
            Condition::Values(set) if set.is_empty() => Err("value set is empty".into()),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Condition::Range { lo, hi: Some(hi) } if lo == hi => write!(f, "{lo}"),
            Condition::Range { lo, hi: Some(hi) } => write!(f, "{lo} - {hi}"),
            Condition::Range { lo, hi: None } => write!(f, "{lo}+"),
            Condition::Values(set) => {
                let parts: Vec<String> = set.iter().map(u64::to_string).collect();
                f.write_str(&parts.join(", "))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid condition `{input}`: {reason}")]
pub struct ConditionParseError {
    pub input: String,
    pub reason: String,
}

impl FromStr for Condition {
    type Err = ConditionParseError;

    /// Accepts `2-5`, `2 - 5`, `26+`, `0,1,2` and a single value `7`
    /// (a one-element set).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |reason: &str| ConditionParseError {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let num = |t: &str| -> Result<u64, ConditionParseError> {
            t.trim()
                .parse::<u64>()
                .map_err(|_| err(&format!("`{}` is not a non-negative integer", t.trim())))
        };
        let text = s.trim();
        if text.is_empty() {
            return Err(err("empty condition"));
        }
        let cond = if let Some(lo) = text.strip_suffix('+') {
            Condition::at_least(num(lo)?)
        } else if let Some((lo, hi)) = text.split_once('-') {
            Condition::range(num(lo)?, num(hi)?)
        } else {
            Condition::Values(text.split(',').map(num).collect::<Result<_, _>>()?)
        };
        cond.check().map_err(|r| err(&r))?;
        Ok(cond)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Conclusion {
    pub attribute: String,
    pub level: Level,
}

impl Conclusion {
    pub fn new(attribute: impl Into<String>, level: Level) -> Self {
        Conclusion {
            attribute: attribute.into(),
            level,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub id: String,
    pub metric: Metric,
    pub condition: Condition,
    pub conclusions: Vec<Conclusion>,
    /// Free-form band label, informational only.
    pub band: Option<String>,
}

#[derive(Debug, Error)]
pub enum RuleError {
    #[error("rules document schema violation at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error("unsupported schemaVersion {0}")]
    SchemaVersion(u32),
    #[error("knowledge base has no rules")]
    Empty,
    #[error("duplicate rule id `{0}`")]
    DuplicateId(String),
    #[error("rule `{id}`: {reason}")]
    InvalidRule { id: String, reason: String },
    #[error("rule `{id}` concludes unregistered attribute `{attribute}`")]
    UnknownAttribute { id: String, attribute: String },
    #[error("rules `{first}` and `{second}` overlap on {metric} at value {value}")]
    Overlap {
        first: String,
        second: String,
        metric: Metric,
        value: u64,
    },
    #[error("knowledge base is declared complete but no {metric} rule covers value {value}")]
    Incomplete { metric: Metric, value: u64 },
    #[error("unknown built-in knowledge base `{0}` (expected default or reference)")]
    UnknownBuiltin(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnowledgeBase {
    name: String,
    rules: Vec<Rule>,
    attributes: BTreeSet<String>,
    by_metric: BTreeMap<Metric, Vec<usize>>,
}

impl KnowledgeBase {
    /// Validates rules against every base invariant.
    pub fn new(
        name: impl Into<String>,
        rules: Vec<Rule>,
        extra_attributes: impl IntoIterator<Item = String>,
    ) -> Result<Self, RuleError> {
        if rules.is_empty() {
            return Err(RuleError::Empty);
        }
        let attributes: BTreeSet<String> = DEFAULT_ATTRIBUTES
            .iter()
            .map(|s| s.to_string())
            .chain(extra_attributes)
            .collect();

        let mut ids = HashSet::new();
        for rule in &rules {
            if !ids.insert(rule.id.as_str()) {
                return Err(RuleError::DuplicateId(rule.id.clone()));
            }
            rule.condition.check().map_err(|reason| RuleError::InvalidRule {
                id: rule.id.clone(),
                reason,
            })?;
            if rule.conclusions.is_empty() {
                return Err(RuleError::InvalidRule {
                    id: rule.id.clone(),
                    reason: "no conclusions".into(),
                });
            }
            if let Some(c) = rule.conclusions.iter().find(|c| !attributes.contains(&c.attribute)) {
                return Err(RuleError::UnknownAttribute {
                    id: rule.id.clone(),
                    attribute: c.attribute.clone(),
                });
            }
        }

        let mut by_metric: BTreeMap<Metric, Vec<usize>> = BTreeMap::new();
        for (i, rule) in rules.iter().enumerate() {
            let bucket = by_metric.entry(rule.metric).or_default();
            for &j in bucket.iter() {
                let other: &Rule = &rules[j];
                if let Some(value) = other.condition.first_overlap(&rule.condition) {
                    return Err(RuleError::Overlap {
                        first: other.id.clone(),
                        second: rule.id.clone(),
                        metric: rule.metric,
                        value,
                    });
                }
            }
            bucket.push(i);
        }

        Ok(KnowledgeBase {
            name: name.into(),
            rules,
            attributes,
            by_metric,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn attributes(&self) -> &BTreeSet<String> {
        &self.attributes
    }

    pub fn rule(&self, id: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.id == id)
    }

    pub fn rules_for(&self, metric: Metric) -> impl Iterator<Item = &Rule> {
        self.by_metric
            .get(&metric)
            .into_iter()
            .flatten()
            .map(|&i| &self.rules[i])
    }

    /// The rule whose condition holds for `value`. Disjointness makes it unique.
    pub fn matching(&self, metric: Metric, value: f64) -> Option<&Rule> {
        self.rules_for(metric).find(|r| r.condition.matches(value))
    }

    /// Smallest non-negative integer no rule of `metric` covers.
    pub fn first_gap(&self, metric: Metric) -> Option<u64> {
        let conditions: Vec<&Condition> = self.rules_for(metric).map(|r| &r.condition).collect();
        let mut v = 0u64;
        loop {
            match conditions.iter().find(|c| c.contains(v)) {
                None => return Some(v),
                Some(Condition::Range { hi: None, .. }) => return None,
                Some(Condition::Range { hi: Some(h), .. }) => v = h.checked_add(1)?,
                Some(Condition::Values(_)) => v = v.checked_add(1)?,
            }
        }
    }

    /// True when every metric's rules cover all of `[0, inf)`.
    pub fn is_complete(&self) -> bool {
        Metric::ALL.iter().all(|&m| self.first_gap(m).is_none())
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct RulesDocument {
    schema_version: u32,
    name: String,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    complete: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    attributes: Vec<String>,
    rules: Vec<RuleEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RuleEntry {
    id: String,
    metric: Metric,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    band: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    range: Option<(u64, Option<u64>)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    values: Option<Vec<u64>>,
    conclusions: Vec<Conclusion>,
}

/// Parses and validates a rules document.
///
/// When the document sets `"complete": true` every metric must be covered
/// for all non-negative values.
pub fn load_rules(document: &str) -> Result<KnowledgeBase, RuleError> {
    let de = &mut serde_json::Deserializer::from_str(document);
    let doc: RulesDocument =
        serde_path_to_error::deserialize(de).map_err(|e| RuleError::Schema {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })?;
    if doc.schema_version != SCHEMA_VERSION {
        return Err(RuleError::SchemaVersion(doc.schema_version));
    }

    let mut rules = Vec::with_capacity(doc.rules.len());
    for entry in doc.rules {
        let condition = match (entry.range, entry.values) {
            (Some((lo, hi)), None) => Condition::Range { lo, hi },
            (None, Some(values)) => Condition::Values(values.into_iter().collect()),
            _ => {
                return Err(RuleError::InvalidRule {
                    id: entry.id,
                    reason: "exactly one of `range` or `values` is required".into(),
                })
            }
        };
        rules.push(Rule {
            id: entry.id,
            metric: entry.metric,
            condition,
            conclusions: entry.conclusions,
            band: entry.band,
        });
    }

    let extra: Vec<String> = doc.attributes;
    let kb = KnowledgeBase::new(doc.name, rules, extra)?;
    if doc.complete {
        for metric in Metric::ALL {
            if let Some(value) = kb.first_gap(metric) {
                return Err(RuleError::Incomplete { metric, value });
            }
        }
    }
    Ok(kb)
}

/// Serializes a knowledge base back to the rules document form.
pub fn to_rules_document(kb: &KnowledgeBase) -> String {
    let defaults: HashSet<&str> = DEFAULT_ATTRIBUTES.iter().copied().collect();
    let doc = RulesDocument {
        schema_version: SCHEMA_VERSION,
        name: kb.name.clone(),
        complete: kb.is_complete(),
        attributes: kb
            .attributes
            .iter()
            .filter(|a| !defaults.contains(a.as_str()))
            .cloned()
            .collect(),
        rules: kb
            .rules
            .iter()
            .map(|r| {
                let (range, values) = match &r.condition {
                    Condition::Range { lo, hi } => (Some((*lo, *hi)), None),
                    Condition::Values(set) => (None, Some(set.iter().copied().collect())),
                };
                RuleEntry {
                    id: r.id.clone(),
                    metric: r.metric,
                    band: r.band.clone(),
                    range,
                    values,
                    conclusions: r.conclusions.clone(),
                }
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("rules serialize");
    s.push('\n');
    s
}

/// The built-in 42-rule base.
pub fn default_rule_base() -> KnowledgeBase {
    load_rules(DEFAULT_RULES).expect("shipped default rules are valid")
}

/// The three published example rules, encoded verbatim.
pub fn paper_rule_preset() -> KnowledgeBase {
    load_rules(REFERENCE_RULES).expect("shipped reference rules are valid")
}

pub fn builtin(name: &str) -> Result<KnowledgeBase, RuleError> {
    match name {
        "default" => Ok(default_rule_base()),
        "reference" => Ok(paper_rule_preset()),
        other => Err(RuleError::UnknownBuiltin(other.to_string())),
    }
}

/// Source text of a built-in base, for `rules list` style dumps.
pub fn builtin_source(name: &str) -> Option<&'static str> {
    match name {
        "default" => Some(DEFAULT_RULES),
        "reference" => Some(REFERENCE_RULES),
        _ => None,
    }
}

/// Per-metric rule counts, handy for summaries.
pub fn rule_counts(kb: &KnowledgeBase) -> HashMap<Metric, usize> {
    Metric::ALL
        .iter()
        .map(|&m| (m, kb.rules_for(m).count()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rule(id: &str, metric: Metric, condition: Condition) -> Rule {
        Rule {
            id: id.into(),
            metric,
            condition,
            conclusions: vec![Conclusion::new("quality", Level::Normal)],
            band: None,
        }
    }

    #[test]
    fn one_rule_per_metric_covering_everything() {
        let rules = Metric::ALL
            .iter()
            .map(|&m| rule(m.as_str(), m, Condition::at_least(0)))
            .collect();
        let kb = KnowledgeBase::new("all", rules, []).unwrap();
        assert_eq!(kb.len(), 6);
        assert!(kb.is_complete());
    }

    #[test]
    fn boundary_overlap_is_rejected() {
        let doc = r#"{"schemaVersion": 1, "name": "x", "rules": [
            {"id": "a", "metric": "WMC", "range": [0, 5], "conclusions": [{"attribute": "quality", "level": "high"}]},
            {"id": "b", "metric": "WMC", "range": [5, 10], "conclusions": [{"attribute": "quality", "level": "low"}]}]}"#;
        match load_rules(doc) {
            Err(RuleError::Overlap { first, second, value, metric }) => {
                assert_eq!((first.as_str(), second.as_str(), value, metric), ("a", "b", 5, Metric::Wmc));
            }
            other => panic!("expected overlap, got {other:?}"),
        }
    }

    #[test]
    fn same_values_on_different_metrics_do_not_overlap() {
        let rules = vec![
            rule("a", Metric::Wmc, Condition::range(0, 5)),
            rule("b", Metric::Cbo, Condition::range(0, 5)),
        ];
        assert!(KnowledgeBase::new("x", rules, []).is_ok());
    }

    #[test]
    fn invalid_bases() {
        assert!(matches!(KnowledgeBase::new("x", vec![], []), Err(RuleError::Empty)));
        let dup = vec![
            rule("a", Metric::Wmc, Condition::range(0, 1)),
            rule("a", Metric::Dit, Condition::range(0, 1)),
        ];
        assert!(matches!(KnowledgeBase::new("x", dup, []), Err(RuleError::DuplicateId(_))));
        let inverted = vec![rule("a", Metric::Wmc, Condition::range(5, 1))];
        assert!(matches!(
            KnowledgeBase::new("x", inverted, []),
            Err(RuleError::InvalidRule { .. })
        ));
        let mut unknown = rule("a", Metric::Wmc, Condition::range(0, 1));
        unknown.conclusions = vec![Conclusion::new("beauty", Level::High)];
        assert!(matches!(
            KnowledgeBase::new("x", vec![unknown.clone()], []),
            Err(RuleError::UnknownAttribute { .. })
        ));
        assert!(KnowledgeBase::new("x", vec![unknown], ["beauty".to_string()]).is_ok());
    }

    #[test]
    fn declared_completeness_is_checked() {
        let doc = r#"{"schemaVersion": 1, "name": "x", "complete": true, "rules": [
            {"id": "a", "metric": "WMC", "range": [0, 5], "conclusions": [{"attribute": "quality", "level": "high"}]}]}"#;
        assert!(matches!(
            load_rules(doc),
            Err(RuleError::Incomplete { metric: Metric::Wmc, value: 6 })
        ));
    }

    #[test]
    fn range_and_values_are_exclusive() {
        let doc = r#"{"schemaVersion": 1, "name": "x", "rules": [
            {"id": "a", "metric": "WMC", "range": [0, 5], "values": [1], "conclusions": [{"attribute": "quality", "level": "high"}]}]}"#;
        assert!(matches!(load_rules(doc), Err(RuleError::InvalidRule { .. })));
        let bad_level = r#"{"schemaVersion": 1, "name": "x", "rules": [
            {"id": "a", "metric": "WMC", "range": [0, 5], "conclusions": [{"attribute": "quality", "level": "great"}]}]}"#;
        match load_rules(bad_level) {
            Err(RuleError::Schema { path, .. }) => assert_eq!(path, "rules[0].conclusions[0].level"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn default_base_shape() {
        let kb = default_rule_base();
        assert_eq!(kb.len(), 42);
        assert!(kb.is_complete());
        for (_, n) in rule_counts(&kb) {
            assert_eq!(n, 7);
        }
        let dit5 = kb.matching(Metric::Dit, 5.0).unwrap();
        assert!(dit5.conclusions.contains(&Conclusion::new("complexity", Level::Low)));
        let cbo1 = kb.matching(Metric::Cbo, 1.0).unwrap();
        assert_eq!(cbo1.band.as_deref(), Some("veryLow"));
        assert!(cbo1.conclusions.contains(&Conclusion::new("coupling", Level::VeryLow)));
        assert!(cbo1.conclusions.contains(&Conclusion::new("quality", Level::High)));
    }

    #[test]
    fn reference_preset_shape() {
        let kb = paper_rule_preset();
        assert_eq!(kb.len(), 3);
        assert!(!kb.is_complete());
        for r in kb.rules() {
            assert_eq!(r.conclusions.len(), 8);
        }
    }

    #[test]
    fn conditions_parse_and_display() {
        assert_eq!("2-5".parse::<Condition>().unwrap(), Condition::range(2, 5));
        assert_eq!("2 - 5".parse::<Condition>().unwrap(), Condition::range(2, 5));
        assert_eq!("0,1,2".parse::<Condition>().unwrap(), Condition::values([0, 1, 2]));
        assert_eq!("26+".parse::<Condition>().unwrap(), Condition::at_least(26));
        assert_eq!("7".parse::<Condition>().unwrap(), Condition::values([7]));
        assert!("5-2".parse::<Condition>().is_err());
        assert!("a-b".parse::<Condition>().is_err());
        assert!("".parse::<Condition>().is_err());
        assert_eq!(Condition::range(2, 5).to_string(), "2 - 5");
        assert_eq!(Condition::values([0, 1, 2]).to_string(), "0, 1, 2");
        assert_eq!(Condition::at_least(26).to_string(), "26+");
    }

    #[test]
    fn real_valued_matching() {
        assert!(Condition::range(1, 5).matches(1.5));
        assert!(!Condition::values([1]).matches(1.5));
        assert!(!Condition::at_least(0).matches(-1.0));
        assert!(!Condition::at_least(0).matches(f64::NAN));
    }

    #[test]
    fn in_range_alias_reads_as_normal() {
        let c: Conclusion =
            serde_json::from_str(r#"{"attribute": "inheritanceDepth", "level": "inRange"}"#).unwrap();
        assert_eq!(c.level, Level::Normal);
        assert!(Level::VeryLow < Level::Low && Level::High < Level::VeryHigh);
    }

    #[test]
    fn builtin_lookup() {
        assert_eq!(builtin("reference").unwrap().name(), "reference");
        assert!(matches!(builtin("nope"), Err(RuleError::UnknownBuiltin(_))));
    }
}
