//! Forward chaining over metric facts.
//!
//! Facts are consumed in input order. Each fact fires the single rule whose
//! condition it satisfies and the rule's conclusions are asserted into the
//! working memory of the fact's scope. When two facts conclude the same
//! attribute the later assertion wins; every assertion stays in the trace.
//!
//! Derived attribute facts are terminal: no rule is conditioned on an
//! attribute, so the chain is one step deep.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Condition, KnowledgeBase, Level};
use crate::metrics::{Metric, MetricRecord, ProjectMetrics};

/// Scope label used for project-level evaluation.
pub const PROJECT_SCOPE: &str = "project";

#[derive(Debug, Clone, PartialEq)]
pub struct Fact {
    pub metric: Metric,
    pub value: f64,
    pub scope: String,
}

impl Fact {
    pub fn new(metric: Metric, value: f64, scope: impl Into<String>) -> Self {
        Fact {
            metric,
            value,
            scope: scope.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Derivation {
    pub attribute: String,
    pub level: Level,
    pub rule_id: String,
}

/// What happened to one input fact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FactOutcome {
    pub metric: Metric,
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule_id: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Assessment {
    pub scope: String,
    /// Final `(attribute, level)` per attribute, in first-assertion order,
    /// each tagged with the rule that last wrote it.
    pub derived: Vec<Derivation>,
    pub fired_rules: Vec<String>,
    /// Every assertion in firing order, including overwritten ones.
    pub trace: Vec<Derivation>,
    pub facts: Vec<FactOutcome>,
}

impl Assessment {
    pub fn new(scope: impl Into<String>) -> Self {
        Assessment {
            scope: scope.into(),
            ..Default::default()
        }
    }

    pub fn level_of(&self, attribute: &str) -> Option<Level> {
        self.derived
            .iter()
            .find(|d| d.attribute == attribute)
            .map(|d| d.level)
    }

    pub fn contains(&self, attribute: &str, level: Level) -> bool {
        self.level_of(attribute) == Some(level)
    }

    fn assert_conclusion(&mut self, derivation: Derivation) {
        match self
            .derived
            .iter_mut()
            .find(|d| d.attribute == derivation.attribute)
        {
            Some(existing) => *existing = derivation.clone(),
            None => self.derived.push(derivation.clone()),
        }
        self.trace.push(derivation);
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum InferenceError {
    #[error("fact {metric}={value} in scope `{scope}` is not a non-negative number")]
    InvalidFact {
        metric: Metric,
        value: f64,
        scope: String,
    },
    #[error("no metric selected for range filtering")]
    EmptySelection,
}

/// Runs forward chaining and returns one assessment per scope, in order of
/// each scope's first fact.
pub fn forward_chain(facts: &[Fact], kb: &KnowledgeBase) -> Result<Vec<Assessment>, InferenceError> {
    if let Some(bad) = facts.iter().find(|f| !(f.value.is_finite() && f.value >= 0.0)) {
        return Err(InferenceError::InvalidFact {
            metric: bad.metric,
            value: bad.value,
            scope: bad.scope.clone(),
        });
    }

    let mut order: Vec<Assessment> = Vec::new();
    let mut slot: HashMap<&str, usize> = HashMap::new();
    for fact in facts {
        let idx = *slot.entry(fact.scope.as_str()).or_insert_with(|| {
            order.push(Assessment::new(fact.scope.clone()));
            order.len() - 1
        });
        let memory = &mut order[idx];

        let fired = kb.matching(fact.metric, fact.value);
        memory.facts.push(FactOutcome {
            metric: fact.metric,
            value: fact.value,
            rule_id: fired.map(|r| r.id.clone()),
        });
        let Some(rule) = fired else { continue };
        memory.fired_rules.push(rule.id.clone());
        for c in &rule.conclusions {
            memory.assert_conclusion(Derivation {
                attribute: c.attribute.clone(),
                level: c.level,
                rule_id: rule.id.clone(),
            });
        }
    }
    Ok(order)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvaluationScope {
    Class,
    Project,
}

/// Rounds a non-negative mean half-up to an integer.
pub fn round_half_up(value: f64) -> f64 {
    (value + 0.5).floor()
}

fn record_facts(record: &MetricRecord) -> Vec<Fact> {
    Metric::ALL
        .iter()
        .map(|&m| Fact::new(m, record.get(m) as f64, record.class_name.clone()))
        .collect()
}

fn evaluate_record(record: &MetricRecord, kb: &KnowledgeBase) -> Assessment {
    let facts = record_facts(record);
    forward_chain(&facts, kb)
        .expect("metric records hold non-negative integers")
        .pop()
        .unwrap_or_else(|| Assessment::new(record.class_name.clone()))
}

/// Automatic evaluation of a project.
///
/// Class scope yields one assessment per class from its six values. Project
/// scope yields a single assessment from the six per-class means, each
/// rounded half-up before band matching.
pub fn evaluate_project(
    pm: &ProjectMetrics,
    kb: &KnowledgeBase,
    scope: EvaluationScope,
) -> Vec<Assessment> {
    match scope {
        EvaluationScope::Class => {
            #[cfg(feature = "parallel")]
            {
                use rayon::prelude::*;
                pm.per_class
                    .par_iter()
                    .map(|r| evaluate_record(r, kb))
                    .collect()
            }
            #[cfg(not(feature = "parallel"))]
            {
                pm.per_class.iter().map(|r| evaluate_record(r, kb)).collect()
            }
        }
        EvaluationScope::Project => {
            let facts: Vec<Fact> = Metric::ALL
                .iter()
                .map(|&m| Fact::new(m, round_half_up(pm.means.get(m)), PROJECT_SCOPE))
                .collect();
            forward_chain(&facts, kb).expect("means are non-negative")
        }
    }
}

/// Classes split by whether their value satisfies a user-chosen condition.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeFilter {
    pub metric: Metric,
    pub condition: Condition,
    pub in_range: Vec<(String, u64)>,
    pub out_of_range: Vec<(String, u64)>,
}

/// Manual evaluation: partitions classes per selected metric condition.
/// Results come back in metric column order; later selections of the same
/// metric replace earlier ones.
pub fn filter_by_ranges(
    pm: &ProjectMetrics,
    selection: &[(Metric, Condition)],
) -> Result<Vec<RangeFilter>, InferenceError> {
    if selection.is_empty() {
        return Err(InferenceError::EmptySelection);
    }
    let chosen: BTreeMap<Metric, &Condition> = selection.iter().map(|(m, c)| (*m, c)).collect();
    Ok(chosen
        .into_iter()
        .map(|(metric, condition)| {
            let (in_range, out_of_range) = pm
                .per_class
                .iter()
                .map(|r| (r.class_name.clone(), r.get(metric)))
                .partition(|(_, v)| condition.contains(*v));
            RangeFilter {
                metric,
                condition: condition.clone(),
                in_range,
                out_of_range,
            }
        })
        .collect())
}
