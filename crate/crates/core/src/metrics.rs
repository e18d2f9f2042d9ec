//! The six Chidamber & Kemerer class metrics.
//!
//! Every function here is pure over an immutable [`ClassModel`]; per-class
//! work in [`compute_all`] fans out across threads when the `parallel`
//! feature is enabled and is merged back in qualified-name order.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::model::{ClassInfo, ClassModel, MethodInfo};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Metric {
    Wmc,
    Dit,
    Noc,
    Cbo,
    Rfc,
    Lcom,
}

impl Metric {
    /// Column order of the metrics table: WMC, DIT, NOC, CBO, RFC, LCOM.
    pub const ALL: [Metric; 6] = [
        Metric::Wmc,
        Metric::Dit,
        Metric::Noc,
        Metric::Cbo,
        Metric::Rfc,
        Metric::Lcom,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Wmc => "WMC",
            Metric::Dit => "DIT",
            Metric::Noc => "NOC",
            Metric::Cbo => "CBO",
            Metric::Rfc => "RFC",
            Metric::Lcom => "LCOM",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown metric `{0}` (expected one of WMC, DIT, NOC, CBO, RFC, LCOM)")]
pub struct UnknownMetric(pub String);

impl FromStr for Metric {
    type Err = UnknownMetric;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let trimmed = s.trim();
        Metric::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(trimmed))
            .ok_or_else(|| UnknownMetric(trimmed.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct MetricRecord {
    pub class_name: String,
    pub wmc: u64,
    pub dit: u64,
    pub noc: u64,
    pub cbo: u64,
    pub rfc: u64,
    pub lcom: u64,
}

impl MetricRecord {
    pub fn new(class_name: impl Into<String>, values: [u64; 6]) -> Self {
        let [wmc, dit, noc, cbo, rfc, lcom] = values;
        MetricRecord {
            class_name: class_name.into(),
            wmc,
            dit,
            noc,
            cbo,
            rfc,
            lcom,
        }
    }

    pub fn get(&self, metric: Metric) -> u64 {
        match metric {
            Metric::Wmc => self.wmc,
            Metric::Dit => self.dit,
            Metric::Noc => self.noc,
            Metric::Cbo => self.cbo,
            Metric::Rfc => self.rfc,
            Metric::Lcom => self.lcom,
        }
    }

    pub fn values(&self) -> [u64; 6] {
        Metric::ALL.map(|m| self.get(m))
    }
}

/// Per-metric real values, indexed in [`Metric::ALL`] order.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub struct MetricMeans {
    pub wmc: f64,
    pub dit: f64,
    pub noc: f64,
    pub cbo: f64,
    pub rfc: f64,
    pub lcom: f64,
}

impl MetricMeans {
    pub fn from_array(values: [f64; 6]) -> Self {
        let [wmc, dit, noc, cbo, rfc, lcom] = values;
        MetricMeans {
            wmc,
            dit,
            noc,
            cbo,
            rfc,
            lcom,
        }
    }

    pub fn get(&self, metric: Metric) -> f64 {
        match metric {
            Metric::Wmc => self.wmc,
            Metric::Dit => self.dit,
            Metric::Noc => self.noc,
            Metric::Cbo => self.cbo,
            Metric::Rfc => self.rfc,
            Metric::Lcom => self.lcom,
        }
    }

    pub fn to_array(&self) -> [f64; 6] {
        Metric::ALL.map(|m| self.get(m))
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ProjectMetrics {
    pub project_name: String,
    pub per_class: Vec<MetricRecord>,
    pub means: MetricMeans,
}

impl ProjectMetrics {
    /// Builds the project view, computing arithmetic per-class means.
    /// An empty project has all means equal to 0.
    pub fn from_records(project_name: impl Into<String>, per_class: Vec<MetricRecord>) -> Self {
        let means = means_of(&per_class);
        ProjectMetrics {
            project_name: project_name.into(),
            per_class,
            means,
        }
    }
}

pub fn means_of(records: &[MetricRecord]) -> MetricMeans {
    if records.is_empty() {
        return MetricMeans::default();
    }
    let n = records.len() as f64;
    MetricMeans::from_array(Metric::ALL.map(|m| {
        let sum: u64 = records.iter().map(|r| r.get(m)).sum();
        sum as f64 / n
    }))
}

/// Formats a metric value with at most three decimals and no trailing zeros
/// (`5`, `1.409`, `0.667`).
pub fn format_value(value: f64) -> String {
    let s = format!("{value:.3}");
    let s = if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    };
    if s == "-0" {
        "0".to_string()
    } else {
        s
    }
}

/// Per-method weight used by WMC.
pub trait MethodComplexity: Sync {
    fn complexity(&self, method: &MethodInfo) -> u64;
}

/// Every method weighs 1, so WMC is the declared method count.
#[derive(Debug, Clone, Copy, Default)]
pub struct UnitComplexity;

impl MethodComplexity for UnitComplexity {
    fn complexity(&self, _method: &MethodInfo) -> u64 {
        1
    }
}

pub fn wmc(class: &ClassInfo) -> u64 {
    wmc_with(class, &UnitComplexity)
}

pub fn wmc_with(class: &ClassInfo, weights: &dyn MethodComplexity) -> u64 {
    class.methods.iter().map(|m| weights.complexity(m)).sum()
}

pub fn dit(class: &ClassInfo, model: &ClassModel) -> u64 {
    ModelIndex::new(model).dit(class)
}

pub fn noc(class: &ClassInfo, model: &ClassModel) -> u64 {
    ModelIndex::new(model).noc(class)
}

pub fn cbo(class: &ClassInfo, model: &ClassModel) -> u64 {
    ModelIndex::new(model).cbo(class)
}

/// Response set size: declared methods plus distinct methods they call,
/// one call level deep. Identity is (class or unresolved, name, arity).
pub fn rfc(class: &ClassInfo) -> u64 {
    let own = Some(class.qualified_name.as_str());
    let mut response: HashSet<(Option<&str>, &str, Option<usize>)> = class
        .methods
        .iter()
        .map(|m| (own, m.name.as_str(), Some(m.arity)))
        .collect();
    for method in &class.methods {
        for call in &method.called_methods {
            response.insert((call.class.as_deref(), call.method.as_str(), call.arity));
        }
    }
    response.len() as u64
}

/// Method pairs with disjoint instance-field usage minus pairs sharing a
/// field, clamped at zero. Static fields are not instance variables.
pub fn lcom(class: &ClassInfo) -> u64 {
    let statics: HashSet<&str> = class
        .fields
        .iter()
        .filter(|f| f.is_static)
        .map(|f| f.name.as_str())
        .collect();
    let usage: Vec<BTreeSet<&str>> = class
        .methods
        .iter()
        .map(|m| {
            m.used_fields
                .iter()
                .map(String::as_str)
                .filter(|f| !statics.contains(f))
                .collect()
        })
        .collect();
    lcom_of_sets(&usage)
}

fn lcom_of_sets(usage: &[BTreeSet<&str>]) -> u64 {
    let (mut disjoint, mut sharing) = (0u64, 0u64);
    for (i, a) in usage.iter().enumerate() {
        for b in &usage[i + 1..] {
            if a.is_disjoint(b) {
                disjoint += 1;
            } else {
                sharing += 1;
            }
        }
    }
    disjoint.saturating_sub(sharing)
}

/// Lookup tables shared by the tree and coupling metrics.
pub struct ModelIndex<'a> {
    model: &'a ClassModel,
    by_name: HashMap<&'a str, usize>,
    children: Vec<u64>,
    partners: Vec<BTreeSet<usize>>,
}

impl<'a> ModelIndex<'a> {
    pub fn new(model: &'a ClassModel) -> Self {
        let by_name: HashMap<&str, usize> = model
            .classes
            .iter()
            .enumerate()
            .map(|(i, c)| (c.qualified_name.as_str(), i))
            .collect();
        let n = model.classes.len();
        let mut index = ModelIndex {
            model,
            by_name,
            children: vec![0; n],
            partners: vec![BTreeSet::new(); n],
        };

        for (i, class) in model.classes.iter().enumerate() {
            if class.is_external {
                continue;
            }
            if let Some(p) = index.internal_parent(i) {
                index.children[p] += 1;
            }
            for target in outgoing_references(class) {
                let Some(&j) = index.by_name.get(target) else {
                    continue;
                };
                if j == i || model.classes[j].is_external {
                    continue;
                }
                index.partners[i].insert(j);
                index.partners[j].insert(i);
            }
        }
        index
    }

    pub fn position(&self, class: &ClassInfo) -> Option<usize> {
        self.by_name.get(class.qualified_name.as_str()).copied()
    }

    /// Superclass index, only when both ends are non-external model classes.
    fn internal_parent(&self, i: usize) -> Option<usize> {
        let class = &self.model.classes[i];
        if class.is_external {
            return None;
        }
        let p = *self.by_name.get(class.superclass.as_deref()?)?;
        (!self.model.classes[p].is_external && p != i).then_some(p)
    }

    fn ancestors(&self, i: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut cur = self.internal_parent(i);
        while let Some(p) = cur {
            if out.contains(&p) || p == i {
                break;
            }
            out.push(p);
            cur = self.internal_parent(p);
        }
        out
    }

    pub fn dit(&self, class: &ClassInfo) -> u64 {
        self.position(class)
            .map_or(0, |i| self.ancestors(i).len() as u64)
    }

    pub fn noc(&self, class: &ClassInfo) -> u64 {
        self.position(class).map_or(0, |i| self.children[i])
    }

    pub fn cbo(&self, class: &ClassInfo) -> u64 {
        let Some(i) = self.position(class) else {
            return 0;
        };
        if class.is_external {
            return 0;
        }
        let ancestors = self.ancestors(i);
        self.partners[i]
            .iter()
            .filter(|&&j| !ancestors.contains(&j) && !self.ancestors(j).contains(&i))
            .count() as u64
    }

    pub fn record(&self, class: &ClassInfo, weights: &dyn MethodComplexity) -> MetricRecord {
        MetricRecord {
            class_name: class.qualified_name.clone(),
            wmc: wmc_with(class, weights),
            dit: self.dit(class),
            noc: self.noc(class),
            cbo: self.cbo(class),
            rfc: rfc(class),
            lcom: lcom(class),
        }
    }
}

fn outgoing_references(class: &ClassInfo) -> impl Iterator<Item = &str> {
    class.methods.iter().flat_map(|m| {
        m.called_methods
            .iter()
            .filter_map(|c| c.class.as_deref())
            .chain(m.referenced_classes.iter().map(String::as_str))
    })
}

fn sorted_internal(model: &ClassModel) -> Vec<&ClassInfo> {
    let mut classes: Vec<&ClassInfo> = model.internal_classes().collect();
    classes.sort_by(|a, b| a.qualified_name.cmp(&b.qualified_name));
    classes
}

/// Metrics for every non-external class, ordered by qualified name, plus means.
pub fn compute_all(model: &ClassModel) -> ProjectMetrics {
    compute_all_with(model, &UnitComplexity)
}

pub fn compute_all_with(model: &ClassModel, weights: &dyn MethodComplexity) -> ProjectMetrics {
    #[cfg(feature = "parallel")]
    {
        compute_all_parallel(model, weights)
    }
    #[cfg(not(feature = "parallel"))]
    {
        compute_all_sequential(model, weights)
    }
}

pub fn compute_all_sequential(
    model: &ClassModel,
    weights: &dyn MethodComplexity,
) -> ProjectMetrics {
    let index = ModelIndex::new(model);
    let records = sorted_internal(model)
        .into_iter()
        .map(|c| index.record(c, weights))
        .collect();
    ProjectMetrics::from_records(model.project_name.clone(), records)
}

#[cfg(feature = "parallel")]
pub fn compute_all_parallel(model: &ClassModel, weights: &dyn MethodComplexity) -> ProjectMetrics {
    use rayon::prelude::*;

    let index = ModelIndex::new(model);
    let records = sorted_internal(model)
        .into_par_iter()
        .map(|c| index.record(c, weights))
        .collect();
    ProjectMetrics::from_records(model.project_name.clone(), records)
}
