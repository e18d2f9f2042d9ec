//! Cross-version comparison of per-class metric means.
//!
//! For each selected metric the versions holding the smallest and largest
//! mean are reported, ties included, and mapped onto quality and effort
//! verdicts through a per-metric direction table.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::{Metric, MetricMeans};
use crate::table::{self, TableError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VersionRecord {
    pub version_name: String,
    pub source_path: String,
    pub means: MetricMeans,
}

/// Whether a growing metric value signals worse code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    HigherIsWorse,
    HigherIsBetter,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DirectionTable {
    noc: Direction,
}

impl Default for DirectionTable {
    fn default() -> Self {
        DirectionTable {
            noc: Direction::HigherIsWorse,
        }
    }
}

impl DirectionTable {
    pub fn with_noc(noc: Direction) -> Self {
        DirectionTable { noc }
    }

    pub fn direction(&self, metric: Metric) -> Direction {
        match metric {
            Metric::Noc => self.noc,
            _ => Direction::HigherIsWorse,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Interpretation {
    pub quality_best: Vec<String>,
    pub quality_worst: Vec<String>,
    pub effort_most: Vec<String>,
    pub effort_least: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VersionVerdict {
    pub metric: Metric,
    pub min_versions: Vec<String>,
    pub min_value: f64,
    pub max_versions: Vec<String>,
    pub max_value: f64,
    pub direction: Direction,
    pub interpretation: Interpretation,
}

#[derive(Debug, Error)]
pub enum VersionError {
    #[error("at least two versions are required, got {0}")]
    TooFewVersions(usize),
    #[error("no metric selected")]
    EmptySelection,
    #[error("duplicate version name `{0}`")]
    DuplicateName(String),
    #[error("version `{name}` has invalid {metric} mean {value}")]
    InvalidMean {
        name: String,
        metric: Metric,
        value: f64,
    },
    #[error("cannot read `{path}`: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("`{path}`: {source}")]
    Malformed { path: PathBuf, source: TableError },
    #[error("`{path}` line {line}: {message}")]
    MeansRow {
        path: PathBuf,
        line: u64,
        message: String,
    },
    #[error("{given} version names given for {records} versions")]
    NameCount { given: usize, records: usize },
}

/// Compares versions on the selected metrics, in column order.
pub fn compare_versions(
    records: &[VersionRecord],
    metrics: &[Metric],
    directions: DirectionTable,
) -> Result<Vec<VersionVerdict>, VersionError> {
    if records.len() < 2 {
        return Err(VersionError::TooFewVersions(records.len()));
    }
    if metrics.is_empty() {
        return Err(VersionError::EmptySelection);
    }
    check_names(records.iter().map(|r| r.version_name.as_str()))?;
    for r in records {
        for m in Metric::ALL {
            let v = r.means.get(m);
            if !(v.is_finite() && v >= 0.0) {
                return Err(VersionError::InvalidMean {
                    name: r.version_name.clone(),
                    metric: m,
                    value: v,
                });
            }
        }
    }

    let mut selected: Vec<Metric> = metrics.to_vec();
    selected.sort();
    selected.dedup();

    Ok(selected
        .into_iter()
        .map(|metric| {
            let values = records.iter().map(|r| r.means.get(metric));
            let min_value = values.clone().fold(f64::INFINITY, f64::min);
            let max_value = values.fold(f64::NEG_INFINITY, f64::max);
            let holding = |target: f64| -> Vec<String> {
                records
                    .iter()
                    .filter(|r| r.means.get(metric) == target)
                    .map(|r| r.version_name.clone())
                    .collect()
            };
            let min_versions = holding(min_value);
            let max_versions = holding(max_value);
            let direction = directions.direction(metric);
            let (worst, best) = match direction {
                Direction::HigherIsWorse => (&max_versions, &min_versions),
                Direction::HigherIsBetter => (&min_versions, &max_versions),
            };
            let interpretation = Interpretation {
                quality_best: best.clone(),
                quality_worst: worst.clone(),
                effort_most: worst.clone(),
                effort_least: best.clone(),
            };
            VersionVerdict {
                metric,
                min_versions,
                min_value,
                max_versions,
                max_value,
                direction,
                interpretation,
            }
        })
        .collect())
}

fn check_names<'a>(names: impl Iterator<Item = &'a str>) -> Result<(), VersionError> {
    let mut seen = HashSet::new();
    for name in names {
        if !seen.insert(name) {
            return Err(VersionError::DuplicateName(name.to_string()));
        }
    }
    Ok(())
}

/// How automatically assigned version names are spelled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VersionNaming {
    pub prefix: String,
}

impl VersionNaming {
    pub fn english() -> Self {
        VersionNaming {
            prefix: "VERSION".into(),
        }
    }

    pub fn turkish() -> Self {
        VersionNaming {
            prefix: "SÜRÜM".into(),
        }
    }

    pub fn name(&self, position: usize) -> String {
        format!("{}-{}", self.prefix, position)
    }
}

pub const MEANS_HEADER: [&str; 8] = ["VERSION", "PATH", "WMC", "DIT", "NOC", "CBO", "RFC", "LCOM"];

/// A means table holds one version per row:
/// `VERSION,PATH,WMC,DIT,NOC,CBO,RFC,LCOM`. Empty `VERSION` cells are
/// auto-named; empty `PATH` cells default to the table's own path.
pub fn is_means_table(text: &str) -> bool {
    if text.trim_start().starts_with('{') {
        return false;
    }
    let mut rdr = table::reader(text);
    rdr.headers()
        .map(|h| h.iter().next() == Some("VERSION"))
        .unwrap_or(false)
}

fn parse_means_table(
    text: &str,
    path: &Path,
) -> Result<Vec<(Option<String>, VersionRecord)>, VersionError> {
    let row_err = |line: u64, message: String| VersionError::MeansRow {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut rdr = table::reader(text);
    let header = rdr.headers().map_err(|e| row_err(1, e.to_string()))?.clone();
    let found: Vec<&str> = header.iter().collect();
    if found != MEANS_HEADER {
        return Err(row_err(1, format!("header must be `{}`", MEANS_HEADER.join(","))));
    }
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(|e| row_err(0, e.to_string()))?;
        let line = row.position().map_or(0, |p| p.line());
        if row.len() != MEANS_HEADER.len() {
            return Err(row_err(line, format!("expected {} columns, found {}", MEANS_HEADER.len(), row.len())));
        }
        let mut values = [0f64; 6];
        for (slot, (metric, cell)) in values.iter_mut().zip(Metric::ALL.iter().zip(row.iter().skip(2))) {
            let v: f64 = cell
                .parse()
                .map_err(|_| row_err(line, format!("{metric} value `{cell}` is not a number")))?;
            if !(v.is_finite() && v >= 0.0) {
                return Err(row_err(line, format!("{metric} value `{cell}` must be non-negative")));
            }
            *slot = v;
        }
        let name = Some(row[0].to_string()).filter(|s| !s.is_empty());
        let source = if row[1].is_empty() {
            path.display().to_string()
        } else {
            row[1].to_string()
        };
        out.push((
            name,
            VersionRecord {
                version_name: String::new(),
                source_path: source,
                means: MetricMeans::from_array(values),
            },
        ));
    }
    Ok(out)
}

/// Reduces one already-read document to version records (unnamed).
pub fn versions_from_text(
    text: &str,
    path: &Path,
) -> Result<Vec<(Option<String>, VersionRecord)>, VersionError> {
    if is_means_table(text) {
        return parse_means_table(text, path);
    }
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let (pm, _) = table::load_project_metrics(text, &stem).map_err(|source| VersionError::Malformed {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(vec![(
        None,
        VersionRecord {
            version_name: String::new(),
            source_path: path.display().to_string(),
            means: pm.means,
        },
    )])
}

/// Loads version records from files in order.
///
/// Each path may hold a metrics table, a structured metrics document, a
/// class model (reduced through `compute_all`) or a means table with one row
/// per version. `names`, when given, overrides every name; otherwise names
/// from means tables are kept and the rest become `PREFIX-k` by position.
pub fn load_versions<P: AsRef<Path>>(
    paths: &[P],
    names: Option<&[String]>,
    naming: &VersionNaming,
) -> Result<Vec<VersionRecord>, VersionError> {
    let texts: Vec<(PathBuf, String)> = paths
        .iter()
        .map(|p| {
            let p = p.as_ref();
            std::fs::read_to_string(p)
                .map(|t| (p.to_path_buf(), t))
                .map_err(|source| VersionError::Io {
                    path: p.to_path_buf(),
                    source,
                })
        })
        .collect::<Result<_, _>>()?;
    versions_from_documents(&texts, names, naming)
}

pub fn versions_from_documents(
    documents: &[(PathBuf, String)],
    names: Option<&[String]>,
    naming: &VersionNaming,
) -> Result<Vec<VersionRecord>, VersionError> {
    let mut pending = Vec::new();
    for (path, text) in documents {
        pending.extend(versions_from_text(text, path)?);
    }
    if let Some(names) = names {
        if names.len() != pending.len() {
            return Err(VersionError::NameCount {
                given: names.len(),
                records: pending.len(),
            });
        }
        check_names(names.iter().map(String::as_str))?;
    }
    let records: Vec<VersionRecord> = pending
        .into_iter()
        .enumerate()
        .map(|(i, (explicit, mut rec))| {
            rec.version_name = match names {
                Some(names) => names[i].clone(),
                None => explicit.unwrap_or_else(|| naming.name(i + 1)),
            };
            rec
        })
        .collect();
    check_names(records.iter().map(|r| r.version_name.as_str()))?;
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(name: &str, values: [f64; 6]) -> VersionRecord {
        VersionRecord {
            version_name: name.into(),
            source_path: String::new(),
            means: MetricMeans::from_array(values),
        }
    }

    fn figure_six() -> Vec<VersionRecord> {
        vec![
            rec("SÜRÜM-1", [1.409, 0.547, 0.0, 9.094, 12.642, 0.151]),
            rec("SÜRÜM-2", [5.0, 0.17, 0.0, 2.819, 5.778, 0.047]),
            rec("SÜRÜM-3", [5.0, 0.269, 0.0, 2.023, 5.48, 0.023]),
            rec("SÜRÜM-4", [2.462, 0.52, 0.0, 1.117, 6.795, 0.058]),
            rec("SÜRÜM-5", [0.0, 0.52, 0.0, 1.117, 6.795, 0.058]),
        ]
    }

    #[test]
    fn wmc_verdict_matches_published_report() {
        let v = &compare_versions(&figure_six(), &[Metric::Wmc], DirectionTable::default()).unwrap()[0];
        assert_eq!(v.min_versions, ["SÜRÜM-5"]);
        assert_eq!(v.min_value, 0.0);
        assert_eq!(v.max_versions, ["SÜRÜM-2", "SÜRÜM-3"]);
        assert_eq!(v.max_value, 5.0);
        assert_eq!(v.interpretation.quality_worst, ["SÜRÜM-2", "SÜRÜM-3"]);
        assert_eq!(v.interpretation.effort_most, ["SÜRÜM-2", "SÜRÜM-3"]);
        assert_eq!(v.interpretation.effort_least, ["SÜRÜM-5"]);
        assert_eq!(v.interpretation.quality_best, ["SÜRÜM-5"]);
    }

    #[test]
    fn total_tie() {
        let v = &compare_versions(&figure_six(), &[Metric::Noc], DirectionTable::default()).unwrap()[0];
        assert_eq!(v.min_versions.len(), 5);
        assert_eq!(v.min_versions, v.max_versions);
    }

    #[test]
    fn two_versions_noc() {
        let recs = [rec("v1", [0.0; 6]), rec("v2", [0.0, 0.0, 3.0, 0.0, 0.0, 0.0])];
        let v = &compare_versions(&recs, &[Metric::Noc], DirectionTable::default()).unwrap()[0];
        assert_eq!(v.min_versions, ["v1"]);
        assert_eq!(v.max_versions, ["v2"]);
        assert_eq!(v.interpretation.quality_worst, ["v2"]);

        let flipped = DirectionTable::with_noc(Direction::HigherIsBetter);
        let v = &compare_versions(&recs, &[Metric::Noc], flipped).unwrap()[0];
        assert_eq!(v.interpretation.quality_best, ["v2"]);
        assert_eq!(v.interpretation.effort_least, ["v2"]);
    }

    #[test]
    fn comparison_errors() {
        let one = [rec("v1", [0.0; 6])];
        assert!(matches!(
            compare_versions(&one, &Metric::ALL, DirectionTable::default()),
            Err(VersionError::TooFewVersions(1))
        ));
        let two = [rec("v1", [0.0; 6]), rec("v1", [1.0; 6])];
        assert!(matches!(
            compare_versions(&two, &Metric::ALL, DirectionTable::default()),
            Err(VersionError::DuplicateName(_))
        ));
        let two = [rec("v1", [0.0; 6]), rec("v2", [1.0; 6])];
        assert!(matches!(
            compare_versions(&two, &[], DirectionTable::default()),
            Err(VersionError::EmptySelection)
        ));
    }

    #[test]
    fn means_table_rows_become_versions() {
        let text = "VERSION,PATH,WMC,DIT,NOC,CBO,RFC,LCOM\n,a,1.409,0.547,0,9.094,12.642,0.151\nlast,,5,0,0,0,0,0\n";
        let docs = vec![(PathBuf::from("v.csv"), text.to_string())];
        let recs = versions_from_documents(&docs, None, &VersionNaming::turkish()).unwrap();
        assert_eq!(recs[0].version_name, "SÜRÜM-1");
        assert_eq!(recs[0].source_path, "a");
        assert_eq!(recs[0].means.rfc, 12.642);
        assert_eq!(recs[1].version_name, "last");
        assert_eq!(recs[1].source_path, "v.csv");
    }

    #[test]
    fn mixed_sources_compose_with_metrics() {
        let table = "CLASS,WMC,DIT,NOC,CBO,RFC,LCOM\nA,2,0,0,0,2,1\nB,4,1,0,0,4,0\n";
        let model = r#"{"schemaVersion": 1, "classes": [{"name": "A", "methods": [{"name": "f", "arity": 0}]}]}"#;
        let docs = vec![
            (PathBuf::from("t.csv"), table.to_string()),
            (PathBuf::from("m.json"), model.to_string()),
        ];
        let recs = versions_from_documents(&docs, None, &VersionNaming::english()).unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].means.wmc, 3.0);
        assert_eq!(recs[0].means.lcom, 0.5);
        assert_eq!(recs[1].means.wmc, 1.0);
        assert_eq!(recs[1].version_name, "VERSION-2");
    }

    #[test]
    fn explicit_names() {
        let table = "CLASS,WMC,DIT,NOC,CBO,RFC,LCOM\nA,2,0,0,0,2,1\n";
        let docs = vec![
            (PathBuf::from("a.csv"), table.to_string()),
            (PathBuf::from("b.csv"), table.to_string()),
        ];
        let dup = vec!["x".to_string(), "x".to_string()];
        assert!(matches!(
            versions_from_documents(&docs, Some(&dup), &VersionNaming::english()),
            Err(VersionError::DuplicateName(n)) if n == "x"
        ));
        let short = vec!["x".to_string()];
        assert!(matches!(
            versions_from_documents(&docs, Some(&short), &VersionNaming::english()),
            Err(VersionError::NameCount { .. })
        ));
        let ok = vec!["1.0".to_string(), "2.0".to_string()];
        let recs = versions_from_documents(&docs, Some(&ok), &VersionNaming::english()).unwrap();
        assert_eq!(recs[1].version_name, "2.0");
    }

    #[test]
    fn unreadable_path() {
        let err = load_versions(&["/nonexistent/v1.csv"], None, &VersionNaming::english()).unwrap_err();
        assert!(matches!(err, VersionError::Io { .. }));
    }

    #[test]
    fn malformed_document() {
        let docs = vec![(PathBuf::from("bad.csv"), "nonsense\n1,2\n".to_string())];
        assert!(matches!(
            versions_from_documents(&docs, None, &VersionNaming::english()),
            Err(VersionError::Malformed { .. })
        ));
    }
}
