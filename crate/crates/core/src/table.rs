//! Metrics-table import and export.
//!
//! Two equivalent forms are accepted wherever project metrics are consumed:
//!
//! * delimited text whose header is `CLASS,WMC,DIT,NOC,CBO,RFC,LCOM`
//!   (comma or tab separated, `#` starts a comment line), one class per row;
//! * a JSON document `{"schemaVersion": 1, "projectName": ..., "perClass": [...]}`.
//!
//! Class-model documents are accepted too and reduced through
//! [`compute_all`](crate::metrics::compute_all).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::{compute_all, Metric, MetricMeans, MetricRecord, ProjectMetrics};
use crate::model::{load_class_model, ModelError, SCHEMA_VERSION};

pub const TABLE_HEADER: [&str; 7] = ["CLASS", "WMC", "DIT", "NOC", "CBO", "RFC", "LCOM"];

#[derive(Debug, Error)]
pub enum TableError {
    #[error("metrics table header must be `{expected}`, found `{found}`", expected = TABLE_HEADER.join(","), found = .0)]
    Header(String),
    #[error("metrics table line {line}: {message}")]
    Row { line: u64, message: String },
    #[error("metrics table is empty (no header)")]
    Empty,
    #[error("metrics document schema violation at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error("unsupported schemaVersion {0}")]
    SchemaVersion(u32),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

/// What kind of document a metrics source turned out to be.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceKind {
    Table,
    Structured,
    ClassModel,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct MetricsDocument {
    schema_version: u32,
    #[serde(default)]
    project_name: String,
    #[serde(default)]
    per_class: Vec<MetricRecord>,
    // Recomputed on import, written on export for readers.
    #[serde(default)]
    means: Option<MetricMeans>,
}

pub(crate) fn detect_delimiter(text: &str) -> u8 {
    let header = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .unwrap_or("");
    if header.contains('\t') && !header.contains(',') {
        b'\t'
    } else {
        b','
    }
}

pub(crate) fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .delimiter(detect_delimiter(text))
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .has_headers(true)
        .flexible(true)
        .from_reader(text.as_bytes())
}

/// Parses the delimited metrics-table form.
pub fn parse_metrics_table(
    text: &str,
    project_name: impl Into<String>,
) -> Result<ProjectMetrics, TableError> {
    if text.lines().all(|l| l.trim().is_empty() || l.trim_start().starts_with('#')) {
        return Err(TableError::Empty);
    }
    let mut rdr = reader(text);
    let header = rdr.headers()?.clone();
    let found: Vec<&str> = header.iter().collect();
    if found != TABLE_HEADER {
        return Err(TableError::Header(found.join(",")));
    }

    let mut records = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        if row.len() != TABLE_HEADER.len() {
            return Err(TableError::Row {
                line,
                message: format!("expected {} columns, found {}", TABLE_HEADER.len(), row.len()),
            });
        }
        let name = row[0].to_string();
        if name.is_empty() {
            return Err(TableError::Row {
                line,
                message: "empty class name".into(),
            });
        }
        let mut values = [0u64; 6];
        for (slot, (metric, cell)) in values.iter_mut().zip(Metric::ALL.iter().zip(row.iter().skip(1))) {
            *slot = cell.parse().map_err(|_| TableError::Row {
                line,
                message: format!("{metric} value `{cell}` is not a non-negative integer"),
            })?;
        }
        records.push(MetricRecord::new(name, values));
    }
    Ok(ProjectMetrics::from_records(project_name, records))
}

/// Renders the delimited metrics-table form (comma separated).
pub fn to_metrics_table(pm: &ProjectMetrics) -> String {
    let mut wtr = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    wtr.write_record(TABLE_HEADER).expect("in-memory write");
    for r in &pm.per_class {
        let mut row = vec![r.class_name.clone()];
        row.extend(r.values().iter().map(u64::to_string));
        wtr.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(wtr.into_inner().expect("in-memory flush")).expect("utf-8 table")
}

pub fn parse_metrics_document(text: &str) -> Result<ProjectMetrics, TableError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let doc: MetricsDocument =
        serde_path_to_error::deserialize(de).map_err(|e| TableError::Schema {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })?;
    if doc.schema_version != SCHEMA_VERSION {
        return Err(TableError::SchemaVersion(doc.schema_version));
    }
    Ok(ProjectMetrics::from_records(doc.project_name, doc.per_class))
}

pub fn to_metrics_document(pm: &ProjectMetrics) -> String {
    let doc = MetricsDocument {
        schema_version: SCHEMA_VERSION,
        project_name: pm.project_name.clone(),
        per_class: pm.per_class.clone(),
        means: Some(pm.means),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("metrics serialize");
    s.push('\n');
    s
}

/// Classifies a document by shape without fully parsing it.
pub fn sniff(text: &str) -> SourceKind {
    if !text.trim_start().starts_with('{') {
        return SourceKind::Table;
    }
    match serde_json::from_str::<serde_json::Value>(text) {
        Ok(serde_json::Value::Object(map)) if map.contains_key("classes") => SourceKind::ClassModel,
        _ => SourceKind::Structured,
    }
}

/// Loads project metrics from any supported source form.
pub fn load_project_metrics(
    text: &str,
    default_name: &str,
) -> Result<(ProjectMetrics, SourceKind), TableError> {
    let kind = sniff(text);
    let pm = match kind {
        SourceKind::Table => parse_metrics_table(text, default_name)?,
        SourceKind::Structured => {
            let mut pm = parse_metrics_document(text)?;
            if pm.project_name.is_empty() {
                pm.project_name = default_name.to_string();
            }
            pm
        }
        SourceKind::ClassModel => {
            let model = load_class_model(text)?;
            let mut pm = compute_all(&model);
            if pm.project_name.is_empty() {
                pm.project_name = default_name.to_string();
            }
            pm
        }
    };
    Ok((pm, kind))
}

#[cfg(test)]
mod tests {
    use super::*;

    const PRINTED_TABLE: &str = "\
SINIFLAR\tWMC\tDIT\tNOC\tCBO\tRFC\tLCOM
";

    #[test]
    fn header_is_normative() {
        assert!(matches!(
            parse_metrics_table(PRINTED_TABLE, "p"),
            Err(TableError::Header(_))
        ));
    }

    #[test]
    fn tab_and_comma_forms_agree() {
        let comma = "CLASS,WMC,DIT,NOC,CBO,RFC,LCOM\n# note\nA,4,1,0,6,9,4\n";
        let tab = "CLASS\tWMC\tDIT\tNOC\tCBO\tRFC\tLCOM\nA\t4\t1\t0\t6\t9\t4\n";
        let a = parse_metrics_table(comma, "p").unwrap();
        let b = parse_metrics_table(tab, "p").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.per_class[0].values(), [4, 1, 0, 6, 9, 4]);
    }

    #[test]
    fn bad_cell_reports_line() {
        let text = "CLASS,WMC,DIT,NOC,CBO,RFC,LCOM\nA,4,1,0,6,9,4\nB,1.5,0,0,0,0,0\n";
        match parse_metrics_table(text, "p") {
            Err(TableError::Row { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        let short = "CLASS,WMC,DIT,NOC,CBO,RFC,LCOM\nA,4,1\n";
        assert!(matches!(parse_metrics_table(short, "p"), Err(TableError::Row { .. })));
        assert!(matches!(parse_metrics_table("# only\n", "p"), Err(TableError::Empty)));
    }

    #[test]
    fn header_only_table_is_empty_project() {
        let pm = parse_metrics_table("CLASS,WMC,DIT,NOC,CBO,RFC,LCOM\n", "p").unwrap();
        assert!(pm.per_class.is_empty());
    }

    #[test]
    fn table_and_document_round_trip() {
        let pm = ProjectMetrics::from_records(
            "demo",
            vec![
                MetricRecord::new("a.B", [1, 2, 3, 4, 5, 6]),
                MetricRecord::new("odd,name", [0, 0, 0, 0, 0, 0]),
            ],
        );
        let table = to_metrics_table(&pm);
        assert!(table.starts_with("CLASS,WMC,DIT,NOC,CBO,RFC,LCOM\n"));
        assert_eq!(parse_metrics_table(&table, "demo").unwrap(), pm);
        let doc = to_metrics_document(&pm);
        assert_eq!(parse_metrics_document(&doc).unwrap(), pm);
    }

    #[test]
    fn sources_are_sniffed() {
        let model = r#"{"schemaVersion": 1, "projectName": "m", "classes": [{"name": "A", "methods": [{"name": "f", "arity": 0}]}]}"#;
        let (pm, kind) = load_project_metrics(model, "x").unwrap();
        assert_eq!(kind, SourceKind::ClassModel);
        assert_eq!(pm.per_class[0].wmc, 1);
        assert_eq!(pm.project_name, "m");

        let doc = r#"{"schemaVersion": 1, "perClass": [{"className": "A", "wmc": 2, "dit": 0, "noc": 0, "cbo": 0, "rfc": 2, "lcom": 1}]}"#;
        let (pm, kind) = load_project_metrics(doc, "x").unwrap();
        assert_eq!(kind, SourceKind::Structured);
        assert_eq!(pm.project_name, "x");
        assert_eq!(pm.means.lcom, 1.0);
    }
}
