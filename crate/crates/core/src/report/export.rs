//! Machine-readable result documents.
//!
//! Every document carries `schemaVersion`, a `kind` tag and the inputs it was
//! computed from. Exporting a document that was read back with
//! [`import_document`] gives the same bytes.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::Metric;
use crate::rules::{Assessment, RangeFilter};
use crate::versions::{VersionRecord, VersionVerdict};

pub const EXPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct InputRef {
    pub path: String,
    /// Modification time in seconds since the Unix epoch, when known.
    #[serde(default)]
    pub modified_unix: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ClassValue {
    pub class: String,
    pub value: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FilterResult {
    pub metric: Metric,
    pub condition: String,
    pub in_range: Vec<ClassValue>,
    pub out_of_range: Vec<ClassValue>,
}

impl From<&RangeFilter> for FilterResult {
    fn from(f: &RangeFilter) -> Self {
        let values = |items: &[(String, u64)]| {
            items
                .iter()
                .map(|(class, value)| ClassValue {
                    class: class.clone(),
                    value: *value,
                })
                .collect()
        };
        FilterResult {
            metric: f.metric,
            condition: f.condition.to_string(),
            in_range: values(&f.in_range),
            out_of_range: values(&f.out_of_range),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum Results {
    #[serde(rename_all = "camelCase")]
    Evaluation {
        rule_base: String,
        scope: String,
        assessments: Vec<Assessment>,
    },
    #[serde(rename_all = "camelCase")]
    RangeFilter { filters: Vec<FilterResult> },
    #[serde(rename_all = "camelCase")]
    Comparison {
        versions: Vec<VersionRecord>,
        verdicts: Vec<VersionVerdict>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExportDocument {
    pub schema_version: u32,
    pub inputs: Vec<InputRef>,
    #[serde(flatten)]
    pub results: Results,
}

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("export document is malformed: {0}")]
    Malformed(#[from] serde_json::Error),
    #[error("unsupported export schemaVersion {0}")]
    SchemaVersion(u32),
}

impl ExportDocument {
    pub fn new(inputs: Vec<InputRef>, results: Results) -> Self {
        ExportDocument {
            schema_version: EXPORT_SCHEMA_VERSION,
            inputs,
            results,
        }
    }
}

/// Pretty-printed JSON with a trailing newline.
pub fn export_document(doc: &ExportDocument) -> String {
    let mut text = serde_json::to_string_pretty(doc).expect("export documents always serialize");
    text.push('\n');
    text
}

pub fn import_document(text: &str) -> Result<ExportDocument, ExportError> {
    let doc: ExportDocument = serde_json::from_str(text)?;
    if doc.schema_version != EXPORT_SCHEMA_VERSION {
        return Err(ExportError::SchemaVersion(doc.schema_version));
    }
    Ok(doc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::{forward_chain, paper_rule_preset, Fact, PROJECT_SCOPE};

    #[test]
    fn single_rule_assessment_export() {
        let facts = [Fact::new(Metric::Dit, 5.0, PROJECT_SCOPE)];
        let assessments = forward_chain(&facts, &paper_rule_preset()).unwrap();
        let doc = ExportDocument::new(
            vec![InputRef {
                path: "m.csv".into(),
                modified_unix: Some(1),
            }],
            Results::Evaluation {
                rule_base: "reference".into(),
                scope: "project".into(),
                assessments,
            },
        );
        let text = export_document(&doc);
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["kind"], "evaluation");
        assert_eq!(value["assessments"][0]["derived"].as_array().unwrap().len(), 8);
        assert_eq!(value["assessments"][0]["firedRules"].as_array().unwrap().len(), 1);

        let again = export_document(&import_document(&text).unwrap());
        assert_eq!(text, again);
    }

    #[test]
    fn rejects_other_schema_versions() {
        let text = r#"{"schemaVersion": 9, "inputs": [], "kind": "rangeFilter", "filters": []}"#;
        assert!(matches!(import_document(text), Err(ExportError::SchemaVersion(9))));
    }
}
