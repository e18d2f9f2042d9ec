//! Language-neutral class model shared by the frontend and the metric engine.
//!
//! A [`ClassModel`] is plain data. [`validate_model`] checks the structural
//! invariants and [`load_class_model`] only hands out models that pass it.
//!
//! # Document format
//!
//! Class-model documents are JSON:
//!
//! ```json
//! {
//!   "schemaVersion": 1,
//!   "projectName": "demo",
//!   "classes": [
//!     { "name": "p.Base", "external": false, "fields": [{ "name": "x", "type": null }],
//!       "methods": [{ "name": "get", "arity": 0, "usesFields": ["x"],
//!                     "calls": [{ "class": "p.Other", "method": "f", "arity": 1 }],
//!                     "touchesClasses": ["p.Other"] }] },
//!     { "name": "p.Child", "extends": "p.Base" },
//!     { "name": "java.lang.Thread", "external": true }
//!   ]
//! }
//! ```
//!
//! Optional keys: `extends`, `implements`, `interface`, `external`, `fields`,
//! `methods`; per field `type` and `static`; per method `constructor`,
//! `usesFields`, `calls`, `touchesClasses`; per call `class` (absent means the
//! target could not be resolved) and `arity`.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ClassModel {
    #[serde(default)]
    pub project_name: String,
    #[serde(default)]
    pub classes: Vec<ClassInfo>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ClassInfo {
    #[serde(rename = "name")]
    pub qualified_name: String,
    #[serde(rename = "extends", default, skip_serializing_if = "Option::is_none")]
    pub superclass: Option<String>,
    /// `implements` edges. Never part of the inheritance tree metrics.
    #[serde(rename = "implements", default, skip_serializing_if = "Vec::is_empty")]
    pub interfaces: Vec<String>,
    #[serde(rename = "interface", default, skip_serializing_if = "is_false")]
    pub is_interface: bool,
    #[serde(rename = "external", default)]
    pub is_external: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fields: Vec<FieldInfo>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub methods: Vec<MethodInfo>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct FieldInfo {
    pub name: String,
    #[serde(rename = "type", default)]
    pub declared_type: Option<String>,
    #[serde(rename = "static", default, skip_serializing_if = "is_false")]
    pub is_static: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct MethodInfo {
    pub name: String,
    #[serde(default)]
    pub arity: usize,
    #[serde(rename = "constructor", default, skip_serializing_if = "is_false")]
    pub is_constructor: bool,
    #[serde(rename = "usesFields", default)]
    pub used_fields: BTreeSet<String>,
    #[serde(rename = "calls", default)]
    pub called_methods: BTreeSet<CallTarget>,
    #[serde(rename = "touchesClasses", default)]
    pub referenced_classes: BTreeSet<String>,
}

/// A method invoked from a method body.
///
/// `class == None` is the unresolved sentinel: the receiver's class could not
/// be determined. `arity == None` means the caller did not record it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CallTarget {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<String>,
    pub method: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arity: Option<usize>,
}

impl CallTarget {
    pub fn resolved(class: impl Into<String>, method: impl Into<String>, arity: usize) -> Self {
        CallTarget {
            class: Some(class.into()),
            method: method.into(),
            arity: Some(arity),
        }
    }

    pub fn unresolved(method: impl Into<String>, arity: usize) -> Self {
        CallTarget {
            class: None,
            method: method.into(),
            arity: Some(arity),
        }
    }

    pub fn is_resolved(&self) -> bool {
        self.class.is_some()
    }
}

fn is_false(b: &bool) -> bool {
    !*b
}

impl ClassModel {
    pub fn new(project_name: impl Into<String>) -> Self {
        ClassModel {
            project_name: project_name.into(),
            classes: Vec::new(),
        }
    }

    pub fn class(&self, name: &str) -> Option<&ClassInfo> {
        self.classes.iter().find(|c| c.qualified_name == name)
    }

    /// Classes that are analyzed, i.e. everything except external stubs.
    pub fn internal_classes(&self) -> impl Iterator<Item = &ClassInfo> {
        self.classes.iter().filter(|c| !c.is_external)
    }
}

impl ClassInfo {
    pub fn new(name: impl Into<String>) -> Self {
        ClassInfo {
            qualified_name: name.into(),
            ..Default::default()
        }
    }

    pub fn external(name: impl Into<String>) -> Self {
        ClassInfo {
            qualified_name: name.into(),
            is_external: true,
            ..Default::default()
        }
    }

    pub fn extends(mut self, superclass: impl Into<String>) -> Self {
        self.superclass = Some(superclass.into());
        self
    }

    pub fn with_field(mut self, field: FieldInfo) -> Self {
        self.fields.push(field);
        self
    }

    pub fn with_method(mut self, method: MethodInfo) -> Self {
        self.methods.push(method);
        self
    }

    pub fn field(&self, name: &str) -> Option<&FieldInfo> {
        self.fields.iter().find(|f| f.name == name)
    }

    pub fn simple_name(&self) -> &str {
        simple_name(&self.qualified_name)
    }
}

impl FieldInfo {
    pub fn new(name: impl Into<String>) -> Self {
        FieldInfo {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn typed(name: impl Into<String>, ty: impl Into<String>) -> Self {
        FieldInfo {
            name: name.into(),
            declared_type: Some(ty.into()),
            is_static: false,
        }
    }
}

impl MethodInfo {
    pub fn new(name: impl Into<String>, arity: usize) -> Self {
        MethodInfo {
            name: name.into(),
            arity,
            ..Default::default()
        }
    }

    pub fn uses<I, S>(mut self, fields: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.used_fields.extend(fields.into_iter().map(Into::into));
        self
    }

    pub fn calls(mut self, target: CallTarget) -> Self {
        self.called_methods.insert(target);
        self
    }

    pub fn touches(mut self, class: impl Into<String>) -> Self {
        self.referenced_classes.insert(class.into());
        self
    }
}

pub fn simple_name(qualified: &str) -> &str {
    qualified.rsplit('.').next().unwrap_or(qualified)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DiagnosticCode {
    EmptyName,
    DuplicateClass,
    SelfInheritance,
    UnknownSuperclass,
    UnknownInterface,
    InheritanceCycle,
    ExternalHasMembers,
    ExternalHasSuperclass,
    DuplicateMethod,
    DuplicateField,
    UnknownField,
    UnknownClassReference,
}

impl DiagnosticCode {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagnosticCode::EmptyName => "EMPTY_NAME",
            DiagnosticCode::DuplicateClass => "DUPLICATE_CLASS",
            DiagnosticCode::SelfInheritance => "SELF_INHERITANCE",
            DiagnosticCode::UnknownSuperclass => "UNKNOWN_SUPERCLASS",
            DiagnosticCode::UnknownInterface => "UNKNOWN_INTERFACE",
            DiagnosticCode::InheritanceCycle => "INHERITANCE_CYCLE",
            DiagnosticCode::ExternalHasMembers => "EXTERNAL_HAS_MEMBERS",
            DiagnosticCode::ExternalHasSuperclass => "EXTERNAL_HAS_SUPERCLASS",
            DiagnosticCode::DuplicateMethod => "DUPLICATE_METHOD",
            DiagnosticCode::DuplicateField => "DUPLICATE_FIELD",
            DiagnosticCode::UnknownField => "UNKNOWN_FIELD",
            DiagnosticCode::UnknownClassReference => "UNKNOWN_CLASS_REFERENCE",
        }
    }
}

impl fmt::Display for DiagnosticCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub code: DiagnosticCode,
    pub location: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}: {}", self.code, self.location, self.message)
    }
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("class model schema violation at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error("unsupported schemaVersion {0} (expected {SCHEMA_VERSION})")]
    SchemaVersion(u32),
    #[error("duplicate class `{0}`")]
    DuplicateClass(String),
    #[error("inheritance cycle: {}", .0.join(" -> "))]
    InheritanceCycle(Vec<String>),
    #[error("invalid class model:\n{}", format_diagnostics(.0))]
    Invalid(Vec<Diagnostic>),
}

fn format_diagnostics(diags: &[Diagnostic]) -> String {
    diags
        .iter()
        .map(|d| format!("  {d}"))
        .collect::<Vec<_>>()
        .join("\n")
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct ModelDocumentIn {
    schema_version: u32,
    #[serde(default)]
    project_name: String,
    #[serde(default)]
    classes: Vec<ClassInfo>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ModelDocumentOut<'a> {
    schema_version: u32,
    project_name: &'a str,
    classes: &'a [ClassInfo],
}

/// Parses and validates a class-model document.
pub fn load_class_model(document: &str) -> Result<ClassModel, ModelError> {
    let de = &mut serde_json::Deserializer::from_str(document);
    let doc: ModelDocumentIn =
        serde_path_to_error::deserialize(de).map_err(|e| ModelError::Schema {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })?;
    if doc.schema_version != SCHEMA_VERSION {
        return Err(ModelError::SchemaVersion(doc.schema_version));
    }
    let model = ClassModel {
        project_name: doc.project_name,
        classes: doc.classes,
    };

    let diags = validate_model(&model);
    if let Some(d) = diags
        .iter()
        .find(|d| d.code == DiagnosticCode::DuplicateClass)
    {
        return Err(ModelError::DuplicateClass(d.location.clone()));
    }
    if diags
        .iter()
        .any(|d| d.code == DiagnosticCode::InheritanceCycle)
    {
        let cycle = find_inheritance_cycle(&model).unwrap_or_default();
        return Err(ModelError::InheritanceCycle(cycle));
    }
    if !diags.is_empty() {
        return Err(ModelError::Invalid(diags));
    }
    Ok(model)
}

/// Serializes a model to its document form (pretty JSON, trailing newline).
pub fn to_document_string(model: &ClassModel) -> String {
    let doc = ModelDocumentOut {
        schema_version: SCHEMA_VERSION,
        project_name: &model.project_name,
        classes: &model.classes,
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("class model serializes");
    s.push('\n');
    s
}

/// Checks every class-model invariant and returns one diagnostic per violation.
pub fn validate_model(model: &ClassModel) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let mut push = |code, location: String, message: String| {
        diags.push(Diagnostic {
            code,
            location,
            message,
        })
    };

    let mut seen: HashSet<&str> = HashSet::new();
    for class in &model.classes {
        let name = class.qualified_name.as_str();
        if name.is_empty() {
            push(
                DiagnosticCode::EmptyName,
                "<unnamed class>".into(),
                "class name must not be empty".into(),
            );
        }
        if !seen.insert(name) {
            push(
                DiagnosticCode::DuplicateClass,
                name.to_string(),
                format!("class `{name}` is declared more than once"),
            );
        }
    }
    let known: HashMap<&str, &ClassInfo> = model
        .classes
        .iter()
        .map(|c| (c.qualified_name.as_str(), c))
        .collect();

    for class in &model.classes {
        let name = class.qualified_name.as_str();
        if let Some(sup) = &class.superclass {
            if sup == name {
                push(
                    DiagnosticCode::SelfInheritance,
                    name.to_string(),
                    "class extends itself".into(),
                );
            } else if !known.contains_key(sup.as_str()) {
                push(
                    DiagnosticCode::UnknownSuperclass,
                    name.to_string(),
                    format!("superclass `{sup}` is neither in the model nor an external stub"),
                );
            }
        }
        for iface in &class.interfaces {
            if !known.contains_key(iface.as_str()) {
                push(
                    DiagnosticCode::UnknownInterface,
                    name.to_string(),
                    format!("interface `{iface}` is neither in the model nor an external stub"),
                );
            }
        }

        if class.is_external {
            if !class.methods.is_empty() || !class.fields.is_empty() {
                push(
                    DiagnosticCode::ExternalHasMembers,
                    name.to_string(),
                    "external stubs carry no methods or fields".into(),
                );
            }
            if class.superclass.is_some() {
                push(
                    DiagnosticCode::ExternalHasSuperclass,
                    name.to_string(),
                    "external stubs carry no extends edge".into(),
                );
            }
        }

        let mut field_names = HashSet::new();
        for field in &class.fields {
            if !field_names.insert(field.name.as_str()) {
                push(
                    DiagnosticCode::DuplicateField,
                    format!("{name}.{}", field.name),
                    format!("field `{}` declared more than once", field.name),
                );
            }
            if let Some(ty) = &field.declared_type {
                if !known.contains_key(ty.as_str()) {
                    push(
                        DiagnosticCode::UnknownClassReference,
                        format!("{name}.{}", field.name),
                        format!("field type `{ty}` is not in the model"),
                    );
                }
            }
        }

        let mut signatures = HashSet::new();
        for method in &class.methods {
            let loc = format!("{name}.{}/{}", method.name, method.arity);
            if !signatures.insert((method.name.as_str(), method.arity)) {
                push(
                    DiagnosticCode::DuplicateMethod,
                    loc.clone(),
                    "method signature (name, arity) declared more than once".into(),
                );
            }
            for used in &method.used_fields {
                if !field_names.contains(used.as_str()) && class.field(used).is_none() {
                    push(
                        DiagnosticCode::UnknownField,
                        loc.clone(),
                        format!("uses field `{used}` which `{name}` does not declare"),
                    );
                }
            }
            for call in &method.called_methods {
                if let Some(target) = &call.class {
                    if !known.contains_key(target.as_str()) {
                        push(
                            DiagnosticCode::UnknownClassReference,
                            loc.clone(),
                            format!("calls `{target}.{}` but `{target}` is not in the model", call.method),
                        );
                    }
                }
            }
            for touched in &method.referenced_classes {
                if !known.contains_key(touched.as_str()) {
                    push(
                        DiagnosticCode::UnknownClassReference,
                        loc.clone(),
                        format!("touches `{touched}` which is not in the model"),
                    );
                }
            }
        }
    }

    if let Some(cycle) = find_inheritance_cycle(model) {
        push(
            DiagnosticCode::InheritanceCycle,
            cycle[0].clone(),
            format!("inheritance cycle {}", cycle.join(" -> ")),
        );
    }
    diags
}

/// Returns the members of the first inheritance cycle found, in chain order.
pub fn find_inheritance_cycle(model: &ClassModel) -> Option<Vec<String>> {
    let parent: HashMap<&str, &str> = model
        .classes
        .iter()
        .filter_map(|c| {
            c.superclass
                .as_deref()
                .filter(|s| *s != c.qualified_name)
                .map(|s| (c.qualified_name.as_str(), s))
        })
        .collect();

    // 0 = unvisited, 1 = on current chain, 2 = finished
    let mut state: HashMap<&str, u8> = HashMap::new();
    for start in model.classes.iter().map(|c| c.qualified_name.as_str()) {
        if state.get(start).copied().unwrap_or(0) != 0 {
            continue;
        }
        let mut chain = Vec::new();
        let mut cur = Some(start);
        while let Some(node) = cur {
            match state.get(node).copied().unwrap_or(0) {
                0 => {
                    state.insert(node, 1);
                    chain.push(node);
                    cur = parent.get(node).copied();
                }
                1 => {
                    let pos = chain.iter().position(|n| *n == node).unwrap();
                    return Some(chain[pos..].iter().map(|s| s.to_string()).collect());
                }
                _ => break,
            }
        }
        for node in chain {
            state.insert(node, 2);
        }
    }
    None
}

/// Indices of `model.classes` ordered so that every superclass precedes its
/// subclasses. `None` when the inheritance relation has a cycle.
pub fn inheritance_order(model: &ClassModel) -> Option<Vec<usize>> {
    let index: HashMap<&str, usize> = model
        .classes
        .iter()
        .enumerate()
        .map(|(i, c)| (c.qualified_name.as_str(), i))
        .collect();
    let n = model.classes.len();
    let mut state = vec![0u8; n];
    let mut order = Vec::with_capacity(n);
    for start in 0..n {
        let mut chain = Vec::new();
        let mut cur = Some(start);
        while let Some(i) = cur {
            match state[i] {
                0 => {
                    state[i] = 1;
                    chain.push(i);
                    cur = model.classes[i]
                        .superclass
                        .as_deref()
                        .and_then(|s| index.get(s).copied());
                }
                1 => return None,
                _ => break,
            }
        }
        for &i in chain.iter().rev() {
            state[i] = 2;
            order.push(i);
        }
    }
    Some(order)
}
