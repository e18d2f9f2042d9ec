//! Lowering of parsed units into a class model.
//!
//! Method bodies are scanned token by token. Names are resolved in the order
//! local variable, own field, same-package class, single-type import; what
//! is left becomes the unresolved sentinel.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::path::PathBuf;

use thiserror::Error;

use super::lexer::{Token, TokenKind};
use super::parser::{ClassDecl, MethodDecl, SourceUnit, TypeRef};
use crate::model::{
    simple_name, validate_model, CallTarget, ClassInfo, ClassModel, Diagnostic, FieldInfo,
    MethodInfo,
};

#[derive(Debug, Error)]
pub enum LowerError {
    #[error("class `{name}` is declared in both {} and {}", first.display(), second.display())]
    DuplicateClass {
        name: String,
        first: PathBuf,
        second: PathBuf,
    },
    #[error("lowered model is inconsistent: {}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Diagnostic>),
}

const PRIMITIVES: &[&str] = &[
    "boolean", "byte", "char", "short", "int", "long", "float", "double", "void",
];

struct Unit<'a> {
    package: &'a str,
    imports: HashMap<&'a str, &'a str>,
}

struct Lowerer<'a> {
    internal: HashMap<String, (&'a ClassDecl, usize)>,
    supers: HashMap<String, Option<String>>,
    units: Vec<Unit<'a>>,
}

fn qualify(package: &str, name: &str) -> String {
    if package.is_empty() {
        name.to_string()
    } else {
        format!("{package}.{name}")
    }
}

/// Builds a class model from parsed units. Classes appear in unit order;
/// external stubs for imported or unresolvable supertypes follow, sorted.
pub fn lower_to_model(units: &[SourceUnit], project_name: &str) -> Result<ClassModel, LowerError> {
    let mut lw = Lowerer {
        internal: HashMap::new(),
        supers: HashMap::new(),
        units: Vec::new(),
    };
    let mut origin: HashMap<String, &PathBuf> = HashMap::new();
    for (u, unit) in units.iter().enumerate() {
        let imports = unit
            .imports
            .iter()
            .filter(|i| !i.is_static && !i.on_demand)
            .map(|i| (simple_name(&i.path), i.path.as_str()))
            .collect();
        lw.units.push(Unit {
            package: &unit.package_name,
            imports,
        });
        for decl in &unit.class_declarations {
            let name = qualify(&unit.package_name, &decl.name);
            if let Some(first) = origin.get(&name) {
                return Err(LowerError::DuplicateClass {
                    name,
                    first: (*first).clone(),
                    second: unit.path.clone(),
                });
            }
            origin.insert(name.clone(), &unit.path);
            lw.internal.insert(name, (decl, u));
        }
    }

    let mut model = ClassModel::new(project_name);
    for (u, unit) in units.iter().enumerate() {
        for decl in &unit.class_declarations {
            let name = qualify(&unit.package_name, &decl.name);
            let (superclass, _) = lw.supertypes(decl, u);
            lw.supers.insert(name, superclass);
        }
    }
    for (u, unit) in units.iter().enumerate() {
        for decl in &unit.class_declarations {
            model.classes.push(lw.lower_class(decl, u));
        }
    }

    let mut stubs = BTreeSet::new();
    for class in &model.classes {
        let mut refs: Vec<&String> = Vec::new();
        refs.extend(&class.superclass);
        refs.extend(&class.interfaces);
        refs.extend(class.fields.iter().filter_map(|f| f.declared_type.as_ref()));
        for m in &class.methods {
            refs.extend(m.called_methods.iter().filter_map(|c| c.class.as_ref()));
            refs.extend(&m.referenced_classes);
        }
        for r in refs {
            if !lw.internal.contains_key(r) {
                stubs.insert(r.clone());
            }
        }
    }
    model
        .classes
        .extend(stubs.into_iter().map(ClassInfo::external));

    let diags = validate_model(&model);
    if diags.is_empty() {
        Ok(model)
    } else {
        Err(LowerError::Invalid(diags))
    }
}

impl<'a> Lowerer<'a> {
    /// Resolves a type name written in unit `u`. Primitives give `None`.
    fn resolve_type(&self, name: &str, u: usize) -> Option<String> {
        if PRIMITIVES.contains(&name) {
            return None;
        }
        if let Some((first, _)) = name.split_once('.') {
            // a lower-case first segment reads as a package prefix
            return first
                .starts_with(|c: char| c.is_lowercase())
                .then(|| name.to_string());
        }
        let unit = &self.units[u];
        let same = qualify(unit.package, name);
        if self.internal.contains_key(&same) {
            return Some(same);
        }
        unit.imports.get(name).map(|q| q.to_string())
    }

    /// Supertypes always land somewhere: unresolved names become stubs
    /// named as written.
    fn supertype(&self, ty: &TypeRef, u: usize) -> String {
        self.resolve_type(&ty.name, u)
            .unwrap_or_else(|| ty.name.clone())
    }

    fn supertypes(&self, decl: &ClassDecl, u: usize) -> (Option<String>, Vec<String>) {
        if decl.is_interface {
            let ifaces = decl.extends.iter().map(|t| self.supertype(t, u)).collect();
            (None, ifaces)
        } else {
            let sup = decl.extends.first().map(|t| self.supertype(t, u));
            let ifaces = decl.implements.iter().map(|t| self.supertype(t, u)).collect();
            (sup, ifaces)
        }
    }

    /// Finds the class declaring `name/arity`, starting at `class` and
    /// walking up through model classes.
    fn find_method(&self, class: &str, name: &str, arity: usize) -> Option<String> {
        let mut seen = HashSet::new();
        let mut cur = Some(class.to_string());
        while let Some(c) = cur {
            if !seen.insert(c.clone()) {
                break;
            }
            let (decl, _) = self.internal.get(&c)?;
            if decl
                .methods
                .iter()
                .any(|m| !m.is_constructor && m.name == name && m.params.len() == arity)
            {
                return Some(c);
            }
            cur = self.supers.get(&c).cloned().flatten();
        }
        None
    }

    fn lower_class(&self, decl: &ClassDecl, u: usize) -> ClassInfo {
        let name = qualify(self.units[u].package, &decl.name);
        let (superclass, interfaces) = self.supertypes(decl, u);
        let mut info = ClassInfo {
            qualified_name: name.clone(),
            superclass,
            interfaces,
            is_interface: decl.is_interface,
            ..Default::default()
        };

        let mut own_fields = HashMap::new();
        if !decl.is_interface {
            for f in &decl.fields {
                if own_fields.contains_key(f.name.as_str()) {
                    continue;
                }
                let ty = if f.ty.primitive {
                    None
                } else {
                    self.resolve_type(&f.ty.name, u)
                };
                own_fields.insert(f.name.as_str(), ty.clone());
                info.fields.push(FieldInfo {
                    name: f.name.clone(),
                    declared_type: ty,
                    is_static: f.is_static,
                });
            }
        }

        let ctx = ClassCtx {
            lw: self,
            unit: u,
            name: &name,
            simple: &decl.name,
            superclass: info.superclass.as_deref(),
            fields: &own_fields,
        };
        let mut index: HashMap<(String, usize), usize> = HashMap::new();
        for m in &decl.methods {
            let lowered = ctx.lower_method(m);
            let key = (lowered.name.clone(), lowered.arity);
            match index.get(&key) {
                Some(&i) => {
                    let existing: &mut MethodInfo = &mut info.methods[i];
                    existing.used_fields.extend(lowered.used_fields);
                    existing.called_methods.extend(lowered.called_methods);
                    existing.referenced_classes.extend(lowered.referenced_classes);
                }
                None => {
                    index.insert(key, info.methods.len());
                    info.methods.push(lowered);
                }
            }
        }
        info
    }
}

struct ClassCtx<'a> {
    lw: &'a Lowerer<'a>,
    unit: usize,
    name: &'a str,
    simple: &'a str,
    superclass: Option<&'a str>,
    fields: &'a HashMap<&'a str, Option<String>>,
}

impl ClassCtx<'_> {
    fn lower_method(&self, m: &MethodDecl) -> MethodInfo {
        let mut out = MethodInfo::new(m.name.clone(), m.params.len());
        out.is_constructor = m.is_constructor;
        let mut locals: HashMap<String, Option<String>> = HashMap::new();
        for p in &m.params {
            let ty = self.var_type(&p.ty.name, p.ty.primitive);
            self.touch(&mut out, ty.as_deref());
            locals.insert(p.name.clone(), ty);
        }
        if let Some(body) = &m.body {
            self.scan(body, &mut locals, &mut out);
        }
        out
    }

    fn var_type(&self, name: &str, primitive: bool) -> Option<String> {
        if primitive {
            None
        } else {
            self.lw.resolve_type(name, self.unit)
        }
    }

    fn touch(&self, out: &mut MethodInfo, class: Option<&str>) {
        if let Some(c) = class {
            if c != self.name {
                out.referenced_classes.insert(c.to_string());
            }
        }
    }

    fn call_on(&self, out: &mut MethodInfo, class: Option<&str>, method: &str, arity: usize) {
        let target = match class {
            Some(c) => {
                let declaring = self.lw.find_method(c, method, arity);
                CallTarget::resolved(declaring.unwrap_or_else(|| c.to_string()), method, arity)
            }
            None => CallTarget::unresolved(method, arity),
        };
        out.called_methods.insert(target);
    }

    fn scan(&self, toks: &[Token], locals: &mut HashMap<String, Option<String>>, out: &mut MethodInfo) {
        let eof = Token {
            kind: TokenKind::Eof,
            text: String::new(),
            line: 0,
            column: 0,
        };
        let at = |i: usize| toks.get(i).unwrap_or(&eof);
        let mut i = 0;
        while i < toks.len() {
            let t = &toks[i];
            let after_dot = i > 0 && toks[i - 1].is(".");
            if t.is("this") && !after_dot {
                if at(i + 1).is(".") && at(i + 2).is_ident() {
                    let member = &at(i + 2).text;
                    if at(i + 3).is("(") {
                        let arity = arity_at(toks, i + 3);
                        match self.lw.find_method(self.name, member, arity) {
                            Some(c) => {
                                out.called_methods.insert(CallTarget::resolved(c, member, arity));
                            }
                            None => {
                                out.called_methods.insert(CallTarget::unresolved(member, arity));
                            }
                        }
                    } else if self.fields.contains_key(member.as_str()) {
                        out.used_fields.insert(member.clone());
                    }
                    i += 3;
                } else if at(i + 1).is("(") {
                    let arity = arity_at(toks, i + 1);
                    out.called_methods
                        .insert(CallTarget::resolved(self.name, self.simple, arity));
                    i += 1;
                } else {
                    i += 1;
                }
                continue;
            }
            if t.is("super") && !after_dot {
                if at(i + 1).is("(") {
                    if let Some(sup) = self.superclass {
                        let arity = arity_at(toks, i + 1);
                        out.called_methods
                            .insert(CallTarget::resolved(sup, simple_name(sup), arity));
                    }
                    i += 1;
                } else if at(i + 1).is(".") && at(i + 2).is_ident() && at(i + 3).is("(") {
                    let arity = arity_at(toks, i + 3);
                    self.call_on(out, self.superclass, &at(i + 2).text, arity);
                    i += 3;
                } else {
                    i += 1;
                }
                continue;
            }
            if t.is("new") {
                let Some((ty, next)) = type_at(toks, i + 1) else {
                    i += 1;
                    continue;
                };
                let class = self.var_type(&ty, false);
                if at(next).is("(") {
                    let arity = arity_at(toks, next);
                    let ctor = simple_name(&ty).to_string();
                    match &class {
                        Some(c) => out
                            .called_methods
                            .insert(CallTarget::resolved(c.clone(), ctor, arity)),
                        None => out.called_methods.insert(CallTarget::unresolved(ctor, arity)),
                    };
                } else {
                    self.touch(out, class.as_deref());
                }
                i = next;
                continue;
            }
            let primitive = t.kind == TokenKind::Keyword && PRIMITIVES.contains(&t.text.as_str());
            if (t.is_ident() || primitive) && !after_dot && !(i > 0 && toks[i - 1].is("new")) {
                if let Some((ty, name_at)) = local_decl_at(toks, i) {
                    let class = self.var_type(&ty, primitive);
                    self.touch(out, class.as_deref());
                    locals.insert(toks[name_at].text.clone(), class);
                    i = name_at + 1;
                    continue;
                }
            }
            if t.is_ident() && !after_dot {
                let name = t.text.as_str();
                if at(i + 1).is("(") {
                    let arity = arity_at(toks, i + 1);
                    match self.lw.find_method(self.name, name, arity) {
                        Some(c) => out.called_methods.insert(CallTarget::resolved(c, name, arity)),
                        None => out.called_methods.insert(CallTarget::unresolved(name, arity)),
                    };
                    i += 1;
                    continue;
                }
                if at(i + 1).is(".") && at(i + 2).is_ident() {
                    let receiver = if let Some(ty) = locals.get(name) {
                        ty.clone()
                    } else if let Some(ty) = self.fields.get(name) {
                        out.used_fields.insert(name.to_string());
                        ty.clone()
                    } else {
                        self.lw.resolve_type(name, self.unit)
                    };
                    let member = &at(i + 2).text;
                    if at(i + 3).is("(") {
                        let arity = arity_at(toks, i + 3);
                        self.call_on(out, receiver.as_deref(), member, arity);
                    } else {
                        self.touch(out, receiver.as_deref());
                    }
                    i += 3;
                    continue;
                }
                if !locals.contains_key(name) && self.fields.contains_key(name) && !at(i + 1).is("::") {
                    out.used_fields.insert(name.to_string());
                }
                i += 1;
                continue;
            }
            if t.is(".") && at(i + 1).is_ident() && at(i + 2).is("(") {
                let arity = arity_at(toks, i + 2);
                out.called_methods
                    .insert(CallTarget::unresolved(at(i + 1).text.clone(), arity));
                i += 2;
                continue;
            }
            i += 1;
        }
    }
}

/// Argument count of the call whose `(` sits at `open`.
fn arity_at(toks: &[Token], open: usize) -> usize {
    let mut depth = 0usize;
    let mut commas = 0;
    let mut empty = true;
    for t in &toks[open + 1..] {
        if t.kind == TokenKind::Punct {
            match t.text.as_str() {
                "(" | "[" | "{" => depth += 1,
                ")" | "]" | "}" if depth == 0 => break,
                ")" | "]" | "}" => depth -= 1,
                "," if depth == 0 => commas += 1,
                _ => {}
            }
        }
        empty = false;
    }
    if empty {
        0
    } else {
        commas + 1
    }
}

/// Reads a type name starting at `i`: dotted identifiers, optional type
/// arguments and array brackets. Returns the name and the index after it.
fn type_at(toks: &[Token], mut i: usize) -> Option<(String, usize)> {
    let first = toks.get(i)?;
    if !first.is_ident() {
        return None;
    }
    let mut name = first.text.clone();
    i += 1;
    loop {
        if toks.get(i).is_some_and(|t| t.is("<")) {
            i = skip_type_args(toks, i)?;
        }
        if toks.get(i).is_some_and(|t| t.is(".")) && toks.get(i + 1).is_some_and(Token::is_ident) {
            name.push('.');
            name.push_str(&toks[i + 1].text);
            i += 2;
        } else {
            break;
        }
    }
    Some((name, i))
}

fn skip_type_args(toks: &[Token], mut i: usize) -> Option<usize> {
    let mut depth: i32 = 0;
    loop {
        let t = toks.get(i)?;
        match t.text.as_str() {
            "<" => depth += 1,
            ">" => depth -= 1,
            ">>" => depth -= 2,
            ">>>" => depth -= 3,
            "," | "." | "?" | "&" | "[" | "]" | "extends" | "super" => {}
            _ if t.is_ident() => {}
            _ if t.kind == TokenKind::Keyword && PRIMITIVES.contains(&t.text.as_str()) => {}
            _ => return None,
        }
        i += 1;
        if depth <= 0 {
            return (depth == 0).then_some(i);
        }
    }
}

/// Detects `Type name` followed by `=`, `;`, `,`, `:` or `)`.
fn local_decl_at(toks: &[Token], i: usize) -> Option<(String, usize)> {
    let (ty, mut j) = if toks[i].kind == TokenKind::Keyword {
        (toks[i].text.clone(), i + 1)
    } else {
        type_at(toks, i)?
    };
    while toks.get(j).is_some_and(|t| t.is("[")) && toks.get(j + 1).is_some_and(|t| t.is("]")) {
        j += 2;
    }
    let name = toks.get(j)?;
    if !name.is_ident() {
        return None;
    }
    let follow = toks.get(j + 1)?;
    matches!(follow.text.as_str(), "=" | ";" | "," | ":" | ")")
        .then_some((ty, j))
        .filter(|_| follow.kind == TokenKind::Punct)
}
