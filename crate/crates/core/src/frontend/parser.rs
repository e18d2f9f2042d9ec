//! Recursive-descent parser for the declaration layer of the Java subset.
//!
//! Package, imports, class and interface headers, fields and method
//! signatures are parsed. Method bodies are kept as raw token streams;
//! reference extraction works on those tokens later.

use std::path::Path;

use super::lexer::{tokenize, Token, TokenKind};
use super::ParseDiagnostic;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceUnit {
    pub path: std::path::PathBuf,
    pub package_name: String,
    pub imports: Vec<Import>,
    pub class_declarations: Vec<ClassDecl>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Import {
    pub path: String,
    pub is_static: bool,
    pub on_demand: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeRef {
    /// As written, without type arguments: `int`, `List`, `java.util.Map`.
    pub name: String,
    pub primitive: bool,
    pub array_dims: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassDecl {
    pub name: String,
    pub is_interface: bool,
    pub extends: Vec<TypeRef>,
    pub implements: Vec<TypeRef>,
    pub fields: Vec<FieldDecl>,
    pub methods: Vec<MethodDecl>,
    pub line: u32,
    pub column: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldDecl {
    pub name: String,
    pub ty: TypeRef,
    pub is_static: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Param {
    pub name: String,
    pub ty: TypeRef,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodDecl {
    pub name: String,
    pub return_type: Option<TypeRef>,
    pub params: Vec<Param>,
    pub is_constructor: bool,
    pub is_static: bool,
    /// Tokens strictly between the body braces; `None` for abstract methods.
    pub body: Option<Vec<Token>>,
}

const PRIMITIVES: &[&str] = &["boolean", "byte", "char", "short", "int", "long", "float", "double"];

const MODIFIERS: &[&str] = &[
    "public", "protected", "private", "static", "final", "abstract", "native", "synchronized",
    "transient", "volatile", "strictfp", "default",
];

type PResult<T> = Result<T, ParseDiagnostic>;

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    path: &'a Path,
}

#[derive(Default)]
struct Modifiers {
    is_static: bool,
}

/// Parses one source file. Stops at the first lexical or syntax error.
pub fn parse_source(text: &str, path: &Path) -> Result<SourceUnit, Vec<ParseDiagnostic>> {
    let tokens = tokenize(text, path).map_err(|d| vec![d])?;
    let mut p = Parser {
        tokens,
        pos: 0,
        path,
    };
    p.compilation_unit().map_err(|d| vec![d])
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn peek_at(&self, ahead: usize) -> &Token {
        let i = (self.pos + ahead).min(self.tokens.len() - 1);
        &self.tokens[i]
    }

    fn at(&self, text: &str) -> bool {
        self.peek().is(text)
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if t.kind != TokenKind::Eof {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, text: &str) -> bool {
        if self.at(text) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn error_at(&self, token: &Token, expected: &str) -> ParseDiagnostic {
        let found = if token.kind == TokenKind::Eof {
            "end of file".to_string()
        } else {
            format!("`{}`", token.text)
        };
        ParseDiagnostic {
            path: self.path.to_path_buf(),
            line: token.line,
            column: token.column,
            code: "SYNTAX_ERROR".into(),
            message: format!("expected {expected}, found {found}"),
        }
    }

    fn unsupported(&self, token: &Token, what: &str) -> ParseDiagnostic {
        ParseDiagnostic {
            path: self.path.to_path_buf(),
            line: token.line,
            column: token.column,
            code: "UNSUPPORTED".into(),
            message: format!("{what} is outside the supported Java subset"),
        }
    }

    fn expect(&mut self, text: &str) -> PResult<Token> {
        if self.at(text) {
            Ok(self.advance())
        } else {
            Err(self.error_at(self.peek(), &format!("`{text}`")))
        }
    }

    fn ident(&mut self, what: &str) -> PResult<String> {
        if self.peek().is_ident() {
            Ok(self.advance().text)
        } else {
            Err(self.error_at(self.peek(), what))
        }
    }

    fn qualified_name(&mut self, what: &str) -> PResult<String> {
        let mut name = self.ident(what)?;
        while self.at(".") && self.peek_at(1).is_ident() {
            self.advance();
            name.push('.');
            name.push_str(&self.advance().text);
        }
        Ok(name)
    }

    fn compilation_unit(&mut self) -> PResult<SourceUnit> {
        let mut unit = SourceUnit {
            path: self.path.to_path_buf(),
            package_name: String::new(),
            imports: Vec::new(),
            class_declarations: Vec::new(),
        };

        // annotations may precede `package`
        let save = self.pos;
        self.annotations()?;
        if self.eat("package") {
            unit.package_name = self.qualified_name("package name")?;
            self.expect(";")?;
        } else {
            self.pos = save;
        }

        while self.at("import") {
            self.advance();
            let is_static = self.eat("static");
            let path = self.qualified_name("import name")?;
            let on_demand = if self.at(".") && self.peek_at(1).is("*") {
                self.advance();
                self.advance();
                true
            } else {
                false
            };
            self.expect(";")?;
            unit.imports.push(Import {
                path,
                is_static,
                on_demand,
            });
        }

        loop {
            if self.eat(";") {
                continue;
            }
            if self.peek().kind == TokenKind::Eof {
                break;
            }
            let mods = self.modifiers()?;
            let decl = self.type_declaration(mods)?;
            unit.class_declarations.push(decl);
        }
        Ok(unit)
    }

    fn annotations(&mut self) -> PResult<()> {
        while self.at("@") && !self.peek_at(1).is("interface") {
            self.advance();
            self.qualified_name("annotation name")?;
            if self.at("(") {
                self.skip_balanced("(", ")")?;
            }
        }
        Ok(())
    }

    fn modifiers(&mut self) -> PResult<Modifiers> {
        let mut mods = Modifiers::default();
        loop {
            if self.at("@") {
                if self.peek_at(1).is("interface") {
                    return Err(self.unsupported(self.peek(), "annotation type declaration"));
                }
                self.annotations()?;
            } else if MODIFIERS.iter().any(|m| self.at(m)) && !self.peek_at(1).is(":") {
                if self.at("static") {
                    mods.is_static = true;
                }
                self.advance();
            } else {
                return Ok(mods);
            }
        }
    }

    fn type_declaration(&mut self, _mods: Modifiers) -> PResult<ClassDecl> {
        let start = self.peek().clone();
        let is_interface = if self.eat("class") {
            false
        } else if self.eat("interface") {
            true
        } else if self.at("enum") || (self.peek().is("record") && self.peek_at(1).is_ident()) {
            return Err(self.unsupported(&start, &format!("`{}` declaration", start.text)));
        } else {
            return Err(self.error_at(&start, "`class` or `interface`"));
        };
        let name = self.ident("type name")?;
        if self.at("<") {
            self.skip_type_arguments()?;
        }

        let mut decl = ClassDecl {
            name,
            is_interface,
            extends: Vec::new(),
            implements: Vec::new(),
            fields: Vec::new(),
            methods: Vec::new(),
            line: start.line,
            column: start.column,
        };
        if self.eat("extends") {
            decl.extends.push(self.type_ref()?);
            if is_interface {
                while self.eat(",") {
                    decl.extends.push(self.type_ref()?);
                }
            }
        }
        if !is_interface && self.eat("implements") {
            decl.implements.push(self.type_ref()?);
            while self.eat(",") {
                decl.implements.push(self.type_ref()?);
            }
        }
        self.class_body(&mut decl)?;
        Ok(decl)
    }

    fn class_body(&mut self, decl: &mut ClassDecl) -> PResult<()> {
        self.expect("{")?;
        loop {
            if self.eat("}") {
                return Ok(());
            }
            if self.peek().kind == TokenKind::Eof {
                return Err(self.error_at(self.peek(), "`}`"));
            }
            if self.eat(";") {
                continue;
            }
            // instance or static initializer
            if self.at("{") || (self.at("static") && self.peek_at(1).is("{")) {
                self.eat("static");
                self.skip_balanced("{", "}")?;
                continue;
            }
            let mods = self.modifiers()?;
            if self.at("class") || self.at("interface") || self.at("enum") {
                // nested types are not modeled
                self.advance();
                while !self.at("{") {
                    if self.peek().kind == TokenKind::Eof {
                        return Err(self.error_at(self.peek(), "`{`"));
                    }
                    self.advance();
                }
                self.skip_balanced("{", "}")?;
                continue;
            }
            self.member(decl, mods)?;
        }
    }

    fn member(&mut self, decl: &mut ClassDecl, mods: Modifiers) -> PResult<()> {
        if self.at("<") {
            self.skip_type_arguments()?;
        }
        // constructor: Name (
        if self.peek().is_ident() && self.peek().text == decl.name && self.peek_at(1).is("(") {
            let name = self.advance().text;
            let params = self.parameters()?;
            let body = self.method_rest()?;
            decl.methods.push(MethodDecl {
                name,
                return_type: None,
                params,
                is_constructor: true,
                is_static: false,
                body,
            });
            return Ok(());
        }

        let return_type = if self.at("void") {
            let t = self.advance();
            TypeRef {
                name: t.text,
                primitive: true,
                array_dims: 0,
            }
        } else {
            self.type_ref()?
        };
        let name = self.ident("member name")?;
        if self.at("(") {
            let params = self.parameters()?;
            let body = self.method_rest()?;
            decl.methods.push(MethodDecl {
                name,
                return_type: Some(return_type),
                params,
                is_constructor: false,
                is_static: mods.is_static,
                body,
            });
            return Ok(());
        }
        if return_type.name == "void" {
            return Err(self.error_at(self.peek(), "`(`"));
        }

        // field declarators
        let mut name = name;
        loop {
            let mut ty = return_type.clone();
            while self.at("[") && self.peek_at(1).is("]") {
                self.advance();
                self.advance();
                ty.array_dims += 1;
            }
            decl.fields.push(FieldDecl {
                name,
                ty,
                is_static: mods.is_static || decl.is_interface,
            });
            if self.eat("=") {
                self.skip_initializer()?;
            }
            if self.eat(",") {
                name = self.ident("field name")?;
                continue;
            }
            self.expect(";")?;
            return Ok(());
        }
    }

    fn parameters(&mut self) -> PResult<Vec<Param>> {
        self.expect("(")?;
        let mut params = Vec::new();
        if self.eat(")") {
            return Ok(params);
        }
        loop {
            self.modifiers()?;
            if !(self.peek().is_ident() || PRIMITIVES.iter().any(|p| self.at(p))) {
                return Err(self.error_at(self.peek(), "parameter type"));
            }
            let mut ty = self.type_ref()?;
            if self.eat("...") {
                ty.array_dims += 1;
            }
            let name = if self.at("this") {
                self.advance().text
            } else {
                self.ident("parameter name")?
            };
            while self.at("[") && self.peek_at(1).is("]") {
                self.advance();
                self.advance();
                ty.array_dims += 1;
            }
            if name != "this" {
                params.push(Param { name, ty });
            }
            if self.eat(",") {
                continue;
            }
            self.expect(")")?;
            return Ok(params);
        }
    }

    fn method_rest(&mut self) -> PResult<Option<Vec<Token>>> {
        while self.at("[") && self.peek_at(1).is("]") {
            self.advance();
            self.advance();
        }
        if self.eat("throws") {
            self.qualified_name("exception type")?;
            while self.eat(",") {
                self.qualified_name("exception type")?;
            }
        }
        if self.eat(";") {
            return Ok(None);
        }
        if !self.at("{") {
            return Err(self.error_at(self.peek(), "method body or `;`"));
        }
        let start = self.pos;
        self.skip_balanced("{", "}")?;
        Ok(Some(self.tokens[start + 1..self.pos - 1].to_vec()))
    }

    fn type_ref(&mut self) -> PResult<TypeRef> {
        let tok = self.peek().clone();
        let mut ty = if PRIMITIVES.contains(&tok.text.as_str()) && tok.kind == TokenKind::Keyword {
            self.advance();
            TypeRef {
                name: tok.text,
                primitive: true,
                array_dims: 0,
            }
        } else if tok.is_ident() {
            let mut name = self.advance().text;
            loop {
                if self.at("<") {
                    self.skip_type_arguments()?;
                }
                if self.at(".") && self.peek_at(1).is_ident() {
                    self.advance();
                    name.push('.');
                    name.push_str(&self.advance().text);
                } else {
                    break;
                }
            }
            TypeRef {
                name,
                primitive: false,
                array_dims: 0,
            }
        } else {
            return Err(self.error_at(&tok, "type"));
        };
        while self.at("[") && self.peek_at(1).is("]") {
            self.advance();
            self.advance();
            ty.array_dims += 1;
        }
        Ok(ty)
    }

    fn skip_type_arguments(&mut self) -> PResult<()> {
        let open = self.expect("<")?;
        let mut depth: i32 = 1;
        while depth > 0 {
            let t = self.advance();
            match t.text.as_str() {
                _ if t.kind == TokenKind::Eof => return Err(self.error_at(&open, "closing `>`")),
                "<" => depth += 1,
                ">" => depth -= 1,
                ">>" => depth -= 2,
                ">>>" => depth -= 3,
                "(" | ")" | "{" | "}" | ";" | "=" => return Err(self.error_at(&t, "`>`")),
                _ => {}
            }
        }
        if depth < 0 {
            return Err(self.error_at(self.peek(), "balanced type arguments"));
        }
        Ok(())
    }

    /// Skips a bracketed group starting at the current `open` token.
    fn skip_balanced(&mut self, open: &str, close: &str) -> PResult<()> {
        let start = self.expect(open)?;
        let mut stack = vec![close.to_string()];
        while let Some(expected) = stack.last().cloned() {
            let t = self.advance();
            if t.kind == TokenKind::Eof {
                return Err(self.error_at(&t, &format!("`{expected}` closing the group opened at {}:{}", start.line, start.column)));
            }
            if t.kind != TokenKind::Punct {
                continue;
            }
            match t.text.as_str() {
                "(" => stack.push(")".into()),
                "[" => stack.push("]".into()),
                "{" => stack.push("}".into()),
                ")" | "]" | "}" => {
                    if t.text == expected {
                        stack.pop();
                    } else {
                        return Err(self.error_at(&t, &format!("`{expected}`")));
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }

    fn skip_initializer(&mut self) -> PResult<()> {
        loop {
            let t = self.peek();
            if t.kind == TokenKind::Eof {
                return Err(self.error_at(t, "`;`"));
            }
            match t.text.as_str() {
                "," | ";" if t.kind == TokenKind::Punct => return Ok(()),
                "(" => self.skip_balanced("(", ")")?,
                "[" => self.skip_balanced("[", "]")?,
                "{" => self.skip_balanced("{", "}")?,
                ")" | "]" | "}" if t.kind == TokenKind::Punct => return Err(self.error_at(t, "`;`")),
                _ => {
                    self.advance();
                }
            }
        }
    }
}
