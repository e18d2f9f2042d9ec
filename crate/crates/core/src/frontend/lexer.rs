//! Tokenizer for the Java subset.

use std::path::Path;

use super::ParseDiagnostic;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Ident,
    Keyword,
    Literal,
    Punct,
    Eof,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    pub line: u32,
    pub column: u32,
}

impl Token {
    pub fn is(&self, text: &str) -> bool {
        self.kind != TokenKind::Literal && self.text == text
    }

    pub fn is_ident(&self) -> bool {
        self.kind == TokenKind::Ident
    }
}

const KEYWORDS: &[&str] = &[
    "abstract", "assert", "boolean", "break", "byte", "case", "catch", "char", "class", "const",
    "continue", "default", "do", "double", "else", "enum", "extends", "final", "finally", "float",
    "for", "goto", "if", "implements", "import", "instanceof", "int", "interface", "long",
    "native", "new", "package", "private", "protected", "public", "return", "short", "static",
    "strictfp", "super", "switch", "synchronized", "this", "throw", "throws", "transient", "try",
    "void", "volatile", "while", "true", "false", "null",
];

// Longest first so maximal munch works with a linear scan.
const OPERATORS: &[&str] = &[
    ">>>=", "<<=", ">>=", ">>>", "...", "->", "::", "++", "--", "&&", "||", "==", "!=", "<=",
    ">=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<", ">>", "(", ")", "{", "}", "[",
    "]", ";", ",", ".", "@", "=", ">", "<", "!", "~", "?", ":", "+", "-", "*", "/", "&", "|",
    "^", "%",
];

struct Cursor<'a> {
    chars: Vec<char>,
    pos: usize,
    line: u32,
    column: u32,
    path: &'a Path,
}

impl Cursor<'_> {
    fn peek(&self, ahead: usize) -> Option<char> {
        self.chars.get(self.pos + ahead).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.get(self.pos).copied()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn starts_with(&self, s: &str) -> bool {
        s.chars().enumerate().all(|(i, c)| self.peek(i) == Some(c))
    }

    fn error(&self, line: u32, column: u32, code: &str, message: String) -> ParseDiagnostic {
        ParseDiagnostic {
            path: self.path.to_path_buf(),
            line,
            column,
            code: code.to_string(),
            message,
        }
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_' || c == '$'
}

fn is_ident_continue(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '$'
}

/// Splits source text into tokens, dropping whitespace and comments.
/// The last token is always [`TokenKind::Eof`].
pub fn tokenize(text: &str, path: &Path) -> Result<Vec<Token>, ParseDiagnostic> {
    let mut cur = Cursor {
        chars: text.chars().collect(),
        pos: 0,
        line: 1,
        column: 1,
        path,
    };
    let mut tokens = Vec::new();

    while let Some(c) = cur.peek(0) {
        let (line, column) = (cur.line, cur.column);
        if c.is_whitespace() || c == '\u{feff}' {
            cur.bump();
            continue;
        }
        if cur.starts_with("//") {
            while cur.peek(0).is_some_and(|c| c != '\n') {
                cur.bump();
            }
            continue;
        }
        if cur.starts_with("/*") {
            cur.bump();
            cur.bump();
            loop {
                if cur.starts_with("*/") {
                    cur.bump();
                    cur.bump();
                    break;
                }
                if cur.bump().is_none() {
                    return Err(cur.error(line, column, "LEX_UNTERMINATED_COMMENT", "unterminated block comment".into()));
                }
            }
            continue;
        }

        let mut lexeme = String::new();
        let kind = if is_ident_start(c) {
            while let Some(c) = cur.peek(0).filter(|&c| is_ident_continue(c)) {
                lexeme.push(c);
                cur.bump();
            }
            if KEYWORDS.contains(&lexeme.as_str()) {
                TokenKind::Keyword
            } else {
                TokenKind::Ident
            }
        } else if c.is_ascii_digit() || (c == '.' && cur.peek(1).is_some_and(|d| d.is_ascii_digit())) {
            let hex = cur.starts_with("0x") || cur.starts_with("0X");
            while let Some(c) = cur.peek(0) {
                let exponent_sign = !hex
                    && (c == '+' || c == '-')
                    && lexeme.ends_with(['e', 'E']);
                if c.is_ascii_alphanumeric() || c == '_' || c == '.' || exponent_sign {
                    lexeme.push(c);
                    cur.bump();
                } else {
                    break;
                }
            }
            TokenKind::Literal
        } else if cur.starts_with("\"\"\"") {
            for _ in 0..3 {
                lexeme.push(cur.bump().unwrap());
            }
            loop {
                if cur.starts_with("\"\"\"") {
                    for _ in 0..3 {
                        lexeme.push(cur.bump().unwrap());
                    }
                    break;
                }
                match cur.bump() {
                    Some('\\') => {
                        lexeme.push('\\');
                        if let Some(e) = cur.bump() {
                            lexeme.push(e);
                        }
                    }
                    Some(ch) => lexeme.push(ch),
                    None => {
                        return Err(cur.error(line, column, "LEX_UNTERMINATED_STRING", "unterminated text block".into()))
                    }
                }
            }
            TokenKind::Literal
        } else if c == '"' || c == '\'' {
            let quote = c;
            lexeme.push(cur.bump().unwrap());
            loop {
                match cur.peek(0) {
                    Some('\\') => {
                        lexeme.push(cur.bump().unwrap());
                        match cur.peek(0) {
                            Some('\n') | None => {}
                            Some(_) => lexeme.push(cur.bump().unwrap()),
                        }
                    }
                    Some(ch) if ch == quote => {
                        lexeme.push(cur.bump().unwrap());
                        break;
                    }
                    Some('\n') | None => {
                        let what = if quote == '"' { "string" } else { "character" };
                        return Err(cur.error(
                            line,
                            column,
                            "LEX_UNTERMINATED_STRING",
                            format!("unterminated {what} literal"),
                        ));
                    }
                    Some(_) => lexeme.push(cur.bump().unwrap()),
                }
            }
            TokenKind::Literal
        } else if let Some(op) = OPERATORS.iter().find(|op| cur.starts_with(op)) {
            for _ in 0..op.chars().count() {
                cur.bump();
            }
            lexeme.push_str(op);
            TokenKind::Punct
        } else {
            return Err(cur.error(line, column, "LEX_BAD_CHARACTER", format!("unexpected character `{c}`")));
        };

        tokens.push(Token {
            kind,
            text: lexeme,
            line,
            column,
        });
    }

    tokens.push(Token {
        kind: TokenKind::Eof,
        text: String::new(),
        line: cur.line,
        column: cur.column,
    });
    Ok(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lex(text: &str) -> Vec<(TokenKind, String)> {
        tokenize(text, Path::new("t.java"))
            .unwrap()
            .into_iter()
            .map(|t| (t.kind, t.text))
            .collect()
    }

    #[test]
    fn basic_tokens() {
        let toks = lex("class A { int x = 0x1F; }");
        let texts: Vec<_> = toks.iter().map(|(_, t)| t.as_str()).collect();
        assert_eq!(texts, ["class", "A", "{", "int", "x", "=", "0x1F", ";", "}", ""]);
        assert_eq!(toks[0].0, TokenKind::Keyword);
        assert_eq!(toks[1].0, TokenKind::Ident);
        assert_eq!(toks[6].0, TokenKind::Literal);
        assert_eq!(toks.last().unwrap().0, TokenKind::Eof);
    }

    #[test]
    fn comments_and_literals() {
        let toks = lex("// hi\n/* a\n b */ s = \"x\\\"y\" + 'c' + 1.5e-3f;");
        let texts: Vec<_> = toks.iter().map(|(_, t)| t.as_str()).collect();
        assert_eq!(texts, ["s", "=", "\"x\\\"y\"", "+", "'c'", "+", "1.5e-3f", ";", ""]);
    }

    #[test]
    fn maximal_munch() {
        let toks = lex("a >>>= b >> c -> d :: e ...");
        let ops: Vec<_> = toks
            .iter()
            .filter(|(k, _)| *k == TokenKind::Punct)
            .map(|(_, t)| t.as_str())
            .collect();
        assert_eq!(ops, [">>>=", ">>", "->", "::", "..."]);
    }

    #[test]
    fn positions_are_one_based() {
        let toks = tokenize("a\n  bb", Path::new("t")).unwrap();
        assert_eq!((toks[0].line, toks[0].column), (1, 1));
        assert_eq!((toks[1].line, toks[1].column), (2, 3));
    }

    #[test]
    fn lexical_errors() {
        let err = tokenize("class A {\n  # }", Path::new("t")).unwrap_err();
        assert_eq!((err.line, err.column, err.code.as_str()), (2, 3, "LEX_BAD_CHARACTER"));
        let err = tokenize("s = \"abc\n", Path::new("t")).unwrap_err();
        assert_eq!(err.code, "LEX_UNTERMINATED_STRING");
        let err = tokenize("/* never closed", Path::new("t")).unwrap_err();
        assert_eq!(err.code, "LEX_UNTERMINATED_COMMENT");
    }

    #[test]
    fn unicode_identifiers() {
        let toks = lex("int sayı = 1;");
        assert_eq!(toks[1], (TokenKind::Ident, "sayı".to_string()));
    }
}
