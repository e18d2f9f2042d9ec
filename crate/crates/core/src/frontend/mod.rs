//! Source frontend for a Java subset: tokenize, parse declarations, lower to
//! a [`ClassModel`](crate::model::ClassModel).

use std::fmt;
use std::path::{Path, PathBuf};

mod lexer;
mod lower;
mod parser;

pub use lexer::{tokenize, Token, TokenKind};
pub use lower::{lower_to_model, LowerError};
pub use parser::{
    parse_source, ClassDecl, FieldDecl, Import, MethodDecl, Param, SourceUnit, TypeRef,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseDiagnostic {
    pub path: PathBuf,
    pub line: u32,
    pub column: u32,
    pub code: String,
    pub message: String,
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}:{}: {}: {}",
            self.path.display(),
            self.line,
            self.column,
            self.code,
            self.message
        )
    }
}

impl std::error::Error for ParseDiagnostic {}

/// Parses many files. Results keep the input order.
pub fn parse_sources<P>(files: &[(P, String)]) -> Vec<Result<SourceUnit, Vec<ParseDiagnostic>>>
where
    P: AsRef<Path> + Sync,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        files
            .par_iter()
            .map(|(path, text)| parse_source(text, path.as_ref()))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        files
            .iter()
            .map(|(path, text)| parse_source(text, path.as_ref()))
            .collect()
    }
}
