//! The rule language: AST, parser and static validation.

mod ast;
mod parser;
mod validate;

pub use ast::{format_atom, Atom, Clause, Literal, RuleProgram, Span, Term};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LangError {
    #[error("syntax error at {span}: found {found}, expected {}", expected.join(" or "))]
    Syntax {
        span: Span,
        found: String,
        expected: Vec<String>,
    },
    #[error("clause at {span}: `{predicate}` used with arity {found}, expected {expected}")]
    Arity {
        predicate: String,
        expected: usize,
        found: usize,
        span: Span,
    },
    #[error("clause at {span}: {message}")]
    InvalidArgument { message: String, span: Span },
    #[error("clause at {span}: built-in predicate `{predicate}` cannot be a clause head")]
    BuiltinHead { predicate: String, span: Span },
    #[error("clause at {span}: head variable `{variable}` does not occur in a positive body literal")]
    UnsafeVariable { variable: String, span: Span },
    #[error("clause at {span}: predicate `{predicate}` is neither built-in nor defined by any clause")]
    UndefinedPredicate { predicate: String, span: Span },
    #[error("clause at {span}: negation of `{predicate}` participates in a recursive cycle")]
    Unstratified { predicate: String, span: Span },
    #[error("query predicate `{query}` is not the head of any clause")]
    UnknownQuery { query: String },
    #[error("unbound variable `{variable}` in `{atom}`")]
    UnboundVariable { variable: String, atom: String },
}

impl LangError {
    /// Source position of the offending clause or token, when one exists.
    pub fn span(&self) -> Option<Span> {
        match self {
            LangError::Syntax { span, .. }
            | LangError::Arity { span, .. }
            | LangError::InvalidArgument { span, .. }
            | LangError::BuiltinHead { span, .. }
            | LangError::UnsafeVariable { span, .. }
            | LangError::UndefinedPredicate { span, .. }
            | LangError::Unstratified { span, .. } => Some(*span),
            LangError::UnknownQuery { .. } | LangError::UnboundVariable { .. } => None,
        }
    }
}

/// Parses and validates `source`, designating `query` as the target predicate.
pub fn parse_program(source: &str, query: &str) -> Result<RuleProgram, LangError> {
    let clauses = parser::parse_clauses(source)?;
    validate::validate(clauses, query)
}
