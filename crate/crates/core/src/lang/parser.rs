//! Lexer and recursive-descent parser for the rule language.
//!
//! ```text
//! program := { clause } ;
//! clause  := atom [ ":-" literal { "," literal } ] "." ;
//! literal := [ "not" ] atom ;
//! atom    := ident "(" term { "," term } ")" | ident ;
//! term    := ident | integer ;
//! ```
//!
//! `%` starts a comment running to end of line.

use super::ast::{Atom, Clause, Literal, Span, Term};
use super::LangError;
use crate::reasoner::UNIT_WEIGHT_PARAM;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(String),
    LParen,
    RParen,
    Comma,
    Period,
    Neck,
    Not,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) | Tok::Int(s) => format!("`{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Period => "`.`".into(),
            Tok::Neck => "`:-`".into(),
            Tok::Not => "`not`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            chars: src.chars().peekable(),
            line: 1,
            column: 1,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '%' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn tokenize(mut self) -> Result<Vec<(Tok, Span)>, LangError> {
        let mut out = Vec::new();
        loop {
            self.skip_trivia();
            let span = Span {
                line: self.line,
                column: self.column,
            };
            let Some(&c) = self.chars.peek() else {
                out.push((Tok::Eof, span));
                return Ok(out);
            };
            let tok = match c {
                '(' => {
                    self.bump();
                    Tok::LParen
                }
                ')' => {
                    self.bump();
                    Tok::RParen
                }
                ',' => {
                    self.bump();
                    Tok::Comma
                }
                '.' => {
                    self.bump();
                    Tok::Period
                }
                ':' => {
                    self.bump();
                    if self.chars.peek() == Some(&'-') {
                        self.bump();
                        Tok::Neck
                    } else {
                        return Err(syntax(span, "`:`", &["`:-`"]));
                    }
                }
                c if c.is_ascii_digit() => {
                    let digits = self.take_while(|c| c.is_ascii_digit());
                    if matches!(self.chars.peek(), Some(c) if c.is_ascii_alphabetic() || *c == '_') {
                        let tail = self.take_while(|c| c.is_ascii_alphanumeric() || c == '_');
                        return Err(syntax(span, &format!("`{digits}{tail}`"), &["integer"]));
                    }
                    Tok::Int(digits)
                }
                c if c.is_ascii_alphabetic() || c == '_' => {
                    let ident = self.take_while(|c| c.is_ascii_alphanumeric() || c == '_');
                    if ident == "not" {
                        Tok::Not
                    } else {
                        Tok::Ident(ident)
                    }
                }
                other => {
                    return Err(syntax(span, &format!("character `{other}`"), &["clause"]));
                }
            };
            out.push((tok, span));
        }
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> String {
        let mut s = String::new();
        while let Some(&c) = self.chars.peek() {
            if !pred(c) {
                break;
            }
            s.push(c);
            self.bump();
        }
        s
    }
}

fn syntax(span: Span, found: &str, expected: &[&str]) -> LangError {
    LangError::Syntax {
        span,
        found: found.to_string(),
        expected: expected.iter().map(|s| s.to_string()).collect(),
    }
}

struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &(Tok, Span) {
        &self.toks[self.pos]
    }

    fn advance(&mut self) -> (Tok, Span) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &[&str]) -> LangError {
        let (tok, span) = self.peek();
        syntax(*span, &tok.describe(), expected)
    }

    fn expect(&mut self, want: Tok, label: &str) -> Result<(), LangError> {
        if self.peek().0 == want {
            self.advance();
            Ok(())
        } else {
            Err(self.unexpected(&[label]))
        }
    }

    fn program(&mut self) -> Result<Vec<Clause>, LangError> {
        let mut clauses = Vec::new();
        while self.peek().0 != Tok::Eof {
            clauses.push(self.clause()?);
        }
        Ok(clauses)
    }

    fn clause(&mut self) -> Result<Clause, LangError> {
        let span = self.peek().1;
        let head = self.atom()?;
        let mut body = Vec::new();
        match self.peek().0 {
            Tok::Neck => {
                self.advance();
                body.push(self.literal()?);
                while self.peek().0 == Tok::Comma {
                    self.advance();
                    body.push(self.literal()?);
                }
                self.expect(Tok::Period, "`.`")
                    .map_err(|_| self.unexpected(&["`,`", "`.`"]))?;
            }
            Tok::Period => {
                self.advance();
            }
            _ => return Err(self.unexpected(&["`:-`", "`.`"])),
        }
        Ok(Clause {
            head,
            body,
            weight_param: UNIT_WEIGHT_PARAM,
            span,
        })
    }

    fn literal(&mut self) -> Result<Literal, LangError> {
        let negated = if self.peek().0 == Tok::Not {
            self.advance();
            true
        } else {
            false
        };
        Ok(Literal {
            atom: self.atom()?,
            negated,
        })
    }

    fn atom(&mut self) -> Result<Atom, LangError> {
        let predicate = match &self.peek().0 {
            Tok::Ident(name) if name.starts_with(|c: char| c.is_ascii_lowercase()) => name.clone(),
            _ => return Err(self.unexpected(&["predicate name"])),
        };
        self.advance();
        let mut args = Vec::new();
        if self.peek().0 == Tok::LParen {
            self.advance();
            args.push(self.term()?);
            loop {
                match self.peek().0 {
                    Tok::Comma => {
                        self.advance();
                        args.push(self.term()?);
                    }
                    Tok::RParen => {
                        self.advance();
                        break;
                    }
                    _ => return Err(self.unexpected(&["`,`", "`)`"])),
                }
            }
        }
        Ok(Atom { predicate, args })
    }

    fn term(&mut self) -> Result<Term, LangError> {
        let term = match &self.peek().0 {
            Tok::Int(digits) => Term::Constant(digits.clone()),
            Tok::Ident(name) if name.starts_with(|c: char| c.is_ascii_uppercase()) => {
                Term::Variable(name.clone())
            }
            Tok::Ident(name) if name.starts_with(|c: char| c.is_ascii_lowercase()) => {
                Term::Constant(name.clone())
            }
            _ => return Err(self.unexpected(&["variable", "constant"])),
        };
        self.advance();
        Ok(term)
    }
}

/// Parses clauses without semantic validation.
pub(crate) fn parse_clauses(source: &str) -> Result<Vec<Clause>, LangError> {
    let toks = Lexer::new(source).tokenize()?;
    Parser { toks, pos: 0 }.program()
}
