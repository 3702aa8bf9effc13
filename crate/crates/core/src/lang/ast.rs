use std::collections::BTreeMap;
use std::fmt;

use super::LangError;

/// Argument of an atom.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    /// Ranges over the objects of the scene under evaluation.
    Variable(String),
    Constant(String),
}

impl Term {
    pub fn name(&self) -> &str {
        match self {
            Term::Variable(n) | Term::Constant(n) => n,
        }
    }

    pub fn is_variable(&self) -> bool {
        matches!(self, Term::Variable(_))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Atom {
            predicate: predicate.into(),
            args,
        }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.args.iter().filter_map(|t| match t {
            Term::Variable(v) => Some(v.as_str()),
            Term::Constant(_) => None,
        })
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, arg) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{arg}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Literal {
    pub atom: Atom,
    pub negated: bool,
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            f.write_str("not ")?;
        }
        write!(f, "{}", self.atom)
    }
}

/// 1-based source position.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Span {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Clause {
    pub head: Atom,
    pub body: Vec<Literal>,
    /// Unconstrained parameter; the clause weight is its logistic.
    pub weight_param: f64,
    pub span: Span,
}

impl Clause {
    /// Distinct variables in order of first appearance (head first).
    pub fn variables(&self) -> Vec<&str> {
        let mut seen: Vec<&str> = Vec::new();
        let all = self
            .head
            .variables()
            .chain(self.body.iter().flat_map(|l| l.atom.variables()));
        for v in all {
            if !seen.contains(&v) {
                seen.push(v);
            }
        }
        seen
    }

    pub fn is_fact(&self) -> bool {
        self.body.is_empty()
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        for (i, lit) in self.body.iter().enumerate() {
            f.write_str(if i == 0 { " :- " } else { ", " })?;
            write!(f, "{lit}")?;
        }
        f.write_str(".")
    }
}

/// A validated, stratified rule program with a designated query predicate.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleProgram {
    pub clauses: Vec<Clause>,
    pub query: String,
    /// Stratum of every derived (head) predicate, starting at 0.
    pub strata: BTreeMap<String, usize>,
}

impl RuleProgram {
    pub fn stratum(&self, predicate: &str) -> Option<usize> {
        self.strata.get(predicate).copied()
    }

    pub fn is_derived(&self, predicate: &str) -> bool {
        self.strata.contains_key(predicate)
    }

    pub fn num_strata(&self) -> usize {
        self.strata.values().max().map_or(0, |s| s + 1)
    }
}

impl fmt::Display for RuleProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for clause in &self.clauses {
            writeln!(f, "{clause}")?;
        }
        Ok(())
    }
}

/// Renders `atom` with its variables replaced by the bound object ids.
pub fn format_atom(atom: &Atom, binding: &BTreeMap<String, String>) -> Result<String, LangError> {
    let mut args = Vec::with_capacity(atom.args.len());
    for arg in &atom.args {
        match arg {
            Term::Constant(c) => args.push(c.clone()),
            Term::Variable(v) => match binding.get(v) {
                Some(obj) => args.push(obj.clone()),
                None => {
                    return Err(LangError::UnboundVariable {
                        variable: v.clone(),
                        atom: atom.to_string(),
                    })
                }
            },
        }
    }
    Ok(if args.is_empty() {
        atom.predicate.clone()
    } else {
        format!("{}({})", atom.predicate, args.join(", "))
    })
}
