use std::collections::{BTreeMap, HashMap};

use super::ast::{Atom, Clause, RuleProgram, Span, Term};
use super::LangError;
use crate::scene::{ArgKind, Attribute, Builtin, Relation};

pub(crate) fn validate(clauses: Vec<Clause>, query: &str) -> Result<RuleProgram, LangError> {
    let mut arities: HashMap<&str, usize> = HashMap::new();

    for clause in &clauses {
        if Builtin::lookup(&clause.head.predicate).is_some() {
            return Err(LangError::BuiltinHead {
                predicate: clause.head.predicate.clone(),
                span: clause.span,
            });
        }
        let atoms = std::iter::once(&clause.head).chain(clause.body.iter().map(|l| &l.atom));
        for atom in atoms {
            match Builtin::lookup(&atom.predicate) {
                Some(builtin) => check_builtin(builtin, atom, clause.span)?,
                None => match arities.get(atom.predicate.as_str()) {
                    Some(&expected) if expected != atom.arity() => {
                        return Err(LangError::Arity {
                            predicate: atom.predicate.clone(),
                            expected,
                            found: atom.arity(),
                            span: clause.span,
                        })
                    }
                    Some(_) => {}
                    None => {
                        arities.insert(&atom.predicate, atom.arity());
                    }
                },
            }
        }
    }

    let heads: Vec<&str> = clauses.iter().map(|c| c.head.predicate.as_str()).collect();
    for clause in &clauses {
        for lit in &clause.body {
            let pred = lit.atom.predicate.as_str();
            if Builtin::lookup(pred).is_none() && !heads.contains(&pred) {
                return Err(LangError::UndefinedPredicate {
                    predicate: pred.to_string(),
                    span: clause.span,
                });
            }
        }
        for var in clause.head.variables() {
            let bound = clause
                .body
                .iter()
                .filter(|l| !l.negated)
                .any(|l| l.atom.variables().any(|v| v == var));
            if !bound {
                return Err(LangError::UnsafeVariable {
                    variable: var.to_string(),
                    span: clause.span,
                });
            }
        }
    }

    if !heads.contains(&query) {
        return Err(LangError::UnknownQuery {
            query: query.to_string(),
        });
    }

    let strata = stratify(&clauses)?;
    Ok(RuleProgram {
        clauses,
        query: query.to_string(),
        strata,
    })
}

fn check_builtin(builtin: Builtin, atom: &Atom, span: Span) -> Result<(), LangError> {
    let sig = builtin.signature();
    if sig.len() != atom.arity() {
        return Err(LangError::Arity {
            predicate: atom.predicate.clone(),
            expected: sig.len(),
            found: atom.arity(),
            span,
        });
    }
    let invalid = |message: String| LangError::InvalidArgument { message, span };
    for (i, (kind, arg)) in sig.iter().zip(&atom.args).enumerate() {
        let pos = i + 1;
        match (kind, arg) {
            (ArgKind::Object, _) => {}
            (_, Term::Variable(v)) => {
                return Err(invalid(format!(
                    "argument {pos} of `{}` must be a constant, found variable `{v}`",
                    atom.predicate
                )))
            }
            (ArgKind::Value, Term::Constant(_)) => {}
            (ArgKind::Relation, Term::Constant(c)) => {
                c.parse::<Relation>().map_err(invalid)?;
            }
            (ArgKind::AttributeName, Term::Constant(c)) => {
                c.parse::<Attribute>().map_err(invalid)?;
            }
            (ArgKind::Integer, Term::Constant(c)) => {
                c.parse::<usize>().map_err(|_| {
                    invalid(format!(
                        "argument {pos} of `{}` must be a non-negative integer, found `{c}`",
                        atom.predicate
                    ))
                })?;
            }
        }
    }
    Ok(())
}

/// Assigns each head predicate the smallest stratum such that positive
/// dependencies are at most equal and negative ones strictly lower.
fn stratify(clauses: &[Clause]) -> Result<BTreeMap<String, usize>, LangError> {
    let mut strata: BTreeMap<String, usize> = clauses
        .iter()
        .map(|c| (c.head.predicate.clone(), 0))
        .collect();
    let limit = strata.len();
    loop {
        let mut changed = false;
        for clause in clauses {
            for lit in &clause.body {
                let Some(&dep) = strata.get(&lit.atom.predicate) else {
                    continue;
                };
                let need = dep + usize::from(lit.negated);
                let head = strata.get_mut(&clause.head.predicate).expect("head registered");
                if *head < need {
                    *head = need;
                    changed = true;
                    if need >= limit {
                        return Err(LangError::Unstratified {
                            predicate: lit.atom.predicate.clone(),
                            span: clause.span,
                        });
                    }
                }
            }
        }
        if !changed {
            return Ok(strata);
        }
    }
}
