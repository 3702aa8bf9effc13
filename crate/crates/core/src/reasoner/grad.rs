//! Reverse-mode derivatives of the query probability.
//!
//! Under max aggregation every derived atom takes the value of one winning
//! ground clause, so the query is a product tree over the winners and its
//! derivative follows that tree.

use std::collections::HashMap;

use crate::scene::GroundAtomTable;

use super::ground::{clauses_by_head, GroundClause, Grounding};
use super::infer::{clause_value, derivation_order, infer, InferOptions};
use super::{ClauseWeights, ReasonerError};

/// Gap below which two competing derivations of the query count as tied.
pub const TIE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub query_prob: f64,
    /// d query_prob / d θ, one entry per program clause.
    pub d_theta: Vec<f64>,
    /// d query_prob / d value, one entry per table atom.
    pub d_facts: Vec<f64>,
}

pub fn gradients(
    table: &GroundAtomTable,
    grounding: &Grounding,
    weights: &ClauseWeights,
) -> Result<Gradients, ReasonerError> {
    let result = infer(table, grounding, weights, InferOptions::default())?;
    let v = &result.valuation;
    let mut d_theta = vec![0.0; weights.len()];
    let mut d_facts = vec![0.0; table.len()];

    let mut ranked: Vec<(&GroundClause, f64)> = grounding
        .clauses
        .iter()
        .filter(|gc| grounding.is_query_clause(gc))
        .map(|gc| (gc, clause_value(gc, v, weights)))
        .collect();
    ranked.sort_by(|a, b| derivation_order(*a, *b));
    if let [first, second, ..] = ranked.as_slice() {
        let gap = first.1 - second.1;
        if gap < TIE_TOLERANCE {
            return Err(ReasonerError::Tie {
                atom: grounding.atom(first.0.head).to_string(),
                gap,
            });
        }
    }
    let Some(&(best, _)) = ranked.first() else {
        return Ok(Gradients {
            query_prob: 0.0,
            d_theta,
            d_facts,
        });
    };

    let heads = clauses_by_head(grounding);
    let winner_of = |atom: usize| -> Option<&GroundClause> {
        if atom == best.head {
            return Some(best);
        }
        heads.get(&atom)?.iter().map(|&i| {
            let gc = &grounding.clauses[i];
            (gc, clause_value(gc, v, weights))
        })
        .min_by(|a, b| derivation_order(*a, *b))
        .map(|(gc, _)| gc)
    };

    // post-order over derived atoms reachable through winning clauses
    let mut order = Vec::new();
    let mut state: HashMap<usize, bool> = HashMap::new();
    let mut stack: Vec<(usize, bool)> = vec![(best.head, false)];
    let mut winners: HashMap<usize, &GroundClause> = HashMap::new();
    while let Some((atom, expanded)) = stack.pop() {
        if expanded {
            state.insert(atom, true);
            order.push(atom);
            continue;
        }
        match state.get(&atom) {
            Some(true) => continue,
            Some(false) => {
                return Err(ReasonerError::CyclicDerivation {
                    atom: grounding.atom(atom).to_string(),
                })
            }
            None => {}
        }
        state.insert(atom, false);
        stack.push((atom, true));
        if let Some(gc) = winner_of(atom) {
            winners.insert(atom, gc);
            for &(a, _) in gc.body.iter().rev() {
                if grounding.is_derived(a) {
                    match state.get(&a) {
                        Some(true) => {}
                        Some(false) => {
                            return Err(ReasonerError::CyclicDerivation {
                                atom: grounding.atom(a).to_string(),
                            })
                        }
                        None => stack.push((a, false)),
                    }
                }
            }
        }
    }

    let mut adjoint: HashMap<usize, f64> = HashMap::from([(best.head, 1.0)]);
    for &atom in order.iter().rev() {
        let upstream = adjoint.get(&atom).copied().unwrap_or(0.0);
        let Some(gc) = winners.get(&atom) else {
            continue;
        };
        let w = weights.weight(gc.clause_index);
        let lits: Vec<f64> = gc
            .body
            .iter()
            .map(|&(a, neg)| if neg { 1.0 - v[a] } else { v[a] })
            .collect();
        let product: f64 = lits.iter().product();
        d_theta[gc.clause_index] += upstream * product * weights.weight_grad(gc.clause_index);
        for (i, &(a, neg)) in gc.body.iter().enumerate() {
            let others: f64 = lits
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, x)| x)
                .product();
            let local = w * others * if neg { -1.0 } else { 1.0 };
            if grounding.is_derived(a) {
                *adjoint.entry(a).or_insert(0.0) += upstream * local;
            } else {
                d_facts[a] += upstream * local;
            }
        }
    }

    Ok(Gradients {
        query_prob: result.query_prob,
        d_theta,
        d_facts,
    })
}
