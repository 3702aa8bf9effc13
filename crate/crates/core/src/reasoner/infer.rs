use std::cmp::Ordering;

use crate::scene::GroundAtomTable;

use super::ground::{GroundClause, Grounding};
use super::{ClauseWeights, ReasonerError};

pub const DEFAULT_MAX_ITERS: usize = 100;
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InferOptions {
    /// Sweep cap per stratum.
    pub max_iters: usize,
    pub tol: f64,
}

impl Default for InferOptions {
    fn default() -> Self {
        InferOptions {
            max_iters: DEFAULT_MAX_ITERS,
            tol: DEFAULT_TOL,
        }
    }
}

/// One literal of the explaining grounding with its probability.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomProb {
    /// Ground atom text, prefixed with `not ` for negated literals.
    pub atom: String,
    pub prob: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InferenceResult {
    /// Fixpoint value of every atom: table atoms first, then derived atoms.
    pub valuation: Vec<f64>,
    pub query_prob: f64,
    /// `query_prob^(1/n_atoms)`, or `query_prob` when `n_atoms == 0`.
    pub normalized_prob: f64,
    pub n_atoms: usize,
    pub best_grounding: Option<GroundClause>,
    /// Weight of the clause behind `best_grounding`.
    pub best_weight: f64,
    pub per_atom: Vec<AtomProb>,
    pub iterations: usize,
}

/// Probability contributed by one ground clause under valuation `v`.
pub fn clause_value(gc: &GroundClause, v: &[f64], weights: &ClauseWeights) -> f64 {
    gc.body.iter().fold(weights.weight(gc.clause_index), |acc, &(a, neg)| {
        acc * if neg { 1.0 - v[a] } else { v[a] }
    })
}

/// Orders derivations best-first: higher value, then lower clause index,
/// then lexicographically smaller binding.
pub(crate) fn derivation_order(a: (&GroundClause, f64), b: (&GroundClause, f64)) -> Ordering {
    b.1.total_cmp(&a.1)
        .then(a.0.clause_index.cmp(&b.0.clause_index))
        .then_with(|| a.0.binding_key().cmp(&b.0.binding_key()))
}

/// Stratified forward chaining with product conjunction and max aggregation.
pub fn infer(
    table: &GroundAtomTable,
    grounding: &Grounding,
    weights: &ClauseWeights,
    opts: InferOptions,
) -> Result<InferenceResult, ReasonerError> {
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(ReasonerError::InvalidOptions(format!("tol must be positive, got {}", opts.tol)));
    }
    let n_clauses = grounding.clauses.iter().map(|c| c.clause_index + 1).max().unwrap_or(0);
    if weights.len() < n_clauses {
        return Err(ReasonerError::WeightCount {
            expected: n_clauses,
            found: weights.len(),
        });
    }

    let mut v = table.values.clone();
    v.resize(grounding.num_atoms(), 0.0);

    let mut by_stratum: Vec<Vec<&GroundClause>> = vec![Vec::new(); grounding.num_strata.max(1)];
    for gc in &grounding.clauses {
        let s = grounding.stratum(gc.head).expect("heads are derived");
        for &(a, neg) in &gc.body {
            if let Some(sa) = grounding.stratum(a) {
                if sa > s || (neg && sa == s) {
                    return Err(ReasonerError::Unstratified {
                        atom: grounding.atom(a).to_string(),
                    });
                }
            }
        }
        by_stratum[s].push(gc);
    }

    let mut iterations = 0;
    for clauses in &by_stratum {
        if clauses.is_empty() {
            continue;
        }
        let mut sweeps = 0;
        loop {
            let mut change: f64 = 0.0;
            for gc in clauses {
                let val = clause_value(gc, &v, weights);
                if val > v[gc.head] {
                    change = change.max(val - v[gc.head]);
                    v[gc.head] = val;
                }
            }
            sweeps += 1;
            iterations += 1;
            if change < opts.tol {
                break;
            }
            if sweeps >= opts.max_iters {
                return Err(ReasonerError::NonConvergence {
                    iterations: sweeps,
                    residual: change,
                });
            }
        }
    }

    let best = grounding
        .clauses
        .iter()
        .filter(|gc| grounding.is_query_clause(gc))
        .map(|gc| (gc, clause_value(gc, &v, weights)))
        .min_by(|a, b| derivation_order(*a, *b));

    let Some((best, _)) = best else {
        return Ok(InferenceResult {
            valuation: v,
            query_prob: 0.0,
            normalized_prob: 0.0,
            n_atoms: 0,
            best_grounding: None,
            best_weight: 0.0,
            per_atom: Vec::new(),
            iterations,
        });
    };

    let query_prob = v[best.head];
    let n_atoms = best.body.len();
    let normalized_prob = if n_atoms == 0 {
        query_prob
    } else {
        query_prob.powf(1.0 / n_atoms as f64)
    };
    let per_atom = best
        .body
        .iter()
        .map(|&(a, neg)| AtomProb {
            atom: if neg {
                format!("not {}", grounding.atom(a))
            } else {
                grounding.atom(a).to_string()
            },
            prob: if neg { 1.0 - v[a] } else { v[a] },
        })
        .collect();

    Ok(InferenceResult {
        best_weight: weights.weight(best.clause_index),
        best_grounding: Some(best.clone()),
        valuation: v,
        query_prob,
        normalized_prob,
        n_atoms,
        per_atom,
        iterations,
    })
}
