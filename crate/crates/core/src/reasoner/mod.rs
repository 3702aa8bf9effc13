//! Grounding, weighted forward chaining and its derivatives.
//!
//! Conjunction is the product t-norm, negation is `1 − v` over a converged
//! lower stratum, and multiple derivations of an atom are joined by `max`.
//! The query score is normalized by the n-th root, n being the body length of
//! the winning ground clause.

mod grad;
mod ground;
mod infer;
mod weights;

pub use grad::{gradients, Gradients, TIE_TOLERANCE};
pub use ground::{ground, GroundClause, Grounding, MAX_GROUND_CLAUSES};
pub use infer::{
    clause_value, infer, AtomProb, InferOptions, InferenceResult, DEFAULT_MAX_ITERS, DEFAULT_TOL,
};
pub use weights::{ClauseWeights, TRAINABLE_INIT_PARAM, UNIT_WEIGHT_PARAM};

pub use crate::math::logistic;

use thiserror::Error;

use crate::lang::RuleProgram;
use crate::scene::{build_atom_table, GroundAtomTable, SceneRecord, ValuationConfig};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReasonerError {
    #[error("grounding would produce {count} ground clauses (limit {limit})")]
    GroundingBlowUp { count: usize, limit: usize },
    #[error("inference did not converge after {iterations} sweeps (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("negated atom `{atom}` is not in a strictly lower stratum")]
    Unstratified { atom: String },
    #[error("competing derivations of `{atom}` are tied (gap {gap:e}); only a subgradient exists")]
    Tie { atom: String, gap: f64 },
    #[error("winning derivation of `{atom}` is cyclic")]
    CyclicDerivation { atom: String },
    #[error("expected {expected} clause weights, got {found}")]
    WeightCount { expected: usize, found: usize },
    #[error("weight parameter of clause {clause} is NaN")]
    InvalidWeight { clause: usize },
    #[error("built-in atom `{0}` missing from the atom table")]
    MissingAtom(String),
    #[error("invalid inference options: {0}")]
    InvalidOptions(String),
}

/// Table, grounding and inference result for one scene.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub table: GroundAtomTable,
    pub grounding: Grounding,
    pub result: InferenceResult,
}

/// Values, grounds and infers; keeps the intermediate structures.
pub fn evaluate_scene_detailed(
    program: &RuleProgram,
    scene: &SceneRecord,
    cfg: &ValuationConfig,
    weights: &ClauseWeights,
) -> Result<Evaluation, crate::Error> {
    weights.check(program.clauses.len())?;
    let table = build_atom_table(scene, program, cfg)?;
    let grounding = ground(program, scene, &table)?;
    let result = infer(&table, &grounding, weights, InferOptions::default())?;
    Ok(Evaluation {
        table,
        grounding,
        result,
    })
}

/// Scores one scene against the program's query.
pub fn evaluate_scene(
    program: &RuleProgram,
    scene: &SceneRecord,
    cfg: &ValuationConfig,
    weights: &ClauseWeights,
) -> Result<InferenceResult, crate::Error> {
    evaluate_scene_detailed(program, scene, cfg, weights).map(|e| e.result)
}
