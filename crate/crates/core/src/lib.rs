//! Probabilistic-logic reranking of object-centric scenes.
//!
//! A query is written as a small rule program (Prolog-style clauses over
//! built-in `shape`, `color`, `size`, `class`, `position` and `at_least`
//! predicates). Each candidate scene is turned into a table of fact
//! probabilities, the program is grounded over the scene's objects, and
//! weighted forward chaining computes a soft entailment score for the query.
//! Scores are normalized by the n-th root of the winning clause's body
//! length and candidates are ranked by that score.
//!
//! ```
//! use logicrank_core::{evaluate_scene, fixtures, parse_program, ClauseWeights, ValuationConfig};
//!
//! let program = parse_program(fixtures::SPHERE_ABOVE_CUBE_RULE, "kp").unwrap();
//! let weights = ClauseWeights::from_program(&program);
//! let result = evaluate_scene(&program, &fixtures::sphere_above_cube_scene(), &ValuationConfig::default(), &weights).unwrap();
//! assert!((result.normalized_prob - 0.855).abs() < 0.005);
//! ```

pub mod fixtures;
pub mod gen;
pub mod lang;
mod math;
pub mod oracle;
pub mod reasoner;
pub mod rerank;
pub mod scene;

pub use gen::{generate_pool, GenError, GroundTruthScene, SceneSpec};
pub use lang::{parse_program, LangError, RuleProgram};
pub use reasoner::{
    evaluate_scene, gradients, infer, ClauseWeights, InferenceResult, ReasonerError,
};
pub use rerank::{explain, rank_pool, RankedResult};
pub use scene::{
    build_atom_table, DetectedObject, GroundAtomTable, SceneError, SceneRecord, ScenePool,
    ValuationConfig,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Lang(#[from] LangError),
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error(transparent)]
    Reasoner(#[from] ReasonerError),
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error("candidate pool is empty")]
    EmptyPool,
}
