//! Object-centric scenes and the valuation of built-in facts over them.

mod io;
mod registry;
mod table;
mod types;
mod valuation;

pub use io::{default_object_id, parse_scene, read_pool, scene_to_json, write_pool, SCHEMA_VERSION};
pub use registry::{ArgKind, Attribute, Builtin, Relation};
pub use table::{build_atom_table, value_ground_builtin, GroundAtom, GroundAtomTable};
pub use types::{BBox, DetectedObject, Distribution, SceneRecord, ScenePool};
pub use valuation::{
    poisson_binomial_tail, value_at_least, value_attribute, value_position, ValuationConfig,
    DEFAULT_MAX_OBJECTS, DEFAULT_TAU,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SceneError {
    #[error("invalid object `{id}`: {reason}")]
    InvalidObject { id: String, reason: String },
    #[error("scene `{image_id}`: duplicate object id `{id}`")]
    DuplicateObjectId { image_id: String, id: String },
    #[error("scene `{image_id}` has {found} objects, cap is {cap}")]
    TooManyObjects {
        image_id: String,
        found: usize,
        cap: usize,
    },
    #[error("unsupported schema_version {0} (expected 1)")]
    SchemaVersion(u32),
    #[error("malformed detections{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Json { line: Option<usize>, message: String },
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error("invalid valuation config: {0}")]
    InvalidConfig(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl SceneError {
    pub(crate) fn at_line(self, line: usize) -> Self {
        match self {
            SceneError::Json { message, .. } => SceneError::Json {
                line: Some(line),
                message,
            },
            other => other,
        }
    }
}
