//! Built-in predicates valued directly from detections.
//!
//! | predicate  | arity | arguments                                  |
//! |------------|-------|--------------------------------------------|
//! | `shape`    | 2     | object, value                              |
//! | `color`    | 2     | object, value                              |
//! | `size`     | 2     | object, value                              |
//! | `class`    | 2     | object, value                              |
//! | `position` | 3     | object, object, `above\|below\|left\|right`  |
//! | `at_least` | 3     | attribute name, value, integer k           |

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Attribute {
    Shape,
    Color,
    Size,
    Class,
}

impl Attribute {
    pub const ALL: [Attribute; 4] = [
        Attribute::Shape,
        Attribute::Color,
        Attribute::Size,
        Attribute::Class,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Attribute::Shape => "shape",
            Attribute::Color => "color",
            Attribute::Size => "size",
            Attribute::Class => "class",
        }
    }
}

impl fmt::Display for Attribute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Attribute {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Attribute::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown attribute predicate `{s}`"))
    }
}

/// Spatial relation between two objects; `position(a, b, r)` reads "a is r of b".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    Above,
    Below,
    Left,
    Right,
}

impl Relation {
    pub const ALL: [Relation; 4] = [
        Relation::Above,
        Relation::Below,
        Relation::Left,
        Relation::Right,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Relation::Above => "above",
            Relation::Below => "below",
            Relation::Left => "left",
            Relation::Right => "right",
        }
    }

    pub fn inverse(self) -> Relation {
        match self {
            Relation::Above => Relation::Below,
            Relation::Below => Relation::Above,
            Relation::Left => Relation::Right,
            Relation::Right => Relation::Left,
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Relation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Relation::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| format!("unknown spatial relation `{s}`"))
    }
}

/// What each argument slot of a built-in accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArgKind {
    /// Variable or object-id constant.
    Object,
    /// Any constant.
    Value,
    Relation,
    AttributeName,
    Integer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Builtin {
    Attribute(Attribute),
    Position,
    AtLeast,
}

impl Builtin {
    pub fn lookup(predicate: &str) -> Option<Builtin> {
        match predicate {
            "position" => Some(Builtin::Position),
            "at_least" => Some(Builtin::AtLeast),
            other => other.parse().ok().map(Builtin::Attribute),
        }
    }

    pub fn signature(self) -> &'static [ArgKind] {
        use ArgKind::*;
        match self {
            Builtin::Attribute(_) => &[Object, Value],
            Builtin::Position => &[Object, Object, Relation],
            Builtin::AtLeast => &[AttributeName, Value, Integer],
        }
    }

    pub fn arity(self) -> usize {
        self.signature().len()
    }
}
