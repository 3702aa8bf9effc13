//! Valuation of built-in atoms from detections.

use super::{Attribute, DetectedObject, Relation, SceneError, SceneRecord};
use crate::math::logistic_pair;

/// Default logistic slope for spatial relations, in normalized image units.
pub const DEFAULT_TAU: f64 = 0.05;
/// Default cap on objects per scene.
pub const DEFAULT_MAX_OBJECTS: usize = 16;

/// Fixed parameters of the fact-valuation step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValuationConfig {
    /// Slope of the spatial logistic; smaller is crisper.
    pub tau: f64,
    pub max_objects: usize,
}

impl Default for ValuationConfig {
    fn default() -> Self {
        ValuationConfig {
            tau: DEFAULT_TAU,
            max_objects: DEFAULT_MAX_OBJECTS,
        }
    }
}

impl ValuationConfig {
    pub fn with_tau(tau: f64) -> Self {
        ValuationConfig {
            tau,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), SceneError> {
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(SceneError::InvalidConfig(format!(
                "spatial slope must be positive, got {}",
                self.tau
            )));
        }
        Ok(())
    }
}

/// Looks up `value` in the distribution named by `predicate`.
pub fn value_attribute(obj: &DetectedObject, predicate: &str, value: &str) -> Result<f64, SceneError> {
    let attribute: Attribute = predicate
        .parse()
        .map_err(|_| SceneError::UnknownPredicate(predicate.to_string()))?;
    Ok(obj.prob(attribute, value))
}

/// Soft spatial relation "a is `relation` of b" from center displacement.
pub fn value_position(a: &DetectedObject, b: &DetectedObject, relation: Relation, cfg: &ValuationConfig) -> f64 {
    // above/right are the directly computed sides; below/left are exact complements
    let (x, primary) = match relation {
        Relation::Above => ((b.bbox.cy - a.bbox.cy) / cfg.tau, true),
        Relation::Below => ((b.bbox.cy - a.bbox.cy) / cfg.tau, false),
        Relation::Right => ((a.bbox.cx - b.bbox.cx) / cfg.tau, true),
        Relation::Left => ((a.bbox.cx - b.bbox.cx) / cfg.tau, false),
    };
    let (p, q) = logistic_pair(x);
    if primary {
        p
    } else {
        q
    }
}

/// P(at least `k` objects carry `value`), objects as independent trials.
pub fn value_at_least(scene: &SceneRecord, attribute: Attribute, value: &str, k: usize) -> f64 {
    let probs: Vec<f64> = scene.objects.iter().map(|o| o.prob(attribute, value)).collect();
    poisson_binomial_tail(&probs, k)
}

/// Upper tail P(X ≥ k) of a Poisson-binomial variable, in O(n·k).
///
/// `state[j]` holds P(X = j) for j < k and `state[k]` the absorbed mass P(X ≥ k).
pub fn poisson_binomial_tail(probs: &[f64], k: usize) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if k > probs.len() {
        return 0.0;
    }
    let mut state = vec![0.0; k + 1];
    state[0] = 1.0;
    for &p in probs {
        let q = 1.0 - p;
        state[k] += state[k - 1] * p;
        for j in (1..k).rev() {
            state[j] = state[j] * q + state[j - 1] * p;
        }
        state[0] *= q;
    }
    state[k].clamp(0.0, 1.0)
}
