use crate::lang::RuleProgram;
use crate::math::{logistic, logistic_grad};

use super::ReasonerError;

/// Parameter whose logistic is exactly 1: clauses are unweighted by default.
pub const UNIT_WEIGHT_PARAM: f64 = f64::INFINITY;

/// Finite starting point for learning, σ(12) ≈ 0.9999939.
pub const TRAINABLE_INIT_PARAM: f64 = 12.0;

/// One unconstrained parameter per clause; the clause weight is σ(θ).
#[derive(Debug, Clone, PartialEq)]
pub struct ClauseWeights {
    pub params: Vec<f64>,
}

impl ClauseWeights {
    pub fn new(params: Vec<f64>) -> Self {
        ClauseWeights { params }
    }

    /// The parameters recorded on the program's clauses.
    pub fn from_program(program: &RuleProgram) -> Self {
        ClauseWeights {
            params: program.clauses.iter().map(|c| c.weight_param).collect(),
        }
    }

    pub fn unit(n: usize) -> Self {
        ClauseWeights {
            params: vec![UNIT_WEIGHT_PARAM; n],
        }
    }

    pub fn trainable(n: usize) -> Self {
        ClauseWeights {
            params: vec![TRAINABLE_INIT_PARAM; n],
        }
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn weight(&self, clause: usize) -> f64 {
        logistic(self.params[clause])
    }

    /// dw/dθ for `clause`.
    pub fn weight_grad(&self, clause: usize) -> f64 {
        logistic_grad(self.params[clause])
    }

    pub fn check(&self, clauses: usize) -> Result<(), ReasonerError> {
        if self.params.len() != clauses {
            return Err(ReasonerError::WeightCount {
                expected: clauses,
                found: self.params.len(),
            });
        }
        if let Some(i) = self.params.iter().position(|p| p.is_nan()) {
            return Err(ReasonerError::InvalidWeight { clause: i });
        }
        Ok(())
    }
}
