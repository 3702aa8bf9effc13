//! Fixed workloads shared by the criterion benches.

use logicrank_core::fixtures::TWO_BLUE_SPHERES_RED_CUBE;
use logicrank_core::{generate_pool, parse_program, ClauseWeights, RuleProgram, SceneRecord, SceneSpec};

/// Program and unit weights for `source` with query `kp`.
pub fn program(source: &str) -> (RuleProgram, ClauseWeights) {
    let program = parse_program(source, "kp").expect("bench rules are valid");
    let weights = ClauseWeights::from_program(&program);
    (program, weights)
}

/// A seeded pool of `count` noisy scenes with `objects.0..=objects.1` objects each.
pub fn pool(count: usize, objects: (usize, usize), seed: u64) -> Vec<SceneRecord> {
    let spec = SceneSpec {
        object_count: objects,
        noise: 0.05,
        seed,
        ..SceneSpec::default()
    };
    generate_pool(&spec, count).expect("bench spec is valid").0
}

/// The ranking workload: the three-object query over a 200-scene pool.
pub fn ranking_workload() -> (RuleProgram, ClauseWeights, Vec<SceneRecord>) {
    let (p, w) = program(TWO_BLUE_SPHERES_RED_CUBE);
    (p, w, pool(200, (2, 6), 1))
}

/// Deterministic per-trial probabilities in (0, 1).
pub fn trial_probs(n: usize) -> Vec<f64> {
    (0..n).map(|i| 0.05 + 0.9 * ((i * 7919) % 101) as f64 / 100.0).collect()
}
