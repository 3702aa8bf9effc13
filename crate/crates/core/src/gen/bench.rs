use std::io::Write;
use std::ops::RangeInclusive;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{emit, sample_truth, ClassPlan, GenError, SceneSpec};
use crate::lang::parse_program;
use crate::reasoner::{evaluate_scene, ClauseWeights};
use crate::scene::{Attribute, ValuationConfig, DEFAULT_MAX_OBJECTS};
use crate::Error;

/// One (scene, rule) score of the counting benchmark.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    /// True number of class members in the scene.
    pub group: usize,
    /// `i` of the rule `kp_i` that produced `prob`.
    pub rule: usize,
    pub image_id: String,
    pub prob: f64,
}

/// Rules `kp_i :- at_least(attr, value, i), not at_least(attr, value, i+1).`
/// for every `i` in `ks`.
pub fn counting_program(attribute: Attribute, value: &str, ks: RangeInclusive<usize>) -> String {
    ks.map(|i| {
        format!(
            "kp_{i} :- at_least({attribute}, {value}, {i}), not at_least({attribute}, {value}, {}).\n",
            i + 1
        )
    })
    .collect()
}

/// For each group `i`, samples `per_group` scenes holding exactly `i` objects
/// of `class` plus distractors, and scores every scene under every `kp_j`.
pub fn bench_count(
    groups: RangeInclusive<usize>,
    per_group: usize,
    class: &str,
    spec: &SceneSpec,
) -> Result<Vec<BenchRow>, Error> {
    spec.validate()?;
    if !spec.classes.iter().any(|c| c == class) {
        return Err(GenError::UnknownClass(class.to_string()).into());
    }
    if *groups.end() > DEFAULT_MAX_OBJECTS || groups.is_empty() {
        return Err(GenError::InvalidRange {
            min: *groups.start(),
            max: *groups.end(),
            cap: DEFAULT_MAX_OBJECTS,
        }
        .into());
    }

    let source = counting_program(Attribute::Class, class, groups.clone());
    let programs = groups
        .clone()
        .map(|j| parse_program(&source, &format!("kp_{j}")).map(|p| (j, p)))
        .collect::<Result<Vec<_>, _>>()?;
    let cfg = ValuationConfig::default();

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut rows = Vec::new();
    for group in groups {
        let lo = spec.object_count.0.max(group);
        let hi = spec.object_count.1.max(group);
        for k in 0..per_group {
            let n = rng.random_range(lo..=hi);
            let plan = ClassPlan { class, count: group };
            let truth = sample_truth(&mut rng, spec, format!("g{group}_{k:04}"), n, Some(plan));
            let scene = emit(&mut rng, spec, &truth);
            for (rule, program) in &programs {
                let weights = ClauseWeights::from_program(program);
                let r = evaluate_scene(program, &scene, &cfg, &weights)?;
                rows.push(BenchRow {
                    group,
                    rule: *rule,
                    image_id: scene.image_id.clone(),
                    prob: r.normalized_prob,
                });
            }
        }
    }
    Ok(rows)
}

/// CSV with header `group,rule,image_id,prob`.
pub fn write_bench_csv<W: Write>(writer: W, rows: &[BenchRow]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(writer);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
