//! Candidate-pool scoring, ranking and per-atom explanations.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::lang::RuleProgram;
use crate::reasoner::{evaluate_scene, evaluate_scene_detailed, AtomProb, ClauseWeights};
use crate::scene::{SceneRecord, ValuationConfig};
use crate::Error;

#[derive(Debug, Clone, PartialEq)]
pub struct RankedResult {
    pub image_id: String,
    /// 1-based position in the full ranking.
    pub rank: usize,
    pub normalized_prob: f64,
    pub query_prob: f64,
    pub n_atoms: usize,
    pub per_atom: Vec<AtomProb>,
    pub external_scores: BTreeMap<String, f64>,
    /// Set when the candidate could not be evaluated; it then scores 0.
    pub error: Option<String>,
}

/// Evaluates every scene and returns them best first. Ties in score are
/// broken by ascending image id. `top_k` truncates the output only.
pub fn rank_pool(
    pool: &[SceneRecord],
    program: &RuleProgram,
    cfg: &ValuationConfig,
    weights: &ClauseWeights,
    top_k: Option<usize>,
) -> Result<Vec<RankedResult>, Error> {
    if pool.is_empty() {
        return Err(Error::EmptyPool);
    }
    weights.check(program.clauses.len())?;
    let mut results: Vec<RankedResult> = pool
        .par_iter()
        .map(|scene| score_candidate(scene, program, cfg, weights))
        .collect();
    results.sort_by(|a, b| {
        b.normalized_prob
            .total_cmp(&a.normalized_prob)
            .then_with(|| a.image_id.cmp(&b.image_id))
    });
    for (i, r) in results.iter_mut().enumerate() {
        r.rank = i + 1;
    }
    if let Some(k) = top_k {
        results.truncate(k);
    }
    Ok(results)
}

fn score_candidate(
    scene: &SceneRecord,
    program: &RuleProgram,
    cfg: &ValuationConfig,
    weights: &ClauseWeights,
) -> RankedResult {
    let base = RankedResult {
        image_id: scene.image_id.clone(),
        rank: 0,
        normalized_prob: 0.0,
        query_prob: 0.0,
        n_atoms: 0,
        per_atom: Vec::new(),
        external_scores: scene.external_scores.clone(),
        error: None,
    };
    match scene.validate().map_err(Error::from).and_then(|_| evaluate_scene(program, scene, cfg, weights)) {
        Ok(r) => RankedResult {
            normalized_prob: r.normalized_prob,
            query_prob: r.query_prob,
            n_atoms: r.n_atoms,
            per_atom: r.per_atom,
            ..base
        },
        Err(e) => RankedResult {
            error: Some(e.to_string()),
            ..base
        },
    }
}

#[derive(Serialize)]
struct RankedJson<'a> {
    image_id: &'a str,
    rank: usize,
    score: f64,
    raw_score: f64,
    n: usize,
    atoms: Vec<AtomJson<'a>>,
    external_scores: &'a BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<&'a str>,
}

#[derive(Serialize)]
struct AtomJson<'a> {
    atom: &'a str,
    prob: f64,
}

impl RankedResult {
    pub fn to_json(&self) -> String {
        let rec = RankedJson {
            image_id: &self.image_id,
            rank: self.rank,
            score: self.normalized_prob,
            raw_score: self.query_prob,
            n: self.n_atoms,
            atoms: self
                .per_atom
                .iter()
                .map(|a| AtomJson {
                    atom: &a.atom,
                    prob: a.prob,
                })
                .collect(),
            external_scores: &self.external_scores,
            error: self.error.as_deref(),
        };
        serde_json::to_string(&rec).expect("ranked result serializes")
    }
}

pub fn write_ranked<W: Write>(mut writer: W, results: &[RankedResult]) -> std::io::Result<()> {
    for r in results {
        writeln!(writer, "{}", r.to_json())?;
    }
    Ok(())
}

/// Text report of the winning grounding: one `atom: prob` line per literal in
/// canonical atom order, the raw product, n, and the normalized score.
pub fn explain(
    scene: &SceneRecord,
    program: &RuleProgram,
    cfg: &ValuationConfig,
    weights: &ClauseWeights,
) -> Result<String, Error> {
    scene.validate()?;
    let eval = evaluate_scene_detailed(program, scene, cfg, weights)?;
    let r = &eval.result;
    let mut out = String::new();
    writeln!(out, "image: {}", scene.image_id).unwrap();
    let Some(best) = &r.best_grounding else {
        writeln!(out, "no grounding; score 0").unwrap();
        return Ok(out);
    };

    let mut lines: Vec<_> = best
        .body
        .iter()
        .zip(&r.per_atom)
        .map(|(&(idx, neg), ap)| ((eval.grounding.atom(idx), neg), ap))
        .collect();
    lines.sort_by(|a, b| a.0.cmp(&b.0));
    for (_, ap) in lines {
        writeln!(out, "{}: {:.2}", ap.atom, ap.prob).unwrap();
    }
    if r.best_weight != 1.0 {
        writeln!(out, "weight: {:.4}", r.best_weight).unwrap();
    }
    writeln!(out, "product: {:.4} (n = {})", r.query_prob, r.n_atoms).unwrap();
    writeln!(out, "{}: {:.2}", eval.grounding.atom(best.head), r.normalized_prob).unwrap();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{sphere_above_cube_scene, SPHERE_ABOVE_CUBE_RULE};
    use crate::lang::parse_program;
    use crate::scene::{Attribute, BBox, DetectedObject};

    fn dog_scene(id: &str, p: f64) -> SceneRecord {
        SceneRecord::new(
            id,
            vec![DetectedObject::new("obj1", BBox::new(0.5, 0.5, 0.2, 0.2)).with(Attribute::Class, &[("dog", p)])],
        )
    }

    fn dog_program() -> RuleProgram {
        parse_program("kp :- class(X, dog).", "kp").unwrap()
    }

    #[test]
    fn ties_broken_by_image_id() {
        let pool = vec![dog_scene("a", 0.2), dog_scene("c", 0.9), dog_scene("b", 0.9)];
        let prog = dog_program();
        let ranked = rank_pool(&pool, &prog, &Default::default(), &ClauseWeights::from_program(&prog), None).unwrap();
        let ids: Vec<&str> = ranked.iter().map(|r| r.image_id.as_str()).collect();
        assert_eq!(ids, vec!["b", "c", "a"]);
        assert_eq!(ranked.iter().map(|r| r.rank).collect::<Vec<_>>(), vec![1, 2, 3]);
    }

    #[test]
    fn singleton_pool_and_top_k_prefix() {
        let prog = dog_program();
        let w = ClauseWeights::from_program(&prog);
        let one = rank_pool(&[dog_scene("x", 0.4)], &prog, &Default::default(), &w, None).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!((one[0].rank, one[0].image_id.as_str()), (1, "x"));

        let pool: Vec<_> = (0..10).map(|i| dog_scene(&format!("s{i}"), i as f64 / 10.0)).collect();
        let full = rank_pool(&pool, &prog, &Default::default(), &w, None).unwrap();
        let top = rank_pool(&pool, &prog, &Default::default(), &w, Some(3)).unwrap();
        assert_eq!(top.as_slice(), &full[..3]);
        assert!(matches!(rank_pool(&[], &prog, &Default::default(), &w, None), Err(Error::EmptyPool)));
    }

    #[test]
    fn failed_candidates_score_zero_without_aborting() {
        let prog = dog_program();
        let crowded = SceneRecord::new(
            "crowded",
            (0..20)
                .map(|i| DetectedObject::new(format!("o{i}"), BBox::new(0.5, 0.5, 0.01, 0.01)))
                .collect(),
        );
        let mut bad = dog_scene("bad", 0.9);
        bad.objects[0].class.insert("cat".into(), 0.9);
        let pool = vec![crowded, dog_scene("ok", 0.7), bad];
        let ranked = rank_pool(&pool, &prog, &Default::default(), &ClauseWeights::from_program(&prog), None).unwrap();
        assert_eq!(ranked[0].image_id, "ok");
        assert!(ranked[1..].iter().all(|r| r.normalized_prob == 0.0 && r.error.is_some()));
    }

    #[test]
    fn json_record_fields() {
        let prog = parse_program(SPHERE_ABOVE_CUBE_RULE, "kp").unwrap();
        let mut scene = sphere_above_cube_scene();
        scene.external_scores.insert("baseline".into(), 30.5);
        let ranked = rank_pool(&[scene], &prog, &Default::default(), &ClauseWeights::from_program(&prog), None).unwrap();
        let v: serde_json::Value = serde_json::from_str(&ranked[0].to_json()).unwrap();
        assert_eq!(v["image_id"], "worked_example");
        assert_eq!(v["rank"], 1);
        assert_eq!(v["n"], 5);
        assert_eq!(v["atoms"].as_array().unwrap().len(), 5);
        assert_eq!(v["atoms"][0]["atom"], "shape(obj1, sphere)");
        assert_eq!(v["external_scores"]["baseline"], 30.5);
        assert!((v["score"].as_f64().unwrap() - 0.855).abs() < 0.005);
        assert!(v.get("error").is_none());
    }

    #[test]
    fn explain_worked_example() {
        let prog = parse_program(SPHERE_ABOVE_CUBE_RULE, "kp").unwrap();
        let report = explain(&sphere_above_cube_scene(), &prog, &Default::default(), &ClauseWeights::from_program(&prog)).unwrap();
        let expected_lines = [
            "color(obj1, blue): 0.95",
            "color(obj2, red): 0.83",
            "position(obj1, obj2, above): 1.00",
            "shape(obj1, sphere): 1.00",
            "shape(obj2, cube): 0.58",
            "product: 0.4573 (n = 5)",
            "kp: 0.86",
        ];
        let lines: Vec<&str> = report.lines().skip(1).collect();
        assert_eq!(lines, expected_lines);
    }

    #[test]
    fn explain_empty_scene() {
        let prog = parse_program(SPHERE_ABOVE_CUBE_RULE, "kp").unwrap();
        let report = explain(&SceneRecord::new("e", vec![]), &prog, &Default::default(), &ClauseWeights::from_program(&prog)).unwrap();
        assert!(report.contains("no grounding; score 0"));
    }
}
