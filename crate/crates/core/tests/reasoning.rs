use logicrank_core::oracle::random::{random_acyclic_program, random_scene};
use logicrank_core::oracle::{recursive_fuzzy_eval, recursive_fuzzy_valuation};
use logicrank_core::reasoner::{clause_value, ground, Grounding, InferOptions, ReasonerError, TIE_TOLERANCE};
use logicrank_core::{
    build_atom_table, evaluate_scene, gradients, infer, parse_program, ClauseWeights, GroundAtomTable, RuleProgram,
    ValuationConfig,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Case {
    program: RuleProgram,
    table: GroundAtomTable,
    grounding: Grounding,
}

fn case_from(seed: u64, src: Option<&str>) -> Case {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let src = src.map_or_else(|| random_acyclic_program(&mut rng), str::to_string);
    let program = parse_program(&src, "kp").unwrap();
    let n = rng.random_range(0..=4);
    let scene = random_scene(&mut rng, n);
    let table = build_atom_table(&scene, &program, &ValuationConfig::default()).unwrap();
    let grounding = ground(&program, &scene, &table).unwrap();
    Case { program, table, grounding }
}

fn random_weights(rng: &mut ChaCha8Rng, n: usize) -> ClauseWeights {
    ClauseWeights::new((0..n).map(|_| rng.random_range(-3.0..3.0)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn fixpoint_matches_recursive_oracle(seed in any::<u64>(), weighted in any::<bool>()) {
        let c = case_from(seed, None);
        let w = if weighted {
            random_weights(&mut ChaCha8Rng::seed_from_u64(!seed), c.program.clauses.len())
        } else {
            ClauseWeights::from_program(&c.program)
        };
        let r = infer(&c.table, &c.grounding, &w, InferOptions::default()).unwrap();
        let oracle = recursive_fuzzy_valuation(&c.table, &c.grounding, &w).unwrap();
        for (i, (a, b)) in r.valuation.iter().zip(&oracle).enumerate() {
            prop_assert!((a - b).abs() <= 1e-9, "{}: {a} vs {b}", c.grounding.atom(i));
        }
        let q = recursive_fuzzy_eval(&c.table, &c.grounding, &w).unwrap();
        prop_assert!((r.query_prob - q).abs() <= 1e-9);
    }

    #[test]
    fn valuations_stay_in_unit_interval_and_extra_sweep_is_idle(seed in any::<u64>()) {
        let c = case_from(seed, None);
        let w = ClauseWeights::from_program(&c.program);
        let r = infer(&c.table, &c.grounding, &w, InferOptions::default()).unwrap();
        prop_assert!(r.valuation.iter().all(|v| (0.0..=1.0).contains(v)));
        prop_assert!((0.0..=1.0).contains(&r.normalized_prob));
        let mut v = r.valuation.clone();
        for gc in &c.grounding.clauses {
            let val = clause_value(gc, &v, &w);
            if val > v[gc.head] {
                prop_assert!(val - v[gc.head] <= InferOptions::default().tol);
                v[gc.head] = val;
            }
        }
    }

    #[test]
    fn raising_a_fact_never_lowers_the_query(seed in any::<u64>(), bump in 0.0..=1.0f64, pick in any::<prop::sample::Index>()) {
        let c = case_from(seed, None);
        prop_assume!(!c.table.is_empty());
        prop_assume!(c.program.clauses.iter().all(|cl| cl.body.iter().all(|l| !l.negated)));
        let w = ClauseWeights::from_program(&c.program);
        let before = infer(&c.table, &c.grounding, &w, InferOptions::default()).unwrap();
        let mut values = c.table.values.clone();
        let i = pick.index(values.len());
        values[i] = (values[i] + bump).min(1.0);
        let after = infer(&c.table.with_values(values), &c.grounding, &w, InferOptions::default()).unwrap();
        prop_assert!(after.query_prob >= before.query_prob);
    }

    #[test]
    fn raising_a_fact_never_lowers_positive_rules(seed in any::<u64>(), bump in 0.0..=1.0f64, pick in any::<prop::sample::Index>()) {
        let src = "p(X) :- shape(X, cube), color(X, red).\n\
                   p(X) :- class(X, dog).\n\
                   kp :- p(X), position(X, Y, left), color(Y, blue).\n\
                   kp :- at_least(class, cat, 2), shape(Z, sphere).";
        let c = case_from(seed, Some(src));
        prop_assume!(!c.table.is_empty());
        let w = ClauseWeights::from_program(&c.program);
        let before = infer(&c.table, &c.grounding, &w, InferOptions::default()).unwrap();
        let mut values = c.table.values.clone();
        let i = pick.index(values.len());
        values[i] = (values[i] + bump).min(1.0);
        let after = infer(&c.table.with_values(values), &c.grounding, &w, InferOptions::default()).unwrap();
        prop_assert!(after.query_prob >= before.query_prob);
    }

    #[test]
    fn normalization_preserves_ranking(seeds in prop::collection::vec(any::<u64>(), 2..12)) {
        let program = parse_program(
            "kp :- shape(X, cube), color(X, red), position(X, Y, above), class(Y, dog).",
            "kp",
        ).unwrap();
        let w = ClauseWeights::from_program(&program);
        let scores: Vec<(f64, f64)> = seeds
            .iter()
            .map(|&s| {
                let scene = random_scene(&mut ChaCha8Rng::seed_from_u64(s), 3);
                let r = evaluate_scene(&program, &scene, &ValuationConfig::default(), &w).unwrap();
                (r.query_prob, r.normalized_prob)
            })
            .collect();
        for a in &scores {
            for b in &scores {
                if a.0 < b.0 {
                    prop_assert!(a.1 <= b.1);
                }
                if a.0 == b.0 {
                    prop_assert_eq!(a.1, b.1);
                }
            }
        }
    }

    #[test]
    fn unit_weight_equals_unweighted_and_zero_weight_disables(seed in any::<u64>()) {
        let c = case_from(seed, None);
        let n = c.program.clauses.len();
        let unit = infer(&c.table, &c.grounding, &ClauseWeights::unit(n), InferOptions::default()).unwrap();
        let default = infer(&c.table, &c.grounding, &ClauseWeights::from_program(&c.program), InferOptions::default()).unwrap();
        prop_assert_eq!(&unit.valuation, &default.valuation);
        let off = infer(&c.table, &c.grounding, &ClauseWeights::new(vec![f64::NEG_INFINITY; n]), InferOptions::default()).unwrap();
        prop_assert_eq!(off.query_prob, 0.0);
        prop_assert!(off.valuation[c.grounding.num_input..].iter().all(|&v| v == 0.0));
    }
}

/// Smallest gap between the best and runner-up derivation of any derived atom;
/// the initial value 0 competes as well, since it is joined by max.
fn min_derivation_gap(c: &Case, w: &ClauseWeights, v: &[f64]) -> f64 {
    let mut gap = f64::INFINITY;
    for atom in c.grounding.num_input..c.grounding.num_atoms() {
        let mut vals: Vec<f64> = c
            .grounding
            .clauses
            .iter()
            .filter(|gc| gc.head == atom)
            .map(|gc| clause_value(gc, v, w))
            .collect();
        vals.push(0.0);
        vals.sort_by(|a, b| b.total_cmp(a));
        if let [a, b, ..] = vals[..] {
            gap = gap.min(a - b);
        }
    }
    gap
}

fn relative_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-6)
}

#[test]
fn gradients_match_central_differences() {
    let h = 1e-5;
    let opts = InferOptions::default();
    let mut checked = 0;
    let mut seed = 0u64;
    while checked < 60 {
        seed += 1;
        assert!(seed < 20_000, "too few tie-free programs");
        let c = case_from(seed, None);
        let mut wrng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let w = random_weights(&mut wrng, c.program.clauses.len());
        let base = infer(&c.table, &c.grounding, &w, opts).unwrap();
        if base.best_grounding.is_none() || min_derivation_gap(&c, &w, &base.valuation) < 1e-3 {
            continue;
        }
        let g = match gradients(&c.table, &c.grounding, &w) {
            Ok(g) => g,
            Err(ReasonerError::Tie { gap, .. }) => {
                assert!(gap < TIE_TOLERANCE);
                continue;
            }
            Err(e) => panic!("seed {seed}: {e}"),
        };
        let q = |table: &GroundAtomTable, w: &ClauseWeights| infer(table, &c.grounding, w, opts).unwrap().query_prob;
        for i in 0..w.len() {
            let mut plus = w.params.clone();
            let mut minus = w.params.clone();
            plus[i] += h;
            minus[i] -= h;
            let fd = (q(&c.table, &ClauseWeights::new(plus)) - q(&c.table, &ClauseWeights::new(minus))) / (2.0 * h);
            assert!(relative_error(g.d_theta[i], fd) <= 1e-4, "seed {seed} theta {i}: {} vs {fd}", g.d_theta[i]);
        }
        for i in 0..c.table.len() {
            let mut plus = c.table.values.clone();
            let mut minus = c.table.values.clone();
            plus[i] += h;
            minus[i] -= h;
            let fd = (q(&c.table.with_values(plus), &w) - q(&c.table.with_values(minus), &w)) / (2.0 * h);
            assert!(
                relative_error(g.d_facts[i], fd) <= 1e-4,
                "seed {seed} {}: {} vs {fd}",
                c.table.atoms[i],
                g.d_facts[i]
            );
        }
        checked += 1;
    }
}

#[test]
fn concurrent_scenes_match_sequential_evaluation() {
    use rayon::prelude::*;
    let program = parse_program(logicrank_core::fixtures::SPHERE_ABOVE_CUBE_RULE, "kp").unwrap();
    let w = ClauseWeights::from_program(&program);
    let scenes: Vec<_> = (0..64).map(|s| random_scene(&mut ChaCha8Rng::seed_from_u64(s), 4)).collect();
    let cfg = ValuationConfig::default();
    let seq: Vec<_> = scenes.iter().map(|s| evaluate_scene(&program, s, &cfg, &w).unwrap()).collect();
    let par: Vec<_> = scenes.par_iter().map(|s| evaluate_scene(&program, s, &cfg, &w).unwrap()).collect();
    assert_eq!(seq, par);
}
