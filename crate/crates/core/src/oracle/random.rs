//! Random scenes and random acyclic stratified programs for randomized
//! equivalence and gradient tests.

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::scene::{default_object_id, Attribute, BBox, DetectedObject, SceneRecord};

const SHAPES: [&str; 3] = ["cube", "sphere", "cylinder"];
const COLORS: [&str; 3] = ["red", "blue", "green"];
const CLASSES: [&str; 2] = ["dog", "cat"];
const RELATIONS: [&str; 4] = ["above", "below", "left", "right"];
const VARS: [&str; 3] = ["X", "Y", "Z"];

fn random_distribution<R: Rng>(rng: &mut R, vocab: &[&str]) -> Vec<(String, f64)> {
    let raw: Vec<f64> = vocab.iter().map(|_| rng.random_range(0.01..1.0)).collect();
    let mass = rng.random_range(0.6..1.0);
    let total: f64 = raw.iter().sum();
    vocab
        .iter()
        .zip(raw)
        .map(|(v, r)| (v.to_string(), r / total * mass))
        .collect()
}

/// Scene of `n` objects with random centers and random attribute distributions.
pub fn random_scene<R: Rng>(rng: &mut R, n: usize) -> SceneRecord {
    let objects = (0..n)
        .map(|i| {
            let mut obj = DetectedObject::new(
                default_object_id(i),
                BBox::new(rng.random_range(0.05..0.95), rng.random_range(0.05..0.95), 0.1, 0.1),
            );
            for (attr, vocab) in [
                (Attribute::Shape, &SHAPES[..]),
                (Attribute::Color, &COLORS[..]),
                (Attribute::Class, &CLASSES[..]),
            ] {
                obj.distribution_mut(attr).extend(random_distribution(rng, vocab));
            }
            obj
        })
        .collect();
    SceneRecord::new("random", objects)
}

struct Pred {
    name: String,
    arity: usize,
}

fn random_builtin<R: Rng>(rng: &mut R, vars: &[&str]) -> String {
    let var = |rng: &mut R| *vars.choose(rng).expect("non-empty");
    match rng.random_range(0..10) {
        0..=4 => {
            let (attr, vocab) = [("shape", &SHAPES[..]), ("color", &COLORS[..]), ("class", &CLASSES[..])]
                .choose(rng)
                .copied()
                .expect("non-empty");
            format!("{attr}({}, {})", var(rng), vocab.choose(rng).expect("non-empty"))
        }
        5..=7 if vars.len() > 1 => {
            let a = var(rng);
            let b = loop {
                let b = var(rng);
                if b != a {
                    break b;
                }
            };
            format!("position({a}, {b}, {})", RELATIONS.choose(rng).expect("non-empty"))
        }
        5..=7 => format!("shape({}, {})", var(rng), SHAPES.choose(rng).expect("non-empty")),
        _ => format!(
            "at_least(class, {}, {})",
            CLASSES.choose(rng).expect("non-empty"),
            rng.random_range(0..4)
        ),
    }
}

/// Source of a random program with 1–3 clauses and query `kp`. Helper
/// predicates are defined before use, so the program is acyclic and any
/// negation is stratified.
pub fn random_acyclic_program<R: Rng>(rng: &mut R) -> String {
    let n_clauses = rng.random_range(1..=3);
    let mut heads: Vec<Pred> = Vec::new();
    for i in 0..n_clauses {
        let last = i + 1 == n_clauses;
        let repeat_kp = last && i > 0 && heads[i - 1].name == "kp";
        if last || repeat_kp || (i + 2 == n_clauses && rng.random_bool(0.3)) {
            heads.push(Pred { name: "kp".into(), arity: 0 });
        } else if i > 0 && rng.random_bool(0.3) {
            let prev = &heads[i - 1];
            heads.push(Pred { name: prev.name.clone(), arity: prev.arity });
        } else {
            heads.push(Pred { name: format!("p{i}"), arity: rng.random_range(0..=1) });
        }
    }

    let mut out = String::new();
    for (i, head) in heads.iter().enumerate() {
        let n_vars = rng.random_range(1..=2);
        let vars = &VARS[..n_vars];
        let mut body: Vec<(String, bool, bool)> = Vec::new();
        for _ in 0..rng.random_range(1..=3) {
            let earlier: Vec<&Pred> = heads[..i].iter().filter(|p| p.name != head.name).collect();
            let negated = rng.random_bool(0.25);
            if !earlier.is_empty() && rng.random_bool(0.35) {
                let p = earlier.choose(rng).expect("non-empty");
                let text = if p.arity == 0 {
                    p.name.clone()
                } else {
                    format!("{}({})", p.name, vars.choose(rng).expect("non-empty"))
                };
                body.push((text, negated, p.arity > 0));
            } else {
                let text = random_builtin(rng, vars);
                let has_var = !text.starts_with("at_least");
                body.push((text, negated, has_var));
            }
        }
        let head_text = if head.arity == 0 {
            head.name.clone()
        } else {
            let var = body
                .iter()
                .find(|(t, neg, has_var)| !neg && *has_var && t.contains(vars[0]))
                .map(|_| vars[0]);
            if var.is_none() {
                body.push((format!("color({}, {})", vars[0], COLORS.choose(rng).expect("non-empty")), false, true));
            }
            format!("{}({})", head.name, vars[0])
        };
        let lits: Vec<String> = body
            .iter()
            .map(|(t, neg, _)| if *neg { format!("not {t}") } else { t.clone() })
            .collect();
        out.push_str(&format!("{head_text} :- {}.\n", lits.join(", ")));
    }
    out
}
