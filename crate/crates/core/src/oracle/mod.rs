//! Independent reference evaluators used to check the reasoner.
//!
//! - [`crisp_eval`]: classical stratified Datalog over boolean scenes, naive
//!   bottom-up with its own grounding.
//! - [`recursive_fuzzy_eval`]: the soft semantics computed top-down with
//!   memoization (acyclic programs only).
//! - [`enumerate_count`]: P(count ≥ k) by summing over all 2^E outcomes.

pub mod random;

use std::collections::{BTreeMap, HashMap, HashSet};

use thiserror::Error;

use crate::gen::GroundTruthScene;
use crate::lang::{Atom, RuleProgram, Term};
use crate::reasoner::{ClauseWeights, Grounding};
use crate::scene::{Attribute, Builtin, GroundAtomTable, Relation, SceneRecord};

pub const MAX_ENUMERATED_TRIALS: usize = 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("exhaustive enumeration limited to {MAX_ENUMERATED_TRIALS} trials, got {0}")]
    TooLarge(usize),
    #[error("cycle through `{0}`; the recursive evaluator handles acyclic programs only")]
    Cycle(String),
}

/// Exact P(at least `k` successes) by enumerating every outcome.
pub fn enumerate_count(probs: &[f64], k: usize) -> Result<f64, OracleError> {
    if probs.len() > MAX_ENUMERATED_TRIALS {
        return Err(OracleError::TooLarge(probs.len()));
    }
    let mut total = 0.0;
    for mask in 0u32..(1u32 << probs.len()) {
        if (mask.count_ones() as usize) < k {
            continue;
        }
        let p: f64 = probs
            .iter()
            .enumerate()
            .map(|(i, &p)| if mask & (1 << i) != 0 { p } else { 1.0 - p })
            .product();
        total += p;
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrispObject {
    pub id: String,
    pub labels: BTreeMap<Attribute, String>,
    pub center: (f64, f64),
}

/// Boolean scene: one label per attribute and a relation table per ordered pair.
#[derive(Debug, Clone, PartialEq)]
pub struct CrispScene {
    pub objects: Vec<CrispObject>,
    pub relations: HashMap<(String, String), HashSet<Relation>>,
}

impl CrispScene {
    fn from_objects(objects: Vec<CrispObject>) -> Self {
        let mut relations = HashMap::new();
        for a in &objects {
            for b in &objects {
                if a.id == b.id {
                    continue;
                }
                let set: HashSet<Relation> = Relation::ALL
                    .into_iter()
                    .filter(|r| match r {
                        Relation::Above => a.center.1 < b.center.1,
                        Relation::Below => a.center.1 > b.center.1,
                        Relation::Left => a.center.0 < b.center.0,
                        Relation::Right => a.center.0 > b.center.0,
                    })
                    .collect();
                relations.insert((a.id.clone(), b.id.clone()), set);
            }
        }
        CrispScene { objects, relations }
    }

    pub fn from_truth(truth: &GroundTruthScene) -> Self {
        let objects = truth
            .objects
            .iter()
            .map(|o| CrispObject {
                id: o.id.clone(),
                labels: Attribute::ALL
                    .into_iter()
                    .filter_map(|a| o.label(a).map(|l| (a, l.to_string())))
                    .collect(),
                center: (o.bbox[0], o.bbox[1]),
            })
            .collect();
        Self::from_objects(objects)
    }

    /// Keeps, per attribute, the value whose probability exceeds 0.5.
    pub fn threshold(scene: &SceneRecord) -> Self {
        let objects = scene
            .objects
            .iter()
            .map(|o| CrispObject {
                id: o.id.clone(),
                labels: Attribute::ALL
                    .into_iter()
                    .filter_map(|a| {
                        o.distribution(a)
                            .iter()
                            .find(|(_, &p)| p > 0.5)
                            .map(|(v, _)| (a, v.clone()))
                    })
                    .collect(),
                center: (o.bbox.cx, o.bbox.cy),
            })
            .collect();
        Self::from_objects(objects)
    }

    fn object(&self, id: &str) -> Option<&CrispObject> {
        self.objects.iter().find(|o| o.id == id)
    }

    fn holds_builtin(&self, builtin: Builtin, args: &[String]) -> bool {
        match builtin {
            Builtin::Attribute(attr) => self
                .object(&args[0])
                .is_some_and(|o| o.labels.get(&attr) == Some(&args[1])),
            Builtin::Position => {
                let rel: Relation = args[2].parse().expect("validated relation");
                self.relations
                    .get(&(args[0].clone(), args[1].clone()))
                    .is_some_and(|s| s.contains(&rel))
            }
            Builtin::AtLeast => {
                let attr: Attribute = args[0].parse().expect("validated attribute");
                let k: usize = args[2].parse().expect("validated integer");
                let n = self
                    .objects
                    .iter()
                    .filter(|o| o.labels.get(&attr) == Some(&args[1]))
                    .count();
                n >= k
            }
        }
    }
}

type Fact = (String, Vec<String>);

fn instantiate(atom: &Atom, binding: &HashMap<&str, &str>) -> Fact {
    let args = atom
        .args
        .iter()
        .map(|t| match t {
            Term::Constant(c) => c.clone(),
            Term::Variable(v) => binding[v.as_str()].to_string(),
        })
        .collect();
    (atom.predicate.clone(), args)
}

/// Classical entailment of the query, stratum by stratum.
pub fn crisp_eval(scene: &CrispScene, program: &RuleProgram) -> bool {
    let ids: Vec<&str> = scene.objects.iter().map(|o| o.id.as_str()).collect();
    let mut facts: HashSet<Fact> = HashSet::new();

    for stratum in 0..program.num_strata() {
        let clauses: Vec<_> = program
            .clauses
            .iter()
            .filter(|c| program.stratum(&c.head.predicate) == Some(stratum))
            .collect();
        loop {
            let mut new_facts = Vec::new();
            for clause in &clauses {
                let vars = clause.variables();
                let mut binding: HashMap<&str, &str> = HashMap::new();
                enumerate(&vars, &ids, &mut binding, &mut |b| {
                    let satisfied = clause.body.iter().all(|lit| {
                        let (pred, args) = instantiate(&lit.atom, b);
                        let holds = match Builtin::lookup(&pred) {
                            Some(builtin) => scene.holds_builtin(builtin, &args),
                            None => facts.contains(&(pred, args)),
                        };
                        holds != lit.negated
                    });
                    if satisfied {
                        let head = instantiate(&clause.head, b);
                        if !facts.contains(&head) {
                            new_facts.push(head);
                        }
                    }
                });
            }
            if new_facts.is_empty() {
                break;
            }
            facts.extend(new_facts);
        }
    }
    facts.iter().any(|(p, _)| *p == program.query)
}

fn enumerate<'a>(
    vars: &[&'a str],
    ids: &[&'a str],
    binding: &mut HashMap<&'a str, &'a str>,
    f: &mut dyn FnMut(&HashMap<&'a str, &'a str>),
) {
    let Some((first, rest)) = vars.split_first() else {
        f(binding);
        return;
    };
    for id in ids {
        if binding.values().any(|b| b == id) {
            continue;
        }
        binding.insert(first, id);
        enumerate(rest, ids, binding, f);
        binding.remove(first);
    }
}

/// Value of every atom under the soft semantics, by memoized recursion.
pub fn recursive_fuzzy_valuation(
    table: &GroundAtomTable,
    grounding: &Grounding,
    weights: &ClauseWeights,
) -> Result<Vec<f64>, OracleError> {
    let mut derivations: HashMap<usize, Vec<usize>> = HashMap::new();
    for (i, gc) in grounding.clauses.iter().enumerate() {
        derivations.entry(gc.head).or_default().push(i);
    }
    let mut memo: Vec<Option<f64>> = vec![None; grounding.num_atoms()];
    for (i, &v) in table.values.iter().enumerate() {
        memo[i] = Some(v);
    }
    let mut visiting = vec![false; grounding.num_atoms()];
    for atom in 0..grounding.num_atoms() {
        value_of(atom, grounding, weights, &derivations, &mut memo, &mut visiting)?;
    }
    Ok(memo.into_iter().map(|v| v.expect("all atoms valued")).collect())
}

fn value_of(
    atom: usize,
    grounding: &Grounding,
    weights: &ClauseWeights,
    derivations: &HashMap<usize, Vec<usize>>,
    memo: &mut Vec<Option<f64>>,
    visiting: &mut Vec<bool>,
) -> Result<f64, OracleError> {
    if let Some(v) = memo[atom] {
        return Ok(v);
    }
    if visiting[atom] {
        return Err(OracleError::Cycle(grounding.atom(atom).to_string()));
    }
    visiting[atom] = true;
    let mut best: f64 = 0.0;
    for &ci in derivations.get(&atom).map(Vec::as_slice).unwrap_or(&[]) {
        let gc = &grounding.clauses[ci];
        let mut val = weights.weight(gc.clause_index);
        for &(a, neg) in &gc.body {
            let x = value_of(a, grounding, weights, derivations, memo, visiting)?;
            val *= if neg { 1.0 - x } else { x };
        }
        best = best.max(val);
    }
    visiting[atom] = false;
    memo[atom] = Some(best);
    Ok(best)
}

/// Query probability: the largest value among ground atoms of the query predicate.
pub fn recursive_fuzzy_eval(
    table: &GroundAtomTable,
    grounding: &Grounding,
    weights: &ClauseWeights,
) -> Result<f64, OracleError> {
    let values = recursive_fuzzy_valuation(table, grounding, weights)?;
    Ok((grounding.num_input..grounding.num_atoms())
        .filter(|&i| grounding.atom(i).predicate == grounding.query)
        .map(|i| values[i])
        .fold(0.0, f64::max))
}
