use std::collections::{BTreeMap, HashMap};

use crate::lang::RuleProgram;
use crate::scene::{Builtin, GroundAtom, GroundAtomTable, SceneRecord};

use super::ReasonerError;

/// Upper bound on ground clauses per scene.
pub const MAX_GROUND_CLAUSES: usize = 1_000_000;

/// A clause instantiated under an injective variable→object binding.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundClause {
    pub clause_index: usize,
    pub binding: BTreeMap<String, String>,
    /// Index into the combined atom space (table atoms, then derived atoms).
    pub head: usize,
    /// `(atom index, negated)` per body literal, in body order.
    pub body: Vec<(usize, bool)>,
}

impl GroundClause {
    /// Canonical comparison key for tie-breaking between derivations.
    pub fn binding_key(&self) -> Vec<(&str, &str)> {
        self.binding.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect()
    }
}

/// Ground clauses of one program over one scene, plus the derived atom space.
#[derive(Debug, Clone, PartialEq)]
pub struct Grounding {
    pub clauses: Vec<GroundClause>,
    /// Derived atoms in canonical order; atom `i` of this list has index `num_input + i`.
    pub derived: Vec<GroundAtom>,
    pub derived_strata: Vec<usize>,
    pub num_input: usize,
    pub num_strata: usize,
    pub query: String,
    input_atoms: Vec<GroundAtom>,
}

impl Grounding {
    pub fn num_atoms(&self) -> usize {
        self.num_input + self.derived.len()
    }

    pub fn atom(&self, index: usize) -> &GroundAtom {
        if index < self.num_input {
            &self.input_atoms[index]
        } else {
            &self.derived[index - self.num_input]
        }
    }

    pub fn is_derived(&self, index: usize) -> bool {
        index >= self.num_input
    }

    /// Stratum of a derived atom; input atoms report `None`.
    pub fn stratum(&self, index: usize) -> Option<usize> {
        index
            .checked_sub(self.num_input)
            .map(|i| self.derived_strata[i])
    }

    pub fn is_query_clause(&self, gc: &GroundClause) -> bool {
        self.atom(gc.head).predicate == self.query
    }
}

fn falling_factorial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (n - k + 1..=n).fold(1usize, |acc, x| acc.saturating_mul(x))
}

/// Instantiates every clause under all injective assignments of its variables
/// to scene objects. Built-in body atoms are resolved against `table`.
pub fn ground(
    program: &RuleProgram,
    scene: &SceneRecord,
    table: &GroundAtomTable,
) -> Result<Grounding, ReasonerError> {
    let ids: Vec<&str> = scene.objects.iter().map(|o| o.id.as_str()).collect();
    let total = program
        .clauses
        .iter()
        .map(|c| falling_factorial(ids.len(), c.variables().len()))
        .fold(0usize, |a, b| a.saturating_add(b));
    if total > MAX_GROUND_CLAUSES {
        return Err(ReasonerError::GroundingBlowUp {
            count: total,
            limit: MAX_GROUND_CLAUSES,
        });
    }

    struct Pending {
        clause_index: usize,
        binding: BTreeMap<String, String>,
        head: GroundAtom,
        body: Vec<(GroundAtom, bool)>,
    }

    let mut pending = Vec::with_capacity(total);
    for (ci, clause) in program.clauses.iter().enumerate() {
        let vars = clause.variables();
        for_each_injective(&vars, &ids, |binding| {
            let inst = |atom| GroundAtom::instantiate(atom, binding).expect("all clause variables bound");
            pending.push(Pending {
                clause_index: ci,
                binding: binding.clone(),
                head: inst(&clause.head),
                body: clause.body.iter().map(|l| (inst(&l.atom), l.negated)).collect(),
            });
        });
    }

    let mut derived: BTreeMap<GroundAtom, usize> = BTreeMap::new();
    for p in &pending {
        derived.insert(p.head.clone(), 0);
        for (atom, _) in &p.body {
            if Builtin::lookup(&atom.predicate).is_none() {
                derived.insert(atom.clone(), 0);
            }
        }
    }
    let num_input = table.len();
    for (i, slot) in derived.values_mut().enumerate() {
        *slot = num_input + i;
    }

    let resolve = |atom: &GroundAtom| -> Result<usize, ReasonerError> {
        if Builtin::lookup(&atom.predicate).is_some() {
            table
                .lookup(atom)
                .ok_or_else(|| ReasonerError::MissingAtom(atom.to_string()))
        } else {
            Ok(derived[atom])
        }
    };

    let mut clauses = Vec::with_capacity(pending.len());
    for p in pending {
        let body = p
            .body
            .iter()
            .map(|(a, neg)| resolve(a).map(|i| (i, *neg)))
            .collect::<Result<Vec<_>, _>>()?;
        clauses.push(GroundClause {
            clause_index: p.clause_index,
            binding: p.binding,
            head: derived[&p.head],
            body,
        });
    }

    let derived_atoms: Vec<GroundAtom> = derived.into_keys().collect();
    let derived_strata = derived_atoms
        .iter()
        .map(|a| program.stratum(&a.predicate).unwrap_or(0))
        .collect();
    Ok(Grounding {
        clauses,
        derived: derived_atoms,
        derived_strata,
        num_input,
        num_strata: program.num_strata(),
        query: program.query.clone(),
        input_atoms: table.atoms.clone(),
    })
}

/// Calls `f` once per injective map from `vars` into `ids`, in lexicographic
/// order of object positions.
fn for_each_injective(vars: &[&str], ids: &[&str], mut f: impl FnMut(&BTreeMap<String, String>)) {
    fn rec(
        vars: &[&str],
        ids: &[&str],
        used: &mut [bool],
        binding: &mut BTreeMap<String, String>,
        f: &mut dyn FnMut(&BTreeMap<String, String>),
    ) {
        let Some((first, rest)) = vars.split_first() else {
            f(binding);
            return;
        };
        for (i, id) in ids.iter().enumerate() {
            if used[i] {
                continue;
            }
            used[i] = true;
            binding.insert(first.to_string(), id.to_string());
            rec(rest, ids, used, binding, f);
            used[i] = false;
        }
        binding.remove(*first);
    }
    let mut used = vec![false; ids.len()];
    rec(vars, ids, &mut used, &mut BTreeMap::new(), &mut f);
}

/// Index from head atom to the ground clauses deriving it.
pub(crate) fn clauses_by_head(grounding: &Grounding) -> HashMap<usize, Vec<usize>> {
    let mut map: HashMap<usize, Vec<usize>> = HashMap::new();
    for (i, gc) in grounding.clauses.iter().enumerate() {
        map.entry(gc.head).or_default().push(i);
    }
    map
}
