use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use super::valuation::{value_at_least, value_position};
use super::{Attribute, Builtin, Relation, SceneError, SceneRecord, ValuationConfig};
use crate::lang::{Atom, RuleProgram, Term};

/// A variable-free atom. Ordering is canonical: predicate, then arguments.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundAtom {
    pub predicate: String,
    pub args: Vec<String>,
}

impl GroundAtom {
    pub fn new(predicate: impl Into<String>, args: &[&str]) -> Self {
        GroundAtom {
            predicate: predicate.into(),
            args: args.iter().map(|s| s.to_string()).collect(),
        }
    }

    /// Instantiates `atom` under `binding`; `None` if a variable is unbound.
    pub fn instantiate(atom: &Atom, binding: &BTreeMap<String, String>) -> Option<Self> {
        let args = atom
            .args
            .iter()
            .map(|t| match t {
                Term::Constant(c) => Some(c.clone()),
                Term::Variable(v) => binding.get(v).cloned(),
            })
            .collect::<Option<Vec<_>>>()?;
        Some(GroundAtom {
            predicate: atom.predicate.clone(),
            args,
        })
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        if !self.args.is_empty() {
            write!(f, "({})", self.args.join(", "))?;
        }
        Ok(())
    }
}

/// Valued built-in ground atoms of one scene, in canonical order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GroundAtomTable {
    pub atoms: Vec<GroundAtom>,
    pub values: Vec<f64>,
    index: HashMap<GroundAtom, usize>,
}

impl GroundAtomTable {
    pub fn from_entries(entries: BTreeMap<GroundAtom, f64>) -> Self {
        let mut table = GroundAtomTable::default();
        for (atom, value) in entries {
            table.index.insert(atom.clone(), table.atoms.len());
            table.atoms.push(atom);
            table.values.push(value);
        }
        table
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn lookup(&self, atom: &GroundAtom) -> Option<usize> {
        self.index.get(atom).copied()
    }

    pub fn value(&self, atom: &GroundAtom) -> Option<f64> {
        self.lookup(atom).map(|i| self.values[i])
    }

    /// Copy of this table with the value vector replaced.
    pub fn with_values(&self, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), self.atoms.len(), "value vector length mismatch");
        GroundAtomTable {
            atoms: self.atoms.clone(),
            values,
            index: self.index.clone(),
        }
    }
}

/// Values a single ground built-in atom against `scene`. Atoms naming
/// objects absent from the scene value to 0.
pub fn value_ground_builtin(
    scene: &SceneRecord,
    atom: &GroundAtom,
    cfg: &ValuationConfig,
) -> Result<f64, SceneError> {
    let builtin = Builtin::lookup(&atom.predicate)
        .ok_or_else(|| SceneError::UnknownPredicate(atom.predicate.clone()))?;
    let malformed = || SceneError::UnknownPredicate(atom.to_string());
    if atom.args.len() != builtin.arity() {
        return Err(malformed());
    }
    Ok(match builtin {
        Builtin::Attribute(attr) => scene
            .object(&atom.args[0])
            .map_or(0.0, |o| o.prob(attr, &atom.args[1])),
        Builtin::Position => {
            let rel: Relation = atom.args[2].parse().map_err(|_| malformed())?;
            match (scene.object(&atom.args[0]), scene.object(&atom.args[1])) {
                (Some(a), Some(b)) => value_position(a, b, rel, cfg),
                _ => 0.0,
            }
        }
        Builtin::AtLeast => {
            let attr: Attribute = atom.args[0].parse().map_err(|_| malformed())?;
            let k: usize = atom.args[2].parse().map_err(|_| malformed())?;
            value_at_least(scene, attr, &atom.args[1], k)
        }
    })
}

/// Enumerates and values every built-in ground atom reachable by grounding
/// the program's body literals over the scene's objects.
pub fn build_atom_table(
    scene: &SceneRecord,
    program: &RuleProgram,
    cfg: &ValuationConfig,
) -> Result<GroundAtomTable, SceneError> {
    cfg.validate()?;
    if scene.objects.len() > cfg.max_objects {
        return Err(SceneError::TooManyObjects {
            image_id: scene.image_id.clone(),
            found: scene.objects.len(),
            cap: cfg.max_objects,
        });
    }
    let ids: Vec<&str> = scene.objects.iter().map(|o| o.id.as_str()).collect();
    let mut atoms = BTreeSet::new();

    for clause in &program.clauses {
        let groundable = clause.variables().len() <= ids.len();
        for lit in &clause.body {
            let atom = &lit.atom;
            match Builtin::lookup(&atom.predicate) {
                None => {}
                Some(Builtin::AtLeast) => {
                    atoms.insert(GroundAtom::instantiate(atom, &BTreeMap::new()).expect("ground"));
                }
                Some(_) if groundable => enumerate_literal(atom, &ids, &mut atoms),
                Some(_) => {}
            }
        }
    }

    let mut entries = BTreeMap::new();
    for atom in atoms {
        let v = value_ground_builtin(scene, &atom, cfg)?;
        entries.insert(atom, v);
    }
    Ok(GroundAtomTable::from_entries(entries))
}

/// All injective bindings of the atom's own variables.
fn enumerate_literal(atom: &Atom, ids: &[&str], out: &mut BTreeSet<GroundAtom>) {
    let mut vars: Vec<&str> = Vec::new();
    for v in atom.variables() {
        if !vars.contains(&v) {
            vars.push(v);
        }
    }
    let mut binding = BTreeMap::new();
    let mut used = vec![false; ids.len()];
    bind_rec(atom, &vars, ids, &mut used, &mut binding, out);
}

fn bind_rec(
    atom: &Atom,
    vars: &[&str],
    ids: &[&str],
    used: &mut [bool],
    binding: &mut BTreeMap<String, String>,
    out: &mut BTreeSet<GroundAtom>,
) {
    let Some((first, rest)) = vars.split_first() else {
        out.insert(GroundAtom::instantiate(atom, binding).expect("fully bound"));
        return;
    };
    for (i, id) in ids.iter().enumerate() {
        if used[i] {
            continue;
        }
        used[i] = true;
        binding.insert(first.to_string(), id.to_string());
        bind_rec(atom, rest, ids, used, binding, out);
        used[i] = false;
    }
    binding.remove(*first);
}
