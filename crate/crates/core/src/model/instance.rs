use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::atom::{Atom, AtomKind, AUX_PREFIX, DOM};
use super::term::{Term, Value};
use crate::error::{Error, Result};

/// Arity and optional attribute sorts of a database relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub arity: usize,
    /// One entry per attribute; `None` means untyped (ranges over `dom`).
    pub sorts: Vec<Option<String>>,
}

impl Relation {
    pub fn untyped(arity: usize) -> Self {
        Relation {
            arity,
            sorts: vec![None; arity],
        }
    }
}

/// Declared database relations. A non-strict schema declares unknown
/// relations on first use; a strict one rejects them.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Schema {
    relations: BTreeMap<String, Relation>,
    pub strict: bool,
}

impl Schema {
    pub fn new() -> Self {
        Schema::default()
    }

    pub fn strict() -> Self {
        Schema {
            strict: true,
            ..Schema::default()
        }
    }

    pub fn declare(&mut self, name: impl Into<String>, relation: Relation) -> Result<()> {
        let name = name.into();
        if name == DOM || name.starts_with("dom_") || name.starts_with(AUX_PREFIX) || name == "query" {
            return Err(Error::Schema(format!("`{name}` is a reserved predicate name")));
        }
        if relation.sorts.len() != relation.arity {
            return Err(Error::Schema(format!(
                "`{name}` declares {} sorts for arity {}",
                relation.sorts.len(),
                relation.arity
            )));
        }
        match self.relations.get(&name) {
            Some(existing) if existing.arity != relation.arity => Err(Error::Arity {
                predicate: name,
                expected: existing.arity,
                found: relation.arity,
            }),
            Some(existing) if existing.sorts.iter().any(Option::is_some) => Ok(()),
            _ => {
                self.relations.insert(name, relation);
                Ok(())
            }
        }
    }

    pub fn with(mut self, name: &str, arity: usize) -> Self {
        self.declare(name, Relation::untyped(arity)).expect("valid declaration");
        self
    }

    pub fn with_sorts(mut self, name: &str, sorts: &[&str]) -> Self {
        let relation = Relation {
            arity: sorts.len(),
            sorts: sorts.iter().map(|s| Some(s.to_string())).collect(),
        };
        self.declare(name, relation).expect("valid declaration");
        self
    }

    pub fn get(&self, name: &str) -> Option<&Relation> {
        self.relations.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.relations.contains_key(name)
    }

    pub fn relations(&self) -> impl Iterator<Item = (&str, &Relation)> {
        self.relations.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }

    /// Sort of attribute `pos` of `predicate`, if declared.
    pub fn sort_of(&self, predicate: &str, pos: usize) -> Option<&str> {
        self.relations
            .get(predicate)
            .and_then(|r| r.sorts.get(pos))
            .and_then(|s| s.as_deref())
    }

    pub fn sorts(&self) -> BTreeSet<String> {
        self.relations
            .values()
            .flat_map(|r| r.sorts.iter().flatten().cloned())
            .collect()
    }

    /// Checks `atom` against its relation, declaring the relation first when
    /// the schema is not strict.
    pub fn admit(&mut self, atom: &Atom) -> Result<()> {
        if !self.strict && !self.relations.contains_key(&atom.predicate) {
            self.declare(atom.predicate.clone(), Relation::untyped(atom.arity()))?;
        }
        self.check_atom(atom)
    }

    pub fn check_atom(&self, atom: &Atom) -> Result<()> {
        match self.relations.get(&atom.predicate) {
            None => Err(Error::Schema(format!("unknown relation `{}`", atom.predicate))),
            Some(r) if r.arity != atom.arity() => Err(Error::Arity {
                predicate: atom.predicate.clone(),
                expected: r.arity,
                found: atom.arity(),
            }),
            Some(_) => Ok(()),
        }
    }

    pub fn merge(&mut self, other: &Schema) -> Result<()> {
        for (name, rel) in &other.relations {
            self.declare(name.clone(), rel.clone())?;
        }
        Ok(())
    }
}

/// A finite set of ground, unprimed database atoms over a schema.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DatabaseInstance {
    pub schema: Schema,
    facts: BTreeSet<Atom>,
}

impl DatabaseInstance {
    pub fn new(schema: Schema) -> Self {
        DatabaseInstance {
            schema,
            facts: BTreeSet::new(),
        }
    }

    pub fn from_facts(schema: Schema, facts: impl IntoIterator<Item = Atom>) -> Result<Self> {
        let mut inst = DatabaseInstance::new(schema);
        for f in facts {
            inst.insert(f)?;
        }
        Ok(inst)
    }

    pub fn insert(&mut self, fact: Atom) -> Result<bool> {
        if fact.kind != AtomKind::Database || fact.primed {
            return Err(Error::Schema(format!("`{fact}` is not a database atom")));
        }
        if !fact.terms.iter().all(|t| matches!(t, Term::Const(_) | Term::Null)) {
            return Err(Error::Schema(format!("fact `{fact}` is not ground")));
        }
        self.schema.admit(&fact)?;
        Ok(self.facts.insert(fact))
    }

    pub fn contains(&self, fact: &Atom) -> bool {
        self.facts.contains(fact)
    }

    pub fn facts(&self) -> &BTreeSet<Atom> {
        &self.facts
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    /// Constants occurring in the instance (its active domain). `null` is excluded.
    pub fn constants(&self) -> BTreeSet<Value> {
        self.facts
            .iter()
            .flat_map(|a| a.terms.iter())
            .filter_map(Term::as_const)
            .cloned()
            .collect()
    }

    /// Same schema, different facts.
    pub fn with_facts(&self, facts: impl IntoIterator<Item = Atom>) -> Result<Self> {
        DatabaseInstance::from_facts(self.schema.clone(), facts)
    }

    /// Facts grouped by relation name, as rendered argument tuples.
    pub fn tables(&self) -> BTreeMap<String, Vec<Vec<String>>> {
        let mut out: BTreeMap<String, Vec<Vec<String>>> = BTreeMap::new();
        for f in &self.facts {
            out.entry(f.predicate.clone())
                .or_default()
                .push(f.terms.iter().map(|t| t.to_string()).collect());
        }
        out
    }
}

impl fmt::Display for DatabaseInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, a) in self.facts.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str("}")
    }
}

/// Split of the symmetric difference between two instances.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Delta {
    pub inserted: BTreeSet<Atom>,
    pub deleted: BTreeSet<Atom>,
}

impl Delta {
    pub fn len(&self) -> usize {
        self.inserted.len() + self.deleted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The symmetric difference as one set.
    pub fn all(&self) -> BTreeSet<Atom> {
        self.inserted.union(&self.deleted).cloned().collect()
    }
}

/// `inserted = repaired \ original`, `deleted = original \ repaired`.
pub fn delta(original: &DatabaseInstance, repaired: &DatabaseInstance) -> Result<Delta> {
    if original.schema != repaired.schema {
        return Err(Error::Schema("instances have different schemas".into()));
    }
    Ok(Delta {
        inserted: repaired.facts.difference(&original.facts).cloned().collect(),
        deleted: original.facts.difference(&repaired.facts).cloned().collect(),
    })
}

/// A repaired instance together with its changes against the original.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Repair {
    pub instance: DatabaseInstance,
    pub inserted: BTreeSet<Atom>,
    pub deleted: BTreeSet<Atom>,
}

impl Repair {
    pub fn new(original: &DatabaseInstance, instance: DatabaseInstance) -> Result<Self> {
        let d = delta(original, &instance)?;
        Ok(Repair {
            instance,
            inserted: d.inserted,
            deleted: d.deleted,
        })
    }

    pub fn delta_size(&self) -> usize {
        self.inserted.len() + self.deleted.len()
    }

    pub fn delta(&self) -> Delta {
        Delta {
            inserted: self.inserted.clone(),
            deleted: self.deleted.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atom(p: &str, args: &[&str]) -> Atom {
        Atom::database(p, args.iter().map(|a| Term::sym(*a)).collect())
    }

    #[test]
    fn delta_of_deletion_repair() {
        let schema = Schema::new().with("p", 2).with("q", 2);
        let r = DatabaseInstance::from_facts(schema.clone(), [atom("p", &["a", "b"]), atom("q", &["b", "c"])]).unwrap();
        let rp = r.with_facts([atom("q", &["b", "c"])]).unwrap();
        let d = delta(&r, &rp).unwrap();
        assert!(d.inserted.is_empty());
        assert_eq!(d.deleted, BTreeSet::from([atom("p", &["a", "b"])]));
    }

    #[test]
    fn delta_of_identity_is_empty() {
        let schema = Schema::new().with("p", 1);
        let r = DatabaseInstance::from_facts(schema, [atom("p", &["a"])]).unwrap();
        assert!(delta(&r, &r).unwrap().is_empty());
    }

    #[test]
    fn delta_of_insertion_repair() {
        let schema = Schema::new().with("p", 1);
        let r = DatabaseInstance::from_facts(schema, [atom("p", &["a"])]).unwrap();
        let rp = r
            .with_facts([atom("p", &["a"]), atom("p", &["b"]), atom("p", &["c"])])
            .unwrap();
        let d = delta(&r, &rp).unwrap();
        assert_eq!(d.inserted, BTreeSet::from([atom("p", &["b"]), atom("p", &["c"])]));
        assert!(d.deleted.is_empty());
    }

    #[test]
    fn delta_rejects_schema_mismatch() {
        let r = DatabaseInstance::new(Schema::new().with("p", 1));
        let rp = DatabaseInstance::new(Schema::new().with("q", 1));
        assert!(matches!(delta(&r, &rp), Err(Error::Schema(_))));
    }

    #[test]
    fn instance_rejects_bad_facts() {
        let mut r = DatabaseInstance::new(Schema::strict().with("p", 1));
        assert!(matches!(r.insert(atom("p", &["a", "b"])), Err(Error::Arity { .. })));
        assert!(matches!(r.insert(atom("q", &["a"])), Err(Error::Schema(_))));
        assert!(r.insert(Atom::database("p", vec![Term::var("X")])).is_err());
        assert!(r.insert(atom("p", &["a"]).primed()).is_err());
        assert!(r.insert(atom("p", &["a"])).unwrap());
        assert!(!r.insert(atom("p", &["a"])).unwrap());
    }

    #[test]
    fn lenient_schema_declares_on_use() {
        let mut r = DatabaseInstance::new(Schema::new());
        assert!(r.insert(atom("q", &["a", "b"])).unwrap());
        assert_eq!(r.schema.get("q").unwrap().arity, 2);
    }

    #[test]
    fn reserved_names_rejected() {
        assert!(Schema::new().declare("dom", Relation::untyped(1)).is_err());
        assert!(Schema::new().declare("cqa_x", Relation::untyped(1)).is_err());
    }
}
