use std::collections::BTreeSet;
use std::fmt;

use super::atom::{has_complementary_pair, Atom, AtomKind, Literal};
use crate::error::{Error, Result};

/// A consistent set of ground literals.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct AnswerSet {
    literals: BTreeSet<Literal>,
}

impl AnswerSet {
    /// Fails with [`Error::Inconsistent`] if the set has a complementary pair.
    pub fn new(literals: impl IntoIterator<Item = Literal>) -> Result<Self> {
        let literals: BTreeSet<Literal> = literals.into_iter().collect();
        if has_complementary_pair(&literals) {
            return Err(Error::Inconsistent);
        }
        Ok(AnswerSet { literals })
    }

    pub fn contains(&self, l: &Literal) -> bool {
        self.literals.contains(l)
    }

    pub fn literals(&self) -> &BTreeSet<Literal> {
        &self.literals
    }

    pub fn iter(&self) -> impl Iterator<Item = &Literal> {
        self.literals.iter()
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    /// Literals over primed database predicates.
    pub fn primed(&self) -> BTreeSet<Literal> {
        self.literals.iter().filter(|l| l.atom.primed).cloned().collect()
    }

    /// Positive atoms of the given predicate.
    pub fn atoms_of<'a>(&'a self, predicate: &'a str) -> impl Iterator<Item = &'a Atom> + 'a {
        self.literals
            .iter()
            .filter(move |l| !l.negated && l.atom.predicate == predicate)
            .map(|l| &l.atom)
    }

    /// Drops domain facts, leaving the part that varies between answer sets
    /// together with the database facts.
    pub fn without_domain(&self) -> BTreeSet<Literal> {
        self.literals
            .iter()
            .filter(|l| l.atom.kind != AtomKind::DomainGuard)
            .cloned()
            .collect()
    }
}

impl fmt::Display for AnswerSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_set(f, &self.literals)
    }
}

pub(crate) fn write_set(f: &mut fmt::Formatter<'_>, lits: &BTreeSet<Literal>) -> fmt::Result {
    f.write_str("{")?;
    for (i, l) in lits.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{l}")?;
    }
    f.write_str("}")
}

/// Partial interpretation: literals known true and literals known false.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ThreeValuedInterpretation {
    true_set: BTreeSet<Literal>,
    false_set: BTreeSet<Literal>,
}

impl ThreeValuedInterpretation {
    pub fn new(true_set: BTreeSet<Literal>, false_set: BTreeSet<Literal>) -> Result<Self> {
        if !true_set.is_disjoint(&false_set) || has_complementary_pair(&true_set) {
            return Err(Error::Inconsistent);
        }
        Ok(ThreeValuedInterpretation { true_set, false_set })
    }

    pub fn is_true(&self, l: &Literal) -> bool {
        self.true_set.contains(l)
    }

    pub fn is_false(&self, l: &Literal) -> bool {
        self.false_set.contains(l)
    }

    pub fn is_undefined(&self, l: &Literal) -> bool {
        !self.is_true(l) && !self.is_false(l)
    }

    pub fn true_set(&self) -> &BTreeSet<Literal> {
        &self.true_set
    }

    pub fn false_set(&self) -> &BTreeSet<Literal> {
        &self.false_set
    }

    /// Every literal of `universe` is either true or false.
    pub fn is_total_on(&self, universe: &BTreeSet<Literal>) -> bool {
        universe.iter().all(|l| !self.is_undefined(l))
    }
}
