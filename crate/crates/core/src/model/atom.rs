use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::term::{CmpOp, Term};

/// Suffix used when rendering the repaired version `p'` of a predicate.
pub const PRIMED_SUFFIX: &str = "_p";
/// Name of the untyped domain predicate.
pub const DOM: &str = "dom";
/// Name of the query predicate produced by the query compiler.
pub const QUERY: &str = "query";
/// Prefix reserved for generated auxiliary predicates.
pub const AUX_PREFIX: &str = "cqa_";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AtomKind {
    Database,
    Builtin(CmpOp),
    DomainGuard,
    Auxiliary,
}

/// `predicate(terms)`, optionally primed. Field order gives the canonical
/// ordering: predicate name first, then the term tuple.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub predicate: String,
    pub primed: bool,
    pub terms: Vec<Term>,
    pub kind: AtomKind,
}

impl Atom {
    pub fn database(predicate: impl Into<String>, terms: Vec<Term>) -> Self {
        Atom {
            predicate: predicate.into(),
            primed: false,
            terms,
            kind: AtomKind::Database,
        }
    }

    pub fn aux(predicate: impl Into<String>, terms: Vec<Term>) -> Self {
        Atom {
            predicate: predicate.into(),
            primed: false,
            terms,
            kind: AtomKind::Auxiliary,
        }
    }

    /// Domain guard `dom(t)`, or `dom_<sort>(t)` for a sorted domain.
    pub fn dom(sort: Option<&str>, term: Term) -> Self {
        Atom {
            predicate: dom_predicate(sort),
            primed: false,
            terms: vec![term],
            kind: AtomKind::DomainGuard,
        }
    }

    pub fn builtin(op: CmpOp, lhs: Term, rhs: Term) -> Self {
        Atom {
            predicate: op.symbol().to_string(),
            primed: false,
            terms: vec![lhs, rhs],
            kind: AtomKind::Builtin(op),
        }
    }

    pub fn primed(&self) -> Atom {
        debug_assert!(!self.is_builtin() && self.kind != AtomKind::DomainGuard);
        Atom {
            primed: true,
            ..self.clone()
        }
    }

    pub fn unprimed(&self) -> Atom {
        Atom {
            primed: false,
            ..self.clone()
        }
    }

    pub fn arity(&self) -> usize {
        self.terms.len()
    }

    pub fn is_builtin(&self) -> bool {
        matches!(self.kind, AtomKind::Builtin(_))
    }

    pub fn is_database(&self) -> bool {
        self.kind == AtomKind::Database
    }

    pub fn is_domain(&self) -> bool {
        self.kind == AtomKind::DomainGuard
    }

    pub fn is_ground(&self) -> bool {
        self.terms.iter().all(|t| !t.is_var())
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.terms.iter().filter_map(Term::as_var)
    }

    pub fn substitute(&self, binding: &BTreeMap<String, Term>) -> Atom {
        Atom {
            terms: self.terms.iter().map(|t| t.substitute(binding)).collect(),
            ..self.clone()
        }
    }

    /// Rendered predicate name, `p_p` for a primed `p`.
    pub fn display_name(&self) -> String {
        if self.primed {
            format!("{}{}", self.predicate, PRIMED_SUFFIX)
        } else {
            self.predicate.clone()
        }
    }

    /// Ground truth value of a builtin atom; `None` if not builtin or not ground.
    pub fn eval_builtin(&self) -> Option<bool> {
        match self.kind {
            AtomKind::Builtin(op) => op.eval(&self.terms[0], &self.terms[1]),
            _ => None,
        }
    }
}

pub fn dom_predicate(sort: Option<&str>) -> String {
    match sort {
        Some(s) => format!("{DOM}_{s}"),
        None => DOM.to_string(),
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let AtomKind::Builtin(op) = self.kind {
            return write!(f, "{}{}{}", self.terms[0], op.symbol(), self.terms[1]);
        }
        f.write_str(&self.display_name())?;
        if !self.terms.is_empty() {
            f.write_str("(")?;
            for (i, t) in self.terms.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{t}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// An atom or its classical negation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub atom: Atom,
    pub negated: bool,
}

impl Literal {
    /// Builds a literal. A negated builtin is stored as the complementary
    /// comparison, so `-(X=Y)` becomes `X!=Y`.
    pub fn new(atom: Atom, negated: bool) -> Self {
        match atom.kind {
            AtomKind::Builtin(op) if negated => {
                let [lhs, rhs]: [Term; 2] = atom.terms.try_into().expect("builtin arity is 2");
                Literal {
                    atom: Atom::builtin(op.complement(), lhs, rhs),
                    negated: false,
                }
            }
            _ => Literal { atom, negated },
        }
    }

    pub fn pos(atom: Atom) -> Self {
        Literal::new(atom, false)
    }

    pub fn neg(atom: Atom) -> Self {
        Literal::new(atom, true)
    }

    pub fn complement(&self) -> Literal {
        Literal::new(self.atom.clone(), !self.negated)
    }

    pub fn is_builtin(&self) -> bool {
        self.atom.is_builtin()
    }

    pub fn substitute(&self, binding: &BTreeMap<String, Term>) -> Literal {
        Literal {
            atom: self.atom.substitute(binding),
            negated: self.negated,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            f.write_str("-")?;
        }
        self.atom.fmt(f)
    }
}

/// A rule body element: a literal, possibly under weak negation (`not`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BodyLiteral {
    pub literal: Literal,
    pub weakly_negated: bool,
}

impl BodyLiteral {
    pub fn pos(literal: Literal) -> Self {
        BodyLiteral {
            literal,
            weakly_negated: false,
        }
    }

    pub fn not(literal: Literal) -> Self {
        BodyLiteral {
            literal,
            weakly_negated: true,
        }
    }

    /// True for literals that bind their variables: not under `not` and not builtin.
    pub fn binds(&self) -> bool {
        !self.weakly_negated && !self.literal.is_builtin()
    }

    pub fn substitute(&self, binding: &BTreeMap<String, Term>) -> BodyLiteral {
        BodyLiteral {
            literal: self.literal.substitute(binding),
            weakly_negated: self.weakly_negated,
        }
    }
}

impl fmt::Display for BodyLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.weakly_negated {
            f.write_str("not ")?;
        }
        self.literal.fmt(f)
    }
}

/// Complement of a literal: flips classical negation.
pub fn complement(l: &Literal) -> Literal {
    l.complement()
}

/// True when the set contains some literal together with its complement.
pub fn has_complementary_pair<'a>(lits: impl IntoIterator<Item = &'a Literal>) -> bool {
    let set: BTreeSet<&Literal> = lits.into_iter().collect();
    set.iter().any(|l| !l.negated && set.contains(&l.complement()))
}
