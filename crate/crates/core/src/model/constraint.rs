use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::atom::{Atom, Literal};
use super::term::Term;
use crate::error::{Error, Result};

/// Builtin part φ of a constraint clause, as a disjunction of conjunctions.
/// No alternatives means φ is false.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct BuiltinFormula {
    pub alternatives: Vec<Vec<Literal>>,
}

impl BuiltinFormula {
    pub fn falsum() -> Self {
        BuiltinFormula::default()
    }

    /// A single conjunction.
    pub fn conjunction(conjuncts: Vec<Literal>) -> Self {
        BuiltinFormula {
            alternatives: vec![conjuncts],
        }
    }

    pub fn is_false(&self) -> bool {
        self.alternatives.is_empty()
    }

    pub fn variables(&self) -> BTreeSet<String> {
        self.alternatives
            .iter()
            .flatten()
            .flat_map(|l| l.atom.variables())
            .map(str::to_string)
            .collect()
    }

    pub fn substitute(&self, binding: &BTreeMap<String, Term>) -> Self {
        BuiltinFormula {
            alternatives: self
                .alternatives
                .iter()
                .map(|conj| conj.iter().map(|l| l.substitute(binding)).collect())
                .collect(),
        }
    }

    /// Truth value once ground; `None` if some conjunct still has variables.
    pub fn eval(&self) -> Option<bool> {
        let mut result = false;
        for conj in &self.alternatives {
            let mut all = true;
            for l in conj {
                all &= l.atom.eval_builtin()?;
            }
            result |= all;
        }
        Some(result)
    }

    /// Bodies expressing `not φ`: one conjunction of complemented builtins per
    /// way of refuting every alternative. Empty φ yields one empty body.
    pub fn negation_bodies(&self) -> Vec<Vec<Literal>> {
        let mut bodies: Vec<Vec<Literal>> = vec![vec![]];
        for conj in &self.alternatives {
            let mut next = Vec::new();
            for body in &bodies {
                for l in conj {
                    let mut b = body.clone();
                    let c = l.complement();
                    if !b.contains(&c) {
                        b.push(c);
                    }
                    next.push(b);
                }
            }
            bodies = next;
        }
        bodies
    }
}

impl fmt::Display for BuiltinFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, conj) in self.alternatives.iter().enumerate() {
            if i > 0 {
                f.write_str(" v ")?;
            }
            for (j, l) in conj.iter().enumerate() {
                if j > 0 {
                    f.write_str(" & ")?;
                }
                write!(f, "{l}")?;
            }
        }
        Ok(())
    }
}

/// Existential tail of a referential constraint `P(x) -> exists y R(x,y)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExistentialTail {
    /// The referenced atom `R(x,y)`.
    pub atom: Atom,
    /// Variables of `atom` that are existentially quantified.
    pub existential: Vec<String>,
}

/// Universal constraint `p1 v ... v pn v -q1 v ... v -qm v φ`, or a
/// referential constraint when `existential` is set (then `negatives` holds
/// the single antecedent and `positives` is empty).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub positives: Vec<Atom>,
    pub negatives: Vec<Atom>,
    pub builtin: BuiltinFormula,
    pub existential: Option<ExistentialTail>,
}

impl Constraint {
    pub fn new(positives: Vec<Atom>, negatives: Vec<Atom>, builtin: BuiltinFormula) -> Result<Self> {
        let c = Constraint {
            positives,
            negatives,
            builtin,
            existential: None,
        };
        c.validate()?;
        Ok(c)
    }

    /// `antecedent -> exists vars tail`.
    pub fn referential(antecedent: Atom, tail: Atom, existential: Vec<String>) -> Result<Self> {
        let c = Constraint {
            positives: vec![],
            negatives: vec![antecedent],
            builtin: BuiltinFormula::falsum(),
            existential: Some(ExistentialTail {
                atom: tail,
                existential,
            }),
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.positives.is_empty() && self.negatives.is_empty() {
            return Err(Error::Unsafe(format!("constraint `{self}` has no database literal")));
        }
        let vars = self.database_variables();
        if let Some(v) = self.builtin.variables().into_iter().find(|v| !vars.contains(v)) {
            return Err(Error::Unsafe(format!(
                "constraint `{self}`: builtin variable {v} does not occur in a database atom"
            )));
        }
        if let Some(tail) = &self.existential {
            if self.negatives.len() != 1 || !self.positives.is_empty() {
                return Err(Error::Unsupported(
                    "a referential constraint needs exactly one antecedent atom".into(),
                ));
            }
            let ante: BTreeSet<&str> = self.negatives[0].variables().collect();
            for v in tail.atom.variables() {
                let is_ex = tail.existential.iter().any(|e| e == v);
                if is_ex == ante.contains(v) {
                    return Err(Error::Unsupported(format!(
                        "referential constraint `{self}`: variable {v} must be either shared or existential"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn is_referential(&self) -> bool {
        self.existential.is_some()
    }

    /// Number of database literals `n + m`.
    pub fn width(&self) -> usize {
        self.positives.len() + self.negatives.len()
    }

    pub fn is_binary(&self) -> bool {
        !self.is_referential() && self.width() <= 2
    }

    pub fn is_unary(&self) -> bool {
        !self.is_referential() && self.width() == 1
    }

    /// Two negated atoms of one predicate whose φ equates argument positions:
    /// `-p(X..,Y..) v -p(X..,Z..) v Y1=Z1 ...` with shared key variables.
    pub fn is_functional_dependency(&self) -> bool {
        if self.is_referential() || !self.positives.is_empty() || self.negatives.len() != 2 {
            return false;
        }
        let (a, b) = (&self.negatives[0], &self.negatives[1]);
        if a.predicate != b.predicate || a.arity() != b.arity() {
            return false;
        }
        if !a.terms.iter().chain(&b.terms).all(Term::is_var) {
            return false;
        }
        let distinct: BTreeSet<&Term> = a.terms.iter().chain(&b.terms).collect();
        let shared = a.terms.iter().zip(&b.terms).filter(|(x, y)| x == y).count();
        if distinct.len() != 2 * a.arity() - shared {
            return false;
        }
        if self.builtin.alternatives.is_empty() {
            return false;
        }
        self.builtin.alternatives.iter().all(|conj| {
            conj.iter().all(|l| {
                matches!(l.atom.kind, super::atom::AtomKind::Builtin(super::term::CmpOp::Eq))
                    && a.terms.iter().zip(&b.terms).any(|(x, y)| {
                        x != y && {
                            let (u, v) = (&l.atom.terms[0], &l.atom.terms[1]);
                            (u == x && v == y) || (u == y && v == x)
                        }
                    })
            })
        })
    }

    /// Clause literals over database atoms: `p_i` positive, `q_j` negated.
    pub fn clause_literals(&self) -> Vec<Literal> {
        self.positives
            .iter()
            .map(|a| Literal::pos(a.clone()))
            .chain(self.negatives.iter().map(|a| Literal::neg(a.clone())))
            .collect()
    }

    pub fn database_variables(&self) -> BTreeSet<String> {
        self.positives
            .iter()
            .chain(&self.negatives)
            .flat_map(|a| a.variables())
            .map(str::to_string)
            .collect()
    }

    pub fn constants(&self) -> impl Iterator<Item = &super::term::Value> {
        self.positives
            .iter()
            .chain(&self.negatives)
            .chain(self.builtin.alternatives.iter().flatten().map(|l| &l.atom))
            .chain(self.existential.iter().map(|t| &t.atom))
            .flat_map(|a| a.terms.iter())
            .filter_map(Term::as_const)
    }

    /// Predicates mentioned by the database atoms.
    pub fn predicates(&self) -> BTreeSet<&str> {
        self.positives
            .iter()
            .chain(&self.negatives)
            .chain(self.existential.iter().map(|t| &t.atom))
            .map(|a| a.predicate.as_str())
            .collect()
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(tail) = &self.existential {
            write!(f, "{} -> exists ", self.negatives[0])?;
            f.write_str(&tail.existential.join(","))?;
            return write!(f, " {}", tail.atom);
        }
        let mut first = true;
        for l in self.clause_literals() {
            if !first {
                f.write_str(" v ")?;
            }
            first = false;
            write!(f, "{l}")?;
        }
        if !self.builtin.is_false() {
            if !first {
                f.write_str(" v ")?;
            }
            write!(f, "{}", self.builtin)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::term::CmpOp;

    fn salary(x: &str, y: &str) -> Atom {
        Atom::database("salary", vec![Term::var(x), Term::var(y)])
    }

    fn eq(a: &str, b: &str) -> Literal {
        Literal::pos(Atom::builtin(CmpOp::Eq, Term::var(a), Term::var(b)))
    }

    #[test]
    fn salary_fd_is_a_functional_dependency() {
        let c = Constraint::new(
            vec![],
            vec![salary("X", "Y"), salary("X", "Z")],
            BuiltinFormula::conjunction(vec![eq("Y", "Z")]),
        )
        .unwrap();
        assert!(c.is_binary());
        assert!(c.is_functional_dependency());
        assert_eq!(c.to_string(), "-salary(X,Y) v -salary(X,Z) v Y=Z");
    }

    #[test]
    fn inclusion_is_not_an_fd() {
        let c = Constraint::new(
            vec![Atom::database("q", vec![Term::var("X"), Term::var("Y")])],
            vec![Atom::database("p", vec![Term::var("X"), Term::var("Y")])],
            BuiltinFormula::falsum(),
        )
        .unwrap();
        assert!(!c.is_functional_dependency());
        assert!(c.is_binary());
    }

    #[test]
    fn empty_clause_rejected() {
        assert!(Constraint::new(vec![], vec![], BuiltinFormula::falsum()).is_err());
    }

    #[test]
    fn builtin_variables_must_be_scoped() {
        let r = Constraint::new(
            vec![],
            vec![salary("X", "Y")],
            BuiltinFormula::conjunction(vec![eq("Y", "W")]),
        );
        assert!(matches!(r, Err(Error::Unsafe(_))));
    }

    #[test]
    fn negation_bodies_refute_each_alternative() {
        let phi = BuiltinFormula {
            alternatives: vec![vec![eq("X", "Y"), eq("Y", "Z")], vec![eq("X", "Z")]],
        };
        let bodies = phi.negation_bodies();
        assert_eq!(bodies.len(), 2);
        for b in &bodies {
            assert_eq!(b.len(), 2);
            assert!(b.iter().any(|l| l.to_string() == "X!=Z"));
        }
        assert_eq!(BuiltinFormula::falsum().negation_bodies(), vec![Vec::<Literal>::new()]);
    }

    #[test]
    fn ground_evaluation() {
        let phi = BuiltinFormula::conjunction(vec![eq("X", "Y")]);
        let mut b = BTreeMap::new();
        b.insert("X".to_string(), Term::int(1));
        assert_eq!(phi.substitute(&b).eval(), None);
        b.insert("Y".to_string(), Term::int(1));
        assert_eq!(phi.substitute(&b).eval(), Some(true));
        assert_eq!(BuiltinFormula::falsum().eval(), Some(false));
    }
}
