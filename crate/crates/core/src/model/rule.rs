use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use super::atom::{BodyLiteral, Literal};
use super::term::{Term, Value};
use crate::error::{Error, Result};

/// Role of a rule in a repair or query program.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleKind {
    Fact,
    Triggering,
    Stabilizing,
    /// Persistence default, overridable by exceptions under e-answer semantics.
    PersistenceDefault,
    PersistenceRule,
    QueryRule,
    WeakConstraint,
    StrongConstraint,
    AuxiliaryDef,
}

impl RuleKind {
    pub fn is_headless(self) -> bool {
        matches!(self, RuleKind::WeakConstraint | RuleKind::StrongConstraint)
    }
}

/// `L1 v ... v Lk :- B1, ..., Bn.`
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rule {
    pub head: Vec<Literal>,
    pub body: Vec<BodyLiteral>,
    pub kind: RuleKind,
}

impl Rule {
    pub fn new(head: Vec<Literal>, body: Vec<BodyLiteral>, kind: RuleKind) -> Self {
        Rule { head, body, kind }
    }

    pub fn fact(l: Literal) -> Self {
        Rule::new(vec![l], vec![], RuleKind::Fact)
    }

    pub fn strong(body: Vec<BodyLiteral>) -> Self {
        Rule::new(vec![], body, RuleKind::StrongConstraint)
    }

    pub fn weak(body: Vec<BodyLiteral>) -> Self {
        Rule::new(vec![], body, RuleKind::WeakConstraint)
    }

    pub fn is_ground(&self) -> bool {
        self.head.iter().all(|l| l.atom.is_ground()) && self.body.iter().all(|b| b.literal.atom.is_ground())
    }

    pub fn variables(&self) -> BTreeSet<String> {
        self.head
            .iter()
            .map(|l| &l.atom)
            .chain(self.body.iter().map(|b| &b.literal.atom))
            .flat_map(|a| a.variables())
            .map(str::to_string)
            .collect()
    }

    /// Variables occurring in some positive, non-builtin body literal.
    pub fn bound_variables(&self) -> BTreeSet<String> {
        self.body
            .iter()
            .filter(|b| b.binds())
            .flat_map(|b| b.literal.atom.variables())
            .map(str::to_string)
            .collect()
    }

    pub fn unbound_variables(&self) -> BTreeSet<String> {
        let bound = self.bound_variables();
        self.variables().into_iter().filter(|v| !bound.contains(v)).collect()
    }

    pub fn check_safety(&self) -> Result<()> {
        let unbound = self.unbound_variables();
        if unbound.is_empty() {
            Ok(())
        } else {
            Err(Error::Unsafe(format!(
                "rule `{self}`: variables {} are not bound by a positive body literal",
                unbound.into_iter().collect::<Vec<_>>().join(", ")
            )))
        }
    }

    pub fn substitute(&self, binding: &BTreeMap<String, Term>) -> Rule {
        Rule {
            head: self.head.iter().map(|l| l.substitute(binding)).collect(),
            body: self.body.iter().map(|b| b.substitute(binding)).collect(),
            kind: self.kind,
        }
    }

    /// Key under which two rules are considered identical.
    fn canonical_key(&self) -> (u8, Vec<Literal>, Vec<BodyLiteral>) {
        let class = match self.kind {
            RuleKind::PersistenceDefault => 1,
            RuleKind::WeakConstraint => 2,
            _ => 0,
        };
        let mut head = self.head.clone();
        head.sort();
        head.dedup();
        let mut body = self.body.clone();
        body.sort();
        body.dedup();
        (class, head, body)
    }

    pub fn same_as(&self, other: &Rule) -> bool {
        self.canonical_key() == other.canonical_key()
    }

    pub fn constants(&self) -> impl Iterator<Item = &Value> {
        self.head
            .iter()
            .map(|l| &l.atom)
            .chain(self.body.iter().map(|b| &b.literal.atom))
            .flat_map(|a| a.terms.iter())
            .filter_map(Term::as_const)
    }
}

fn write_joined<T: fmt::Display>(f: &mut fmt::Formatter<'_>, items: &[T], sep: &str) -> fmt::Result {
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(sep)?;
        }
        item.fmt(f)?;
    }
    Ok(())
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.kind == RuleKind::WeakConstraint {
            f.write_str(":~ ")?;
            write_joined(f, &self.body, ", ")?;
            return f.write_str(".");
        }
        write_joined(f, &self.head, " v ")?;
        if self.body.is_empty() {
            if self.head.is_empty() {
                // a denial with an empty body is never satisfiable
                f.write_str(":- .")?;
                return Ok(());
            }
            return f.write_str(".");
        }
        if self.head.is_empty() {
            f.write_str(":- ")?;
        } else {
            f.write_str(" :- ")?;
        }
        write_joined(f, &self.body, ", ")?;
        f.write_str(".")
    }
}

/// An ordered set of rules. Adding a rule identical (up to ordering of its
/// head and body) to one already present is a no-op.
#[derive(Debug, Clone, Default)]
pub struct Program {
    rules: Vec<Rule>,
    seen: HashSet<(u8, Vec<Literal>, Vec<BodyLiteral>)>,
    /// Declared finite domain, when the program is meant for one.
    pub declared_domain: Option<BTreeSet<Value>>,
}

impl Program {
    pub fn new() -> Self {
        Program::default()
    }

    pub fn from_rules(rules: impl IntoIterator<Item = Rule>) -> Self {
        let mut p = Program::new();
        p.extend(rules);
        p
    }

    /// Returns false if an identical rule was already present.
    pub fn push(&mut self, rule: Rule) -> bool {
        if self.seen.insert(rule.canonical_key()) {
            self.rules.push(rule);
            true
        } else {
            false
        }
    }

    pub fn extend(&mut self, rules: impl IntoIterator<Item = Rule>) {
        for r in rules {
            self.push(r);
        }
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn into_rules(self) -> Vec<Rule> {
        self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn check_safety(&self) -> Result<()> {
        self.rules.iter().try_for_each(Rule::check_safety)
    }
}

impl PartialEq for Program {
    fn eq(&self, other: &Self) -> bool {
        self.rules == other.rules && self.declared_domain == other.declared_domain
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::atom::Atom;

    fn p(prime: bool, args: &[&str]) -> Atom {
        let a = Atom::database(
            "p",
            args.iter()
                .map(|s| {
                    if s.starts_with(char::is_uppercase) {
                        Term::var(*s)
                    } else {
                        Term::sym(*s)
                    }
                })
                .collect(),
        );
        if prime {
            a.primed()
        } else {
            a
        }
    }

    #[test]
    fn persistence_rule_renders_as_dlv() {
        let r = Rule::new(
            vec![Literal::pos(p(true, &["X"]))],
            vec![
                BodyLiteral::pos(Literal::pos(p(false, &["X"]))),
                BodyLiteral::not(Literal::neg(p(true, &["X"]))),
            ],
            RuleKind::PersistenceRule,
        );
        assert_eq!(r.to_string(), "p_p(X) :- p(X), not -p_p(X).");
        assert!(r.check_safety().is_ok());
    }

    #[test]
    fn weak_and_strong_constraints_render() {
        let body = vec![
            BodyLiteral::pos(Literal::pos(p(true, &["X"]))),
            BodyLiteral::not(Literal::pos(p(false, &["X"]))),
        ];
        assert_eq!(Rule::weak(body.clone()).to_string(), ":~ p_p(X), not p(X).");
        assert_eq!(Rule::strong(body).to_string(), ":- p_p(X), not p(X).");
    }

    #[test]
    fn unsafe_rule_detected() {
        let r = Rule::new(
            vec![Literal::neg(p(true, &["X"]))],
            vec![BodyLiteral::not(Literal::pos(p(false, &["X"])))],
            RuleKind::PersistenceRule,
        );
        assert!(matches!(r.check_safety(), Err(Error::Unsafe(_))));
    }

    #[test]
    fn program_has_set_semantics() {
        let a = Literal::pos(p(true, &["a"]));
        let b = Literal::pos(p(true, &["b"]));
        let mut prog = Program::new();
        assert!(prog.push(Rule::new(vec![a.clone(), b.clone()], vec![], RuleKind::Triggering)));
        assert!(!prog.push(Rule::new(vec![b, a], vec![], RuleKind::Triggering)));
        assert_eq!(prog.len(), 1);
    }
}
