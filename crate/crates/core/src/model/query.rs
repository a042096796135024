use std::collections::BTreeSet;
use std::fmt;

use super::atom::Atom;
use super::term::{Term, Value};

/// First-order query over database atoms and builtins.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(Atom),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Exists(Vec<String>, Box<Formula>),
}

impl Formula {
    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn exists(vars: Vec<String>, a: Formula) -> Formula {
        Formula::Exists(vars, Box::new(a))
    }

    /// Free variables in order of first occurrence.
    pub fn free_variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut Vec<String>) {
        match self {
            Formula::Atom(a) => {
                for v in a.variables() {
                    if !bound.iter().any(|b| b == v) && !out.iter().any(|o| o == v) {
                        out.push(v.to_string());
                    }
                }
            }
            Formula::Not(a) => a.collect_free(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Exists(vs, a) => {
                let n = bound.len();
                bound.extend(vs.iter().cloned());
                a.collect_free(bound, out);
                bound.truncate(n);
            }
        }
    }

    pub fn atoms(&self) -> Vec<&Atom> {
        match self {
            Formula::Atom(a) => vec![a],
            Formula::Not(a) | Formula::Exists(_, a) => a.atoms(),
            Formula::And(a, b) | Formula::Or(a, b) => {
                let mut v = a.atoms();
                v.extend(b.atoms());
                v
            }
        }
    }

    pub fn constants(&self) -> BTreeSet<Value> {
        self.atoms()
            .into_iter()
            .flat_map(|a| a.terms.iter())
            .filter_map(Term::as_const)
            .cloned()
            .collect()
    }

    /// A conjunction of atoms without quantifiers or negation.
    pub fn is_quantifier_free_conjunction(&self) -> bool {
        match self {
            Formula::Atom(_) => true,
            Formula::And(a, b) => a.is_quantifier_free_conjunction() && b.is_quantifier_free_conjunction(),
            _ => false,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        // precedence: 0 = or, 1 = and, 2 = unary
        match self {
            Formula::Atom(a) => write!(f, "{a}"),
            Formula::Not(a) => {
                f.write_str("!")?;
                a.fmt_prec(f, 2)
            }
            Formula::And(a, b) => paren(f, prec > 1, |f| {
                a.fmt_prec(f, 1)?;
                f.write_str(" & ")?;
                b.fmt_prec(f, 2)
            }),
            Formula::Or(a, b) => paren(f, prec > 0, |f| {
                a.fmt_prec(f, 0)?;
                f.write_str(" | ")?;
                b.fmt_prec(f, 1)
            }),
            Formula::Exists(vs, a) => paren(f, prec > 0, |f| {
                write!(f, "exists {} ", vs.join(","))?;
                a.fmt_prec(f, 0)
            }),
        }
    }
}

fn paren(
    f: &mut fmt::Formatter<'_>,
    wrap: bool,
    body: impl FnOnce(&mut fmt::Formatter<'_>) -> fmt::Result,
) -> fmt::Result {
    if wrap {
        f.write_str("(")?;
    }
    body(f)?;
    if wrap {
        f.write_str(")")?;
    }
    Ok(())
}

impl std::ops::Not for Formula {
    type Output = Formula;

    fn not(self) -> Formula {
        Formula::Not(Box::new(self))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// Query over the certainty operator `K`: each `K` node wraps a basic query.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum KQuery {
    K(Formula),
    Not(Box<KQuery>),
    And(Box<KQuery>, Box<KQuery>),
    Or(Box<KQuery>, Box<KQuery>),
    Exists(Vec<String>, Box<KQuery>),
}

impl KQuery {
    /// The wrapped formula when the whole query is a single `K` node.
    pub fn as_basic(&self) -> Option<&Formula> {
        match self {
            KQuery::K(b) => Some(b),
            _ => None,
        }
    }

    pub fn free_variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut Vec<String>) {
        match self {
            KQuery::K(b) => {
                for v in b.free_variables() {
                    if !bound.contains(&v) && !out.contains(&v) {
                        out.push(v);
                    }
                }
            }
            KQuery::Not(a) => a.collect_free(bound, out),
            KQuery::And(a, b) | KQuery::Or(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            KQuery::Exists(vs, a) => {
                let n = bound.len();
                bound.extend(vs.iter().cloned());
                a.collect_free(bound, out);
                bound.truncate(n);
            }
        }
    }

    /// Variables whose values are bounded by some positive `K` node.
    pub fn range_restricted(&self) -> BTreeSet<String> {
        match self {
            KQuery::K(b) => b.free_variables().into_iter().collect(),
            KQuery::Not(_) => BTreeSet::new(),
            KQuery::And(a, b) => a.range_restricted().union(&b.range_restricted()).cloned().collect(),
            KQuery::Or(a, b) => a
                .range_restricted()
                .intersection(&b.range_restricted())
                .cloned()
                .collect(),
            KQuery::Exists(vs, a) => {
                let mut s = a.range_restricted();
                for v in vs {
                    s.remove(v);
                }
                s
            }
        }
    }

    /// All `K` nodes, left to right.
    pub fn k_nodes(&self) -> Vec<&Formula> {
        match self {
            KQuery::K(b) => vec![b],
            KQuery::Not(a) | KQuery::Exists(_, a) => a.k_nodes(),
            KQuery::And(a, b) | KQuery::Or(a, b) => {
                let mut v = a.k_nodes();
                v.extend(b.k_nodes());
                v
            }
        }
    }

    pub fn constants(&self) -> BTreeSet<Value> {
        self.k_nodes().into_iter().flat_map(|b| b.constants()).collect()
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        match self {
            KQuery::K(b) => write!(f, "K({b})"),
            KQuery::Not(a) => {
                f.write_str("!")?;
                a.fmt_prec(f, 2)
            }
            KQuery::And(a, b) => paren(f, prec > 1, |f| {
                a.fmt_prec(f, 1)?;
                f.write_str(" & ")?;
                b.fmt_prec(f, 2)
            }),
            KQuery::Or(a, b) => paren(f, prec > 0, |f| {
                a.fmt_prec(f, 0)?;
                f.write_str(" | ")?;
                b.fmt_prec(f, 1)
            }),
            KQuery::Exists(vs, a) => paren(f, prec > 0, |f| {
                write!(f, "exists {} ", vs.join(","))?;
                a.fmt_prec(f, 0)
            }),
        }
    }
}

impl fmt::Display for KQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::term::CmpOp;

    fn salary(x: Term, y: Term) -> Formula {
        Formula::Atom(Atom::database("salary", vec![x, y]))
    }

    #[test]
    fn free_variables_in_order() {
        let q = salary(Term::var("X"), Term::var("Y"));
        assert_eq!(q.free_variables(), vec!["X", "Y"]);
        let closed = Formula::exists(
            vec!["Y".into()],
            Formula::and(
                salary(Term::sym("V.Smith"), Term::var("Y")),
                Formula::Atom(Atom::builtin(CmpOp::Gt, Term::var("Y"), Term::int(4000))),
            ),
        );
        assert!(closed.free_variables().is_empty());
        assert_eq!(closed.to_string(), "exists Y salary(\"V.Smith\",Y) & Y>4000");
    }

    #[test]
    fn range_restriction_of_k_queries() {
        let k = |v: &str| KQuery::K(salary(Term::var(v), Term::int(1)));
        let q = KQuery::And(Box::new(k("X")), Box::new(KQuery::Not(Box::new(k("Y")))));
        assert_eq!(q.free_variables(), vec!["X", "Y"]);
        assert_eq!(q.range_restricted(), BTreeSet::from(["X".to_string()]));
        let d = KQuery::Or(Box::new(k("X")), Box::new(k("X")));
        assert_eq!(d.range_restricted(), BTreeSet::from(["X".to_string()]));
    }
}
