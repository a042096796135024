use super::{guarded, RepairMode};
use crate::model::atom::{Atom, BodyLiteral, Literal};
use crate::model::instance::Schema;
use crate::model::rule::{Program, Rule, RuleKind};
use crate::model::term::Term;

/// Adds, for every relation of the schema, the rules or weak constraints
/// that carry unchanged tuples over to the primed relation.
pub fn add_persistence(mut p: Program, schema: &Schema, mode: RepairMode) -> Program {
    for (name, rel) in schema.relations() {
        let vars: Vec<Term> = match rel.arity {
            0..=3 => ["X", "Y", "Z"][..rel.arity].iter().map(|v| Term::var(*v)).collect(),
            n => (1..=n).map(|i| Term::var(format!("X{i}"))).collect(),
        };
        let atom = Atom::database(name, vars.clone());
        let sorts = vars
            .iter()
            .zip(&rel.sorts)
            .map(|(v, s)| (v.as_var().unwrap().to_string(), s.clone()))
            .collect();
        let orig = Literal::pos(atom.clone());
        let ins = Literal::pos(atom.primed());
        let del = Literal::neg(atom.primed());
        match mode {
            RepairMode::Winslett => {
                p.push(Rule::new(
                    vec![ins.clone()],
                    vec![BodyLiteral::pos(orig.clone()), BodyLiteral::not(del.clone())],
                    RuleKind::PersistenceRule,
                ));
                p.push(guarded(
                    vec![del],
                    vec![BodyLiteral::not(orig), BodyLiteral::not(ins)],
                    &sorts,
                    RuleKind::PersistenceRule,
                ));
            }
            RepairMode::Dalal => {
                p.push(Rule::weak(vec![BodyLiteral::pos(ins), BodyLiteral::not(orig.clone())]));
                p.push(Rule::weak(vec![BodyLiteral::pos(del), BodyLiteral::pos(orig)]));
            }
            RepairMode::RawDefaults => {
                p.push(Rule::new(
                    vec![ins],
                    vec![BodyLiteral::pos(orig.clone())],
                    RuleKind::PersistenceDefault,
                ));
                p.push(guarded(
                    vec![del],
                    vec![BodyLiteral::not(orig)],
                    &sorts,
                    RuleKind::PersistenceDefault,
                ));
            }
        }
    }
    p
}

/// Rewrites each default `L :- body` into the rule `L :- body, not -L`,
/// which has the same answer sets under the ordinary reduct as the
/// default has under the exception-aware one.
pub fn defaults_to_rules(p: &Program) -> Program {
    let mut out = Program::new();
    out.declared_domain = p.declared_domain.clone();
    for r in p.rules() {
        if r.kind == RuleKind::PersistenceDefault {
            let mut body = r.body.clone();
            body.push(BodyLiteral::not(r.head[0].complement()));
            out.push(Rule::new(r.head.clone(), body, RuleKind::PersistenceRule));
        } else {
            out.push(r.clone());
        }
    }
    out
}
