use std::collections::{BTreeMap, BTreeSet};

use super::{guarded, variable_sorts, RepairMode};
use crate::error::{Error, Result};
use crate::model::atom::{Atom, BodyLiteral, Literal, AUX_PREFIX, QUERY};
use crate::model::instance::Schema;
use crate::model::query::Formula;
use crate::model::rule::{Program, Rule, RuleKind};
use crate::model::term::Term;

/// Stratified program defining `query(answer variables)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryProgram {
    pub program: Program,
    /// Arguments of `query`, in order of first occurrence in the formula.
    pub answer_variables: Vec<String>,
}

impl QueryProgram {
    pub fn query_atom(&self) -> Atom {
        Atom::aux(QUERY, self.answer_variables.iter().map(Term::var).collect())
    }
}

struct Translator<'a> {
    mode: RepairMode,
    sorts: BTreeMap<String, Option<String>>,
    aux_rules: Vec<Rule>,
    next_aux: usize,
    next_var: usize,
    schema: &'a Schema,
}

impl Translator<'_> {
    /// Renames quantified variables apart so that each binder is unique.
    fn standardize(&mut self, f: &Formula, env: &BTreeMap<String, String>) -> Formula {
        match f {
            Formula::Atom(a) => {
                let binding = env.iter().map(|(k, v)| (k.clone(), Term::var(v.clone()))).collect();
                Formula::Atom(a.substitute(&binding))
            }
            Formula::Not(a) => !self.standardize(a, env),
            Formula::And(a, b) => Formula::and(self.standardize(a, env), self.standardize(b, env)),
            Formula::Or(a, b) => Formula::or(self.standardize(a, env), self.standardize(b, env)),
            Formula::Exists(vs, a) => {
                let mut env = env.clone();
                let mut fresh = Vec::new();
                for v in vs {
                    self.next_var += 1;
                    let name = format!("{v}_{}", self.next_var);
                    env.insert(v.clone(), name.clone());
                    fresh.push(name);
                }
                Formula::exists(fresh, self.standardize(a, &env))
            }
        }
    }

    fn repaired(&self, a: &Atom) -> Vec<Vec<BodyLiteral>> {
        match self.mode {
            RepairMode::Dalal => vec![
                vec![BodyLiteral::pos(Literal::pos(a.primed()))],
                vec![
                    BodyLiteral::pos(Literal::pos(a.clone())),
                    BodyLiteral::not(Literal::neg(a.primed())),
                ],
            ],
            _ => vec![vec![BodyLiteral::pos(Literal::pos(a.primed()))]],
        }
    }

    fn not_repaired(&self, a: &Atom) -> Vec<Vec<BodyLiteral>> {
        match self.mode {
            RepairMode::Dalal => vec![
                vec![BodyLiteral::pos(Literal::neg(a.primed()))],
                vec![
                    BodyLiteral::not(Literal::pos(a.clone())),
                    BodyLiteral::not(Literal::pos(a.primed())),
                ],
            ],
            _ => vec![vec![BodyLiteral::not(Literal::pos(a.primed()))]],
        }
    }

    /// Alternative rule bodies whose union defines `f`.
    fn bodies(&mut self, f: &Formula) -> Vec<Vec<BodyLiteral>> {
        match f {
            Formula::Atom(a) if a.is_builtin() => vec![vec![BodyLiteral::pos(Literal::pos(a.clone()))]],
            Formula::Atom(a) => self.repaired(a),
            Formula::Not(inner) => match &**inner {
                Formula::Atom(a) if a.is_builtin() => {
                    vec![vec![BodyLiteral::pos(Literal::neg(a.clone()))]]
                }
                Formula::Atom(a) => self.not_repaired(a),
                other => {
                    let aux = self.define_aux(other);
                    vec![vec![BodyLiteral::not(Literal::pos(aux))]]
                }
            },
            Formula::And(a, b) => {
                let left = self.bodies(a);
                let right = self.bodies(b);
                let mut out = Vec::new();
                for l in &left {
                    for r in &right {
                        let mut body = l.clone();
                        for x in r {
                            if !body.contains(x) {
                                body.push(x.clone());
                            }
                        }
                        out.push(body);
                    }
                }
                out
            }
            Formula::Or(a, b) => {
                let mut out = self.bodies(a);
                out.extend(self.bodies(b));
                out
            }
            Formula::Exists(_, a) => self.bodies(a),
        }
    }

    /// Auxiliary predicate over the free variables of `f`.
    fn define_aux(&mut self, f: &Formula) -> Atom {
        self.next_aux += 1;
        let vars: Vec<Term> = f.free_variables().into_iter().map(Term::Var).collect();
        let aux = Atom::aux(format!("{AUX_PREFIX}q{}", self.next_aux), vars);
        for body in self.bodies(f) {
            let rule = guarded(vec![Literal::pos(aux.clone())], body, &self.sorts, RuleKind::QueryRule);
            self.aux_rules.push(rule);
        }
        aux
    }
}

/// Compiles a basic query into rules over the repaired relations.
/// Conjunction joins bodies, disjunction yields alternative rules,
/// existential variables are projected out, and negated subformulas become
/// auxiliary predicates under `not`, their free variables ranging over the
/// domain.
pub fn compile_query_program(q: &Formula, mode: RepairMode, schema: &Schema) -> Result<QueryProgram> {
    for a in q.atoms() {
        if !a.is_builtin() && !a.is_database() {
            return Err(Error::Unsupported(format!("query atom `{a}` is not a database atom")));
        }
        if a.is_database() {
            schema.check_atom(a)?;
        }
    }
    let mut t = Translator {
        mode,
        sorts: BTreeMap::new(),
        aux_rules: Vec::new(),
        next_aux: 0,
        next_var: 0,
        schema,
    };
    let q = t.standardize(q, &BTreeMap::new());
    t.sorts = variable_sorts(q.atoms(), t.schema);
    let answer_variables = q.free_variables();
    let head = Atom::aux(QUERY, answer_variables.iter().map(Term::var).collect());
    let mut program = Program::new();
    let bodies = t.bodies(&q);
    for body in bodies {
        let rule = guarded(vec![Literal::pos(head.clone())], body, &t.sorts, RuleKind::QueryRule);
        let bound = rule.bound_variables();
        let answer_bound: BTreeSet<&String> = answer_variables.iter().filter(|v| bound.contains(*v)).collect();
        debug_assert_eq!(answer_bound.len(), answer_variables.len());
        program.push(rule);
    }
    program.extend(t.aux_rules);
    program.check_safety()?;
    Ok(QueryProgram {
        program,
        answer_variables,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_query;

    fn compile(text: &str, mode: RepairMode) -> Vec<String> {
        let schema = Schema::new().with("p", 2).with("q", 2).with("r", 1);
        let q = parse_query(text, &schema).unwrap();
        let qp = compile_query_program(q.as_basic().unwrap(), mode, &schema).unwrap();
        qp.program.rules().iter().map(|r| r.to_string()).collect()
    }

    #[test]
    fn disjunction_gives_two_rules() {
        assert_eq!(
            compile("p(X,a) | q(a,X)", RepairMode::Winslett),
            vec!["query(X) :- p_p(X,a).", "query(X) :- q_p(a,X)."]
        );
    }

    #[test]
    fn existential_projects() {
        let rules = compile("exists X q(X,Y)", RepairMode::Winslett);
        assert_eq!(rules.len(), 1);
        assert!(rules[0].starts_with("query(Y) :- q_p(X_1,Y)."));
    }

    #[test]
    fn dalal_negated_atom() {
        assert_eq!(
            compile("r(X) & !p(X,X)", RepairMode::Dalal),
            vec![
                "query(X) :- r_p(X), -p_p(X,X).",
                "query(X) :- r_p(X), not p(X,X), not p_p(X,X).",
                "query(X) :- r(X), not -r_p(X), -p_p(X,X).",
                "query(X) :- r(X), not -r_p(X), not p(X,X), not p_p(X,X).",
            ]
        );
    }

    #[test]
    fn negated_subformula_uses_auxiliary() {
        let rules = compile("r(X) & !(exists Y p(X,Y) & q(Y,X))", RepairMode::Winslett);
        assert_eq!(rules[0], "query(X) :- r_p(X), not cqa_q1(X).");
        assert_eq!(rules[1], "cqa_q1(X) :- p_p(X,Y_1), q_p(Y_1,X).");
    }
}
