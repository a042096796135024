use super::{guarded, variable_sorts, RicPolicy};
use crate::error::{Error, Result};
use crate::model::atom::{Atom, BodyLiteral, Literal, AUX_PREFIX};
use crate::model::constraint::Constraint;
use crate::model::instance::Schema;
use crate::model::rule::{Rule, RuleKind};
use crate::model::term::Term;

/// Rules for `P(x) -> exists y R(x,y)`. `index` makes the auxiliary
/// predicate names unique within a program.
///
/// `aux(x)` holds when `R(x,y)` does for some domain value `y`, and
/// `aux_p(x)` likewise for the repaired `R`. Tuples with `null` never
/// satisfy the existential.
pub fn compile_ric(c: &Constraint, policy: RicPolicy, schema: &Schema, index: usize) -> Result<Vec<Rule>> {
    let tail = c
        .existential
        .as_ref()
        .ok_or_else(|| Error::Unsupported(format!("`{c}` is not a referential constraint")))?;
    let [p] = c.negatives.as_slice() else {
        return Err(Error::Unsupported(format!("`{c}` needs exactly one antecedent atom")));
    };
    if !c.positives.is_empty() {
        return Err(Error::Unsupported(format!(
            "`{c}` mixes a clause with an existential tail"
        )));
    }
    let r = &tail.atom;
    let shared: Vec<Term> = {
        let mut seen: Vec<Term> = Vec::new();
        for t in &p.terms {
            if let Term::Var(v) = t {
                if r.variables().any(|x| x == v) && !seen.contains(t) {
                    seen.push(t.clone());
                }
            }
        }
        seen
    };
    let aux_name = format!("{AUX_PREFIX}ric{index}");
    let aux = Atom::aux(aux_name.clone(), shared.clone());
    let aux_p = Atom::aux(format!("{aux_name}_p"), shared);
    let r_null = Atom {
        terms: r
            .terms
            .iter()
            .map(|t| match t {
                Term::Var(v) if tail.existential.contains(v) => Term::Null,
                t => t.clone(),
            })
            .collect(),
        ..r.clone()
    };
    let sorts = variable_sorts([p, r], schema);
    let del = Literal::neg(p.primed());
    let mut rules = vec![
        Rule::new(
            vec![Literal::pos(aux.clone())],
            vec![BodyLiteral::pos(Literal::pos(r.clone()))],
            RuleKind::AuxiliaryDef,
        ),
        Rule::new(
            vec![Literal::pos(aux_p.clone())],
            vec![BodyLiteral::pos(Literal::pos(r.primed()))],
            RuleKind::AuxiliaryDef,
        ),
    ];
    let violated = vec![
        BodyLiteral::pos(Literal::pos(p.clone())),
        BodyLiteral::not(Literal::pos(aux)),
    ];
    match policy {
        RicPolicy::NullInsertion => {
            let ins = Literal::pos(r_null.primed());
            rules.push(guarded(
                vec![del.clone(), ins.clone()],
                violated,
                &sorts,
                RuleKind::Triggering,
            ));
            rules.push(guarded(
                vec![del],
                vec![
                    BodyLiteral::not(Literal::pos(aux_p.clone())),
                    BodyLiteral::pos(ins.complement()),
                ],
                &sorts,
                RuleKind::Stabilizing,
            ));
            rules.push(guarded(
                vec![ins],
                vec![
                    BodyLiteral::pos(Literal::pos(p.primed())),
                    BodyLiteral::not(Literal::pos(aux_p)),
                ],
                &sorts,
                RuleKind::Stabilizing,
            ));
        }
        RicPolicy::DeleteOnly => {
            rules.push(guarded(vec![del.clone()], violated, &sorts, RuleKind::Triggering));
            rules.push(guarded(
                vec![del],
                vec![BodyLiteral::not(Literal::pos(aux_p))],
                &sorts,
                RuleKind::Stabilizing,
            ));
        }
    }
    Ok(rules)
}
