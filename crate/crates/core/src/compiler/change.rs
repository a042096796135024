use super::{guarded, variable_sorts, StabilizerPolicy};
use crate::error::{Error, Result};
use crate::model::atom::{BodyLiteral, Literal};
use crate::model::constraint::Constraint;
use crate::model::instance::Schema;
use crate::model::rule::{Program, Rule, RuleKind};

/// Primed version of a clause literal: `p` becomes `p'`, `-q` becomes `-q'`.
fn primed(l: &Literal) -> Literal {
    Literal::new(l.atom.primed(), l.negated)
}

/// Change program: one triggering rule per constraint plus its stabilizing
/// rules. Constraints with more than two literals get every proper subset
/// of literals as a stabilizer head, shaped by `policy`.
pub fn build_change_program(ics: &[Constraint], schema: &Schema, policy: StabilizerPolicy) -> Result<Program> {
    build(ics, schema, policy)
}

pub(super) fn build(ics: &[Constraint], schema: &Schema, policy: StabilizerPolicy) -> Result<Program> {
    let mut p = Program::new();
    for c in ics {
        if c.is_referential() {
            return Err(Error::Unsupported(format!(
                "`{c}` has an existential tail; referential constraints are compiled separately"
            )));
        }
        c.validate()?;
        p.extend(triggering(c, schema));
        if c.width() <= 2 {
            p.extend(basic_stabilizers(c, schema));
        } else {
            p.extend(expand_universal(c, policy, schema));
        }
    }
    Ok(p)
}

/// `p1' v ... v -q1' v ... :- not p1, ..., q1, ..., not phi.`
fn triggering(c: &Constraint, schema: &Schema) -> Vec<Rule> {
    let sorts = variable_sorts(c.positives.iter().chain(&c.negatives), schema);
    let lits = c.clause_literals();
    let head: Vec<Literal> = lits.iter().map(primed).collect();
    let mut body: Vec<BodyLiteral> = c
        .negatives
        .iter()
        .map(|q| BodyLiteral::pos(Literal::pos(q.clone())))
        .collect();
    body.extend(c.positives.iter().map(|p| BodyLiteral::not(Literal::pos(p.clone()))));
    c.builtin
        .negation_bodies()
        .into_iter()
        .map(|phi| {
            let mut b = body.clone();
            b.extend(phi.into_iter().map(BodyLiteral::pos));
            guarded(head.clone(), b, &sorts, RuleKind::Triggering)
        })
        .collect()
}

/// Stabilizers with a single literal moved to the body. For a unary
/// constraint the head is the primed literal itself.
fn basic_stabilizers(c: &Constraint, schema: &Schema) -> Vec<Rule> {
    let lits = c.clause_literals();
    if lits.len() == 1 {
        let sorts = variable_sorts(c.positives.iter().chain(&c.negatives), schema);
        return c
            .builtin
            .negation_bodies()
            .into_iter()
            .map(|phi| {
                let b = phi.into_iter().map(BodyLiteral::pos).collect();
                guarded(vec![primed(&lits[0])], b, &sorts, RuleKind::Stabilizing)
            })
            .collect();
    }
    (0..lits.len())
        .flat_map(|j| {
            let head_idx: Vec<usize> = (0..lits.len()).filter(|&i| i != j).collect();
            stabilizer(c, &head_idx, StabilizerPolicy::Naive, schema)
        })
        .collect()
}

/// Rules with the literals at `head_idx` (primed) in the head and the
/// complements of the remaining primed literals in the body.
fn stabilizer(c: &Constraint, head_idx: &[usize], policy: StabilizerPolicy, schema: &Schema) -> Vec<Rule> {
    let lits = c.clause_literals();
    let sorts = variable_sorts(c.positives.iter().chain(&c.negatives), schema);
    let head: Vec<Literal> = head_idx.iter().map(|&i| primed(&lits[i])).collect();
    let mut body: Vec<BodyLiteral> = Vec::new();
    if policy == StabilizerPolicy::Guarded && head_idx.len() >= 2 {
        // a deletion needs the tuple in the instance, an insertion its absence
        let (dels, ins): (Vec<usize>, Vec<usize>) = head_idx.iter().partition(|&&i| lits[i].negated);
        body.extend(
            dels.iter()
                .map(|&i| BodyLiteral::pos(Literal::pos(lits[i].atom.clone()))),
        );
        body.extend(
            ins.iter()
                .map(|&i| BodyLiteral::not(Literal::pos(lits[i].atom.clone()))),
        );
    }
    for (i, l) in lits.iter().enumerate() {
        if !head_idx.contains(&i) {
            body.push(BodyLiteral::pos(primed(l).complement()));
        }
    }
    c.builtin
        .negation_bodies()
        .into_iter()
        .map(|phi| {
            let mut b = body.clone();
            b.extend(phi.into_iter().map(BodyLiteral::pos));
            guarded(head.clone(), b, &sorts, RuleKind::Stabilizing)
        })
        .collect()
}

/// Stabilizing rules for every nonempty proper subset of the constraint's
/// literals taken as head.
pub fn expand_universal(c: &Constraint, policy: StabilizerPolicy, schema: &Schema) -> Vec<Rule> {
    let n = c.width();
    let mut out = Vec::new();
    for mask in 1u32..(1u32 << n) - 1 {
        let head_idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        if policy == StabilizerPolicy::SingletonsOnly && head_idx.len() != 1 {
            continue;
        }
        out.extend(stabilizer(c, &head_idx, policy, schema));
    }
    out
}
