//! Compilation of constraints, repair semantics and queries into programs.

mod change;
mod persistence;
mod query;
mod ric;

pub use change::{build_change_program, expand_universal};
pub use persistence::{add_persistence, defaults_to_rules};
pub use query::{compile_query_program, QueryProgram};
pub use ric::compile_ric;

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::atom::{Atom, BodyLiteral, Literal};
use crate::model::instance::Schema;
use crate::model::rule::{Program, Rule};
use crate::model::term::Term;
use crate::parser::ConstraintSet;

/// How unchanged data carries over to the repaired predicates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum RepairMode {
    /// Set-inclusion minimal repairs, via persistence rules.
    #[default]
    Winslett,
    /// Cardinality minimal repairs, via weak constraints.
    Dalal,
    /// Persistence defaults under the exception-aware reduct.
    RawDefaults,
}

/// Stabilizing rules generated for constraints with more than two literals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum StabilizerPolicy {
    /// Disjunctive stabilizers guarded by the original instance.
    #[default]
    Guarded,
    /// Every subset of literals as a head, bodies guarded by `dom` only.
    Naive,
    /// Only single-literal heads. Incomplete; kept to show why the
    /// disjunctive stabilizers are needed.
    SingletonsOnly,
}

/// Repair action for referential constraints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum RicPolicy {
    /// Delete the referencing tuple or insert a tuple padded with `null`.
    #[default]
    NullInsertion,
    /// Only delete the referencing tuple.
    DeleteOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CompileOptions {
    pub mode: RepairMode,
    pub stabilizer: StabilizerPolicy,
    pub ric: RicPolicy,
}

/// Full repair program for a constraint file: change rules, referential
/// rules, persistence, user denials with their definitions, and weak
/// constraints.
pub fn compile_repair_program(ics: &ConstraintSet, schema: &Schema, opts: &CompileOptions) -> Result<Program> {
    let (rics, universal): (Vec<_>, Vec<_>) = ics.constraints.iter().cloned().partition(|c| c.is_referential());
    let mut program = build_change_program_with(&universal, schema, opts.stabilizer)?;
    for (i, c) in rics.iter().enumerate() {
        program.extend(compile_ric(c, opts.ric, schema, i + 1)?);
    }
    let mut program = add_persistence(program, schema, opts.mode);
    program.extend(ics.definitions.iter().cloned());
    program.extend(compile_strong_constraints(&ics.denials)?.into_rules());
    program.extend(ics.weak.iter().cloned());
    program.check_safety()?;
    Ok(program)
}

pub(crate) fn build_change_program_with(
    ics: &[crate::model::constraint::Constraint],
    schema: &Schema,
    policy: StabilizerPolicy,
) -> Result<Program> {
    change::build(ics, schema, policy)
}

/// Headless rules appended verbatim; answer sets satisfying a body are
/// discarded by the solver.
pub fn compile_strong_constraints(denials: &[Rule]) -> Result<Program> {
    let mut p = Program::new();
    for d in denials {
        if !d.head.is_empty() {
            return Err(Error::Unsupported(format!("denial `{d}` has a head")));
        }
        let mut d = d.clone();
        d.kind = crate::model::rule::RuleKind::StrongConstraint;
        p.push(d);
    }
    Ok(p)
}

/// Sort of each variable at its first occurrence in a database atom.
pub(crate) fn variable_sorts<'a>(
    atoms: impl IntoIterator<Item = &'a Atom>,
    schema: &Schema,
) -> BTreeMap<String, Option<String>> {
    let mut out = BTreeMap::new();
    for a in atoms {
        for (i, t) in a.terms.iter().enumerate() {
            if let Term::Var(v) = t {
                let sort = if a.is_database() {
                    schema.sort_of(&a.predicate, i).map(str::to_string)
                } else {
                    None
                };
                match out.get(v) {
                    None | Some(None) => {
                        out.insert(v.clone(), sort);
                    }
                    Some(Some(_)) => {}
                }
            }
        }
    }
    out
}

/// Prepends `dom` guards for the variables of `head` and `body` that no
/// binding body literal covers.
pub(crate) fn guarded(
    head: Vec<Literal>,
    body: Vec<BodyLiteral>,
    sorts: &BTreeMap<String, Option<String>>,
    kind: crate::model::rule::RuleKind,
) -> Rule {
    let rule = Rule::new(head, body, kind);
    let mut guards: Vec<BodyLiteral> = rule
        .unbound_variables()
        .into_iter()
        .map(|v| {
            let sort = sorts.get(&v).cloned().flatten();
            BodyLiteral::pos(Literal::pos(Atom::dom(sort.as_deref(), Term::Var(v))))
        })
        .collect();
    guards.extend(rule.body);
    Rule::new(rule.head, guards, rule.kind)
}
