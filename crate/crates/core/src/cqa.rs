//! Repairs, consistent answers and K-query evaluation.

use std::collections::{BTreeMap, BTreeSet};

use crate::compiler::{compile_query_program, compile_repair_program, CompileOptions, RepairMode};
use crate::error::{Error, Result};
use crate::grounder::{active_domain, ground_with, DomainDeclaration, GroundOptions, GroundProgram};
use crate::model::atom::{AtomKind, Literal, QUERY};
use crate::model::instance::{DatabaseInstance, Repair};
use crate::model::interp::AnswerSet;
use crate::model::query::{Formula, KQuery};
use crate::model::rule::Program;
use crate::model::term::{Term, Value};
use crate::parser::ConstraintSet;
use crate::solver::{self, SolveOptions, DEFAULT_MAX_BRANCHES};
use crate::wfs;

/// Settings shared by the repair and query pipelines.
#[derive(Debug, Clone, PartialEq)]
pub struct CqaOptions {
    pub compile: CompileOptions,
    pub domain: DomainDeclaration,
    pub ground: GroundOptions,
    pub max_branches: u64,
}

impl Default for CqaOptions {
    fn default() -> Self {
        CqaOptions {
            compile: CompileOptions::default(),
            domain: DomainDeclaration::Active,
            ground: GroundOptions::default(),
            max_branches: DEFAULT_MAX_BRANCHES,
        }
    }
}

impl CqaOptions {
    pub fn with_mode(mode: RepairMode) -> Self {
        let mut o = CqaOptions::default();
        o.compile.mode = mode;
        o
    }

    fn solve_options(&self) -> SolveOptions {
        SolveOptions {
            e_mode: self.compile.mode == RepairMode::RawDefaults,
            strong: false,
            max_branches: self.max_branches,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Ok,
    /// Strong constraints discarded every answer set.
    NoAdmissibleRepair,
}

/// Everything computed on the way from an instance to its repairs.
#[derive(Debug, Clone)]
pub struct RepairRun {
    pub program: Program,
    pub ground: GroundProgram,
    /// Answer sets before strong-constraint filtering.
    pub candidates: Vec<AnswerSet>,
    /// Answer sets that survive strong constraints and weak optimization.
    pub answer_sets: Vec<AnswerSet>,
    /// Distinct projected instances, in canonical order.
    pub repairs: Vec<Repair>,
}

impl RepairRun {
    pub fn status(&self) -> Status {
        if self.answer_sets.is_empty() {
            Status::NoAdmissibleRepair
        } else {
            Status::Ok
        }
    }
}

/// Instance encoded by an answer set. Under cardinality semantics the
/// primed relations are sparse, so tuples of `r` not explicitly deleted
/// are kept.
pub fn project_repair(s: &AnswerSet, r: &DatabaseInstance, mode: RepairMode) -> Result<Repair> {
    let mut out = DatabaseInstance::new(r.schema.clone());
    for l in s.iter() {
        if l.atom.primed && !l.negated && l.atom.kind == AtomKind::Database {
            out.insert(l.atom.unprimed())?;
        }
    }
    if mode == RepairMode::Dalal {
        for f in r.facts() {
            if !s.contains(&Literal::neg(f.primed())) {
                out.insert(f.clone())?;
            }
        }
    }
    Repair::new(r, out)
}

fn solve(
    program: Program,
    r: &DatabaseInstance,
    opts: &CqaOptions,
) -> Result<(GroundProgram, Vec<AnswerSet>, Vec<AnswerSet>)> {
    let g = ground_with(&program, &opts.domain, r, opts.ground)?;
    let candidates = solver::answer_sets(&g, &opts.solve_options())?;
    let kept = solver::filter_strong(candidates.clone(), &solver::strong_constraints(&g));
    let kept = solver::optimize_weak(kept, &solver::weak_constraints(&g));
    Ok((g, candidates, kept))
}

/// Compiles, grounds and solves the repair program, then projects each
/// answer set to an instance.
pub fn repair_run(r: &DatabaseInstance, ics: &ConstraintSet, opts: &CqaOptions) -> Result<RepairRun> {
    let program = compile_repair_program(ics, &r.schema, &opts.compile)?;
    let (ground, candidates, answer_sets) = solve(program.clone(), r, opts)?;
    let mut by_instance = BTreeMap::new();
    for s in &answer_sets {
        let rep = project_repair(s, r, opts.compile.mode)?;
        by_instance.entry(rep.instance.facts().clone()).or_insert(rep);
    }
    Ok(RepairRun {
        program,
        ground,
        candidates,
        answer_sets,
        repairs: by_instance.into_values().collect(),
    })
}

/// Distinct repairs of `r`.
pub fn repairs_of(r: &DatabaseInstance, ics: &ConstraintSet, opts: &CqaOptions) -> Result<Vec<Repair>> {
    Ok(repair_run(r, ics, opts)?.repairs)
}

/// Answers of a query together with how they were obtained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CqaResult {
    pub variables: Vec<String>,
    pub answers: BTreeSet<Vec<Value>>,
    /// False when the answers are only a lower bound.
    pub certified_exact: bool,
    pub repairs_count: usize,
    pub status: Status,
}

impl CqaResult {
    /// For a closed query: whether it holds in every repair.
    pub fn is_true(&self) -> bool {
        self.answers.contains(&Vec::new())
    }
}

fn query_extension(s: &AnswerSet, arity: usize) -> BTreeSet<Vec<Value>> {
    s.atoms_of(QUERY)
        .filter(|a| a.kind == AtomKind::Auxiliary && !a.primed && a.arity() == arity)
        .map(|a| {
            a.terms
                .iter()
                .map(|t| t.as_const().cloned().expect("ground query atom"))
                .collect()
        })
        .collect()
}

fn full_program(
    q: &Formula,
    r: &DatabaseInstance,
    ics: &ConstraintSet,
    opts: &CqaOptions,
) -> Result<(Program, Vec<String>)> {
    let mut program = compile_repair_program(ics, &r.schema, &opts.compile)?;
    let query_mode = match opts.compile.mode {
        RepairMode::Dalal => RepairMode::Dalal,
        _ => RepairMode::Winslett,
    };
    let qp = compile_query_program(q, query_mode, &r.schema)?;
    program.extend(qp.program.into_rules());
    Ok((program, qp.answer_variables))
}

/// Ground program of the repair rules joined with the query rules, and
/// the answer variables of the query.
pub fn query_ground_program(
    q: &Formula,
    r: &DatabaseInstance,
    ics: &ConstraintSet,
    opts: &CqaOptions,
) -> Result<(GroundProgram, Vec<String>)> {
    let (program, variables) = full_program(q, r, ics, opts)?;
    Ok((ground_with(&program, &opts.domain, r, opts.ground)?, variables))
}

/// Tuples in the query extension of every answer set of the repair program
/// extended with the query program.
pub fn consistent_answers(
    q: &Formula,
    r: &DatabaseInstance,
    ics: &ConstraintSet,
    opts: &CqaOptions,
) -> Result<CqaResult> {
    let (program, variables) = full_program(q, r, ics, opts)?;
    let (_, _, sets) = solve(program, r, opts)?;
    let arity = variables.len();
    let mut repairs = BTreeSet::new();
    for s in &sets {
        repairs.insert(project_repair(s, r, opts.compile.mode)?.instance.facts().clone());
    }
    let (answers, status) = match sets.split_first() {
        None => (BTreeSet::new(), Status::NoAdmissibleRepair),
        Some((first, rest)) => {
            let mut acc = query_extension(first, arity);
            for s in rest {
                let ext = query_extension(s, arity);
                acc.retain(|t| ext.contains(t));
            }
            (acc, Status::Ok)
        }
    };
    Ok(CqaResult {
        variables,
        answers,
        certified_exact: true,
        repairs_count: repairs.len(),
        status,
    })
}

/// Whether the well-founded answers are provably exact: only functional
/// dependencies and unary constraints, and a quantifier-free conjunctive
/// query.
pub fn wfs_is_exact(q: &Formula, ics: &ConstraintSet) -> bool {
    ics.denials.is_empty()
        && ics.weak.is_empty()
        && ics.definitions.is_empty()
        && ics
            .constraints
            .iter()
            .all(|c| c.is_functional_dependency() || c.is_unary())
        && q.is_quantifier_free_conjunction()
}

/// Query answers true in the well-founded interpretation of the repair
/// program with the query program. A lower bound on the consistent answers.
pub fn wfs_consistent_answers(
    q: &Formula,
    r: &DatabaseInstance,
    ics: &ConstraintSet,
    opts: &CqaOptions,
) -> Result<CqaResult> {
    let mut opts = opts.clone();
    opts.compile.mode = RepairMode::Winslett;
    let (g, variables) = query_ground_program(q, r, ics, &opts)?;
    let w = wfs::well_founded(&g)?;
    let lits = w.interpretation.true_set().iter().cloned();
    let s = AnswerSet::new(lits)?;
    Ok(CqaResult {
        answers: query_extension(&s, variables.len()),
        variables,
        certified_exact: wfs_is_exact(q, ics),
        repairs_count: 0,
        status: Status::Ok,
    })
}

type Bindings = BTreeSet<BTreeMap<String, Value>>;

struct KEval<'a> {
    r: &'a DatabaseInstance,
    ics: &'a ConstraintSet,
    opts: &'a CqaOptions,
    domain: Vec<Value>,
    status: Status,
    repairs_count: usize,
}

impl KEval<'_> {
    fn extend(&self, b: Bindings, vars: &[String]) -> Bindings {
        let mut out = b;
        for v in vars {
            out = out
                .into_iter()
                .flat_map(|m| {
                    if m.contains_key(v) {
                        return vec![m];
                    }
                    self.domain
                        .iter()
                        .map(|c| {
                            let mut m = m.clone();
                            m.insert(v.clone(), c.clone());
                            m
                        })
                        .collect()
                })
                .collect();
        }
        out
    }

    fn all(&self, vars: &[String]) -> Bindings {
        self.extend([BTreeMap::new()].into(), vars)
    }

    fn eval(&mut self, q: &KQuery) -> Result<Bindings> {
        match q {
            KQuery::K(f) => {
                let res = consistent_answers(f, self.r, self.ics, self.opts)?;
                if res.status == Status::NoAdmissibleRepair {
                    self.status = Status::NoAdmissibleRepair;
                }
                self.repairs_count = self.repairs_count.max(res.repairs_count);
                Ok(res
                    .answers
                    .into_iter()
                    .map(|t| res.variables.iter().cloned().zip(t).collect())
                    .collect())
            }
            KQuery::Not(a) => {
                let vars = a.free_variables();
                let inner = self.eval(a)?;
                Ok(self.all(&vars).into_iter().filter(|m| !inner.contains(m)).collect())
            }
            KQuery::And(a, b) => {
                let (left, right) = (self.eval(a)?, self.eval(b)?);
                let mut out = BTreeSet::new();
                for l in &left {
                    for r in &right {
                        if l.iter().all(|(k, v)| r.get(k).is_none_or(|x| x == v)) {
                            let mut m = l.clone();
                            m.extend(r.clone());
                            out.insert(m);
                        }
                    }
                }
                Ok(out)
            }
            KQuery::Or(a, b) => {
                let vars = q.free_variables();
                let (left, right) = (self.eval(a)?, self.eval(b)?);
                let mut out = self.extend(left, &vars);
                out.extend(self.extend(right, &vars));
                Ok(out)
            }
            KQuery::Exists(vs, a) => Ok(self
                .eval(a)?
                .into_iter()
                .map(|mut m| {
                    for v in vs {
                        m.remove(v);
                    }
                    m
                })
                .collect()),
        }
    }
}

/// Evaluates a combination of K-subqueries: each K-node is answered
/// consistently, and the outer connectives range over the active domain.
pub fn evaluate_k_query(q: &KQuery, r: &DatabaseInstance, ics: &ConstraintSet, opts: &CqaOptions) -> Result<CqaResult> {
    if let Some(f) = q.as_basic() {
        return consistent_answers(f, r, ics, opts);
    }
    let variables = q.free_variables();
    let restricted = q.range_restricted();
    if let Some(v) = variables.iter().find(|v| !restricted.contains(*v)) {
        return Err(Error::Unsafe(format!("query variable `{v}` is not range restricted")));
    }
    let mut domain = active_domain(r, &ics.constraints, Some(q));
    if let DomainDeclaration::Finite(d) = &opts.domain {
        domain.extend(d.all());
    }
    let mut ev = KEval {
        r,
        ics,
        opts,
        domain: domain.into_iter().collect(),
        status: Status::Ok,
        repairs_count: 0,
    };
    let bindings = ev.eval(q)?;
    let answers = bindings
        .into_iter()
        .map(|m| variables.iter().map(|v| m[v].clone()).collect())
        .collect();
    Ok(CqaResult {
        variables,
        answers,
        certified_exact: true,
        repairs_count: ev.repairs_count,
        status: ev.status,
    })
}

/// Evaluates a basic query directly on an instance, with variables ranging
/// over `domain`.
pub fn evaluate_on_instance(q: &Formula, r: &DatabaseInstance, domain: &BTreeSet<Value>) -> BTreeSet<Vec<Value>> {
    fn holds(f: &Formula, r: &DatabaseInstance, dom: &[Value], env: &mut BTreeMap<String, Term>) -> bool {
        match f {
            Formula::Atom(a) => {
                let g = a.substitute(env);
                if g.is_builtin() {
                    g.eval_builtin().unwrap_or(false)
                } else {
                    r.contains(&g)
                }
            }
            Formula::Not(a) => !holds(a, r, dom, env),
            Formula::And(a, b) => holds(a, r, dom, env) && holds(b, r, dom, env),
            Formula::Or(a, b) => holds(a, r, dom, env) || holds(b, r, dom, env),
            Formula::Exists(vs, a) => {
                fn go(
                    vs: &[String],
                    a: &Formula,
                    r: &DatabaseInstance,
                    dom: &[Value],
                    env: &mut BTreeMap<String, Term>,
                ) -> bool {
                    let Some((v, rest)) = vs.split_first() else {
                        return holds(a, r, dom, env);
                    };
                    let saved = env.get(v).cloned();
                    let found = dom.iter().any(|c| {
                        env.insert(v.clone(), Term::Const(c.clone()));
                        go(rest, a, r, dom, env)
                    });
                    match saved {
                        Some(t) => env.insert(v.clone(), t),
                        None => env.remove(v),
                    };
                    found
                }
                go(vs, a, r, dom, env)
            }
        }
    }
    let vars = q.free_variables();
    let dom: Vec<Value> = domain.iter().cloned().collect();
    let mut out = BTreeSet::new();
    let mut idx = vec![0usize; vars.len()];
    if !vars.is_empty() && dom.is_empty() {
        return out;
    }
    loop {
        let mut env: BTreeMap<String, Term> = vars
            .iter()
            .zip(&idx)
            .map(|(v, &i)| (v.clone(), Term::Const(dom[i].clone())))
            .collect();
        if holds(q, r, &dom, &mut env) {
            out.insert(idx.iter().map(|&i| dom[i].clone()).collect());
        }
        let mut k = 0;
        loop {
            if k == vars.len() {
                return out;
            }
            idx[k] += 1;
            if idx[k] < dom.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}
