//! Reference implementations by exhaustive enumeration: repairs straight
//! from their definition, and answer sets by checking every candidate set
//! against the reduct. Both are exponential and refuse large inputs.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::grounder::{FiniteDomain, GroundProgram};
use crate::model::atom::{Atom, BodyLiteral, Literal};
use crate::model::constraint::Constraint;
use crate::model::instance::{DatabaseInstance, Repair};
use crate::model::interp::AnswerSet;
use crate::model::rule::RuleKind;
use crate::model::term::{Term, Value};
use crate::parser::{parse_problem, ConstraintSet};

/// Largest candidate universe accepted by [`enumerate_repairs_bruteforce`].
pub const MAX_REPAIR_ATOMS: usize = 22;
/// Largest literal universe accepted by [`enumerate_answer_sets_naive`].
pub const MAX_NAIVE_LITERALS: usize = 24;
/// Largest literal universe searched for contradictory candidates.
pub const MAX_CONTRADICTION_LITERALS: usize = 16;

/// How the symmetric differences of consistent instances are compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    SetInclusion,
    Cardinality,
}

/// Constants of the instance and the constraints, placed by attribute sort
/// as in the grounder, joined with an optional declared domain.
pub fn oracle_domain(r: &DatabaseInstance, ics: &[Constraint], declared: Option<&FiniteDomain>) -> FiniteDomain {
    let mut dom = FiniteDomain::default();
    for s in r.schema.sorts() {
        dom.declare_sort(&s);
    }
    let mut place = |a: &Atom| {
        for (i, t) in a.terms.iter().enumerate() {
            if let Term::Const(v) = t {
                match (a.is_database(), r.schema.sort_of(&a.predicate, i)) {
                    (true, Some(s)) => dom.add_sorted(s, v.clone()),
                    _ => dom.add(v.clone()),
                }
            }
        }
    };
    for f in r.facts() {
        place(f);
    }
    for c in ics {
        for a in c
            .positives
            .iter()
            .chain(&c.negatives)
            .chain(c.existential.iter().map(|t| &t.atom))
        {
            place(a);
        }
        for conj in &c.builtin.alternatives {
            for l in conj {
                place(&l.atom);
            }
        }
    }
    if let Some(d) = declared {
        dom.union(d);
    }
    dom
}

/// Ground database atoms a repair may contain: every tuple over the domain
/// for each relation, the atoms of `r`, and `null`-padded tuples for the
/// referenced side of each referential constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateUniverse {
    pub atoms: Vec<Atom>,
    index: HashMap<Atom, usize>,
    pub domain: FiniteDomain,
}

impl CandidateUniverse {
    pub fn new(r: &DatabaseInstance, ics: &[Constraint], domain: FiniteDomain) -> Self {
        let mut atoms: BTreeSet<Atom> = r.facts().clone();
        for (name, rel) in r.schema.relations() {
            let columns: Vec<Vec<Term>> = (0..rel.arity)
                .map(|i| {
                    domain
                        .of_sort(r.schema.sort_of(name, i))
                        .into_iter()
                        .map(Term::Const)
                        .collect()
                })
                .collect();
            for terms in product(&columns) {
                atoms.insert(Atom::database(name, terms));
            }
        }
        for c in ics {
            let Some(tail) = &c.existential else { continue };
            let sorts = variable_sorts(c, &r.schema);
            let shared: Vec<String> = tail
                .atom
                .variables()
                .filter(|v| !tail.existential.iter().any(|e| e == v))
                .map(String::from)
                .collect();
            for binding in assignments(&shared, &sorts, &domain) {
                let terms = tail
                    .atom
                    .terms
                    .iter()
                    .map(|t| match t {
                        Term::Var(v) if tail.existential.contains(v) => Term::Null,
                        t => t.substitute(&binding),
                    })
                    .collect();
                atoms.insert(Atom::database(&tail.atom.predicate, terms));
            }
        }
        let atoms: Vec<Atom> = atoms.into_iter().collect();
        let index = atoms.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
        CandidateUniverse { atoms, index, domain }
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    fn mask_of<'a>(&self, atoms: impl IntoIterator<Item = &'a Atom>) -> u64 {
        atoms
            .into_iter()
            .filter_map(|a| self.index.get(a))
            .fold(0, |m, &i| m | (1 << i))
    }
}

fn product(columns: &[Vec<Term>]) -> Vec<Vec<Term>> {
    columns.iter().fold(vec![vec![]], |acc, col| {
        acc.iter()
            .flat_map(|prefix| {
                col.iter().map(move |t| {
                    let mut p = prefix.clone();
                    p.push(t.clone());
                    p
                })
            })
            .collect()
    })
}

/// Sort of each database variable of `c`, from its first sorted position.
fn variable_sorts(c: &Constraint, schema: &crate::model::instance::Schema) -> BTreeMap<String, Option<String>> {
    let mut out: BTreeMap<String, Option<String>> = BTreeMap::new();
    for a in c
        .negatives
        .iter()
        .chain(&c.positives)
        .chain(c.existential.iter().map(|t| &t.atom))
    {
        for (i, t) in a.terms.iter().enumerate() {
            if let Term::Var(v) = t {
                let s = schema.sort_of(&a.predicate, i).map(str::to_string);
                let e = out.entry(v.clone()).or_insert(None);
                if e.is_none() {
                    *e = s;
                }
            }
        }
    }
    out
}

fn assignments(
    vars: &[String],
    sorts: &BTreeMap<String, Option<String>>,
    dom: &FiniteDomain,
) -> Vec<BTreeMap<String, Term>> {
    let columns: Vec<Vec<Term>> = vars
        .iter()
        .map(|v| {
            let sort = sorts.get(v).and_then(|s| s.as_deref());
            dom.of_sort(sort).into_iter().map(Term::Const).collect()
        })
        .collect();
    product(&columns)
        .into_iter()
        .map(|vals| vars.iter().cloned().zip(vals).collect())
        .collect()
}

fn builtin_literal_holds(l: &Literal) -> bool {
    l.atom.eval_builtin().is_some_and(|v| v != l.negated)
}

/// A ground constraint instance, violated by `s` when `s` holds every atom
/// of `neg` and none of `pos`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Clause {
    pos: u64,
    neg: u64,
}

impl Clause {
    fn violated(self, s: u64) -> bool {
        s & self.neg == self.neg && s & self.pos == 0
    }
}

fn ground_clauses(ics: &[Constraint], u: &CandidateUniverse, schema: &crate::model::instance::Schema) -> Vec<Clause> {
    let mut out = Vec::new();
    for c in ics {
        let sorts = variable_sorts(c, schema);
        match &c.existential {
            None => {
                let vars: Vec<String> = c.database_variables().into_iter().collect();
                for b in assignments(&vars, &sorts, &u.domain) {
                    let phi = c.builtin.substitute(&b);
                    if phi
                        .alternatives
                        .iter()
                        .any(|conj| conj.iter().all(builtin_literal_holds))
                    {
                        continue;
                    }
                    let negs: Vec<Atom> = c.negatives.iter().map(|a| a.substitute(&b)).collect();
                    if negs.iter().any(|a| !u.index.contains_key(a)) {
                        continue;
                    }
                    let pos: Vec<Atom> = c.positives.iter().map(|a| a.substitute(&b)).collect();
                    out.push(Clause {
                        pos: u.mask_of(&pos),
                        neg: u.mask_of(&negs),
                    });
                }
            }
            Some(tail) => {
                let ante = &c.negatives[0];
                let vars: Vec<String> = ante
                    .variables()
                    .map(String::from)
                    .collect::<BTreeSet<_>>()
                    .into_iter()
                    .collect();
                for b in assignments(&vars, &sorts, &u.domain) {
                    let p = ante.substitute(&b);
                    let Some(&pi) = u.index.get(&p) else { continue };
                    let pattern = tail.atom.substitute(&b);
                    let witnesses = u.atoms.iter().filter(|a| matches_pattern(a, &pattern));
                    out.push(Clause {
                        pos: u.mask_of(witnesses),
                        neg: 1 << pi,
                    });
                }
            }
        }
    }
    out
}

/// Whether `a` instantiates `pattern`, whose remaining variables match any
/// value or `null`, consistently across repeated occurrences.
fn matches_pattern(a: &Atom, pattern: &Atom) -> bool {
    if a.predicate != pattern.predicate || a.arity() != pattern.arity() {
        return false;
    }
    let mut seen: BTreeMap<&str, &Term> = BTreeMap::new();
    a.terms.iter().zip(&pattern.terms).all(|(t, p)| match p {
        Term::Var(v) => *seen.entry(v.as_str()).or_insert(t) == t,
        p => p == t,
    })
}

/// Whether `r` satisfies `ics` when variables range over `dom`. Tuples with
/// `null` in existential positions witness referential constraints.
pub fn satisfies(r: &DatabaseInstance, ics: &[Constraint], dom: &FiniteDomain) -> Result<bool> {
    let mut dom = dom.clone();
    dom.union(&oracle_domain(r, ics, None));
    let u = CandidateUniverse::new(r, ics, dom);
    if u.len() > 64 {
        return Err(Error::ResourceLimit(format!("{} candidate atoms exceed 64", u.len())));
    }
    let s = u.mask_of(r.facts());
    Ok(!ground_clauses(ics, &u, &r.schema).iter().any(|c| c.violated(s)))
}

/// Repairs of `r` by definition: every subset of the candidate universe
/// that satisfies `ics`, kept when its difference from `r` is minimal under
/// `metric`. Only universal and referential constraints are supported.
pub fn enumerate_repairs_bruteforce(
    r: &DatabaseInstance,
    ics: &ConstraintSet,
    dom: Option<&FiniteDomain>,
    metric: Metric,
) -> Result<Vec<Repair>> {
    enumerate_repairs_bounded(r, ics, dom, metric, MAX_REPAIR_ATOMS)
}

pub fn enumerate_repairs_bounded(
    r: &DatabaseInstance,
    ics: &ConstraintSet,
    dom: Option<&FiniteDomain>,
    metric: Metric,
    bound: usize,
) -> Result<Vec<Repair>> {
    if !ics.denials.is_empty() || !ics.weak.is_empty() || !ics.definitions.is_empty() {
        return Err(Error::Unsupported(
            "the oracle only handles integrity constraints".into(),
        ));
    }
    let domain = oracle_domain(r, &ics.constraints, dom);
    let u = CandidateUniverse::new(r, &ics.constraints, domain);
    let n = u.len();
    if n > bound.min(63) {
        return Err(Error::ResourceLimit(format!(
            "{n} candidate atoms exceed the bound of {bound}"
        )));
    }
    let clauses = ground_clauses(&ics.constraints, &u, &r.schema);
    let base = u.mask_of(r.facts());
    let consistent = |s: u64| !clauses.iter().any(|c| c.violated(s));
    // differences by increasing size: a consistent difference is minimal
    // iff it contains no smaller minimal one
    let mut minimal: Vec<u64> = Vec::new();
    for k in 0..=n {
        if metric == Metric::Cardinality && !minimal.is_empty() {
            break;
        }
        for d in masks_of_size(n, k) {
            if minimal.iter().any(|&m| m & !d == 0) {
                continue;
            }
            if consistent(base ^ d) {
                minimal.push(d);
            }
        }
    }
    if ics.constraints.iter().any(Constraint::is_referential) {
        let inserted = |d: u64| (0..n).filter(move |&i| d & (1 << i) != 0 && base & (1 << i) == 0);
        // a witness padded with null is preferred to any concrete witness
        let below = |d2: u64, d1: u64| {
            (0..n)
                .filter(|&i| d2 & (1 << i) != 0)
                .all(|i| d1 & (1 << i) != 0 || inserted(d1).any(|j| generalizes(&u.atoms[i], &u.atoms[j])))
        };
        let all = minimal.clone();
        minimal.retain(|&d1| !all.iter().any(|&d2| d2 != d1 && below(d2, d1)));
    }
    let mut out = Vec::new();
    for d in minimal {
        let s = base ^ d;
        let facts = (0..n).filter(|i| s & (1 << i) != 0).map(|i| u.atoms[i].clone());
        out.push(Repair::new(r, r.with_facts(facts)?)?);
    }
    out.sort_by(|a, b| a.instance.facts().cmp(b.instance.facts()));
    Ok(out)
}

/// Every subset of the candidate universe that satisfies `ics`.
pub fn consistent_instances(
    r: &DatabaseInstance,
    ics: &[Constraint],
    dom: Option<&FiniteDomain>,
    bound: usize,
) -> Result<Vec<DatabaseInstance>> {
    let domain = oracle_domain(r, ics, dom);
    let u = CandidateUniverse::new(r, ics, domain);
    let n = u.len();
    if n > bound.min(30) {
        return Err(Error::ResourceLimit(format!(
            "{n} candidate atoms exceed the bound of {bound}"
        )));
    }
    let clauses = ground_clauses(ics, &u, &r.schema);
    let mut out = Vec::new();
    for s in 0..(1u64 << n) {
        if !clauses.iter().any(|c| c.violated(s)) {
            let facts = (0..n).filter(|i| s & (1 << i) != 0).map(|i| u.atoms[i].clone());
            out.push(r.with_facts(facts)?);
        }
    }
    Ok(out)
}

/// `x` is `y` with some positions replaced by `null`.
fn generalizes(x: &Atom, y: &Atom) -> bool {
    x.predicate == y.predicate
        && x.arity() == y.arity()
        && x.terms.contains(&Term::Null)
        && x.terms.iter().zip(&y.terms).all(|(a, b)| a == b || *a == Term::Null)
}

/// All `n`-bit masks with exactly `k` bits set, in increasing order.
fn masks_of_size(n: usize, k: usize) -> impl Iterator<Item = u64> {
    let limit = 1u64 << n;
    let first = if k == 0 { 0 } else { (1u64 << k) - 1 };
    let mut next = Some(first).filter(|&m| m < limit || (k == 0 && n == 0));
    std::iter::from_fn(move || {
        let m = next?;
        next = if m == 0 {
            None
        } else {
            let c = m & m.wrapping_neg();
            let r = m + c;
            let m2 = (((r ^ m) >> 2) / c) | r;
            (m2 < limit).then_some(m2)
        };
        Some(m)
    })
}

struct NRule {
    head: Vec<usize>,
    pos: Vec<usize>,
    neg: Vec<usize>,
}

/// Literals and rules over indices, with complements paired up.
struct NaiveProgram {
    lits: Vec<Literal>,
    comp: Vec<usize>,
    rules: Vec<NRule>,
}

impl NaiveProgram {
    fn new(g: &GroundProgram, e_mode: bool) -> Self {
        let mut universe = g.universe.clone();
        for r in &g.rules {
            for l in r.head.iter().chain(r.body.iter().map(|b| &b.literal)) {
                universe.insert(l.clone());
                universe.insert(l.complement());
            }
        }
        let lits: Vec<Literal> = universe.into_iter().collect();
        let index: HashMap<&Literal, usize> = lits.iter().enumerate().map(|(i, l)| (l, i)).collect();
        let comp = lits.iter().map(|l| index[&l.complement()]).collect();
        let rules = g
            .rules
            .iter()
            .filter(|r| r.kind != RuleKind::WeakConstraint)
            .map(|r| {
                let mut body: Vec<BodyLiteral> = r.body.clone();
                // a default yields to an exception deriving its complement
                if e_mode && r.kind == RuleKind::PersistenceDefault {
                    body.extend(r.head.iter().map(|h| BodyLiteral::not(h.complement())));
                }
                NRule {
                    head: r.head.iter().map(|l| index[l]).collect(),
                    pos: body
                        .iter()
                        .filter(|b| !b.weakly_negated)
                        .map(|b| index[&b.literal])
                        .collect(),
                    neg: body
                        .iter()
                        .filter(|b| b.weakly_negated)
                        .map(|b| index[&b.literal])
                        .collect(),
                }
            })
            .collect();
        NaiveProgram { lits, comp, rules }
    }

    /// Rules of the reduct: those whose `not` literals are all outside `s`,
    /// stripped of them.
    fn reduct(&self, s: &[bool]) -> Vec<&NRule> {
        self.rules.iter().filter(|r| r.neg.iter().all(|&n| !s[n])).collect()
    }

    fn is_model(reduct: &[&NRule], s: &[bool]) -> bool {
        reduct
            .iter()
            .all(|r| !r.pos.iter().all(|&p| s[p]) || r.head.iter().any(|&h| s[h]))
    }

    /// `s` is a model of its reduct and no proper subset is.
    fn is_answer_set(&self, s: &[bool]) -> bool {
        let reduct = self.reduct(s);
        if !Self::is_model(&reduct, s) {
            return false;
        }
        let members: Vec<usize> = (0..s.len()).filter(|&i| s[i]).collect();
        let m = members.len();
        for sub in 0..(1u64 << m) - 1 {
            let mut t = vec![false; s.len()];
            for (j, &i) in members.iter().enumerate() {
                t[i] = sub & (1 << j) != 0;
            }
            if Self::is_model(&reduct, &t) {
                return false;
            }
        }
        true
    }

    fn to_set(&self, s: &[bool]) -> BTreeSet<Literal> {
        (0..s.len()).filter(|&i| s[i]).map(|i| self.lits[i].clone()).collect()
    }
}

/// Answer sets by exhaustive search: every consistent subset of the literal
/// universe is tested for being a minimal model of its reduct. With
/// `e_mode`, persistence defaults are blocked by the complement of their
/// head. Strong constraints take part as headless rules; weak constraints
/// are ignored.
pub fn enumerate_answer_sets_naive(g: &GroundProgram, e_mode: bool) -> Result<Vec<AnswerSet>> {
    enumerate_answer_sets_bounded(g, e_mode, MAX_NAIVE_LITERALS)
}

pub fn enumerate_answer_sets_bounded(g: &GroundProgram, e_mode: bool, bound: usize) -> Result<Vec<AnswerSet>> {
    let p = NaiveProgram::new(g, e_mode);
    let n = p.lits.len();
    if n > bound.min(62) {
        return Err(Error::ResourceLimit(format!(
            "{n} literals exceed the bound of {bound}"
        )));
    }
    // one slot per complementary pair: absent, positive or negated
    let pairs: Vec<(usize, usize)> = (0..n).filter(|&i| !p.lits[i].negated).map(|i| (i, p.comp[i])).collect();
    let mut out = Vec::new();
    let total = 3u64.pow(pairs.len() as u32);
    for code in 0..total {
        let mut s = vec![false; n];
        let mut c = code;
        for &(pos, neg) in &pairs {
            match c % 3 {
                1 => s[pos] = true,
                2 => s[neg] = true,
                _ => {}
            }
            c /= 3;
        }
        if p.is_answer_set(&s) {
            out.push(AnswerSet::new(p.to_set(&s))?);
        }
    }
    out.sort();
    Ok(out)
}

/// Whether some set containing a complementary pair is a minimal model of
/// its reduct once strong constraints are dropped, which makes the program
/// contradictory when it has no consistent answer set.
pub fn has_contradictory_candidate(g: &GroundProgram, e_mode: bool) -> Result<bool> {
    let mut p = NaiveProgram::new(g, e_mode);
    p.rules.retain(|r| !r.head.is_empty());
    let n = p.lits.len();
    if n > MAX_CONTRADICTION_LITERALS {
        return Err(Error::ResourceLimit(format!(
            "{n} literals exceed the bound of {MAX_CONTRADICTION_LITERALS}"
        )));
    }
    for code in 0..(1u64 << n) {
        let s: Vec<bool> = (0..n).map(|i| code & (1 << i) != 0).collect();
        let contradictory = (0..n).any(|i| s[i] && s[p.comp[i]]);
        if contradictory && p.is_answer_set(&s) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// What a correct solver reports for a ground program.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NaiveOutcome {
    AnswerSets(Vec<AnswerSet>),
    /// No consistent answer set exists even without strong constraints,
    /// but a contradictory candidate does.
    Contradictory,
}

/// Expected solver result: the consistent answer sets, unless there are
/// none with or without strong constraints and some contradictory set is
/// a minimal model of its reduct.
pub fn naive_outcome(g: &GroundProgram, e_mode: bool) -> Result<NaiveOutcome> {
    let sets = enumerate_answer_sets_naive(g, e_mode)?;
    if !sets.is_empty() {
        return Ok(NaiveOutcome::AnswerSets(sets));
    }
    let mut relaxed = g.clone();
    relaxed.rules.retain(|r| !r.kind.is_headless() && !r.head.is_empty());
    if !enumerate_answer_sets_naive(&relaxed, e_mode)?.is_empty() {
        return Ok(NaiveOutcome::AnswerSets(Vec::new()));
    }
    if has_contradictory_candidate(g, e_mode)? {
        Ok(NaiveOutcome::Contradictory)
    } else {
        Ok(NaiveOutcome::AnswerSets(Vec::new()))
    }
}

/// Whether every rule of `g` whose body holds in `s` has a head literal in
/// `s`; headless rules must have a false body.
pub fn is_model(g: &GroundProgram, s: &BTreeSet<Literal>) -> bool {
    g.rules.iter().filter(|r| r.kind != RuleKind::WeakConstraint).all(|r| {
        let body = r.body.iter().all(|b| s.contains(&b.literal) != b.weakly_negated);
        !body || r.head.iter().any(|h| s.contains(h))
    })
}

/// Largest literal set describing the move from `r` to `r2` in a ground
/// change program: the facts of `g`, the primed tuples of `r2`, and the
/// negated primed tuples of every other database atom of `g`.
pub fn change_encoding(g: &GroundProgram, r2: &DatabaseInstance) -> BTreeSet<Literal> {
    let mut s: BTreeSet<Literal> = g
        .rules
        .iter()
        .filter(|r| r.body.is_empty() && r.head.len() == 1)
        .map(|r| r.head[0].clone())
        .collect();
    for l in &g.universe {
        if l.atom.primed && l.atom.is_database() && !l.negated {
            let held = r2.contains(&l.atom.unprimed());
            s.insert(if held { l.clone() } else { l.complement() });
        }
    }
    for f in r2.facts() {
        s.insert(Literal::pos(f.primed()));
    }
    s
}

/// Shape of a randomized corpus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorpusShape {
    pub max_predicates: usize,
    pub max_constants: usize,
    pub max_constraints: usize,
    pub fact_probability: f64,
}

impl Default for CorpusShape {
    fn default() -> Self {
        CorpusShape {
            max_predicates: 3,
            max_constants: 3,
            max_constraints: 3,
            fact_probability: 0.4,
        }
    }
}

/// Kinds of binary or unary constraints drawn by the generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BicKind {
    FunctionalDependency,
    Inclusion,
    Range,
    Exclusion,
    Insertion,
}

/// Random instance with constraints drawn from `kinds`, as the text of a
/// facts file and a constraint file. The candidate universe never exceeds
/// [`MAX_REPAIR_ATOMS`].
pub fn random_problem_text<R: Rng>(rng: &mut R, shape: CorpusShape, kinds: &[BicKind]) -> (String, String) {
    const NAMES: [&str; 3] = ["p", "q", "r"];
    const CONSTANTS: [&str; 3] = ["a", "b", "c"];
    let k = rng.gen_range(2..=shape.max_constants.clamp(2, 3));
    let consts = &CONSTANTS[..k];
    let npred = rng.gen_range(1..=shape.max_predicates.clamp(1, 3));
    let mut arities: Vec<usize> = (0..npred).map(|_| rng.gen_range(1..=2)).collect();
    let size = |ar: &[usize]| ar.iter().map(|&a| k.pow(a as u32)).sum::<usize>();
    while size(&arities) > MAX_REPAIR_ATOMS {
        if let Some(a) = arities.iter_mut().rev().find(|a| **a == 2) {
            *a = 1;
        }
    }
    let mut facts = String::new();
    for (i, &ar) in arities.iter().enumerate() {
        facts.push_str(&format!("#schema {}:{}.\n", NAMES[i], ar));
        let tuples: Vec<Vec<&str>> = if ar == 1 {
            consts.iter().map(|c| vec![*c]).collect()
        } else {
            consts
                .iter()
                .flat_map(|x| consts.iter().map(move |y| vec![*x, *y]))
                .collect()
        };
        for t in tuples {
            if rng.gen_bool(shape.fact_probability) {
                facts.push_str(&format!("{}({}).\n", NAMES[i], t.join(",")));
            }
        }
    }
    let atom = |i: usize, vars: &[&str]| -> String {
        let ar = arities[i];
        let args: Vec<&str> = (0..ar).map(|j| vars[j.min(vars.len() - 1)]).collect();
        format!("{}({})", NAMES[i], args.join(","))
    };
    let mut ics = String::new();
    let n = rng.gen_range(1..=shape.max_constraints.max(1));
    for _ in 0..n {
        let kind = *kinds.choose(rng).expect("at least one constraint kind");
        let i = rng.gen_range(0..npred);
        let j = rng.gen_range(0..npred);
        let c = consts.choose(rng).expect("constants");
        let line = match kind {
            BicKind::FunctionalDependency => match arities.iter().position(|&a| a == 2) {
                Some(b) => format!("{}, {} -> Y = Z.", atom(b, &["X", "Y"]), atom(b, &["X", "Z"])),
                None => format!("{} -> X = {c}.", atom(i, &["X"])),
            },
            BicKind::Inclusion if i != j => format!("{} -> {}.", atom(i, &["X", "Y"]), atom(j, &["X", "X"])),
            BicKind::Inclusion => format!("{} -> {}.", atom(i, &["X", "Y"]), atom(i, &["Y", "X"])),
            BicKind::Range => {
                let last = if arities[i] == 2 { "Y" } else { "X" };
                format!("{} -> {last} != {c}.", atom(i, &["X", "Y"]))
            }
            BicKind::Exclusion => format!("-{} v -{}.", atom(i, &["X", "Y"]), atom(j, &["X", "Y"])),
            BicKind::Insertion => {
                let args: Vec<&str> = vec![c; arities[i]];
                format!("{}({}).", NAMES[i], args.join(","))
            }
        };
        ics.push_str(&line);
        ics.push('\n');
    }
    (facts, ics)
}

/// Parses the output of [`random_problem_text`].
pub fn random_problem<R: Rng>(
    rng: &mut R,
    shape: CorpusShape,
    kinds: &[BicKind],
) -> Result<(DatabaseInstance, ConstraintSet, String, String)> {
    let (facts, ics) = random_problem_text(rng, shape, kinds);
    let (r, set) = parse_problem(&facts, &ics)?;
    Ok((r, set, facts, ics))
}

/// Random propositional program over at most five atoms, as text. Rules
/// have up to two head literals and up to three body literals; some are
/// headless.
pub fn random_program_text<R: Rng>(rng: &mut R, atoms: usize) -> String {
    const NAMES: [&str; 5] = ["a", "b", "c", "d", "e"];
    let names = &NAMES[..atoms.clamp(1, 5)];
    let lit = |rng: &mut R| -> String {
        let name = names.choose(rng).expect("atoms");
        if rng.gen_bool(0.2) {
            format!("-{name}")
        } else {
            name.to_string()
        }
    };
    let mut out = String::new();
    for _ in 0..rng.gen_range(1..=7) {
        let heads = match rng.gen_range(0..10) {
            0 => 0,
            1..=6 => 1,
            _ => 2,
        };
        let head: Vec<String> = (0..heads).map(|_| lit(rng)).collect();
        let nbody = rng.gen_range(if heads == 0 { 1 } else { 0 }..=3);
        let body: Vec<String> = (0..nbody)
            .map(|_| {
                let l = lit(rng);
                if rng.gen_bool(0.5) {
                    format!("not {l}")
                } else {
                    l
                }
            })
            .collect();
        let mut rule = head.join(" v ");
        if !body.is_empty() {
            if !rule.is_empty() {
                rule.push(' ');
            }
            rule.push_str(":- ");
            rule.push_str(&body.join(", "));
        }
        rule.push_str(".\n");
        out.push_str(&rule);
    }
    out
}

/// Parses and grounds the output of [`random_program_text`].
pub fn random_ground_program<R: Rng>(rng: &mut R, atoms: usize) -> Result<(GroundProgram, String)> {
    let text = random_program_text(rng, atoms);
    let p = crate::parser::parse_program(&text, &crate::model::instance::Schema::new())?;
    Ok((GroundProgram::from_rules(p.into_rules())?, text))
}

/// Sorted values of `dom`, for display.
pub fn domain_values(dom: &FiniteDomain) -> Vec<Value> {
    dom.all().into_iter().collect()
}
