//! Instantiation of programs over a finite domain.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::model::atom::{Atom, AtomKind, BodyLiteral, Literal, DOM};
use crate::model::constraint::Constraint;
use crate::model::instance::DatabaseInstance;
use crate::model::query::KQuery;
use crate::model::rule::{Program, Rule, RuleKind};
use crate::model::term::{Term, Value};

/// A finite set of constants, optionally split by sort. The untyped domain
/// `dom` is the union of all parts.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FiniteDomain {
    untyped: BTreeSet<Value>,
    sorted: BTreeMap<String, BTreeSet<Value>>,
}

impl FiniteDomain {
    pub fn from_values(values: impl IntoIterator<Item = Value>) -> Self {
        FiniteDomain {
            untyped: values.into_iter().collect(),
            sorted: BTreeMap::new(),
        }
    }

    pub fn add(&mut self, v: Value) {
        self.untyped.insert(v);
    }

    pub fn add_sorted(&mut self, sort: &str, v: Value) {
        self.sorted.entry(sort.to_string()).or_default().insert(v);
    }

    /// Declares `sort` without adding constants to it.
    pub fn declare_sort(&mut self, sort: &str) {
        self.sorted.entry(sort.to_string()).or_default();
    }

    pub fn all(&self) -> BTreeSet<Value> {
        let mut out = self.untyped.clone();
        for vs in self.sorted.values() {
            out.extend(vs.iter().cloned());
        }
        out
    }

    /// Constants of `sort`; an undeclared sort ranges over everything.
    pub fn of_sort(&self, sort: Option<&str>) -> BTreeSet<Value> {
        match sort.and_then(|s| self.sorted.get(s)) {
            Some(vs) => vs.clone(),
            None => self.all(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.untyped.is_empty() && self.sorted.values().all(BTreeSet::is_empty)
    }

    pub fn len(&self) -> usize {
        self.all().len()
    }

    pub fn union(&mut self, other: &FiniteDomain) {
        self.untyped.extend(other.untyped.iter().cloned());
        for (s, vs) in &other.sorted {
            self.sorted.entry(s.clone()).or_default().extend(vs.iter().cloned());
        }
    }
}

/// Domain over which variables range.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum DomainDeclaration {
    /// Constants of the instance and of the program.
    #[default]
    Active,
    /// An explicit domain; instance and program constants are added to it.
    Finite(FiniteDomain),
}

/// Constants of the instance, the constraints and the query. `null` is
/// never a domain element.
pub fn active_domain(r: &DatabaseInstance, ics: &[Constraint], q: Option<&KQuery>) -> BTreeSet<Value> {
    let mut out = r.constants();
    for c in ics {
        out.extend(c.constants().cloned());
    }
    if let Some(q) = q {
        out.extend(q.constants());
    }
    out
}

/// Sorted active domain: instance constants by attribute sort, plus
/// program constants.
fn sorted_active_domain(p: &Program, r: &DatabaseInstance) -> FiniteDomain {
    let mut dom = FiniteDomain::default();
    for s in r.schema.sorts() {
        dom.declare_sort(&s);
    }
    let place = |dom: &mut FiniteDomain, a: &Atom| {
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
        place(&mut dom, f);
    }
    for rule in p.rules() {
        for a in rule
            .head
            .iter()
            .map(|l| &l.atom)
            .chain(rule.body.iter().map(|b| &b.literal.atom))
        {
            match a.kind {
                AtomKind::DomainGuard => {
                    if let Term::Const(v) = &a.terms[0] {
                        match a.predicate.strip_prefix("dom_") {
                            Some(s) => dom.add_sorted(s, v.clone()),
                            None => dom.add(v.clone()),
                        }
                    }
                }
                _ => place(&mut dom, a),
            }
        }
    }
    dom
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroundOptions {
    /// Evaluate literals over predicates defined only by facts and drop
    /// them from rule bodies.
    pub simplify: bool,
}

impl Default for GroundOptions {
    fn default() -> Self {
        GroundOptions { simplify: true }
    }
}

/// Variable-free program with its literal universe.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundProgram {
    pub rules: Vec<Rule>,
    /// Every literal occurring in a rule, closed under complement.
    pub universe: BTreeSet<Literal>,
    pub domain: FiniteDomain,
}

impl GroundProgram {
    /// Builds a ground program from already ground rules.
    pub fn from_rules(rules: impl IntoIterator<Item = Rule>) -> Result<Self> {
        let mut program = Program::new();
        for r in rules {
            if !r.is_ground() {
                return Err(Error::Unsafe(format!("rule `{r}` is not ground")));
            }
            if r.body.iter().any(|b| b.literal.is_builtin()) {
                return Err(Error::Unsupported(format!(
                    "ground rule `{r}` still contains a comparison"
                )));
            }
            program.push(r);
        }
        let rules = program.into_rules();
        let universe = universe_of(&rules);
        Ok(GroundProgram {
            rules,
            universe,
            domain: FiniteDomain::default(),
        })
    }
}

impl fmt::Display for GroundProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

fn universe_of(rules: &[Rule]) -> BTreeSet<Literal> {
    let mut u = BTreeSet::new();
    for r in rules {
        for l in r.head.iter().chain(r.body.iter().map(|b| &b.literal)) {
            u.insert(l.complement());
            u.insert(l.clone());
        }
    }
    u
}

type Signature = (String, bool, bool, AtomKind);

fn signature(l: &Literal) -> Signature {
    (l.atom.predicate.clone(), l.atom.primed, l.negated, l.atom.kind)
}

struct Facts {
    by_sig: HashMap<Signature, Vec<Vec<Term>>>,
    set: HashSet<Literal>,
}

impl Facts {
    fn insert(&mut self, l: Literal) {
        if self.set.insert(l.clone()) {
            self.by_sig.entry(signature(&l)).or_default().push(l.atom.terms.clone());
        }
    }
}

/// Grounds `p` over the domain, adding facts for `r` and for every domain
/// predicate the program uses.
pub fn ground(p: &Program, dom: &DomainDeclaration, r: &DatabaseInstance) -> Result<GroundProgram> {
    ground_with(p, dom, r, GroundOptions::default())
}

pub fn ground_with(
    p: &Program,
    dom: &DomainDeclaration,
    r: &DatabaseInstance,
    opts: GroundOptions,
) -> Result<GroundProgram> {
    p.check_safety()?;
    let mut domain = sorted_active_domain(p, r);
    match (dom, &p.declared_domain) {
        (DomainDeclaration::Finite(d), _) => domain.union(d),
        (DomainDeclaration::Active, Some(vals)) => domain.union(&FiniteDomain::from_values(vals.iter().cloned())),
        (DomainDeclaration::Active, None) => {}
    }

    let mut facts = Facts {
        by_sig: HashMap::new(),
        set: HashSet::new(),
    };
    for f in r.facts() {
        facts.insert(Literal::pos(f.clone()));
    }
    let mut dom_preds = BTreeSet::new();
    for rule in p.rules() {
        for l in rule.head.iter().chain(rule.body.iter().map(|b| &b.literal)) {
            if l.atom.kind == AtomKind::DomainGuard {
                dom_preds.insert(l.atom.predicate.clone());
            }
        }
    }
    for pred in &dom_preds {
        let sort = pred.strip_prefix("dom_");
        debug_assert!(sort.is_some() || pred == DOM);
        for v in domain.of_sort(sort) {
            facts.insert(Literal::pos(Atom::dom(sort, Term::Const(v))));
        }
    }
    let mut derived: HashSet<Signature> = HashSet::new();
    let mut rules = Vec::new();
    for rule in p.rules() {
        if rule.kind == RuleKind::Fact || (rule.body.is_empty() && rule.head.len() == 1 && rule.is_ground()) {
            if !rule.is_ground() {
                return Err(Error::Unsafe(format!("fact `{rule}` is not ground")));
            }
            facts.insert(rule.head[0].clone());
        } else {
            derived.extend(rule.head.iter().map(signature));
            rules.push(rule);
        }
    }
    // a fact whose signature is also derived by a rule is not fact-determined
    let is_fixed = |l: &Literal| opts.simplify && !derived.contains(&signature(l));

    let values: Vec<Term> = domain.all().into_iter().map(Term::Const).collect();
    let mut out = Program::new();
    let mut fact_list: Vec<&Literal> = facts.set.iter().collect();
    fact_list.sort();
    for f in fact_list {
        out.push(Rule::fact(f.clone()));
    }
    for rule in rules {
        ground_rule(rule, &facts, &values, &is_fixed, &mut out);
    }
    let rules = out.into_rules();
    let universe = universe_of(&rules);
    Ok(GroundProgram {
        rules,
        universe,
        domain,
    })
}

fn ground_rule(rule: &Rule, facts: &Facts, values: &[Term], is_fixed: &dyn Fn(&Literal) -> bool, out: &mut Program) {
    // positive fact-determined literals bind by joining with the facts
    let joins: Vec<&Literal> = rule
        .body
        .iter()
        .filter(|b| b.binds() && is_fixed(&b.literal))
        .map(|b| &b.literal)
        .collect();
    let mut free: Vec<String> = Vec::new();
    for v in rule.variables() {
        if !joins.iter().any(|l| l.atom.variables().any(|x| x == v)) {
            free.push(v);
        }
    }
    let builtins: Vec<&Literal> = rule
        .body
        .iter()
        .filter(|b| b.literal.is_builtin())
        .map(|b| &b.literal)
        .collect();
    let mut binding = BTreeMap::new();
    join(0, &joins, facts, &mut binding, &mut |binding| {
        enumerate(0, &free, values, binding, &builtins, &mut |binding| {
            if let Some(g) = instantiate(rule, binding, facts, is_fixed) {
                out.push(g);
            }
        });
    });
}

/// False when some fully bound comparison fails.
fn builtins_hold(builtins: &[&Literal], binding: &BTreeMap<String, Term>) -> bool {
    builtins
        .iter()
        .all(|l| l.atom.substitute(binding).eval_builtin() != Some(false))
}

fn join(
    i: usize,
    joins: &[&Literal],
    facts: &Facts,
    binding: &mut BTreeMap<String, Term>,
    k: &mut dyn FnMut(&mut BTreeMap<String, Term>),
) {
    if i == joins.len() {
        k(binding);
        return;
    }
    let lit = joins[i];
    let Some(rows) = facts.by_sig.get(&signature(lit)) else {
        return;
    };
    'rows: for row in rows {
        if row.len() != lit.atom.terms.len() {
            continue;
        }
        let mut added = Vec::new();
        for (t, v) in lit.atom.terms.iter().zip(row) {
            match t {
                Term::Var(x) => match binding.get(x) {
                    Some(b) if b != v => {
                        undo(binding, &added);
                        continue 'rows;
                    }
                    Some(_) => {}
                    None if *v == Term::Null => {
                        undo(binding, &added);
                        continue 'rows;
                    }
                    None => {
                        binding.insert(x.clone(), v.clone());
                        added.push(x.clone());
                    }
                },
                c if c != v => {
                    undo(binding, &added);
                    continue 'rows;
                }
                _ => {}
            }
        }
        join(i + 1, joins, facts, binding, k);
        undo(binding, &added);
    }
}

fn undo(binding: &mut BTreeMap<String, Term>, added: &[String]) {
    for x in added {
        binding.remove(x);
    }
}

fn enumerate(
    i: usize,
    free: &[String],
    values: &[Term],
    binding: &mut BTreeMap<String, Term>,
    builtins: &[&Literal],
    k: &mut dyn FnMut(&mut BTreeMap<String, Term>),
) {
    if !builtins_hold(builtins, binding) {
        return;
    }
    if i == free.len() {
        k(binding);
        return;
    }
    for v in values {
        binding.insert(free[i].clone(), v.clone());
        enumerate(i + 1, free, values, binding, builtins, k);
    }
    binding.remove(&free[i]);
}

/// Substitutes, evaluates comparisons and fact-determined literals.
/// Returns `None` when the instance is trivially satisfied.
fn instantiate(
    rule: &Rule,
    binding: &BTreeMap<String, Term>,
    facts: &Facts,
    is_fixed: &dyn Fn(&Literal) -> bool,
) -> Option<Rule> {
    let g = rule.substitute(binding);
    let mut body: Vec<BodyLiteral> = Vec::with_capacity(g.body.len());
    for b in g.body {
        if let Some(v) = b.literal.atom.eval_builtin() {
            if v == b.weakly_negated {
                return None;
            }
            continue;
        }
        if is_fixed(&b.literal) {
            let holds = facts.set.contains(&b.literal);
            if holds == b.weakly_negated {
                return None;
            }
            continue;
        }
        if !body.contains(&b) {
            body.push(b);
        }
    }
    let mut head: Vec<Literal> = Vec::with_capacity(g.head.len());
    for l in g.head {
        if !head.contains(&l) {
            head.push(l);
        }
    }
    Some(Rule::new(head, body, g.kind))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::instance::Schema;
    use crate::parser::parse_program;

    fn inst(text: &str) -> DatabaseInstance {
        crate::parser::parse_instance(text, Schema::new()).unwrap()
    }

    #[test]
    fn active_domain_reads_constants() {
        let r = inst("p(a).");
        let q = crate::parser::parse_query("p(b)", &r.schema).unwrap();
        let d = active_domain(&r, &[], Some(&q));
        assert_eq!(d, BTreeSet::from([Value::sym("a"), Value::sym("b")]));
        assert!(active_domain(&DatabaseInstance::default(), &[], None).is_empty());
    }

    #[test]
    fn fd_triggering_rule_drops_equal_instances() {
        let r = inst("p(a,b). p(a,c).");
        let prog = parse_program("-p_p(X,Y) v -p_p(X,Z) :- p(X,Y), p(X,Z), Y!=Z.", &r.schema).unwrap();
        let g = ground(&prog, &DomainDeclaration::Active, &r).unwrap();
        let non_facts: Vec<String> = g
            .rules
            .iter()
            .filter(|r| r.kind != RuleKind::Fact)
            .map(|r| r.to_string())
            .collect();
        // the (b,c) and (c,b) instances are the same rule
        assert_eq!(non_facts, vec!["-p_p(a,b) v -p_p(a,c)."]);
    }

    #[test]
    fn ground_program_without_variables_adds_facts() {
        let r = inst("p(a).");
        let prog = parse_program(
            "q_p :- not r_p.\nr_p :- not q_p.",
            &Schema::new().with("q", 0).with("r", 0),
        )
        .unwrap();
        let g = ground(&prog, &DomainDeclaration::Active, &r).unwrap();
        assert_eq!(g.rules.len(), 3);
        assert_eq!(g.rules[0].to_string(), "p(a).");
    }

    #[test]
    fn dom_facts_only_for_used_domains() {
        let r = inst("p(a). p(b).");
        let prog = parse_program("-p_p(X) :- dom(X), not p(X).", &r.schema).unwrap();
        let mut d = FiniteDomain::default();
        d.add(Value::sym("c"));
        let g = ground(&prog, &DomainDeclaration::Finite(d), &r).unwrap();
        let text = g.to_string();
        assert!(text.contains("dom(c)."));
        assert!(text.contains("-p_p(c)."));
        assert!(!text.contains("-p_p(a)"));
    }

    #[test]
    fn unsimplified_grounding_keeps_literals() {
        let r = inst("p(a).");
        let prog = parse_program("-p_p(X) :- dom(X), not p(X).", &r.schema).unwrap();
        let g = ground_with(&prog, &DomainDeclaration::Active, &r, GroundOptions { simplify: false }).unwrap();
        assert!(g.to_string().contains("-p_p(a) :- dom(a), not p(a)."));
    }

    #[test]
    fn universe_closed_under_complement() {
        let r = inst("p(a).");
        let prog = parse_program("p_p(X) :- p(X), not -p_p(X).", &r.schema).unwrap();
        let g = ground(&prog, &DomainDeclaration::Active, &r).unwrap();
        for l in &g.universe {
            assert!(g.universe.contains(&l.complement()));
        }
    }
}
