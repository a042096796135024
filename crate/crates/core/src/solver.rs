//! Answer sets of ground disjunctive programs with classical and weak
//! negation.
//!
//! Candidates are enumerated by a propagate-and-branch search over the
//! literal universe. Each total candidate is accepted only if it is a
//! minimal model of its reduct.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::grounder::GroundProgram;
use crate::model::atom::{BodyLiteral, Literal};
use crate::model::interp::AnswerSet;
use crate::model::rule::{Rule, RuleKind};

/// Default cap on branching decisions per search.
pub const DEFAULT_MAX_BRANCHES: u64 = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveOptions {
    /// Exception-aware reduct: a persistence default is dropped when the
    /// complement of its head is in the candidate.
    pub e_mode: bool,
    /// Discard candidates that satisfy the body of a strong constraint.
    pub strong: bool,
    pub max_branches: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            e_mode: false,
            strong: true,
            max_branches: DEFAULT_MAX_BRANCHES,
        }
    }
}

/// Ground rules without weak negation.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PositiveGroundProgram {
    pub rules: Vec<Rule>,
}

impl fmt::Display for PositiveGroundProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

/// True when every positive body literal is in `s` and no weakly negated
/// one is.
pub fn body_holds(s: &BTreeSet<Literal>, body: &[BodyLiteral]) -> bool {
    body.iter().all(|b| s.contains(&b.literal) != b.weakly_negated)
}

fn is_default(r: &Rule) -> bool {
    r.kind == RuleKind::PersistenceDefault
}

/// Removes the rules blocked by `s` and the remaining `not` literals.
/// Headless rules are left out; they constrain candidates rather than
/// derive literals.
pub fn reduct(g: &GroundProgram, s: &AnswerSet, e_mode: bool) -> PositiveGroundProgram {
    let rules = g
        .rules
        .iter()
        .filter(|r| !r.head.is_empty())
        .filter(|r| !(e_mode && is_default(r) && s.contains(&r.head[0].complement())))
        .filter(|r| !r.body.iter().any(|b| b.weakly_negated && s.contains(&b.literal)))
        .map(|r| {
            let body = r.body.iter().filter(|b| !b.weakly_negated).cloned().collect();
            Rule::new(r.head.clone(), body, r.kind)
        })
        .collect();
    PositiveGroundProgram { rules }
}

/// Consistent minimal models of a positive program. Minimal models that
/// contain a complementary pair are discarded.
pub fn minimal_models(p: &PositiveGroundProgram) -> Result<Vec<AnswerSet>> {
    let c = Compiled::new(p.rules.iter(), false, true);
    let found = c.enumerate(true, false, DEFAULT_MAX_BRANCHES)?;
    Ok(c.answer_sets(found))
}

/// All consistent answer sets, in canonical order.
///
/// Fails with [`Error::Inconsistent`] when the program has no consistent
/// answer set but does have candidates closed under its reduct that derive
/// complementary literals. Strong constraints pruning every candidate is
/// not an error; the result is then empty.
pub fn answer_sets(g: &GroundProgram, opts: &SolveOptions) -> Result<Vec<AnswerSet>> {
    let c = Compiled::new(g.rules.iter(), opts.e_mode, opts.strong);
    let seed = if opts.e_mode {
        Vec::new()
    } else {
        well_founded_seed(g, &c)
    };
    let found = c.enumerate_from(&seed, true, false, opts.max_branches)?;
    if !found.is_empty() {
        return Ok(c.answer_sets(found));
    }
    let unconstrained = Compiled::new(g.rules.iter(), opts.e_mode, false);
    if opts.strong && !unconstrained.enumerate(true, true, opts.max_branches)?.is_empty() {
        return Ok(Vec::new());
    }
    if !unconstrained.enumerate(false, true, opts.max_branches)?.is_empty() {
        return Err(Error::Inconsistent);
    }
    Ok(Vec::new())
}

/// Literals fixed by the well-founded interpretation, which every answer
/// set agrees with.
fn well_founded_seed(g: &GroundProgram, c: &Compiled) -> Vec<(usize, V)> {
    let Ok(w) = crate::wfs::well_founded(g) else {
        return Vec::new();
    };
    let i = &w.interpretation;
    let tagged = i
        .true_set()
        .iter()
        .map(|l| (l, V::T))
        .chain(i.false_set().iter().map(|l| (l, V::F)));
    tagged.filter_map(|(l, v)| c.index.get(l).map(|&k| (k, v))).collect()
}

/// Checks `s` against the definition directly: consistent, a minimal model
/// of its reduct, and, when requested, free of strong-constraint violations.
pub fn is_answer_set(g: &GroundProgram, s: &AnswerSet, opts: &SolveOptions) -> bool {
    let red = reduct(g, s, opts.e_mode);
    let lits = s.literals();
    if !red
        .rules
        .iter()
        .all(|r| !body_holds(lits, &r.body) || r.head.iter().any(|h| lits.contains(h)))
    {
        return false;
    }
    if opts.strong
        && g.rules
            .iter()
            .any(|r| r.kind == RuleKind::StrongConstraint && body_holds(lits, &r.body))
    {
        return false;
    }
    let c = Compiled::new(red.rules.iter(), false, false);
    let idx: Vec<usize> = lits.iter().filter_map(|l| c.index.get(l).copied()).collect();
    idx.len() == lits.len() && c.is_minimal(&idx)
}

/// Keeps the sets satisfying no denial body.
pub fn filter_strong(sets: Vec<AnswerSet>, denials: &[Rule]) -> Vec<AnswerSet> {
    sets.into_iter()
        .filter(|s| !denials.iter().any(|d| body_holds(s.literals(), &d.body)))
        .collect()
}

/// Number of ground weak constraints whose body holds in `s`.
pub fn weak_violations(s: &AnswerSet, weak: &[Rule]) -> usize {
    weak.iter().filter(|w| body_holds(s.literals(), &w.body)).count()
}

/// Keeps the sets with the fewest weak-constraint violations.
pub fn optimize_weak(sets: Vec<AnswerSet>, weak: &[Rule]) -> Vec<AnswerSet> {
    let Some(best) = sets.iter().map(|s| weak_violations(s, weak)).min() else {
        return sets;
    };
    sets.into_iter().filter(|s| weak_violations(s, weak) == best).collect()
}

/// Ground weak constraints of a program.
pub fn weak_constraints(g: &GroundProgram) -> Vec<Rule> {
    g.rules
        .iter()
        .filter(|r| r.kind == RuleKind::WeakConstraint)
        .cloned()
        .collect()
}

/// Ground strong constraints of a program.
pub fn strong_constraints(g: &GroundProgram) -> Vec<Rule> {
    g.rules
        .iter()
        .filter(|r| r.kind == RuleKind::StrongConstraint)
        .cloned()
        .collect()
}

struct CRule {
    head: Vec<usize>,
    pos: Vec<usize>,
    neg: Vec<usize>,
}

/// Rules over literal indices. Headless entries are strong constraints.
struct Compiled {
    lits: Vec<Literal>,
    index: HashMap<Literal, usize>,
    comp: Vec<usize>,
    rules: Vec<CRule>,
    heads_of: Vec<Vec<usize>>,
}

impl Compiled {
    fn new<'a>(rules: impl Iterator<Item = &'a Rule>, e_mode: bool, strong: bool) -> Self {
        let rules: Vec<&Rule> = rules
            .filter(|r| match r.kind {
                RuleKind::WeakConstraint => false,
                RuleKind::StrongConstraint => strong,
                _ => !r.head.is_empty() || strong,
            })
            .collect();
        let mut universe = BTreeSet::new();
        for r in &rules {
            for l in r.head.iter().chain(r.body.iter().map(|b| &b.literal)) {
                universe.insert(l.complement());
                universe.insert(l.clone());
            }
        }
        let lits: Vec<Literal> = universe.into_iter().collect();
        let index: HashMap<Literal, usize> = lits.iter().cloned().enumerate().map(|(i, l)| (l, i)).collect();
        let comp = lits.iter().map(|l| index[&l.complement()]).collect();
        let mut heads_of = vec![Vec::new(); lits.len()];
        let mut out = Vec::with_capacity(rules.len());
        for (ri, r) in rules.iter().enumerate() {
            let head: Vec<usize> = r.head.iter().map(|l| index[l]).collect();
            let pos = r
                .body
                .iter()
                .filter(|b| !b.weakly_negated)
                .map(|b| index[&b.literal])
                .collect();
            let mut neg: Vec<usize> = r
                .body
                .iter()
                .filter(|b| b.weakly_negated)
                .map(|b| index[&b.literal])
                .collect();
            if e_mode && is_default(r) {
                neg.push(index[&r.head[0].complement()]);
            }
            for &h in &head {
                heads_of[h].push(ri);
            }
            out.push(CRule { head, pos, neg });
        }
        Compiled {
            lits,
            index,
            comp,
            rules: out,
            heads_of,
        }
    }

    /// True sets of all accepted candidates. With `consistent` false,
    /// complementary pairs are allowed in candidates.
    fn enumerate(&self, consistent: bool, first_only: bool, limit: u64) -> Result<Vec<Vec<usize>>> {
        self.enumerate_from(&[], consistent, first_only, limit)
    }

    fn enumerate_from(
        &self,
        seed: &[(usize, V)],
        consistent: bool,
        first_only: bool,
        limit: u64,
    ) -> Result<Vec<Vec<usize>>> {
        let mut s = Search {
            c: self,
            val: vec![V::U; self.lits.len()],
            trail: Vec::new(),
            consistent,
            first_only,
            branches: 0,
            limit,
            found: Vec::new(),
        };
        for &(k, v) in seed {
            if s.assign(k, v).is_none() {
                return Ok(Vec::new());
            }
        }
        s.search()?;
        Ok(s.found)
    }

    fn answer_sets(&self, found: Vec<Vec<usize>>) -> Vec<AnswerSet> {
        let mut sets: Vec<AnswerSet> = found
            .into_iter()
            .map(|ix| AnswerSet::new(ix.into_iter().map(|i| self.lits[i].clone())).expect("consistent candidate"))
            .collect();
        sets.sort();
        sets
    }

    /// Whether no proper subset of `s` is a model of the reduct of the
    /// program with respect to `s`.
    fn is_minimal(&self, s: &[usize]) -> bool {
        let mut local = vec![usize::MAX; self.lits.len()];
        for (k, &i) in s.iter().enumerate() {
            local[i] = k;
        }
        let in_s = |i: usize| local[i] != usize::MAX;
        let mut clauses: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
        for r in &self.rules {
            if r.head.is_empty() || r.neg.iter().any(|&n| in_s(n)) || !r.pos.iter().all(|&p| in_s(p)) {
                continue;
            }
            let body = r.pos.iter().map(|&p| local[p]).collect();
            let head = r.head.iter().filter(|&&h| in_s(h)).map(|&h| local[h]).collect();
            clauses.push((body, head));
        }
        // some literal of s left out
        clauses.push(((0..s.len()).collect(), Vec::new()));
        !sat(s.len(), &clauses)
    }
}

/// Satisfiability of clauses `not b1 v ... v not bk v h1 v ... v hj`.
fn sat(n: usize, clauses: &[(Vec<usize>, Vec<usize>)]) -> bool {
    fn go(val: &mut Vec<Option<bool>>, clauses: &[(Vec<usize>, Vec<usize>)]) -> bool {
        let mut trail = Vec::new();
        let ok = loop {
            let mut changed = false;
            let mut conflict = false;
            for (neg, pos) in clauses {
                let mut open = None;
                let mut open_count = 0;
                let mut satisfied = false;
                for (&v, want) in neg.iter().map(|v| (v, false)).chain(pos.iter().map(|v| (v, true))) {
                    match val[v] {
                        Some(b) if b == want => {
                            satisfied = true;
                            break;
                        }
                        Some(_) => {}
                        None => {
                            open_count += 1;
                            open = Some((v, want));
                        }
                    }
                }
                if satisfied {
                    continue;
                }
                match (open_count, open) {
                    (0, _) => {
                        conflict = true;
                        break;
                    }
                    (1, Some((v, want))) => {
                        val[v] = Some(want);
                        trail.push(v);
                        changed = true;
                    }
                    _ => {}
                }
            }
            if conflict {
                break false;
            }
            if !changed {
                break true;
            }
        };
        let result = ok
            && match val.iter().position(Option::is_none) {
                None => true,
                Some(v) => [false, true].into_iter().any(|b| {
                    val[v] = Some(b);
                    let r = go(val, clauses);
                    val[v] = None;
                    r
                }),
            };
        for v in trail {
            val[v] = None;
        }
        result
    }
    go(&mut vec![None; n], clauses)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum V {
    U,
    T,
    F,
}

struct Search<'a> {
    c: &'a Compiled,
    val: Vec<V>,
    trail: Vec<usize>,
    consistent: bool,
    first_only: bool,
    branches: u64,
    limit: u64,
    found: Vec<Vec<usize>>,
}

impl Search<'_> {
    fn assign(&mut self, i: usize, v: V) -> Option<bool> {
        match self.val[i] {
            V::U => {
                self.val[i] = v;
                self.trail.push(i);
                Some(true)
            }
            x if x == v => Some(false),
            _ => None,
        }
    }

    fn undo(&mut self, mark: usize) {
        for i in self.trail.drain(mark..) {
            self.val[i] = V::U;
        }
    }

    fn body_false(&self, r: &CRule) -> bool {
        r.pos.iter().any(|&p| self.val[p] == V::F) || r.neg.iter().any(|&n| self.val[n] == V::T)
    }

    /// Closes the partial assignment under the rules, support and
    /// consistency. Returns false on a conflict.
    fn propagate(&mut self) -> bool {
        let c = self.c;
        loop {
            let mut changed = false;
            for r in &c.rules {
                if self.body_false(r) || r.head.iter().any(|&h| self.val[h] == V::T) {
                    continue;
                }
                let open_body: Vec<(usize, V)> = r
                    .pos
                    .iter()
                    .filter(|&&p| self.val[p] == V::U)
                    .map(|&p| (p, V::F))
                    .chain(r.neg.iter().filter(|&&n| self.val[n] == V::U).map(|&n| (n, V::T)))
                    .collect();
                let open_head: Vec<usize> = r.head.iter().copied().filter(|&h| self.val[h] == V::U).collect();
                match (open_body.len(), open_head.len()) {
                    (0, 0) => return false,
                    (0, 1) => match self.assign(open_head[0], V::T) {
                        None => return false,
                        Some(ch) => changed |= ch,
                    },
                    (1, 0) => match self.assign(open_body[0].0, open_body[0].1) {
                        None => return false,
                        Some(ch) => changed |= ch,
                    },
                    _ => {}
                }
            }
            for i in 0..c.lits.len() {
                if self.val[i] == V::F {
                    continue;
                }
                let mut support = None;
                let mut count = 0;
                for &ri in &c.heads_of[i] {
                    let r = &c.rules[ri];
                    if self.body_false(r) || r.head.iter().any(|&h| h != i && self.val[h] == V::T) {
                        continue;
                    }
                    count += 1;
                    support = Some(ri);
                    if count > 1 {
                        break;
                    }
                }
                if count == 0 {
                    match self.assign(i, V::F) {
                        None => return false,
                        Some(ch) => changed |= ch,
                    }
                } else if count == 1 && self.val[i] == V::T {
                    let r = &c.rules[support.unwrap()];
                    let forced = r
                        .pos
                        .iter()
                        .map(|&p| (p, V::T))
                        .chain(r.neg.iter().map(|&n| (n, V::F)))
                        .chain(r.head.iter().filter(|&&h| h != i).map(|&h| (h, V::F)));
                    for (l, v) in forced.collect::<Vec<_>>() {
                        match self.assign(l, v) {
                            None => return false,
                            Some(ch) => changed |= ch,
                        }
                    }
                }
            }
            if self.consistent {
                for i in 0..c.lits.len() {
                    if self.val[i] == V::T {
                        match self.assign(c.comp[i], V::F) {
                            None => return false,
                            Some(ch) => changed |= ch,
                        }
                    }
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn search(&mut self) -> Result<()> {
        if self.first_only && !self.found.is_empty() {
            return Ok(());
        }
        let mark = self.trail.len();
        if self.propagate() {
            match self.val.iter().position(|&v| v == V::U) {
                None => {
                    let s: Vec<usize> = (0..self.val.len()).filter(|&i| self.val[i] == V::T).collect();
                    if self.c.is_minimal(&s) {
                        self.found.push(s);
                    }
                }
                Some(i) => {
                    self.branches += 1;
                    if self.branches > self.limit {
                        self.undo(mark);
                        return Err(Error::ResourceLimit(format!(
                            "answer-set search exceeded {} branches",
                            self.limit
                        )));
                    }
                    for v in [V::T, V::F] {
                        let m = self.trail.len();
                        self.assign(i, v);
                        let r = self.search();
                        self.undo(m);
                        r?;
                    }
                }
            }
        }
        self.undo(mark);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::atom::Atom;
    use crate::model::instance::Schema;
    use crate::parser::parse_program;

    fn ground(text: &str) -> GroundProgram {
        let p = parse_program(text, &Schema::new()).unwrap();
        GroundProgram::from_rules(p.into_rules()).unwrap()
    }

    fn lit(s: &str) -> Literal {
        let (neg, name) = s.strip_prefix('-').map_or((false, s), |n| (true, n));
        Literal::new(Atom::aux(name, vec![]), neg)
    }

    fn sets(g: &GroundProgram) -> Vec<Vec<String>> {
        answer_sets(g, &SolveOptions::default())
            .unwrap()
            .iter()
            .map(|s| s.iter().map(|l| l.to_string()).collect())
            .collect()
    }

    #[test]
    fn disjunctive_fact_has_two_minimal_models() {
        let g = ground("q v r.");
        assert_eq!(sets(&g), vec![vec!["q"], vec!["r"]]);
        let p = reduct(&g, &AnswerSet::default(), false);
        assert_eq!(minimal_models(&p).unwrap().len(), 2);
    }

    #[test]
    fn horn_closure() {
        assert_eq!(sets(&ground("a. b :- a.")), vec![vec!["a", "b"]]);
    }

    #[test]
    fn reduct_steps() {
        let g = ground("b. q :- not b, not a. p :- b, not -p.");
        let s = AnswerSet::new([lit("b")]).unwrap();
        let red = reduct(&g, &s, false);
        let text: Vec<String> = red.rules.iter().map(|r| r.to_string()).collect();
        assert_eq!(text, vec!["b.", "p :- b."]);
    }

    #[test]
    fn exception_reduct_drops_overridden_defaults() {
        let mut g = ground("p. x :- p.");
        g.rules[1].kind = RuleKind::PersistenceDefault;
        let s = AnswerSet::new([lit("p"), lit("-x")]).unwrap();
        assert_eq!(reduct(&g, &s, true).rules.len(), 1);
        assert_eq!(reduct(&g, &s, false).rules.len(), 2);
    }

    #[test]
    fn strong_constraint_kills_every_candidate() {
        let g = ground("a. :- a.");
        assert!(answer_sets(&g, &SolveOptions::default()).unwrap().is_empty());
        let loose = SolveOptions {
            strong: false,
            ..SolveOptions::default()
        };
        assert_eq!(answer_sets(&g, &loose).unwrap().len(), 1);
    }

    #[test]
    fn complementary_derivation_is_inconsistent() {
        let g = ground("a. -a :- a.");
        assert!(matches!(
            answer_sets(&g, &SolveOptions::default()),
            Err(Error::Inconsistent)
        ));
    }

    #[test]
    fn no_answer_set_is_not_inconsistency() {
        let g = ground("a :- not a.");
        assert!(answer_sets(&g, &SolveOptions::default()).unwrap().is_empty());
    }

    #[test]
    fn even_loop_and_classical_negation() {
        let g = ground("a :- not b. b :- not a. -c :- a. c :- b.");
        assert_eq!(sets(&g), vec![vec!["a", "-c"], vec!["b", "c"]]);
    }

    #[test]
    fn non_minimal_supported_model_rejected() {
        // {a, b} is supported but not minimal for the reduct
        let g = ground("a :- b. b :- a.");
        assert_eq!(sets(&g), vec![Vec::<String>::new()]);
    }

    #[test]
    fn propositional_change_program() {
        let g = ground(
            "q_p v r_p :- not q, not r. s_p v -q_p :- not s, q. s_p v -r_p :- not s, r. \
             q_p :- -r_p. r_p :- -q_p. s_p :- q_p. -q_p :- -s_p. s_p :- r_p. -r_p :- -s_p. \
             q_p :- q, not -q_p. s_p :- s, not -s_p. r_p :- r, not -r_p. \
             -q_p :- not q, not q_p. -s_p :- not s, not s_p. -r_p :- not r, not r_p.",
        );
        assert_eq!(sets(&g), vec![vec!["q_p", "-r_p", "s_p"], vec!["-q_p", "r_p", "s_p"]]);
        for s in answer_sets(&g, &SolveOptions::default()).unwrap() {
            assert!(is_answer_set(&g, &s, &SolveOptions::default()));
        }
    }

    #[test]
    fn weak_constraints_keep_the_cheapest() {
        let g = ground("a v b. c :- b. :~ a. :~ b. :~ c.");
        let all = answer_sets(&g, &SolveOptions::default()).unwrap();
        assert_eq!(all.len(), 2);
        let weak = weak_constraints(&g);
        let best = optimize_weak(all.clone(), &weak);
        assert_eq!(best.len(), 1);
        assert!(best[0].contains(&lit("a")));
        assert_eq!(optimize_weak(all[..1].to_vec(), &weak), all[..1].to_vec());
        assert_eq!(optimize_weak(all.clone(), &[]), all);
    }

    #[test]
    fn filter_strong_is_selective() {
        let g = ground("a v b.");
        let all = answer_sets(&g, &SolveOptions::default()).unwrap();
        let denial = ground(":- a.").rules;
        assert_eq!(filter_strong(all.clone(), &denial).len(), 1);
        assert_eq!(filter_strong(all.clone(), &[]), all);
    }

    #[test]
    fn branch_limit_is_reported() {
        let g = ground("a v b. c v d. e v f.");
        let opts = SolveOptions {
            max_branches: 1,
            ..SolveOptions::default()
        };
        assert!(matches!(answer_sets(&g, &opts), Err(Error::ResourceLimit(_))));
    }
}
