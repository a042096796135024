//! Well-founded interpretation of ground disjunctive programs and the core
//! of a family of answer sets.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::grounder::GroundProgram;
use crate::model::atom::{has_complementary_pair, Literal};
use crate::model::interp::{AnswerSet, ThreeValuedInterpretation};
use crate::model::rule::Rule;

struct IRule {
    head: Vec<usize>,
    pos: Vec<usize>,
    neg: Vec<usize>,
}

/// Rules with a head, over indices into the program's literal universe.
struct Indexed {
    lits: Vec<Literal>,
    index: HashMap<Literal, usize>,
    rules: Vec<IRule>,
}

impl Indexed {
    fn new(g: &GroundProgram) -> Self {
        let mut universe = g.universe.clone();
        for r in &g.rules {
            for l in r.head.iter().chain(r.body.iter().map(|b| &b.literal)) {
                universe.insert(l.clone());
                universe.insert(l.complement());
            }
        }
        let lits: Vec<Literal> = universe.into_iter().collect();
        let index: HashMap<Literal, usize> = lits.iter().cloned().enumerate().map(|(i, l)| (l, i)).collect();
        let rules = g
            .rules
            .iter()
            .filter(|r| !r.head.is_empty())
            .map(|r: &Rule| IRule {
                head: r.head.iter().map(|l| index[l]).collect(),
                pos: r
                    .body
                    .iter()
                    .filter(|b| !b.weakly_negated)
                    .map(|b| index[&b.literal])
                    .collect(),
                neg: r
                    .body
                    .iter()
                    .filter(|b| b.weakly_negated)
                    .map(|b| index[&b.literal])
                    .collect(),
            })
            .collect();
        Indexed { lits, index, rules }
    }

    fn mask(&self, set: &BTreeSet<Literal>) -> Vec<bool> {
        let mut m = vec![false; self.lits.len()];
        for l in set {
            if let Some(&i) = self.index.get(l) {
                m[i] = true;
            }
        }
        m
    }

    fn t(&self, tr: &[bool], fa: &[bool]) -> Vec<usize> {
        let mut out = BTreeSet::new();
        for r in &self.rules {
            if !r.pos.iter().all(|&p| tr[p]) || !r.neg.iter().all(|&n| fa[n]) {
                continue;
            }
            for &h in &r.head {
                if r.head.iter().all(|&o| o == h || fa[o]) {
                    out.insert(h);
                }
            }
        }
        out.into_iter().collect()
    }

    fn gus(&self, tr: &[bool], fa: &[bool]) -> Vec<usize> {
        let mut x: Vec<bool> = tr.iter().map(|t| !t).collect();
        loop {
            let mut changed = false;
            for r in &self.rules {
                if r.pos.iter().any(|&p| fa[p] || x[p]) || r.neg.iter().any(|&n| tr[n]) {
                    continue;
                }
                for &h in &r.head {
                    if x[h] && !r.head.iter().any(|&o| o != h && tr[o]) {
                        x[h] = false;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        (0..x.len()).filter(|&i| x[i]).collect()
    }
}

/// Literals derivable in one step: some rule has the literal in its head,
/// a body true in `i` and every other head literal false in `i`.
pub fn t_operator(g: &GroundProgram, i: &ThreeValuedInterpretation) -> BTreeSet<Literal> {
    let ix = Indexed::new(g);
    let (tr, fa) = (ix.mask(i.true_set()), ix.mask(i.false_set()));
    ix.t(&tr, &fa).into_iter().map(|k| ix.lits[k].clone()).collect()
}

/// Greatest set `X` of non-true literals such that every rule with a head
/// literal in `X` has a false or unfounded positive body literal, a `not L`
/// with `L` true, or another head literal that is true.
pub fn greatest_unfounded_set(g: &GroundProgram, i: &ThreeValuedInterpretation) -> BTreeSet<Literal> {
    let ix = Indexed::new(g);
    let (tr, fa) = (ix.mask(i.true_set()), ix.mask(i.false_set()));
    ix.gus(&tr, &fa).into_iter().map(|k| ix.lits[k].clone()).collect()
}

/// Fixpoint of `I -> (T(I), GUS(I))` from the empty interpretation, with the
/// round at which each literal became true or false.
#[derive(Debug, Clone, PartialEq)]
pub struct WellFounded {
    pub interpretation: ThreeValuedInterpretation,
    pub universe: BTreeSet<Literal>,
    /// Round (starting at 1) in which a literal entered the true set.
    pub true_since: BTreeMap<Literal, usize>,
    /// Round in which a literal entered the false set.
    pub false_since: BTreeMap<Literal, usize>,
    pub rounds: usize,
}

impl WellFounded {
    /// True literals without classical negation.
    pub fn positive(&self) -> BTreeSet<Literal> {
        self.interpretation
            .true_set()
            .iter()
            .filter(|l| !l.negated)
            .cloned()
            .collect()
    }

    /// True literals with classical negation.
    pub fn negative(&self) -> BTreeSet<Literal> {
        self.interpretation
            .true_set()
            .iter()
            .filter(|l| l.negated)
            .cloned()
            .collect()
    }

    /// Literals of the universe that are neither true nor false.
    pub fn undefined(&self) -> BTreeSet<Literal> {
        self.universe
            .iter()
            .filter(|l| self.interpretation.is_undefined(l))
            .cloned()
            .collect()
    }

    pub fn is_total(&self) -> bool {
        self.interpretation.is_total_on(&self.universe)
    }

    /// Literals true after `k` rounds.
    pub fn true_by(&self, k: usize) -> BTreeSet<Literal> {
        self.true_since
            .iter()
            .filter(|(_, &r)| r <= k)
            .map(|(l, _)| l.clone())
            .collect()
    }

    /// Literals true after `k` rounds together with the complements of
    /// literals false after `k` rounds.
    pub fn decided_by(&self, k: usize) -> BTreeSet<Literal> {
        let mut out = self.true_by(k);
        out.extend(
            self.false_since
                .iter()
                .filter(|(_, &r)| r <= k)
                .map(|(l, _)| l.complement()),
        );
        out
    }
}

/// Least fixpoint of the well-founded operator. Fails with
/// [`Error::Inconsistent`] when a literal is both derived and unfounded, or
/// complementary literals are derived.
pub fn well_founded(g: &GroundProgram) -> Result<WellFounded> {
    let ix = Indexed::new(g);
    let n = ix.lits.len();
    let mut tr = vec![false; n];
    let mut fa = vec![false; n];
    let mut true_since = BTreeMap::new();
    let mut false_since = BTreeMap::new();
    let mut round = 0;
    loop {
        round += 1;
        assert!(round <= n + 2, "well-founded iteration did not converge");
        let new_true = ix.t(&tr, &fa);
        let new_false = ix.gus(&tr, &fa);
        let mut changed = false;
        for k in new_true {
            if !tr[k] {
                tr[k] = true;
                true_since.insert(ix.lits[k].clone(), round);
                changed = true;
            }
        }
        for k in new_false {
            if !fa[k] {
                fa[k] = true;
                false_since.insert(ix.lits[k].clone(), round);
                changed = true;
            }
        }
        if (0..n).any(|k| tr[k] && fa[k]) {
            return Err(Error::Inconsistent);
        }
        if !changed {
            break;
        }
    }
    let pick = |m: &[bool]| -> BTreeSet<Literal> { (0..n).filter(|&k| m[k]).map(|k| ix.lits[k].clone()).collect() };
    let true_set = pick(&tr);
    if has_complementary_pair(&true_set) {
        return Err(Error::Inconsistent);
    }
    Ok(WellFounded {
        interpretation: ThreeValuedInterpretation::new(true_set, pick(&fa))?,
        universe: ix.lits.into_iter().collect(),
        true_since,
        false_since,
        rounds: round - 1,
    })
}

/// Intersection of the answer sets.
pub fn core(sets: &[AnswerSet]) -> Result<BTreeSet<Literal>> {
    let (first, rest) = sets.split_first().ok_or(Error::EmptyCore)?;
    Ok(first
        .iter()
        .filter(|l| rest.iter().all(|s| s.contains(l)))
        .cloned()
        .collect())
}
