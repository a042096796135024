use super::lexer::Tok;
use super::{Cursor, RawAtom};
use crate::error::{Error, Result};
use crate::model::atom::{Atom, BodyLiteral, Literal};
use crate::model::constraint::{BuiltinFormula, Constraint};
use crate::model::instance::Schema;
use crate::model::rule::{Rule, RuleKind};

/// Contents of an `.ic` file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConstraintSet {
    pub constraints: Vec<Constraint>,
    /// Headless rules `:- body.` that discard answer sets.
    pub denials: Vec<Rule>,
    /// Rules `h :- body.` defining auxiliary predicates used by denials.
    pub definitions: Vec<Rule>,
    /// Weak constraints `:~ body.` appended to the repair program.
    pub weak: Vec<Rule>,
}

impl ConstraintSet {
    pub fn from_constraints(constraints: Vec<Constraint>) -> Self {
        ConstraintSet {
            constraints,
            ..ConstraintSet::default()
        }
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty() && self.denials.is_empty() && self.definitions.is_empty() && self.weak.is_empty()
    }
}

enum Elem {
    Atom {
        negated: bool,
        raw: RawAtom,
    },
    /// Conjunction of comparisons joined by `&`.
    Builtins(Vec<Atom>),
}

fn elem(cur: &mut Cursor) -> Result<Elem> {
    if cur.eat_ident("exists") {
        return Err(Error::syntax(
            cur.span(),
            "existential quantification is only allowed as `P(X) -> exists Y R(X,Y)`",
        ));
    }
    if matches!(cur.peek(), Tok::Minus) && matches!(cur.peek_at(1), Tok::Ident(_)) {
        cur.next();
        return Ok(Elem::Atom {
            negated: true,
            raw: cur.raw_atom()?,
        });
    }
    if cur.at_builtin() {
        let mut conj = vec![cur.builtin()?];
        while cur.eat(&Tok::Amp) {
            conj.push(cur.builtin()?);
        }
        return Ok(Elem::Builtins(conj));
    }
    Ok(Elem::Atom {
        negated: false,
        raw: cur.raw_atom()?,
    })
}

fn is_or(tok: &Tok) -> bool {
    matches!(tok, Tok::Bar) || matches!(tok, Tok::Ident(w) if w == "v")
}

/// Disjuncts separated by `v` or `|`.
fn disjuncts(cur: &mut Cursor) -> Result<Vec<Elem>> {
    let mut out = vec![elem(cur)?];
    while is_or(cur.peek()) {
        cur.next();
        out.push(elem(cur)?);
    }
    Ok(out)
}

fn body(cur: &mut Cursor, schema: &Schema) -> Result<Vec<BodyLiteral>> {
    let mut out = Vec::new();
    loop {
        let naf = cur.eat_ident("not");
        let lit = match elem(cur)? {
            Elem::Atom { negated, raw } => Literal::new(raw.rule_atom(schema)?, negated),
            Elem::Builtins(conj) if conj.len() == 1 => Literal::pos(conj.into_iter().next().unwrap()),
            Elem::Builtins(_) => return Err(Error::syntax(cur.span(), "use `,` to join body literals")),
        };
        out.push(BodyLiteral {
            literal: lit,
            weakly_negated: naf,
        });
        if !cur.eat(&Tok::Comma) {
            return Ok(out);
        }
    }
}

/// Adds clause disjuncts to the standard-format parts.
fn add_disjuncts(
    elems: Vec<Elem>,
    schema: &mut Schema,
    pos: &mut Vec<Atom>,
    neg: &mut Vec<Atom>,
    phi: &mut BuiltinFormula,
) -> Result<()> {
    for e in elems {
        match e {
            Elem::Atom { negated, raw } => {
                let atom = raw.database(schema)?;
                if negated {
                    neg.push(atom)
                } else {
                    pos.push(atom)
                }
            }
            Elem::Builtins(conj) => phi.alternatives.push(conj.into_iter().map(Literal::pos).collect()),
        }
    }
    Ok(())
}

/// Parses `.ic` text. Each statement is one of:
///
/// - a clause `L1 v ... v Lk.` whose disjuncts are literals `p(..)`, `-q(..)`
///   or comparisons (several joined by `&` form one conjunctive disjunct);
/// - an implication `A1, ..., Ak -> B1 v ... v Bj.`;
/// - a referential constraint `p(X) -> exists Y r(X,Y).`;
/// - a denial `:- body.`, weak constraint `:~ body.` or definition `h :- body.`;
/// - a `#schema` declaration.
pub fn parse_constraints(text: &str, schema: &mut Schema) -> Result<ConstraintSet> {
    let mut cur = Cursor::new(text)?;
    let mut set = ConstraintSet::default();
    while !cur.at_end() {
        if cur.eat(&Tok::Hash) {
            cur.schema_directive(schema)?;
            continue;
        }
        if cur.eat(&Tok::If) {
            let rule = Rule::strong(body(&mut cur, schema)?);
            cur.expect(&Tok::Dot)?;
            rule.check_safety()?;
            set.denials.push(rule);
            continue;
        }
        if cur.eat(&Tok::WeakIf) {
            let rule = Rule::weak(body(&mut cur, schema)?);
            cur.expect(&Tok::Dot)?;
            rule.check_safety()?;
            set.weak.push(rule);
            continue;
        }
        let start = cur.span();
        let mut first = vec![elem(&mut cur)?];
        let mut comma = false;
        loop {
            if is_or(cur.peek()) {
                cur.next();
            } else if cur.eat(&Tok::Comma) {
                comma = true;
            } else {
                break;
            }
            first.push(elem(&mut cur)?);
        }
        match cur.next().tok {
            Tok::Dot if !comma => {
                let (mut pos, mut neg, mut phi) = (vec![], vec![], BuiltinFormula::falsum());
                add_disjuncts(first, schema, &mut pos, &mut neg, &mut phi)?;
                set.constraints.push(Constraint::new(pos, neg, phi)?);
            }
            Tok::Arrow => {
                let (mut pos, mut neg, mut phi) = (vec![], vec![], BuiltinFormula::falsum());
                for e in first {
                    match e {
                        Elem::Atom { negated, raw } => {
                            let atom = raw.database(schema)?;
                            if negated {
                                pos.push(atom)
                            } else {
                                neg.push(atom)
                            }
                        }
                        Elem::Builtins(conj) => {
                            for b in conj {
                                phi.alternatives.push(vec![Literal::neg(b)]);
                            }
                        }
                    }
                }
                if cur.eat_ident("exists") {
                    let mut vars = Vec::new();
                    loop {
                        let span = cur.span();
                        match cur.next().tok {
                            Tok::Var(v) => vars.push(v),
                            _ => return Err(Error::syntax(span, "expected a variable after `exists`")),
                        }
                        if !cur.eat(&Tok::Comma) {
                            break;
                        }
                    }
                    let tail = cur.raw_atom()?.database(schema)?;
                    cur.expect(&Tok::Dot)?;
                    if !pos.is_empty() || neg.len() != 1 || !phi.is_false() {
                        return Err(Error::syntax(
                            start,
                            "a referential constraint needs a single atom before `->`",
                        ));
                    }
                    set.constraints
                        .push(Constraint::referential(neg.remove(0), tail, vars)?);
                } else {
                    let head = disjuncts(&mut cur)?;
                    cur.expect(&Tok::Dot)?;
                    add_disjuncts(head, schema, &mut pos, &mut neg, &mut phi)?;
                    set.constraints.push(Constraint::new(pos, neg, phi)?);
                }
            }
            Tok::If if !comma => {
                let mut head = Vec::new();
                for e in first {
                    match e {
                        Elem::Atom { negated, raw } => head.push(Literal::new(raw.rule_atom(schema)?, negated)),
                        Elem::Builtins(_) => {
                            return Err(Error::syntax(start, "comparisons cannot appear in a rule head"))
                        }
                    }
                }
                let rule = Rule::new(head, body(&mut cur, schema)?, RuleKind::AuxiliaryDef);
                cur.expect(&Tok::Dot)?;
                rule.check_safety()?;
                set.definitions.push(rule);
            }
            other => {
                return Err(Error::syntax(
                    start,
                    format!(
                        "malformed constraint near {}; expected a clause, an implication `->` or a rule `:-`",
                        other.describe()
                    ),
                ))
            }
        }
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one(text: &str) -> Constraint {
        let mut schema = Schema::new();
        let mut set = parse_constraints(text, &mut schema).unwrap();
        assert_eq!(set.constraints.len(), 1);
        set.constraints.remove(0)
    }

    #[test]
    fn functional_dependency_as_implication() {
        let c = one("salary(X,Y), salary(X,Z) -> Y=Z.");
        assert!(c.positives.is_empty());
        assert_eq!(c.negatives.len(), 2);
        assert_eq!(c.builtin.to_string(), "Y=Z");
        assert!(c.is_functional_dependency());
    }

    #[test]
    fn functional_dependency_as_clause() {
        let c = one("-salary(X,Y) v -salary(X,Z) v Y = Z.");
        assert_eq!(c, one("salary(X,Y), salary(X,Z) -> Y=Z."));
    }

    #[test]
    fn inclusion_dependency() {
        let c = one("p(X,Y) -> q(X,Y).");
        assert_eq!(c.positives[0].to_string(), "q(X,Y)");
        assert_eq!(c.negatives[0].to_string(), "p(X,Y)");
        assert!(c.builtin.is_false());
    }

    #[test]
    fn body_comparisons_are_complemented() {
        let c = one("emp(X,Y), Y > 10 -> rich(X).");
        assert_eq!(c.builtin.to_string(), "Y<=10");
    }

    #[test]
    fn referential_constraint() {
        let c = one("p(X) -> exists Z r(X,Z).");
        let tail = c.existential.as_ref().unwrap();
        assert_eq!(tail.atom.to_string(), "r(X,Z)");
        assert_eq!(tail.existential, vec!["Z"]);
        assert_eq!(c.negatives[0].to_string(), "p(X)");
    }

    #[test]
    fn propositional_clause() {
        let c = one("q v r.");
        assert_eq!(c.positives.len(), 2);
        assert_eq!(c.positives[0].arity(), 0);
    }

    #[test]
    fn denials_and_definitions() {
        let mut schema = Schema::new().with("emp", 2);
        let set = parse_constraints(
            "#schema person:1\n:- dom_name(X), not has_ssn(X).\nhas_ssn(X) :- emp_p(X,Y).",
            &mut schema,
        )
        .unwrap();
        assert_eq!(set.denials[0].to_string(), ":- dom_name(X), not has_ssn(X).");
        assert_eq!(set.definitions[0].to_string(), "has_ssn(X) :- emp_p(X,Y).");
        assert!(schema.contains("person"));
    }

    #[test]
    fn errors() {
        let mut s = Schema::new();
        assert!(matches!(
            parse_constraints("p(X) -> exists Y q(X,Y) v r(X).", &mut s),
            Err(Error::Syntax { .. })
        ));
        assert!(matches!(parse_constraints("X = Y.", &mut s), Err(Error::Unsafe(_))));
        assert!(matches!(
            parse_constraints("exists X p(X).", &mut s),
            Err(Error::Syntax { .. })
        ));
        assert!(matches!(
            parse_constraints("p(X) v q(X,", &mut s),
            Err(Error::Syntax { .. })
        ));
        assert!(matches!(
            parse_constraints("p(X), q(X).", &mut s),
            Err(Error::Syntax { .. })
        ));
        assert!(matches!(
            parse_constraints(":- not p(X).", &mut s),
            Err(Error::Unsafe(_))
        ));
    }
}
