use super::lexer::Tok;
use super::{is_dom_name, Cursor, RawAtom};
use crate::error::{Error, Result};
use crate::model::atom::{Atom, BodyLiteral, Literal, AUX_PREFIX, PRIMED_SUFFIX, QUERY};
use crate::model::instance::{Relation, Schema};
use crate::model::rule::{Program, Rule, RuleKind};

enum RawLit {
    Atom { negated: bool, raw: RawAtom },
    Builtin(Atom),
}

struct RawRule {
    head: Vec<(bool, RawAtom)>,
    body: Vec<(bool, RawLit)>,
    weak: bool,
}

fn raw_lit(cur: &mut Cursor) -> Result<RawLit> {
    if cur.at_builtin() {
        return Ok(RawLit::Builtin(cur.builtin()?));
    }
    let negated = cur.eat(&Tok::Minus);
    Ok(RawLit::Atom {
        negated,
        raw: cur.raw_atom()?,
    })
}

fn raw_body(cur: &mut Cursor) -> Result<Vec<(bool, RawLit)>> {
    let mut out = Vec::new();
    loop {
        let naf = cur.eat_ident("not");
        out.push((naf, raw_lit(cur)?));
        if !cur.eat(&Tok::Comma) {
            return Ok(out);
        }
    }
}

fn raw_rule(cur: &mut Cursor) -> Result<RawRule> {
    if cur.eat(&Tok::WeakIf) {
        let body = raw_body(cur)?;
        cur.expect(&Tok::Dot)?;
        return Ok(RawRule {
            head: vec![],
            body,
            weak: true,
        });
    }
    let mut head = Vec::new();
    if *cur.peek() != Tok::If {
        loop {
            let negated = cur.eat(&Tok::Minus);
            head.push((negated, cur.raw_atom()?));
            if matches!(cur.peek(), Tok::Ident(w) if w == "v") || *cur.peek() == Tok::Bar {
                cur.next();
            } else {
                break;
            }
        }
    }
    let body = if cur.eat(&Tok::If) { raw_body(cur)? } else { vec![] };
    cur.expect(&Tok::Dot)?;
    Ok(RawRule {
        head,
        body,
        weak: false,
    })
}

/// Kind of a re-parsed rule, recovered from its shape.
fn infer_kind(head: &[Literal], body: &[BodyLiteral], weak: bool) -> RuleKind {
    if weak {
        return RuleKind::WeakConstraint;
    }
    if head.is_empty() {
        return RuleKind::StrongConstraint;
    }
    if body.is_empty() {
        return RuleKind::Fact;
    }
    if head.iter().all(|l| l.atom.predicate == QUERY) {
        return RuleKind::QueryRule;
    }
    if head.len() == 1 && head[0].atom.primed {
        let comp = head[0].complement();
        if body.iter().any(|b| b.weakly_negated && b.literal == comp) {
            return RuleKind::PersistenceRule;
        }
    }
    if head.iter().any(|l| l.atom.primed) {
        if body
            .iter()
            .any(|b| !b.weakly_negated && b.literal.atom.is_database() && !b.literal.atom.primed)
            || body
                .iter()
                .any(|b| b.weakly_negated && b.literal.atom.is_database() && !b.literal.atom.primed)
        {
            RuleKind::Triggering
        } else {
            RuleKind::Stabilizing
        }
    } else {
        RuleKind::AuxiliaryDef
    }
}

/// Parses a DLV program. Predicates named `p_p` are read as the primed
/// version of `p`; when `schema` is lenient, any `p` with a primed
/// occurrence is declared as a database relation.
pub fn parse_program(text: &str, schema: &Schema) -> Result<Program> {
    let mut cur = Cursor::new(text)?;
    let mut raw = Vec::new();
    let mut schema = schema.clone();
    while !cur.at_end() {
        if cur.eat(&Tok::Hash) {
            cur.schema_directive(&mut schema)?;
            continue;
        }
        raw.push(raw_rule(&mut cur)?);
    }
    if !schema.strict {
        let atoms = raw.iter().flat_map(|r| {
            r.head
                .iter()
                .map(|(_, a)| a)
                .chain(r.body.iter().filter_map(|(_, l)| match l {
                    RawLit::Atom { raw, .. } => Some(raw),
                    RawLit::Builtin(_) => None,
                }))
        });
        for a in atoms {
            if let Some(stem) = a.name.strip_suffix(PRIMED_SUFFIX) {
                if !stem.is_empty() && !is_dom_name(stem) && !stem.starts_with(AUX_PREFIX) && stem != QUERY {
                    if let Some(rel) = schema.get(stem) {
                        if rel.arity != a.terms.len() {
                            return Err(Error::Arity {
                                predicate: stem.to_string(),
                                expected: rel.arity,
                                found: a.terms.len(),
                            });
                        }
                    } else {
                        schema.declare(stem, Relation::untyped(a.terms.len()))?;
                    }
                }
            }
        }
    }
    let mut program = Program::new();
    for r in raw {
        let head = r
            .head
            .into_iter()
            .map(|(neg, a)| Ok(Literal::new(a.rule_atom(&schema)?, neg)))
            .collect::<Result<Vec<_>>>()?;
        let body = r
            .body
            .into_iter()
            .map(|(naf, l)| {
                let literal = match l {
                    RawLit::Atom { negated, raw } => Literal::new(raw.rule_atom(&schema)?, negated),
                    RawLit::Builtin(b) => Literal::pos(b),
                };
                Ok(BodyLiteral {
                    literal,
                    weakly_negated: naf,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let kind = infer_kind(&head, &body, r.weak);
        let rule = Rule::new(head, body, kind);
        rule.check_safety()?;
        program.push(rule);
    }
    Ok(program)
}
