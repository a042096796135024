use std::collections::BTreeSet;

use super::lexer::Tok;
use super::Cursor;
use crate::error::{Error, Result, SourceSpan};
use crate::model::instance::Schema;
use crate::model::query::{Formula, KQuery};

/// Parse tree before `K` nodes are separated from basic formulas.
enum Node {
    Leaf(Formula),
    Not(Box<Node>),
    And(Box<Node>, Box<Node>),
    Or(Box<Node>, Box<Node>),
    Exists(Vec<String>, Box<Node>),
    K(Box<Node>, SourceSpan),
}

fn disjunction(cur: &mut Cursor, schema: &Schema) -> Result<Node> {
    let mut left = conjunction(cur, schema)?;
    while cur.eat(&Tok::Bar) {
        let right = conjunction(cur, schema)?;
        left = Node::Or(Box::new(left), Box::new(right));
    }
    Ok(left)
}

fn conjunction(cur: &mut Cursor, schema: &Schema) -> Result<Node> {
    let mut left = unary(cur, schema)?;
    while cur.eat(&Tok::Amp) {
        let right = unary(cur, schema)?;
        left = Node::And(Box::new(left), Box::new(right));
    }
    Ok(left)
}

fn unary(cur: &mut Cursor, schema: &Schema) -> Result<Node> {
    if cur.eat(&Tok::Bang) {
        return Ok(Node::Not(Box::new(unary(cur, schema)?)));
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
        // the quantifier extends as far right as possible
        return Ok(Node::Exists(vars, Box::new(disjunction(cur, schema)?)));
    }
    if matches!(cur.peek(), Tok::Var(k) if k == "K") && *cur.peek_at(1) == Tok::LParen {
        let span = cur.next().span;
        cur.next();
        let inner = disjunction(cur, schema)?;
        cur.expect(&Tok::RParen)?;
        return Ok(Node::K(Box::new(inner), span));
    }
    if cur.eat(&Tok::LParen) {
        let inner = disjunction(cur, schema)?;
        cur.expect(&Tok::RParen)?;
        return Ok(inner);
    }
    if cur.at_builtin() {
        return Ok(Node::Leaf(Formula::Atom(cur.builtin()?)));
    }
    let raw = cur.raw_atom()?;
    let span = raw.span.clone();
    if !schema.contains(&raw.name) {
        return Err(Error::syntax(span, format!("unknown relation `{}` in query", raw.name)));
    }
    let mut lenient = schema.clone();
    Ok(Node::Leaf(Formula::Atom(raw.database(&mut lenient)?)))
}

fn has_k(n: &Node) -> bool {
    match n {
        Node::Leaf(_) => false,
        Node::K(..) => true,
        Node::Not(a) | Node::Exists(_, a) => has_k(a),
        Node::And(a, b) | Node::Or(a, b) => has_k(a) || has_k(b),
    }
}

fn basic(n: Node) -> Result<Formula> {
    Ok(match n {
        Node::Leaf(f) => f,
        Node::Not(a) => !basic(*a)?,
        Node::And(a, b) => Formula::and(basic(*a)?, basic(*b)?),
        Node::Or(a, b) => Formula::or(basic(*a)?, basic(*b)?),
        Node::Exists(vs, a) => Formula::exists(vs, basic(*a)?),
        Node::K(_, span) => return Err(Error::syntax(span, "nested `K` is not supported")),
    })
}

fn k_level(n: Node, start: &SourceSpan) -> Result<KQuery> {
    Ok(match n {
        Node::K(inner, _) => KQuery::K(basic(*inner)?),
        Node::Leaf(f) => {
            return Err(Error::syntax(
                start.clone(),
                format!("`{f}` must appear inside `K(...)` when the query uses `K`"),
            ))
        }
        Node::Not(a) => KQuery::Not(Box::new(k_level(*a, start)?)),
        Node::And(a, b) => KQuery::And(Box::new(k_level(*a, start)?), Box::new(k_level(*b, start)?)),
        Node::Or(a, b) => KQuery::Or(Box::new(k_level(*a, start)?), Box::new(k_level(*b, start)?)),
        Node::Exists(vs, a) => KQuery::Exists(vs, Box::new(k_level(*a, start)?)),
    })
}

/// Variables guaranteed a value by some positive database atom.
fn range_restricted(f: &Formula) -> BTreeSet<String> {
    match f {
        Formula::Atom(a) if a.is_builtin() => BTreeSet::new(),
        Formula::Atom(a) => a.variables().map(str::to_string).collect(),
        Formula::Not(_) => BTreeSet::new(),
        Formula::And(a, b) => &range_restricted(a) | &range_restricted(b),
        Formula::Or(a, b) => &range_restricted(a) & &range_restricted(b),
        Formula::Exists(vs, a) => {
            let mut s = range_restricted(a);
            for v in vs {
                s.remove(v);
            }
            s
        }
    }
}

/// Parses a `.q` query. Connectives are `&`, `|`, `!` and `exists V,...`;
/// `K(...)` marks certainty. A query without `K` is read as `K(query)`.
/// Every answer variable must occur in a positive database atom.
pub fn parse_query(text: &str, schema: &Schema) -> Result<KQuery> {
    let mut cur = Cursor::new(text)?;
    let start = cur.span();
    let node = disjunction(&mut cur, schema)?;
    cur.eat(&Tok::Dot);
    if !cur.at_end() {
        return Err(cur.unexpected("end of query"));
    }
    let q = if has_k(&node) {
        k_level(node, &start)?
    } else {
        KQuery::K(basic(node)?)
    };
    for b in q.k_nodes() {
        let rr = range_restricted(b);
        if let Some(v) = b.free_variables().into_iter().find(|v| !rr.contains(v)) {
            return Err(Error::Unsafe(format!(
                "query `{b}`: variable {v} does not occur in a positive database atom"
            )));
        }
    }
    let rr = q.range_restricted();
    if let Some(v) = q.free_variables().into_iter().find(|v| !rr.contains(v)) {
        return Err(Error::Unsafe(format!(
            "query `{q}`: answer variable {v} is not bounded by a positive K subquery"
        )));
    }
    Ok(q)
}
