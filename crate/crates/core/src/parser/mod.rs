//! Text formats: ground facts, constraints, queries and DLV programs.
//!
//! Statements end with `.`; `%` starts a comment. Identifiers starting with
//! a lowercase letter, quoted strings and integers are constants; identifiers
//! starting with an uppercase letter are variables. `null` is the null
//! constant. A relation may be declared with `#schema name:arity[:sort,...]`.

mod constraints;
mod facts;
mod lexer;
mod program;
mod query;

pub use constraints::{parse_constraints, ConstraintSet};
pub use facts::{emit_facts, parse_domain, parse_instance};
pub use program::parse_program;
pub use query::parse_query;

use lexer::{Tok, Token};

use crate::error::{Error, Result, SourceSpan};
use crate::model::atom::{Atom, AtomKind, DOM, PRIMED_SUFFIX};
use crate::model::instance::{Relation, Schema};
use crate::model::rule::Program;
use crate::model::term::{CmpOp, Term};

/// Instance and constraints read together; relations first mentioned in
/// the constraint file are added to the instance schema.
pub fn parse_problem(facts: &str, ics: &str) -> Result<(crate::model::instance::DatabaseInstance, ConstraintSet)> {
    let mut r = parse_instance(facts, Schema::new())?;
    let set = parse_constraints(ics, &mut r.schema)?;
    Ok((r, set))
}

/// DLV rendering of a program, one rule per line.
pub fn emit_dlv(p: &Program) -> String {
    p.to_string()
}

pub(crate) struct Cursor {
    toks: Vec<Token>,
    pos: usize,
}

impl Cursor {
    pub(crate) fn new(text: &str) -> Result<Self> {
        Ok(Cursor {
            toks: lexer::tokenize(text, None)?,
            pos: 0,
        })
    }

    pub(crate) fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    pub(crate) fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.pos + n).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    pub(crate) fn span(&self) -> SourceSpan {
        self.toks[self.pos].span.clone()
    }

    pub(crate) fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub(crate) fn at_end(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    pub(crate) fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.next();
            true
        } else {
            false
        }
    }

    pub(crate) fn eat_ident(&mut self, word: &str) -> bool {
        if matches!(self.peek(), Tok::Ident(w) if w == word) {
            self.next();
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, tok: &Tok) -> Result<SourceSpan> {
        if self.peek() == tok {
            Ok(self.next().span)
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    pub(crate) fn unexpected(&self, wanted: &str) -> Error {
        Error::syntax(
            self.span(),
            format!("expected {wanted}, found {}", self.peek().describe()),
        )
    }

    pub(crate) fn term(&mut self) -> Result<Term> {
        let span = self.span();
        match self.next().tok {
            Tok::Var(v) if v == "_" => Err(Error::syntax(span, "anonymous variables are not supported")),
            Tok::Var(v) => Ok(Term::Var(v)),
            Tok::Ident(s) if s == "null" => Ok(Term::Null),
            Tok::Ident(s) | Tok::Str(s) => Ok(Term::sym(s)),
            Tok::Int(i) => Ok(Term::int(i)),
            Tok::Minus => match self.next().tok {
                Tok::Int(i) => Ok(Term::int(-i)),
                _ => Err(Error::syntax(span, "expected an integer after `-`")),
            },
            other => Err(Error::syntax(
                span,
                format!("expected a term, found {}", other.describe()),
            )),
        }
    }

    pub(crate) fn raw_atom(&mut self) -> Result<RawAtom> {
        let span = self.span();
        let name = match self.next().tok {
            Tok::Ident(s) => s,
            other => {
                return Err(Error::syntax(
                    span,
                    format!("expected a predicate, found {}", other.describe()),
                ))
            }
        };
        let mut terms = Vec::new();
        if self.eat(&Tok::LParen) {
            loop {
                terms.push(self.term()?);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect(&Tok::RParen)?;
        }
        Ok(RawAtom { name, terms, span })
    }

    /// Whether the upcoming tokens form a comparison rather than an atom.
    pub(crate) fn at_builtin(&self) -> bool {
        match self.peek() {
            Tok::Ident(_) => matches!(self.peek_at(1), Tok::Cmp(_)),
            Tok::Var(_) | Tok::Str(_) | Tok::Int(_) => true,
            Tok::Minus => matches!(self.peek_at(1), Tok::Int(_)),
            _ => false,
        }
    }

    pub(crate) fn builtin(&mut self) -> Result<Atom> {
        let lhs = self.term()?;
        let span = self.span();
        let op = match self.next().tok {
            Tok::Cmp(s) => CmpOp::from_symbol(s).expect("lexer emits known comparisons"),
            other => {
                return Err(Error::syntax(
                    span,
                    format!("expected a comparison, found {}", other.describe()),
                ))
            }
        };
        let rhs = self.term()?;
        Ok(Atom::builtin(op, lhs, rhs))
    }

    /// `#schema name:arity[:sort,...][.]`, after the `#`.
    pub(crate) fn schema_directive(&mut self, schema: &mut Schema) -> Result<()> {
        let span = self.span();
        if !self.eat_ident("schema") {
            return Err(Error::syntax(span, "unknown directive; expected `#schema`"));
        }
        let rel = self.raw_atom()?;
        if !rel.terms.is_empty() {
            return Err(Error::syntax(rel.span, "expected `name:arity`"));
        }
        self.expect(&Tok::Colon)?;
        let span = self.span();
        let arity = match self.next().tok {
            Tok::Int(n) if n >= 0 => n as usize,
            _ => return Err(Error::syntax(span, "expected an arity")),
        };
        let mut sorts = vec![None; arity];
        if self.eat(&Tok::Colon) {
            let mut given = Vec::new();
            loop {
                let span = self.span();
                match self.next().tok {
                    Tok::Ident(s) => given.push(Some(s)),
                    Tok::Var(s) if s == "_" => given.push(None),
                    _ => return Err(Error::syntax(span, "expected a sort name")),
                }
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            if given.len() != arity {
                return Err(Error::syntax(
                    rel.span,
                    format!("{} sorts given for arity {arity}", given.len()),
                ));
            }
            sorts = given;
        }
        self.eat(&Tok::Dot);
        schema.declare(rel.name, Relation { arity, sorts })
    }
}

#[derive(Debug, Clone)]
pub(crate) struct RawAtom {
    pub name: String,
    pub terms: Vec<Term>,
    pub span: SourceSpan,
}

impl RawAtom {
    /// A database atom, declaring its relation in a lenient schema.
    pub(crate) fn database(self, schema: &mut Schema) -> Result<Atom> {
        if is_dom_name(&self.name) || self.name.ends_with(PRIMED_SUFFIX) && schema.contains(self.stem()) {
            return Err(Error::syntax(
                self.span,
                format!("`{}` is not a database relation", self.name),
            ));
        }
        let atom = Atom::database(self.name, self.terms);
        schema.admit(&atom)?;
        Ok(atom)
    }

    fn stem(&self) -> &str {
        self.name.strip_suffix(PRIMED_SUFFIX).unwrap_or(&self.name)
    }

    /// Classifies a rule atom: domain guard, primed or plain database atom,
    /// or auxiliary atom.
    pub(crate) fn rule_atom(self, schema: &Schema) -> Result<Atom> {
        if is_dom_name(&self.name) {
            if self.terms.len() != 1 {
                return Err(Error::Arity {
                    predicate: self.name,
                    expected: 1,
                    found: self.terms.len(),
                });
            }
            let sort = self.name.strip_prefix("dom_").map(str::to_string);
            let term = self.terms.into_iter().next().expect("arity checked");
            return Ok(Atom::dom(sort.as_deref(), term));
        }
        let (name, primed) = match self.name.strip_suffix(PRIMED_SUFFIX) {
            Some(stem) if schema.contains(stem) => (stem.to_string(), true),
            _ => (self.name.clone(), false),
        };
        if schema.contains(&name) {
            let mut atom = Atom::database(name, self.terms);
            schema.check_atom(&atom)?;
            atom.primed = primed;
            Ok(atom)
        } else {
            Ok(Atom {
                kind: AtomKind::Auxiliary,
                ..Atom::database(name, self.terms)
            })
        }
    }
}

pub(crate) fn is_dom_name(name: &str) -> bool {
    name == DOM || name.starts_with("dom_")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schema_directive_with_sorts() {
        let mut c = Cursor::new("#schema emp:2:name,number.").unwrap();
        let mut schema = Schema::new();
        c.expect(&Tok::Hash).unwrap();
        c.schema_directive(&mut schema).unwrap();
        assert_eq!(schema.sort_of("emp", 1), Some("number"));
        assert!(c.at_end());
    }

    #[test]
    fn rule_atoms_are_classified() {
        let schema = Schema::new().with("emp", 2);
        let parse = |s: &str| Cursor::new(s).unwrap().raw_atom().unwrap().rule_atom(&schema).unwrap();
        let a = parse("emp_p(X,Y)");
        assert!(a.primed && a.is_database() && a.predicate == "emp");
        assert_eq!(parse("dom_name(X)").kind, AtomKind::DomainGuard);
        assert_eq!(parse("has_ssn(X)").kind, AtomKind::Auxiliary);
        assert!(Cursor::new("emp_p(X)")
            .unwrap()
            .raw_atom()
            .unwrap()
            .rule_atom(&schema)
            .is_err());
    }

    #[test]
    fn negative_integers_and_null() {
        let mut c = Cursor::new("p(-3, null)").unwrap();
        let a = c.raw_atom().unwrap();
        assert_eq!(a.terms, vec![Term::int(-3), Term::Null]);
    }

    #[test]
    fn empty_program_emits_nothing() {
        assert_eq!(emit_dlv(&Program::new()), "");
    }
}
