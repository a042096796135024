use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// A constant of the database domain.
///
/// Integers order numerically, symbols by byte order, and every integer
/// sorts before every symbol.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Int(i64),
    Sym(String),
}

impl Value {
    pub fn sym(s: impl Into<String>) -> Self {
        Value::Sym(s.into())
    }
}

impl From<i64> for Value {
    fn from(v: i64) -> Self {
        Value::Int(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Sym(v.to_string())
    }
}

const RESERVED: &[&str] = &["not", "null", "v", "exists"];

pub(crate) fn is_plain_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_') && !RESERVED.contains(&s)
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Sym(s) if is_plain_identifier(s) => f.write_str(s),
            Value::Sym(s) => {
                f.write_str("\"")?;
                for c in s.chars() {
                    match c {
                        '"' => f.write_str("\\\"")?,
                        '\\' => f.write_str("\\\\")?,
                        c => write!(f, "{c}")?,
                    }
                }
                f.write_str("\"")
            }
        }
    }
}

/// Argument of an atom.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Const(Value),
    Var(String),
    /// Distinguished constant outside the domain, used when repairing
    /// referential constraints by insertion. Variables never take it.
    Null,
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn sym(s: impl Into<String>) -> Self {
        Term::Const(Value::Sym(s.into()))
    }

    pub fn int(i: i64) -> Self {
        Term::Const(Value::Int(i))
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Term::Var(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_const(&self) -> Option<&Value> {
        match self {
            Term::Const(v) => Some(v),
            _ => None,
        }
    }

    pub fn substitute(&self, binding: &BTreeMap<String, Term>) -> Term {
        match self {
            Term::Var(v) => binding.get(v).cloned().unwrap_or_else(|| self.clone()),
            t => t.clone(),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Const(v) => v.fmt(f),
            Term::Var(v) => f.write_str(v),
            Term::Null => f.write_str("null"),
        }
    }
}

/// Comparison predicates with a fixed extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn complement(self) -> CmpOp {
        match self {
            CmpOp::Eq => CmpOp::Ne,
            CmpOp::Ne => CmpOp::Eq,
            CmpOp::Lt => CmpOp::Ge,
            CmpOp::Ge => CmpOp::Lt,
            CmpOp::Gt => CmpOp::Le,
            CmpOp::Le => CmpOp::Gt,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

    pub fn from_symbol(s: &str) -> Option<CmpOp> {
        Some(match s {
            "=" | "==" => CmpOp::Eq,
            "!=" | "<>" => CmpOp::Ne,
            "<" => CmpOp::Lt,
            "<=" => CmpOp::Le,
            ">" => CmpOp::Gt,
            ">=" => CmpOp::Ge,
            _ => return None,
        })
    }

    /// Evaluates the comparison on ground terms. `null` only equals itself
    /// and is unordered.
    pub fn eval(self, lhs: &Term, rhs: &Term) -> Option<bool> {
        let ord = match (lhs, rhs) {
            (Term::Const(a), Term::Const(b)) => Some(a.cmp(b)),
            (Term::Null, Term::Null) => Some(Ordering::Equal),
            (Term::Null, Term::Const(_)) | (Term::Const(_), Term::Null) => None,
            _ => return None,
        };
        Some(match (self, ord) {
            (CmpOp::Eq, o) => o == Some(Ordering::Equal),
            (CmpOp::Ne, o) => o != Some(Ordering::Equal),
            (_, None) => false,
            (CmpOp::Lt, Some(o)) => o == Ordering::Less,
            (CmpOp::Le, Some(o)) => o != Ordering::Greater,
            (CmpOp::Gt, Some(o)) => o == Ordering::Greater,
            (CmpOp::Ge, Some(o)) => o != Ordering::Less,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integers_sort_before_symbols() {
        let mut vals = vec![Value::sym("b"), Value::Int(10), Value::sym("a"), Value::Int(2)];
        vals.sort();
        assert_eq!(
            vals,
            vec![Value::Int(2), Value::Int(10), Value::sym("a"), Value::sym("b")]
        );
    }

    #[test]
    fn symbols_needing_quotes() {
        assert_eq!(Value::sym("abc_1").to_string(), "abc_1");
        assert_eq!(Value::sym("V.Smith").to_string(), "\"V.Smith\"");
        assert_eq!(Value::sym("null").to_string(), "\"null\"");
        assert_eq!(Value::sym("a\"b").to_string(), "\"a\\\"b\"");
    }

    #[test]
    fn comparison_semantics() {
        let four = Term::int(4000);
        let five = Term::int(5000);
        assert_eq!(CmpOp::Gt.eval(&five, &four), Some(true));
        assert_eq!(CmpOp::Le.eval(&five, &four), Some(false));
        assert_eq!(CmpOp::Lt.eval(&Term::int(9), &Term::sym("a")), Some(true));
        assert_eq!(CmpOp::Eq.eval(&Term::Null, &Term::sym("a")), Some(false));
        assert_eq!(CmpOp::Ne.eval(&Term::Null, &Term::sym("a")), Some(true));
        assert_eq!(CmpOp::Lt.eval(&Term::Null, &Term::sym("a")), Some(false));
        assert_eq!(CmpOp::Eq.eval(&Term::var("X"), &Term::sym("a")), None);
    }

    #[test]
    fn complement_is_exact_negation() {
        let terms = [Term::int(1), Term::int(2), Term::sym("a")];
        for op in [CmpOp::Eq, CmpOp::Ne, CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge] {
            assert_eq!(op.complement().complement(), op);
            for a in &terms {
                for b in &terms {
                    assert_eq!(op.eval(a, b).map(|x| !x), op.complement().eval(a, b));
                }
            }
        }
    }
}
