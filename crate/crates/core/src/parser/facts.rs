use std::fmt::Write as _;

use super::lexer::Tok;
use super::{is_dom_name, Cursor};
use crate::error::{Error, Result};
use crate::grounder::FiniteDomain;
use crate::model::instance::{DatabaseInstance, Schema};
use crate::model::term::Term;

/// Parses `.facts` text: ground atoms `p(c1,...,ck).` and `#schema` lines.
/// Relations unknown to a lenient `schema` are declared on first use.
pub fn parse_instance(text: &str, schema: Schema) -> Result<DatabaseInstance> {
    let mut cur = Cursor::new(text)?;
    let mut inst = DatabaseInstance::new(schema);
    while !cur.at_end() {
        if cur.eat(&Tok::Hash) {
            cur.schema_directive(&mut inst.schema)?;
            continue;
        }
        let raw = cur.raw_atom()?;
        let span = raw.span.clone();
        if let Some(t) = raw.terms.iter().find(|t| !matches!(t, Term::Const(_))) {
            let what = if t.is_var() { "a variable" } else { "null" };
            return Err(Error::syntax(span, format!("fact `{}` contains {what}", raw.name)));
        }
        let atom = raw.database(&mut inst.schema)?;
        inst.insert(atom)?;
        cur.expect(&Tok::Dot)?;
    }
    Ok(inst)
}

/// Renders an instance as `.facts` text that parses back to it.
pub fn emit_facts(inst: &DatabaseInstance) -> String {
    let mut out = String::new();
    for (name, rel) in inst.schema.relations() {
        write!(out, "#schema {name}:{}", rel.arity).unwrap();
        if rel.sorts.iter().any(Option::is_some) {
            let sorts: Vec<&str> = rel.sorts.iter().map(|s| s.as_deref().unwrap_or("_")).collect();
            write!(out, ":{}", sorts.join(",")).unwrap();
        }
        out.push_str(".\n");
    }
    for f in inst.facts() {
        writeln!(out, "{f}.").unwrap();
    }
    out
}

/// Parses a domain file of facts `dom(c).` and `dom_<sort>(c).`
pub fn parse_domain(text: &str) -> Result<FiniteDomain> {
    let mut cur = Cursor::new(text)?;
    let mut dom = FiniteDomain::default();
    while !cur.at_end() {
        let raw = cur.raw_atom()?;
        if !is_dom_name(&raw.name) || raw.terms.len() != 1 {
            return Err(Error::syntax(raw.span, "expected `dom(c).` or `dom_<sort>(c).`"));
        }
        let value = match &raw.terms[0] {
            Term::Const(v) => v.clone(),
            _ => return Err(Error::syntax(raw.span, "domain elements must be constants")),
        };
        match raw.name.strip_prefix("dom_") {
            Some(sort) => dom.add_sorted(sort, value),
            None => dom.add(value),
        }
        cur.expect(&Tok::Dot)?;
    }
    if dom.is_empty() {
        return Err(Error::Schema("declared domain is empty".into()));
    }
    Ok(dom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::term::Value;

    #[test]
    fn salary_facts() {
        let inst = parse_instance("salary(\"V.Smith\",5000). salary(\"V.Smith\",8000).", Schema::new()).unwrap();
        assert_eq!(inst.len(), 2);
        assert_eq!(inst.schema.get("salary").unwrap().arity, 2);
    }

    #[test]
    fn empty_text_is_empty_instance() {
        assert!(parse_instance("", Schema::new()).unwrap().is_empty());
        assert!(parse_instance("  % nothing\n", Schema::new()).unwrap().is_empty());
    }

    #[test]
    fn duplicates_collapse() {
        assert_eq!(parse_instance("p(a,b). p(a,b).", Schema::new()).unwrap().len(), 1);
    }

    #[test]
    fn bad_facts_rejected() {
        assert!(matches!(
            parse_instance("p(X).", Schema::new()),
            Err(Error::Syntax { .. })
        ));
        assert!(matches!(
            parse_instance("p(a). p(a,b).", Schema::new()),
            Err(Error::Arity { .. })
        ));
        assert!(parse_instance("p(null).", Schema::new()).is_err());
        assert!(matches!(
            parse_instance("p(a)", Schema::new()),
            Err(Error::Syntax { .. })
        ));
        assert!(parse_instance("q(a).", Schema::strict().with("p", 1)).is_err());
    }

    #[test]
    fn schema_header_and_round_trip() {
        let text = "#schema emp:2:name,number\nemp(\"Irwin Koper\", \"677-223-112\").\nemp(bob, 3).";
        let inst = parse_instance(text, Schema::new()).unwrap();
        assert_eq!(inst.schema.sort_of("emp", 0), Some("name"));
        let again = parse_instance(&emit_facts(&inst), Schema::new()).unwrap();
        assert_eq!(again, inst);
    }

    #[test]
    fn domain_file() {
        let d = parse_domain("dom(a). dom(b). dom_name(\"x\").").unwrap();
        assert!(d.all().contains(&Value::sym("x")));
        assert!(d.all().contains(&Value::sym("a")));
        assert!(parse_domain("").is_err());
        assert!(parse_domain("p(a).").is_err());
    }
}
