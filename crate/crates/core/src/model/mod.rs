//! Terms, atoms, rules, constraints, instances and interpretations.

pub mod atom;
pub mod constraint;
pub mod instance;
pub mod interp;
pub mod query;
pub mod rule;
pub mod term;

pub use atom::{complement, dom_predicate, Atom, AtomKind, BodyLiteral, Literal};
pub use constraint::{BuiltinFormula, Constraint, ExistentialTail};
pub use instance::{delta, DatabaseInstance, Delta, Relation, Repair, Schema};
pub use interp::{AnswerSet, ThreeValuedInterpretation};
pub use query::{Formula, KQuery};
pub use rule::{Program, Rule, RuleKind};
pub use term::{CmpOp, Term, Value};
