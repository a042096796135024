//! Repairs and consistent query answers for inconsistent databases.

pub mod compiler;
pub mod cqa;
pub mod error;
pub mod grounder;
pub mod model;
pub mod oracle;
pub mod parser;
pub mod solver;
pub mod wfs;

pub use error::{Error, Result, SourceSpan};
pub use model::*;
