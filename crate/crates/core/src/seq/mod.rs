//! Parsing and exact evaluation of user-specified integer and rational
//! sequences, plus the declared-fact machinery that turns "for all large n"
//! hypotheses into auditable finite checks.

mod ast;
mod facts;
mod parse;
mod system;

pub use ast::{Builtin, SeqExpr};
pub use facts::{check_fact_on_window, check_fact_terms, DeclaredFact, Window};
pub use parse::{parse_expr, parse_sequence, ParseError};
pub use system::{EvalError, SeqKind, SeqSystem, SequenceDef};
