//! Calculi of names: syllogistic and its modern descendants.
//!
//! The crate parses formulas built from categorical atoms such as `a(S,P)`
//! and `i(S,P)`, evaluates them in finite set-theoretic models, decides
//! validity over several model classes, and checks Hilbert-style,
//! sequent-style and Smiley-style derivations in a registry of axiom systems.

pub mod corpus;
pub mod decide;
pub mod parser;
pub mod proof;
pub mod representation;
pub mod semantics;
pub mod sequent;
pub mod syntax;
pub mod systems;

pub use decide::{decide, oracle_decide, DecideError, Verdict};
pub use parser::{format_formula, parse_formula, ParseError, SourceSpan};
pub use semantics::{eval, in_class, Model, ModelClass};
pub use syntax::{Atom, Connective, Formula, Functor, NameLetter, Substitution};
pub use systems::{SystemId, SystemSpec};
