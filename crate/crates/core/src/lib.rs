//! Cons-free algebraic functional systems: simply typed higher-order
//! rewriting with constructors, static analysis of the cons-free
//! restriction, exhaustive reduction, decision by saturation over finite
//! semantic domains, and compilation of Turing machines into cons-free
//! systems through counting modules.

pub mod afs;
pub mod analysis;
pub mod compiler;
pub mod corpus;
pub mod rewrite;
pub mod saturation;
pub mod syntax;
pub mod term;
pub mod tm;
pub mod types;

pub use afs::{Afs, AfsBuilder, Role, Rule, Signature};
pub use term::{alpha_equal, apply_substitution, match_pattern, Subst, Term, TermKind, Var};
pub use types::{Name, Sort, Symbol, Type, TypeDecl};
