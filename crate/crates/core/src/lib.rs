//! A kernel for the simply typed λμ-calculus.
//!
//! Terms are parsed from a small concrete syntax ([`syntax`]), checked
//! Church-style against the four rules `ax`, `->i`, `->e` and `bot_c`
//! ([`typing`]) and reduced with the β-rule and the μ-rule
//! `(μx M N) → μy M[x:=λz (y (z N))]` ([`reduction`]). [`sn`] explores
//! alpha-quotiented reduction graphs to decide strong normalization and
//! compute η, the length of the longest reduction. [`lab`] enumerates and
//! samples typed terms and runs the normalization lemmas as executable
//! checks.

pub mod canon;
pub mod lab;
pub mod reduction;
pub mod sn;
pub mod syntax;
pub mod term;
pub mod typing;

pub use canon::{alpha_eq, canonicalize, CanonicalTerm};
pub use syntax::{parse_term, parse_type, print_term, ParseError, SourceSpan};
pub use term::{fresh_name, BinderKind, Name, Substitution, Term, Type};
pub use typing::{infer, infer_canonical, Context, TypeError, TypeErrorKind};
