//! Computable self-similar groupoid actions on finite directed graphs.
//!
//! A *self-similar action* is a groupoid `G` with unit space the vertices of a
//! finite directed graph, acting on the forest of finite paths so that acting
//! on the first edge of a path leaves behind a "restriction" element acting on
//! the rest: `g·(eξ) = (g·e)(g|_e·ξ)`. Everything the action does is
//! determined by a finite rule table `e ↦ (g·e, g|_e)` per generator.
//!
//! This crate makes such actions computable:
//!
//! - [`graph`]: finite graphs, path spaces, the canonical level basis, and
//!   the uniform cylinder measure (exact rationals).
//! - [`action`]: the action/restriction calculus on edges, paths and words,
//!   rule-table validation, and decision procedures for the word problem
//!   ([`Action::is_identity`](action::Action::is_identity),
//!   [`Action::words_equal`](action::Action::words_equal)).
//! - [`orbit`]: orbits of each level, level-transitivity certificates, and
//!   fixed-path counting by transfer recursion.
//! - [`level`]: finite-level Koopman matrices, the filtration dimensions,
//!   creation operators, and exact checks of the graph-algebra and
//!   Cuntz–Pimsner covariance relations.
//! - [`cstar`]: the self-similar trace, operator-norm lower bounds, and the
//!   wreath / matrix recursions.
//! - [`parse`] / [`export`] / [`cli`]: the `.ssg` action-spec text format,
//!   DOT/CSV/JSON exports, and the `ssga` command-line tool.
//!
//! Level operators are expressed in the orthonormal basis of normalized
//! cylinder indicators, so single words become 0/1 partial permutation
//! matrices and every relation check runs in exact integer arithmetic.
//!
//! ```
//! use ssga::parse::parse_spec;
//!
//! let spec = parse_spec(include_str!("../fixtures/forest.ssg")).unwrap();
//! let action = spec.into_action().unwrap();
//! let a = action.generator_word("a").unwrap();
//! // the generator `a` maps the loop e1 to e2 and restricts to a unit
//! let e1 = action.graph().edge_id("e1").unwrap();
//! let (image, rest) = action.act_edge(&a, e1).unwrap();
//! assert_eq!(action.graph().edge_name(image), "e2");
//! assert!(rest.is_unit());
//! ```

pub mod action;
pub mod cli;
pub mod cstar;
pub mod error;
pub mod export;
pub mod graph;
pub mod level;
pub mod orbit;
pub mod parse;
pub mod scalar;
pub mod word;

pub use action::{Action, ActionSpec, Caps, Decision, ValidationReport};
pub use error::{Error, Result};
pub use graph::{Graph, LevelBasis, Path};
pub use scalar::Scalar;
pub use word::{Token, Word};
