//! Variable hierarchies.
//!
//! A hierarchy is declared with a tiny expression algebra ([`leaf`], [`concat`],
//! [`replicate`], [`bind`]) and then [built](VariableExpr::build) into an
//! immutable [`Hierarchy`] in which every node already knows its size and its
//! offset inside the parent. Path queries ([`Query`]) resolve against a hierarchy
//! to a [`ResolvedVariable`], with support for skipping unambiguous ancestors.

mod expr;
mod hierarchy;
mod macros;
mod query;
mod resolve;

pub use expr::{bind, concat, leaf, replicate, VariableExpr};
pub use hierarchy::{ChildSlot, Hierarchy};
pub use query::{IntoToken, Query, Token};
pub use resolve::{ChainStep, ResolvedVariable, Selector};

use std::fmt;

use thiserror::Error;

/// The mathematical kind of a variable.
///
/// Leaves are scalars, fixed-size vectors, or unit quaternions; everything else
/// is a branch whose size is the sum of its children.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    Scalar,
    Vector(usize),
    Quaternion,
    Branch,
}

/// Number of scalars used to store a unit quaternion, in `(x, y, z, w)` order.
pub const QUATERNION_SIZE: usize = 4;

impl Kind {
    /// Kind for a leaf declared with a plain scalar count: `1` is a scalar,
    /// anything else a vector of that length.
    pub fn of_size(n: usize) -> Kind {
        if n == 1 {
            Kind::Scalar
        } else {
            Kind::Vector(n)
        }
    }

    /// Storage size of a leaf kind. `None` for branches, whose size depends on
    /// their children.
    pub fn leaf_size(&self) -> Option<usize> {
        match *self {
            Kind::Scalar => Some(1),
            Kind::Vector(n) => Some(n),
            Kind::Quaternion => Some(QUATERNION_SIZE),
            Kind::Branch => None,
        }
    }

    pub fn is_leaf(&self) -> bool {
        !matches!(self, Kind::Branch)
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::Scalar => f.write_str("scalar"),
            Kind::Vector(n) => write!(f, "vector{n}"),
            Kind::Quaternion => f.write_str("quaternion"),
            Kind::Branch => f.write_str("branch"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VarError {
    #[error("variable names must be nonempty")]
    InvalidName,
    #[error("invalid leaf kind: {0}")]
    InvalidKind(String),
    #[error("invalid composition: {0}")]
    InvalidComposition(String),
    #[error("duplicate subvariable `{name}` under `{parent}`")]
    DuplicateName { parent: String, name: String },
    #[error("malformed query: {0}")]
    InvalidQuery(String),
    #[error("no subvariable matches `{query}`")]
    UnknownPath { query: String },
    #[error("`{query}` is ambiguous, candidates: {}", chains.join(", "))]
    Ambiguous { query: String, chains: Vec<String> },
    #[error("index {index} out of range for `{node}` with {count} copies")]
    IndexOutOfRange { node: String, index: usize, count: usize },
    #[error("`{query}` needs {expected} copy indices, got {found}")]
    Arity { query: String, expected: usize, found: usize },
    #[error("size mismatch: expected {expected} scalars, got {found}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("operation requires a {expected} view, found {found}")]
    KindMismatch { expected: Kind, found: Kind },
    #[error("invalid handle {0}")]
    InvalidHandle(usize),
}

pub type Result<T, E = VarError> = std::result::Result<T, E>;
