//! Hierarchical optimization variables over a single flat scalar buffer.
//!
//! Declare the structure of states, inputs, and parameters once, lay it out
//! ([`variable`]), then bind it to memory and read or write any subvariable
//! through kind-typed views ([`varmap`]). The remaining modules build a small
//! multiple-shooting MPC stack on top: rigid-body models ([`dynamics`]),
//! forward-mode derivatives ([`derivatives`]), and a Gauss-Newton SQP solver
//! ([`sqp`]).

pub mod bench;
pub mod checks;
pub mod demo;
pub mod derivatives;
pub mod dynamics;
pub mod fixtures;
pub mod sqp;
pub mod variable;
pub mod varmap;

pub use derivatives::{Dual, Real};
pub use variable::{Hierarchy, Kind, Query, VarError, VariableExpr};
pub use varmap::{EagerMap, LazyMap, Slot, VariableMap, VariableMapMut, View, ViewMut};
