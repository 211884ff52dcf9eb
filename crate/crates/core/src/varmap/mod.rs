//! Binding hierarchies to flat scalar buffers.
//!
//! [`EagerMap`] owns its buffer and precomputes the slot of every addressable
//! subvariable; [`LazyMap`] wraps a caller's buffer and computes slots on
//! demand. Both answer the same queries with the same slots and hand out
//! [`View`]s that alias the buffer without copying.
//!
//! For hot loops, resolve paths once into a [`Selector`](crate::variable::Selector)
//! or an eager [`Handle`]; locating a copy then costs a few integer operations.

pub mod io;
mod map;
mod view;

pub use map::{
    EagerLocator, EagerMap, Handle, LazyLocator, LazyMap, Locator, Storage, StorageMut, VariableMap, VariableMapMut,
};
pub use view::{Slot, View, ViewMut};
