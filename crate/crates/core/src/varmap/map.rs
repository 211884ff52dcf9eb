use std::sync::Arc;

use super::view::{Slot, View, ViewMut};
use crate::derivatives::Real;
use crate::variable::{Hierarchy, Kind, Query, Result, Selector, VarError};

/// Turns queries into buffer slots for one hierarchy.
pub trait Locator {
    fn hierarchy(&self) -> &Hierarchy;

    fn locate(&self, query: &Query) -> Result<Slot>;

    /// Locates one copy of a pre-resolved selector. The selector must come
    /// from this locator's hierarchy.
    fn locate_at(&self, selector: &Selector, indices: &[usize]) -> Result<Slot>;
}

/// Index into an eager view table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Handle(usize);

/// Locator holding the slot of every addressable subvariable, computed once.
#[derive(Debug, Clone)]
pub struct EagerLocator {
    hierarchy: Hierarchy,
    table: Arc<[Slot]>,
}

impl EagerLocator {
    pub fn new(hierarchy: &Hierarchy) -> EagerLocator {
        let placeholder = Slot { offset: 0, size: 0, kind: Kind::Branch };
        let mut table = vec![placeholder; hierarchy.addressable_count()];
        let mut stack = vec![(hierarchy, 0usize, 0usize)];
        while let Some((node, id, offset)) = stack.pop() {
            table[id] = Slot { offset, size: node.size(), kind: node.kind() };
            for child in node.children() {
                for k in 0..child.count() {
                    stack.push((
                        child.hierarchy(),
                        id + child.id_offset() + k * child.id_stride(),
                        offset + child.offset() + k * child.stride(),
                    ));
                }
            }
        }
        EagerLocator { hierarchy: hierarchy.clone(), table: table.into() }
    }

    /// Every addressable slot, the root first, in depth-first order.
    pub fn slots(&self) -> &[Slot] {
        &self.table
    }

    pub fn handle(&self, query: &Query) -> Result<Handle> {
        Ok(Handle(self.hierarchy.resolve(query)?.id()))
    }

    pub fn handle_at(&self, selector: &Selector, indices: &[usize]) -> Result<Handle> {
        let (_, id) = selector.locate(indices)?;
        if selector.root_size() != self.hierarchy.size() || id >= self.table.len() {
            return Err(VarError::InvalidHandle(id));
        }
        Ok(Handle(id))
    }

    /// Panics on handles from another hierarchy that fall outside the table.
    #[inline]
    pub fn slot(&self, handle: Handle) -> Slot {
        self.table[handle.0]
    }
}

impl Locator for EagerLocator {
    fn hierarchy(&self) -> &Hierarchy {
        &self.hierarchy
    }

    fn locate(&self, query: &Query) -> Result<Slot> {
        let handle = self.handle(query)?;
        Ok(self.slot(handle))
    }

    fn locate_at(&self, selector: &Selector, indices: &[usize]) -> Result<Slot> {
        let handle = self.handle_at(selector, indices)?;
        Ok(self.slot(handle))
    }
}

/// Locator that computes slots on demand from offsets and strides.
#[derive(Debug, Clone)]
pub struct LazyLocator {
    hierarchy: Hierarchy,
}

impl LazyLocator {
    pub fn new(hierarchy: &Hierarchy) -> LazyLocator {
        LazyLocator { hierarchy: hierarchy.clone() }
    }
}

impl Locator for LazyLocator {
    fn hierarchy(&self) -> &Hierarchy {
        &self.hierarchy
    }

    fn locate(&self, query: &Query) -> Result<Slot> {
        self.hierarchy.resolve(query).map(|r| Slot::from(&r))
    }

    fn locate_at(&self, selector: &Selector, indices: &[usize]) -> Result<Slot> {
        if selector.root_size() != self.hierarchy.size() {
            return Err(VarError::SizeMismatch { expected: self.hierarchy.size(), found: selector.root_size() });
        }
        let offset = selector.offset(indices)?;
        Ok(Slot { offset, size: selector.size(), kind: selector.kind() })
    }
}

/// Anything that can back a lazy map.
pub trait Storage {
    type Scalar;
    fn scalars(&self) -> &[Self::Scalar];
}

pub trait StorageMut: Storage {
    fn scalars_mut(&mut self) -> &mut [Self::Scalar];
}

impl<T> Storage for Vec<T> {
    type Scalar = T;
    fn scalars(&self) -> &[T] {
        self
    }
}

impl<T> StorageMut for Vec<T> {
    fn scalars_mut(&mut self) -> &mut [T] {
        self
    }
}

impl<T> Storage for &[T] {
    type Scalar = T;
    fn scalars(&self) -> &[T] {
        self
    }
}

impl<T> Storage for &mut [T] {
    type Scalar = T;
    fn scalars(&self) -> &[T] {
        self
    }
}

impl<T> StorageMut for &mut [T] {
    fn scalars_mut(&mut self) -> &mut [T] {
        self
    }
}

impl<T> Storage for &mut Vec<T> {
    type Scalar = T;
    fn scalars(&self) -> &[T] {
        self
    }
}

impl<T> StorageMut for &mut Vec<T> {
    fn scalars_mut(&mut self) -> &mut [T] {
        self
    }
}

/// A hierarchy bound to a buffer of exactly its size.
pub trait VariableMap {
    type Scalar: Copy;
    type Locator: Locator;

    fn locator(&self) -> &Self::Locator;

    /// The whole buffer, e.g. to hand it to a solver.
    fn as_slice(&self) -> &[Self::Scalar];

    fn hierarchy(&self) -> &Hierarchy {
        self.locator().hierarchy()
    }

    fn slot(&self, query: &Query) -> Result<Slot> {
        self.locator().locate(query)
    }

    fn get(&self, query: &Query) -> Result<View<'_, Self::Scalar>> {
        let slot = self.slot(query)?;
        Ok(View::new(slot, self.as_slice()))
    }

    fn get_at(&self, selector: &Selector, indices: &[usize]) -> Result<View<'_, Self::Scalar>> {
        let slot = self.locator().locate_at(selector, indices)?;
        Ok(View::new(slot, self.as_slice()))
    }
}

pub trait VariableMapMut: VariableMap {
    fn as_mut_slice(&mut self) -> &mut [Self::Scalar];

    fn get_mut(&mut self, query: &Query) -> Result<ViewMut<'_, Self::Scalar>> {
        let slot = self.slot(query)?;
        Ok(ViewMut::new(slot, self.as_mut_slice()))
    }

    fn get_mut_at(&mut self, selector: &Selector, indices: &[usize]) -> Result<ViewMut<'_, Self::Scalar>> {
        let slot = self.locator().locate_at(selector, indices)?;
        Ok(ViewMut::new(slot, self.as_mut_slice()))
    }
}

fn check_len(hierarchy: &Hierarchy, len: usize) -> Result<()> {
    if hierarchy.size() != len {
        return Err(VarError::SizeMismatch { expected: hierarchy.size(), found: len });
    }
    Ok(())
}

/// Map owning its buffer, with the slot of every subvariable precomputed at
/// construction. Access through a [`Handle`] is a single table load.
#[derive(Debug, Clone)]
pub struct EagerMap<T = f64> {
    locator: EagerLocator,
    buffer: Vec<T>,
}

impl<T: Real> EagerMap<T> {
    /// Binds `hierarchy` to a zero-initialized buffer.
    pub fn new(hierarchy: &Hierarchy) -> EagerMap<T> {
        EagerMap { locator: EagerLocator::new(hierarchy), buffer: vec![T::zero(); hierarchy.size()] }
    }
}

impl<T> EagerMap<T> {
    pub fn from_buffer(hierarchy: &Hierarchy, buffer: Vec<T>) -> Result<EagerMap<T>> {
        check_len(hierarchy, buffer.len())?;
        Ok(EagerMap { locator: EagerLocator::new(hierarchy), buffer })
    }

    /// Reuses an existing table, e.g. for a second buffer of the same layout.
    pub fn with_locator(locator: EagerLocator, buffer: Vec<T>) -> Result<EagerMap<T>> {
        check_len(locator.hierarchy(), buffer.len())?;
        Ok(EagerMap { locator, buffer })
    }

    pub fn into_buffer(self) -> Vec<T> {
        self.buffer
    }

    #[inline]
    pub fn get_handle(&self, handle: Handle) -> View<'_, T> {
        View::new(self.locator.slot(handle), &self.buffer)
    }

    #[inline]
    pub fn get_handle_mut(&mut self, handle: Handle) -> ViewMut<'_, T> {
        ViewMut::new(self.locator.slot(handle), &mut self.buffer)
    }
}

impl<T: Copy> VariableMap for EagerMap<T> {
    type Scalar = T;
    type Locator = EagerLocator;

    fn locator(&self) -> &EagerLocator {
        &self.locator
    }

    fn as_slice(&self) -> &[T] {
        &self.buffer
    }
}

impl<T: Copy> VariableMapMut for EagerMap<T> {
    fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.buffer
    }
}

/// Map over a caller-supplied buffer. Views are computed per access from two
/// integers; nothing but the hierarchy handle is stored.
#[derive(Debug, Clone)]
pub struct LazyMap<B> {
    locator: LazyLocator,
    buffer: B,
}

impl<B: Storage> LazyMap<B> {
    pub fn new(hierarchy: &Hierarchy, buffer: B) -> Result<LazyMap<B>> {
        check_len(hierarchy, buffer.scalars().len())?;
        Ok(LazyMap { locator: LazyLocator::new(hierarchy), buffer })
    }

    pub fn with_locator(locator: LazyLocator, buffer: B) -> Result<LazyMap<B>> {
        check_len(locator.hierarchy(), buffer.scalars().len())?;
        Ok(LazyMap { locator, buffer })
    }

    pub fn into_inner(self) -> B {
        self.buffer
    }
}

impl<B> VariableMap for LazyMap<B>
where
    B: Storage,
    B::Scalar: Copy,
{
    type Scalar = B::Scalar;
    type Locator = LazyLocator;

    fn locator(&self) -> &LazyLocator {
        &self.locator
    }

    fn as_slice(&self) -> &[B::Scalar] {
        self.buffer.scalars()
    }
}

impl<B> VariableMapMut for LazyMap<B>
where
    B: StorageMut,
    B::Scalar: Copy,
{
    fn as_mut_slice(&mut self) -> &mut [B::Scalar] {
        self.buffer.scalars_mut()
    }
}
