use std::ops::Range;

use crate::derivatives::Real;
use crate::variable::{Kind, ResolvedVariable, Result, VarError, QUATERNION_SIZE};

/// Location of a subvariable inside a flat buffer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Slot {
    pub offset: usize,
    pub size: usize,
    pub kind: Kind,
}

impl Slot {
    pub fn range(&self) -> Range<usize> {
        self.offset..self.offset + self.size
    }
}

impl From<&ResolvedVariable> for Slot {
    fn from(r: &ResolvedVariable) -> Slot {
        Slot { offset: r.offset(), size: r.size(), kind: r.kind() }
    }
}

/// Read-only window over part of a buffer, tagged with the kind of the
/// subvariable. Branches map to a span over all of their scalars.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct View<'a, T> {
    kind: Kind,
    data: &'a [T],
}

/// Mutable window over part of a buffer. Writes go straight to the buffer.
#[derive(Debug, PartialEq)]
pub struct ViewMut<'a, T> {
    kind: Kind,
    data: &'a mut [T],
}

impl<'a, T> View<'a, T> {
    /// Panics if the slot lies outside `data`.
    #[inline]
    pub fn new(slot: Slot, data: &'a [T]) -> Self {
        View { kind: slot.kind, data: &data[slot.range()] }
    }

    #[inline]
    pub fn kind(&self) -> Kind {
        self.kind
    }

    #[inline]
    pub fn as_slice(&self) -> &'a [T] {
        self.data
    }

    /// The components of a vector leaf.
    pub fn vector(&self) -> Option<&'a [T]> {
        matches!(self.kind, Kind::Vector(_)).then_some(self.data)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }
}

impl<T: Copy> View<'_, T> {
    pub fn scalar(&self) -> Option<T> {
        (self.kind == Kind::Scalar).then(|| self.data[0])
    }

    /// Components in `(x, y, z, w)` order.
    pub fn quaternion(&self) -> Option<[T; QUATERNION_SIZE]> {
        (self.kind == Kind::Quaternion).then(|| self.data.try_into().expect("quaternion slot"))
    }

    pub fn to_vec(&self) -> Vec<T> {
        self.data.to_vec()
    }
}

impl<'a, T> ViewMut<'a, T> {
    /// Panics if the slot lies outside `data`.
    #[inline]
    pub fn new(slot: Slot, data: &'a mut [T]) -> Self {
        ViewMut { kind: slot.kind, data: &mut data[slot.range()] }
    }

    #[inline]
    pub fn kind(&self) -> Kind {
        self.kind
    }

    #[inline]
    pub fn as_slice(&self) -> &[T] {
        self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [T] {
        self.data
    }

    pub fn quaternion_mut(&mut self) -> Option<&mut [T; QUATERNION_SIZE]> {
        if self.kind != Kind::Quaternion {
            return None;
        }
        Some(self.data.try_into().expect("quaternion slot"))
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }
}

impl<T: Copy> ViewMut<'_, T> {
    /// Copies `values` into the window; the lengths must agree.
    pub fn write(&mut self, values: &[T]) -> Result<()> {
        if self.data.len() != values.len() {
            return Err(VarError::SizeMismatch { expected: self.data.len(), found: values.len() });
        }
        self.data.copy_from_slice(values);
        Ok(())
    }

    pub fn fill(&mut self, value: T) {
        self.data.fill(value);
    }
}

impl<T: Real> ViewMut<'_, T> {
    pub fn set_zero(&mut self) {
        self.fill(T::zero());
    }

    /// Writes the identity rotation `(0, 0, 0, 1)`. Only valid on quaternions.
    pub fn set_identity(&mut self) -> Result<()> {
        let found = self.kind;
        let q = self.quaternion_mut().ok_or(VarError::KindMismatch { expected: Kind::Quaternion, found })?;
        *q = [T::zero(), T::zero(), T::zero(), T::one()];
        Ok(())
    }
}
