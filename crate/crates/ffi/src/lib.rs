//! C ABI over strata's variable hierarchies and maps.
//!
//! Every function returns a [`StrataStatus`]; on failure a message is kept in
//! thread-local storage until the next call on the same thread and can be read
//! with [`strata_last_error`]. Objects are opaque handles created by
//! `*_new`/`*_build`-style functions and released with the matching `*_free`.
//! Panics never cross the boundary: they are reported as
//! [`StrataStatus::Panic`].
//!
//! Queries are arrays of [`StrataToken`]: a token with a non-null `name` is a
//! path name, a token with a null `name` is a copy index.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use strata::variable::{bind, concat, leaf, replicate, Hierarchy, Kind, Query, Token, VarError, VariableExpr};
use strata::varmap::{EagerMap, LazyLocator, Locator, Slot, VariableMap, VariableMapMut};

/// Result of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrataStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    /// Bad name, kind or composition while building an expression.
    InvalidExpression = 4,
    UnknownPath = 5,
    Ambiguous = 6,
    /// Wrong number of copy indices for the matched path.
    Arity = 7,
    IndexOutOfRange = 8,
    SizeMismatch = 9,
    KindMismatch = 10,
    /// Output array too small; the required length was still written.
    BufferTooSmall = 11,
    Panic = 12,
}

/// Leaf and node kinds. Vectors carry their length separately.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrataKindTag {
    Scalar = 0,
    Vector = 1,
    Quaternion = 2,
    Branch = 3,
}

/// One query token. `name == NULL` makes it a copy index.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct StrataToken {
    pub name: *const c_char,
    pub index: usize,
}

/// Location of a subvariable in its root's flat buffer.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StrataSlot {
    pub offset: usize,
    pub size: usize,
    pub kind: StrataKindTag,
}

/// Unbuilt variable expression.
pub struct StrataExpr(VariableExpr);

/// Built, immutable hierarchy.
pub struct StrataHierarchy(Hierarchy);

/// Owns a zero-initialized buffer with every subvariable's slot precomputed.
pub struct StrataEagerMap(EagerMap<f64>);

/// Computes slots on demand over a buffer supplied with each call.
pub struct StrataLazyMap(LazyLocator);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure {
    status: StrataStatus,
    message: String,
}

impl Failure {
    fn new(status: StrataStatus, message: impl Into<String>) -> Failure {
        Failure { status, message: message.into() }
    }
}

impl From<VarError> for Failure {
    fn from(e: VarError) -> Failure {
        let status = match &e {
            VarError::InvalidName
            | VarError::InvalidKind(_)
            | VarError::InvalidComposition(_)
            | VarError::DuplicateName { .. } => StrataStatus::InvalidExpression,
            VarError::InvalidQuery(_) | VarError::InvalidHandle(_) => StrataStatus::InvalidArgument,
            VarError::UnknownPath { .. } => StrataStatus::UnknownPath,
            VarError::Ambiguous { .. } => StrataStatus::Ambiguous,
            VarError::Arity { .. } => StrataStatus::Arity,
            VarError::IndexOutOfRange { .. } => StrataStatus::IndexOutOfRange,
            VarError::SizeMismatch { .. } => StrataStatus::SizeMismatch,
            VarError::KindMismatch { .. } => StrataStatus::KindMismatch,
        };
        Failure::new(status, e.to_string())
    }
}

fn set_last_error(message: Option<String>) {
    let message = message.map(|m| CString::new(m.replace('\0', " ")).expect("no interior nul"));
    LAST_ERROR.with(|slot| *slot.borrow_mut() = message);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> StrataStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error(None);
            StrataStatus::Ok
        }
        Ok(Err(failure)) => {
            set_last_error(Some(failure.message));
            failure.status
        }
        Err(payload) => {
            let what = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(Some(format!("panic: {what}")));
            StrataStatus::Panic
        }
    }
}

unsafe fn reference<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure::new(StrataStatus::NullPointer, format!("{what} is null")))
}

unsafe fn reference_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| Failure::new(StrataStatus::NullPointer, format!("{what} is null")))
}

unsafe fn string<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::new(StrataStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|e| Failure::new(StrataStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    match (p.is_null(), len) {
        (_, 0) => Ok(&[]),
        (true, _) => Err(Failure::new(StrataStatus::NullPointer, format!("{what} is null"))),
        (false, _) => Ok(std::slice::from_raw_parts(p, len)),
    }
}

unsafe fn slice_mut<'a, T>(p: *mut T, len: usize, what: &str) -> Result<&'a mut [T], Failure> {
    match (p.is_null(), len) {
        (_, 0) => Ok(&mut []),
        (true, _) => Err(Failure::new(StrataStatus::NullPointer, format!("{what} is null"))),
        (false, _) => Ok(std::slice::from_raw_parts_mut(p, len)),
    }
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::new(StrataStatus::NullPointer, format!("{what} is null")));
    }
    out.write(value);
    Ok(())
}

unsafe fn query(tokens: *const StrataToken, count: usize) -> Result<Query, Failure> {
    let tokens = slice(tokens, count, "tokens")?;
    let tokens = tokens
        .iter()
        .map(|t| match t.name.is_null() {
            true => Ok(Token::Index(t.index)),
            false => string(t.name, "token name").map(|s| Token::Name(s.to_owned())),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Query::new(tokens)?)
}

fn kind_tag(kind: Kind) -> StrataKindTag {
    match kind {
        Kind::Scalar => StrataKindTag::Scalar,
        Kind::Vector(_) => StrataKindTag::Vector,
        Kind::Quaternion => StrataKindTag::Quaternion,
        Kind::Branch => StrataKindTag::Branch,
    }
}

fn to_slot(s: Slot) -> StrataSlot {
    StrataSlot { offset: s.offset, size: s.size, kind: kind_tag(s.kind) }
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

/// Copies `data` into `out` if it fits; always reports the length needed.
unsafe fn copy_out(data: &[f64], out: *mut f64, capacity: usize, out_len: *mut usize) -> Result<(), Failure> {
    write_out(out_len, data.len(), "out_len")?;
    if capacity < data.len() {
        return Err(Failure::new(
            StrataStatus::BufferTooSmall,
            format!("need {} values, capacity {capacity}", data.len()),
        ));
    }
    slice_mut(out, data.len(), "out")?.copy_from_slice(data);
    Ok(())
}

/// Message for the last failed call on this thread, or null after a success.
/// Valid until the next strata call on the same thread.
#[no_mangle]
pub extern "C" fn strata_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |m| m.as_ptr()))
}

/// Static, human-readable name of a status code.
#[no_mangle]
pub extern "C" fn strata_status_name(status: StrataStatus) -> *const c_char {
    let name: &'static CStr = match status {
        StrataStatus::Ok => c"ok",
        StrataStatus::NullPointer => c"null pointer",
        StrataStatus::InvalidUtf8 => c"invalid utf-8",
        StrataStatus::InvalidArgument => c"invalid argument",
        StrataStatus::InvalidExpression => c"invalid expression",
        StrataStatus::UnknownPath => c"unknown path",
        StrataStatus::Ambiguous => c"ambiguous path",
        StrataStatus::Arity => c"wrong number of indices",
        StrataStatus::IndexOutOfRange => c"index out of range",
        StrataStatus::SizeMismatch => c"size mismatch",
        StrataStatus::KindMismatch => c"kind mismatch",
        StrataStatus::BufferTooSmall => c"buffer too small",
        StrataStatus::Panic => c"internal panic",
    };
    name.as_ptr()
}

/// Leaf expression. `kind` is a `StrataKindTag`; `len` is the vector length
/// and is ignored for other kinds.
///
/// # Safety
/// `name` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn strata_expr_leaf(
    name: *const c_char,
    kind: u32,
    len: usize,
    out: *mut *mut StrataExpr,
) -> StrataStatus {
    guard(|| {
        let name = string(name, "name")?;
        let kind = match kind {
            0 => Kind::Scalar,
            1 => Kind::Vector(len),
            2 => Kind::Quaternion,
            3 => Kind::Branch,
            other => return Err(Failure::new(StrataStatus::InvalidArgument, format!("unknown kind tag {other}"))),
        };
        write_out(out, boxed(StrataExpr(leaf(name, kind)?)), "out")
    })
}

/// Ordered concatenation of `count` expressions, which are copied.
///
/// # Safety
/// `parts` must point to `count` valid expression handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn strata_expr_concat(
    parts: *const *const StrataExpr,
    count: usize,
    out: *mut *mut StrataExpr,
) -> StrataStatus {
    guard(|| {
        let parts = slice(parts, count, "parts")?
            .iter()
            .map(|p| reference(*p, "part").map(|e| e.0.clone()))
            .collect::<Result<Vec<_>, _>>()?;
        write_out(out, boxed(StrataExpr(concat(parts)?)), "out")
    })
}

/// `count` copies of a named expression, which is copied.
///
/// # Safety
/// `expr` must be a valid handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn strata_expr_replicate(
    count: usize,
    expr: *const StrataExpr,
    out: *mut *mut StrataExpr,
) -> StrataStatus {
    guard(|| {
        let expr = reference(expr, "expr")?.0.clone();
        write_out(out, boxed(StrataExpr(replicate(count, expr)?)), "out")
    })
}

/// Names an expression, making it a branch variable.
///
/// # Safety
/// `name` must be a nul-terminated string, `expr` a valid handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn strata_expr_bind(
    name: *const c_char,
    expr: *const StrataExpr,
    out: *mut *mut StrataExpr,
) -> StrataStatus {
    guard(|| {
        let name = string(name, "name")?;
        let expr = reference(expr, "expr")?.0.clone();
        write_out(out, boxed(StrataExpr(bind(name, expr)?)), "out")
    })
}

/// # Safety
/// `expr` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn strata_expr_free(expr: *mut StrataExpr) {
    if !expr.is_null() {
        drop(Box::from_raw(expr));
    }
}

/// Builds a hierarchy from a named expression.
///
/// # Safety
/// `expr` must be a valid handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn strata_hierarchy_build(
    expr: *const StrataExpr,
    out: *mut *mut StrataHierarchy,
) -> StrataStatus {
    guard(|| {
        let h = reference(expr, "expr")?.0.build()?;
        write_out(out, boxed(StrataHierarchy(h)), "out")
    })
}

/// Quadrotor decision variables over `horizon` steps.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn strata_fixture_quadrotor(horizon: usize, out: *mut *mut StrataHierarchy) -> StrataStatus {
    guard(|| write_out(out, boxed(StrataHierarchy(strata::fixtures::quadrotor(horizon)?)), "out"))
}

/// # Safety
/// `hierarchy` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn strata_hierarchy_free(hierarchy: *mut StrataHierarchy) {
    if !hierarchy.is_null() {
        drop(Box::from_raw(hierarchy));
    }
}

/// Total number of scalars in the hierarchy's buffer.
///
/// # Safety
/// `hierarchy` must be a valid handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn strata_hierarchy_size(hierarchy: *const StrataHierarchy, out: *mut usize) -> StrataStatus {
    guard(|| write_out(out, reference(hierarchy, "hierarchy")?.0.size(), "out"))
}

/// Resolves a token query.
///
/// # Safety
/// `hierarchy` must be a valid handle, `tokens` must point to `count` tokens
/// with valid names, and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn strata_hierarchy_resolve(
    hierarchy: *const StrataHierarchy,
    tokens: *const StrataToken,
    count: usize,
    out: *mut StrataSlot,
) -> StrataStatus {
    guard(|| {
        let h = &reference(hierarchy, "hierarchy")?.0;
        let r = h.resolve(&query(tokens, count)?)?;
        write_out(out, StrataSlot { offset: r.offset(), size: r.size(), kind: kind_tag(r.kind()) }, "out")
    })
}

/// Resolves a textual query such as `"X, x, 1, linear_velocity"`.
///
/// # Safety
/// `hierarchy` must be a valid handle, `path` a nul-terminated string and
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn strata_hierarchy_resolve_path(
    hierarchy: *const StrataHierarchy,
    path: *const c_char,
    out: *mut StrataSlot,
) -> StrataStatus {
    guard(|| {
        let h = &reference(hierarchy, "hierarchy")?.0;
        let q: Query = string(path, "path")?.parse()?;
        let r = h.resolve(&q)?;
        write_out(out, StrataSlot { offset: r.offset(), size: r.size(), kind: kind_tag(r.kind()) }, "out")
    })
}

/// Eager map with a zeroed buffer. The hierarchy may be freed afterwards.
///
/// # Safety
/// `hierarchy` must be a valid handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn strata_eager_map_new(
    hierarchy: *const StrataHierarchy,
    out: *mut *mut StrataEagerMap,
) -> StrataStatus {
    guard(|| {
        let h = &reference(hierarchy, "hierarchy")?.0;
        write_out(out, boxed(StrataEagerMap(EagerMap::new(h))), "out")
    })
}

/// # Safety
/// `map` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn strata_eager_map_free(map: *mut StrataEagerMap) {
    if !map.is_null() {
        drop(Box::from_raw(map));
    }
}

/// The map's whole buffer. The pointer stays valid until the map is freed.
///
/// # Safety
/// `map` must be a valid handle; `data` and `len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn strata_eager_map_data(
    map: *mut StrataEagerMap,
    data: *mut *mut f64,
    len: *mut usize,
) -> StrataStatus {
    guard(|| {
        let buffer = reference_mut(map, "map")?.0.as_mut_slice();
        write_out(len, buffer.len(), "len")?;
        write_out(data, buffer.as_mut_ptr(), "data")
    })
}

/// Locates a query in the precomputed table.
///
/// # Safety
/// As for [`strata_hierarchy_resolve`], with a valid map handle.
#[no_mangle]
pub unsafe extern "C" fn strata_eager_map_locate(
    map: *const StrataEagerMap,
    tokens: *const StrataToken,
    count: usize,
    out: *mut StrataSlot,
) -> StrataStatus {
    guard(|| {
        let slot = reference(map, "map")?.0.slot(&query(tokens, count)?)?;
        write_out(out, to_slot(slot), "out")
    })
}

/// Copies a subvariable's values into `out`. `out_len` receives the number of
/// values, also when `capacity` is too small.
///
/// # Safety
/// `map` must be a valid handle, `tokens` must point to `count` tokens, `out`
/// must have room for `capacity` values and `out_len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn strata_eager_map_read(
    map: *const StrataEagerMap,
    tokens: *const StrataToken,
    count: usize,
    out: *mut f64,
    capacity: usize,
    out_len: *mut usize,
) -> StrataStatus {
    guard(|| {
        let map = &reference(map, "map")?.0;
        let view = map.get(&query(tokens, count)?)?;
        copy_out(view.as_slice(), out, capacity, out_len)
    })
}

/// Overwrites a subvariable; `len` must equal its size.
///
/// # Safety
/// `map` must be a valid handle, `tokens` must point to `count` tokens and
/// `values` to `len` values.
#[no_mangle]
pub unsafe extern "C" fn strata_eager_map_write(
    map: *mut StrataEagerMap,
    tokens: *const StrataToken,
    count: usize,
    values: *const f64,
    len: usize,
) -> StrataStatus {
    guard(|| {
        let map = &mut reference_mut(map, "map")?.0;
        let q = query(tokens, count)?;
        let values = slice(values, len, "values")?;
        Ok(map.get_mut(&q)?.write(values)?)
    })
}

/// Lazy map for a hierarchy. Buffers are passed to each call and must hold
/// exactly the hierarchy's size.
///
/// # Safety
/// `hierarchy` must be a valid handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn strata_lazy_map_new(
    hierarchy: *const StrataHierarchy,
    out: *mut *mut StrataLazyMap,
) -> StrataStatus {
    guard(|| {
        let h = &reference(hierarchy, "hierarchy")?.0;
        write_out(out, boxed(StrataLazyMap(LazyLocator::new(h))), "out")
    })
}

/// # Safety
/// `map` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn strata_lazy_map_free(map: *mut StrataLazyMap) {
    if !map.is_null() {
        drop(Box::from_raw(map));
    }
}

/// Computes the slot of a query.
///
/// # Safety
/// As for [`strata_hierarchy_resolve`], with a valid map handle.
#[no_mangle]
pub unsafe extern "C" fn strata_lazy_map_locate(
    map: *const StrataLazyMap,
    tokens: *const StrataToken,
    count: usize,
    out: *mut StrataSlot,
) -> StrataStatus {
    guard(|| {
        let slot = reference(map, "map")?.0.locate(&query(tokens, count)?)?;
        write_out(out, to_slot(slot), "out")
    })
}

fn checked_slot(locator: &LazyLocator, q: &Query, buffer_len: usize) -> Result<Slot, Failure> {
    let size = locator.hierarchy().size();
    if buffer_len != size {
        return Err(VarError::SizeMismatch { expected: size, found: buffer_len }.into());
    }
    Ok(locator.locate(q)?)
}

/// Copies a subvariable of `buffer` into `out`; see [`strata_eager_map_read`].
///
/// # Safety
/// `map` must be a valid handle, `buffer` must hold `buffer_len` values,
/// `tokens` must point to `count` tokens, `out` must have room for `capacity`
/// values and `out_len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn strata_lazy_map_read(
    map: *const StrataLazyMap,
    buffer: *const f64,
    buffer_len: usize,
    tokens: *const StrataToken,
    count: usize,
    out: *mut f64,
    capacity: usize,
    out_len: *mut usize,
) -> StrataStatus {
    guard(|| {
        let locator = &reference(map, "map")?.0;
        let slot = checked_slot(locator, &query(tokens, count)?, buffer_len)?;
        let buffer = slice(buffer, buffer_len, "buffer")?;
        copy_out(&buffer[slot.range()], out, capacity, out_len)
    })
}

/// Overwrites a subvariable of `buffer`; `len` must equal its size.
///
/// # Safety
/// `map` must be a valid handle, `buffer` must hold `buffer_len` writable
/// values, `tokens` must point to `count` tokens and `values` to `len` values.
#[no_mangle]
pub unsafe extern "C" fn strata_lazy_map_write(
    map: *const StrataLazyMap,
    buffer: *mut f64,
    buffer_len: usize,
    tokens: *const StrataToken,
    count: usize,
    values: *const f64,
    len: usize,
) -> StrataStatus {
    guard(|| {
        let locator = &reference(map, "map")?.0;
        let slot = checked_slot(locator, &query(tokens, count)?, buffer_len)?;
        let values = slice(values, len, "values")?;
        if values.len() != slot.size {
            return Err(VarError::SizeMismatch { expected: slot.size, found: values.len() }.into());
        }
        slice_mut(buffer, buffer_len, "buffer")?[slot.range()].copy_from_slice(values);
        Ok(())
    })
}
