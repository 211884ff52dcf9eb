#ifndef STRATA_H
#define STRATA_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every call.
typedef enum StrataStatus {
  STRATA_STATUS_OK = 0,
  STRATA_STATUS_NULL_POINTER = 1,
  STRATA_STATUS_INVALID_UTF8 = 2,
  STRATA_STATUS_INVALID_ARGUMENT = 3,
  // Bad name, kind or composition while building an expression.
  STRATA_STATUS_INVALID_EXPRESSION = 4,
  STRATA_STATUS_UNKNOWN_PATH = 5,
  STRATA_STATUS_AMBIGUOUS = 6,
  // Wrong number of copy indices for the matched path.
  STRATA_STATUS_ARITY = 7,
  STRATA_STATUS_INDEX_OUT_OF_RANGE = 8,
  STRATA_STATUS_SIZE_MISMATCH = 9,
  STRATA_STATUS_KIND_MISMATCH = 10,
  // Output array too small; the required length was still written.
  STRATA_STATUS_BUFFER_TOO_SMALL = 11,
  STRATA_STATUS_PANIC = 12,
} StrataStatus;

// Leaf and node kinds. Vectors carry their length separately.
typedef enum StrataKindTag {
  STRATA_KIND_TAG_SCALAR = 0,
  STRATA_KIND_TAG_VECTOR = 1,
  STRATA_KIND_TAG_QUATERNION = 2,
  STRATA_KIND_TAG_BRANCH = 3,
} StrataKindTag;

// Owns a zero-initialized buffer with every subvariable's slot precomputed.
typedef struct StrataEagerMap StrataEagerMap;

// Unbuilt variable expression.
typedef struct StrataExpr StrataExpr;

// Built, immutable hierarchy.
typedef struct StrataHierarchy StrataHierarchy;

// Computes slots on demand over a buffer supplied with each call.
typedef struct StrataLazyMap StrataLazyMap;

// One query token. `name == NULL` makes it a copy index.
typedef struct StrataToken {
  const char *name;
  size_t index;
} StrataToken;

// Location of a subvariable in its root's flat buffer.
typedef struct StrataSlot {
  size_t offset;
  size_t size;
  enum StrataKindTag kind;
} StrataSlot;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null after a success.
// Valid until the next strata call on the same thread.
const char *strata_last_error(void);

// Static, human-readable name of a status code.
const char *strata_status_name(enum StrataStatus status);

// Leaf expression. `kind` is a `StrataKindTag`; `len` is the vector length
// and is ignored for other kinds.
//
// # Safety
// `name` must be a nul-terminated string; `out` must be writable.
enum StrataStatus strata_expr_leaf(const char *name,
                                   uint32_t kind,
                                   size_t len,
                                   struct StrataExpr **out);

// Ordered concatenation of `count` expressions, which are copied.
//
// # Safety
// `parts` must point to `count` valid expression handles; `out` must be writable.
enum StrataStatus strata_expr_concat(const struct StrataExpr *const *parts,
                                     size_t count,
                                     struct StrataExpr **out);

// `count` copies of a named expression, which is copied.
//
// # Safety
// `expr` must be a valid handle; `out` must be writable.
enum StrataStatus strata_expr_replicate(size_t count,
                                        const struct StrataExpr *expr,
                                        struct StrataExpr **out);

// Names an expression, making it a branch variable.
//
// # Safety
// `name` must be a nul-terminated string, `expr` a valid handle and `out` writable.
enum StrataStatus strata_expr_bind(const char *name,
                                   const struct StrataExpr *expr,
                                   struct StrataExpr **out);

// # Safety
// `expr` must be null or a handle not yet freed.
void strata_expr_free(struct StrataExpr *expr);

// Builds a hierarchy from a named expression.
//
// # Safety
// `expr` must be a valid handle; `out` must be writable.
enum StrataStatus strata_hierarchy_build(const struct StrataExpr *expr,
                                         struct StrataHierarchy **out);

// Quadrotor decision variables over `horizon` steps.
//
// # Safety
// `out` must be writable.
enum StrataStatus strata_fixture_quadrotor(size_t horizon, struct StrataHierarchy **out);

// # Safety
// `hierarchy` must be null or a handle not yet freed.
void strata_hierarchy_free(struct StrataHierarchy *hierarchy);

// Total number of scalars in the hierarchy's buffer.
//
// # Safety
// `hierarchy` must be a valid handle; `out` must be writable.
enum StrataStatus strata_hierarchy_size(const struct StrataHierarchy *hierarchy, size_t *out);

// Resolves a token query.
//
// # Safety
// `hierarchy` must be a valid handle, `tokens` must point to `count` tokens
// with valid names, and `out` must be writable.
enum StrataStatus strata_hierarchy_resolve(const struct StrataHierarchy *hierarchy,
                                           const struct StrataToken *tokens,
                                           size_t count,
                                           struct StrataSlot *out);

// Resolves a textual query such as `"X, x, 1, linear_velocity"`.
//
// # Safety
// `hierarchy` must be a valid handle, `path` a nul-terminated string and
// `out` writable.
enum StrataStatus strata_hierarchy_resolve_path(const struct StrataHierarchy *hierarchy,
                                                const char *path,
                                                struct StrataSlot *out);

// Eager map with a zeroed buffer. The hierarchy may be freed afterwards.
//
// # Safety
// `hierarchy` must be a valid handle; `out` must be writable.
enum StrataStatus strata_eager_map_new(const struct StrataHierarchy *hierarchy,
                                       struct StrataEagerMap **out);

// # Safety
// `map` must be null or a handle not yet freed.
void strata_eager_map_free(struct StrataEagerMap *map);

// The map's whole buffer. The pointer stays valid until the map is freed.
//
// # Safety
// `map` must be a valid handle; `data` and `len` must be writable.
enum StrataStatus strata_eager_map_data(struct StrataEagerMap *map, double **data, size_t *len);

// Locates a query in the precomputed table.
//
// # Safety
// As for [`strata_hierarchy_resolve`], with a valid map handle.
enum StrataStatus strata_eager_map_locate(const struct StrataEagerMap *map,
                                          const struct StrataToken *tokens,
                                          size_t count,
                                          struct StrataSlot *out);

// Copies a subvariable's values into `out`. `out_len` receives the number of
// values, also when `capacity` is too small.
//
// # Safety
// `map` must be a valid handle, `tokens` must point to `count` tokens, `out`
// must have room for `capacity` values and `out_len` must be writable.
enum StrataStatus strata_eager_map_read(const struct StrataEagerMap *map,
                                        const struct StrataToken *tokens,
                                        size_t count,
                                        double *out,
                                        size_t capacity,
                                        size_t *out_len);

// Overwrites a subvariable; `len` must equal its size.
//
// # Safety
// `map` must be a valid handle, `tokens` must point to `count` tokens and
// `values` to `len` values.
enum StrataStatus strata_eager_map_write(struct StrataEagerMap *map,
                                         const struct StrataToken *tokens,
                                         size_t count,
                                         const double *values,
                                         size_t len);

// Lazy map for a hierarchy. Buffers are passed to each call and must hold
// exactly the hierarchy's size.
//
// # Safety
// `hierarchy` must be a valid handle; `out` must be writable.
enum StrataStatus strata_lazy_map_new(const struct StrataHierarchy *hierarchy,
                                      struct StrataLazyMap **out);

// # Safety
// `map` must be null or a handle not yet freed.
void strata_lazy_map_free(struct StrataLazyMap *map);

// Computes the slot of a query.
//
// # Safety
// As for [`strata_hierarchy_resolve`], with a valid map handle.
enum StrataStatus strata_lazy_map_locate(const struct StrataLazyMap *map,
                                         const struct StrataToken *tokens,
                                         size_t count,
                                         struct StrataSlot *out);

// Copies a subvariable of `buffer` into `out`; see [`strata_eager_map_read`].
//
// # Safety
// `map` must be a valid handle, `buffer` must hold `buffer_len` values,
// `tokens` must point to `count` tokens, `out` must have room for `capacity`
// values and `out_len` must be writable.
enum StrataStatus strata_lazy_map_read(const struct StrataLazyMap *map,
                                       const double *buffer,
                                       size_t buffer_len,
                                       const struct StrataToken *tokens,
                                       size_t count,
                                       double *out,
                                       size_t capacity,
                                       size_t *out_len);

// Overwrites a subvariable of `buffer`; `len` must equal its size.
//
// # Safety
// `map` must be a valid handle, `buffer` must hold `buffer_len` writable
// values, `tokens` must point to `count` tokens and `values` to `len` values.
enum StrataStatus strata_lazy_map_write(const struct StrataLazyMap *map,
                                        double *buffer,
                                        size_t buffer_len,
                                        const struct StrataToken *tokens,
                                        size_t count,
                                        const double *values,
                                        size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STRATA_H */
