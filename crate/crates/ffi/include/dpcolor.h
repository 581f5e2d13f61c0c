#ifndef DPCOLOR_H
#define DPCOLOR_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum DpcStatus {
  DPC_STATUS_OK = 0,
  /**
   * The computation succeeded and found no private mechanism, or the
   * checked mechanism is not private. The output still holds a report.
   */
  DPC_STATUS_INFEASIBLE = 1,
  DPC_STATUS_NULL_ARGUMENT = 2,
  DPC_STATUS_INVALID_UTF8 = 3,
  DPC_STATUS_PARSE_ERROR = 4,
  DPC_STATUS_INVALID_GRAPH = 5,
  DPC_STATUS_INVALID_PARAMS = 6,
  DPC_STATUS_NO_BOUNDARY = 7,
  DPC_STATUS_BAD_BOUNDARY_CONDITION = 8,
  DPC_STATUS_PRECONDITION_VIOLATED = 9,
  DPC_STATUS_INTERNAL_ERROR = 10,
} DpcStatus;

/**
 * Opaque colored graph.
 */
typedef struct DpcGraph DpcGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failure on this thread, or null. Valid until the next
 * call into this library on the same thread.
 */
const char *dpc_last_error_message(void);

/**
 * Parses a graph document and stores a new handle in `*out`.
 *
 * # Safety
 * `json` must be a nul-terminated string and `out` a writable pointer.
 */
enum DpcStatus dpc_graph_from_json(const char *json, struct DpcGraph **out);

/**
 * # Safety
 * `g` must be null or a handle from [`dpc_graph_from_json`] not yet freed.
 */
void dpc_graph_free(struct DpcGraph *g);

/**
 * Number of vertices, or 0 for a null handle.
 *
 * # Safety
 * `g` must be null or a live handle.
 */
size_t dpc_graph_vertex_count(const struct DpcGraph *g);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void dpc_string_free(char *s);

/**
 * Optimal mechanism on the `(nb, nr)`-line whose blue boundary node answers
 * red with probability `rb`.
 *
 * # Safety
 * `out` must be a writable pointer.
 */
enum DpcStatus dpc_line(size_t nb, size_t nr, double rb, double exp_eps, double delta, char **out);

/**
 * # Safety
 * `g` must be a live handle and `out` a writable pointer.
 */
enum DpcStatus dpc_homogeneous(const struct DpcGraph *g,
                               double m_b,
                               double exp_eps,
                               double delta,
                               char **out);

/**
 * # Safety
 * `g` must be a live handle and `out` a writable pointer.
 */
enum DpcStatus dpc_balanced(const struct DpcGraph *g, double exp_eps, double delta, char **out);

/**
 * Optimal mechanism for the boundary condition document `bc_json`. Returns
 * `Infeasible` with the report (including a witness) when none exists.
 *
 * # Safety
 * `g` must be a live handle, `bc_json` a nul-terminated string and `out` a
 * writable pointer.
 */
enum DpcStatus dpc_solve(const struct DpcGraph *g,
                         const char *bc_json,
                         double exp_eps,
                         double delta,
                         char **out);

/**
 * Privacy report for the mechanism document `mech_json`; `Infeasible` when
 * some inequality fails by more than `tolerance`.
 *
 * # Safety
 * `g` must be a live handle, `mech_json` a nul-terminated string and `out` a
 * writable pointer.
 */
enum DpcStatus dpc_verify(const struct DpcGraph *g,
                          const char *mech_json,
                          double exp_eps,
                          double delta,
                          double tolerance,
                          char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DPCOLOR_H */
