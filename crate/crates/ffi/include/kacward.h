/* C interface to the kacward library. Generated by cbindgen; do not edit. */

#ifndef KACWARD_H
#define KACWARD_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every C API call.
 */
typedef enum KwStatus {
  KW_STATUS_OK = 0,
  /**
   * The graph file or an argument string did not parse.
   */
  KW_STATUS_PARSE_ERROR = 1,
  /**
   * The graph violates an embedding invariant.
   */
  KW_STATUS_INVALID_GRAPH = 2,
  /**
   * A numeric routine rejected its input or failed to converge.
   */
  KW_STATUS_COMPUTE_ERROR = 3,
  /**
   * The request exceeds a desk-scale enumeration cap.
   */
  KW_STATUS_TOO_LARGE = 4,
  /**
   * A required pointer argument was null.
   */
  KW_STATUS_NULL_ARGUMENT = 5,
} KwStatus;

/**
 * Opaque handle to a validated toric graph.
 */
typedef struct KwGraph KwGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent failure on this thread. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *kw_last_error_message(void);

/**
 * Parses a graph file held in a UTF-8 string and validates the embedding.
 *
 * # Safety
 * `text` must point to a NUL-terminated string; `out` must be a valid
 * pointer. The returned handle must be released with [`kw_graph_free`].
 */
enum KwStatus kw_graph_parse(const char *text, struct KwGraph **out);

/**
 * Loads a built-in example graph: square, hex, tri, rect21 or rect-iso.
 *
 * # Safety
 * `name` must point to a NUL-terminated string; `out` must be valid.
 */
enum KwStatus kw_graph_builtin(const char *name, struct KwGraph **out);

/**
 * Releases a graph handle. Null is ignored.
 *
 * # Safety
 * `g` must be a handle returned by this library, not yet freed.
 */
void kw_graph_free(struct KwGraph *g);

/**
 * Reports the vertex, edge and face counts of the fundamental domain.
 *
 * # Safety
 * `g` must be a live handle; out-pointers may be null to skip a field.
 */
enum KwStatus kw_graph_counts(const struct KwGraph *g,
                              uintptr_t *vertices,
                              uintptr_t *edges,
                              uintptr_t *faces);

/**
 * Serializes the graph back to its file format.
 *
 * # Safety
 * `g` must be a live handle; `out` must be valid. Free the string with
 * [`kw_string_free`].
 */
enum KwStatus kw_graph_emit(const struct KwGraph *g, char **out);

/**
 * Solves for the critical inverse temperature with the stored couplings.
 *
 * # Safety
 * `g` must be a live handle; `beta_c` must be valid; `residual` may be null.
 */
enum KwStatus kw_critical_beta(const struct KwGraph *g,
                               double tol,
                               double *beta_c,
                               double *residual);

/**
 * `Z_{E0} - Z_{E1}` at the given inverse temperature: positive means
 * disordered, negative means ordered.
 *
 * # Safety
 * `g` must be a live handle; `out` must be valid.
 */
enum KwStatus kw_phase_indicator(const struct KwGraph *g, double beta, double *out);

/**
 * Ising free energy per fundamental domain at inverse temperature `beta`,
 * by toroidal quadrature on a `grid_n x grid_n` midpoint grid (power of two,
 * at least 8).
 *
 * # Safety
 * `g` must be a live handle; `value` must be valid; `error_estimate` may be
 * null.
 */
enum KwStatus kw_free_energy(const struct KwGraph *g,
                             double beta,
                             uintptr_t grid_n,
                             double *value,
                             double *error_estimate);

/**
 * Kac-Ward determinant at the unit phase point
 * `(z, w) = (exp(i*theta), exp(i*eta))` with `x = tanh(beta * J)`.
 *
 * # Safety
 * `g` must be a live handle; `re` must be valid; `im` may be null.
 */
enum KwStatus kw_spectral_value(const struct KwGraph *g,
                                double beta,
                                double theta,
                                double eta,
                                double *re,
                                double *im);

/**
 * Emits the dual graph with Kramers-Wannier dual weights, fixing
 * `x = tanh(beta * J)` first.
 *
 * # Safety
 * `g` must be a live handle; `out` must be valid. Free the string with
 * [`kw_string_free`].
 */
enum KwStatus kw_dualize(const struct KwGraph *g, double beta, char **out);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must have been returned by this library, not yet freed.
 */
void kw_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KACWARD_H */
