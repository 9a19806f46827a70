#ifndef RESPARS_H
#define RESPARS_H

/* Generated by cbindgen from crates/ffi. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RsStatus {
  RS_STATUS_OK = 0,
  RS_STATUS_NULL_POINTER = 1,
  RS_STATUS_INVALID_ARGUMENT = 2,
  RS_STATUS_PARSE = 3,
  RS_STATUS_IO = 4,
  RS_STATUS_DISCONNECTED = 5,
  RS_STATUS_EPSILON_OUT_OF_RANGE = 6,
  RS_STATUS_DENSE_LIMIT_EXCEEDED = 7,
  RS_STATUS_SOLVER_FAILED = 8,
  RS_STATUS_VERTEX_OUT_OF_RANGE = 9,
  RS_STATUS_BUFFER_SIZE = 10,
  RS_STATUS_INTERNAL = 11,
} RsStatus;

typedef enum RsMode {
  RS_MODE_RESISTANCE = 0,
  RS_MODE_DEGREE_BOUNDED = 1,
} RsMode;

/**
 * Opaque graph handle.
 */
typedef struct RsGraph RsGraph;

/**
 * Opaque resistance-oracle handle.
 */
typedef struct RsOracle RsOracle;

/**
 * Options for [`respars_sparsify`]. `q == 0` selects the default sample
 * count and `delta <= 0` the default solver accuracy.
 */
typedef struct RsSparsifyOptions {
  double epsilon;
  size_t q;
  double c0;
  uint64_t seed;
  enum RsMode mode;
  double delta;
  bool exact;
} RsSparsifyOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next respars call on this thread.
 */
const char *respars_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *respars_version(void);

/**
 * Builds a graph from parallel arrays of `m` endpoints and weights.
 *
 * # Safety
 * `us`, `vs` and `ws` must each point to `m` readable elements (they may be
 * null when `m == 0`), and `out` must be a valid pointer to write to.
 */
enum RsStatus respars_graph_from_edges(size_t n,
                                       const size_t *us,
                                       const size_t *vs,
                                       const double *ws,
                                       size_t m,
                                       struct RsGraph **out);

/**
 * Parses the edge-list text format.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum RsStatus respars_graph_parse(const char *text, struct RsGraph **out);

/**
 * # Safety
 * `g` must be null or a handle from this library that has not been freed.
 */
void respars_graph_free(struct RsGraph *g);

/**
 * # Safety
 * `g` must be null or a live graph handle.
 */
size_t respars_graph_num_vertices(const struct RsGraph *g);

/**
 * # Safety
 * `g` must be null or a live graph handle.
 */
size_t respars_graph_num_edges(const struct RsGraph *g);

/**
 * Reads edge `index` in canonical order (`u < v`, sorted).
 *
 * # Safety
 * `g` must be a live graph handle; the output pointers must be writable.
 */
enum RsStatus respars_graph_edge(const struct RsGraph *g,
                                 size_t index,
                                 size_t *u,
                                 size_t *v,
                                 double *w);

/**
 * # Safety
 * `g` must be a live graph handle and `out` writable.
 */
enum RsStatus respars_graph_is_connected(const struct RsGraph *g, bool *out);

/**
 * Serializes to the edge-list format. Release the result with
 * [`respars_string_free`]. Returns null on a null handle.
 *
 * # Safety
 * `g` must be null or a live graph handle.
 */
char *respars_graph_to_edge_list(const struct RsGraph *g);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void respars_string_free(char *s);

/**
 * Builds the random-projection resistance oracle.
 *
 * # Safety
 * `g` must be a live graph handle and `out` writable.
 */
enum RsStatus respars_oracle_build(const struct RsGraph *g,
                                   double epsilon,
                                   double delta,
                                   uint64_t seed,
                                   struct RsOracle **out);

/**
 * # Safety
 * `o` must be a live oracle handle and `out` writable.
 */
enum RsStatus respars_oracle_query(const struct RsOracle *o, size_t u, size_t v, double *out);

/**
 * Projection dimension `k`, or 0 for a null handle.
 *
 * # Safety
 * `o` must be null or a live oracle handle.
 */
size_t respars_oracle_k(const struct RsOracle *o);

/**
 * # Safety
 * `o` must be null or an oracle handle that has not been freed.
 */
void respars_oracle_free(struct RsOracle *o);

/**
 * Writes the exact resistance of every edge into `out`, which must hold
 * exactly `num_edges` values.
 *
 * # Safety
 * `g` must be a live graph handle and `out` must point to `len` writable
 * doubles.
 */
enum RsStatus respars_exact_resistances(const struct RsGraph *g, double *out, size_t len);

/**
 * Default options: `q` and `delta` chosen automatically, `c0 = 4`,
 * resistance mode, oracle resistances.
 */
struct RsSparsifyOptions respars_sparsify_options_default(double epsilon, uint64_t seed);

/**
 * Samples a sparsifier; the result is a new graph handle.
 *
 * # Safety
 * `g` must be a live graph handle, `opts` readable and `out` writable.
 */
enum RsStatus respars_sparsify(const struct RsGraph *g,
                               const struct RsSparsifyOptions *opts,
                               struct RsGraph **out);

/**
 * Extreme generalized eigenvalues of `(L_H, L_G)` on the complement of the
 * all-ones vector.
 *
 * # Safety
 * `g` and `h` must be live graph handles; `lo` and `hi` writable.
 */
enum RsStatus respars_spectral_bounds(const struct RsGraph *g,
                                      const struct RsGraph *h,
                                      double *lo,
                                      double *hi);

/**
 * # Safety
 * `g` and `h` must be live graph handles; `out` writable.
 */
enum RsStatus respars_cut_check(const struct RsGraph *g,
                                const struct RsGraph *h,
                                size_t trials,
                                uint64_t seed,
                                double *out);

/**
 * # Safety
 * `g` and `h` must be live graph handles; `out` writable.
 */
enum RsStatus respars_degree_bound_check(const struct RsGraph *g,
                                         const struct RsGraph *h,
                                         double *out);

/**
 * # Safety
 * `g` must be a live graph handle; `out` writable.
 */
enum RsStatus respars_pi_matrix_checks(const struct RsGraph *g, bool *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RESPARS_H */
