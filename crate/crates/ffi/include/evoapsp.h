#ifndef EVOAPSP_H
#define EVOAPSP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Distance reported for unreachable pairs.
#define EVO_INF UINT64_MAX

// Values for [`EvoParams::crossover`].
typedef enum EvoCrossover {
  EVO_CROSSOVER_NONE = 0,
  EVO_CROSSOVER_NAIVE = 1,
  EVO_CROSSOVER_MATCHED = 2,
  EVO_CROSSOVER_MATCHED_TRIM = 3,
} EvoCrossover;

// Values for [`EvoParams::path_mode`].
typedef enum EvoPathMode {
  EVO_PATH_MODE_SIMPLE = 0,
  EVO_PATH_MODE_WALK = 1,
} EvoPathMode;

// Result codes.
typedef enum EvoStatus {
  EVO_STATUS_OK = 0,
  EVO_STATUS_NULL_POINTER = 1,
  EVO_STATUS_INVALID_PARAMETER = 2,
  EVO_STATUS_PARSE = 3,
  EVO_STATUS_UTF8 = 4,
  EVO_STATUS_PANIC = 5,
  EVO_STATUS_STATE = 6,
} EvoStatus;

// Values for [`EvoParams::tie_rule`].
typedef enum EvoTieRule {
  EVO_TIE_RULE_REPLACE = 0,
  EVO_TIE_RULE_KEEP = 1,
} EvoTieRule;

// Opaque exact-distance handle.
typedef struct EvoDistMatrix EvoDistMatrix;

// Opaque graph handle.
typedef struct EvoGraph EvoGraph;

// Algorithm settings. Enum-valued fields hold the codes of
// `EvoCrossover`, `EvoPathMode` and `EvoTieRule`.
typedef struct EvoParams {
  uint32_t crossover;
  double crossover_prob;
  double mutation_lambda;
  uint32_t path_mode;
  uint32_t tie_rule;
  uint64_t max_steps;
} EvoParams;

// Outcome of [`evo_run`]. `steps_to_optimal` is meaningful only when `success`.
typedef struct EvoRunResult {
  bool success;
  uint64_t steps_to_optimal;
  uint64_t steps_executed;
  uint64_t optimal_pairs;
  uint64_t target_pairs;
} EvoRunResult;

// Power-law fit `mean ≈ exp(log_c) * n^alpha`.
typedef struct EvoFit {
  double alpha;
  double log_c;
  double r2;
} EvoFit;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or null. The pointer stays
// valid until the next failing call on the same thread.
const char *evo_last_error_message(void);

// Parses an edge list.
//
// # Safety
// `text` must be a nul-terminated string; `out` must be writable.
enum EvoStatus evo_graph_parse(const char *text, struct EvoGraph **out);

// Complete digraph with integer weights drawn uniformly from `[w_min, w_max]`.
//
// # Safety
// `out` must be writable.
enum EvoStatus evo_graph_complete_uniform(size_t n,
                                          uint64_t w_min,
                                          uint64_t w_max,
                                          uint64_t seed,
                                          struct EvoGraph **out);

// Complete digraph whose unique shortest `0 -> n-1` path is the chain `0, 1, ..., n-1`.
//
// # Safety
// `out` must be writable.
enum EvoStatus evo_graph_hard_path(size_t n, uint64_t heavy, struct EvoGraph **out);

// Canonical edge-list text; release with [`evo_string_free`].
//
// # Safety
// `g` must be a live graph handle; `out` must be writable.
enum EvoStatus evo_graph_serialize(const struct EvoGraph *g, char **out);

// Vertex count, or 0 for a null handle.
//
// # Safety
// `g` must be null or a live graph handle.
size_t evo_graph_vertex_count(const struct EvoGraph *g);

// Edge count, or 0 for a null handle.
//
// # Safety
// `g` must be null or a live graph handle.
size_t evo_graph_edge_count(const struct EvoGraph *g);

// # Safety
// `g` must be null or a handle not yet freed.
void evo_graph_free(struct EvoGraph *g);

// # Safety
// `s` must be null or a string returned by this library and not yet freed.
void evo_string_free(char *s);

// All-pairs distances and edge counts.
//
// # Safety
// `g` must be a live graph handle; `out` must be writable.
enum EvoStatus evo_floyd_warshall(const struct EvoGraph *g, struct EvoDistMatrix **out);

// Distance and edge count of a shortest `u -> v` path. Unreachable pairs
// report `EVO_INF` and `UINT32_MAX`. Either output may be null.
//
// # Safety
// `d` must be a live matrix handle; non-null outputs must be writable.
enum EvoStatus evo_dist_get(const struct EvoDistMatrix *d,
                            uint32_t u,
                            uint32_t v,
                            uint64_t *dist,
                            uint32_t *hops);

// # Safety
// `d` must be null or a handle not yet freed.
void evo_dist_free(struct EvoDistMatrix *d);

// Single-source distances into `out[0..len]`; `len` must equal the vertex count.
//
// # Safety
// `g` must be a live graph handle; `out` must point to `len` writable values.
enum EvoStatus evo_dijkstra(const struct EvoGraph *g, uint32_t source, uint64_t *out, size_t len);

// Default settings for an `n`-vertex graph: mutation only, budget `50 n^4`.
struct EvoParams evo_params_default(size_t n);

// One seeded run until every reachable pair holds a shortest path or the
// budget runs out.
//
// # Safety
// `g` must be a live graph handle, `params` readable, `out` writable.
enum EvoStatus evo_run(const struct EvoGraph *g,
                       const struct EvoParams *params,
                       uint64_t seed,
                       uint64_t stream,
                       struct EvoRunResult *out);

// `H_m` as a double.
//
// # Safety
// `out` must be writable.
enum EvoStatus evo_harmonic(uint64_t m, double *out);

// Least-squares fit of `ln(means) = log_c + alpha * ln(ns)` over `len` points.
//
// # Safety
// `ns` and `means` must point to `len` readable values; `out` must be writable.
enum EvoStatus evo_fit_exponent(const double *ns,
                                const double *means,
                                size_t len,
                                struct EvoFit *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EVOAPSP_H */
