#ifndef MTI_H
#define MTI_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum MtiStatus {
  MTI_STATUS_OK = 0,
  MTI_STATUS_NULL_POINTER = 1,
  MTI_STATUS_INVALID_ARGUMENT = 2,
  MTI_STATUS_UNKNOWN_INDEX = 3,
  MTI_STATUS_INVALID_GRAPH = 4,
  MTI_STATUS_IO = 5,
  MTI_STATUS_INVALID_FACTOR = 6,
  MTI_STATUS_UNSUPPORTED = 7,
  MTI_STATUS_PANIC = 8,
} MtiStatus;

// Random graph model. Passed as `uint32_t`.
typedef enum MtiModel {
  MTI_MODEL_ER = 0,
  MTI_MODEL_RG = 1,
  MTI_MODEL_BR = 2,
} MtiModel;

// Treatment of isolated vertices in vertex-based indices. Passed as `uint32_t`.
typedef enum MtiPolicy {
  MTI_POLICY_EXCLUDE = 0,
  MTI_POLICY_LOG_ZERO = 1,
} MtiPolicy;

// Opaque graph handle.
typedef struct MtiGraph MtiGraph;

// `ln X` of one graph.
typedef struct MtiLnIndex {
  // `ln X`, or negative infinity when `is_log_zero` is set.
  double value;
  bool is_log_zero;
  size_t excluded_vertices;
} MtiLnIndex;

// Aggregate of one index over the replicas of one model point.
typedef struct MtiEnsembleStats {
  uint64_t replicas;
  uint64_t degenerate;
  uint64_t excluded_vertices;
  double mean_ln;
  double sem;
  double mean_ln_over_n;
  double mean_k_empirical;
  double mean_k_theoretical;
} MtiEnsembleStats;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Static description of an `MtiStatus` value. Never null.
const char *mti_status_message(uint32_t status);

// Message of the last failed call on this thread, or an empty string.
// Valid until the next failing call on the same thread.
const char *mti_last_error_message(void);

// Builds a graph on `n` vertices from `edge_count` pairs stored flat in
// `edges` (`2 * edge_count` entries). `edges` may be null when
// `edge_count` is zero.
//
// # Safety
// `edges` must point to `2 * edge_count` readable values and `out` must be
// writable.
enum MtiStatus mti_graph_new(size_t n,
                             const uint32_t *edges,
                             size_t edge_count,
                             struct MtiGraph **out);

// Reads an edge-list file (`n m` header, then `u v` per line).
//
// # Safety
// `path` must be a NUL-terminated string and `out` must be writable.
enum MtiStatus mti_graph_read_edge_list(const char *path, struct MtiGraph **out);

// Releases a graph. Null is ignored.
//
// # Safety
// `graph` must come from this library and not be used afterwards.
void mti_graph_free(struct MtiGraph *graph);

// Vertex count, or 0 for a null handle.
//
// # Safety
// `graph` must be null or a live handle.
size_t mti_graph_vertex_count(const struct MtiGraph *graph);

// Edge count, or 0 for a null handle.
//
// # Safety
// `graph` must be null or a live handle.
size_t mti_graph_edge_count(const struct MtiGraph *graph);

// Copies the degree sequence into `degrees`, which holds `len` entries and
// must be at least the vertex count.
//
// # Safety
// `degrees` must point to `len` writable values.
enum MtiStatus mti_graph_degrees(const struct MtiGraph *graph, uint32_t *degrees, size_t len);

// Samples one graph. `param` is `p` for ER and BR and `r` for RG. ER and RG
// use `n1` vertices and ignore `n2`.
//
// # Safety
// `out` must be writable.
enum MtiStatus mti_generate(uint32_t model,
                            size_t n1,
                            size_t n2,
                            double param,
                            uint64_t master_seed,
                            uint64_t point_id,
                            uint64_t replica_index,
                            struct MtiGraph **out);

// `ln X` of a named multiplicative index (`nk`, `pi1`, `pi2`, `pi1s`,
// `rpi`, `hpi`, `chipi`, `idpi`, `gapi`).
//
// # Safety
// `index` must be a NUL-terminated string and `out` must be writable.
enum MtiStatus mti_ln_index(const struct MtiGraph *graph,
                            const char *index,
                            uint32_t policy_code,
                            struct MtiLnIndex *out);

// A named additive index (`m1`, `m2`, `r`, `h`, `chi`, `id`).
//
// # Safety
// `index` must be a NUL-terminated string and `out` must be writable.
enum MtiStatus mti_additive_index(const struct MtiGraph *graph,
                                  const char *index,
                                  uint32_t policy_code,
                                  double *out);

// Expected network mean degree of a model point.
//
// # Safety
// `out` must be writable.
enum MtiStatus mti_mean_degree(uint32_t model, size_t n1, size_t n2, double param, double *out);

// Probability that two uniform points of the unit square lie within `r`.
//
// # Safety
// `out` must be writable.
enum MtiStatus mti_g_of_r(double r, double *out);

// Dense-limit `<ln X>/n`, with `n` the total vertex count. ER and RG use
// `d1` as `<k>` and ignore `d2`; BR takes the per-set mean degrees.
//
// # Safety
// `index` must be a NUL-terminated string and `out` must be writable.
enum MtiStatus mti_predict(uint32_t model, const char *index, double d1, double d2, double *out);

// Runs `replicas` replicas of one model point and aggregates one index.
// Results do not depend on `workers`; values of 0 or 1 run on the calling
// thread.
//
// # Safety
// `index` must be a NUL-terminated string and `out` must be writable.
enum MtiStatus mti_run_point(uint32_t model,
                             size_t n1,
                             size_t n2,
                             double param,
                             const char *index,
                             uint64_t replicas,
                             uint64_t master_seed,
                             uint64_t point_id,
                             uint32_t policy_code,
                             size_t workers,
                             struct MtiEnsembleStats *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MTI_H */
