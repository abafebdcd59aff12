#ifndef HETG_H
#define HETG_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HetgStatus {
  HETG_STATUS_OK = 0,
  HETG_STATUS_NULL_POINTER = 1,
  HETG_STATUS_INVALID_ARGUMENT = 2,
  HETG_STATUS_IO = 3,
  HETG_STATUS_PARSE = 4,
  HETG_STATUS_INVALID_METAPATH = 5,
  HETG_STATUS_INTERNAL = 6,
  HETG_STATUS_PANIC = 7,
  HETG_STATUS_BUFFER_TOO_SMALL = 8,
} HetgStatus;

/**
 * Opaque heterogeneous graph.
 */
typedef struct HetgGraph HetgGraph;

/**
 * Opaque restructured partition of a semantic graph.
 */
typedef struct HetgPartition HetgPartition;

/**
 * Opaque semantic graph.
 */
typedef struct HetgSemanticGraph HetgSemanticGraph;

typedef struct HetgCost {
  uint64_t macs;
  uint64_t edges_read;
  uint64_t edges_written;
  uint64_t cache_hits;
  uint64_t segments_built;
} HetgCost;

typedef struct HetgPartitionStats {
  uint64_t edges;
  uint64_t matching_size;
  uint64_t src_in;
  uint64_t src_out;
  uint64_t dst_in;
  uint64_t dst_out;
  uint64_t gs1_edges;
  uint64_t gs2_edges;
  uint64_t gs3_edges;
} HetgPartitionStats;

typedef struct HetgSimResult {
  uint64_t total_accesses;
  uint64_t hits;
  uint64_t cold_misses;
  uint64_t replacements;
  uint64_t evictions;
  uint64_t dram_accesses;
  uint64_t dram_bytes;
  uint64_t distinct_sources;
} HetgSimResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer is
 * valid until the next `hetg_*` call on the same thread.
 */
const char *hetg_last_error_message(void);

/**
 * Static, NUL-terminated library version.
 */
const char *hetg_version(void);

/**
 * Loads a graph directory (`schema.json` plus one edge file per relation).
 *
 * # Safety
 * `dir` must be a NUL-terminated string and `out` a writable pointer.
 */
enum HetgStatus hetg_graph_load(const char *dir, struct HetgGraph **out);

/**
 * Generates a synthetic graph from a named preset (`acm`, `dblp`, `imdb`).
 *
 * # Safety
 * `preset` must be a NUL-terminated string and `out` a writable pointer.
 */
enum HetgStatus hetg_graph_generate_preset(const char *preset,
                                           double scale,
                                           uint64_t seed,
                                           struct HetgGraph **out);

/**
 * Writes `graph` as a graph directory.
 *
 * # Safety
 * `graph` must be a live handle and `dir` a NUL-terminated string.
 */
enum HetgStatus hetg_graph_save(const struct HetgGraph *graph, const char *dir);

/**
 * Total edge count over all relations; 0 for NULL.
 *
 * # Safety
 * `graph` must be NULL or a live handle.
 */
uint64_t hetg_graph_edge_count(const struct HetgGraph *graph);

/**
 * # Safety
 * `graph` must be NULL or a handle not freed before.
 */
void hetg_graph_free(struct HetgGraph *graph);

/**
 * The one-hop semantic graph of a named relation.
 *
 * # Safety
 * `graph` must be a live handle, `relation` a NUL-terminated string and
 * `out` a writable pointer.
 */
enum HetgStatus hetg_graph_relation(const struct HetgGraph *graph,
                                    const char *relation,
                                    struct HetgSemanticGraph **out);

/**
 * Builds the semantic graph of `metapath` (e.g. `"APA"` or
 * `"Author-Paper-Author"`). `naive` selects hop-by-hop composition instead
 * of trie-planned composition. `cost` may be NULL.
 *
 * # Safety
 * `graph` must be a live handle, `metapath` a NUL-terminated string, `out`
 * writable and `cost` NULL or writable.
 */
enum HetgStatus hetg_graph_build_metapath(const struct HetgGraph *graph,
                                          const char *metapath,
                                          bool naive,
                                          struct HetgSemanticGraph **out,
                                          struct HetgCost *cost);

/**
 * Builds `count` metapaths in order with one builder and reports the
 * summed cost. Later targets reuse earlier ones in trie mode.
 *
 * # Safety
 * `metapaths` must point to `count` NUL-terminated strings and `cost` must
 * be writable.
 */
enum HetgStatus hetg_graph_batch_cost(const struct HetgGraph *graph,
                                      const char *const *metapaths,
                                      size_t count,
                                      bool naive,
                                      struct HetgCost *cost);

/**
 * Semantic graph from parallel source/destination id arrays. The endpoint
 * types are labelled `S` and `D`.
 *
 * # Safety
 * `src` and `dst` must each point to `n_edges` readable ids (either may be
 * NULL when `n_edges` is 0) and `out` must be writable.
 */
enum HetgStatus hetg_semantic_from_edges(uint32_t n_src,
                                         uint32_t n_dst,
                                         const uint32_t *src,
                                         const uint32_t *dst,
                                         size_t n_edges,
                                         struct HetgSemanticGraph **out);

/**
 * # Safety
 * `sg` must be NULL or a live handle.
 */
uint64_t hetg_semantic_n_src(const struct HetgSemanticGraph *sg);

/**
 * # Safety
 * `sg` must be NULL or a live handle.
 */
uint64_t hetg_semantic_n_dst(const struct HetgSemanticGraph *sg);

/**
 * # Safety
 * `sg` must be NULL or a live handle.
 */
uint64_t hetg_semantic_edge_count(const struct HetgSemanticGraph *sg);

/**
 * Copies the edges, sorted by source then destination, into `src`/`dst`.
 * Fails with `BufferTooSmall` when `capacity` is below the edge count;
 * `written` always receives the edge count.
 *
 * # Safety
 * `src` and `dst` must each have room for `capacity` ids; `written` must be
 * writable.
 */
enum HetgStatus hetg_semantic_edges(const struct HetgSemanticGraph *sg,
                                    uint32_t *src,
                                    uint32_t *dst,
                                    size_t capacity,
                                    size_t *written);

/**
 * Composes `left` then `right` (end type of `left` must equal the start
 * type of `right`). `cost` may be NULL.
 *
 * # Safety
 * Handles must be live, `out` writable, `cost` NULL or writable.
 */
enum HetgStatus hetg_semantic_compose(const struct HetgSemanticGraph *left,
                                      const struct HetgSemanticGraph *right,
                                      struct HetgSemanticGraph **out,
                                      struct HetgCost *cost);

/**
 * # Safety
 * `sg` must be NULL or a handle not freed before.
 */
void hetg_semantic_free(struct HetgSemanticGraph *sg);

/**
 * Decouples and recouples `sg`; the partition is verified before return.
 *
 * # Safety
 * `sg` must be a live handle and `out` writable.
 */
enum HetgStatus hetg_restructure(const struct HetgSemanticGraph *sg, struct HetgPartition **out);

/**
 * # Safety
 * `p` must be a live handle and `out` writable.
 */
enum HetgStatus hetg_partition_stats(const struct HetgPartition *p, struct HetgPartitionStats *out);

/**
 * Checks every partition invariant of `p` against `sg`.
 *
 * # Safety
 * Handles must be live and `passed` writable.
 */
enum HetgStatus hetg_partition_verify(const struct HetgSemanticGraph *sg,
                                      const struct HetgPartition *p,
                                      bool *passed);

/**
 * # Safety
 * `p` must be NULL or a handle not freed before.
 */
void hetg_partition_free(struct HetgPartition *p);

/**
 * Replays neighbor aggregation over `sg` in original order, or over the
 * restructured schedule of `partition` when it is not NULL.
 *
 * # Safety
 * `sg` must be a live handle, `partition` NULL or a live handle derived
 * from `sg`, and `out` writable.
 */
enum HetgStatus hetg_simulate(const struct HetgSemanticGraph *sg,
                              const struct HetgPartition *partition,
                              size_t capacity,
                              uint64_t feature_bytes,
                              struct HetgSimResult *out);

/**
 * Original versus restructured simulation at one buffer size.
 *
 * # Safety
 * Handles must be live and `original`/`restructured` writable.
 */
enum HetgStatus hetg_compare_layouts(const struct HetgSemanticGraph *sg,
                                     const struct HetgPartition *partition,
                                     size_t capacity,
                                     uint64_t feature_bytes,
                                     struct HetgSimResult *original,
                                     struct HetgSimResult *restructured);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HETG_H */
