/* SPDX-License-Identifier: Apache-2.0 */

#ifndef TOPOCOST_H
#define TOPOCOST_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Closed-form family selector for `tc_closed_form_cost`.
 */
typedef enum TcClosedForm {
  /**
   * a = routers
   */
  TC_CLOSED_FORM_TORUS = 0,
  /**
   * a = routers
   */
  TC_CLOSED_FORM_HYPERCUBE = 1,
  /**
   * a = routers
   */
  TC_CLOSED_FORM_FLATTENED_BUTTERFLY = 2,
  /**
   * a = hosts, b = radix
   */
  TC_CLOSED_FORM_FAT_TREE = 3,
  /**
   * a = radix
   */
  TC_CLOSED_FORM_STAR = 4,
} TcClosedForm;

typedef enum TcDesignMode {
  TC_DESIGN_MODE_WORST_CASE = 0,
  TC_DESIGN_MODE_AVERAGE_CASE = 1,
} TcDesignMode;

typedef enum TcFamily {
  /**
   * a = rows, b = cols
   */
  TC_FAMILY_TORUS = 0,
  /**
   * a = dim
   */
  TC_FAMILY_HYPERCUBE = 1,
  /**
   * a = side
   */
  TC_FAMILY_FLATTENED_BUTTERFLY = 2,
  /**
   * a = radix, b = levels
   */
  TC_FAMILY_FAT_TREE = 3,
  /**
   * a = radix
   */
  TC_FAMILY_STAR = 4,
} TcFamily;

typedef enum TcRoutingPolicy {
  TC_ROUTING_POLICY_EQUAL_SPLIT_MINIMAL = 0,
  TC_ROUTING_POLICY_DETERMINISTIC_MINIMAL = 1,
} TcRoutingPolicy;

/**
 * Result code of every fallible call.
 */
typedef enum TcStatus {
  TC_STATUS_OK = 0,
  TC_STATUS_NULL_POINTER = 1,
  TC_STATUS_INVALID_ARGUMENT = 2,
  TC_STATUS_INVALID_SPEC = 3,
  TC_STATUS_SIZE_EXCEEDED = 4,
  TC_STATUS_DISCONNECTED = 5,
  TC_STATUS_NO_HOSTS = 6,
  TC_STATUS_SINGLE_HOST = 7,
  TC_STATUS_ILL_FORMED = 8,
  TC_STATUS_EMPTY_FEASIBLE_SET = 9,
  TC_STATUS_DOCUMENT = 10,
  TC_STATUS_PANIC = 11,
} TcStatus;

/**
 * Opaque graph handle.
 */
typedef struct TcGraph TcGraph;

typedef struct TcRational {
  uint64_t num;
  uint64_t den;
} TcRational;

typedef struct TcMetrics {
  uint32_t routers;
  uint64_t hosts;
  uint64_t links;
  struct TcRational links_per_host;
  uint32_t diameter;
  struct TcRational avg_path;
  uint32_t max_radix;
  struct TcRational node_ratio;
} TcMetrics;

typedef struct TcCostParams {
  double beta_over_alpha;
  enum TcDesignMode design_mode;
  double b_host;
} TcCostParams;

typedef struct TcCostBreakdown {
  double h;
  double l_host;
  double bw_req;
  double router_cost;
  double node_ratio;
  double total;
  bool over_provisioned;
} TcCostBreakdown;

typedef struct TcVerifyResult {
  double bw_req;
  double max_load;
  double avg_load;
  double margin;
  bool pass;
} TcVerifyResult;

typedef struct TcDesignResult {
  uint64_t k_opt;
  double levels;
  double cost;
} TcDesignResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until the
 * next call into the library on the same thread.
 */
const char *tc_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *tc_version(void);

/**
 * Builds a topology. See `TcFamily` for the meaning of `a` and `b`; unused
 * parameters are ignored.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum TcStatus tc_graph_build(enum TcFamily family, uint32_t a, uint32_t b, struct TcGraph **out);

/**
 * Parses and validates a graph document.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be valid for writes.
 */
enum TcStatus tc_graph_from_json(const char *json, struct TcGraph **out);

/**
 * Releases a graph. Null is ignored.
 *
 * # Safety
 * `graph` must come from this library and not be used afterwards.
 */
void tc_graph_free(struct TcGraph *graph);

/**
 * Serializes a graph; release the result with `tc_string_free`.
 *
 * # Safety
 * `graph` must be a live handle; `out` must be valid for writes.
 */
enum TcStatus tc_graph_to_json(const struct TcGraph *graph, char **out);

/**
 * Releases a string returned by the library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void tc_string_free(char *s);

/**
 * Router, link and host counts. Any output pointer may be null.
 *
 * # Safety
 * `graph` must be a live handle; non-null outputs must be valid for writes.
 */
enum TcStatus tc_graph_counts(const struct TcGraph *graph,
                              uint32_t *routers,
                              uint64_t *links,
                              uint64_t *hosts);

/**
 * # Safety
 * `graph` must be a live handle; `out` must be valid for writes.
 */
enum TcStatus tc_graph_metrics(const struct TcGraph *graph, struct TcMetrics *out);

/**
 * Per-host cost of a measured graph.
 *
 * # Safety
 * `graph` must be a live handle; `params` must be readable; `out` must be valid for writes.
 */
enum TcStatus tc_graph_cost(const struct TcGraph *graph,
                            const struct TcCostParams *params,
                            struct TcCostBreakdown *out);

/**
 * Per-host cost from a closed form. See `TcClosedForm` for `a` and `b`.
 *
 * # Safety
 * `params` must be readable; `out` must be valid for writes.
 */
enum TcStatus tc_closed_form_cost(enum TcClosedForm family,
                                  uint64_t a,
                                  uint64_t b,
                                  const struct TcCostParams *params,
                                  struct TcCostBreakdown *out);

/**
 * Routes uniform all-to-all traffic and checks the worst link against the
 * bandwidth the cost model provisions. A failed check still returns
 * `Ok`; inspect `out->pass`.
 *
 * # Safety
 * `graph` must be a live handle; `params` must be readable; `out` must be valid for writes.
 */
enum TcStatus tc_graph_verify(const struct TcGraph *graph,
                              enum TcRoutingPolicy policy,
                              const struct TcCostParams *params,
                              struct TcVerifyResult *out);

/**
 * Cost-minimizing even fat-tree radix in `[k_min, k_max]` for `hosts` hosts.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum TcStatus tc_optimize_fat_tree(uint64_t hosts,
                                   double beta_over_alpha,
                                   uint64_t k_min,
                                   uint64_t k_max,
                                   bool realizable_only,
                                   struct TcDesignResult *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TOPOCOST_H */
