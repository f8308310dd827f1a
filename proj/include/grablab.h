#ifndef GRABLAB_H
#define GRABLAB_H

/* C API for the grabbing laboratory. All functions return a grab_status;
 * outputs are handed back through out-parameters. Returned strings are
 * heap-allocated and must be released with grab_string_free; graphs with
 * grab_graph_free. On any failure, grab_last_error() returns a
 * human-readable message for the calling thread. */

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum grab_status {
  GRAB_OK = 0,
  GRAB_ERR_DOMAIN = 2, /* invalid values, infeasible requests, bad file contents */
  GRAB_ERR_BUDGET = 3, /* exact enumeration would exceed the configured budget */
  GRAB_ERR_USAGE = 4,  /* malformed calls: null pointers, bad JSON, unknown names */
  GRAB_ERR_IO = 5      /* file system failures */
} grab_status;

typedef struct grab_graph grab_graph;

/* Message for the most recent failure in this thread; never NULL. */
const char* grab_last_error(void);

/* Uniform random delta-regular simple graph (pairing model, rejection). */
grab_status grab_generate_regular(int n, int delta, uint64_t seed, grab_graph** out);

grab_status grab_graph_load(const char* path, grab_graph** out);
grab_status grab_graph_save(const grab_graph* g, const char* path);
grab_status grab_graph_from_text(const char* text, grab_graph** out);
grab_status grab_graph_to_text(const grab_graph* g, char** out_text);
void grab_graph_free(grab_graph* g);

int grab_graph_n(const grab_graph* g);     /* -1 on NULL */
int grab_graph_delta(const grab_graph* g); /* -1 on NULL */

/* Girth (with re-verified witness cycle), independence bounds, and the
 * configured reference lines, as a JSON object. exact_alpha_limit <= 0
 * skips the exact independence number. */
grab_status grab_diagnostics_json(const grab_graph* g, int exact_alpha_limit, double rho,
                                  double eps, char** out_json);

/* Radius-r ball around a node (asymmetric edge condition, center marked). */
grab_status grab_extract_ball(const grab_graph* g, int node, int radius, grab_graph** out);

/* Pads an acyclic centered ball into a tree on n_target nodes without
 * touching the ball around its center. */
grab_status grab_extend_to_tree(const grab_graph* ball, long long n_target, int delta,
                                grab_graph** out);

/* Runs the self-reduction experiment for a baseline ("port1", "uniform" or
 * "proposal") on the given graph. config_json keys (all optional):
 *   seed, T, b, R, R_shared, id_exponent, mode ("exact"|"mc"), samples,
 *   trials, c_const, budget_cap_bits, port_mode ("random"|"fixed"), audit.
 * out_csv receives the per-stage trajectory; out_audit_json the resolved
 * config, the stages, and (exact mode) the wrong-half-edge audit. */
grab_status grab_selfreduce(const grab_graph* g, const char* baseline, const char* config_json,
                            char** out_csv, char** out_audit_json);

/* Runs a probability-oracle search and returns one JSON verdict line per
 * evaluated case. check is one of: "deviation", "minsum", "khintchine",
 * "paley_zygmund", "b1", "zero_round". params_json keys depend on the
 * check (delta, b, n, searches, trials, support, lambdas, seed). */
grab_status grab_oracle(const char* check, const char* params_json, char** out_jsonl);

/* Round lower bound min(eps/4 * log_delta(n), log(1/(2p)) / log(c*sqrt(b))). */
grab_status grab_round_bound(double p, int b, int delta, double n, double eps, double c_const,
                             double* out_rounds);

void grab_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* GRABLAB_H */
