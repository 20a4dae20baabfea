/*
 * C interface to the k-wise independence simulation toolkit.
 *
 * All functions return KW_OK on success; on failure they return an error
 * code and leave a human-readable message in kw_last_error() (thread-local).
 * Handles are opaque and must be released with the matching _free call.
 * Handle-returning calls never leave a partially constructed object.
 */
#ifndef KWISE_H
#define KWISE_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum kw_status {
    KW_OK = 0,
    KW_ERR_INVALID_ARGUMENT = 1,
    KW_ERR_NUMERIC = 2,
    KW_ERR_INTERNAL = 3
} kw_status;

const char* kw_version(void);
const char* kw_last_error(void);

/* ---- graphs ---------------------------------------------------------- */

typedef struct kw_graph kw_graph;

/* family: bipartite | two_hub | hypercube | fan | cage. param is m (or q
 * for cage). */
kw_status kw_graph_create(const char* family, long long param, kw_graph** out);
void kw_graph_free(kw_graph* g);

long long kw_graph_vertex_count(const kw_graph* g);
long long kw_graph_edge_count(const kw_graph* g);

/* Canonical (lexicographic) edge list as index pairs; `pairs` needs room
 * for 2 * edge_count entries. */
kw_status kw_graph_edges(const kw_graph* g, long long* pairs, size_t capacity);

/* Shortest cycle length; -1 when the graph is acyclic. */
kw_status kw_graph_girth(const kw_graph* g, long long* out);

/* degree / vertex_count for the regular families, as a reduced fraction. */
kw_status kw_graph_connectivity_ratio(const kw_graph* g, long long* num, long long* den);

/* Serializes to JSON. Two-call pattern: with buf == NULL, *len receives the
 * required size (terminator included). */
kw_status kw_graph_to_json(const kw_graph* g, char* buf, size_t capacity, size_t* len);

/* ---- margins ---------------------------------------------------------- */

typedef struct kw_margin kw_margin;

/* name: bernoulli | uniform01 | normal. */
kw_status kw_margin_create(const char* name, int ell, kw_margin** out);

/* Piecewise-linear quantile function through n_knots (prob, value) points
 * covering prob = 0..1; conditional moments by adaptive quadrature. */
kw_status kw_margin_create_table(const double* probs, const double* values, size_t n_knots,
                                 int ell, kw_margin** out);
void kw_margin_free(kw_margin* m);

typedef struct kw_margin_info {
    int ell;
    double mu_u, sigma2_u;
    double mu_v, sigma2_v;
    double mu, sigma2;
    double r; /* mixing coefficient */
} kw_margin_info;

kw_status kw_margin_get_info(const kw_margin* m, kw_margin_info* out);

/* ---- simulation -------------------------------------------------------- */

typedef struct kw_sim_spec {
    const char* family;
    long long param;
    int ell;
    const kw_margin* margin; /* NULL for Xi-only runs */
    long long replications;
    uint64_t seed;
    int fast_path; /* nonzero: use the distributional fast path */
    int threads;   /* 0: KWISE_THREADS env var, then hardware concurrency */
} kw_sim_spec;

/* Fills caller-allocated arrays of `replications` entries. xi_count and
 * xi_std are required; s_n must be non-NULL exactly when a margin is
 * attached. Replication j is a pure function of (seed, j). */
kw_status kw_simulate(const kw_sim_spec* spec, long long* xi_count, double* xi_std, double* s_n,
                      long long* n_edges_out);

/* ---- limit laws -------------------------------------------------------- */

typedef struct kw_law kw_law;

/* spec: "gaussian", "vg:ell=2", "vg:n=3,s=1", "s-limit:ell=2,r=0.99",
 * "two-hub-mixture:r=1". */
kw_status kw_law_create(const char* spec, kw_law** out);
void kw_law_free(kw_law* law);

kw_status kw_law_pdf(const kw_law* law, double x, double* out);
kw_status kw_law_cdf(const kw_law* law, double x, double* out);
kw_status kw_law_cf(const kw_law* law, double t, double* out);
/* E X, E X^2, E X^3, E X^4. */
kw_status kw_law_moments(const kw_law* law, double out[4]);
kw_status kw_law_sample(const kw_law* law, uint64_t seed, size_t count, double* out);

/* pdf/cdf on the closed grid lo, lo+step, ..., hi; *written receives the
 * number of grid points. pdf_clip and cdf_repair (both nullable) receive
 * the total negative-density mass clipped to zero and the total isotonic
 * cdf adjustment; violations beyond -1e-12 / 1e-9 fail with KW_ERR_NUMERIC
 * instead. */
kw_status kw_law_tabulate(const kw_law* law, double lo, double hi, double step, double* pdf,
                          double* cdf, size_t capacity, size_t* written, double* pdf_clip,
                          double* cdf_repair);

/* ---- independence checks ---------------------------------------------- */

#define KW_MAX_TUPLE 8

typedef struct kw_indep_report {
    int independent;
    int tuple_size;
    long long tuples_checked;
    char max_abs_deviation[128]; /* exact rational, reduced */
    int witness_len;             /* 0 when independent */
    long long witness_edges[KW_MAX_TUPLE];
    int witness_outcome[KW_MAX_TUPLE];
    char witness_joint[128];
    char witness_product[128];
} kw_indep_report;

/* Exact check over all ell^v labelings (integer arithmetic); state_cap 0
 * means the default 2^20. */
kw_status kw_exact_kwise_check(const kw_graph* g, int ell, int k, uint64_t state_cap,
                               kw_indep_report* out);

typedef struct kw_sampled_report {
    int tuple_size;
    long long tuples;
    long long rejected; /* at alpha / tuples (Bonferroni) */
    double alpha;
    double rejected_fraction;
    double min_p_value;
} kw_sampled_report;

kw_status kw_sampled_kwise_check(const kw_graph* g, int ell, int k, long long tuples,
                                 long long reps, uint64_t seed, double alpha,
                                 kw_sampled_report* out);

/* ---- goodness of fit --------------------------------------------------- */

typedef struct kw_gof_report {
    char test_name[32];
    double statistic;
    double p_value;
    long long sample_size;
    char reference_law[64];
} kw_gof_report;

kw_status kw_gof_ks(const double* x, size_t n, const kw_law* law, kw_gof_report* out);
kw_status kw_gof_ks_two_sample(const double* a, size_t na, const double* b, size_t nb,
                               kw_gof_report* out);
kw_status kw_gof_ad_normal(const double* x, size_t n, kw_gof_report* out);
/* bins 0 selects ceil(2 n^{2/5}). */
kw_status kw_gof_chi2(const double* x, size_t n, const kw_law* law, int bins,
                      kw_gof_report* out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* KWISE_H */
