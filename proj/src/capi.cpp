#include "kwise/kwise.h"

#include <cstring>
#include <string>

#include "kwise/exact.hpp"
#include "kwise/graph.hpp"
#include "kwise/limit_laws.hpp"
#include "kwise/margins.hpp"
#include "kwise/sampler.hpp"
#include "kwise/stats.hpp"

struct kw_graph {
    kwise::Graph graph;
};
struct kw_margin {
    kwise::MarginSpec margin;
};
struct kw_law {
    kwise::LimitLaw law;
};

namespace {

thread_local std::string g_last_error;

kw_status fail(kw_status code, const std::string& message) {
    g_last_error = message;
    return code;
}

// Maps C++ exceptions onto the C status codes.
template <typename Fn>
kw_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const std::invalid_argument& e) {
        return fail(KW_ERR_INVALID_ARGUMENT, e.what());
    } catch (const kwise::NumericError& e) {
        return fail(KW_ERR_NUMERIC, e.what());
    } catch (const std::exception& e) {
        return fail(KW_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(KW_ERR_INTERNAL, "unknown error");
    }
}

void copy_string(char* dst, size_t capacity, const std::string& src) {
    if (capacity == 0) return;
    const size_t n = std::min(capacity - 1, src.size());
    std::memcpy(dst, src.data(), n);
    dst[n] = '\0';
}

void fill_gof(kw_gof_report* out, const kwise::GofReport& report) {
    copy_string(out->test_name, sizeof out->test_name, report.test_name);
    out->statistic = report.statistic;
    out->p_value = report.p_value;
    out->sample_size = report.sample_size;
    copy_string(out->reference_law, sizeof out->reference_law, report.reference_law);
}

}  // namespace

extern "C" {

const char* kw_version(void) { return "0.1.0"; }

const char* kw_last_error(void) { return g_last_error.c_str(); }

kw_status kw_graph_create(const char* family, long long param, kw_graph** out) {
    if (!family || !out) return fail(KW_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        const auto fam = kwise::family_from_string(family);
        if (!fam) return fail(KW_ERR_INVALID_ARGUMENT, std::string("unknown family '") + family + "'");
        kwise::Graph g = [&] {
            switch (*fam) {
                case kwise::Family::bipartite: return kwise::Graph::complete_bipartite(param);
                case kwise::Family::two_hub: return kwise::Graph::two_hub(param);
                case kwise::Family::hypercube: return kwise::Graph::hypercube(param);
                case kwise::Family::fan: return kwise::Graph::fan(param);
                case kwise::Family::cage: return kwise::Graph::cage_incidence(param);
                default:
                    throw std::invalid_argument("custom graphs cannot be built from a family name");
            }
        }();
        *out = new kw_graph{std::move(g)};
        return KW_OK;
    });
}

void kw_graph_free(kw_graph* g) { delete g; }

long long kw_graph_vertex_count(const kw_graph* g) { return g ? g->graph.vertex_count() : 0; }

long long kw_graph_edge_count(const kw_graph* g) { return g ? g->graph.edge_count() : 0; }

kw_status kw_graph_edges(const kw_graph* g, long long* pairs, size_t capacity) {
    if (!g || !pairs) return fail(KW_ERR_INVALID_ARGUMENT, "null argument");
    const auto& edges = g->graph.edges();
    if (capacity < 2 * edges.size())
        return fail(KW_ERR_INVALID_ARGUMENT, "edge buffer too small");
    size_t k = 0;
    for (const auto& [i, j] : edges) {
        pairs[k++] = i;
        pairs[k++] = j;
    }
    return KW_OK;
}

kw_status kw_graph_girth(const kw_graph* g, long long* out) {
    if (!g || !out) return fail(KW_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        const auto girth = g->graph.girth();
        *out = girth ? *girth : -1;
        return KW_OK;
    });
}

kw_status kw_graph_connectivity_ratio(const kw_graph* g, long long* num, long long* den) {
    if (!g || !num || !den) return fail(KW_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        const auto ratio = kwise::connectivity_ratio(g->graph.family(), g->graph.size_param());
        *num = ratio.num;
        *den = ratio.den;
        return KW_OK;
    });
}

kw_status kw_graph_to_json(const kw_graph* g, char* buf, size_t capacity, size_t* len) {
    if (!g || !len) return fail(KW_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        const std::string json = g->graph.to_json();
        *len = json.size() + 1;
        if (buf) {
            if (capacity < *len) return fail(KW_ERR_INVALID_ARGUMENT, "json buffer too small");
            std::memcpy(buf, json.c_str(), *len);
        }
        return KW_OK;
    });
}

kw_status kw_margin_create(const char* name, int ell, kw_margin** out) {
    if (!name || !out) return fail(KW_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        *out = new kw_margin{kwise::margin_by_name(name, ell)};
        return KW_OK;
    });
}

kw_status kw_margin_create_table(const double* probs, const double* values, size_t n_knots,
                                 int ell, kw_margin** out) {
    if (!probs || !values || !out) return fail(KW_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        std::vector<std::pair<double, double>> knots;
        knots.reserve(n_knots);
        for (size_t i = 0; i < n_knots; ++i) knots.emplace_back(probs[i], values[i]);
        *out = new kw_margin{kwise::margin_from_quantile_table(knots, ell)};
        return KW_OK;
    });
}

void kw_margin_free(kw_margin* m) { delete m; }

kw_status kw_margin_get_info(const kw_margin* m, kw_margin_info* out) {
    if (!m || !out) return fail(KW_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        const auto& spec = m->margin;
        out->ell = spec.ell;
        out->mu_u = spec.mu_u;
        out->sigma2_u = spec.sigma2_u;
        out->mu_v = spec.mu_v;
        out->sigma2_v = spec.sigma2_v;
        out->mu = spec.mu;
        out->sigma2 = spec.sigma2;
        out->r = spec.mixing_coefficient();
        return KW_OK;
    });
}

kw_status kw_simulate(const kw_sim_spec* spec, long long* xi_count, double* xi_std, double* s_n,
                      long long* n_edges_out) {
    if (!spec || !spec->family || !xi_count || !xi_std)
        return fail(KW_ERR_INVALID_ARGUMENT, "null argument");
    if ((spec->margin != nullptr) != (s_n != nullptr))
        return fail(KW_ERR_INVALID_ARGUMENT,
                    "s_n buffer must be provided exactly when a margin is attached");
    return guarded([&] {
        const auto fam = kwise::family_from_string(spec->family);
        if (!fam)
            return fail(KW_ERR_INVALID_ARGUMENT,
                        std::string("unknown family '") + spec->family + "'");
        kwise::SimSpec sim;
        sim.family = *fam;
        sim.param = spec->param;
        sim.ell = spec->ell;
        sim.margin = spec->margin ? &spec->margin->margin : nullptr;
        sim.replications = spec->replications;
        sim.seed = spec->seed;
        sim.fast_path = spec->fast_path != 0;
        sim.threads = spec->threads;
        const kwise::SimResult result = kwise::simulate(sim);
        for (size_t i = 0; i < result.xi_count.size(); ++i) {
            xi_count[i] = result.xi_count[i];
            xi_std[i] = result.xi_std[i];
        }
        if (s_n)
            for (size_t i = 0; i < result.s_n.size(); ++i) s_n[i] = result.s_n[i];
        if (n_edges_out) *n_edges_out = result.n_edges;
        return KW_OK;
    });
}

kw_status kw_law_create(const char* spec, kw_law** out) {
    if (!spec || !out) return fail(KW_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        *out = new kw_law{kwise::LimitLaw::parse(spec)};
        return KW_OK;
    });
}

void kw_law_free(kw_law* law) { delete law; }

kw_status kw_law_pdf(const kw_law* law, double x, double* out) {
    if (!law || !out) return fail(KW_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        *out = law->law.pdf(x);
        return KW_OK;
    });
}

kw_status kw_law_cdf(const kw_law* law, double x, double* out) {
    if (!law || !out) return fail(KW_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        *out = law->law.cdf(x);
        return KW_OK;
    });
}

kw_status kw_law_cf(const kw_law* law, double t, double* out) {
    if (!law || !out) return fail(KW_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        *out = law->law.cf(t);
        return KW_OK;
    });
}

kw_status kw_law_moments(const kw_law* law, double out[4]) {
    if (!law || !out) return fail(KW_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        const auto m = law->law.moments();
        for (int i = 0; i < 4; ++i) out[i] = m[static_cast<size_t>(i)];
        return KW_OK;
    });
}

kw_status kw_law_sample(const kw_law* law, uint64_t seed, size_t count, double* out) {
    if (!law || !out) return fail(KW_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        for (size_t i = 0; i < count; ++i) {
            kwise::Rng rng(seed, i);
            out[i] = law->law.sample(rng);
        }
        return KW_OK;
    });
}

kw_status kw_law_tabulate(const kw_law* law, double lo, double hi, double step, double* pdf,
                          double* cdf, size_t capacity, size_t* written, double* pdf_clip,
                          double* cdf_repair) {
    if (!law || !pdf || !cdf || !written) return fail(KW_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        const auto tables =
            kwise::cf_invert([&](double t) { return law->law.cf(t); }, lo, hi, step);
        if (tables.x.size() > capacity)
            return fail(KW_ERR_INVALID_ARGUMENT, "tabulation buffer too small");
        for (size_t i = 0; i < tables.x.size(); ++i) {
            pdf[i] = tables.pdf[i];
            cdf[i] = tables.cdf[i];
        }
        *written = tables.x.size();
        if (pdf_clip) *pdf_clip = tables.pdf_clip_magnitude;
        if (cdf_repair) *cdf_repair = tables.monotonicity_repair;
        return KW_OK;
    });
}

kw_status kw_exact_kwise_check(const kw_graph* g, int ell, int k, uint64_t state_cap,
                               kw_indep_report* out) {
    if (!g || !out) return fail(KW_ERR_INVALID_ARGUMENT, "null argument");
    if (k > KW_MAX_TUPLE)
        return fail(KW_ERR_INVALID_ARGUMENT, "K exceeds KW_MAX_TUPLE");
    return guarded([&] {
        const auto report = kwise::exact_kwise_check(
            g->graph, ell, k, state_cap ? state_cap : kwise::exact::kDefaultStateCap);
        out->independent = report.independent ? 1 : 0;
        out->tuple_size = report.tuple_size;
        out->tuples_checked = report.tuples_checked;
        copy_string(out->max_abs_deviation, sizeof out->max_abs_deviation,
                    report.max_abs_deviation);
        out->witness_len = static_cast<int>(report.witness_edges.size());
        for (size_t i = 0; i < report.witness_edges.size() && i < KW_MAX_TUPLE; ++i) {
            out->witness_edges[i] = report.witness_edges[i];
            out->witness_outcome[i] = report.witness_outcome[i];
        }
        copy_string(out->witness_joint, sizeof out->witness_joint, report.witness_joint);
        copy_string(out->witness_product, sizeof out->witness_product, report.witness_product);
        return KW_OK;
    });
}

kw_status kw_sampled_kwise_check(const kw_graph* g, int ell, int k, long long tuples,
                                 long long reps, uint64_t seed, double alpha,
                                 kw_sampled_report* out) {
    if (!g || !out) return fail(KW_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        const auto report = kwise::test_kwise_sampled(g->graph, ell, k, tuples, reps, seed, alpha);
        out->tuple_size = report.tuple_size;
        out->tuples = report.tuples;
        out->rejected = report.rejected;
        out->alpha = report.alpha;
        out->rejected_fraction = report.rejected_fraction();
        double min_p = 1.0;
        for (const double p : report.p_values) min_p = std::min(min_p, p);
        out->min_p_value = min_p;
        return KW_OK;
    });
}

kw_status kw_gof_ks(const double* x, size_t n, const kw_law* law, kw_gof_report* out) {
    if (!x || !law || !out) return fail(KW_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        const auto report = kwise::ks_statistic(std::vector<double>(x, x + n),
                                                kwise::ReferenceCdf::from_law(law->law));
        fill_gof(out, report);
        return KW_OK;
    });
}

kw_status kw_gof_ks_two_sample(const double* a, size_t na, const double* b, size_t nb,
                               kw_gof_report* out) {
    if (!a || !b || !out) return fail(KW_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        const auto report = kwise::two_sample_ks(std::vector<double>(a, a + na),
                                                 std::vector<double>(b, b + nb));
        fill_gof(out, report);
        return KW_OK;
    });
}

kw_status kw_gof_ad_normal(const double* x, size_t n, kw_gof_report* out) {
    if (!x || !out) return fail(KW_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        const auto report = kwise::anderson_darling_normal(std::vector<double>(x, x + n));
        fill_gof(out, report);
        return KW_OK;
    });
}

kw_status kw_gof_chi2(const double* x, size_t n, const kw_law* law, int bins,
                      kw_gof_report* out) {
    if (!x || !law || !out) return fail(KW_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        const int use_bins = bins > 0 ? bins : kwise::default_chi2_bins(static_cast<long long>(n));
        const auto report = kwise::pearson_chi2(std::vector<double>(x, x + n),
                                                kwise::ReferenceCdf::from_law(law->law), use_bins);
        fill_gof(out, report);
        return KW_OK;
    });
}

}  // extern "C"
