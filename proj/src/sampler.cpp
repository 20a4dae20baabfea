#include "kwise/sampler.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

namespace kwise {

double xi_standardize(long long xi, long long n_edges, int ell) {
    const double w = 1.0 / ell;
    const double n = static_cast<double>(n_edges);
    return (static_cast<double>(xi) - n * w) / std::sqrt(n * w * (1.0 - w));
}

std::vector<std::int32_t> draw_labels(const Graph& g, int ell, Rng& rng) {
    if (ell < 2) throw std::invalid_argument("draw_labels: ell must be >= 2");
    std::vector<std::int32_t> labels(static_cast<std::size_t>(g.vertex_count()));
    for (auto& label : labels)
        label = static_cast<std::int32_t>(1 + rng.uniform_int(static_cast<std::uint64_t>(ell)));
    return labels;
}

SequenceSample edge_indicators(const Graph& g, const std::vector<std::int32_t>& labels, int ell) {
    if (static_cast<std::int64_t>(labels.size()) != g.vertex_count())
        throw std::invalid_argument("edge_indicators: label count != vertex count");
    SequenceSample sample;
    sample.m_labels = labels;
    sample.d_values.resize(g.edges().size());
    long long xi = 0;
    std::size_t k = 0;
    for (const auto& [i, j] : g.edges()) {
        const std::uint8_t d =
            labels[static_cast<std::size_t>(i)] == labels[static_cast<std::size_t>(j)] ? 1 : 0;
        sample.d_values[k++] = d;
        xi += d;
    }
    sample.xi_count = xi;
    sample.xi_std = xi_standardize(xi, g.edge_count(), ell);
    return sample;
}

XiDraw xi_fast_bipartite(std::int64_t m, int ell, Rng& rng) {
    if (m < 1) throw std::invalid_argument("xi_fast_bipartite: m must be >= 1");
    if (ell < 2) throw std::invalid_argument("xi_fast_bipartite: ell must be >= 2");
    // Xi = sum_i N_i^(1) N_i^(2) over two independent equiprobable
    // multinomials with m trials each.
    std::vector<long long> side1(static_cast<std::size_t>(ell), 0);
    std::vector<long long> side2(static_cast<std::size_t>(ell), 0);
    for (std::int64_t t = 0; t < m; ++t)
        ++side1[rng.uniform_int(static_cast<std::uint64_t>(ell))];
    for (std::int64_t t = 0; t < m; ++t)
        ++side2[rng.uniform_int(static_cast<std::uint64_t>(ell))];
    long long xi = 0;
    for (int i = 0; i < ell; ++i)
        xi += side1[static_cast<std::size_t>(i)] * side2[static_cast<std::size_t>(i)];
    return {xi, xi_standardize(xi, m * m, ell)};
}

XiDraw xi_fast_two_hub(std::int64_t m, Rng& rng) {
    if (m < 1) throw std::invalid_argument("xi_fast_two_hub: m must be >= 1");
    // Xi = I * 2B + (1 - I) * m with I ~ Bernoulli(1/2), B ~ Binomial(m, 1/2).
    const bool hubs_equal = rng.bernoulli(0.5);
    const long long xi = hubs_equal ? 2 * rng.binomial(m, 0.5) : m;
    return {xi, xi_standardize(xi, 2 * m, 2)};
}

XiDraw xi_fast_fan(std::int64_t m, Rng& rng) {
    if (m < 1) throw std::invalid_argument("xi_fast_fan: m must be >= 1");
    // Xi = I (1 + m + 2B) + (1 - I) 2(m - B) with B ~ Binomial(m, 1/4).
    const bool hubs_equal = rng.bernoulli(0.5);
    const long long b = rng.binomial(m, 0.25);
    const long long xi = hubs_equal ? 1 + m + 2 * b : 2 * (m - b);
    return {xi, xi_standardize(xi, 3 * m + 1, 2)};
}

namespace {

double standardized_mean(double sum, long long n_edges, const MarginSpec& margin) {
    const double n = static_cast<double>(n_edges);
    return (sum - n * margin.mu) / (margin.sigma() * std::sqrt(n));
}

}  // namespace

void build_x_sequence(SequenceSample& sample, const MarginSpec& margin, Rng& rng) {
    std::vector<double> x(sample.d_values.size());
    double sum = 0.0;
    for (std::size_t k = 0; k < sample.d_values.size(); ++k) {
        x[k] = sample.d_values[k] ? margin.sample_v(rng) : margin.sample_u(rng);
        sum += x[k];
    }
    sample.s_n = standardized_mean(sum, static_cast<long long>(x.size()), margin);
    sample.x_values = std::move(x);
}

double s_n_from_xi(long long xi, long long n_edges, const MarginSpec& margin, Rng& rng) {
    double sum;
    if (margin.sigma2_u == 0.0 && margin.sigma2_v == 0.0) {
        sum = static_cast<double>(xi) * margin.mu_v +
              static_cast<double>(n_edges - xi) * margin.mu_u;
    } else {
        sum = 0.0;
        for (long long k = 0; k < xi; ++k) sum += margin.sample_v(rng);
        for (long long k = 0; k < n_edges - xi; ++k) sum += margin.sample_u(rng);
    }
    return standardized_mean(sum, n_edges, margin);
}

bool family_has_fast_path(Family family, int ell) {
    if (family == Family::bipartite) return true;
    if (family == Family::two_hub || family == Family::fan) return ell == 2;
    return false;
}

int resolve_thread_count(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("KWISE_THREADS")) {
        const int parsed = std::atoi(env);
        if (parsed > 0) return parsed;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

SimResult simulate(const SimSpec& spec) {
    if (spec.replications < 1) throw std::invalid_argument("simulate: replications must be >= 1");
    if (spec.ell < 2) throw std::invalid_argument("simulate: ell must be >= 2");
    if (spec.margin && spec.margin->ell != spec.ell)
        throw std::invalid_argument("simulate: margin ell does not match the requested ell");
    if (spec.fast_path && !family_has_fast_path(spec.family, spec.ell))
        throw std::invalid_argument(std::string("simulate: no fast path for family '") +
                                    family_name(spec.family) + "' at ell = " +
                                    std::to_string(spec.ell));

    std::optional<Graph> graph;
    long long n_edges = 0;
    if (spec.fast_path) {
        switch (spec.family) {
            case Family::bipartite: n_edges = spec.param * spec.param; break;
            case Family::two_hub: n_edges = 2 * spec.param; break;
            case Family::fan: n_edges = 3 * spec.param + 1; break;
            default: break;
        }
        if (spec.param < 1) throw std::invalid_argument("simulate: param must be >= 1");
    } else {
        switch (spec.family) {
            case Family::bipartite: graph.emplace(Graph::complete_bipartite(spec.param)); break;
            case Family::two_hub: graph.emplace(Graph::two_hub(spec.param)); break;
            case Family::hypercube: graph.emplace(Graph::hypercube(spec.param)); break;
            case Family::fan: graph.emplace(Graph::fan(spec.param)); break;
            case Family::cage: graph.emplace(Graph::cage_incidence(spec.param)); break;
            case Family::custom:
                throw std::invalid_argument("simulate: custom graphs need the library API");
        }
        n_edges = graph->edge_count();
    }

    SimResult result;
    result.n_edges = n_edges;
    const std::size_t reps = static_cast<std::size_t>(spec.replications);
    result.xi_count.resize(reps);
    result.xi_std.resize(reps);
    if (spec.margin) result.s_n.resize(reps);

    auto run_one = [&](long long rep) {
        Rng rng(spec.seed, static_cast<std::uint64_t>(rep));
        long long xi;
        double xi_std;
        if (spec.fast_path) {
            XiDraw draw{};
            switch (spec.family) {
                case Family::bipartite: draw = xi_fast_bipartite(spec.param, spec.ell, rng); break;
                case Family::two_hub: draw = xi_fast_two_hub(spec.param, rng); break;
                case Family::fan: draw = xi_fast_fan(spec.param, rng); break;
                default: break;
            }
            xi = draw.xi_count;
            xi_std = draw.xi_std;
            if (spec.margin)
                result.s_n[static_cast<std::size_t>(rep)] =
                    s_n_from_xi(xi, n_edges, *spec.margin, rng);
        } else {
            const auto labels = draw_labels(*graph, spec.ell, rng);
            SequenceSample sample = edge_indicators(*graph, labels, spec.ell);
            if (spec.margin) {
                build_x_sequence(sample, *spec.margin, rng);
                result.s_n[static_cast<std::size_t>(rep)] = *sample.s_n;
            }
            xi = sample.xi_count;
            xi_std = sample.xi_std;
        }
        result.xi_count[static_cast<std::size_t>(rep)] = xi;
        result.xi_std[static_cast<std::size_t>(rep)] = xi_std;
    };

    const int threads = std::min<long long>(resolve_thread_count(spec.threads),
                                            spec.replications);
    if (threads <= 1) {
        for (long long rep = 0; rep < spec.replications; ++rep) run_one(rep);
        return result;
    }
    std::atomic<long long> next{0};
    constexpr long long kChunk = 64;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const long long start = next.fetch_add(kChunk);
                if (start >= spec.replications) return;
                const long long stop = std::min(start + kChunk, spec.replications);
                for (long long rep = start; rep < stop; ++rep) run_one(rep);
            }
        });
    }
    for (auto& worker : pool) worker.join();
    return result;
}

}  // namespace kwise
