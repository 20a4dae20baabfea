#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "kwise/graph.hpp"
#include "kwise/margins.hpp"
#include "kwise/rng.hpp"

namespace kwise {

// One realization of the construction on a graph: uniform labels M on the
// vertices, edge indicators D (canonical edge order), the count Xi and its
// analytic standardization, and optionally the X layer with its
// standardized mean.
struct SequenceSample {
    std::vector<std::int32_t> m_labels;  // values in 1..ell
    std::vector<std::uint8_t> d_values;  // one bit per edge
    long long xi_count = 0;
    double xi_std = 0.0;
    std::optional<std::vector<double>> x_values;
    std::optional<double> s_n;
};

// (Xi - n/ell) / sqrt(n (1/ell)(1 - 1/ell)); the same analytic
// standardization for every family, never a sample estimate.
double xi_standardize(long long xi, long long n_edges, int ell);

std::vector<std::int32_t> draw_labels(const Graph& g, int ell, Rng& rng);

// Fills d_values/xi_count/xi_std from the labels; deterministic.
SequenceSample edge_indicators(const Graph& g, const std::vector<std::int32_t>& labels, int ell);

struct XiDraw {
    long long xi_count = 0;
    double xi_std = 0.0;
};

// Distributional fast paths: identical in law to running edge_indicators on
// the corresponding family graph, but O(m + ell) instead of O(edges).
XiDraw xi_fast_bipartite(std::int64_t m, int ell, Rng& rng);
XiDraw xi_fast_two_hub(std::int64_t m, Rng& rng);  // ell = 2 only
XiDraw xi_fast_fan(std::int64_t m, Rng& rng);      // ell = 2 only

// Draws X_k from the U part where D_k = 0 and the V part where D_k = 1
// (fresh independent draws per edge) and computes
// s_n = (sum X - n mu) / (sigma sqrt(n)).
void build_x_sequence(SequenceSample& sample, const MarginSpec& margin, Rng& rng);

// Same standardized mean when only Xi is known: the positions of the 1s do
// not affect the sum. Degenerate (point-mass) parts short-circuit to the
// exact closed form.
double s_n_from_xi(long long xi, long long n_edges, const MarginSpec& margin, Rng& rng);

bool family_has_fast_path(Family family, int ell);

struct SimSpec {
    Family family = Family::bipartite;
    std::int64_t param = 1;
    int ell = 2;
    const MarginSpec* margin = nullptr;  // optional; Xi-only studies skip it
    long long replications = 1;
    std::uint64_t seed = 0;
    bool fast_path = false;
    int threads = 0;  // 0: KWISE_THREADS env var, then hardware concurrency
};

struct SimResult {
    std::vector<long long> xi_count;
    std::vector<double> xi_std;
    std::vector<double> s_n;  // empty when no margin is attached
    long long n_edges = 0;
};

// Runs replications in parallel; replication j always uses the RNG stream
// derived from (seed, j), so the output is independent of thread count and
// scheduling order.
SimResult simulate(const SimSpec& spec);

int resolve_thread_count(int requested);

}  // namespace kwise
