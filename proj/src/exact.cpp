#include "kwise/exact.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <unordered_map>

namespace kwise {
namespace exact {

namespace {

// Mixed-radix odometer over label vectors; calls visit(labels) for each of
// the ell^v assignments.
template <typename Visit>
void for_each_labeling(std::int64_t v, int ell, Visit&& visit) {
    std::vector<std::int32_t> labels(static_cast<std::size_t>(v), 1);
    for (;;) {
        visit(labels);
        std::size_t pos = 0;
        while (pos < labels.size()) {
            if (labels[pos] < ell) {
                ++labels[pos];
                break;
            }
            labels[pos] = 1;
            ++pos;
        }
        if (pos == labels.size()) return;
    }
}

std::uint64_t binomial_u64(std::int64_t n, std::int64_t k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t result = 1;
    for (std::int64_t i = 1; i <= k; ++i)
        result = result * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    return result;
}

std::uint64_t pow_u64(std::uint64_t base, std::uint64_t exp) {
    std::uint64_t out = 1;
    for (std::uint64_t i = 0; i < exp; ++i) out *= base;
    return out;
}

// All compositions of m into ell non-negative parts, with the multinomial
// coefficient of each.
template <typename Visit>
void for_each_composition(std::int64_t m, int ell, Visit&& visit) {
    std::vector<std::int64_t> parts(static_cast<std::size_t>(ell), 0);
    std::vector<std::int64_t> stack;
    // Recursive descent without recursion: iterate via odometer over the
    // first ell-1 parts.
    std::function<void(std::size_t, std::int64_t)> rec = [&](std::size_t idx,
                                                             std::int64_t remaining) {
        if (idx + 1 == parts.size()) {
            parts[idx] = remaining;
            std::uint64_t multinomial = 1;
            std::int64_t used = 0;
            for (const auto p : parts) {
                multinomial *= binomial_u64(m - used, p);
                used += p;
            }
            visit(parts, multinomial);
            return;
        }
        for (std::int64_t take = 0; take <= remaining; ++take) {
            parts[idx] = take;
            rec(idx + 1, remaining - take);
        }
    };
    rec(0, m);
}

}  // namespace

std::uint64_t pow_u64_checked(std::uint64_t base, std::uint64_t exp, std::uint64_t cap) {
    std::uint64_t out = 1;
    for (std::uint64_t i = 0; i < exp; ++i) {
        if (out > cap / base)
            throw std::invalid_argument("exact enumeration: ell^v exceeds the state cap (" +
                                        std::to_string(cap) + ")");
        out *= base;
    }
    return out;
}

XiPmf xi_pmf_enumerated(const Graph& g, int ell, std::uint64_t state_cap) {
    if (ell < 2) throw std::invalid_argument("xi_pmf_enumerated: ell must be >= 2");
    XiPmf pmf;
    pmf.ell = ell;
    pmf.states = pow_u64_checked(static_cast<std::uint64_t>(ell),
                                 static_cast<std::uint64_t>(g.vertex_count()), state_cap);
    const auto& edges = g.edges();
    for_each_labeling(g.vertex_count(), ell, [&](const std::vector<std::int32_t>& labels) {
        long long xi = 0;
        for (const auto& [i, j] : edges)
            xi += labels[static_cast<std::size_t>(i)] == labels[static_cast<std::size_t>(j)];
        ++pmf.counts[xi];
    });
    return pmf;
}

XiPmf xi_pmf_fast_bipartite(std::int64_t m, int ell) {
    if (m < 1 || ell < 2) throw std::invalid_argument("xi_pmf_fast_bipartite: bad parameters");
    if (2 * m * std::log2(static_cast<double>(ell)) > 62.0)
        throw std::invalid_argument("xi_pmf_fast_bipartite: ell^(2m) exceeds 64-bit counts");
    XiPmf pmf;
    pmf.ell = ell;
    pmf.states = pow_u64(static_cast<std::uint64_t>(ell), static_cast<std::uint64_t>(2 * m));
    // Convolve the two independent multinomials: weight(a) * weight(b)
    // labelings give Xi = sum_i a_i b_i.
    std::vector<std::pair<std::vector<std::int64_t>, std::uint64_t>> sides;
    for_each_composition(m, ell, [&](const std::vector<std::int64_t>& parts, std::uint64_t w) {
        sides.emplace_back(parts, w);
    });
    for (const auto& [a, wa] : sides)
        for (const auto& [b, wb] : sides) {
            long long xi = 0;
            for (std::size_t i = 0; i < a.size(); ++i) xi += a[i] * b[i];
            pmf.counts[xi] += wa * wb;
        }
    return pmf;
}

XiPmf xi_pmf_fast_two_hub(std::int64_t m) {
    if (m < 1 || m > 60) throw std::invalid_argument("xi_pmf_fast_two_hub: m out of range");
    XiPmf pmf;
    pmf.ell = 2;
    pmf.states = std::uint64_t{1} << (m + 2);
    // P(Xi = k) * 2^{m+2} = 2 C(m, k/2) [k even] + 2^{m+1} [k = m].
    for (std::int64_t b = 0; b <= m; ++b) pmf.counts[2 * b] += 2 * binomial_u64(m, b);
    pmf.counts[m] += std::uint64_t{1} << (m + 1);
    return pmf;
}

XiPmf xi_pmf_fast_fan(std::int64_t m) {
    if (m < 1 || m > 30) throw std::invalid_argument("xi_pmf_fast_fan: m out of range");
    XiPmf pmf;
    pmf.ell = 2;
    pmf.states = std::uint64_t{1} << (2 * m + 2);
    // Over 2 * 4^m equally likely (I, B-trials) outcomes, doubled once more
    // to land on the 2^{2m+2} graph denominator:
    // I = 1: Xi = 1 + m + 2B with weight C(m, B) 3^{m-B},
    // I = 0: Xi = 2(m - B) with the same weight.
    for (std::int64_t b = 0; b <= m; ++b) {
        const std::uint64_t weight =
            binomial_u64(m, b) * pow_u64(3, static_cast<std::uint64_t>(m - b));
        pmf.counts[1 + m + 2 * b] += 2 * weight;
        pmf.counts[2 * (m - b)] += 2 * weight;
    }
    return pmf;
}

MaskHistogram edge_mask_histogram(const Graph& g, int ell, std::uint64_t state_cap) {
    if (ell < 2) throw std::invalid_argument("edge_mask_histogram: ell must be >= 2");
    if (g.edge_count() > 64)
        throw std::invalid_argument(
            "edge_mask_histogram: graphs with more than 64 edges are not supported by the "
            "exact path");
    MaskHistogram hist;
    hist.edge_count = static_cast<int>(g.edge_count());
    hist.states = pow_u64_checked(static_cast<std::uint64_t>(ell),
                                  static_cast<std::uint64_t>(g.vertex_count()), state_cap);
    std::unordered_map<std::uint64_t, std::uint32_t> table;
    table.reserve(1 << 12);
    const auto& edges = g.edges();
    for_each_labeling(g.vertex_count(), ell, [&](const std::vector<std::int32_t>& labels) {
        std::uint64_t mask = 0;
        for (std::size_t k = 0; k < edges.size(); ++k) {
            const auto& [i, j] = edges[k];
            if (labels[static_cast<std::size_t>(i)] == labels[static_cast<std::size_t>(j)])
                mask |= std::uint64_t{1} << k;
        }
        ++table[mask];
    });
    hist.masks.reserve(table.size());
    hist.multiplicity.reserve(table.size());
    // Deterministic order for reproducible witnesses downstream.
    std::vector<std::uint64_t> keys;
    keys.reserve(table.size());
    for (const auto& [mask, _] : table) keys.push_back(mask);
    std::sort(keys.begin(), keys.end());
    for (const auto key : keys) {
        hist.masks.push_back(key);
        hist.multiplicity.push_back(table[key]);
    }
    return hist;
}

}  // namespace exact
}  // namespace kwise
