#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "kwise/graph.hpp"

namespace kwise {
namespace exact {

constexpr std::uint64_t kDefaultStateCap = std::uint64_t{1} << 20;

// Exact pmf of Xi as integer counts over ell^v equally likely label vectors.
struct XiPmf {
    std::map<long long, std::uint64_t> counts;  // Xi value -> #label vectors
    std::uint64_t states = 1;                   // ell^v
    int ell = 2;
};

// Full enumeration of the label space. Throws when ell^v exceeds the cap.
XiPmf xi_pmf_enumerated(const Graph& g, int ell, std::uint64_t state_cap = kDefaultStateCap);

// Closed-form pmfs of the fast-path representations, expressed over the
// same denominator ell^v as the matching graph so equality checks are
// integer comparisons.
XiPmf xi_pmf_fast_bipartite(std::int64_t m, int ell);  // states = ell^{2m}
XiPmf xi_pmf_fast_two_hub(std::int64_t m);             // states = 2^{m+2}
XiPmf xi_pmf_fast_fan(std::int64_t m);                 // states = 2^{2m+2}

// Per-labeling edge indicator words for graphs with <= 64 edges, aggregated
// with multiplicities; the workhorse behind the exact independence checks.
struct MaskHistogram {
    std::vector<std::uint64_t> masks;
    std::vector<std::uint32_t> multiplicity;
    int edge_count = 0;
    std::uint64_t states = 1;  // ell^v
};

MaskHistogram edge_mask_histogram(const Graph& g, int ell,
                                  std::uint64_t state_cap = kDefaultStateCap);

std::uint64_t pow_u64_checked(std::uint64_t base, std::uint64_t exp, std::uint64_t cap);

}  // namespace exact
}  // namespace kwise
