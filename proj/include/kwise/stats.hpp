#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "kwise/graph.hpp"
#include "kwise/limit_laws.hpp"

namespace kwise {

// Reference distribution for goodness-of-fit tests. cdf_left differs from
// cdf only at atoms; for continuous references pass the same callable.
struct ReferenceCdf {
    std::function<double(double)> cdf;
    std::function<double(double)> cdf_left;
    std::string label;

    static ReferenceCdf from_law(const LimitLaw& law);
    static ReferenceCdf continuous(std::function<double(double)> f, std::string label);
};

struct GofReport {
    std::string test_name;  // ks | anderson_darling | pearson_chi2 | two_sample_ks
    double statistic = 0.0;
    double p_value = 1.0;
    long long sample_size = 0;
    std::string reference_law;
    std::vector<std::pair<double, bool>> decision_at;  // (alpha, reject?)
};

// One-sample Kolmogorov-Smirnov: D = sup |F_emp - F|, atom-aware, p-value
// from the asymptotic Kolmogorov distribution.
GofReport ks_statistic(std::vector<double> samples, const ReferenceCdf& ref);

// Plain sup distance, evaluating the reference once per distinct sample
// value (lattice samples repeat values heavily, and the reference cdf can
// be expensive). With midpoint_correction the comparison happens at the
// jump midpoints on both sides, which removes pure discretization
// staircase/atom artifacts when a lattice sample is held against a
// continuous limit; without it this is ks_statistic's D.
double ks_distance(std::vector<double> samples, const ReferenceCdf& ref,
                   bool midpoint_correction = false);

GofReport two_sample_ks(std::vector<double> a, std::vector<double> b);

// A^2 against a fully specified N(0,1) null (the samples are analytically
// standardized upstream; no parameters are estimated).
GofReport anderson_darling_normal(std::vector<double> samples);

// Pearson chi-squared with `bins` equiprobable cells under the reference
// cdf; p-value from chi^2(bins - 1).
GofReport pearson_chi2(const std::vector<double>& samples, const ReferenceCdf& ref, int bins);

// ceil(2 n^{2/5}), the usual equiprobable-cell rule.
int default_chi2_bins(long long n);

struct MomentCheck {
    double sample = 0.0;
    double expected = 0.0;
    double z = 0.0;  // standard-error-scaled deviation
};

struct MomentReport {
    std::array<MomentCheck, 4> moments;
    bool all_within(double z_max) const;
};

// Sample moments 1..4 against the law's analytic moments.
MomentReport moment_suite(const std::vector<double>& samples, const LimitLaw& law);

// Exact independence verification over the full label space, integer
// arithmetic throughout. A violation is witnessed by the first offending
// edge K-subset (in lexicographic order), preferring the all-ones outcome.
struct IndependenceReport {
    int tuple_size = 0;
    long long tuples_checked = 0;
    std::string max_abs_deviation;  // reduced rational "p/q"
    bool independent = true;
    std::vector<long long> witness_edges;  // canonical edge indices
    std::vector<int> witness_outcome;
    std::string witness_joint;    // exact rational
    std::string witness_product;  // exact rational
};

IndependenceReport exact_kwise_check(const Graph& g, int ell, int k,
                                     std::uint64_t state_cap = std::uint64_t{1} << 20);

// Chi-squared contingency test of one edge tuple's empirical joint against
// the product of its empirical marginals; df = 2^K - 1 - K.
double chi2_tuple_pvalue(const Graph& g, int ell, const std::vector<long long>& edge_indices,
                         long long reps, std::uint64_t seed);

struct SampledIndependenceReport {
    int tuple_size = 0;
    long long tuples = 0;
    long long rejected = 0;  // at alpha / tuples (Bonferroni)
    double alpha = 0.05;
    std::vector<double> p_values;
    double rejected_fraction() const;
};

// Statistical spot-check for graphs too large to enumerate: random edge
// K-subsets, chi-squared per tuple, Bonferroni-corrected rejections.
SampledIndependenceReport test_kwise_sampled(const Graph& g, int ell, int k, long long tuples,
                                             long long reps, std::uint64_t seed,
                                             double alpha = 0.05);

}  // namespace kwise
