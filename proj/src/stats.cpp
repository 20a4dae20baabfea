#include "kwise/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "kwise/exact.hpp"
#include "kwise/rng.hpp"
#include "kwise/sampler.hpp"
#include "kwise/special.hpp"

namespace kwise {

namespace {

using u128 = unsigned __int128;

const std::vector<double> kDecisionAlphas = {0.10, 0.05, 0.01, 0.001};

std::vector<std::pair<double, bool>> decisions(double p) {
    std::vector<std::pair<double, bool>> out;
    out.reserve(kDecisionAlphas.size());
    for (const double alpha : kDecisionAlphas) out.emplace_back(alpha, p < alpha);
    return out;
}

std::string u128_to_string(u128 v) {
    if (v == 0) return "0";
    std::string digits;
    while (v > 0) {
        digits.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
        v /= 10;
    }
    std::reverse(digits.begin(), digits.end());
    return digits;
}

u128 gcd_u128(u128 a, u128 b) {
    while (b != 0) {
        const u128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

std::string rational_string(u128 num, u128 den) {
    if (num == 0) return "0";
    const u128 g = gcd_u128(num, den);
    return u128_to_string(num / g) + "/" + u128_to_string(den / g);
}

}  // namespace

ReferenceCdf ReferenceCdf::from_law(const LimitLaw& law) {
    ReferenceCdf ref;
    ref.cdf = [law](double x) { return law.cdf(x); };
    ref.cdf_left = [law](double x) { return law.cdf_left(x); };
    ref.label = law.label();
    return ref;
}

ReferenceCdf ReferenceCdf::continuous(std::function<double(double)> f, std::string label) {
    ReferenceCdf ref;
    ref.cdf = f;
    ref.cdf_left = std::move(f);
    ref.label = std::move(label);
    return ref;
}

GofReport ks_statistic(std::vector<double> samples, const ReferenceCdf& ref) {
    if (samples.empty()) throw std::invalid_argument("ks_statistic: empty sample");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    // Signed one-sided sups; with ties the extreme sits at a run boundary
    // and interior indices only produce smaller signed values.
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        d = std::fmax(d, (static_cast<double>(i) + 1.0) / n - ref.cdf(samples[i]));
        d = std::fmax(d, ref.cdf_left(samples[i]) - static_cast<double>(i) / n);
    }
    GofReport report;
    report.test_name = "ks";
    report.statistic = d;
    report.p_value = kolmogorov_sf(std::sqrt(n) * d);
    report.sample_size = static_cast<long long>(samples.size());
    report.reference_law = ref.label;
    report.decision_at = decisions(report.p_value);
    return report;
}

double ks_distance(std::vector<double> samples, const ReferenceCdf& ref,
                   bool midpoint_correction) {
    if (samples.empty()) throw std::invalid_argument("ks_distance: empty sample");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    std::size_t i = 0;
    while (i < samples.size()) {
        std::size_t j = i;
        while (j < samples.size() && samples[j] == samples[i]) ++j;
        const double below = static_cast<double>(i) / n;
        const double above = static_cast<double>(j) / n;
        if (midpoint_correction) {
            const double emp = 0.5 * (below + above);
            const double model = 0.5 * (ref.cdf(samples[i]) + ref.cdf_left(samples[i]));
            d = std::fmax(d, std::fabs(emp - model));
        } else {
            d = std::fmax(d, std::fabs(above - ref.cdf(samples[i])));
            d = std::fmax(d, std::fabs(ref.cdf_left(samples[i]) - below));
        }
        i = j;
    }
    return d;
}

GofReport two_sample_ks(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("two_sample_ks: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() || j < b.size()) {
        const double v = (i < a.size() && (j >= b.size() || a[i] <= b[j])) ? a[i] : b[j];
        while (i < a.size() && a[i] == v) ++i;
        while (j < b.size() && b[j] == v) ++j;
        d = std::fmax(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    GofReport report;
    report.test_name = "two_sample_ks";
    report.statistic = d;
    report.p_value = kolmogorov_sf(std::sqrt(na * nb / (na + nb)) * d);
    report.sample_size = static_cast<long long>(a.size() + b.size());
    report.reference_law = "two-sample";
    report.decision_at = decisions(report.p_value);
    return report;
}

GofReport anderson_darling_normal(std::vector<double> samples) {
    if (samples.empty()) throw std::invalid_argument("anderson_darling_normal: empty sample");
    std::sort(samples.begin(), samples.end());
    const std::size_t n = samples.size();
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double log_lo = log_norm_cdf(samples[i]);
        const double log_hi = log_norm_cdf(-samples[n - 1 - i]);  // log(1 - Phi)
        acc += (2.0 * static_cast<double>(i) + 1.0) * (log_lo + log_hi);
    }
    const double dn = static_cast<double>(n);
    GofReport report;
    report.test_name = "anderson_darling";
    report.statistic = -dn - acc / dn;
    report.p_value = 1.0 - anderson_darling_cdf(report.statistic, static_cast<long long>(n));
    report.sample_size = static_cast<long long>(n);
    report.reference_law = "gaussian";
    report.decision_at = decisions(report.p_value);
    return report;
}

int default_chi2_bins(long long n) {
    return static_cast<int>(std::ceil(2.0 * std::pow(static_cast<double>(n), 0.4)));
}

GofReport pearson_chi2(const std::vector<double>& samples, const ReferenceCdf& ref, int bins) {
    if (samples.empty()) throw std::invalid_argument("pearson_chi2: empty sample");
    if (bins < 2) throw std::invalid_argument("pearson_chi2: need at least 2 bins");
    const double expected = static_cast<double>(samples.size()) / bins;
    if (expected < 5.0)
        throw std::invalid_argument("pearson_chi2: expected cell count below 5 (" +
                                    std::to_string(expected) + "); use fewer bins");
    std::vector<long long> observed(static_cast<std::size_t>(bins), 0);
    for (const double x : samples) {
        const double u = std::clamp(ref.cdf(x), 0.0, 1.0);
        const int cell = std::min(bins - 1, static_cast<int>(u * bins));
        ++observed[static_cast<std::size_t>(cell)];
    }
    double stat = 0.0;
    for (const long long o : observed) {
        const double diff = static_cast<double>(o) - expected;
        stat += diff * diff / expected;
    }
    GofReport report;
    report.test_name = "pearson_chi2";
    report.statistic = stat;
    report.p_value = chi2_sf(stat, static_cast<double>(bins - 1));
    report.sample_size = static_cast<long long>(samples.size());
    report.reference_law = ref.label;
    report.decision_at = decisions(report.p_value);
    return report;
}

bool MomentReport::all_within(double z_max) const {
    for (const auto& m : moments)
        if (std::fabs(m.z) > z_max) return false;
    return true;
}

MomentReport moment_suite(const std::vector<double>& samples, const LimitLaw& law) {
    if (samples.size() < 10000)
        throw std::invalid_argument("moment_suite: need at least 10^4 samples");
    const auto expected = law.moments();
    const double n = static_cast<double>(samples.size());
    MomentReport report;
    for (int k = 1; k <= 4; ++k) {
        double mean = 0.0;
        for (const double x : samples) mean += std::pow(x, k);
        mean /= n;
        double var = 0.0;
        for (const double x : samples) {
            const double d = std::pow(x, k) - mean;
            var += d * d;
        }
        var /= n;
        const double se = std::sqrt(var / n);
        auto& check = report.moments[static_cast<std::size_t>(k - 1)];
        check.sample = mean;
        check.expected = expected[static_cast<std::size_t>(k - 1)];
        check.z = se > 0.0 ? (mean - check.expected) / se
                           : (mean == check.expected ? 0.0 : INFINITY);
    }
    return report;
}

namespace {

std::uint64_t binomial_count(long long n, long long k) {
    if (k < 0 || k > n) return 0;
    std::uint64_t result = 1;
    k = std::min(k, n - k);
    for (long long i = 1; i <= k; ++i)
        result = result * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    return result;
}

// Lexicographic unranking via the combinatorial number system; lets worker
// threads jump straight to their subset range.
void unrank_subset(std::uint64_t rank, long long n, int k, std::vector<int>& subset) {
    int value = 0;
    for (int i = 0; i < k; ++i) {
        for (;;) {
            const std::uint64_t below = binomial_count(n - 1 - value, k - 1 - i);
            if (below > rank) break;
            rank -= below;
            ++value;
        }
        subset[static_cast<std::size_t>(i)] = value++;
    }
}

struct ExactViolation {
    std::uint64_t subset_rank = ~std::uint64_t{0};
    std::vector<int> edges;
    long long outcome = 0;
    std::uint64_t joint = 0;
    u128 product = 0;
};

}  // namespace

IndependenceReport exact_kwise_check(const Graph& g, int ell, int k, std::uint64_t state_cap) {
    const long long n = g.edge_count();
    if (k < 1 || k > n)
        throw std::invalid_argument("exact_kwise_check: K must be in 1..edge_count");
    const auto hist = exact::edge_mask_histogram(g, ell, state_cap);
    const double bits_per_state = static_cast<double>(g.vertex_count()) * std::log2(ell);
    if (bits_per_state * k > 126.0)
        throw std::invalid_argument(
            "exact_kwise_check: ell^(vK) exceeds 128-bit exact arithmetic; reduce K or the graph");

    const u128 states = hist.states;  // ell^v
    u128 scale = 1;                   // ell^{v(K-1)}
    for (int i = 0; i + 1 < k; ++i) scale *= states;
    const u128 denominator = scale * states;  // ell^{vK}

    // Marginal one-counts per edge.
    std::vector<std::uint64_t> ones(static_cast<std::size_t>(n), 0);
    for (std::size_t m = 0; m < hist.masks.size(); ++m)
        for (long long e = 0; e < n; ++e)
            if (hist.masks[m] >> e & 1) ones[static_cast<std::size_t>(e)] += hist.multiplicity[m];

    const std::uint64_t total_subsets = binomial_count(n, k);

    // Scans subset ranks [lo, hi); exact integer arithmetic throughout, and
    // the merge below keeps the result identical for any worker count.
    auto scan_range = [&](std::uint64_t lo, std::uint64_t hi, u128& max_dev,
                          ExactViolation& first) {
        std::vector<int> subset(static_cast<std::size_t>(k));
        unrank_subset(lo, n, k, subset);
        std::vector<std::uint64_t> joint(std::size_t{1} << k);
        for (std::uint64_t rank = lo; rank < hi; ++rank) {
            std::fill(joint.begin(), joint.end(), 0);
            for (std::size_t m = 0; m < hist.masks.size(); ++m) {
                const std::uint64_t mask = hist.masks[m];
                std::size_t outcome = 0;
                for (int b = 0; b < k; ++b)
                    outcome |= (mask >> subset[static_cast<std::size_t>(b)] & 1) << b;
                joint[outcome] += hist.multiplicity[m];
            }
            // All-ones first: a violating cycle is reported through the
            // outcome the construction's path identity speaks about.
            for (long long o = (1LL << k) - 1; o >= 0; --o) {
                u128 product = 1;
                for (int b = 0; b < k; ++b) {
                    const std::uint64_t c1 =
                        ones[static_cast<std::size_t>(subset[static_cast<std::size_t>(b)])];
                    product *= (o >> b & 1) ? c1 : static_cast<std::uint64_t>(states) - c1;
                }
                const u128 lhs = u128(joint[static_cast<std::size_t>(o)]) * scale;
                const u128 dev = lhs > product ? lhs - product : product - lhs;
                if (dev > max_dev) max_dev = dev;
                if (dev != 0 && rank < first.subset_rank) {
                    first.subset_rank = rank;
                    first.edges = subset;
                    first.outcome = o;
                    first.joint = joint[static_cast<std::size_t>(o)];
                    first.product = product;
                }
            }
            // Advance to the next subset in lexicographic order.
            int pos = k - 1;
            while (pos >= 0 &&
                   subset[static_cast<std::size_t>(pos)] == static_cast<int>(n) - k + pos)
                --pos;
            if (pos < 0) break;
            ++subset[static_cast<std::size_t>(pos)];
            for (int b = pos + 1; b < k; ++b)
                subset[static_cast<std::size_t>(b)] = subset[static_cast<std::size_t>(b - 1)] + 1;
        }
    };

    const int threads = static_cast<int>(std::min<std::uint64_t>(
        static_cast<std::uint64_t>(resolve_thread_count(0)),
        std::max<std::uint64_t>(total_subsets / 64, 1)));
    std::vector<u128> max_devs(static_cast<std::size_t>(threads), 0);
    std::vector<ExactViolation> firsts(static_cast<std::size_t>(threads));
    if (threads <= 1) {
        scan_range(0, total_subsets, max_devs[0], firsts[0]);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int t = 0; t < threads; ++t) {
            const std::uint64_t lo = total_subsets * static_cast<std::uint64_t>(t) /
                                     static_cast<std::uint64_t>(threads);
            const std::uint64_t hi = total_subsets * static_cast<std::uint64_t>(t + 1) /
                                     static_cast<std::uint64_t>(threads);
            pool.emplace_back([&, t, lo, hi] {
                scan_range(lo, hi, max_devs[static_cast<std::size_t>(t)],
                           firsts[static_cast<std::size_t>(t)]);
            });
        }
        for (auto& worker : pool) worker.join();
    }

    u128 max_dev = 0;
    const ExactViolation* winner = nullptr;
    for (std::size_t t = 0; t < max_devs.size(); ++t) {
        if (max_devs[t] > max_dev) max_dev = max_devs[t];
        if (firsts[t].subset_rank != ~std::uint64_t{0} &&
            (!winner || firsts[t].subset_rank < winner->subset_rank))
            winner = &firsts[t];
    }

    IndependenceReport report;
    report.tuple_size = k;
    report.tuples_checked = static_cast<long long>(total_subsets);
    report.independent = (max_dev == 0);
    report.max_abs_deviation = rational_string(max_dev, denominator);
    if (winner) {
        for (int b = 0; b < k; ++b) {
            report.witness_edges.push_back(winner->edges[static_cast<std::size_t>(b)]);
            report.witness_outcome.push_back(static_cast<int>(winner->outcome >> b & 1));
        }
        report.witness_joint = rational_string(winner->joint, states);
        report.witness_product = rational_string(winner->product, denominator);
    }
    return report;
}

namespace {

// Shared engine: outcome counts for each tuple over `reps` fresh labelings.
struct TupleCounts {
    std::vector<std::vector<long long>> outcome_counts;  // per tuple, size 2^K
    std::vector<std::vector<long long>> edge_ones;       // per tuple, per edge
};

TupleCounts count_tuple_outcomes(const Graph& g, int ell,
                                 const std::vector<std::vector<long long>>& tuples,
                                 long long reps, std::uint64_t seed) {
    if (reps < 1) throw std::invalid_argument("sampled independence check: reps must be >= 1");
    if (ell < 2) throw std::invalid_argument("sampled independence check: ell must be >= 2");
    TupleCounts counts;
    counts.outcome_counts.resize(tuples.size());
    counts.edge_ones.resize(tuples.size());
    for (std::size_t t = 0; t < tuples.size(); ++t) {
        counts.outcome_counts[t].assign(std::size_t{1} << tuples[t].size(), 0);
        counts.edge_ones[t].assign(tuples[t].size(), 0);
    }
    const auto& edges = g.edges();
    std::vector<std::int32_t> labels(static_cast<std::size_t>(g.vertex_count()));
    for (long long rep = 0; rep < reps; ++rep) {
        Rng rng(seed, static_cast<std::uint64_t>(rep));
        for (auto& label : labels)
            label = static_cast<std::int32_t>(1 + rng.uniform_int(static_cast<std::uint64_t>(ell)));
        for (std::size_t t = 0; t < tuples.size(); ++t) {
            std::size_t outcome = 0;
            for (std::size_t b = 0; b < tuples[t].size(); ++b) {
                const auto& [i, j] = edges[static_cast<std::size_t>(tuples[t][b])];
                const bool one = labels[static_cast<std::size_t>(i)] ==
                                 labels[static_cast<std::size_t>(j)];
                outcome |= static_cast<std::size_t>(one) << b;
                counts.edge_ones[t][b] += one;
            }
            ++counts.outcome_counts[t][outcome];
        }
    }
    return counts;
}

double tuple_chi2_pvalue_from_counts(const std::vector<long long>& outcome_counts,
                                     const std::vector<long long>& edge_ones, long long reps) {
    const std::size_t k = edge_ones.size();
    const double n = static_cast<double>(reps);
    double stat = 0.0;
    for (std::size_t o = 0; o < outcome_counts.size(); ++o) {
        double expected = n;
        for (std::size_t b = 0; b < k; ++b) {
            const double p1 = static_cast<double>(edge_ones[b]) / n;
            expected *= (o >> b & 1) ? p1 : 1.0 - p1;
        }
        const double observed = static_cast<double>(outcome_counts[o]);
        if (expected <= 0.0) {
            if (observed > 0.0) return 0.0;  // impossible cell observed
            continue;
        }
        const double diff = observed - expected;
        stat += diff * diff / expected;
    }
    const double df = static_cast<double>(outcome_counts.size()) - 1.0 - static_cast<double>(k);
    return chi2_sf(stat, df);
}

}  // namespace

double chi2_tuple_pvalue(const Graph& g, int ell, const std::vector<long long>& edge_indices,
                         long long reps, std::uint64_t seed) {
    for (const long long e : edge_indices)
        if (e < 0 || e >= g.edge_count())
            throw std::invalid_argument("chi2_tuple_pvalue: edge index out of range");
    const auto counts = count_tuple_outcomes(g, ell, {edge_indices}, reps, seed);
    return tuple_chi2_pvalue_from_counts(counts.outcome_counts[0], counts.edge_ones[0], reps);
}

double SampledIndependenceReport::rejected_fraction() const {
    return tuples > 0 ? static_cast<double>(rejected) / static_cast<double>(tuples) : 0.0;
}

SampledIndependenceReport test_kwise_sampled(const Graph& g, int ell, int k, long long tuples,
                                             long long reps, std::uint64_t seed, double alpha) {
    if (k < 1 || k > g.edge_count())
        throw std::invalid_argument("test_kwise_sampled: K must be in 1..edge_count");
    if (tuples < 1) throw std::invalid_argument("test_kwise_sampled: tuples must be >= 1");
    if (reps < 1) throw std::invalid_argument("test_kwise_sampled: reps must be >= 1");

    // Tuple selection uses its own stream, far away from replication streams.
    Rng pick(seed, std::uint64_t{1} << 63);
    const long long n = g.edge_count();
    std::vector<std::vector<long long>> chosen;
    chosen.reserve(static_cast<std::size_t>(tuples));
    std::vector<long long> indices(static_cast<std::size_t>(n));
    for (long long t = 0; t < tuples; ++t) {
        std::iota(indices.begin(), indices.end(), 0);
        std::vector<long long> tuple(static_cast<std::size_t>(k));
        for (int b = 0; b < k; ++b) {
            const std::size_t j = static_cast<std::size_t>(b) +
                                  pick.uniform_int(static_cast<std::uint64_t>(n - b));
            std::swap(indices[static_cast<std::size_t>(b)], indices[j]);
            tuple[static_cast<std::size_t>(b)] = indices[static_cast<std::size_t>(b)];
        }
        std::sort(tuple.begin(), tuple.end());
        chosen.push_back(std::move(tuple));
    }

    const auto counts = count_tuple_outcomes(g, ell, chosen, reps, seed);
    SampledIndependenceReport report;
    report.tuple_size = k;
    report.tuples = tuples;
    report.alpha = alpha;
    const double bonferroni = alpha / static_cast<double>(tuples);
    for (std::size_t t = 0; t < chosen.size(); ++t) {
        const double p =
            tuple_chi2_pvalue_from_counts(counts.outcome_counts[t], counts.edge_ones[t], reps);
        report.p_values.push_back(p);
        if (p < bonferroni) ++report.rejected;
    }
    return report;
}

}  // namespace kwise
