#include "kwise/margins.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kwise/special.hpp"

namespace kwise {

namespace {

void require_ell(int ell) {
    if (ell < 2) throw std::invalid_argument("margin: ell must be >= 2");
}

double rel_diff(double a, double b) {
    const double scale = std::fmax(1.0, std::fmax(std::fabs(a), std::fabs(b)));
    return std::fabs(a - b) / scale;
}

}  // namespace

double MarginSpec::sigma() const { return std::sqrt(sigma2); }

double MarginSpec::mixing_coefficient() const {
    if (!(sigma2 > 0.0))
        throw std::invalid_argument("mixing_coefficient: degenerate margin (sigma = 0)");
    const double w = 1.0 / ell;
    return std::sqrt(w * (1.0 - w)) * (mu_v - mu_u) / std::sqrt(sigma2);
}

void MarginSpec::validate(double rel_tol) const {
    require_ell(ell);
    if (!(sigma2 > 0.0))
        throw std::invalid_argument("margin '" + label + "': sigma^2 must be > 0");
    const double w = 1.0 / ell;
    const double mu_mix = (1.0 - w) * mu_u + w * mu_v;
    if (rel_diff(mu, mu_mix) > rel_tol)
        throw std::invalid_argument("margin '" + label + "': mean decomposition violated");
    const double var_mix =
        (1.0 - w) * sigma2_u + w * sigma2_v + w * (1.0 - w) * (mu_u - mu_v) * (mu_u - mu_v);
    if (rel_diff(sigma2, var_mix) > rel_tol)
        throw std::invalid_argument("margin '" + label + "': variance decomposition violated");
    const double r = mixing_coefficient();
    if (r * r > 1.0 + 1e-9)
        throw std::invalid_argument("margin '" + label + "': r^2 exceeds 1");
}

MarginSpec margin_bernoulli_half() {
    MarginSpec m;
    m.ell = 2;
    m.label = "bernoulli";
    m.mu_u = 0.0;
    m.sigma2_u = 0.0;
    m.mu_v = 1.0;
    m.sigma2_v = 0.0;
    m.mu = 0.5;
    m.sigma2 = 0.25;
    m.sample_u = [](Rng&) { return 0.0; };
    m.sample_v = [](Rng&) { return 1.0; };
    m.cdf = [](double x) { return x < 0.0 ? 0.0 : (x < 1.0 ? 0.5 : 1.0); };
    m.cdf_left = [](double x) { return x <= 0.0 ? 0.0 : (x <= 1.0 ? 0.5 : 1.0); };
    m.validate(1e-12);
    return m;
}

MarginSpec margin_uniform01(int ell) {
    require_ell(ell);
    const double q = 1.0 - 1.0 / ell;  // split point; A = (q, 1)
    MarginSpec m;
    m.ell = ell;
    m.label = "uniform01";
    m.mu_u = q / 2.0;
    m.sigma2_u = q * q / 12.0;
    m.mu_v = (q + 1.0) / 2.0;
    m.sigma2_v = (1.0 - q) * (1.0 - q) / 12.0;
    m.mu = 0.5;
    m.sigma2 = 1.0 / 12.0;
    m.sample_u = [q](Rng& rng) { return q * rng.uniform01(); };
    m.sample_v = [q](Rng& rng) { return q + (1.0 - q) * rng.uniform01(); };
    m.cdf = [](double x) { return std::clamp(x, 0.0, 1.0); };
    m.cdf_left = m.cdf;
    m.validate(1e-12);
    return m;
}

MarginSpec margin_std_normal(int ell) {
    require_ell(ell);
    const double q = 1.0 - 1.0 / ell;
    const double z = norm_cdf_inv(q);
    const double phi_z = norm_pdf(z);
    // Standard truncated-normal moments on either side of z.
    const double lam_v = phi_z / (1.0 - q);
    const double lam_u = phi_z / q;
    MarginSpec m;
    m.ell = ell;
    m.label = "normal";
    m.mu_v = lam_v;
    m.sigma2_v = 1.0 + z * lam_v - lam_v * lam_v;
    m.mu_u = -lam_u;
    m.sigma2_u = 1.0 - z * lam_u - lam_u * lam_u;
    m.mu = 0.0;
    m.sigma2 = 1.0;
    m.sample_u = [q](Rng& rng) { return norm_cdf_inv(q * rng.uniform01()); };
    m.sample_v = [q](Rng& rng) { return norm_cdf_inv(q + (1.0 - q) * rng.uniform01()); };
    m.cdf = [](double x) { return norm_cdf(x); };
    m.cdf_left = m.cdf;
    m.validate(1e-12);
    return m;
}

MarginSpec margin_custom(const std::function<double(double)>& quantile, int ell,
                         const QuadratureConfig& cfg) {
    require_ell(ell);
    const double q = 1.0 - 1.0 / static_cast<double>(ell);

    // An atom sitting exactly on the split quantile would give A a mass
    // different from 1/ell; the caller has to split such margins by hand.
    const double eps = 1e-9;
    if (!(quantile(q - eps) < quantile(q + eps)))
        throw std::invalid_argument(
            "margin_custom: F has an atom at the (1 - 1/ell)-quantile; the tail set "
            "would not have mass exactly 1/ell");

    auto conditional_moments = [&](double lo, double hi, double& mean, double& var) {
        const double mass = hi - lo;
        const auto m1 = integrate(quantile, lo, hi, cfg.abs_tol, cfg.max_depth);
        const auto m2 = integrate([&](double p) { const double v = quantile(p); return v * v; },
                                  lo, hi, cfg.abs_tol, cfg.max_depth);
        if (!m1.converged || !m2.converged)
            throw NumericError("margin_custom: moment quadrature did not converge (residual ~" +
                               std::to_string(std::fmax(m1.error, m2.error)) + ")");
        if (!std::isfinite(m1.value) || !std::isfinite(m2.value))
            throw NumericError("margin_custom: conditional moment overflow");
        mean = m1.value / mass;
        var = m2.value / mass - mean * mean;
    };

    MarginSpec m;
    m.ell = ell;
    m.label = "custom";
    conditional_moments(0.0, q, m.mu_u, m.sigma2_u);
    conditional_moments(q, 1.0, m.mu_v, m.sigma2_v);
    m.mu = q * m.mu_u + (1.0 - q) * m.mu_v;
    m.sigma2 = q * m.sigma2_u + (1.0 - q) * m.sigma2_v +
               q * (1.0 - q) * (m.mu_u - m.mu_v) * (m.mu_u - m.mu_v);
    if (!std::isfinite(m.sigma2)) throw NumericError("margin_custom: variance overflow");
    m.sample_u = [quantile, q](Rng& rng) { return quantile(q * rng.uniform01()); };
    m.sample_v = [quantile, q](Rng& rng) { return quantile(q + (1.0 - q) * rng.uniform01()); };
    m.validate(1e-8);
    return m;
}

MarginSpec margin_from_quantile_table(const std::vector<std::pair<double, double>>& knots,
                                      int ell, const QuadratureConfig& cfg) {
    if (knots.size() < 2)
        throw std::invalid_argument("quantile table needs at least two knots");
    for (std::size_t i = 0; i < knots.size(); ++i) {
        if (i > 0 && !(knots[i].first > knots[i - 1].first))
            throw std::invalid_argument("quantile table: p values must be strictly increasing");
        if (i > 0 && knots[i].second < knots[i - 1].second)
            throw std::invalid_argument("quantile table: x values must be non-decreasing");
    }
    if (knots.front().first != 0.0 || knots.back().first != 1.0)
        throw std::invalid_argument("quantile table must span p = 0 .. 1");

    auto quantile = [knots](double p) {
        p = std::clamp(p, 0.0, 1.0);
        auto it = std::upper_bound(knots.begin(), knots.end(), p,
                                   [](double v, const auto& k) { return v < k.first; });
        if (it == knots.begin()) return knots.front().second;
        if (it == knots.end()) return knots.back().second;
        const auto& hi = *it;
        const auto& lo = *(it - 1);
        const double t = (p - lo.first) / (hi.first - lo.first);
        return lo.second + t * (hi.second - lo.second);
    };

    MarginSpec m = margin_custom(quantile, ell, cfg);
    m.label = "quantile_table";
    // The table pins down F exactly, so expose the cdf as well.
    m.cdf = [knots](double x) {
        if (x < knots.front().second) return 0.0;
        double p = 1.0;
        for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
            const auto& lo = knots[i];
            const auto& hi = knots[i + 1];
            if (x >= hi.second) continue;
            if (hi.second == lo.second) return hi.first;
            p = lo.first + (hi.first - lo.first) * (x - lo.second) / (hi.second - lo.second);
            return std::clamp(p, lo.first, hi.first);
        }
        return p;
    };
    m.cdf_left = [knots, cdf = m.cdf](double x) {
        // Differs from the cdf only at atoms (flat quantile stretches).
        double mass_below = 0.0;
        for (std::size_t i = 0; i + 1 < knots.size(); ++i)
            if (knots[i].second == knots[i + 1].second && knots[i].second == x)
                mass_below = knots[i].first;
        return mass_below > 0.0 ? mass_below : cdf(x);
    };
    return m;
}

MarginSpec margin_by_name(const std::string& name, int ell) {
    if (name == "bernoulli") {
        if (ell != 2)
            throw std::invalid_argument("bernoulli margin requires ell = 2 (A = {1} has mass 1/2)");
        return margin_bernoulli_half();
    }
    if (name == "uniform01") return margin_uniform01(ell);
    if (name == "normal") return margin_std_normal(ell);
    throw std::invalid_argument("unknown margin '" + name +
                                "' (expected bernoulli|uniform01|normal)");
}

}  // namespace kwise
