#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kwise/rng.hpp"

namespace kwise {

// A margin F split into its truncated parts off/on a Borel set A with
// P(W in A) = 1/ell: U ~ W | A^c and V ~ W | A. For the built-in margins and
// quantile-table margins, A is the upper 1/ell quantile tail. Immutable
// after construction; the samplers are pure given the caller's Rng.
struct MarginSpec {
    int ell = 2;
    std::string label;

    double mu_u = 0.0, sigma2_u = 0.0;
    double mu_v = 0.0, sigma2_v = 0.0;
    double mu = 0.0, sigma2 = 0.0;

    std::function<double(Rng&)> sample_u;
    std::function<double(Rng&)> sample_v;

    // cdf of F and its left limit, when available (used by the
    // goodness-of-fit layer; absent for opaque custom margins).
    std::function<double(double)> cdf;
    std::function<double(double)> cdf_left;

    double sigma() const;

    // r = sqrt((1/ell)(1 - 1/ell)) (mu_v - mu_u) / sigma.
    double mixing_coefficient() const;

    // Checks the mean/variance decompositions across (U, V) and 0 <= r^2 <= 1;
    // throws with the offending identity otherwise.
    void validate(double rel_tol) const;
};

MarginSpec margin_bernoulli_half();
MarginSpec margin_uniform01(int ell);
MarginSpec margin_std_normal(int ell);

struct QuadratureConfig {
    double abs_tol = 1e-10;
    int max_depth = 60;
};

// Margin given by its quantile function on (0, 1). A is the upper tail
// {W > F^{-1}(1 - 1/ell)}; conditional moments come from adaptive quadrature
// of the quantile. Rejects margins with an atom spanning the split point and
// degenerate (zero variance) margins.
MarginSpec margin_custom(const std::function<double(double)>& quantile, int ell,
                         const QuadratureConfig& cfg = {});

// Piecewise-linear quantile through (p, x) knots covering [0, 1]; the form
// accepted from margin config files.
MarginSpec margin_from_quantile_table(const std::vector<std::pair<double, double>>& knots,
                                      int ell, const QuadratureConfig& cfg = {});

MarginSpec margin_by_name(const std::string& name, int ell);

}  // namespace kwise
