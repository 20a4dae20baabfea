#pragma once

#include <functional>
#include <stdexcept>

namespace kwise {

// Thrown when a quadrature or inversion routine cannot meet its tolerance.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Standard normal density, cdf, log-cdf and inverse cdf. The inverse is a
// rational initial guess polished by one Halley step on erfc, accurate to a
// few ulps over (0, 1).
double norm_pdf(double x);
double norm_cdf(double x);
double log_norm_cdf(double x);
double norm_cdf_inv(double p);

// Regularized incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a).
double gamma_q(double a, double x);

// Survival function of the chi-squared distribution with df degrees of
// freedom.
double chi2_sf(double x, double df);

// Asymptotic Kolmogorov survival function Q(t) = 2 sum (-1)^{k-1} e^{-2k^2t^2}.
double kolmogorov_sf(double t);

// Asymptotic cdf of the Anderson-Darling statistic under a fully specified
// null, with the finite-n correction of Marsaglia & Marsaglia (2004).
double anderson_darling_cdf(double a_squared, long long n);

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    bool converged = false;
    long long evaluations = 0;
};

// Adaptive Gauss-Kronrod 7-15 on [a, b]. Bisects until the local error
// estimate meets tol (absolute) or max_depth is hit; integrable endpoint
// singularities are fine because the nodes are interior.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double abs_tol, int max_depth = 60);

}  // namespace kwise
