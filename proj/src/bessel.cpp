#include "kwise/bessel.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace kwise {

namespace {

constexpr double kEulerGamma = 0.57721566490153286061;

// Ascending series for K_0 and K_1, reliable for x < 2.
void k0_k1_series(double x, double& k0, double& k1) {
    const double q = 0.25 * x * x;
    const double lg = std::log(0.5 * x);

    double i0 = 1.0, i1 = 1.0;
    double s0 = 0.0;  // sum H_k q^k / (k!)^2
    double s1 = 1.0 - 2.0 * kEulerGamma;  // sum (H_k + H_{k+1} - 2g) q^k / (k! (k+1)!)
    double term0 = 1.0, term1 = 1.0, harmonic = 0.0;
    for (int k = 1; k <= 60; ++k) {
        term0 *= q / (static_cast<double>(k) * k);
        term1 *= q / (static_cast<double>(k) * (k + 1));
        harmonic += 1.0 / k;
        i0 += term0;
        i1 += term1;
        s0 += term0 * harmonic;
        s1 += term1 * (2.0 * harmonic + 1.0 / (k + 1.0) - 2.0 * kEulerGamma);
        if (term0 < 1e-18 * i0) break;
    }
    i1 *= 0.5 * x;
    k0 = -(lg + kEulerGamma) * i0 + s0;
    k1 = 1.0 / x + lg * i1 - 0.25 * x * s1;
}

// e^x K_nu(x) = int_0^inf exp(-x (cosh t - 1)) cosh(nu t) dt by trapezoid;
// the integrand is analytic in a strip so the rule converges geometrically.
double scaled_k_integral(double x, double nu) {
    const double h = std::fmin(0.25, M_PI / std::sqrt(21.0 * x));
    double sum = 0.5;  // t = 0 node: integrand is 1, weight h/2
    double peak = 1.0;
    for (int k = 1; k <= 20000; ++k) {
        const double t = h * k;
        const double term = std::exp(-x * (std::cosh(t) - 1.0)) * std::cosh(nu * t);
        sum += term;
        if (term > peak) peak = term;
        if (term < 1e-19 * peak && t > nu / x) break;
    }
    return h * sum;
}

}  // namespace

double bessel_k(double nu, double x) {
    if (!(x > 0.0)) throw std::invalid_argument("bessel_k: x must be > 0 (K diverges at 0)");
    if (nu < 0.0 || std::fabs(2.0 * nu - std::round(2.0 * nu)) > 1e-9)
        throw std::invalid_argument("bessel_k: 2*nu must be a non-negative integer");
    const long long two_nu = static_cast<long long>(std::llround(2.0 * nu));

    if (two_nu % 2 == 1) {
        // Half-integer orders: K_{1/2} e^x = sqrt(pi/2x), then upward
        // recurrence on the scaled values (stable, K grows with the order).
        double lo = std::sqrt(M_PI / (2.0 * x));  // e^x K_{1/2}
        if (two_nu == 1) return std::exp(-x) * lo;
        double hi = lo * (1.0 + 1.0 / x);  // e^x K_{3/2}
        for (long long t = 3; t < two_nu; t += 2) {
            const double next = lo + (static_cast<double>(t) / x) * hi;
            lo = hi;
            hi = next;
        }
        return std::exp(-x) * hi;
    }

    const long long order = two_nu / 2;
    double k0, k1;
    if (x < 2.0) {
        k0_k1_series(x, k0, k1);
    } else {
        const double scale = std::exp(-x);
        k0 = scale * scaled_k_integral(x, 0.0);
        k1 = scale * scaled_k_integral(x, 1.0);
    }
    if (order == 0) return k0;
    if (order == 1) return k1;
    double lo = k0, hi = k1;
    for (long long t = 1; t < order; ++t) {
        const double next = lo + (2.0 * static_cast<double>(t) / x) * hi;
        if (!std::isfinite(next)) return std::numeric_limits<double>::infinity();
        lo = hi;
        hi = next;
    }
    return hi;
}

}  // namespace kwise
