#include "kwise/limit_laws.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "kwise/bessel.hpp"
#include "kwise/special.hpp"

namespace kwise {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double step_cdf(double x) { return x < 0.0 ? 0.0 : 1.0; }
double step_cdf_left(double x) { return x <= 0.0 ? 0.0 : 1.0; }

// ---- oscillatory semi-infinite integrals -------------------------------

struct OscOutcome {
    double value = 0.0;
    bool diverged = false;
};

// Integral of a non-oscillatory, eventually-decaying g over [0, inf).
// Dyadic segments with a geometric tail estimate; flags power-law
// divergence (exponent <= 1) instead of grinding forever.
OscOutcome nonosc_semiinfinite(const std::function<double(double)>& g, double abs_tol) {
    OscOutcome out;
    double lo = 0.0, hi = 1.0;
    double prev = kInf;
    for (int k = 0; k < 64; ++k) {
        const double c = integrate(g, lo, hi, abs_tol / 16.0, 48).value;
        out.value += c;
        const double mag = std::fabs(c);
        if (mag < abs_tol / 4.0) return out;
        if (std::isfinite(prev) && prev > 0.0) {
            const double ratio = mag / prev;
            if (ratio < 0.9) {
                // Geometric tail bound.
                if (mag * ratio / (1.0 - ratio) < abs_tol / 2.0) return out;
            } else if (hi >= 1048576.0) {
                out.diverged = true;
                return out;
            }
        }
        prev = mag;
        lo = hi;
        hi *= 2.0;
    }
    throw NumericError("cf inversion: tail integral did not settle (residual ~" +
                       std::to_string(prev) + ")");
}

// Integral of g(t) * trig(omega t) over [0, inf), integrating between
// consecutive zeros of the trig factor so the panel series alternates.
// Plain summation when the panel terms die quickly; Euler (repeated
// averaging) acceleration of the alternating tail otherwise.
double osc_semiinfinite(const std::function<double(double)>& g, double omega, bool use_sin,
                        double abs_tol) {
    const double half = M_PI / omega;
    auto integrand = [&](double t) {
        return g(t) * (use_sin ? std::sin(omega * t) : std::cos(omega * t));
    };
    // sin vanishes at k*half; cos at (k - 1/2)*half.
    auto boundary = [&](int k) {
        if (use_sin) return half * k;
        return k == 0 ? 0.0 : half * (k - 0.5);
    };

    constexpr int kMaxPanels = 220;
    std::vector<double> partial;
    partial.reserve(kMaxPanels);
    double sum = 0.0;
    double prev_term = kInf;
    const double panel_tol = std::fmax(abs_tol / 64.0, 1e-14);
    // For small omega the first panel dwarfs the cf's decay scale and a
    // single quadrature call could sample past all of its mass; chain over
    // dyadic sub-segments so the left edge is always resolved.
    auto panel_integral = [&](double a, double b) {
        if (b - a <= 16.0) return integrate(integrand, a, b, panel_tol, 48).value;
        double total = 0.0;
        double lo = a;
        double hi = a + 1.0;
        while (lo < b) {
            total += integrate(integrand, lo, std::fmin(hi, b), panel_tol, 48).value;
            lo = std::fmin(hi, b);
            hi = lo + (hi - a);
        }
        return total;
    };
    for (int k = 0; k < kMaxPanels; ++k) {
        const double term = panel_integral(boundary(k), boundary(k + 1));
        sum += term;
        partial.push_back(sum);
        // Alternating tail: the remainder is bounded by the first omitted term.
        if (std::fabs(term) < abs_tol / 4.0 && std::fabs(prev_term) < abs_tol / 4.0) return sum;
        prev_term = term;

        // Euler acceleration on the most recent partial sums.
        if (k >= 24 && k % 2 == 1) {
            const std::size_t window = std::min<std::size_t>(48, partial.size() - 8);
            std::vector<double> v(partial.end() - static_cast<long>(window), partial.end());
            double accel = v.front();
            double prev_level = accel;
            while (v.size() > 1) {
                for (std::size_t i = 0; i + 1 < v.size(); ++i) v[i] = 0.5 * (v[i] + v[i + 1]);
                v.pop_back();
                prev_level = accel;
                accel = v.front();
            }
            if (std::fabs(accel - prev_level) < abs_tol / 2.0) return accel;
        }
    }
    throw NumericError("cf inversion: oscillatory quadrature failed to converge (residual ~" +
                       std::to_string(std::fabs(prev_term)) + ")");
}

void check_integrable(const std::function<double(double)>& cf) {
    // A cf that never decays has an atom (cf == 1 being the canonical case);
    // Gil-Pelaez pdf recovery is meaningless there.
    if (std::fabs(cf(1e6)) > 0.5 && std::fabs(cf(3e6)) > 0.5)
        throw NumericError("cf inversion: cf does not decay (atom at 0?); not integrable");
}

}  // namespace

double cf_invert_pdf_point(const std::function<double(double)>& cf, double x) {
    const double ax = std::fabs(x);
    constexpr double tol = 1e-9;
    // For |x| this small the cosine is 1 to ~1e-12 over the whole support
    // of any unit-scale cf, and half-period panels would be astronomically
    // wide; integrate the cf directly.
    if (ax < 1e-7) {
        const OscOutcome out = nonosc_semiinfinite(cf, tol);
        if (out.diverged) return kInf;
        return out.value / M_PI;
    }
    return osc_semiinfinite(cf, ax, /*use_sin=*/false, tol) / M_PI;
}

double cf_invert_cdf_point(const std::function<double(double)>& cf, double x) {
    if (std::fabs(x) < 1e-7) return 0.5;  // symmetric laws only
    const double ax = std::fabs(x);
    constexpr double tol = 1e-9;
    auto g = [&](double t) { return cf(t) / t; };
    const double integral = osc_semiinfinite(g, ax, /*use_sin=*/true, tol) / M_PI;
    const double value = x > 0.0 ? 0.5 + integral : 0.5 - integral;
    return std::fmin(std::fmax(value, 0.0), 1.0);
}

CfInversionTables cf_invert(const std::function<double(double)>& cf, double lo, double hi,
                            double step) {
    if (!(step > 0.0) || !(hi >= lo)) throw std::invalid_argument("cf_invert: bad grid");
    check_integrable(cf);
    CfInversionTables tables;
    const long long count = static_cast<long long>(std::floor((hi - lo) / step + 0.5)) + 1;
    tables.x.reserve(static_cast<std::size_t>(count));
    for (long long i = 0; i < count; ++i) tables.x.push_back(lo + step * static_cast<double>(i));

    for (const double x : tables.x) {
        double p = cf_invert_pdf_point(cf, x);
        if (std::isfinite(p) && p < 0.0) {
            if (p < -1e-12)
                throw NumericError("cf inversion: pdf below the -1e-12 clip tolerance at x = " +
                                   std::to_string(x));
            tables.pdf_clip_magnitude += -p;
            p = 0.0;
        }
        tables.pdf.push_back(p);
        tables.cdf.push_back(cf_invert_cdf_point(cf, x));
    }
    for (std::size_t i = 1; i < tables.cdf.size(); ++i) {
        const double gap = tables.cdf[i - 1] - tables.cdf[i];
        if (gap > 0.0) {
            if (gap > 1e-9)
                throw NumericError("cf inversion: cdf non-monotone beyond 1e-9 at x = " +
                                   std::to_string(tables.x[i]));
            tables.monotonicity_repair += gap;
            tables.cdf[i] = tables.cdf[i - 1];
        }
    }
    return tables;
}

// ---- variance-gamma -----------------------------------------------------

double vg_pdf(double alpha, double theta, double s, double c, double x) {
    if (!(alpha > 0.0) || !(s > 0.0))
        throw std::invalid_argument("vg_pdf: need alpha > 0 and s > 0");
    if (theta != 0.0)
        throw std::invalid_argument("vg_pdf: nonzero theta is unsupported");
    if (std::fabs(alpha - std::round(alpha)) > 1e-9)
        throw std::invalid_argument("vg_pdf: alpha must be a positive integer "
                                    "(Bessel orders are restricted to half-integers)");
    const double nu = 0.5 * (alpha - 1.0);
    const double scale = s * s;  // VG(n, 0, s^2, 0) is s^2 times the s = 1 law
    const double z = std::fabs(x - c) / scale;
    const double norm = 1.0 / (scale * std::sqrt(M_PI) * std::tgamma(0.5 * alpha));
    if (z == 0.0) {
        // K_nu(z) ~ Gamma(nu)/2 * (2/z)^nu cancels the z^nu prefactor.
        if (alpha <= 1.0) return kInf;
        return norm * 0.5 * std::tgamma(nu);
    }
    const double k = bessel_k(nu, z);
    return norm * std::pow(0.5 * z, nu) * k;
}

double vg_cf(long long n, double s, double t) {
    if (n < 1 || !(s > 0.0)) throw std::invalid_argument("vg_cf: need n >= 1 and s > 0");
    const double s4 = s * s * s * s;
    return std::pow(1.0 + s4 * t * t, -0.5 * static_cast<double>(n));
}

std::pair<double, double> vg_moments(long long n, double s) {
    if (n < 1 || !(s > 0.0)) throw std::invalid_argument("vg_moments: need n >= 1 and s > 0");
    const double s4 = s * s * s * s;
    return {0.0, static_cast<double>(n) * s4};
}

// ---- LimitLaw -----------------------------------------------------------

LimitLaw LimitLaw::gaussian() {
    LimitLaw law;
    law.kind_ = Kind::gaussian;
    return law;
}

LimitLaw LimitLaw::vg_standardized(int ell) {
    if (ell < 2) throw std::invalid_argument("vg_standardized: ell must be >= 2");
    LimitLaw law;
    law.kind_ = Kind::vg_standardized;
    law.ell_ = ell;
    law.n_ = ell - 1;
    law.s_ = 1.0;
    return law;
}

LimitLaw LimitLaw::vg_raw(long long n, double s) {
    if (n < 1 || !(s > 0.0)) throw std::invalid_argument("vg_raw: need n >= 1 and s > 0");
    LimitLaw law;
    law.kind_ = Kind::vg_raw;
    law.n_ = n;
    law.s_ = s;
    return law;
}

LimitLaw LimitLaw::s_limit(int ell, double r) {
    if (ell < 2) throw std::invalid_argument("s_limit: ell must be >= 2");
    if (std::fabs(r) > 1.0) throw std::invalid_argument("s_limit: |r| must be <= 1");
    LimitLaw law;
    law.kind_ = Kind::s_limit;
    law.ell_ = ell;
    law.r_ = r;
    law.n_ = ell - 1;
    return law;
}

LimitLaw LimitLaw::two_hub_mixture(double r) {
    if (std::fabs(r) > 1.0) throw std::invalid_argument("two_hub_mixture: |r| must be <= 1");
    LimitLaw law;
    law.kind_ = Kind::two_hub_mixture;
    law.r_ = r;
    return law;
}

std::string LimitLaw::label() const {
    std::ostringstream os;
    switch (kind_) {
        case Kind::gaussian: return "gaussian";
        case Kind::vg_standardized: os << "vg:ell=" << ell_; break;
        case Kind::vg_raw: os << "vg:n=" << n_ << ",s=" << s_; break;
        case Kind::s_limit: os << "s-limit:ell=" << ell_ << ",r=" << r_; break;
        case Kind::two_hub_mixture: os << "two-hub-mixture:r=" << r_; break;
    }
    return os.str();
}

bool LimitLaw::has_atom() const {
    return kind_ == Kind::two_hub_mixture && std::fabs(r_) == 1.0;
}

double LimitLaw::atom_mass() const { return has_atom() ? 0.5 : 0.0; }

double LimitLaw::cf(double t) const {
    switch (kind_) {
        case Kind::gaussian: return std::exp(-0.5 * t * t);
        case Kind::vg_standardized: {
            const double m = static_cast<double>(ell_ - 1);
            return std::pow(1.0 + t * t / m, -0.5 * m);
        }
        case Kind::vg_raw: return vg_cf(n_, s_, t);
        case Kind::s_limit: {
            const double m = static_cast<double>(ell_ - 1);
            return std::exp(-0.5 * (1.0 - r_ * r_) * t * t) *
                   std::pow(1.0 + r_ * r_ * t * t / m, -0.5 * m);
        }
        case Kind::two_hub_mixture: {
            const double v0 = 1.0 - r_ * r_;
            const double v1 = 1.0 + r_ * r_;
            return 0.5 * std::exp(-0.5 * v0 * t * t) + 0.5 * std::exp(-0.5 * v1 * t * t);
        }
    }
    return 0.0;
}

double LimitLaw::pdf(double x) const {
    switch (kind_) {
        case Kind::gaussian: return norm_pdf(x);
        case Kind::vg_standardized: {
            const double root = std::sqrt(static_cast<double>(ell_ - 1));
            const double inner = vg_pdf(static_cast<double>(ell_ - 1), 0.0, 1.0, 0.0, x * root);
            return std::isinf(inner) ? kInf : root * inner;
        }
        case Kind::vg_raw: return vg_pdf(static_cast<double>(n_), 0.0, s_, 0.0, x);
        case Kind::s_limit: {
            if (r_ == 0.0) return norm_pdf(x);
            if (std::fabs(r_) == 1.0) return vg_standardized(ell_).pdf(x);
            return cf_invert_pdf_point([this](double t) { return cf(t); }, x);
        }
        case Kind::two_hub_mixture: {
            if (has_atom()) {
                if (x == 0.0) return kInf;  // the degenerate component
                return 0.5 * norm_pdf(x / std::sqrt(2.0)) / std::sqrt(2.0);
            }
            const double s0 = std::sqrt(1.0 - r_ * r_);
            const double s1 = std::sqrt(1.0 + r_ * r_);
            return 0.5 * norm_pdf(x / s0) / s0 + 0.5 * norm_pdf(x / s1) / s1;
        }
    }
    return 0.0;
}

double LimitLaw::cdf(double x) const {
    switch (kind_) {
        case Kind::gaussian: return norm_cdf(x);
        case Kind::vg_standardized: {
            const double root = std::sqrt(static_cast<double>(ell_ - 1));
            return vg_raw(ell_ - 1, 1.0).cdf(x * root);
        }
        case Kind::vg_raw: {
            const double scale = s_ * s_;
            if (std::fabs(x) > scale * (60.0 + 10.0 * static_cast<double>(n_)))
                return step_cdf(x);
            if (x == 0.0) return 0.5;
            return cf_invert_cdf_point([this](double t) { return cf(t); }, x);
        }
        case Kind::s_limit: {
            if (r_ == 0.0) return norm_cdf(x);
            if (std::fabs(r_) == 1.0) return vg_standardized(ell_).cdf(x);
            if (std::fabs(x) > 60.0) return step_cdf(x);
            if (x == 0.0) return 0.5;
            return cf_invert_cdf_point([this](double t) { return cf(t); }, x);
        }
        case Kind::two_hub_mixture: {
            const double s1 = std::sqrt(1.0 + r_ * r_);
            const double tail = 0.5 * norm_cdf(x / s1);
            if (has_atom()) return 0.5 * step_cdf(x) + tail;
            const double s0 = std::sqrt(1.0 - r_ * r_);
            return 0.5 * norm_cdf(x / s0) + tail;
        }
    }
    return 0.0;
}

double LimitLaw::cdf_left(double x) const {
    if (!has_atom()) return cdf(x);
    const double s1 = std::sqrt(1.0 + r_ * r_);
    return 0.5 * step_cdf_left(x) + 0.5 * norm_cdf(x / s1);
}

std::array<double, 4> LimitLaw::moments() const {
    switch (kind_) {
        case Kind::gaussian: return {0.0, 1.0, 0.0, 3.0};
        case Kind::vg_standardized: {
            const double m = static_cast<double>(ell_ - 1);
            return {0.0, 1.0, 0.0, 3.0 + 6.0 / m};
        }
        case Kind::vg_raw: {
            const double m = static_cast<double>(n_);
            const double s4 = s_ * s_ * s_ * s_;
            return {0.0, m * s4, 0.0, (3.0 * m * m + 6.0 * m) * s4 * s4};
        }
        case Kind::s_limit: {
            const double m = static_cast<double>(ell_ - 1);
            const double r4 = r_ * r_ * r_ * r_;
            return {0.0, 1.0, 0.0, 3.0 + 6.0 * r4 / m};
        }
        case Kind::two_hub_mixture: {
            const double r4 = r_ * r_ * r_ * r_;
            return {0.0, 1.0, 0.0, 3.0 * (1.0 + r4)};
        }
    }
    return {0.0, 0.0, 0.0, 0.0};
}

double LimitLaw::sample(Rng& rng) const {
    switch (kind_) {
        case Kind::gaussian: return rng.normal();
        case Kind::vg_standardized: {
            double q = 0.0;
            for (long long i = 0; i < n_; ++i) q += rng.normal() * rng.normal();
            return q / std::sqrt(static_cast<double>(n_));
        }
        case Kind::vg_raw: {
            double q = 0.0;
            for (long long i = 0; i < n_; ++i) q += rng.normal() * rng.normal();
            return q * s_ * s_;
        }
        case Kind::s_limit: {
            double q = 0.0;
            for (long long i = 0; i < n_; ++i) q += rng.normal() * rng.normal();
            const double xi_std = q / std::sqrt(static_cast<double>(n_));
            return std::sqrt(1.0 - r_ * r_) * rng.normal() + r_ * xi_std;
        }
        case Kind::two_hub_mixture: {
            const double z1 = rng.normal();
            const double coin = rng.bernoulli(0.5) ? 1.0 : 0.0;
            const double z2 = rng.normal();
            return std::sqrt(1.0 - r_ * r_) * z1 + r_ * std::sqrt(2.0) * coin * z2;
        }
    }
    return 0.0;
}

LimitLaw LimitLaw::parse(const std::string& spec) {
    std::string name = spec;
    std::string args;
    if (const auto colon = spec.find(':'); colon != std::string::npos) {
        name = spec.substr(0, colon);
        args = spec.substr(colon + 1);
    }
    int ell = 0;
    long long n = 0;
    double s = 1.0;
    double r = 0.0;
    bool have_r = false;
    std::stringstream stream(args);
    std::string item;
    while (std::getline(stream, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("law spec: expected key=value, got '" + item + "'");
        const std::string key = item.substr(0, eq);
        const std::string value = item.substr(eq + 1);
        if (key == "ell") ell = std::stoi(value);
        else if (key == "n") n = std::stoll(value);
        else if (key == "s") s = std::stod(value);
        else if (key == "r") { r = std::stod(value); have_r = true; }
        else throw std::invalid_argument("law spec: unknown key '" + key + "'");
    }
    if (name == "gaussian") return gaussian();
    if (name == "vg") {
        if (ell > 0 && n > 0) throw std::invalid_argument("law spec: vg takes ell or n, not both");
        if (ell > 0) return vg_standardized(ell);
        if (n > 0) return vg_raw(n, s);
        throw std::invalid_argument("law spec: vg needs ell=<k> or n=<k>[,s=<x>]");
    }
    if (name == "s-limit") {
        if (ell < 2 || !have_r)
            throw std::invalid_argument("law spec: s-limit needs ell=<k>,r=<x>");
        return s_limit(ell, r);
    }
    if (name == "two-hub-mixture") {
        if (!have_r) throw std::invalid_argument("law spec: two-hub-mixture needs r=<x>");
        return two_hub_mixture(r);
    }
    throw std::invalid_argument("unknown law '" + name +
                                "' (expected gaussian|vg|s-limit|two-hub-mixture)");
}

}  // namespace kwise
