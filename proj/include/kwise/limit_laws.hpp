#pragma once

#include <array>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kwise/rng.hpp"
#include "kwise/special.hpp"

namespace kwise {

// Variance-gamma VG(alpha, theta, s^2, c) pieces. Only theta = 0 is
// supported: the nonzero-theta exponent is parameterization-ambiguous
// across the literature and nothing downstream needs it.
double vg_pdf(double alpha, double theta, double s, double c, double x);

// Characteristic function (1 + s^4 t^2)^{-n/2} of Q_n = sum W_i Z_i with
// W, Z iid N(0, s^2), and its mean/variance (0, n s^4).
double vg_cf(long long n, double s, double t);
std::pair<double, double> vg_moments(long long n, double s);

// An evaluable and sampleable limiting distribution. All supported laws are
// symmetric about 0; the only atom that can occur is the one at 0 when a
// mixture component degenerates (|r| = 1). Evaluation is pure and instances
// are safe to share across threads.
class LimitLaw {
public:
    enum class Kind { gaussian, vg_standardized, vg_raw, s_limit, two_hub_mixture };

    static LimitLaw gaussian();
    // xi / sqrt(ell-1) with xi ~ VG(ell-1, 0, 1, 0).
    static LimitLaw vg_standardized(int ell);
    // Q_n ~ VG(n, 0, s^2, 0).
    static LimitLaw vg_raw(long long n, double s);
    // sqrt(1-r^2) Z + r xi / sqrt(ell-1).
    static LimitLaw s_limit(int ell, double r);
    // sqrt(1-r^2) Z1 + r sqrt(2) I Z2: equal-weight mixture of N(0, 1-r^2)
    // and N(0, 1+r^2); at |r| = 1 the first component is an atom at 0.
    static LimitLaw two_hub_mixture(double r);

    // "gaussian", "vg:ell=2", "vg:n=3,s=1", "s-limit:ell=2,r=0.99",
    // "two-hub-mixture:r=1".
    static LimitLaw parse(const std::string& spec);

    Kind kind() const { return kind_; }
    int ell() const { return ell_; }
    double r() const { return r_; }
    std::string label() const;

    // May return +infinity where the density genuinely diverges (the VG
    // center for alpha <= 1, the mixture atom).
    double pdf(double x) const;
    double cdf(double x) const;       // right-continuous
    double cdf_left(double x) const;  // left limit; differs only at atoms
    bool has_atom() const;
    double atom_mass() const;  // mass at 0

    double cf(double t) const;
    std::array<double, 4> moments() const;  // E X, E X^2, E X^3, E X^4
    double sample(Rng& rng) const;

private:
    LimitLaw() = default;
    Kind kind_ = Kind::gaussian;
    int ell_ = 2;
    double r_ = 0.0;
    long long n_ = 1;
    double s_ = 1.0;
};

// Gil-Pelaez inversion of a real, even, integrable cf at a single point.
double cf_invert_pdf_point(const std::function<double(double)>& cf, double x);
double cf_invert_cdf_point(const std::function<double(double)>& cf, double x);

struct CfInversionTables {
    std::vector<double> x;
    std::vector<double> pdf;
    std::vector<double> cdf;
    double pdf_clip_magnitude = 0.0;        // negative mass clipped to 0
    double monotonicity_repair = 0.0;       // total isotonic adjustment
};

// Tabulates pdf/cdf on the closed grid lo, lo+step, ..., hi. The pdf is
// clipped at the -1e-12 tolerance and the cdf isotonically repaired within
// 1e-9; violations beyond either bound raise NumericError, as does a
// non-integrable cf (e.g. cf == 1).
CfInversionTables cf_invert(const std::function<double(double)>& cf, double lo, double hi,
                            double step);

}  // namespace kwise
