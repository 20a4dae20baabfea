#include "kwise/limit_laws.hpp"

#include <cmath>
#include <map>

#include "doctest.h"
#include "kwise/special.hpp"
#include "kwise/stats.hpp"

using namespace kwise;

namespace {

// Graded cdf table for laws whose pointwise cdf needs cf inversion; dense
// near the center where VG densities peak. Interpolation error stays a few
// 1e-4 even against the log-singular VG(1) density.
struct CdfTable {
    std::vector<double> xs;
    std::vector<double> fs;

    explicit CdfTable(const LimitLaw& law) {
        auto push_range = [&](double lo, double hi, double step) {
            for (double x = lo; x < hi - 1e-12; x += step) xs.push_back(x);
        };
        push_range(-10.0, -3.0, 0.05);
        push_range(-3.0, -0.2, 0.005);
        push_range(-0.2, 0.2, 0.001);
        push_range(0.2, 3.0, 0.005);
        push_range(3.0, 10.0, 0.05);
        xs.push_back(10.0);
        fs.reserve(xs.size());
        for (const double x : xs) fs.push_back(law.cdf(x));
    }

    double operator()(double x) const {
        if (x <= xs.front()) return 0.0;
        if (x >= xs.back()) return 1.0;
        const auto it = std::upper_bound(xs.begin(), xs.end(), x);
        const std::size_t k = static_cast<std::size_t>(it - xs.begin());
        const double t = (x - xs[k - 1]) / (xs[k] - xs[k - 1]);
        return fs[k - 1] + t * (fs[k] - fs[k - 1]);
    }
};

std::vector<double> draw(const LimitLaw& law, std::size_t count, std::uint64_t seed) {
    std::vector<double> xs(count);
    for (std::size_t i = 0; i < count; ++i) {
        Rng rng(seed, i);
        xs[i] = law.sample(rng);
    }
    return xs;
}

}  // namespace

TEST_CASE("vg density closed forms") {
    // VG(1,0,1,0) is the product of two standard normals: f = K_0(|x|)/pi.
    CHECK(vg_pdf(1, 0, 1, 0, 1.0) == doctest::Approx(0.13401624101699427438).epsilon(1e-11));
    CHECK(vg_pdf(1, 0, 1, 0, -1.0) == doctest::Approx(0.13401624101699427438).epsilon(1e-11));
    CHECK(vg_pdf(1, 0, 1, 0, 0.01) == doctest::Approx(1.5028188727033996328).epsilon(1e-11));
    CHECK(std::isinf(vg_pdf(1, 0, 1, 0, 0.0)));

    // VG(2,0,1,0) is Laplace: f = e^{-|x|}/2.
    CHECK(vg_pdf(2, 0, 1, 0, 0.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(vg_pdf(2, 0, 1, 0, 1.3) == doctest::Approx(0.5 * std::exp(-1.3)).epsilon(1e-11));

    CHECK(vg_pdf(3, 0, 1, 0, 1.3) == doctest::Approx(0.15416121621246596831).epsilon(1e-11));

    CHECK_THROWS_AS(vg_pdf(0, 0, 1, 0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(vg_pdf(1, 0.5, 1, 0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(vg_pdf(1, 0, -1, 0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(vg_pdf(1.5, 0, 1, 0, 1.0), std::invalid_argument);
}

TEST_CASE("vg density integrates to one and is symmetric about c") {
    for (const double alpha : {1.0, 2.0, 3.0, 5.0}) {
        for (const double s : {0.5, 1.0, 2.0}) {
            const double c = 0.7;
            const double window = 80.0 * s * s * (1.0 + alpha / 4.0);
            const auto mass = integrate(
                [&](double x) { return vg_pdf(alpha, 0, s, c, x); }, c - window, c + window,
                1e-10);
            CHECK(mass.value == doctest::Approx(1.0).epsilon(1e-8));
            for (const double d : {0.3, 1.1, 2.9})
                CHECK(vg_pdf(alpha, 0, s, c, c + d) ==
                      doctest::Approx(vg_pdf(alpha, 0, s, c, c - d)).epsilon(1e-12));
        }
    }
}

TEST_CASE("vg characteristic function and moments") {
    CHECK(vg_cf(2, 1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(vg_cf(3, 1.0, 0.0) == 1.0);
    CHECK(vg_cf(1, 2.0, 0.5) == doctest::Approx(std::pow(1.0 + 16.0 * 0.25, -0.5)).epsilon(1e-15));
    const auto [mean, variance] = vg_moments(3, 1.0);
    CHECK(mean == 0.0);
    CHECK(variance == 3.0);
    CHECK(vg_moments(4, 0.5).second == doctest::Approx(4.0 * 0.0625).epsilon(1e-15));
}

TEST_CASE("monte carlo variance of Q_n matches n s^4") {
    const LimitLaw law = LimitLaw::vg_raw(3, 1.0);
    const auto xs = draw(law, 1000000, 31);
    double sum = 0.0, sum_sq = 0.0;
    for (const double x : xs) {
        sum += x;
        sum_sq += x * x;
    }
    const double n = static_cast<double>(xs.size());
    const double var = sum_sq / n - (sum / n) * (sum / n);
    CHECK(std::fabs(var - 3.0) / 3.0 < 0.02);
}

TEST_CASE("s_limit moments and special cases") {
    for (const int ell : {2, 4, 6}) {
        for (const double r : {0.0, 0.6, 0.99, 1.0}) {
            const auto m = LimitLaw::s_limit(ell, r).moments();
            CHECK(m[0] == 0.0);
            CHECK(m[1] == 1.0);
            CHECK(m[2] == 0.0);
            CHECK(m[3] == doctest::Approx(6.0 * std::pow(r, 4) / (ell - 1) + 3.0).epsilon(1e-14));
        }
    }
    // r = 0 collapses to N(0,1) exactly.
    const LimitLaw gauss = LimitLaw::s_limit(3, 0.0);
    for (const double x : {-2.0, -0.5, 0.0, 1.7}) {
        CHECK(gauss.pdf(x) == norm_pdf(x));
        CHECK(gauss.cdf(x) == norm_cdf(x));
    }
    // ell = 2, r = 1 is the product of two standard normals.
    const LimitLaw product = LimitLaw::s_limit(2, 1.0);
    CHECK(std::isinf(product.pdf(0.0)));
    CHECK(product.pdf(1.0) == doctest::Approx(0.13401624101699427438).epsilon(1e-10));
    CHECK_THROWS_AS(LimitLaw::s_limit(2, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(LimitLaw::s_limit(1, 0.5), std::invalid_argument);
}

TEST_CASE("two-hub mixture closed forms") {
    const LimitLaw mix = LimitLaw::two_hub_mixture(0.8);
    const double s0 = std::sqrt(1.0 - 0.64), s1 = std::sqrt(1.0 + 0.64);
    CHECK(mix.pdf(0.3) == doctest::Approx(0.5 * norm_pdf(0.3 / s0) / s0 +
                                          0.5 * norm_pdf(0.3 / s1) / s1).epsilon(1e-14));
    CHECK(mix.cdf(0.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(mix.moments()[3] == doctest::Approx(3.0 * (1.0 + std::pow(0.8, 4))).epsilon(1e-14));
    CHECK(!mix.has_atom());

    const LimitLaw gauss = LimitLaw::two_hub_mixture(0.0);
    CHECK(gauss.pdf(1.1) == doctest::Approx(norm_pdf(1.1)).epsilon(1e-14));
    CHECK(gauss.cdf(-0.4) == doctest::Approx(norm_cdf(-0.4)).epsilon(1e-14));
    CHECK(gauss.moments()[3] == doctest::Approx(3.0).epsilon(1e-14));

    CHECK_THROWS_AS(LimitLaw::two_hub_mixture(-1.2), std::invalid_argument);
}

TEST_CASE("two-hub mixture at r = 1: explicit atom at 0") {
    const LimitLaw law = LimitLaw::two_hub_mixture(1.0);
    CHECK(law.has_atom());
    CHECK(law.atom_mass() == 0.5);
    // Half the mass is the atom; the rest is N(0, 2).
    CHECK(law.cdf_left(0.0) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(law.cdf(0.0) == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(law.cdf(0.0) - law.cdf_left(0.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(std::isinf(law.pdf(0.0)));
    CHECK(law.pdf(1.0) ==
          doctest::Approx(0.5 * norm_pdf(1.0 / std::sqrt(2.0)) / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(law.moments()[3] == doctest::Approx(6.0).epsilon(1e-14));

    // Sampling hits the atom exactly.
    const auto xs = draw(law, 20000, 17);
    long long zeros = 0;
    for (const double x : xs) zeros += x == 0.0;
    CHECK(std::fabs(static_cast<double>(zeros) / 20000.0 - 0.5) < 0.02);
}

TEST_CASE("cf inversion against the Gaussian closed form") {
    const auto cf = [](double t) { return std::exp(-0.5 * t * t); };
    CHECK(cf_invert_pdf_point(cf, 0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-8));
    CHECK(cf_invert_pdf_point(cf, 1.3) == doctest::Approx(norm_pdf(1.3)).epsilon(1e-8));
    CHECK(cf_invert_cdf_point(cf, 0.7) == doctest::Approx(norm_cdf(0.7)).epsilon(1e-8));
    CHECK(cf_invert_cdf_point(cf, -2.4) == doctest::Approx(norm_cdf(-2.4)).epsilon(1e-8));
}

TEST_CASE("cf inversion rejects a non-integrable cf") {
    CHECK_THROWS_AS(cf_invert([](double) { return 1.0; }, -1.0, 1.0, 0.5), NumericError);
}

TEST_CASE("cf/pdf consistency on closed-form laws") {
    const auto max_gap = [](const LimitLaw& law, double skip_below) {
        double worst = 0.0;
        for (double x = -6.0; x <= 6.0 + 1e-9; x += 0.01) {
            if (std::fabs(x) < skip_below) continue;
            const double via_cf =
                cf_invert_pdf_point([&](double t) { return law.cf(t); }, x);
            worst = std::fmax(worst, std::fabs(via_cf - law.pdf(x)));
        }
        return worst;
    };
    CHECK(max_gap(LimitLaw::gaussian(), 0.0) < 1e-6);
    CHECK(max_gap(LimitLaw::two_hub_mixture(0.8), 0.0) < 1e-6);
    CHECK(max_gap(LimitLaw::vg_standardized(3), 0.0) < 1e-6);
    // VG(1) diverges at the center; check everywhere else.
    CHECK(max_gap(LimitLaw::vg_standardized(2), 0.005) < 1e-6);
}

TEST_CASE("tabulation: monotone cdf, clip accounting") {
    const LimitLaw law = LimitLaw::s_limit(2, 0.8);
    const auto tables = cf_invert([&](double t) { return law.cf(t); }, -6.0, 6.0, 0.05);
    REQUIRE(tables.x.size() == 241);
    for (std::size_t i = 1; i < tables.cdf.size(); ++i)
        CHECK(tables.cdf[i] >= tables.cdf[i - 1]);
    for (const double p : tables.pdf) CHECK(p >= 0.0);
    CHECK(tables.pdf_clip_magnitude <= 1e-10);
    CHECK(tables.monotonicity_repair <= 1e-9);
    // Midpoint sanity against the law's own evaluation.
    CHECK(tables.cdf[120] == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("fourth moment of s_limit(2, 0.99) by numeric integration") {
    const LimitLaw law = LimitLaw::s_limit(2, 0.99);
    // Simpson over the inverted density; the integrand decays like
    // x^4 e^{-x/0.99} so +-40 is far past negligible.
    const double h = 0.02;
    double sum = 0.0;
    int idx = 0;
    for (double x = -40.0; x <= 40.0 + 1e-9; x += h, ++idx) {
        const double w = (idx == 0 || x >= 40.0 - 1e-9) ? 1.0 : (idx % 2 == 1 ? 4.0 : 2.0);
        sum += w * std::pow(x, 4) * law.pdf(x);
    }
    const double fourth = sum * h / 3.0;
    const double expected = 6.0 * std::pow(0.99, 4) + 3.0;
    CHECK(std::fabs(fourth - expected) / expected < 0.005);
}

TEST_CASE("s_limit(64, 0.99) is close to N(0,1)") {
    const LimitLaw law = LimitLaw::s_limit(64, 0.99);
    double worst = 0.0;
    for (double x = -6.0; x <= 6.0 + 1e-9; x += 0.01)
        worst = std::fmax(worst, std::fabs(law.cdf(x) - norm_cdf(x)));
    CHECK(worst < 0.01);
}

TEST_CASE("samplers agree with the cdfs (KS < 0.002 at 10^6)") {
    const std::size_t count = 1000000;
    SUBCASE("closed-form laws") {
        int seed = 40;
        for (const LimitLaw& law :
             {LimitLaw::gaussian(), LimitLaw::two_hub_mixture(0.6),
              LimitLaw::two_hub_mixture(1.0)}) {
            const auto report =
                ks_statistic(draw(law, count, static_cast<std::uint64_t>(seed++)),
                             ReferenceCdf::from_law(law));
            CAPTURE(law.label());
            CHECK(report.statistic < 0.002);
        }
    }
    SUBCASE("cf-inverted laws via a graded table") {
        int seed = 50;
        for (const LimitLaw& law :
             {LimitLaw::vg_standardized(2), LimitLaw::vg_standardized(6),
              LimitLaw::s_limit(2, 0.8), LimitLaw::s_limit(4, 0.99)}) {
            const CdfTable table(law);
            const auto report =
                ks_statistic(draw(law, count, static_cast<std::uint64_t>(seed++)),
                             ReferenceCdf::continuous([&](double x) { return table(x); },
                                                      law.label()));
            CAPTURE(law.label());
            CHECK(report.statistic < 0.002);
        }
    }
}

TEST_CASE("moment ladder: analytic vs monte carlo within 4 SE") {
    int seed = 60;
    for (const LimitLaw& law :
         {LimitLaw::gaussian(), LimitLaw::vg_standardized(2), LimitLaw::vg_standardized(5),
          LimitLaw::s_limit(2, 0.8), LimitLaw::two_hub_mixture(0.9),
          LimitLaw::vg_raw(2, 1.0)}) {
        const auto xs = draw(law, 1000000, static_cast<std::uint64_t>(seed++));
        const auto report = moment_suite(xs, law);
        CAPTURE(law.label());
        CHECK(report.all_within(4.0));
    }
}

TEST_CASE("law spec parsing") {
    CHECK(LimitLaw::parse("gaussian").kind() == LimitLaw::Kind::gaussian);
    CHECK(LimitLaw::parse("vg:ell=2").kind() == LimitLaw::Kind::vg_standardized);
    CHECK(LimitLaw::parse("vg:n=3,s=1").kind() == LimitLaw::Kind::vg_raw);
    CHECK(LimitLaw::parse("s-limit:ell=2,r=0.99").r() == doctest::Approx(0.99));
    CHECK(LimitLaw::parse("two-hub-mixture:r=1").has_atom());
    CHECK_THROWS_AS(LimitLaw::parse("nope"), std::invalid_argument);
    CHECK_THROWS_AS(LimitLaw::parse("vg"), std::invalid_argument);
    CHECK_THROWS_AS(LimitLaw::parse("s-limit:ell=2"), std::invalid_argument);
    CHECK_THROWS_AS(LimitLaw::parse("vg:ell=2,n=3"), std::invalid_argument);
}
