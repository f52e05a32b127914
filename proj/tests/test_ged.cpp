#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "fiegarch/errors.hpp"
#include "fiegarch/ged.hpp"

using namespace fiegarch;

namespace {

const std::vector<double> kNuGrid{1.1, 1.5, 1.9, 2.0, 2.5, 5.0};

// Integral of f(z) p(z) over the real line, split at zero.
template <class F>
double integrate(const GedParams& g, F f) {
    boost::math::quadrature::exp_sinh<double> integrator;
    auto pos = [&](double z) { return f(z) * g.density(z); };
    auto neg = [&](double z) { return f(-z) * g.density(-z); };
    return integrator.integrate(pos, 0.0, INFINITY) + integrator.integrate(neg, 0.0, INFINITY);
}

// P(Z <= z) through the regularized incomplete gamma function.
double ged_cdf(const GedParams& g, double z) {
    const double nu = g.nu();
    const double p = boost::math::gamma_p(1.0 / nu, 0.5 * std::pow(std::abs(z) / g.lambda_nu(), nu));
    return z >= 0.0 ? 0.5 + 0.5 * p : 0.5 - 0.5 * p;
}

double ks_distance(std::vector<double> xs, const GedParams& g) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double dmax = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = ged_cdf(g, xs[i]);
        dmax = std::max({dmax, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
    }
    return dmax;
}

}  // namespace

TEST_CASE("construction") {
    CHECK_THROWS_AS(GedParams{0.0}, DomainError);
    CHECK_THROWS_AS(GedParams{-1.0}, DomainError);
    CHECK_THROWS_AS(GedParams{std::numeric_limits<double>::infinity()}, DomainError);
    const GedParams g(1.5);
    const double expect = std::sqrt(std::pow(2.0, -2.0 / 1.5) * std::tgamma(1.0 / 1.5) / std::tgamma(3.0 / 1.5));
    CHECK(g.lambda_nu() == doctest::Approx(expect).epsilon(1e-14));
    CHECK(GedParams(2.0).lambda_nu() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("nu = 2 is the standard normal") {
    const GedParams g(2.0);
    CHECK(ged_log_density(0.0, g) == doctest::Approx(-0.9189385332046727).epsilon(1e-14));
    CHECK(g.log_density(1.3) == doctest::Approx(-0.9189385332046727 - 0.5 * 1.69).epsilon(1e-14));
    for (int i = -600; i <= 600; ++i) {
        const double z = i * 0.01;
        const double ref = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
        CHECK(std::abs(g.density(z) - ref) <= 1e-12);
    }
}

TEST_CASE("log density is finite everywhere finite") {
    for (double nu : {0.5, 1.1, 2.0, 5.0}) {
        const GedParams g(nu);
        for (double z : {-40.0, -1e-300, 0.0, 3.0, 40.0}) CHECK(std::isfinite(g.log_density(z)));
    }
}

TEST_CASE("quadrature normalization, mean and variance") {
    for (double nu : kNuGrid) {
        const GedParams g(nu);
        CHECK_MESSAGE(std::abs(integrate(g, [](double) { return 1.0; }) - 1.0) < 1e-8, "nu " << nu);
        CHECK_MESSAGE(std::abs(integrate(g, [](double z) { return z; })) < 1e-12, "nu " << nu);
        CHECK_MESSAGE(std::abs(integrate(g, [](double z) { return z * z; }) - 1.0) < 1e-8, "nu " << nu);
    }
    const GedParams g(1.5);
    boost::math::quadrature::exp_sinh<double> integrator;
    const double mass = 2.0 * integrator.integrate([&](double z) { return g.density(z); }, 0.0, INFINITY);
    CHECK(std::abs(mass - 1.0) < 1e-8);
    CHECK(std::isfinite(g.log_density(0.7)));
}

TEST_CASE("absolute moment") {
    CHECK(ged_abs_moment(GedParams(2.0)) == doctest::Approx(0.7978845608028654).epsilon(1e-14));
    for (double nu : kNuGrid) {
        const GedParams g(nu);
        const double q = integrate(g, [](double z) { return std::abs(z); });
        CHECK_MESSAGE(std::abs(g.abs_moment() - q) < 1e-8, "nu " << nu);
    }
}

TEST_CASE("cdf helper agrees with quadrature") {
    for (double nu : {1.1, 2.5}) {
        const GedParams g(nu);
        for (double z : {0.3, 1.0, 2.2}) {
            const double q = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
                [&](double u) { return g.density(u); }, 0.0, z, 15, 1e-13);
            CHECK(std::abs(ged_cdf(g, z) - (0.5 + q)) < 1e-10);
        }
    }
}

TEST_CASE("g noise variance") {
    CHECK(g_noise_variance(-0.15, 0.24, GedParams(2.0)) ==
          doctest::Approx(0.0225 + 0.0576 * (1.0 - 2.0 / std::numbers::pi)).epsilon(1e-14));
    CHECK(g_noise_variance(-0.15, 0.24, GedParams(2.0)) == doctest::Approx(0.0434299).epsilon(1e-6));
    for (double nu : kNuGrid) CHECK(g_noise_variance(1.0, 0.0, GedParams(nu)) == doctest::Approx(1.0));
    CHECK(g_noise_variance(0.0, 1.0, GedParams(2.0)) == doctest::Approx(0.3633802276324186).epsilon(1e-13));
    CHECK_THROWS_AS(g_noise_variance(0.0, 0.0, GedParams(2.0)), DegenerateModelError);
}

TEST_CASE("sampling moments") {
    const std::size_t n = 1000000;
    SUBCASE("nu = 2 variance") {
        Rng rng(11);
        const auto xs = ged_sample(GedParams(2.0), rng, n);
        REQUIRE(xs.size() == n);
        double s2 = 0.0;
        for (double x : xs) s2 += x * x;
        CHECK(std::abs(s2 / n - 1.0) < 3.0 * std::sqrt(2.0 / n));
    }
    auto kurtosis = [](const std::vector<double>& xs) {
        double m = 0.0;
        for (double x : xs) m += x;
        m /= static_cast<double>(xs.size());
        double m2 = 0.0, m4 = 0.0;
        for (double x : xs) {
            const double c = (x - m) * (x - m);
            m2 += c;
            m4 += c * c;
        }
        m2 /= static_cast<double>(xs.size());
        m4 /= static_cast<double>(xs.size());
        return m4 / (m2 * m2);
    };
    auto closed_kurtosis = [](double nu) {
        return std::tgamma(5.0 / nu) * std::tgamma(1.0 / nu) / std::pow(std::tgamma(3.0 / nu), 2);
    };
    SUBCASE("heavy tails at nu = 1.1") {
        Rng rng(12);
        const double k = kurtosis(ged_sample(GedParams(1.1), rng, n));
        CHECK(k > 3.0);
        CHECK(closed_kurtosis(1.1) > 3.0);
    }
    SUBCASE("light tails at nu = 5") {
        Rng rng(13);
        const double k = kurtosis(ged_sample(GedParams(5.0), rng, n));
        CHECK(k < 3.0);
        CHECK(k == doctest::Approx(closed_kurtosis(5.0)).epsilon(0.01));
    }
}

TEST_CASE("E(Z|Z|) vanishes") {
    const std::size_t n = 1000000;
    for (double nu : kNuGrid) {
        Rng rng(100 + static_cast<std::uint64_t>(nu * 10));
        const auto xs = ged_sample(GedParams(nu), rng, n);
        double s = 0.0, s2 = 0.0;
        for (double x : xs) {
            const double v = x * std::abs(x);
            s += v;
            s2 += v * v;
        }
        const double mean = s / n;
        const double se = std::sqrt((s2 / n - mean * mean) / n);
        CHECK_MESSAGE(std::abs(mean) < 4.0 * se, "nu " << nu);
    }
}

TEST_CASE("sampler matches the distribution function") {
    const std::size_t n = 100000;
    const double crit = 1.628 / std::sqrt(static_cast<double>(n));
    for (double nu : kNuGrid) {
        Rng rng(7000 + static_cast<std::uint64_t>(nu * 100));
        const GedParams g(nu);
        CHECK_MESSAGE(ks_distance(ged_sample(g, rng, n), g) < crit, "nu " << nu);
    }
}

TEST_CASE("sampling is deterministic per seed") {
    const GedParams g(1.9);
    Rng a(5), b(5);
    CHECK(ged_sample(g, a, 100) == ged_sample(g, b, 100));
    Rng c(5);
    const double first = g.sample(c);
    Rng d(5);
    CHECK(ged_sample(g, d, 1)[0] == first);
}
