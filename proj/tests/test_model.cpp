#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "fiegarch/errors.hpp"
#include "fiegarch/model.hpp"

using namespace fiegarch;

namespace {

ModelSpec make_spec(double nu, double d) {
    ModelSpec s;
    s.nu = nu;
    s.d = d;
    return s;
}

double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::vector<double> log_squares(const std::vector<double>& x) {
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::log(x[i] * x[i]);
    return out;
}

double acf(const std::vector<double>& y, std::size_t lag) {
    const double m = mean_of(y);
    double c0 = 0.0, cl = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) c0 += (y[i] - m) * (y[i] - m);
    for (std::size_t i = lag; i < y.size(); ++i) cl += (y[i] - m) * (y[i - lag] - m);
    return cl / c0;
}

// Gaussian FIEGARCH(0, d, 0) log-likelihood with coefficients from the gamma
// ratio and a direct double loop.
double gaussian_reference_loglik(const ModelSpec& s, const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<long double> lam(n);
    lam[0] = 1.0L;
    for (std::size_t k = 1; k < n; ++k) {
        lam[k] = std::exp(std::lgamma(static_cast<long double>(k) + s.d) - std::lgamma(static_cast<long double>(k) + 1) -
                          std::lgamma(static_cast<long double>(s.d)));
    }
    const double eabs = std::sqrt(2.0 / std::numbers::pi);
    std::vector<double> g(n);
    long double ll = 0.0L;
    for (std::size_t t = 0; t < n; ++t) {
        long double h = s.omega;
        for (std::size_t k = 0; k < t; ++k) h += lam[k] * g[t - 1 - k];
        const long double z = x[t] / std::sqrt(std::exp(h));
        g[t] = static_cast<double>(s.theta * z + s.gamma * (std::abs(z) - eabs));
        ll += -0.5L * std::log(2.0L * std::numbers::pi_v<long double>) - 0.5L * z * z - 0.5L * h;
    }
    return static_cast<double>(ll);
}

}  // namespace

TEST_CASE("news impact function") {
    const double eabs = 0.7978845608;
    CHECK(g_function(0.0, -0.15, 0.24, eabs) == doctest::Approx(-0.1914922946).epsilon(1e-10));
    CHECK(g_function(1.0, 1.0, 0.0, 0.3) == 1.0);
    CHECK(g_function(-2.0, -0.15, 0.24, eabs) == doctest::Approx(0.3 + 0.24 * (2.0 - eabs)).epsilon(1e-14));
    CHECK(g_function(-2.0, -0.15, 0.24, eabs) == doctest::Approx(0.5885077).epsilon(1e-7));
}

TEST_CASE("model spec") {
    ModelSpec s;
    s.alpha = {0.1};
    s.beta = {0.2, 0.3};
    CHECK(s.dimension() == 8);
    CHECK(ModelSpec::parameter_names(1, 2) ==
          std::vector<std::string>{"nu", "d", "theta", "gamma", "omega", "alpha1", "beta1", "beta2"});
    const auto v = s.to_vector();
    CHECK(v == std::vector<double>{2.0, 0.0, -0.15, 0.24, -5.4, 0.1, 0.2, 0.3});
    const ModelSpec back = ModelSpec::from_vector(v, 1, 2);
    CHECK(back.to_vector() == v);
    CHECK_THROWS_AS(ModelSpec::from_vector(v, 2, 2), SizingError);
    CHECK_NOTHROW(s.validate());

    ModelSpec bad;
    bad.theta = 0.0;
    bad.gamma = 0.0;
    CHECK_THROWS_AS(bad.validate(), DegenerateModelError);
    bad = ModelSpec{};
    bad.d = 0.5;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = ModelSpec{};
    bad.nu = 0.0;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = ModelSpec{};
    bad.omega = NAN;
    CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("one-lag simulation is hand-recomputable") {
    const ModelSpec s = make_spec(2.0, 0.0);
    const auto sim = simulate(s, 3, 5, std::uint64_t{99});
    REQUIRE(sim.x.size() == 3);
    REQUIRE(sim.z.size() == 5 + 3 + 1);
    CHECK(sim.seed == std::uint64_t{99});
    const double eabs = GedParams(2.0).abs_moment();
    for (std::size_t t = 1; t <= 3; ++t) {
        const double h = s.omega + g_function(sim.innovation(t - 1), s.theta, s.gamma, eabs);
        CHECK(std::log(sim.sigma2[t - 1]) == doctest::Approx(h).epsilon(1e-14));
        CHECK(sim.x[t - 1] == doctest::Approx(std::sqrt(sim.sigma2[t - 1]) * sim.innovation(t)).epsilon(1e-15));
    }
}

TEST_CASE("simulation invariants and determinism") {
    ModelSpec s = make_spec(1.5, 0.35);
    s.alpha = {0.2};
    s.beta = {0.4};
    const auto a = simulate(s, 300, 2000, std::uint64_t{5});
    const auto b = simulate(s, 300, 2000, std::uint64_t{5});
    CHECK(a.x == b.x);
    CHECK(a.sigma2 == b.sigma2);
    CHECK(a.z == b.z);
    for (std::size_t t = 1; t <= 300; ++t) {
        CHECK(a.sigma2[t - 1] > 0.0);
        CHECK(a.x[t - 1] == std::sqrt(a.sigma2[t - 1]) * a.innovation(t));
    }
    const auto c = simulate(s, 300, 2000, std::uint64_t{6});
    CHECK(a.x != c.x);
}

TEST_CASE("simulation errors") {
    ModelSpec s = make_spec(2.0, 0.2);
    CHECK_THROWS_AS(simulate(s, 0, 10, std::uint64_t{1}), SizingError);
    CHECK_THROWS_AS(simulate(s, 10, 0, std::uint64_t{1}), SizingError);
    s.omega = 800.0;
    try {
        simulate(s, 10, 10, std::uint64_t{1});
        FAIL("expected a simulation error");
    } catch (const SimulationError& e) {
        CHECK(e.index == 1);
    }
}

TEST_CASE("mean of log squares matches omega + E ln Z^2") {
    const ModelSpec s = make_spec(1.9, 0.25);
    Rng rng(77);
    const auto zs = ged_sample(GedParams(1.9), rng, 1000000);
    double e_log_z2 = 0.0;
    for (double z : zs) e_log_z2 += std::log(z * z);
    e_log_z2 /= static_cast<double>(zs.size());
    const double target = s.omega + e_log_z2;

    // Spread of the statistic across independent series gives its standard error.
    std::vector<double> means;
    for (std::uint64_t r = 0; r < 40; ++r) means.push_back(mean_of(log_squares(simulate(s, 2000, 50000, 1000 + r).x)));
    const double m = mean_of(means);
    double var = 0.0;
    for (double v : means) var += (v - m) * (v - m);
    const double se = std::sqrt(var / static_cast<double>(means.size() - 1));

    const double one = mean_of(log_squares(simulate(s, 2000, 50000, std::uint64_t{2024}).x));
    CHECK(std::abs(one - target) < 4.0 * se);
    CHECK(std::abs(m - target) < 4.0 * se / std::sqrt(40.0));
}

TEST_CASE("long memory in log squares across replicates") {
    double r50 = 0.0, r200 = 0.0;
    const int reps = 100;
    for (int r = 0; r < reps; ++r) {
        const auto y = log_squares(simulate(make_spec(5.0, 0.45), 2000, 50000, 3000 + r).x);
        r50 += acf(y, 50) / reps;
        r200 += acf(y, 200) / reps;
    }
    CHECK(r50 > r200);
    CHECK(r200 > 0.0);
}

TEST_CASE("filter on a single observation") {
    const ModelSpec s = make_spec(1.3, 0.3);
    const auto table = estimation_table(s, 1);
    const std::vector<double> x{0.02};
    const auto f = volatility_filter(s, x, table);
    CHECK(f.sigma2[0] == doctest::Approx(std::exp(s.omega)).epsilon(1e-15));
    CHECK(f.z[0] == doctest::Approx(0.02 * std::exp(-s.omega / 2)).epsilon(1e-15));
}

TEST_CASE("filter two-step hand computation") {
    const ModelSpec s = make_spec(2.0, 0.0);
    const std::vector<double> x{0.01, -0.02};
    const auto table = estimation_table(s, 2);
    const auto f = volatility_filter(s, x, table);
    const double z1 = 0.01 * std::exp(-s.omega / 2);
    const double g1 = s.theta * z1 + s.gamma * (std::abs(z1) - std::sqrt(2.0 / std::numbers::pi));
    CHECK(f.sigma2[1] == doctest::Approx(std::exp(s.omega + g1)).epsilon(1e-14));
    CHECK(f.z[1] == doctest::Approx(-0.02 / std::sqrt(std::exp(s.omega + g1))).epsilon(1e-14));

    const auto lit = volatility_filter(s, x, table, PresampleConvention::PaperLiteral);
    CHECK(lit.sigma2[0] == f.sigma2[0]);
    CHECK(lit.sigma2[1] == doctest::Approx(std::exp(s.omega)).epsilon(1e-15));
}

TEST_CASE("filter recovers innovations of a zero-presample simulation") {
    for (double d : {0.10, 0.25, 0.35, 0.45}) {
        ModelSpec s = make_spec(1.9, d);
        const auto sim = simulate(s, 500, 500, std::uint64_t{31}, SimulationPresample::Zero);
        const auto table = estimation_table(s, 500);
        const auto f = volatility_filter(s, sim.x, table);
        double worst = 0.0;
        for (std::size_t t = 1; t <= 500; ++t) worst = std::max(worst, std::abs(f.z[t - 1] - sim.innovation(t)));
        CHECK_MESSAGE(worst < 1e-10, "d = " << d);
    }
    ModelSpec s = make_spec(1.5, 0.3);
    s.alpha = {0.2};
    s.beta = {0.5};
    const auto sim = simulate(s, 400, 400, std::uint64_t{32}, SimulationPresample::Zero);
    const auto table = estimation_table(s, 400);
    const auto f = volatility_filter(s, sim.x, table);
    for (std::size_t t = 1; t <= 400; ++t) CHECK(std::abs(f.z[t - 1] - sim.innovation(t)) < 1e-10);
}

TEST_CASE("log-likelihood of a single zero") {
    ModelSpec s = make_spec(1.7, 0.2);
    const auto table = estimation_table(s, 1);
    const std::vector<double> x{0.0};
    CHECK(log_likelihood(s, x, table) == doctest::Approx(GedParams(1.7).log_density(0.0) + 2.7).epsilon(1e-14));
}

TEST_CASE("one-lag filter matches a direct implementation") {
    const ModelSpec s = make_spec(1.4, 0.0);
    const auto sim = simulate(s, 300, 10, std::uint64_t{8});
    const auto table = estimation_table(s, 300);
    const auto f = volatility_filter(s, sim.x, table);
    const double eabs = GedParams(1.4).abs_moment();
    double h = s.omega;
    for (std::size_t t = 0; t < 300; ++t) {
        CHECK(std::abs(std::exp(h) - f.sigma2[t]) <= 1e-12 * std::exp(h));
        const double z = sim.x[t] / std::sqrt(std::exp(h));
        CHECK(std::abs(z - f.z[t]) < 1e-12);
        h = s.omega + s.theta * z + s.gamma * (std::abs(z) - eabs);
    }
}

TEST_CASE("Gaussian likelihood matches an independent implementation") {
    const ModelSpec s = make_spec(2.0, 0.3);
    const auto sim = simulate(s, 400, 5000, std::uint64_t{12});
    const auto table = estimation_table(s, 400);
    const double ll = log_likelihood(s, sim.x, table);
    const double ref = gaussian_reference_loglik(s, sim.x);
    CHECK(std::abs(ll - ref) <= 1e-10 * std::abs(ref));
}

TEST_CASE("likelihood favours the generating d") {
    int wins = 0;
    for (std::uint64_t r = 0; r < 50; ++r) {
        const ModelSpec truth = make_spec(1.9, 0.10);
        const auto sim = simulate(truth, 2000, 50000, 500 + r);
        ModelSpec far = truth;
        far.d = 0.40;
        const double l0 = log_likelihood(truth, sim.x, estimation_table(truth, 2000));
        const double l1 = log_likelihood(far, sim.x, estimation_table(far, 2000));
        if (l0 > l1) ++wins;
    }
    CHECK(wins >= 48);
}

TEST_CASE("likelihood is additive over pieces") {
    const ModelSpec s = make_spec(1.6, 0.4);
    const auto sim = simulate(s, 1000, 3000, std::uint64_t{4});
    const auto table = estimation_table(s, 1000);
    const double one = log_likelihood(s, sim.x, table);
    VolatilityFilter f(table);
    f.reset(s);
    for (std::size_t t = 0; t < 500; ++t) f.step(sim.x[t]);
    const double half = f.log_likelihood();
    for (std::size_t t = 500; t < 1000; ++t) f.step(sim.x[t]);
    CHECK(f.size() == 1000);
    CHECK(f.log_likelihood() == one);
    CHECK(half != one);
}

TEST_CASE("no underflow for long series") {
    const ModelSpec s = make_spec(1.9, 0.25);
    const auto sim = simulate(s, 10000, 10000, std::uint64_t{3});
    const double ll = log_likelihood(s, sim.x, estimation_table(s, 10000));
    CHECK(std::isfinite(ll));
    CHECK(ll > 0.0);
}

TEST_CASE("filter errors") {
    ModelSpec s = make_spec(2.0, 0.2);
    const auto table = estimation_table(s, 3);
    const std::vector<double> x{0.1, 0.2, 0.3, 0.4, 0.5};
    CHECK_THROWS_AS(volatility_filter(s, x, table), SizingError);
    CHECK_THROWS_AS(volatility_filter(s, std::vector<double>{}, table), SizingError);
    ModelSpec other = s;
    other.d = 0.3;
    CHECK_THROWS_AS(volatility_filter(other, std::vector<double>{0.1}, table), DomainError);
    ModelSpec huge = s;
    huge.omega = 800.0;
    try {
        volatility_filter(huge, std::vector<double>{0.1, 0.2}, table);
        FAIL("expected a filter error");
    } catch (const FilterError& e) {
        CHECK(e.index == 1);
    }
}
