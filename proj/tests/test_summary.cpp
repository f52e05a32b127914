#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "fiegarch/errors.hpp"
#include "fiegarch/random.hpp"
#include "fiegarch/special_math.hpp"
#include "fiegarch/summary.hpp"

using namespace fiegarch;

namespace {

// Scans every order statistic for the smallest one meeting both tail bounds.
double scan_quantile(const std::vector<double>& xs, double alpha) {
    std::vector<double> s = xs;
    std::sort(s.begin(), s.end());
    const double n = static_cast<double>(s.size());
    for (double q : s) {
        double le = 0.0, ge = 0.0;
        for (double v : xs) {
            le += v <= q ? 1.0 : 0.0;
            ge += v >= q ? 1.0 : 0.0;
        }
        if (le / n >= alpha && ge / n >= 1.0 - alpha) return q;
    }
    return NAN;
}

std::vector<double> uniform_draws(std::uint64_t seed, std::size_t n, double lo, double hi) {
    Rng rng(seed);
    std::vector<double> xs(n);
    for (auto& v : xs) v = lo + (hi - lo) * uniform01(rng);
    return xs;
}

std::vector<double> normal_draws(std::uint64_t seed, std::size_t n, double mu = 0.0, double sd = 1.0) {
    Rng rng(seed);
    std::vector<double> xs(n);
    for (auto& v : xs) v = mu + sd * normal_quantile(uniform01(rng));
    return xs;
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) s += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
    return s;
}

std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return g;
}

}  // namespace

TEST_CASE("quantile examples") {
    const std::vector<double> a{1, 2, 3, 4};
    CHECK(quantile(a, 0.5) == 2.0);
    CHECK(quantile(a, 0.0) == 1.0);
    CHECK(quantile(a, 1.0) == 4.0);
    CHECK(quantile(a, 0.26) == 2.0);
    CHECK(quantile(a, 0.25) == 1.0);
    const std::vector<double> shuffled{4, 1, 3, 2};
    CHECK(quantile(shuffled, 0.5) == 2.0);
    CHECK(quantile(std::vector<double>{7.0}, 0.3) == 7.0);
    CHECK_THROWS_AS(quantile(std::vector<double>{}, 0.5), SizingError);
    CHECK_THROWS_AS(quantile(a, -0.1), DomainError);
    CHECK_THROWS_AS(quantile(a, 1.1), DomainError);
    const std::vector<double> ties{1, 1, 2, 2, 2, 3};
    CHECK(quantile(ties, 0.4) == 2.0);
    CHECK(quantile(ties, 1.0 / 3.0) == 1.0);
}

TEST_CASE("quantile against an exhaustive scan") {
    const auto xs = uniform_draws(1, 500, 0.0, 1.0);
    for (double alpha : {0.0, 0.001, 0.025, 0.1, 0.5, 0.77, 0.975, 1.0}) {
        CHECK_MESSAGE(quantile(xs, alpha) == scan_quantile(xs, alpha), "alpha " << alpha);
    }
    Rng rng(2);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(uniform01(rng) * 40);
        std::vector<double> s(n);
        // Coarse values force ties.
        for (auto& v : s) v = std::floor(uniform01(rng) * 6.0);
        const double alpha = uniform01(rng);
        REQUIRE(quantile(s, alpha) == scan_quantile(s, alpha));
    }
}

TEST_CASE("quantile is monotone in alpha") {
    const auto xs = normal_draws(3, 777);
    double prev = -INFINITY;
    for (int i = 0; i <= 1000; ++i) {
        const double q = quantile(xs, i / 1000.0);
        CHECK(q >= prev);
        prev = q;
    }
}

TEST_CASE("credibility intervals") {
    const std::vector<double> sym{-2, -1, 0, 1, 2};
    const auto ci = credibility_interval(sym, 0.4);
    CHECK(ci.first == -2.0);
    CHECK(ci.second == 1.0);
    const std::vector<double> c(10, 3.5);
    CHECK(credibility_interval(c, 0.05) == std::pair<double, double>{3.5, 3.5});
    CHECK_THROWS_AS(credibility_interval(sym, 0.0), DomainError);
    CHECK_THROWS_AS(credibility_interval(sym, 1.0), DomainError);

    std::vector<double> grid;
    for (int i = 1; i <= 1000; ++i) grid.push_back(i);
    const auto g = credibility_interval(grid, 0.05);
    CHECK(g.first == 25.0);
    CHECK(g.second == 975.0);
}

TEST_CASE("interval coverage under resampling") {
    double covered = 0.0;
    int contains_central = 0;
    for (int r = 0; r < 1000; ++r) {
        const auto xs = normal_draws(10000 + r, 2000);
        const auto [lo, hi] = credibility_interval(xs, 0.05);
        covered += normal_cdf(hi) - normal_cdf(lo);
        contains_central += (lo <= -1.0 && hi >= 1.0) ? 1 : 0;
    }
    CHECK(std::abs(covered / 1000.0 - 0.95) < 0.02);
    CHECK(contains_central == 1000);
}

TEST_CASE("posterior summaries") {
    const std::vector<double> two{0.2, 0.3};
    const auto s = summarize_sample(two, "d", 0.25);
    CHECK(s.mean == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(std::abs(*s.bias) < 1e-15);
    CHECK(s.sd == doctest::Approx(0.05).epsilon(1e-14));
    CHECK(s.truth_in_ci());
    CHECK_FALSE(s.ape_gt_10pct());

    const std::vector<double> flat(20, -0.15);
    const auto f = summarize_sample(flat, "theta", -0.15);
    CHECK(f.sd == 0.0);
    CHECK(*f.bias == 0.0);
    CHECK(*f.ape == 0.0);
    CHECK(f.ci_lower == -0.15);
    CHECK(f.ci_upper == -0.15);

    const auto none = summarize_sample(two, "d", std::nullopt);
    CHECK_FALSE(none.bias.has_value());
    CHECK_FALSE(none.ape.has_value());
    CHECK_FALSE(none.truth_in_ci());

    const std::vector<double> pos{1.1, 1.3}, neg{-1.1, -1.3};
    CHECK(*summarize_sample(pos, "a", 1.0).ape == doctest::Approx(*summarize_sample(neg, "a", -1.0).ape).epsilon(1e-15));
    CHECK(*summarize_sample(pos, "a", 1.0).ape == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(summarize_sample(pos, "a", 1.0).ape_gt_10pct());
    CHECK(*summarize_sample(neg, "a", -1.0).bias == doctest::Approx(-0.2).epsilon(1e-14));
}

TEST_CASE("chain summaries") {
    Chain c;
    c.names = {"a", "b"};
    c.draws = {1.0, 10.0, 2.0, 20.0, 3.0, 30.0};
    c.iterations = {1, 2, 3};
    c.accepted = {0, 0};
    c.proposals = {3, 3};
    const auto plain = summarize(c);
    REQUIRE(plain.size() == 2);
    CHECK(plain[0].name == "a");
    CHECK(plain[0].mean == doctest::Approx(2.0));
    CHECK(plain[1].mean == doctest::Approx(20.0));
    CHECK(plain[1].sd == doctest::Approx(std::sqrt(200.0 / 3.0)).epsilon(1e-14));
    const std::vector<double> truth{2.0, 25.0};
    const auto t = summarize(c, std::span<const double>(truth));
    CHECK(*t[1].bias == doctest::Approx(-5.0));
    CHECK(*t[1].ape == doctest::Approx(0.2));
    const std::vector<double> wrong{1.0};
    CHECK_THROWS_AS(summarize(c, std::span<const double>(wrong)), SizingError);
    CHECK_THROWS_AS(summarize(Chain{}), SizingError);
}

TEST_CASE("summaries match a single-pass reference") {
    for (std::size_t n : {10u, 1000u, 1000000u}) {
        const auto xs = normal_draws(100 + n, n, 3.0, 0.7);
        long double m = 0.0L, m2 = 0.0L;
        std::size_t k = 0;
        for (double v : xs) {
            ++k;
            const long double delta = v - m;
            m += delta / static_cast<long double>(k);
            m2 += delta * (v - m);
        }
        const double ref_mean = static_cast<double>(m);
        const double ref_sd = static_cast<double>(std::sqrt(m2 / static_cast<long double>(n)));
        const auto [mean, sd] = mean_sd(xs);
        CHECK(std::abs(mean - ref_mean) <= 1e-12 * std::abs(ref_mean));
        CHECK(std::abs(sd - ref_sd) <= 1e-12 * ref_sd);

        std::vector<double> sorted = xs;
        std::sort(sorted.begin(), sorted.end());
        for (double alpha : {0.025, 0.5, 0.975}) {
            const auto idx = static_cast<std::size_t>(std::ceil(alpha * static_cast<double>(n))) - 1;
            CHECK(quantile(xs, alpha) == sorted[idx]);
        }
    }
}

TEST_CASE("kernel density estimates") {
    const std::vector<double> one{0.0};
    const std::vector<double> at0{0.0};
    CHECK(density_estimate(one, at0, 0.3)[0] == doctest::Approx(1.0 / (0.3 * std::sqrt(2.0 * std::numbers::pi))).epsilon(1e-15));
    CHECK_THROWS_AS(density_estimate(one, at0, 0.0), DomainError);
    CHECK_THROWS_AS(density_estimate(std::vector<double>{}, at0, 0.1), SizingError);

    const auto normal = normal_draws(5, 20000);
    const double hn = silverman_bandwidth(normal);
    CHECK(density_estimate(normal, at0, hn)[0] == doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)).epsilon(0.10));
    const auto ng = linspace(-6.0, 6.0, 1201);
    CHECK(trapezoid(ng, density_estimate(normal, ng, hn)) == doctest::Approx(1.0).epsilon(0.02));

    const auto unif = uniform_draws(6, 5000, 0.0, 0.5);
    const double hu = silverman_bandwidth(unif);
    const auto wide = linspace(-1.0, 1.5, 2501);
    const auto inner = linspace(-0.1, 0.6, 701);
    const double total = trapezoid(wide, density_estimate(unif, wide, hu));
    const double inside = trapezoid(inner, density_estimate(unif, inner, hu));
    CHECK(total == doctest::Approx(1.0).epsilon(0.02));
    CHECK(total - inside < 0.01);
    const auto g256 = linspace(0.0, 0.5, 256);
    CHECK(trapezoid(g256, density_estimate(unif, g256, hu)) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("Silverman bandwidth") {
    const auto xs = normal_draws(7, 1000, 0.0, 2.0);
    const auto [m, sd] = mean_sd(xs);
    (void)m;
    const double iqr = quantile(xs, 0.75) - quantile(xs, 0.25);
    CHECK(silverman_bandwidth(xs) == doctest::Approx(0.9 * std::min(sd, iqr / 1.34) * std::pow(1000.0, -0.2)).epsilon(1e-14));
    CHECK(silverman_bandwidth(std::vector<double>(5, 1.0)) > 0.0);
    CHECK_THROWS_AS(silverman_bandwidth(std::vector<double>{1.0}), SizingError);
}

TEST_CASE("histograms") {
    const std::vector<double> xs{0.0, 0.1, 0.24, 0.25, 0.49999, 0.5, 0.7, -0.1};
    const auto h = histogram(xs, 2, 0.0, 0.5);
    CHECK(h.counts == std::vector<std::size_t>{3, 3});
    CHECK(h.density[0] == doctest::Approx(3.0 / (8.0 * 0.25)));
    CHECK_THROWS_AS(histogram(xs, 0, 0.0, 1.0), SizingError);
    CHECK_THROWS_AS(histogram(xs, 3, 1.0, 1.0), DomainError);
    const auto u = uniform_draws(8, 10000, 0.0, 1.0);
    const auto hu = histogram(u, 50, 0.0, 1.0);
    double area = 0.0;
    for (double v : hu.density) area += v * 0.02;
    CHECK(area == doctest::Approx(1.0).epsilon(1e-12));
}
