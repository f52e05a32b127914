#include "fiegarch/special_math.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "dot.hpp"
#include "fiegarch/errors.hpp"

namespace fiegarch {

namespace {

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

void check_horizon(std::size_t m, const char* who) {
    if (m > kMaxHorizon) {
        throw SizingError(std::string(who) + ": horizon " + std::to_string(m) +
                          " exceeds maximum " + std::to_string(kMaxHorizon));
    }
}

}  // namespace

double log_gamma(double x) {
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw DomainError("log_gamma: argument must be positive and finite");
    }
    if (x < 0.5) {
        // Reflection: Gamma(x) Gamma(1 - x) = pi / sin(pi x).
        return std::log(std::numbers::pi / std::sin(std::numbers::pi * x)) - log_gamma(1.0 - x);
    }
    const double xm = x - 1.0;
    double a = kLanczos[0];
    for (std::size_t i = 1; i < kLanczos.size(); ++i) {
        a += kLanczos[i] / (xm + static_cast<double>(i));
    }
    const double t = xm + kLanczosG + 0.5;
    return 0.5 * std::log(2.0 * std::numbers::pi) + (xm + 0.5) * std::log(t) - t + std::log(a);
}

double log_beta(double a, double b) {
    return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
    if (std::isnan(p) || p < 0.0 || p > 1.0) throw DomainError("normal_quantile: p must lie in [0, 1]");
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();

    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double e[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    double x = 0.0;
    if (p < p_low) {
        const double r = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * r + c[1]) * r + c[2]) * r + c[3]) * r + c[4]) * r + c[5]) /
            ((((e[0] * r + e[1]) * r + e[2]) * r + e[3]) * r + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double r = p - 0.5;
        const double s = r * r;
        x = (((((a[0] * s + a[1]) * s + a[2]) * s + a[3]) * s + a[4]) * s + a[5]) * r /
            (((((b[0] * s + b[1]) * s + b[2]) * s + b[3]) * s + b[4]) * s + 1.0);
    } else {
        const double r = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * r + c[1]) * r + c[2]) * r + c[3]) * r + c[4]) * r + c[5]) /
            ((((e[0] * r + e[1]) * r + e[2]) * r + e[3]) * r + 1.0);
    }
    // Halley refinement; in the upper half the residual is taken on the
    // complementary tail to keep relative accuracy.
    const double err = p > 0.5 ? (1.0 - p) - normal_cdf(-x) : normal_cdf(x) - p;
    const double u = err * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    if (std::isfinite(u)) x -= u / (1.0 + 0.5 * x * u);
    return x;
}

std::vector<double> tau_coefficients(double d, std::size_t m) {
    check_horizon(m, "tau_coefficients");
    if (!std::isfinite(d)) throw DomainError("tau_coefficients: d must be finite");
    std::vector<double> tau(m + 1);
    tau[0] = 1.0;
    for (std::size_t k = 1; k <= m; ++k) {
        const double kd = static_cast<double>(k);
        tau[k] = tau[k - 1] * (kd - 1.0 + d) / kd;
    }
    return tau;
}

std::vector<double> delta_coefficients(double d, std::size_t m) {
    check_horizon(m, "delta_coefficients");
    return tau_coefficients(-d, m);
}

std::vector<double> lambda_coefficients(double d, std::span<const double> alpha,
                                        std::span<const double> beta, std::size_t m) {
    check_horizon(m, "lambda_coefficients");
    const std::vector<double> delta = delta_coefficients(d, m);
    const std::size_t p = alpha.size();
    const std::size_t q = beta.size();

    // beta*_j with beta*_0 = beta_0 = -1, zero beyond q.
    auto beta_star = [&](std::size_t j) { return j == 0 ? -1.0 : (j <= q ? beta[j - 1] : 0.0); };
    auto alpha_star = [&](std::size_t k) { return k == 0 ? -1.0 : (k <= p ? alpha[k - 1] : 0.0); };

    // inner[r] = sum_{j=0}^{r} beta*_j delta_{d, r-j}, stored reversed so the
    // outer sum over i runs over contiguous memory: rev[m - r] = inner[r].
    std::vector<double> rev(m + 1, 0.0);
    for (std::size_t r = 1; r <= m; ++r) {
        double s = 0.0;
        const std::size_t jmax = std::min(r, q);
        for (std::size_t j = 0; j <= jmax; ++j) s += beta_star(j) * delta[r - j];
        rev[m - r] = s;
    }

    std::vector<double> lambda(m + 1, 0.0);
    lambda[0] = 1.0;
    for (std::size_t k = 1; k <= m; ++k) {
        // sum_{i=0}^{k-1} lambda_i inner[k - i]; inner[k - i] = rev[m - k + i].
        lambda[k] = -alpha_star(k) + detail::dot(lambda.data(), rev.data() + (m - k), k);
    }
    return lambda;
}

CoefficientTable::CoefficientTable(double d, std::vector<double> alpha, std::vector<double> beta,
                                   std::size_t horizon)
    : d_(d), lambda_(lambda_coefficients(d, alpha, beta, horizon)) {
    alpha_.reserve(alpha.size() + 1);
    alpha_.push_back(-1.0);
    alpha_.insert(alpha_.end(), alpha.begin(), alpha.end());
    beta_.reserve(beta.size() + 1);
    beta_.push_back(-1.0);
    beta_.insert(beta_.end(), beta.begin(), beta.end());
}

}  // namespace fiegarch
