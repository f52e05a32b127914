#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fiegarch/ged.hpp"
#include "fiegarch/random.hpp"
#include "fiegarch/special_math.hpp"

namespace fiegarch {

/// FIEGARCH(p, d, q) parameters. The flat parameter vector is ordered
/// (nu, d, theta, gamma, omega, alpha_1..alpha_p, beta_1..beta_q).
struct ModelSpec {
    double nu = 2.0;
    double d = 0.0;
    double theta = -0.15;
    double gamma = 0.24;
    double omega = -5.4;
    std::vector<double> alpha;
    std::vector<double> beta;

    std::size_t p() const noexcept { return alpha.size(); }
    std::size_t q() const noexcept { return beta.size(); }
    std::size_t dimension() const noexcept { return 5 + p() + q(); }

    /// Throws DomainError (nu <= 0, d >= 0.5, non-finite entries) or
    /// DegenerateModelError (theta = gamma = 0).
    void validate() const;

    std::vector<double> to_vector() const;
    static ModelSpec from_vector(std::span<const double> eta, std::size_t p, std::size_t q);
    static std::vector<std::string> parameter_names(std::size_t p, std::size_t q);
};

/// Indices of the fixed leading parameters in the flat vector.
enum ParameterIndex : std::size_t { kNu = 0, kD = 1, kTheta = 2, kGamma = 3, kOmega = 4 };

/// News-impact function g(z) = theta z + gamma (|z| - E|Z|).
inline double g_function(double z, double theta, double gamma, double e_abs_z) noexcept {
    return theta * z + gamma * ((z < 0.0 ? -z : z) - e_abs_z);
}

/// How simulate() treats innovations before t = 1.
enum class SimulationPresample {
    Innovations,  // draw m* presample innovations and use them
    Zero,         // g(z_s) = 0 for s <= 0 (matches the estimation filter)
};

/// How the estimation filter treats unobserved news terms.
enum class PresampleConvention {
    Conditional,   // g(z_s) = 0 for s <= 0; g(z_1) enters from t = 2 on
    PaperLiteral,  // g(z_s) = 0 for s <= 1; g(z_1) is dropped as well
};

struct SimulatedSeries {
    std::vector<double> x;       // X_1..X_n
    std::vector<double> sigma2;  // sigma_1^2..sigma_n^2
    std::vector<double> z;       // z_{-m*}..z_n; z_t is at index t + m_star
    std::optional<std::uint64_t> seed;
    std::size_t m_star = 0;

    double innovation(std::size_t t) const { return z[t + m_star]; }  // t is 1-based
};

/// Draws m* + n + 1 GED(nu) innovations and builds
/// ln sigma_t^2 = omega + sum_{k=0}^{m*} lambda_{d,k} g(z_{t-1-k}), x_t = sigma_t z_t.
/// Throws SimulationError naming t if a volatility is not finite and positive.
SimulatedSeries simulate(const ModelSpec& spec, std::size_t n, std::size_t m_star, Rng& rng,
                         SimulationPresample presample = SimulationPresample::Innovations);

SimulatedSeries simulate(const ModelSpec& spec, std::size_t n, std::size_t m_star,
                         std::uint64_t seed,
                         SimulationPresample presample = SimulationPresample::Innovations);

/// Recursive volatility filter. State carries the news history, so a series
/// can be fed in pieces and the accumulated log-likelihood equals the
/// one-pass value.
class VolatilityFilter {
public:
    struct Step {
        double sigma2;
        double z;
        double log_lik;  // ln p_Z(z | nu) - ln(sigma2) / 2
    };

    explicit VolatilityFilter(const CoefficientTable& table,
                              PresampleConvention convention = PresampleConvention::Conditional);

    /// Starts a new series with the given parameters. `spec.d` and the
    /// polynomial orders must match the table.
    void reset(const ModelSpec& spec);

    /// Consumes x_t for the next t; throws FilterError on a non-finite
    /// volatility and SizingError past the table horizon.
    Step step(double x);

    std::size_t size() const noexcept { return t_; }
    double log_likelihood() const noexcept { return log_lik_; }

private:
    const CoefficientTable* table_;
    PresampleConvention convention_;
    std::vector<double> news_rev_;  // g(z_j) stored at capacity - 1 - j
    std::size_t t_ = 0;
    double log_lik_ = 0.0;
    double theta_ = 0.0;
    double gamma_ = 0.0;
    double omega_ = 0.0;
    double e_abs_z_ = 0.0;
    GedParams ged_{2.0};
};

struct FilterResult {
    std::vector<double> sigma2;
    std::vector<double> z;
};

FilterResult volatility_filter(const ModelSpec& spec, std::span<const double> x,
                               const CoefficientTable& table,
                               PresampleConvention convention = PresampleConvention::Conditional);

/// sum_t [ln p_Z(x_t / sigma_t | nu) - ln(sigma_t^2) / 2].
double log_likelihood(const ModelSpec& spec, std::span<const double> x,
                      const CoefficientTable& table,
                      PresampleConvention convention = PresampleConvention::Conditional);

/// Table sized for estimation on a series of length n (horizon n).
CoefficientTable estimation_table(const ModelSpec& spec, std::size_t n);

}  // namespace fiegarch
