#pragma once

#include <cstddef>
#include <vector>

#include "fiegarch/random.hpp"

namespace fiegarch {

/// Generalized error distribution GED(nu), standardized to mean 0 and
/// variance 1. The scale lambda_nu and the log normalizing constant are
/// fixed when the object is built.
///
/// Moments of X_t under the FIEGARCH model are only guaranteed finite for
/// nu > 1; smaller nu is accepted for simulation.
class GedParams {
public:
    explicit GedParams(double nu);

    double nu() const noexcept { return nu_; }
    /// lambda_nu = [2^(-2/nu) Gamma(1/nu) / Gamma(3/nu)]^(1/2).
    double lambda_nu() const noexcept { return lambda_; }

    double log_density(double z) const noexcept;
    double density(double z) const noexcept;
    /// E|Z| = lambda_nu 2^(1/nu) Gamma(2/nu) / Gamma(1/nu).
    double abs_moment() const noexcept { return abs_moment_; }

    double sample(Rng& rng) const;

private:
    double nu_;
    double lambda_;
    double log_norm_;  // ln nu - ln lambda - (1 + 1/nu) ln 2 - ln Gamma(1/nu)
    double abs_moment_;
};

double ged_log_density(double z, const GedParams& params) noexcept;

/// n i.i.d. draws: |Z|^nu / (2 lambda^nu) ~ Gamma(1/nu, 1) with a random sign.
std::vector<double> ged_sample(const GedParams& params, Rng& rng, std::size_t n);

double ged_abs_moment(const GedParams& params) noexcept;

/// Var g(Z) = theta^2 + gamma^2 - (gamma E|Z|)^2, using E(Z|Z|) = 0.
/// Throws DegenerateModelError when theta = gamma = 0.
double g_noise_variance(double theta, double gamma, const GedParams& params);

}  // namespace fiegarch
