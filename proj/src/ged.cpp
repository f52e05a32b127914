#include "fiegarch/ged.hpp"

#include <cmath>
#include <numbers>

#include "fiegarch/errors.hpp"
#include "fiegarch/special_math.hpp"

namespace fiegarch {

GedParams::GedParams(double nu) : nu_(nu) {
    if (!(nu > 0.0) || !std::isfinite(nu)) {
        throw DomainError("GED: nu must be positive and finite");
    }
    const double lg1 = log_gamma(1.0 / nu);
    const double lg2 = log_gamma(2.0 / nu);
    const double lg3 = log_gamma(3.0 / nu);
    const double ln2 = std::numbers::ln2;
    const double log_lambda = 0.5 * (-2.0 / nu * ln2 + lg1 - lg3);
    lambda_ = std::exp(log_lambda);
    log_norm_ = std::log(nu) - log_lambda - (1.0 + 1.0 / nu) * ln2 - lg1;
    abs_moment_ = std::exp(log_lambda + ln2 / nu + lg2 - lg1);
}

double GedParams::log_density(double z) const noexcept {
    return log_norm_ - 0.5 * std::pow(std::abs(z) / lambda_, nu_);
}

double GedParams::density(double z) const noexcept { return std::exp(log_density(z)); }

double GedParams::sample(Rng& rng) const {
    const double w = gamma_variate(1.0 / nu_, rng);
    const double magnitude = lambda_ * std::pow(2.0 * w, 1.0 / nu_);
    return (rng() >> 63) != 0U ? -magnitude : magnitude;
}

double ged_log_density(double z, const GedParams& params) noexcept { return params.log_density(z); }

std::vector<double> ged_sample(const GedParams& params, Rng& rng, std::size_t n) {
    std::vector<double> out(n);
    for (auto& z : out) z = params.sample(rng);
    return out;
}

double ged_abs_moment(const GedParams& params) noexcept { return params.abs_moment(); }

double g_noise_variance(double theta, double gamma, const GedParams& params) {
    if (theta == 0.0 && gamma == 0.0) {
        throw DegenerateModelError("news-impact function needs theta or gamma nonzero");
    }
    const double m = gamma * params.abs_moment();
    return theta * theta + gamma * gamma - m * m;
}

}  // namespace fiegarch
