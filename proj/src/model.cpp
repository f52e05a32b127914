#include "fiegarch/model.hpp"

#include <cmath>

#include "dot.hpp"
#include "fiegarch/errors.hpp"

namespace fiegarch {

void ModelSpec::validate() const {
    const auto all_finite = [](std::span<const double> v) {
        for (double e : v) {
            if (!std::isfinite(e)) return false;
        }
        return true;
    };
    if (!(nu > 0.0) || !std::isfinite(nu)) throw DomainError("model: nu must be positive");
    if (!std::isfinite(d) || !(d < 0.5)) throw DomainError("model: d must be finite and below 0.5");
    if (!std::isfinite(theta) || !std::isfinite(gamma) || !std::isfinite(omega) ||
        !all_finite(alpha) || !all_finite(beta)) {
        throw DomainError("model: parameters must be finite");
    }
    if (theta == 0.0 && gamma == 0.0) {
        throw DegenerateModelError("model: theta and gamma are both zero");
    }
}

std::vector<double> ModelSpec::to_vector() const {
    std::vector<double> eta{nu, d, theta, gamma, omega};
    eta.insert(eta.end(), alpha.begin(), alpha.end());
    eta.insert(eta.end(), beta.begin(), beta.end());
    return eta;
}

ModelSpec ModelSpec::from_vector(std::span<const double> eta, std::size_t p, std::size_t q) {
    if (eta.size() != 5 + p + q) {
        throw SizingError("model: parameter vector has " + std::to_string(eta.size()) +
                          " entries, expected " + std::to_string(5 + p + q));
    }
    ModelSpec spec;
    spec.nu = eta[kNu];
    spec.d = eta[kD];
    spec.theta = eta[kTheta];
    spec.gamma = eta[kGamma];
    spec.omega = eta[kOmega];
    spec.alpha.assign(eta.begin() + 5, eta.begin() + 5 + static_cast<std::ptrdiff_t>(p));
    spec.beta.assign(eta.begin() + 5 + static_cast<std::ptrdiff_t>(p), eta.end());
    return spec;
}

std::vector<std::string> ModelSpec::parameter_names(std::size_t p, std::size_t q) {
    std::vector<std::string> names{"nu", "d", "theta", "gamma", "omega"};
    for (std::size_t i = 1; i <= p; ++i) names.push_back("alpha" + std::to_string(i));
    for (std::size_t j = 1; j <= q; ++j) names.push_back("beta" + std::to_string(j));
    return names;
}

SimulatedSeries simulate(const ModelSpec& spec, std::size_t n, std::size_t m_star, Rng& rng,
                         SimulationPresample presample) {
    spec.validate();
    if (n == 0) throw SizingError("simulate: series length must be at least 1");
    if (m_star == 0) throw SizingError("simulate: truncation must be at least 1");

    const GedParams ged(spec.nu);
    const double e_abs = ged.abs_moment();
    const std::vector<double> lambda = lambda_coefficients(spec.d, spec.alpha, spec.beta, m_star);

    SimulatedSeries out;
    out.m_star = m_star;
    out.z = ged_sample(ged, rng, m_star + n + 1);

    // news_rev[r] = g(z_{n - r}), r = 0..n + m*; zeroed for s <= 0 if requested.
    const std::size_t total = m_star + n + 1;
    std::vector<double> news_rev(total);
    for (std::size_t idx = 0; idx < total; ++idx) {
        const std::ptrdiff_t s = static_cast<std::ptrdiff_t>(idx) - static_cast<std::ptrdiff_t>(m_star);
        const bool zeroed = presample == SimulationPresample::Zero && s <= 0;
        news_rev[total - 1 - idx] =
            zeroed ? 0.0 : g_function(out.z[idx], spec.theta, spec.gamma, e_abs);
    }

    out.x.resize(n);
    out.sigma2.resize(n);
    for (std::size_t t = 1; t <= n; ++t) {
        // g(z_{t-1-k}) = news_rev[n - t + 1 + k], k = 0..m*.
        const double h = spec.omega + detail::dot(lambda.data(), news_rev.data() + (n - t + 1), m_star + 1);
        const double s2 = std::exp(h);
        if (!std::isfinite(h) || !std::isfinite(s2) || !(s2 > 0.0)) {
            throw SimulationError("simulate: non-finite volatility", t);
        }
        out.sigma2[t - 1] = s2;
        out.x[t - 1] = std::sqrt(s2) * out.innovation(t);
    }
    return out;
}

SimulatedSeries simulate(const ModelSpec& spec, std::size_t n, std::size_t m_star,
                         std::uint64_t seed, SimulationPresample presample) {
    Rng rng(seed);
    SimulatedSeries out = simulate(spec, n, m_star, rng, presample);
    out.seed = seed;
    return out;
}

VolatilityFilter::VolatilityFilter(const CoefficientTable& table, PresampleConvention convention)
    : table_(&table), convention_(convention), news_rev_(table.horizon() + 1, 0.0) {}

void VolatilityFilter::reset(const ModelSpec& spec) {
    if (spec.d != table_->d() || spec.p() != table_->p() || spec.q() != table_->q()) {
        throw DomainError("volatility filter: coefficient table does not match the model");
    }
    if (spec.theta == 0.0 && spec.gamma == 0.0) {
        throw DegenerateModelError("volatility filter: theta and gamma are both zero");
    }
    ged_ = GedParams(spec.nu);
    theta_ = spec.theta;
    gamma_ = spec.gamma;
    omega_ = spec.omega;
    e_abs_z_ = ged_.abs_moment();
    t_ = 0;
    log_lik_ = 0.0;
}

VolatilityFilter::Step VolatilityFilter::step(double x) {
    const std::size_t cap = news_rev_.size();
    if (t_ >= cap) {
        throw SizingError("volatility filter: series longer than coefficient horizon " +
                          std::to_string(table_->horizon()));
    }
    const std::size_t i = t_;  // 0-based time index, t = i + 1
    // ln sigma_t^2 = omega + sum_{k=0}^{i-1} lambda_k g_{i-1-k}; g_j sits at cap - 1 - j.
    const double h = omega_ + detail::dot(table_->lambda().data(), news_rev_.data() + (cap - i), i);
    const double s2 = std::exp(h);
    if (!std::isfinite(h) || !std::isfinite(s2) || !(s2 > 0.0)) {
        throw FilterError("volatility filter: non-finite volatility", i + 1);
    }
    const double z = x * std::exp(-0.5 * h);
    const bool dropped = convention_ == PresampleConvention::PaperLiteral && i == 0;
    news_rev_[cap - 1 - i] = dropped ? 0.0 : g_function(z, theta_, gamma_, e_abs_z_);
    const double ll = ged_.log_density(z) - 0.5 * h;
    log_lik_ += ll;
    ++t_;
    return {s2, z, ll};
}

FilterResult volatility_filter(const ModelSpec& spec, std::span<const double> x,
                               const CoefficientTable& table, PresampleConvention convention) {
    if (x.empty()) throw SizingError("volatility filter: empty series");
    VolatilityFilter filter(table, convention);
    filter.reset(spec);
    FilterResult out;
    out.sigma2.reserve(x.size());
    out.z.reserve(x.size());
    for (double xt : x) {
        const auto s = filter.step(xt);
        out.sigma2.push_back(s.sigma2);
        out.z.push_back(s.z);
    }
    return out;
}

double log_likelihood(const ModelSpec& spec, std::span<const double> x,
                      const CoefficientTable& table, PresampleConvention convention) {
    if (x.empty()) throw SizingError("log-likelihood: empty series");
    VolatilityFilter filter(table, convention);
    filter.reset(spec);
    for (double xt : x) filter.step(xt);
    return filter.log_likelihood();
}

CoefficientTable estimation_table(const ModelSpec& spec, std::size_t n) {
    return CoefficientTable(spec.d, spec.alpha, spec.beta, n);
}

}  // namespace fiegarch
