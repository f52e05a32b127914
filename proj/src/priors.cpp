#include "fiegarch/priors.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>

#include "fiegarch/errors.hpp"
#include "fiegarch/special_math.hpp"

namespace fiegarch {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Closed support [0, 1]; an endpoint is finite only when its exponent vanishes.
double beta_log_density(double u, double a, double b) {
    if (!(u >= 0.0 && u <= 1.0)) return kNegInf;
    const double left = a == 1.0 ? 0.0 : (a - 1.0) * std::log(u);
    const double right = b == 1.0 ? 0.0 : (b - 1.0) * std::log1p(-u);
    return left + right - log_beta(a, b);
}

double normal_log_density(double x, double mu, double sigma) {
    const double r = (x - mu) / sigma;
    return -0.5 * r * r - std::log(sigma) - 0.5 * std::log(2.0 * std::numbers::pi);
}

// b such that a / (a + b) equals the target mean m in (0, 1).
double pinned_b(double a, double m, const char* what) {
    if (!(m > 0.0 && m < 1.0)) {
        throw HyperparameterError(std::string("prior mean for ") + what +
                                  " must lie strictly inside (0, 1)");
    }
    return a * (1.0 - m) / m;
}

double require(const std::optional<double>& v, const char* what, CaseLabel label) {
    if (!v) {
        throw HyperparameterError(std::string(to_string(label)) + " needs " + what);
    }
    return *v;
}

}  // namespace

std::string_view to_string(PriorKind kind) {
    switch (kind) {
        case PriorKind::ImproperPositive: return "improper-positive";
        case PriorKind::Uniform: return "uniform";
        case PriorKind::GaussianOnPhi: return "gaussian-on-phi";
        case PriorKind::BetaNegTheta: return "beta-neg-theta";
        case PriorKind::BetaGamma: return "beta-gamma";
        case PriorKind::Beta2d: return "beta-2d";
    }
    return "?";
}

PriorSpec PriorSpec::uniform(double lo, double hi) {
    PriorSpec s{PriorKind::Uniform, lo, hi};
    s.validate();
    return s;
}

PriorSpec PriorSpec::gaussian_on_phi(double mu, double sigma) {
    PriorSpec s{PriorKind::GaussianOnPhi, mu, sigma};
    s.validate();
    return s;
}

PriorSpec PriorSpec::beta_neg_theta(double a1, double b1) {
    PriorSpec s{PriorKind::BetaNegTheta, a1, b1};
    s.validate();
    return s;
}

PriorSpec PriorSpec::beta_gamma(double a2, double b2) {
    PriorSpec s{PriorKind::BetaGamma, a2, b2};
    s.validate();
    return s;
}

PriorSpec PriorSpec::beta_2d(double a3, double b3) {
    PriorSpec s{PriorKind::Beta2d, a3, b3};
    s.validate();
    return s;
}

void PriorSpec::validate() const {
    switch (kind) {
        case PriorKind::ImproperPositive: return;
        case PriorKind::Uniform:
            if (!(std::isfinite(a) && std::isfinite(b) && a < b)) {
                throw HyperparameterError("uniform prior needs finite a < b");
            }
            return;
        case PriorKind::GaussianOnPhi:
            if (!(std::isfinite(a) && std::isfinite(b) && b > 0.0)) {
                throw HyperparameterError("gaussian-on-phi prior needs finite mu and sigma > 0");
            }
            return;
        case PriorKind::BetaNegTheta:
        case PriorKind::BetaGamma:
        case PriorKind::Beta2d:
            if (!(a > 0.0 && b > 0.0 && std::isfinite(a) && std::isfinite(b))) {
                throw HyperparameterError("beta prior needs positive finite shapes");
            }
            return;
    }
}

double phi(double x) noexcept { return 0.5 / (1.0 + std::exp(-x)); }

double phi_inverse(double d) {
    if (!(d > 0.0 && d < 0.5)) throw DomainError("phi_inverse: d must lie in (0, 0.5)");
    return std::log(2.0 * d / (1.0 - 2.0 * d));
}

double log_prior(const PriorSpec& spec, double value) {
    if (std::isnan(value)) return kNegInf;
    switch (spec.kind) {
        case PriorKind::ImproperPositive: return value > 0.0 && std::isfinite(value) ? 0.0 : kNegInf;
        case PriorKind::Uniform:
            return value >= spec.a && value <= spec.b ? -std::log(spec.b - spec.a) : kNegInf;
        case PriorKind::GaussianOnPhi:
            if (!(value > 0.0 && value < 0.5)) return kNegInf;
            return normal_log_density(phi_inverse(value), spec.a, spec.b);
        case PriorKind::BetaNegTheta: return beta_log_density(-value, spec.a, spec.b);
        case PriorKind::BetaGamma: return beta_log_density(value, spec.a, spec.b);
        case PriorKind::Beta2d: return std::numbers::ln2 + beta_log_density(2.0 * value, spec.a, spec.b);
    }
    return kNegInf;
}

double log_prior_on_sampling_scale(const PriorSpec& spec, double state) {
    if (spec.kind == PriorKind::GaussianOnPhi) {
        if (!std::isfinite(state)) return kNegInf;
        return normal_log_density(state, spec.a, spec.b);
    }
    return log_prior(spec, state);
}

double PriorCatalog::log_prior(std::span<const double> eta) const {
    double s = 0.0;
    for (std::size_t i = 0; i < priors.size() && i < eta.size(); ++i) {
        s += fiegarch::log_prior(priors[i], eta[i]);
    }
    return s;
}

namespace {
constexpr std::array<std::pair<CaseLabel, std::string_view>, 11> kCaseNames{{
    {CaseLabel::C1, "C1"},
    {CaseLabel::C2_1, "C2.1"},
    {CaseLabel::C2_2, "C2.2"},
    {CaseLabel::C2_3, "C2.3"},
    {CaseLabel::C3_1, "C3.1"},
    {CaseLabel::C3_2, "C3.2"},
    {CaseLabel::C3_3, "C3.3"},
    {CaseLabel::C4_1, "C4.1"},
    {CaseLabel::C4_2, "C4.2"},
    {CaseLabel::C5_1, "C5.1"},
    {CaseLabel::C5_2, "C5.2"},
}};
}  // namespace

std::string_view to_string(CaseLabel label) {
    for (const auto& [l, name] : kCaseNames) {
        if (l == label) return name;
    }
    return "?";
}

CaseLabel parse_case(std::string_view text) {
    for (const auto& [l, name] : kCaseNames) {
        if (name == text) return l;
    }
    throw ConfigError("unknown prior case '" + std::string(text) + "'");
}

const std::vector<CaseLabel>& all_cases() {
    static const std::vector<CaseLabel> cases = [] {
        std::vector<CaseLabel> v;
        for (const auto& entry : kCaseNames) v.push_back(entry.first);
        return v;
    }();
    return cases;
}

bool samples_d_on_phi_scale(CaseLabel label) {
    switch (label) {
        case CaseLabel::C1:
        case CaseLabel::C5_1:
        case CaseLabel::C5_2: return false;
        default: return true;
    }
}

PriorCatalog table2_catalog(std::size_t p, std::size_t q, double poly_lower, double poly_upper) {
    PriorCatalog cat;
    cat.label = CaseLabel::C1;
    cat.priors = {PriorSpec::improper_positive(), PriorSpec::uniform(0.0, 0.5),
                  PriorSpec::uniform(-1.0, 0.0), PriorSpec::uniform(0.0, 1.0),
                  PriorSpec::uniform(-15.0, 15.0)};
    for (std::size_t i = 0; i < p + q; ++i) cat.priors.push_back(PriorSpec::uniform(poly_lower, poly_upper));
    return cat;
}

PriorCatalog hyperparameters_from_truth(CaseLabel label, const HyperParameters& hp, std::size_t p,
                                        std::size_t q) {
    PriorCatalog cat = table2_catalog(p, q, hp.poly_lower, hp.poly_upper);
    cat.label = label;
    auto& d_prior = cat.priors[1];
    auto& theta_prior = cat.priors[2];
    auto& gamma_prior = cat.priors[3];

    // Gaussian prior on x = phi^{-1}(d) centred on phi^{-1}(d_ref).
    auto gaussian_d = [&](double d_ref) {
        if (!(d_ref > 0.0 && d_ref < 0.5)) {
            throw HyperparameterError("d reference value must lie strictly inside (0, 0.5)");
        }
        d_prior = PriorSpec::gaussian_on_phi(phi_inverse(d_ref), hp.sigma_phi);
    };
    auto pinned_theta = [&](double theta_ref) {
        theta_prior = PriorSpec::beta_neg_theta(hp.a1, pinned_b(hp.a1, -theta_ref, "-theta"));
    };
    auto pinned_gamma = [&](double gamma_ref) {
        gamma_prior = PriorSpec::beta_gamma(hp.a2, pinned_b(hp.a2, gamma_ref, "gamma"));
    };
    auto pinned_2d = [&](double d_ref) {
        d_prior = PriorSpec::beta_2d(hp.a3, pinned_b(hp.a3, 2.0 * d_ref, "2d"));
    };

    switch (label) {
        case CaseLabel::C1: break;
        case CaseLabel::C2_1: gaussian_d(require(hp.d0, "d0", label)); break;
        case CaseLabel::C2_2: d_prior = PriorSpec::gaussian_on_phi(hp.mu_phi.value_or(0.0), hp.sigma_phi); break;
        case CaseLabel::C2_3: gaussian_d(require(hp.d_bar, "d_bar (estimate from C2.2)", label)); break;
        case CaseLabel::C3_1:
            gaussian_d(require(hp.d0, "d0", label));
            pinned_theta(require(hp.theta0, "theta0", label));
            break;
        case CaseLabel::C3_2:
            gaussian_d(require(hp.d0, "d0", label));
            theta_prior = PriorSpec::beta_neg_theta(hp.a1, require(hp.b1, "b1", label));
            break;
        case CaseLabel::C3_3:
            gaussian_d(require(hp.d0, "d0", label));
            pinned_theta(require(hp.theta_bar, "theta_bar (estimate from C3.2)", label));
            break;
        case CaseLabel::C4_1:
            gaussian_d(require(hp.d0, "d0", label));
            pinned_theta(require(hp.theta0, "theta0", label));
            pinned_gamma(require(hp.gamma0, "gamma0", label));
            break;
        case CaseLabel::C4_2:
            gaussian_d(require(hp.d0, "d0", label));
            pinned_theta(require(hp.theta0, "theta0", label));
            gamma_prior = PriorSpec::beta_gamma(hp.a2, require(hp.b2, "b2", label));
            break;
        case CaseLabel::C5_1:
            pinned_2d(require(hp.d0, "d0", label));
            pinned_theta(require(hp.theta0, "theta0", label));
            pinned_gamma(require(hp.gamma0, "gamma0", label));
            break;
        case CaseLabel::C5_2:
            pinned_2d(require(hp.d_bar, "d_bar (estimate from C1)", label));
            pinned_theta(require(hp.theta0, "theta0", label));
            pinned_gamma(require(hp.gamma0, "gamma0", label));
            break;
    }
    return cat;
}

}  // namespace fiegarch
