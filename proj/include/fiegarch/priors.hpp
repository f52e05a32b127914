#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fiegarch {

enum class PriorKind {
    ImproperPositive,  // 1 on (0, inf)
    Uniform,           // U[a, b]
    GaussianOnPhi,     // x = phi^{-1}(d) ~ N(mu, sigma^2)
    BetaNegTheta,      // -theta ~ Beta(a, b), theta in (-1, 0)
    BetaGamma,         // gamma ~ Beta(a, b), gamma in (0, 1)
    Beta2d,            // 2d ~ Beta(a, b), d in (0, 0.5)
};

std::string_view to_string(PriorKind kind);

/// One prior. For Uniform (a, b) are the limits, for GaussianOnPhi (mu,
/// sigma), for the Beta kinds the two shape parameters.
struct PriorSpec {
    PriorKind kind = PriorKind::ImproperPositive;
    double a = 0.0;
    double b = 0.0;

    static PriorSpec improper_positive() { return {PriorKind::ImproperPositive, 0.0, 0.0}; }
    static PriorSpec uniform(double lo, double hi);
    static PriorSpec gaussian_on_phi(double mu, double sigma);
    static PriorSpec beta_neg_theta(double a1, double b1);
    static PriorSpec beta_gamma(double a2, double b2);
    static PriorSpec beta_2d(double a3, double b3);

    /// Throws HyperparameterError when the invariants of the kind fail.
    void validate() const;
};

/// Log prior density at `value` on the parameter's natural scale; -inf
/// outside the support. Beta kinds have closed supports, with endpoint
/// values following the shape exponents. GaussianOnPhi is
/// the Gaussian log density of phi^{-1}(value), i.e. a density on the x scale.
double log_prior(const PriorSpec& spec, double value);

/// Same prior evaluated on the chain's sampling scale. Only GaussianOnPhi
/// differs: there `state` is x itself.
double log_prior_on_sampling_scale(const PriorSpec& spec, double state);

/// phi(x) = e^x / (2 (1 + e^x)), mapping R onto (0, 0.5).
double phi(double x) noexcept;
/// ln(2d / (1 - 2d)); throws DomainError outside (0, 0.5).
double phi_inverse(double d);

enum class CaseLabel { C1, C2_1, C2_2, C2_3, C3_1, C3_2, C3_3, C4_1, C4_2, C5_1, C5_2 };

std::string_view to_string(CaseLabel label);
/// Parses "C1", "C2.1", ...; throws ConfigError on anything else.
CaseLabel parse_case(std::string_view text);
const std::vector<CaseLabel>& all_cases();

/// True if the chain for d runs on the x = phi^{-1}(d) scale (Cases 2-4).
bool samples_d_on_phi_scale(CaseLabel label);

/// Inputs for building a catalog. Truth values pin hyperparameters in the
/// ".1" scenarios; estimates from an earlier run drive the two-step ones.
struct HyperParameters {
    // Truth (eta_0 subset).
    std::optional<double> d0;
    std::optional<double> theta0;
    std::optional<double> gamma0;
    // Gaussian prior on phi^{-1}(d).
    double sigma_phi = 0.15;
    std::optional<double> mu_phi;  // C2.2 default is 0
    // Beta shapes.
    double a1 = 110.0;
    std::optional<double> b1;  // required for C3.2
    double a2 = 50.0;
    std::optional<double> b2;  // required for C4.2
    double a3 = 25.0;
    // Estimates for the two-step scenarios.
    std::optional<double> d_bar;      // C2.3 (from C2.2), C5.2 (from C1)
    std::optional<double> theta_bar;  // C3.3 (from C3.2)
    // Uniform limits for any alpha_i / beta_j beyond the five base parameters.
    double poly_lower = -1.0;
    double poly_upper = 1.0;
};

/// One prior per parameter in eta order, plus the scenario label.
struct PriorCatalog {
    CaseLabel label = CaseLabel::C1;
    std::vector<PriorSpec> priors;

    double log_prior(std::span<const double> eta) const;
};

/// Case 1 priors for (nu, d, theta, gamma, omega) plus uniform priors on any
/// polynomial coefficients.
PriorCatalog table2_catalog(std::size_t p = 0, std::size_t q = 0, double poly_lower = -1.0,
                            double poly_upper = 1.0);

/// Builds the catalog for a scenario, pinning Beta means to the supplied
/// truth (b = a (1 - m) / m for prior mean m). Throws HyperparameterError
/// when a required value is missing or sits on a support boundary.
PriorCatalog hyperparameters_from_truth(CaseLabel label, const HyperParameters& hp,
                                        std::size_t p = 0, std::size_t q = 0);

/// Mean of the Beta(a, b) distribution.
inline double beta_mean(double a, double b) { return a / (a + b); }

}  // namespace fiegarch
