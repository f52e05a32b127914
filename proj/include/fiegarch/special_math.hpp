#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fiegarch {

/// Largest coefficient horizon any table may be built with.
inline constexpr std::size_t kMaxHorizon = std::size_t{1} << 24;

/// ln Gamma(x) for x > 0 (Lanczos, g = 7, with reflection below 1/2).
/// Throws DomainError for non-positive or non-finite x.
double log_gamma(double x);

/// ln B(a, b) for a, b > 0.
double log_beta(double a, double b);

/// Standard normal CDF, 0.5 erfc(-x / sqrt 2).
double normal_cdf(double x) noexcept;

/// Standard normal quantile for p in (0, 1): rational initial guess
/// refined by one Halley step against normal_cdf. Returns -inf / +inf at 0 / 1.
double normal_quantile(double p);

/// Maclaurin coefficients tau_{d,k}, k = 0..m, of (1 - B)^(-d), computed by
/// the multiplicative recursion tau_k = tau_{k-1} (k - 1 + d) / k.
std::vector<double> tau_coefficients(double d, std::size_t m);

/// Coefficients of (1 - B)^d, i.e. tau_coefficients(-d, m).
std::vector<double> delta_coefficients(double d, std::size_t m);

/// Coefficients lambda_{d,k}, k = 0..m, of alpha(z)/beta(z) (1 - z)^(-d),
/// with alpha(z) = 1 - sum alpha_i z^i and beta(z) = 1 - sum beta_j z^j.
/// `alpha` and `beta` hold the free coefficients alpha_1..alpha_p and
/// beta_1..beta_q. Uses the lambda recursion over the (1 - B)^d
/// coefficients; beta(z) must not vanish on the closed unit disk (unchecked).
std::vector<double> lambda_coefficients(double d, std::span<const double> alpha,
                                        std::span<const double> beta, std::size_t m);

/// Immutable table of lambda_{d,k} for one (d, alpha, beta) up to a horizon.
class CoefficientTable {
public:
    CoefficientTable(double d, std::vector<double> alpha, std::vector<double> beta,
                     std::size_t horizon);

    double d() const noexcept { return d_; }
    std::size_t p() const noexcept { return alpha_.size() - 1; }
    std::size_t q() const noexcept { return beta_.size() - 1; }
    std::size_t horizon() const noexcept { return lambda_.size() - 1; }

    /// Full polynomial coefficient vectors; element 0 is -1.
    std::span<const double> alpha() const noexcept { return alpha_; }
    std::span<const double> beta() const noexcept { return beta_; }

    std::span<const double> lambda() const noexcept { return lambda_; }
    double operator[](std::size_t k) const noexcept { return lambda_[k]; }

private:
    double d_;
    std::vector<double> alpha_;
    std::vector<double> beta_;
    std::vector<double> lambda_;
};

}  // namespace fiegarch
