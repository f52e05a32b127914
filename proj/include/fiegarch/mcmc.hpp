#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "fiegarch/errors.hpp"
#include "fiegarch/model.hpp"
#include "fiegarch/priors.hpp"
#include "fiegarch/random.hpp"
#include "fiegarch/truncated_normal.hpp"

namespace fiegarch {

/// One truncated-normal kernel slot per parameter, in eta order.
struct KernelSpec {
    std::vector<KernelSlot> slots;

    void validate() const;

    /// sd (0.5, 0.025, 0.05, 0.05, 1.5) with limits (0, 10), (0, 0.5),
    /// (-1, 0), (0, 1), (-15, 15); when d is sampled as x = phi^{-1}(d),
    /// its slot becomes sd 1 on (-10, 10). Polynomial coefficients get
    /// sd 0.05 on (-1, 1).
    static KernelSpec defaults(CaseLabel label, std::size_t p = 0, std::size_t q = 0);
};

enum class HastingsCorrection { On, Off };

struct StepResult {
    double value;
    double log_target;
    bool accepted;
};

/// One Metropolis-Hastings proposal for a single coordinate: proposes from
/// the truncated normal centred at `current` and accepts with
/// min{1, p(xi) q(current | xi) / (p(current) q(xi | current))}, in log space.
/// `log_target(v)` returns the log target with the coordinate set to v.
/// Throws SamplerStateError if the current log target is not finite.
template <class LogTarget>
StepResult metropolis_step(double current, double current_log_target, LogTarget&& log_target,
                           const KernelSlot& slot, Rng& rng,
                           HastingsCorrection hastings = HastingsCorrection::On) {
    if (!std::isfinite(current_log_target)) {
        throw SamplerStateError("metropolis step: log target is not finite at the current state");
    }
    const double proposal = truncated_normal_sample(current, slot, rng);
    const double proposal_log_target = log_target(proposal);
    const double u = uniform01(rng);
    if (!(proposal_log_target > -std::numeric_limits<double>::infinity())) {
        return {current, current_log_target, false};
    }
    double log_ratio = proposal_log_target - current_log_target;
    if (hastings == HastingsCorrection::On) {
        log_ratio += truncated_normal_log_density(current, proposal, slot) -
                     truncated_normal_log_density(proposal, current, slot);
    }
    if (std::log(u) < log_ratio) return {proposal, proposal_log_target, true};
    return {current, current_log_target, false};
}

/// Unnormalized log density on the chain's sampling scale. Implementations
/// may keep workspaces, so evaluation is non-const and a target must not be
/// shared between chains.
class Target {
public:
    virtual ~Target() = default;
    virtual std::size_t dimension() const = 0;
    virtual std::vector<std::string> names() const = 0;
    virtual double log_density(std::span<const double> state) = 0;
    /// Map between the natural parameter value and the sampling scale.
    virtual double to_natural(std::size_t, double state_value) const { return state_value; }
    virtual double to_sampling(std::size_t, double natural_value) const { return natural_value; }
};

/// Posterior of the FIEGARCH parameters given a series: log-likelihood
/// under the chosen presample convention plus the factorized log prior.
/// Coefficient tables are cached per d, so moves in the other coordinates
/// reuse the current table.
class FiegarchTarget final : public Target {
public:
    FiegarchTarget(std::vector<double> data, PriorCatalog catalog, std::size_t p = 0,
                   std::size_t q = 0, PresampleConvention convention = PresampleConvention::Conditional);

    std::size_t dimension() const override { return 5 + p_ + q_; }
    std::vector<std::string> names() const override { return ModelSpec::parameter_names(p_, q_); }
    double log_density(std::span<const double> state) override;
    double to_natural(std::size_t i, double state_value) const override;
    double to_sampling(std::size_t i, double natural_value) const override;

    /// Log-likelihood at natural-scale parameters; -inf if the filter fails.
    double log_likelihood(const ModelSpec& spec);

    const PriorCatalog& catalog() const noexcept { return catalog_; }
    std::span<const double> data() const noexcept { return data_; }
    bool d_on_phi_scale() const noexcept { return d_on_phi_; }

private:
    const CoefficientTable& table_for(const ModelSpec& spec);

    std::vector<double> data_;
    PriorCatalog catalog_;
    std::size_t p_;
    std::size_t q_;
    PresampleConvention convention_;
    bool d_on_phi_;
    // Most recently used tables keyed by (d, alpha, beta).
    std::vector<std::pair<std::vector<double>, std::unique_ptr<CoefficientTable>>> tables_;
};

struct ChainSettings {
    std::size_t n_iter = 6000;
    std::size_t burn_in = 1000;
    std::size_t thinning = 1;
    HastingsCorrection hastings = HastingsCorrection::On;
};

/// n_iter needed to keep N draws after burn-in b at stride t: b + 1 + t (N - 1).
constexpr std::size_t required_iterations(std::size_t burn_in, std::size_t thinning, std::size_t n) {
    return n == 0 ? burn_in : burn_in + 1 + thinning * (n - 1);
}

/// Retained draws on the natural scale, row-major (one row per draw).
class Chain {
public:
    std::vector<std::string> names;
    std::vector<double> draws;
    std::vector<std::size_t> iterations;  // 1-based sweep index of each row
    std::size_t n_iter = 0;
    std::size_t burn_in = 0;
    std::size_t thinning = 1;
    std::vector<std::size_t> accepted;
    std::vector<std::size_t> proposals;
    std::uint64_t seed = 0;
    std::vector<double> initial;

    std::size_t dimension() const noexcept { return names.size(); }
    std::size_t size() const noexcept { return iterations.size(); }
    std::span<const double> row(std::size_t r) const {
        return std::span<const double>(draws).subspan(r * dimension(), dimension());
    }
    std::vector<double> column(std::size_t i) const;
    double acceptance_rate(std::size_t i) const {
        return proposals[i] == 0 ? 0.0 : static_cast<double>(accepted[i]) / static_cast<double>(proposals[i]);
    }

    /// Rows whose sweep index m satisfies m > burn_in and
    /// (m - burn_in - 1) % thinning == 0, keeping at most `max_draws`.
    Chain view(std::size_t burn_in, std::size_t thinning,
               std::size_t max_draws = std::numeric_limits<std::size_t>::max()) const;
};

/// Gibbs sampler with one Metropolis step per coordinate per sweep, sweeping
/// in eta order. `init` is on the natural scale and must lie inside every
/// prior support and kernel interval.
Chain gibbs_run(Target& target, const KernelSpec& kernel, std::span<const double> init,
                const ChainSettings& settings, std::uint64_t seed);

Chain gibbs_run(std::span<const double> data, const PriorCatalog& catalog, const KernelSpec& kernel,
                const ModelSpec& init, const ChainSettings& settings, std::uint64_t seed,
                PresampleConvention convention = PresampleConvention::Conditional);

/// Candidate values per parameter for likelihood-grid initialization.
struct ParameterGrid {
    std::vector<double> nu;
    std::vector<double> d;
    std::vector<double> theta;
    std::vector<double> gamma;
    std::vector<double> omega;
    std::vector<double> alpha;  // held fixed
    std::vector<double> beta;   // held fixed

    std::size_t size() const noexcept {
        return nu.size() * d.size() * theta.size() * gamma.size() * omega.size();
    }
    /// nu {1,2,3,5}, d {0.05,...,0.45}, theta {-0.3,-0.15,-0.05},
    /// gamma {0.1,0.25,0.4}, omega {c-1, c, c+1} with c = ln(sample variance).
    static ParameterGrid defaults(std::span<const double> data);
};

/// Cartesian-grid argmax of the log-likelihood (first maximum in
/// nu-major order). Throws InitializationError for an empty grid or when
/// no point has a finite likelihood.
ModelSpec grid_initialize(std::span<const double> data, const ParameterGrid& grid,
                          PresampleConvention convention = PresampleConvention::Conditional,
                          std::size_t workers = 1);

}  // namespace fiegarch
