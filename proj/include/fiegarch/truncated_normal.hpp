#pragma once

#include "fiegarch/random.hpp"

namespace fiegarch {

/// Proposal standard deviation and truncation limits for one coordinate.
struct KernelSlot {
    double sd = 1.0;
    double lower = -1.0;
    double upper = 1.0;

    /// Throws DomainError unless sd > 0 and lower < upper.
    void validate() const;
};

/// Draw from N(mean, sd^2) conditioned on [lower, upper] by inverting the
/// CDF on the truncated uniform interval. The mean may lie outside the
/// limits; when the interval mass underflows, an exact exponential-rejection
/// tail sampler takes over. The result always lies inside the limits.
double truncated_normal_sample(double mean, const KernelSlot& slot, Rng& rng);

/// ln f(x; mean, sd, lower, upper); -inf outside the limits.
double truncated_normal_log_density(double x, double mean, const KernelSlot& slot);

/// ln[Phi((upper - mean)/sd) - Phi((lower - mean)/sd)].
double truncated_normal_log_mass(double mean, const KernelSlot& slot);

}  // namespace fiegarch
