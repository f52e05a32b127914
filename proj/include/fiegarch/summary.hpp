#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fiegarch/mcmc.hpp"

namespace fiegarch {

/// Smallest sample value q with P(X <= q) >= alpha and P(X >= q) >= 1 - alpha
/// under the empirical distribution. Throws SizingError on an empty sample
/// and DomainError for alpha outside [0, 1].
double quantile(std::span<const double> sample, double alpha);

/// Equal-tailed interval [q(alpha / 2), q(1 - alpha / 2)], 0 < alpha < 1.
std::pair<double, double> credibility_interval(std::span<const double> sample, double alpha);

struct PosteriorSummary {
    std::string name;
    double mean = 0.0;
    double sd = 0.0;  // 1/M divisor
    double ci_lower = 0.0;
    double ci_upper = 0.0;
    std::optional<double> truth;
    std::optional<double> bias;
    std::optional<double> ape;

    bool ape_gt_10pct() const { return ape && *ape > 0.10; }
    bool truth_in_ci() const { return truth && *truth >= ci_lower && *truth <= ci_upper; }
};

/// Mean and sd (1/M divisor) by a two-pass sum shifted by the first draw,
/// so a constant sample gives its value and sd 0 exactly.
std::pair<double, double> mean_sd(std::span<const double> sample);

PosteriorSummary summarize_sample(std::span<const double> sample, std::string name,
                                  std::optional<double> truth, double alpha = 0.05);

/// One summary per chain column; `truth`, when given, is in the chain's order.
std::vector<PosteriorSummary> summarize(const Chain& chain,
                                        std::optional<std::span<const double>> truth = std::nullopt,
                                        double alpha = 0.05);

/// Gaussian-kernel density estimate evaluated at each grid point.
std::vector<double> density_estimate(std::span<const double> sample, std::span<const double> grid,
                                     double bandwidth);

/// Silverman's rule: 0.9 min(sd, IQR / 1.34) n^(-1/5).
double silverman_bandwidth(std::span<const double> sample);

struct Histogram {
    double lower = 0.0;
    double upper = 0.0;
    std::vector<std::size_t> counts;
    std::vector<double> density;  // counts / (n * bin width)
};

Histogram histogram(std::span<const double> sample, std::size_t bins, double lower, double upper);

}  // namespace fiegarch
