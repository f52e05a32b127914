#include "fiegarch/summary.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>

#include "fiegarch/errors.hpp"

namespace fiegarch {

double quantile(std::span<const double> sample, double alpha) {
    if (sample.empty()) throw SizingError("quantile: empty sample");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("quantile: alpha must lie in [0, 1]");
    std::vector<double> s(sample.begin(), sample.end());
    std::sort(s.begin(), s.end());
    const auto n = static_cast<double>(s.size());

    // P(X <= v) >= alpha is monotone in v, so the first distinct value meeting it
    // is the candidate; the upper-tail condition is then checked on that value.
    auto at_least_alpha = [&](std::size_t idx) {
        const auto le = static_cast<double>(std::upper_bound(s.begin(), s.end(), s[idx]) - s.begin());
        return le / n >= alpha;
    };
    std::size_t lo = 0;
    std::size_t hi = s.size() - 1;  // the maximum always satisfies the lower condition
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (at_least_alpha(mid)) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    const double q = s[lo];
    const auto ge = static_cast<double>(s.end() - std::lower_bound(s.begin(), s.end(), q));
    if (!(ge / n >= 1.0 - alpha)) {
        throw DomainError("quantile: no order statistic satisfies both tail conditions");
    }
    return q;
}

std::pair<double, double> credibility_interval(std::span<const double> sample, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("credibility_interval: alpha must lie in (0, 1)");
    return {quantile(sample, alpha / 2.0), quantile(sample, 1.0 - alpha / 2.0)};
}

std::pair<double, double> mean_sd(std::span<const double> sample) {
    if (sample.empty()) throw SizingError("mean_sd: empty sample");
    const auto m = static_cast<double>(sample.size());
    const double shift = sample.front();
    double sum = 0.0;
    for (double v : sample) sum += v - shift;
    const double mean = shift + sum / m;
    double ss = 0.0;
    for (double v : sample) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / m)};
}

PosteriorSummary summarize_sample(std::span<const double> sample, std::string name,
                                  std::optional<double> truth, double alpha) {
    PosteriorSummary out;
    out.name = std::move(name);
    std::tie(out.mean, out.sd) = mean_sd(sample);
    std::tie(out.ci_lower, out.ci_upper) = credibility_interval(sample, alpha);
    if (truth) {
        out.truth = truth;
        out.bias = out.mean - *truth;
        out.ape = std::abs(*out.bias / *truth);
    }
    return out;
}

std::vector<PosteriorSummary> summarize(const Chain& chain, std::optional<std::span<const double>> truth,
                                        double alpha) {
    if (chain.size() == 0) throw SizingError("summarize: empty chain");
    if (truth && truth->size() != chain.dimension()) {
        throw SizingError("summarize: truth vector does not match the chain dimension");
    }
    std::vector<PosteriorSummary> out;
    for (std::size_t i = 0; i < chain.dimension(); ++i) {
        const std::vector<double> col = chain.column(i);
        std::optional<double> t;
        if (truth) t = (*truth)[i];
        out.push_back(summarize_sample(col, chain.names[i], t, alpha));
    }
    return out;
}

std::vector<double> density_estimate(std::span<const double> sample, std::span<const double> grid,
                                     double bandwidth) {
    if (!(bandwidth > 0.0)) throw DomainError("density_estimate: bandwidth must be positive");
    if (sample.empty()) throw SizingError("density_estimate: empty sample");
    const double norm = 1.0 / (static_cast<double>(sample.size()) * bandwidth *
                               std::sqrt(2.0 * std::numbers::pi));
    std::vector<double> out(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
        double s = 0.0;
        for (double v : sample) {
            const double r = (grid[g] - v) / bandwidth;
            s += std::exp(-0.5 * r * r);
        }
        out[g] = s * norm;
    }
    return out;
}

double silverman_bandwidth(std::span<const double> sample) {
    if (sample.size() < 2) throw SizingError("silverman_bandwidth: need at least two draws");
    const double sd = mean_sd(sample).second;
    const double iqr = quantile(sample, 0.75) - quantile(sample, 0.25);
    double spread = sd;
    if (iqr > 0.0) spread = std::min(sd, iqr / 1.34);
    if (!(spread > 0.0)) spread = 1e-12;
    return 0.9 * spread * std::pow(static_cast<double>(sample.size()), -0.2);
}

Histogram histogram(std::span<const double> sample, std::size_t bins, double lower, double upper) {
    if (bins == 0) throw SizingError("histogram: need at least one bin");
    if (!(lower < upper)) throw DomainError("histogram: lower must be below upper");
    Histogram h;
    h.lower = lower;
    h.upper = upper;
    h.counts.assign(bins, 0);
    const double width = (upper - lower) / static_cast<double>(bins);
    for (double v : sample) {
        if (v < lower || v > upper) continue;
        auto b = static_cast<std::size_t>((v - lower) / width);
        if (b >= bins) b = bins - 1;
        ++h.counts[b];
    }
    h.density.resize(bins);
    const auto n = static_cast<double>(sample.size());
    for (std::size_t b = 0; b < bins; ++b) h.density[b] = static_cast<double>(h.counts[b]) / (n * width);
    return h;
}

}  // namespace fiegarch
