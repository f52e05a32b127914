#include "fiegarch/truncated_normal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fiegarch/errors.hpp"
#include "fiegarch/special_math.hpp"

namespace fiegarch {

namespace {

// Standard normal restricted to [lo, hi] with 0 < lo < hi (far upper tail),
// by Robert's translated-exponential rejection.
double upper_tail_sample(double lo, double hi, Rng& rng) {
    const double rate = 0.5 * (lo + std::sqrt(lo * lo + 4.0));
    for (;;) {
        const double z = lo - std::log(uniform01(rng)) / rate;
        if (z > hi) continue;
        const double r = z - rate;
        if (uniform01(rng) <= std::exp(-0.5 * r * r)) return z;
    }
}

// Standard normal restricted to [lo, hi] with lo <= 0 or with the interval
// in the lower half line (hi <= 0).
double standard_interval_sample(double lo, double hi, Rng& rng) {
    const double plo = normal_cdf(lo);
    const double phi = normal_cdf(hi);
    const double mass = phi - plo;
    if (!(mass > 0.0) || !std::isfinite(mass)) {
        // hi <= 0 here, so the interval is deep in the lower tail.
        return -upper_tail_sample(-hi, -lo, rng);
    }
    const double z = normal_quantile(plo + uniform01(rng) * mass);
    return std::clamp(z, lo, hi);
}

}  // namespace

void KernelSlot::validate() const {
    if (!(sd > 0.0) || !std::isfinite(sd)) throw DomainError("kernel: sd must be positive");
    if (!(lower < upper)) throw DomainError("kernel: lower limit must be below upper limit");
}

double truncated_normal_sample(double mean, const KernelSlot& slot, Rng& rng) {
    double lo = (slot.lower - mean) / slot.sd;
    double hi = (slot.upper - mean) / slot.sd;
    // Reflect so that the interval never lies entirely in the upper tail,
    // where CDF values near one lose precision.
    const bool flip = lo > 0.0;
    if (flip) {
        std::swap(lo, hi);
        lo = -lo;
        hi = -hi;
    }
    double z = standard_interval_sample(lo, hi, rng);
    if (flip) z = -z;
    return std::clamp(mean + slot.sd * z, slot.lower, slot.upper);
}

double truncated_normal_log_mass(double mean, const KernelSlot& slot) {
    const double lo = (slot.lower - mean) / slot.sd;
    const double hi = (slot.upper - mean) / slot.sd;
    if (hi <= 0.0) return std::log(normal_cdf(hi) - normal_cdf(lo));
    if (lo >= 0.0) return std::log(normal_cdf(-lo) - normal_cdf(-hi));
    return std::log1p(-(normal_cdf(lo) + normal_cdf(-hi)));
}

double truncated_normal_log_density(double x, double mean, const KernelSlot& slot) {
    if (!(x >= slot.lower && x <= slot.upper)) return -std::numeric_limits<double>::infinity();
    const double r = (x - mean) / slot.sd;
    return -0.5 * r * r - std::log(slot.sd) - 0.5 * std::log(2.0 * std::numbers::pi) -
           truncated_normal_log_mass(mean, slot);
}

}  // namespace fiegarch
