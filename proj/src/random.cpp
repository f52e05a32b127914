#include "fiegarch/random.hpp"

#include <cmath>

#include "fiegarch/errors.hpp"

namespace fiegarch {

double standard_normal(Rng& rng) {
    for (;;) {
        const double u = 2.0 * uniform01(rng) - 1.0;
        const double v = 2.0 * uniform01(rng) - 1.0;
        const double s = u * u + v * v;
        if (s > 0.0 && s < 1.0) {
            return u * std::sqrt(-2.0 * std::log(s) / s);
        }
    }
}

double gamma_variate(double shape, Rng& rng) {
    if (!(shape > 0.0) || !std::isfinite(shape)) {
        throw DomainError("gamma_variate: shape must be positive and finite");
    }
    if (shape < 1.0) {
        const double boosted = gamma_variate(shape + 1.0, rng);
        return boosted * std::pow(uniform01(rng), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = 0.0;
        double v = 0.0;
        do {
            x = standard_normal(rng);
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform01(rng);
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) {
            return d * v;
        }
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
            return d * v;
        }
    }
}

}  // namespace fiegarch
