#pragma once

#include <Eigen/Core>
#include <cstddef>

namespace fiegarch::detail {

// Vectorized inner product of two contiguous ranges of length n.
inline double dot(const double* a, const double* b, std::size_t n) {
    if (n == 0) return 0.0;
    using Vec = Eigen::Map<const Eigen::VectorXd>;
    return Vec(a, static_cast<Eigen::Index>(n)).dot(Vec(b, static_cast<Eigen::Index>(n)));
}

}  // namespace fiegarch::detail
