#pragma once

#include <cmath>

namespace qfilter::detail {

// Numerically stable logistic function.
inline double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

}  // namespace qfilter::detail
