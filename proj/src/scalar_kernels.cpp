#include "wl1/scalar_kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace wl1 {

double q_function(double z) {
    if (std::isinf(z)) {
        return z > 0 ? 0.0 : 1.0;
    }
    return 0.5 * std::erfc(z * std::numbers::sqrt2 * 0.5);
}

double gauss_pdf(double z) {
    if (std::isinf(z)) {
        return 0.0;
    }
    return inv_sqrt_2pi * std::exp(-0.5 * z * z);
}

double epsilon(double a, double b) {
    if (!(b > 0.0)) {
        throw std::domain_error("epsilon: b must be positive");
    }
    const double excess = std::fabs(a) - 1.0;
    if (excess <= 0.0) {
        return 0.0;
    }
    return -excess * excess / (2.0 * b);
}

double gauss_partial_moment(double u) {
    if (std::isinf(u)) {
        return 0.0;
    }
    if (u < 2.0) {
        return gauss_pdf(u) - u * q_function(u);
    }
    // Q(u) = pdf(u) / (u + r) with r = 1/(u + 2/(u + 3/(u + ...))), so
    // pdf(u) - u Q(u) = pdf(u) * r / (u + r).
    double tail = 0.0;
    for (int k = 120; k >= 2; --k) {
        tail = k / (u + tail);
    }
    const double r = 1.0 / (u + tail);
    return gauss_pdf(u) * r / (u + r);
}

}  // namespace wl1
