#pragma once

#include <numbers>

namespace wl1 {

inline constexpr double inv_sqrt_2pi = 0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2;

/// Standard Gaussian upper tail, Q(z) = P(Z > z).
///
/// Evaluated through erfc so the deep tail keeps full relative accuracy;
/// returns 1 and 0 for z = -inf and +inf respectively.
double q_function(double z);

/// Standard normal density.
double gauss_pdf(double z);

/// The zero-temperature single-site energy -(|a|-1)^2 / (2b) for |a| > 1,
/// and 0 otherwise. Throws std::domain_error for b <= 0.
double epsilon(double a, double b);

/// Upper partial moment E[(Z - u)_+] = gauss_pdf(u) - u * q_function(u) for
/// u >= 0, evaluated without the cancellation of the direct difference
/// (continued fraction of the Mills ratio for u >= 2).
double gauss_partial_moment(double u);

}  // namespace wl1
