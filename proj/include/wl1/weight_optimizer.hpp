#pragma once

#include <limits>
#include <utility>
#include <vector>

#include "wl1/profile.hpp"

namespace wl1 {

/// Marks a rho = 0 component whose optimal rescaled weight is infinite.
inline constexpr double infinite_u = std::numeric_limits<double>::infinity();

struct OptimalWeightSolution {
    std::vector<double> u_values;
    std::vector<double> alpha_per_block;
    double alpha_c_min = 0.0;
};

/// Optimal rescaled weight u for a component of density rho: the root of
///   u (rho/(1-rho) + 2Q(u)) = 2 pdf(u),
/// i.e. the stationarity condition with the multiplier fixed at 1.
/// Returns infinite_u for rho = 0 and 0 for rho = 1.
double solve_optimal_u(double rho);

/// Componentwise threshold rho + (1-rho) 2Q(u(rho)). This is also the
/// uniform-weight threshold of a single-density source.
double alpha_of_rho(double rho);

/// Weights w = u(rho) per block (excluded for rho = 0) and the minimal
/// threshold, the fraction-weighted mean of alpha_of_rho.
std::pair<WeightProfile, OptimalWeightSolution> optimal_weights(const DensityProfile& profile);

/// Large-u approximation: the u solving
///   rho/(1-rho) = sqrt(2/pi) e^{-u^2/2} / u^3.
/// Accurate to a few percent only when rho is small (u large); throws NoRoot
/// if the root leaves the bracket [1e-10, 40].
double asymptotic_u(double rho);

}  // namespace wl1
