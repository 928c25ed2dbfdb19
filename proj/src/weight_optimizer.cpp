#include "wl1/weight_optimizer.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <boost/math/tools/toms748_solve.hpp>

#include "wl1/errors.hpp"
#include "wl1/scalar_kernels.hpp"

namespace wl1 {
namespace {

constexpr double u_lo = 1e-10;
constexpr double u_hi = 40.0;

void require_density(double rho) {
    if (!(rho >= 0.0 && rho <= 1.0)) {
        throw std::invalid_argument("density outside [0,1]: " + std::to_string(rho));
    }
}

template <class F>
double bracketed_root(F f, double lo, double hi, double f_lo, double f_hi) {
    if (f_lo == 0.0) {
        return lo;
    }
    if (f_hi == 0.0) {
        return hi;
    }
    std::uintmax_t max_iter = 300;
    const auto [a, b] = boost::math::tools::toms748_solve(
        f, lo, hi, f_lo, f_hi, boost::math::tools::eps_tolerance<double>(), max_iter);
    return std::fabs(f(a)) <= std::fabs(f(b)) ? a : b;
}

}  // namespace

double solve_optimal_u(double rho) {
    require_density(rho);
    if (rho == 0.0) {
        return infinite_u;
    }
    if (rho == 1.0) {
        return 0.0;
    }
    const double odds = rho / (1.0 - rho);
    // Strictly increasing in u (derivative odds + 2Q(u)), negative at 0.
    const auto residual = [odds](double u) {
        return u * (odds + 2.0 * q_function(u)) - 2.0 * gauss_pdf(u);
    };
    double lo = u_lo;
    double f_lo = residual(lo);
    while (f_lo > 0.0 && lo > std::numeric_limits<double>::min()) {
        lo *= 1e-10;
        f_lo = residual(lo);
    }
    double hi = u_hi;
    double f_hi = residual(hi);
    if (f_lo > 0.0 || f_hi < 0.0) {
        throw NoRoot("optimality condition not bracketed for rho = " + std::to_string(rho));
    }
    return bracketed_root(residual, lo, hi, f_lo, f_hi);
}

double alpha_of_rho(double rho) {
    require_density(rho);
    if (rho == 0.0 || rho == 1.0) {
        return rho;
    }
    return rho + (1.0 - rho) * 2.0 * q_function(solve_optimal_u(rho));
}

std::pair<WeightProfile, OptimalWeightSolution> optimal_weights(const DensityProfile& profile) {
    OptimalWeightSolution solution;
    std::vector<double> weights;
    for (const auto& block : profile.blocks()) {
        const double u = solve_optimal_u(block.rho);
        const double alpha = block.rho == 0.0 || block.rho == 1.0
                                 ? block.rho
                                 : block.rho + (1.0 - block.rho) * 2.0 * q_function(u);
        solution.u_values.push_back(u);
        solution.alpha_per_block.push_back(alpha);
        solution.alpha_c_min += block.fraction * alpha;
        weights.push_back(block.rho == 0.0 ? WeightProfile::excluded : u);
    }
    return {WeightProfile(std::move(weights)), std::move(solution)};
}

double asymptotic_u(double rho) {
    if (!(rho > 0.0 && rho < 1.0)) {
        throw std::invalid_argument("asymptotic_u needs rho in (0,1)");
    }
    const double log_odds = std::log(rho) - std::log1p(-rho);
    const double log_prefactor = 0.5 * std::log(2.0 / std::numbers::pi);
    // Log of the right-hand side minus log odds; strictly decreasing in u.
    const auto residual = [=](double u) {
        return log_prefactor - 0.5 * u * u - 3.0 * std::log(u) - log_odds;
    };
    const double f_lo = residual(u_lo);
    const double f_hi = residual(u_hi);
    if (f_lo < 0.0 || f_hi > 0.0) {
        throw NoRoot("asymptotic weight form has no root in [1e-10, 40] for rho = " +
                     std::to_string(rho));
    }
    return bracketed_root(residual, u_lo, u_hi, f_lo, f_hi);
}

}  // namespace wl1
