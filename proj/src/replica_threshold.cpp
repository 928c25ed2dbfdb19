#include "wl1/replica_threshold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include <boost/math/tools/toms748_solve.hpp>

#include "wl1/errors.hpp"
#include "wl1/scalar_kernels.hpp"

namespace wl1 {
namespace {

constexpr double ln10 = std::numbers::ln10;
constexpr double initial_decades = 8.0;
constexpr double widen_decades = 4.0;
constexpr double max_decades = 150.0;
constexpr int points_per_decade = 8;

void require_positive(double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw std::invalid_argument(std::string(name) + " must be positive and finite");
    }
}

double g3_at_log(const DensityProfile& profile, const WeightProfile& weights, double log_q) {
    return g_functions(profile, weights, std::exp(log_q)).g3;
}

struct Root {
    double log_q;
    double g1;
    std::pair<double, double> bracket;
};

Root refine(const DensityProfile& profile, const WeightProfile& weights, double lo, double hi,
            double f_lo, double f_hi) {
    const auto f = [&](double log_q) { return g3_at_log(profile, weights, log_q); };
    double log_q = lo;
    if (f_hi == 0.0) {
        log_q = hi;
    } else {
        const auto tol = [](double a, double b) {
            return std::fabs(b - a) <= 1e-14 * std::max({1.0, std::fabs(a), std::fabs(b)});
        };
        std::uintmax_t max_iter = 200;
        const auto [a, b] =
            boost::math::tools::toms748_solve(f, lo, hi, f_lo, f_hi, tol, max_iter);
        log_q = std::fabs(f(a)) <= std::fabs(f(b)) ? a : b;
    }
    const double q_hat = std::exp(log_q);
    return {log_q, g_functions(profile, weights, q_hat).g1, {std::exp(lo), std::exp(hi)}};
}

}  // namespace

GValues g_functions(const DensityProfile& profile, const WeightProfile& weights, double q_hat) {
    require_positive(q_hat, "q_hat");
    validate_pairing(profile, weights);

    const double scale = 1.0 / std::sqrt(q_hat);
    double g1 = 0.0;
    double g2 = 0.0;
    double g3 = 0.0;
    for (std::size_t k = 0; k < profile.size(); ++k) {
        const auto [rho, fraction] = profile[k];
        if (rho == 0.0) {
            continue;
        }
        if (rho == 1.0) {
            g1 += fraction;
            g2 += fraction;
            continue;
        }
        const double u = weights[k] * scale;
        const double two_q = 2.0 * q_function(u);
        const double u2 = u * u;
        g1 += fraction * (rho + (1.0 - rho) * two_q);
        g2 += fraction * (rho + rho * u2 - (1.0 - rho) * u * 2.0 * gauss_pdf(u) +
                          (1.0 - rho) * (1.0 + u2) * two_q);
        g3 += fraction * (rho * u2 - (1.0 - rho) * 2.0 * u * gauss_partial_moment(u));
    }
    return {g1, g2, g3};
}

ThresholdResult threshold_solve(const DensityProfile& profile, const WeightProfile& weights) {
    validate_pairing(profile, weights);

    ThresholdResult result;
    if (profile.all_extremal()) {
        const double rho_bar = profile.mean_density();
        result.alpha_c = rho_bar;
        result.g1 = rho_bar;
        result.g2 = rho_bar;
        result.g3 = 0.0;
        result.stable = true;
        return result;
    }

    double decades = initial_decades;
    std::vector<Root> roots;
    while (true) {
        const int steps = static_cast<int>(2.0 * decades) * points_per_decade;
        const double lo = -decades * ln10;
        const double hi = decades * ln10;
        const double h = (hi - lo) / steps;

        double x_prev = lo;
        double f_prev = g3_at_log(profile, weights, x_prev);
        for (int i = 1; i <= steps; ++i) {
            const double x = lo + i * h;
            const double f = g3_at_log(profile, weights, x);
            if (f == 0.0 || f_prev * f < 0.0) {
                roots.push_back(refine(profile, weights, x_prev, x, f_prev, f));
            }
            x_prev = x;
            f_prev = f;
        }
        if (!roots.empty()) {
            break;
        }
        if (decades >= max_decades) {
            throw NoSignChange("g3 has no sign change for q_hat in [1e-" +
                                   std::to_string(static_cast<int>(decades)) + ", 1e" +
                                   std::to_string(static_cast<int>(decades)) + "]",
                               std::exp(lo), std::exp(hi));
        }
        decades = std::min(max_decades, decades + widen_decades);
    }

    const auto best = std::max_element(roots.begin(), roots.end(),
                                       [](const Root& a, const Root& b) { return a.g1 < b.g1; });
    const double q_hat = std::exp(best->log_q);
    const GValues g = g_functions(profile, weights, q_hat);
    result.q_hat = q_hat;
    result.alpha_c = g.g1;
    result.g1 = g.g1;
    result.g2 = g.g2;
    result.g3 = g.g3;
    result.bracket = best->bracket;
    for (const auto& r : roots) {
        result.all_brackets.push_back(r.bracket);
    }
    result.stable = g.g1 >= 1.0 || stability_margins(profile, weights, q_hat, 1.0).stable;
    return result;
}

CurvePoint uniform_curve_point(double q_hat) {
    require_positive(q_hat, "q_hat");
    const double u = 1.0 / std::sqrt(q_hat);

    // rho/(1-rho) = sqrt(2 q/pi) e^{-1/(2q)} - 2Q(1/sqrt q) = (2/u)(pdf(u) - u Q(u))
    const double odds = 2.0 * gauss_partial_moment(u) / u;
    const double rho_bar = std::isinf(odds) ? 1.0 : odds / (1.0 + odds);

    // 1/alpha = 1 + sqrt(pi/(2q)) e^{1/(2q)} (1 - 2Q(1/sqrt q))
    const double pdf = gauss_pdf(u);
    const double excess = u * std::erf(u * std::numbers::sqrt2 * 0.5) / (2.0 * pdf);
    const double alpha_c = (pdf == 0.0 || std::isinf(excess)) ? 0.0 : 1.0 / (1.0 + excess);
    return {rho_bar, alpha_c};
}

StabilityMargins stability_margins(const DensityProfile& profile, const WeightProfile& weights,
                                   double q_hat, double alpha) {
    require_positive(q_hat, "q_hat");
    require_positive(alpha, "alpha");
    const GValues g = g_functions(profile, weights, q_hat);
    const double mu1 = g.g1 / alpha;
    const double mu2 = alpha * g.g2 / (g.g1 * g.g1);
    return {mu1, mu2, mu1 < 1.0};
}

}  // namespace wl1
