#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "wl1/profile.hpp"

namespace wl1 {

struct GValues {
    double g1;
    double g2;
    double g3;
};

/// Saddle-point functions at a given Q-hat, averaged over the profile blocks
/// with rescaled weights u = w / sqrt(q_hat).
///
/// Extremal blocks take their closed-form limits: rho = 0 behaves as u = inf
/// and rho = 1 as u = 0, whatever weight they carry. g3 is computed in its
/// reduced form rather than as g2 - g1, so it stays accurate near the root.
GValues g_functions(const DensityProfile& profile, const WeightProfile& weights, double q_hat);

struct ThresholdResult {
    /// Empty when every block is extremal (no order parameter to solve for).
    std::optional<double> q_hat;
    double alpha_c = 0.0;
    double g1 = 0.0;
    double g2 = 0.0;
    double g3 = 0.0;
    bool stable = false;
    /// Bracket of the reported root, in Q-hat.
    std::pair<double, double> bracket{0.0, 0.0};
    /// Every sign-change bracket found by the scan.
    std::vector<std::pair<double, double>> all_brackets;
};

/// Solves g3(Q-hat) = 0 and returns alpha_c = g1 at the root.
///
/// The scan runs over log(Q-hat), starting at [1e-8, 1e8] and widening by
/// four decades per side until a sign change appears; throws NoSignChange
/// if none does up to [1e-150, 1e150]. With several roots the one with the
/// largest g1 is reported.
ThresholdResult threshold_solve(const DensityProfile& profile, const WeightProfile& weights);

struct CurvePoint {
    double rho_bar;
    double alpha_c;
};

/// Parametric point of the uniform-weight threshold curve at a given Q-hat.
CurvePoint uniform_curve_point(double q_hat);

struct StabilityMargins {
    double mu1;
    double mu2;
    bool stable;
};

/// Linearized multipliers of the two leading-order iterations around the
/// perfect-reconstruction fixed point: mu1 = g1/alpha for the 1/m-hat
/// recursion, mu2 = alpha*g2/g1^2 for the Q-hat recursion. Stability is
/// alpha > g1, i.e. mu1 < 1.
StabilityMargins stability_margins(const DensityProfile& profile, const WeightProfile& weights,
                                   double q_hat, double alpha);

}  // namespace wl1
