#pragma once

// Test-only generators and brute-force oracles. Nothing here calls the
// solvers it is used to check.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "wl1/profile.hpp"

namespace wl1::oracle {

inline DensityProfile random_profile(std::mt19937_64& rng, std::size_t max_blocks = 5,
                                     double rho_lo = 0.01, double rho_hi = 0.99) {
    std::uniform_int_distribution<std::size_t> count(1, max_blocks);
    std::uniform_real_distribution<double> rho(rho_lo, rho_hi);
    std::uniform_real_distribution<double> share(0.1, 1.0);
    const std::size_t k = count(rng);
    std::vector<double> shares(k);
    double total = 0.0;
    for (auto& s : shares) {
        s = share(rng);
        total += s;
    }
    std::vector<DensityBlock> blocks(k);
    double used = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        blocks[i].rho = rho(rng);
        blocks[i].fraction = i + 1 == k ? 1.0 - used : shares[i] / total;
        used += blocks[i].fraction;
    }
    return DensityProfile(std::move(blocks));
}

inline WeightProfile random_weights(std::mt19937_64& rng, std::size_t k) {
    std::lognormal_distribution<double> w(0.0, 0.7);
    std::vector<double> out(k);
    for (auto& v : out) {
        v = w(rng);
    }
    return WeightProfile(std::move(out));
}

/// Gaussian upper tail by adaptive Gauss-Kronrod quadrature of the density
/// on [z, z + 40].
inline double q_by_quadrature(double z) {
    const auto pdf = [](double t) {
        return std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::numbers::pi);
    };
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(pdf, z, z + 40.0, 15,
                                                                         1e-15);
}

/// Sign changes of the optimality residual on a grid; returns the secant
/// estimate inside the first bracket (or NaN).
struct ScanResult {
    int sign_changes = 0;
    double root = std::numeric_limits<double>::quiet_NaN();
};

inline double optimality_residual(double rho, double u) {
    const double q = 0.5 * std::erfc(u / std::numbers::sqrt2);
    const double pdf = std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi);
    return u * (rho / (1.0 - rho) + 2.0 * q) - 2.0 * pdf;
}

template <class Node>
ScanResult scan_grid(double rho, long points, Node node) {
    ScanResult result;
    double prev_u = node(1);
    double prev = optimality_residual(rho, prev_u);
    for (long i = 2; i <= points; ++i) {
        const double u = node(i);
        const double cur = optimality_residual(rho, u);
        if ((prev < 0.0) != (cur < 0.0)) {
            if (result.sign_changes++ == 0) {
                result.root = prev_u - prev * (u - prev_u) / (cur - prev);
            }
        }
        prev = cur;
        prev_u = u;
    }
    return result;
}

/// Uniform grid step, 2 step, ..., u_max.
inline ScanResult scan_optimality(double rho, double step, double u_max) {
    return scan_grid(rho, static_cast<long>(u_max / step),
                     [step](long i) { return step * static_cast<double>(i); });
}

/// Geometric grid of `points` nodes from u_min to u_max.
inline ScanResult scan_optimality_log(double rho, double u_min, double u_max, long points) {
    const double ratio = std::log(u_max / u_min) / static_cast<double>(points - 1);
    return scan_grid(rho, points,
                     [=](long i) { return u_min * std::exp(ratio * static_cast<double>(i - 1)); });
}

/// Exhaustive minimum of sum w|x| over A x = y by enumerating supports of
/// size <= rows whose square or tall subsystem is exactly consistent.
struct BruteForceL1 {
    double objective = std::numeric_limits<double>::infinity();
    Eigen::VectorXd x;
};

inline BruteForceL1 brute_force_wl1(const Eigen::MatrixXd& a, const Eigen::VectorXd& y,
                                    const std::vector<double>& w) {
    const auto m = a.rows();
    const auto n = a.cols();
    BruteForceL1 best;
    best.x = Eigen::VectorXd::Zero(n);
    if (y.norm() == 0.0) {
        best.objective = 0.0;
        return best;
    }
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        const int size = std::popcount(mask);
        if (size > m) {
            continue;
        }
        std::vector<Eigen::Index> cols;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (mask & (1u << j)) {
                cols.push_back(j);
            }
        }
        Eigen::MatrixXd sub(m, size);
        for (int k = 0; k < size; ++k) {
            sub.col(k) = a.col(cols[static_cast<std::size_t>(k)]);
        }
        const Eigen::VectorXd xs = sub.colPivHouseholderQr().solve(y);
        if ((sub * xs - y).norm() > 1e-9 * (1.0 + y.norm())) {
            continue;
        }
        double obj = 0.0;
        for (int k = 0; k < size; ++k) {
            obj += w[static_cast<std::size_t>(cols[static_cast<std::size_t>(k)])] * std::fabs(xs[k]);
        }
        if (obj < best.objective) {
            best.objective = obj;
            best.x.setZero();
            for (int k = 0; k < size; ++k) {
                best.x[cols[static_cast<std::size_t>(k)]] = xs[k];
            }
        }
    }
    return best;
}

/// Minimum of c.x over {A x = b, x >= 0} by enumerating every basis.
inline double vertex_enumeration_min(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                     const Eigen::VectorXd& c) {
    const auto m = a.rows();
    const auto n = a.cols();
    double best = std::numeric_limits<double>::infinity();
    std::vector<bool> pick(static_cast<std::size_t>(n), false);
    std::fill(pick.begin(), pick.begin() + m, true);
    do {
        Eigen::MatrixXd basis(m, m);
        std::vector<Eigen::Index> cols;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (pick[static_cast<std::size_t>(j)]) {
                basis.col(static_cast<Eigen::Index>(cols.size())) = a.col(j);
                cols.push_back(j);
            }
        }
        const Eigen::FullPivLU<Eigen::MatrixXd> lu(basis);
        if (lu.rank() < m) {
            continue;
        }
        const Eigen::VectorXd xb = lu.solve(b);
        if (xb.minCoeff() < -1e-12) {
            continue;
        }
        double obj = 0.0;
        for (Eigen::Index k = 0; k < m; ++k) {
            obj += c[cols[static_cast<std::size_t>(k)]] * xb[k];
        }
        best = std::min(best, obj);
    } while (std::prev_permutation(pick.begin(), pick.end()));
    return best;
}

}  // namespace wl1::oracle
