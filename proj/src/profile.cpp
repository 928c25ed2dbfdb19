#include "wl1/profile.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace wl1 {

DensityProfile::DensityProfile(std::vector<DensityBlock> blocks, double fraction_tol)
    : blocks_(std::move(blocks)) {
    if (blocks_.empty()) {
        throw std::invalid_argument("density profile needs at least one block");
    }
    double total = 0.0;
    for (const auto& b : blocks_) {
        if (!(b.rho >= 0.0 && b.rho <= 1.0)) {
            throw std::invalid_argument("block density outside [0,1]: " + std::to_string(b.rho));
        }
        if (!(b.fraction > 0.0 && b.fraction <= 1.0)) {
            throw std::invalid_argument("block fraction outside (0,1]: " +
                                        std::to_string(b.fraction));
        }
        total += b.fraction;
    }
    if (std::fabs(total - 1.0) > fraction_tol) {
        throw std::invalid_argument("block fractions sum to " + std::to_string(total) +
                                    ", expected 1");
    }
}

double DensityProfile::mean_density() const {
    double mean = 0.0;
    for (const auto& b : blocks_) {
        mean += b.fraction * b.rho;
    }
    return mean;
}

bool DensityProfile::all_extremal() const {
    for (const auto& b : blocks_) {
        if (b.rho != 0.0 && b.rho != 1.0) {
            return false;
        }
    }
    return true;
}

WeightProfile WeightProfile::scaled(double factor) const {
    if (!(factor > 0.0) || !std::isfinite(factor)) {
        throw std::invalid_argument("weight scale factor must be positive and finite");
    }
    std::vector<double> out(weights_);
    for (double& w : out) {
        if (!is_excluded(w)) {
            w *= factor;
        }
    }
    return WeightProfile(std::move(out));
}

WeightProfile WeightProfile::normalized() const {
    double sum = 0.0;
    std::size_t count = 0;
    for (double w : weights_) {
        if (!is_excluded(w)) {
            sum += w;
            ++count;
        }
    }
    if (count == 0 || !(sum > 0.0)) {
        return *this;
    }
    return scaled(static_cast<double>(count) / sum);
}

void validate_pairing(const DensityProfile& profile, const WeightProfile& weights) {
    if (profile.size() != weights.size()) {
        throw std::invalid_argument("weight profile has " + std::to_string(weights.size()) +
                                    " entries for " + std::to_string(profile.size()) +
                                    " density blocks");
    }
    for (std::size_t k = 0; k < profile.size(); ++k) {
        const double rho = profile[k].rho;
        const double w = weights[k];
        if (std::isnan(w)) {
            throw std::invalid_argument("weight is NaN");
        }
        if (WeightProfile::is_excluded(w)) {
            if (rho != 0.0) {
                throw std::invalid_argument("only rho = 0 blocks may be excluded");
            }
            continue;
        }
        if (w < 0.0) {
            throw std::invalid_argument("weights must be nonnegative");
        }
        if (w == 0.0 && rho != 1.0) {
            throw std::invalid_argument("zero weight is only permitted on rho = 1 blocks");
        }
    }
}

}  // namespace wl1
