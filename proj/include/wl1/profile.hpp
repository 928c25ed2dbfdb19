#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace wl1 {

struct DensityBlock {
    double rho;
    double fraction;
};

/// Mixture of (density, population share) blocks describing the marginal
/// sparsity pattern of a source. Fractions must sum to one.
class DensityProfile {
public:
    DensityProfile() = default;
    explicit DensityProfile(std::vector<DensityBlock> blocks, double fraction_tol = 1e-12);

    static DensityProfile single(double rho) { return DensityProfile({{rho, 1.0}}); }

    std::span<const DensityBlock> blocks() const { return blocks_; }
    std::size_t size() const { return blocks_.size(); }
    const DensityBlock& operator[](std::size_t k) const { return blocks_[k]; }

    double mean_density() const;

    /// True when every block has rho equal to 0 or 1.
    bool all_extremal() const;

private:
    std::vector<DensityBlock> blocks_;
};

/// Per-block weights. A rho = 0 block may be marked excluded (weight +inf),
/// which is the exact infinite-weight limit; a rho = 1 block may carry 0.
class WeightProfile {
public:
    static constexpr double excluded = std::numeric_limits<double>::infinity();

    WeightProfile() = default;
    explicit WeightProfile(std::vector<double> weights) : weights_(std::move(weights)) {}

    static WeightProfile uniform(std::size_t blocks, double value = 1.0) {
        return WeightProfile(std::vector<double>(blocks, value));
    }

    std::span<const double> values() const { return weights_; }
    std::size_t size() const { return weights_.size(); }
    double operator[](std::size_t k) const { return weights_[k]; }

    static bool is_excluded(double w) { return w == excluded; }

    /// Multiplies every finite weight by `factor` (> 0).
    WeightProfile scaled(double factor) const;

    /// Rescales so the mean of the finite weights is one. For two blocks this
    /// is the w+ + w- = 2 normalization.
    WeightProfile normalized() const;

private:
    std::vector<double> weights_;
};

/// Throws std::invalid_argument unless `weights` pairs with `profile`:
/// same length, finite positive weights on interior blocks, the excluded
/// sentinel only on rho = 0 blocks and zero weight only on rho = 1 blocks.
void validate_pairing(const DensityProfile& profile, const WeightProfile& weights);

}  // namespace wl1
