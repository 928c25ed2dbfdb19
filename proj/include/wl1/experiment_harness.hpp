#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <span>
#include <vector>

#include "wl1/lp_core.hpp"
#include "wl1/profile.hpp"

namespace wl1 {

/// Block index of every source component.
struct BlockLayout {
    std::vector<std::size_t> block_of;
};

/// Blocks laid out contiguously in profile order, block k taking
/// fraction_k * n components. Throws std::invalid_argument unless every
/// fraction_k * n is an integer.
BlockLayout contiguous_layout(std::size_t n, const DensityProfile& profile);

struct ProblemInstance {
    std::size_t n = 0;
    std::size_t m_max = 0;
    DenseMatrix a_full;
    Vector x0;
    std::vector<double> densities;
    /// Optimal weights per component, mean-one over the finite block weights;
    /// rho = 0 components carry WeightProfile::excluded.
    std::vector<double> weights;
    std::uint64_t seed = 0;

    std::size_t nonzeros() const;
};

/// Bernoulli(rho_i) support with standard normal values, and an n x n
/// standard normal matrix whose leading m rows form the size-m measurement.
/// Fully determined by the seed.
ProblemInstance generate_instance(std::size_t n, const DensityProfile& profile,
                                  const BlockLayout& layout, std::uint64_t seed);

inline constexpr double recovery_tolerance = 1e-6;

/// Solves the weighted (or uniform) problem on the first m rows and checks
/// ||x - x0||_2 <= 1e-6 max(1, ||x0||_2). Throws TrialError if the LP does
/// not reach optimality.
bool recovery_success(const ProblemInstance& instance, std::size_t m, bool weighted,
                      const LpOptions& options = {});

struct TrialRecord {
    std::size_t n = 0;
    std::size_t m_star = 0;
    double alpha_star = 0.0;
    std::uint64_t seed = 0;
    bool weighted = false;
};

/// Smallest m in [1, n] with recovery_success, by bisection on the nested
/// rows (success is monotone in m since x0 stays feasible and the feasible
/// set only shrinks).
TrialRecord instance_threshold(const ProblemInstance& instance, bool weighted,
                               const LpOptions& options = {});

struct SweepConfig {
    std::vector<std::size_t> sizes;
    std::size_t trials = 1;
    DensityProfile profile;
    bool weighted = false;
    std::uint64_t base_seed = 0;
    /// 0 selects std::thread::hardware_concurrency().
    unsigned threads = 0;
    LpOptions lp;
};

struct SweepRow {
    std::size_t n = 0;
    double mean_alpha = 0.0;
    double stderr_alpha = 0.0;
    /// Trials that produced a threshold.
    std::size_t trials = 0;
    std::size_t failures = 0;
};

/// Per size, runs `trials` instances with seeds base_seed ^ t and aggregates
/// the mean and standard error of alpha_star. Results do not depend on the
/// thread count. Throws ExperimentAborted when more than 1% of a size's
/// trials fail.
std::vector<SweepRow> threshold_sweep(const SweepConfig& config);

/// Per-trial thresholds of one size, in trial order (failed trials omitted).
std::vector<TrialRecord> run_trials(std::size_t n, const SweepConfig& config,
                                    std::size_t* failures = nullptr);

struct FitPoint {
    double n;
    double mean;
    double stderr_mean;
};

struct ExtrapolationFit {
    double a0 = 0.0;
    double a1 = 0.0;
    double a2 = 0.0;
    double se0 = 0.0;
    double se1 = 0.0;
    double se2 = 0.0;
    double chi2 = 0.0;
    std::size_t dof = 0;
};

/// Chi-square weighted least squares of mean against (1, 1/n, 1/n^2).
/// Throws SingularFit for fewer than four points or repeated sizes, and
/// std::invalid_argument for nonpositive standard errors.
ExtrapolationFit extrapolate(std::span<const FitPoint> points);

/// CSV with header n,trials,mean_alpha,stderr,weighted,seed; 10 significant
/// digits.
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows, bool weighted,
                     std::uint64_t seed);

/// Reads the (n, mean_alpha, stderr) columns of a sweep CSV. Throws
/// std::runtime_error on malformed input.
std::vector<FitPoint> read_sweep_csv(std::istream& in);

/// JSON object with keys a0,a1,a2,se0,se1,se2,chi2,dof.
std::string fit_to_json(const ExtrapolationFit& fit);

/// Rounds to 10 significant digits, the precision of all emitted numbers.
double round_sig10(double value);

}  // namespace wl1
