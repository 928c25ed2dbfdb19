#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wl1/profile.hpp"

namespace wl1::cli {

/// Exit codes shared by every command.
enum ExitCode : int {
    ok = 0,
    input_error = 2,
    numerical_failure = 3,
    experiment_abort = 4,
};

struct ProfileFile {
    DensityProfile profile;
    std::optional<WeightProfile> weights;
};

/// Parses {"blocks": [{"rho": r, "fraction": f, "weight": w?}, ...]}.
/// Weights must be given on all blocks or none; a null weight marks an
/// excluded rho = 0 block. Throws std::invalid_argument on bad input.
ProfileFile parse_profile_json(const std::string& text);
ProfileFile load_profile_file(const std::string& path);

enum class WeightMode { uniform, optimal, from_file };

int cmd_threshold(const std::string& profile_path, WeightMode mode, std::ostream& out,
                  std::ostream& err);

int cmd_curve(double rho_min, double rho_max, int steps, std::ostream& out, std::ostream& err);

int cmd_two_block_sweep(double rho_bar_min, double rho_bar_max, int steps, double delta_rho,
                        const std::vector<double>& delta_w, std::ostream& out, std::ostream& err);

struct McArgs {
    std::vector<std::size_t> sizes;
    std::size_t trials = 1;
    std::string profile_path;
    bool weighted = false;
    std::uint64_t seed = 0;
    std::string out_path;
    unsigned threads = 0;
    /// LP pivot cap per solve; 0 keeps the solver default.
    std::size_t lp_max_iterations = 0;
};

int cmd_mc(const McArgs& args, std::ostream& out, std::ostream& err);

int cmd_extrapolate(const std::string& in_path, std::ostream& out, std::ostream& err);

/// Full command-line entry point; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wl1::cli
