#include "wl1/cli_commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "wl1/errors.hpp"
#include "wl1/experiment_harness.hpp"
#include "wl1/replica_threshold.hpp"
#include "wl1/weight_optimizer.hpp"

namespace wl1::cli {
namespace {

using nlohmann::ordered_json;

std::string format10(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", value);
    return buf;
}

ordered_json number_or_null(double value) {
    if (!std::isfinite(value)) {
        return nullptr;
    }
    return round_sig10(value);
}

// Snaps densities that overshoot [0,1] by round-off from grid arithmetic.
double snap_unit(double rho) {
    if (rho < 0.0 && rho > -1e-12) {
        return 0.0;
    }
    if (rho > 1.0 && rho < 1.0 + 1e-12) {
        return 1.0;
    }
    return rho;
}

}  // namespace

ProfileFile parse_profile_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("profile is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("blocks") || !doc["blocks"].is_array()) {
        throw std::invalid_argument("profile needs a \"blocks\" array");
    }
    std::vector<DensityBlock> blocks;
    std::vector<double> weights;
    std::size_t with_weight = 0;
    for (const auto& entry : doc["blocks"]) {
        if (!entry.is_object() || !entry.contains("rho") || !entry.contains("fraction") ||
            !entry["rho"].is_number() || !entry["fraction"].is_number()) {
            throw std::invalid_argument("each block needs numeric \"rho\" and \"fraction\"");
        }
        blocks.push_back({entry["rho"].get<double>(), entry["fraction"].get<double>()});
        if (entry.contains("weight")) {
            const auto& w = entry["weight"];
            if (w.is_null()) {
                weights.push_back(WeightProfile::excluded);
            } else if (w.is_number()) {
                weights.push_back(w.get<double>());
            } else {
                throw std::invalid_argument("\"weight\" must be a number or null");
            }
            ++with_weight;
        }
    }
    if (with_weight != 0 && with_weight != blocks.size()) {
        throw std::invalid_argument("weights must be given for all blocks or none");
    }
    ProfileFile file{DensityProfile(std::move(blocks), 1e-9), std::nullopt};
    if (with_weight != 0) {
        WeightProfile wp(std::move(weights));
        validate_pairing(file.profile, wp);
        file.weights = std::move(wp);
    }
    return file;
}

ProfileFile load_profile_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot read profile file '" + path + "'");
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_profile_json(buffer.str());
}

int cmd_threshold(const std::string& profile_path, WeightMode mode, std::ostream& out,
                  std::ostream& err) {
    ProfileFile file;
    WeightProfile weights;
    try {
        file = load_profile_file(profile_path);
        switch (mode) {
            case WeightMode::uniform:
                weights = WeightProfile::uniform(file.profile.size());
                break;
            case WeightMode::optimal:
                weights = optimal_weights(file.profile).first;
                break;
            case WeightMode::from_file:
                if (!file.weights) {
                    throw std::invalid_argument("profile file carries no weights");
                }
                weights = *file.weights;
                break;
        }
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return input_error;
    }

    ThresholdResult result;
    try {
        result = threshold_solve(file.profile, weights);
    } catch (const NoSignChange& e) {
        err << "error: " << e.what() << '\n';
        return numerical_failure;
    }

    ordered_json j;
    j["alpha_c"] = round_sig10(result.alpha_c);
    j["q_hat"] = result.q_hat ? number_or_null(*result.q_hat) : ordered_json(nullptr);
    j["stable"] = result.stable;
    ordered_json used = ordered_json::array();
    for (double w : weights.values()) {
        used.push_back(number_or_null(w));
    }
    j["weights_used"] = std::move(used);
    out << j.dump() << '\n';
    return ok;
}

int cmd_curve(double rho_min, double rho_max, int steps, std::ostream& out, std::ostream& err) {
    if (!(rho_min >= 0.0 && rho_min < rho_max && rho_max <= 1.0) || steps < 2) {
        err << "error: need 0 <= rho_min < rho_max <= 1 and steps >= 2\n";
        return input_error;
    }
    out << "rho,alpha_unweighted,alpha_optimal\n";
    for (int k = 0; k < steps; ++k) {
        const double rho =
            k == steps - 1 ? rho_max : rho_min + (rho_max - rho_min) * k / (steps - 1);
        const auto unweighted =
            threshold_solve(DensityProfile::single(rho), WeightProfile::uniform(1));
        out << format10(rho) << ',' << format10(unweighted.alpha_c) << ','
            << format10(alpha_of_rho(rho)) << '\n';
    }
    return ok;
}

int cmd_two_block_sweep(double rho_bar_min, double rho_bar_max, int steps, double delta_rho,
                        const std::vector<double>& delta_w, std::ostream& out,
                        std::ostream& err) {
    if (!(rho_bar_min <= rho_bar_max) || steps < 1 || (steps == 1 && rho_bar_min != rho_bar_max) ||
        !(delta_rho >= 0.0) || delta_w.empty()) {
        err << "error: need rho_bar_min <= rho_bar_max, steps >= 1, delta_rho >= 0 and at "
               "least one delta_w\n";
        return input_error;
    }
    for (double dw : delta_w) {
        if (!(dw >= 0.0 && dw < 1.0)) {
            err << "error: delta_w must lie in [0, 1)\n";
            return input_error;
        }
    }
    std::vector<double> grid;
    for (int k = 0; k < steps; ++k) {
        grid.push_back(steps == 1 || k == steps - 1
                           ? rho_bar_max
                           : rho_bar_min + (rho_bar_max - rho_bar_min) * k / (steps - 1));
    }
    for (double rho_bar : grid) {
        const double hi = snap_unit(rho_bar + delta_rho);
        const double lo = snap_unit(rho_bar - delta_rho);
        if (!(lo >= 0.0 && hi <= 1.0)) {
            err << "error: block densities " << lo << ", " << hi << " leave [0, 1] at rho_bar "
                << rho_bar << '\n';
            return input_error;
        }
    }

    out << "rho_bar,delta_w,alpha_c\n";
    for (double rho_bar : grid) {
        const DensityProfile profile({{snap_unit(rho_bar + delta_rho), 0.5},
                                      {snap_unit(rho_bar - delta_rho), 0.5}});
        for (double dw : delta_w) {
            const WeightProfile weights({1.0 - dw, 1.0 + dw});
            try {
                const auto result = threshold_solve(profile, weights);
                out << format10(rho_bar) << ',' << format10(dw) << ','
                    << format10(result.alpha_c) << '\n';
            } catch (const NoSignChange& e) {
                err << "error: " << e.what() << '\n';
                return numerical_failure;
            }
        }
    }
    return ok;
}

int cmd_mc(const McArgs& args, std::ostream& out, std::ostream& err) {
    SweepConfig config;
    try {
        if (args.sizes.empty() || args.trials < 1) {
            throw std::invalid_argument("need at least one size and one trial");
        }
        config.profile = load_profile_file(args.profile_path).profile;
        for (auto n : args.sizes) {
            contiguous_layout(n, config.profile);
        }
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return input_error;
    }
    config.sizes = args.sizes;
    config.trials = args.trials;
    config.weighted = args.weighted;
    config.base_seed = args.seed;
    config.threads = args.threads;
    config.lp.max_iterations = args.lp_max_iterations;

    std::vector<SweepRow> rows;
    try {
        rows = threshold_sweep(config);
    } catch (const ExperimentAborted& e) {
        err << "error: " << e.what() << '\n';
        return experiment_abort;
    }

    std::ofstream file(args.out_path);
    if (!file) {
        err << "error: cannot write '" << args.out_path << "'\n";
        return input_error;
    }
    write_sweep_csv(file, rows, args.weighted, args.seed);
    for (const auto& row : rows) {
        out << "n=" << row.n << " trials=" << row.trials << " failures=" << row.failures
            << " mean_alpha=" << format10(row.mean_alpha)
            << " stderr=" << format10(row.stderr_alpha) << '\n';
    }
    return ok;
}

int cmd_extrapolate(const std::string& in_path, std::ostream& out, std::ostream& err) {
    std::vector<FitPoint> points;
    try {
        std::ifstream in(in_path);
        if (!in) {
            throw std::runtime_error("cannot read '" + in_path + "'");
        }
        points = read_sweep_csv(in);
    } catch (const std::runtime_error& e) {
        err << "error: " << e.what() << '\n';
        return input_error;
    }
    try {
        out << fit_to_json(extrapolate(points)) << '\n';
    } catch (const SingularFit& e) {
        err << "error: " << e.what() << '\n';
        return numerical_failure;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return input_error;
    }
    return ok;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Weighted l1 compression thresholds and recovery experiments", "wl1-cli"};
    app.require_subcommand(1);

    auto* threshold = app.add_subcommand("threshold", "Threshold for a density profile");
    std::string profile_path;
    std::string weight_mode = "uniform";
    threshold->add_option("--profile", profile_path, "Profile JSON file")->required();
    threshold->add_option("--weights", weight_mode, "uniform | optimal | from-file")
        ->check(CLI::IsMember({"uniform", "optimal", "from-file"}));

    auto* curve = app.add_subcommand("curve", "Single-density threshold curve as CSV");
    double rho_min = 0.0;
    double rho_max = 1.0;
    int steps = 101;
    curve->add_option("--rho-min", rho_min);
    curve->add_option("--rho-max", rho_max);
    curve->add_option("--steps", steps);

    auto* sweep = app.add_subcommand("two-block-sweep", "Two-block thresholds over rho_bar and delta_w");
    double rb_min = 0.3;
    double rb_max = 0.7;
    int rb_steps = 41;
    double delta_rho = 0.3;
    std::vector<double> delta_w{0.0};
    sweep->add_option("--rho-bar-min", rb_min);
    sweep->add_option("--rho-bar-max", rb_max);
    sweep->add_option("--steps", rb_steps);
    sweep->add_option("--delta-rho", delta_rho);
    sweep->add_option("--delta-w", delta_w, "One or more weight asymmetries")->delimiter(',');

    auto* mc = app.add_subcommand("mc", "Monte Carlo recovery thresholds, written as CSV");
    McArgs mc_args;
    std::string mc_weighting = "uniform";
    mc->add_option("--n", mc_args.sizes, "System sizes")->required()->delimiter(',');
    mc->add_option("--trials", mc_args.trials)->required();
    mc->add_option("--profile", mc_args.profile_path)->required();
    mc->add_option("--weighting", mc_weighting, "uniform | optimal")
        ->check(CLI::IsMember({"uniform", "optimal"}));
    mc->add_option("--seed", mc_args.seed)->required();
    mc->add_option("--out", mc_args.out_path)->required();
    mc->add_option("--threads", mc_args.threads, "Worker threads (0 = all cores)");
    mc->add_option("--lp-max-iterations", mc_args.lp_max_iterations,
                   "Pivot cap per LP solve (0 = 50 * (rows + columns))");

    auto* extra = app.add_subcommand("extrapolate", "Quadratic-in-1/N fit of a sweep CSV");
    std::string in_path;
    extra->add_option("--in", in_path)->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? ok : input_error;
    }

    if (threshold->parsed()) {
        const WeightMode mode = weight_mode == "optimal"     ? WeightMode::optimal
                                : weight_mode == "from-file" ? WeightMode::from_file
                                                             : WeightMode::uniform;
        return cmd_threshold(profile_path, mode, out, err);
    }
    if (curve->parsed()) {
        return cmd_curve(rho_min, rho_max, steps, out, err);
    }
    if (sweep->parsed()) {
        return cmd_two_block_sweep(rb_min, rb_max, rb_steps, delta_rho, delta_w, out, err);
    }
    if (mc->parsed()) {
        mc_args.weighted = mc_weighting == "optimal";
        return cmd_mc(mc_args, out, err);
    }
    return cmd_extrapolate(in_path, out, err);
}

}  // namespace wl1::cli
