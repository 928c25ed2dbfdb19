#include "wl1/experiment_harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <istream>
#include <mutex>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>

#include <json.hpp>

#include "wl1/errors.hpp"
#include "wl1/weight_optimizer.hpp"

namespace wl1 {

BlockLayout contiguous_layout(std::size_t n, const DensityProfile& profile) {
    if (n == 0) {
        throw std::invalid_argument("instance size must be positive");
    }
    BlockLayout layout;
    layout.block_of.reserve(n);
    for (std::size_t k = 0; k < profile.size(); ++k) {
        const double share = profile[k].fraction * static_cast<double>(n);
        const double count = std::round(share);
        if (std::fabs(share - count) > 1e-9) {
            throw std::invalid_argument("size " + std::to_string(n) +
                                        " does not split into whole blocks");
        }
        layout.block_of.insert(layout.block_of.end(), static_cast<std::size_t>(count), k);
    }
    if (layout.block_of.size() != n) {
        throw std::invalid_argument("block sizes do not add up to " + std::to_string(n));
    }
    return layout;
}

std::size_t ProblemInstance::nonzeros() const {
    return static_cast<std::size_t>((x0.array() != 0.0).count());
}

ProblemInstance generate_instance(std::size_t n, const DensityProfile& profile,
                                  const BlockLayout& layout, std::uint64_t seed) {
    if (layout.block_of.size() != n) {
        throw std::invalid_argument("layout length does not match n");
    }
    for (auto k : layout.block_of) {
        if (k >= profile.size()) {
            throw std::invalid_argument("layout references a missing block");
        }
    }

    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const auto block_weights = optimal_weights(profile).first.normalized();

    ProblemInstance inst;
    inst.n = n;
    inst.m_max = n;
    inst.seed = seed;
    inst.x0 = Vector::Zero(static_cast<Eigen::Index>(n));
    inst.densities.resize(n);
    inst.weights.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t k = layout.block_of[i];
        const double rho = profile[k].rho;
        inst.densities[i] = rho;
        inst.weights[i] = block_weights[k];
        if (unit(rng) < rho) {
            double value = 0.0;
            while (value == 0.0) {
                value = normal(rng);
            }
            inst.x0[static_cast<Eigen::Index>(i)] = value;
        }
    }
    inst.a_full.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (Eigen::Index r = 0; r < inst.a_full.rows(); ++r) {
        for (Eigen::Index c = 0; c < inst.a_full.cols(); ++c) {
            inst.a_full(r, c) = normal(rng);
        }
    }
    return inst;
}

bool recovery_success(const ProblemInstance& instance, std::size_t m, bool weighted,
                      const LpOptions& options) {
    if (m < 1 || m > instance.m_max) {
        throw std::invalid_argument("measurement count outside [1, m_max]");
    }
    const auto rows = static_cast<Eigen::Index>(m);
    const DenseMatrix a = instance.a_full.topRows(rows);
    const Vector y = a * instance.x0;

    std::vector<double> uniform;
    std::span<const double> weights = instance.weights;
    if (!weighted) {
        uniform.assign(instance.n, 1.0);
        weights = uniform;
    }
    const LpSolution sol = wl1_minimize(a, y, weights, {}, options);
    if (sol.status != LpStatus::Optimal) {
        throw TrialError("LP returned " + std::string(to_string(sol.status)) + " (n = " +
                         std::to_string(instance.n) + ", m = " + std::to_string(m) +
                         ", seed = " + std::to_string(instance.seed) + ")");
    }
    const double err = (sol.x - instance.x0).norm();
    return err <= recovery_tolerance * std::max(1.0, instance.x0.norm());
}

TrialRecord instance_threshold(const ProblemInstance& instance, bool weighted,
                               const LpOptions& options) {
    // Invariant: failure at lo (m = 0 counts as failure), success at hi.
    std::size_t lo = 0;
    std::size_t hi = instance.n;
    while (hi - lo > 1) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (recovery_success(instance, mid, weighted, options)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    TrialRecord rec;
    rec.n = instance.n;
    rec.m_star = hi;
    rec.alpha_star = static_cast<double>(hi) / static_cast<double>(instance.n);
    rec.seed = instance.seed;
    rec.weighted = weighted;
    return rec;
}

std::vector<TrialRecord> run_trials(std::size_t n, const SweepConfig& config,
                                    std::size_t* failures) {
    const BlockLayout layout = contiguous_layout(n, config.profile);
    const std::size_t trials = config.trials;
    std::vector<std::optional<TrialRecord>> slots(trials);

    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t t = next++; t < trials; t = next++) {
            const std::uint64_t seed = config.base_seed ^ static_cast<std::uint64_t>(t);
            try {
                const auto inst = generate_instance(n, config.profile, layout, seed);
                slots[t] = instance_threshold(inst, config.weighted, config.lp);
            } catch (const TrialError&) {
                slots[t].reset();
            }
        }
    };
    unsigned threads = config.threads != 0 ? config.threads : std::thread::hardware_concurrency();
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(trials)));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < threads; ++i) {
            pool.emplace_back(worker);
        }
    }

    std::vector<TrialRecord> records;
    std::size_t failed = 0;
    for (auto& slot : slots) {
        if (slot) {
            records.push_back(*slot);
        } else {
            ++failed;
        }
    }
    if (failures != nullptr) {
        *failures = failed;
    }
    return records;
}

std::vector<SweepRow> threshold_sweep(const SweepConfig& config) {
    if (config.trials == 0) {
        throw std::invalid_argument("sweep needs at least one trial");
    }
    std::vector<SweepRow> rows;
    for (const std::size_t n : config.sizes) {
        std::size_t failed = 0;
        const auto records = run_trials(n, config, &failed);
        if (static_cast<double>(failed) > 0.01 * static_cast<double>(config.trials)) {
            throw ExperimentAborted(std::to_string(failed) + " of " +
                                    std::to_string(config.trials) + " trials failed at n = " +
                                    std::to_string(n));
        }
        SweepRow row;
        row.n = n;
        row.trials = records.size();
        row.failures = failed;
        if (!records.empty()) {
            double sum = 0.0;
            for (const auto& r : records) {
                sum += r.alpha_star;
            }
            row.mean_alpha = sum / static_cast<double>(records.size());
            if (records.size() > 1) {
                double ss = 0.0;
                for (const auto& r : records) {
                    ss += (r.alpha_star - row.mean_alpha) * (r.alpha_star - row.mean_alpha);
                }
                const double count = static_cast<double>(records.size());
                row.stderr_alpha = std::sqrt(ss / (count - 1.0) / count);
            }
        }
        rows.push_back(row);
    }
    return rows;
}

ExtrapolationFit extrapolate(std::span<const FitPoint> points) {
    if (points.size() < 4) {
        throw SingularFit("extrapolation needs at least four sizes");
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!(points[i].stderr_mean > 0.0)) {
            throw std::invalid_argument("standard errors must be positive");
        }
        if (!(points[i].n > 0.0)) {
            throw std::invalid_argument("sizes must be positive");
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (points[i].n == points[j].n) {
                throw SingularFit("repeated size " + std::to_string(points[i].n));
            }
        }
    }
    const auto rows = static_cast<Eigen::Index>(points.size());
    Eigen::MatrixXd design(rows, 3);
    Eigen::VectorXd target(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto& p = points[static_cast<std::size_t>(i)];
        const double inv = 1.0 / p.n;
        design(i, 0) = 1.0 / p.stderr_mean;
        design(i, 1) = inv / p.stderr_mean;
        design(i, 2) = inv * inv / p.stderr_mean;
        target[i] = p.mean / p.stderr_mean;
    }
    // Unit-norm columns keep the 1/n^2 column from dominating conditioning.
    const Eigen::Vector3d scale = design.colwise().norm().transpose();
    const Eigen::MatrixXd scaled = design * scale.cwiseInverse().asDiagonal();
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(scaled);
    if (qr.rank() < 3) {
        throw SingularFit("design matrix is rank deficient");
    }
    const Eigen::Vector3d coeffs = qr.solve(target).cwiseQuotient(scale);
    const Eigen::Matrix3d normal = scaled.transpose() * scaled;
    const Eigen::Matrix3d cov_scaled = normal.inverse();

    ExtrapolationFit fit;
    fit.a0 = coeffs[0];
    fit.a1 = coeffs[1];
    fit.a2 = coeffs[2];
    fit.se0 = std::sqrt(cov_scaled(0, 0)) / scale[0];
    fit.se1 = std::sqrt(cov_scaled(1, 1)) / scale[1];
    fit.se2 = std::sqrt(cov_scaled(2, 2)) / scale[2];
    fit.chi2 = (design * coeffs - target).squaredNorm();
    fit.dof = points.size() - 3;
    return fit;
}

double round_sig10(double value) {
    if (!std::isfinite(value) || value == 0.0) {
        return value;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", value);
    return std::strtod(buf, nullptr);
}

namespace {

std::string format10(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", value);
    return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        cells.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') {
        cells.emplace_back();
    }
    return cells;
}

double parse_number(const std::string& cell, std::size_t line_no) {
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(cell, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != cell.size() || !std::isfinite(value)) {
        throw std::runtime_error("line " + std::to_string(line_no) + ": bad number '" + cell +
                                 "'");
    }
    return value;
}

}  // namespace

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows, bool weighted,
                     std::uint64_t seed) {
    out << "n,trials,mean_alpha,stderr,weighted,seed\n";
    for (const auto& row : rows) {
        out << row.n << ',' << row.trials << ',' << format10(row.mean_alpha) << ','
            << format10(row.stderr_alpha) << ',' << (weighted ? 1 : 0) << ',' << seed << '\n';
    }
}

std::vector<FitPoint> read_sweep_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("empty CSV");
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    const auto header = split_csv(line);
    const auto column = [&](const std::string& name) {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) {
            throw std::runtime_error("CSV header lacks column '" + name + "'");
        }
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t n_col = column("n");
    const std::size_t mean_col = column("mean_alpha");
    const std::size_t se_col = column("stderr");

    std::vector<FitPoint> points;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto cells = split_csv(line);
        if (cells.size() != header.size()) {
            throw std::runtime_error("line " + std::to_string(line_no) + ": expected " +
                                     std::to_string(header.size()) + " fields");
        }
        points.push_back({parse_number(cells[n_col], line_no),
                          parse_number(cells[mean_col], line_no),
                          parse_number(cells[se_col], line_no)});
    }
    return points;
}

std::string fit_to_json(const ExtrapolationFit& fit) {
    nlohmann::ordered_json j;
    j["a0"] = round_sig10(fit.a0);
    j["a1"] = round_sig10(fit.a1);
    j["a2"] = round_sig10(fit.a2);
    j["se0"] = round_sig10(fit.se0);
    j["se1"] = round_sig10(fit.se1);
    j["se2"] = round_sig10(fit.se2);
    j["chi2"] = round_sig10(fit.chi2);
    j["dof"] = fit.dof;
    return j.dump();
}

}  // namespace wl1
