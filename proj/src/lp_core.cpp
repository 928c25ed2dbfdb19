#include "wl1/lp_core.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace wl1 {

std::string_view to_string(LpStatus status) {
    switch (status) {
        case LpStatus::Optimal:
            return "Optimal";
        case LpStatus::Infeasible:
            return "Infeasible";
        case LpStatus::Unbounded:
            return "Unbounded";
        case LpStatus::IterationLimit:
            return "IterationLimit";
    }
    return "Unknown";
}

namespace {

using Index = Eigen::Index;

constexpr double degenerate_step = 1e-12;

// Column of B^{-1} replaced at `row`: applying it maps the old basis inverse
// to the new one.
struct Eta {
    Index row;
    Vector column;
};

enum class Phase { feasibility, optimality };

enum class PhaseOutcome { optimal, unbounded, iteration_limit };

class RevisedSimplex {
public:
    RevisedSimplex(const LpProblem& problem, const LpOptions& options)
        : options_(options), original_vars_(problem.objective.size()) {
        const Index m = problem.eq_matrix.rows();
        if (problem.eq_matrix.cols() != problem.objective.size() || problem.rhs.size() != m) {
            throw std::invalid_argument("lp_solve: inconsistent problem dimensions");
        }
        std::vector<bool> fixed(static_cast<std::size_t>(original_vars_), false);
        for (auto j : problem.fixed_zero) {
            if (static_cast<Index>(j) >= original_vars_) {
                throw std::invalid_argument("lp_solve: fixed_zero index out of range");
            }
            fixed[j] = true;
        }
        for (Index j = 0; j < original_vars_; ++j) {
            if (!fixed[static_cast<std::size_t>(j)]) {
                active_.push_back(j);
            }
        }
        m_ = m;
        n_ = static_cast<Index>(active_.size());
        a_.resize(m_, n_);
        c_.resize(n_);
        for (Index k = 0; k < n_; ++k) {
            a_.col(k) = problem.eq_matrix.col(active_[static_cast<std::size_t>(k)]);
            c_[k] = problem.objective[active_[static_cast<std::size_t>(k)]];
        }
        b_ = problem.rhs;
        for (Index i = 0; i < m_; ++i) {
            if (b_[i] < 0.0) {
                b_[i] = -b_[i];
                a_.row(i) *= -1.0;
            }
        }
        max_iterations_ = options_.max_iterations != 0
                              ? options_.max_iterations
                              : 50 * static_cast<std::size_t>(m_ + original_vars_);
    }

    LpSolution run() {
        LpSolution solution;
        solution.x = Vector::Zero(original_vars_);

        // Slack basis of artificials: B = I, x_B = b.
        head_.resize(static_cast<std::size_t>(m_));
        where_.assign(static_cast<std::size_t>(n_ + m_), -1);
        for (Index i = 0; i < m_; ++i) {
            head_[static_cast<std::size_t>(i)] = n_ + i;
            where_[static_cast<std::size_t>(n_ + i)] = i;
        }
        refactor();

        auto outcome = iterate(Phase::feasibility);
        solution.iterations = iterations_;
        if (outcome == PhaseOutcome::iteration_limit) {
            solution.status = LpStatus::IterationLimit;
            return solution;
        }
        double infeasibility = 0.0;
        for (Index i = 0; i < m_; ++i) {
            if (is_artificial(head_[static_cast<std::size_t>(i)])) {
                infeasibility += std::max(0.0, xb_[i]);
            }
        }
        const double b_norm = m_ > 0 ? b_.cwiseAbs().maxCoeff() : 0.0;
        if (infeasibility > options_.feasibility_tol * (1.0 + b_norm)) {
            solution.status = LpStatus::Infeasible;
            return solution;
        }
        drive_out_artificials();

        outcome = iterate(Phase::optimality);
        solution.iterations = iterations_;
        if (outcome == PhaseOutcome::iteration_limit) {
            solution.status = LpStatus::IterationLimit;
            return solution;
        }
        if (outcome == PhaseOutcome::unbounded) {
            solution.status = LpStatus::Unbounded;
            return solution;
        }

        for (Index i = 0; i < m_; ++i) {
            const Index var = head_[static_cast<std::size_t>(i)];
            if (!is_artificial(var)) {
                solution.x[active_[static_cast<std::size_t>(var)]] = std::max(0.0, xb_[i]);
            }
        }
        double objective = 0.0;
        for (Index k = 0; k < n_; ++k) {
            objective += c_[k] * solution.x[active_[static_cast<std::size_t>(k)]];
        }
        solution.objective_value = objective;
        solution.dual_objective = m_ > 0 ? b_.dot(duals(Phase::optimality)) : 0.0;
        solution.status = LpStatus::Optimal;
        return solution;
    }

private:
    bool is_artificial(Index var) const { return var >= n_; }

    double cost(Index var, Phase phase) const {
        if (phase == Phase::feasibility) {
            return is_artificial(var) ? 1.0 : 0.0;
        }
        return is_artificial(var) ? 0.0 : c_[var];
    }

    void refactor() {
        DenseMatrix basis = DenseMatrix::Zero(m_, m_);
        for (Index i = 0; i < m_; ++i) {
            const Index var = head_[static_cast<std::size_t>(i)];
            if (is_artificial(var)) {
                basis(var - n_, i) = 1.0;
            } else {
                basis.col(i) = a_.col(var);
            }
        }
        lu_.compute(basis);
        etas_.clear();
        xb_ = lu_.solve(b_);
    }

    void ftran(Vector& v) const {
        v = lu_.solve(v);
        for (const auto& eta : etas_) {
            const double t = v[eta.row];
            if (t != 0.0) {
                v[eta.row] = 0.0;
                v.noalias() += t * eta.column;
            }
        }
    }

    void btran(Vector& v) const {
        for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
            v[it->row] = it->column.dot(v);
        }
        v = lu_.transpose().solve(v);
    }

    Vector duals(Phase phase) const {
        Vector pi(m_);
        for (Index i = 0; i < m_; ++i) {
            pi[i] = cost(head_[static_cast<std::size_t>(i)], phase);
        }
        btran(pi);
        return pi;
    }

    Vector entering_column(Index var) const {
        Vector w;
        if (is_artificial(var)) {
            w = Vector::Unit(m_, var - n_);
        } else {
            w = a_.col(var);
        }
        ftran(w);
        return w;
    }

    void pivot(Index row, Index entering, const Vector& w) {
        const double pivot_value = w[row];
        const double theta = xb_[row] / pivot_value;
        xb_.noalias() -= theta * w;
        xb_[row] = theta;

        Eta eta{row, -w / pivot_value};
        eta.column[row] = 1.0 / pivot_value;
        etas_.push_back(std::move(eta));

        const Index leaving = head_[static_cast<std::size_t>(row)];
        where_[static_cast<std::size_t>(leaving)] = -1;
        head_[static_cast<std::size_t>(row)] = entering;
        where_[static_cast<std::size_t>(entering)] = row;
        ++iterations_;

        if (std::fabs(theta) <= degenerate_step) {
            if (++degenerate_streak_ >= static_cast<std::size_t>(3 * m_)) {
                bland_ = true;
            }
        } else {
            degenerate_streak_ = 0;
            bland_ = false;
        }
        if (etas_.size() >= options_.refactor_interval) {
            refactor();
        }
    }

    Index price(const Vector& reduced) const {
        Index best = -1;
        double best_value = -options_.optimality_tol;
        for (Index j = 0; j < n_; ++j) {
            if (where_[static_cast<std::size_t>(j)] >= 0) {
                continue;
            }
            if (reduced[j] < best_value) {
                best = j;
                if (bland_) {
                    break;
                }
                best_value = reduced[j];
            }
        }
        return best;
    }

    Index ratio_test(const Vector& w, Phase phase) const {
        Index best = -1;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (Index i = 0; i < m_; ++i) {
            const Index var = head_[static_cast<std::size_t>(i)];
            double ratio;
            if (phase == Phase::optimality && is_artificial(var)) {
                // Artificials left in the basis sit at zero and must stay there.
                if (std::fabs(w[i]) <= options_.pivot_tol) {
                    continue;
                }
                ratio = 0.0;
            } else if (w[i] > options_.pivot_tol) {
                ratio = std::max(0.0, xb_[i]) / w[i];
            } else {
                continue;
            }
            const double tie = 1e-12 * (1.0 + best_ratio);
            if (best < 0 || ratio < best_ratio - tie) {
                best = i;
                best_ratio = ratio;
            } else if (ratio <= best_ratio + tie) {
                const bool prefer =
                    bland_ ? var < head_[static_cast<std::size_t>(best)]
                           : std::fabs(w[i]) > std::fabs(w[best]);
                if (prefer) {
                    best = i;
                    best_ratio = std::min(best_ratio, ratio);
                }
            }
        }
        return best;
    }

    PhaseOutcome iterate(Phase phase) {
        degenerate_streak_ = 0;
        bland_ = false;
        Vector reduced(n_);
        while (true) {
            if (iterations_ >= max_iterations_) {
                return PhaseOutcome::iteration_limit;
            }
            const Vector pi = duals(phase);
            for (Index j = 0; j < n_; ++j) {
                reduced[j] = cost(j, phase);
            }
            reduced.noalias() -= a_.transpose() * pi;

            const Index entering = price(reduced);
            if (entering < 0) {
                if (!etas_.empty()) {
                    // Certify on a fresh factorization before declaring optimality.
                    refactor();
                    continue;
                }
                return PhaseOutcome::optimal;
            }
            const Vector w = entering_column(entering);
            const Index row = ratio_test(w, phase);
            if (row < 0) {
                return PhaseOutcome::unbounded;
            }
            pivot(row, entering, w);
        }
    }

    void drive_out_artificials() {
        for (Index i = 0; i < m_; ++i) {
            if (!is_artificial(head_[static_cast<std::size_t>(i)])) {
                continue;
            }
            Vector row = Vector::Unit(m_, i);
            btran(row);
            const Vector alpha = a_.transpose() * row;
            Index best = -1;
            double best_abs = 1e-7;
            for (Index j = 0; j < n_; ++j) {
                if (where_[static_cast<std::size_t>(j)] < 0 && std::fabs(alpha[j]) > best_abs) {
                    best = j;
                    best_abs = std::fabs(alpha[j]);
                }
            }
            // No candidate: the row is redundant and its artificial stays basic at zero.
            if (best >= 0) {
                pivot(i, best, entering_column(best));
            }
        }
        refactor();
    }

    LpOptions options_;
    Index original_vars_;
    std::vector<Index> active_;
    Index m_ = 0;
    Index n_ = 0;
    DenseMatrix a_;
    Vector b_;
    Vector c_;
    std::vector<Index> head_;
    std::vector<Index> where_;
    Eigen::PartialPivLU<DenseMatrix> lu_;
    std::vector<Eta> etas_;
    Vector xb_;
    std::size_t max_iterations_ = 0;
    std::size_t iterations_ = 0;
    std::size_t degenerate_streak_ = 0;
    bool bland_ = false;
};

}  // namespace

LpSolution lp_solve(const LpProblem& problem, const LpOptions& options) {
    if (problem.eq_matrix.rows() == 0) {
        LpSolution solution;
        solution.x = Vector::Zero(problem.objective.size());
        solution.status = (problem.objective.array() < 0.0).any() ? LpStatus::Unbounded
                                                                   : LpStatus::Optimal;
        return solution;
    }
    return RevisedSimplex(problem, options).run();
}

LpProblem make_wl1_problem(const DenseMatrix& a, const Vector& y, std::span<const double> weights,
                           std::span<const std::size_t> fixed_zero) {
    const Index n = a.cols();
    if (static_cast<Index>(weights.size()) != n) {
        throw std::invalid_argument("wl1: need one weight per source component");
    }
    if (y.size() != a.rows()) {
        throw std::invalid_argument("wl1: measurement length does not match matrix rows");
    }
    LpProblem problem;
    problem.eq_matrix.resize(a.rows(), 2 * n);
    problem.eq_matrix.leftCols(n) = a;
    problem.eq_matrix.rightCols(n) = -a;
    problem.rhs = y;
    problem.objective.resize(2 * n);

    std::vector<bool> fixed(static_cast<std::size_t>(n), false);
    for (auto i : fixed_zero) {
        if (static_cast<Index>(i) >= n) {
            throw std::invalid_argument("wl1: fixed_zero index out of range");
        }
        fixed[i] = true;
    }
    for (Index i = 0; i < n; ++i) {
        const double w = weights[static_cast<std::size_t>(i)];
        if (std::isinf(w) && w > 0.0) {
            fixed[static_cast<std::size_t>(i)] = true;
        }
        const double c = fixed[static_cast<std::size_t>(i)] ? 0.0 : w;
        problem.objective[i] = c;
        problem.objective[n + i] = c;
        if (fixed[static_cast<std::size_t>(i)]) {
            problem.fixed_zero.push_back(static_cast<std::size_t>(i));
            problem.fixed_zero.push_back(static_cast<std::size_t>(n + i));
        }
    }
    return problem;
}

LpSolution wl1_minimize(const DenseMatrix& a, const Vector& y, std::span<const double> weights,
                        std::span<const std::size_t> fixed_zero, const LpOptions& options) {
    const Index n = a.cols();
    LpSolution split = lp_solve(make_wl1_problem(a, y, weights, fixed_zero), options);
    LpSolution solution = split;
    solution.x = Vector::Zero(n);
    if (split.x.size() == 2 * n) {
        solution.x = split.x.head(n) - split.x.tail(n);
    }
    return solution;
}

void write_lp_dump(std::ostream& out, const LpProblem& problem) {
    const Index m = problem.eq_matrix.rows();
    const Index n = problem.eq_matrix.cols();
    out << m << ' ' << n << '\n' << std::setprecision(17);
    for (Index j = 0; j < n; ++j) {
        out << (j ? " " : "") << problem.objective[j];
    }
    out << '\n';
    for (Index i = 0; i < m; ++i) {
        for (Index j = 0; j < n; ++j) {
            out << problem.eq_matrix(i, j) << ' ';
        }
        out << problem.rhs[i] << '\n';
    }
}

LpProblem read_lp_dump(std::istream& in) {
    Index m = 0;
    Index n = 0;
    if (!(in >> m >> n) || m < 0 || n < 0) {
        throw std::runtime_error("lp dump: bad header");
    }
    LpProblem problem;
    problem.objective.resize(n);
    problem.eq_matrix.resize(m, n);
    problem.rhs.resize(m);
    for (Index j = 0; j < n; ++j) {
        in >> problem.objective[j];
    }
    for (Index i = 0; i < m; ++i) {
        for (Index j = 0; j < n; ++j) {
            in >> problem.eq_matrix(i, j);
        }
        in >> problem.rhs[i];
    }
    if (!in) {
        throw std::runtime_error("lp dump: truncated body");
    }
    return problem;
}

}  // namespace wl1
