#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace wl1 {

using DenseMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

std::string_view to_string(LpStatus status);

/// Standard form: minimize c.x subject to A x = b, x >= 0.
struct LpProblem {
    Vector objective;
    DenseMatrix eq_matrix;
    Vector rhs;
    /// Variables held at zero; their columns are dropped before solving.
    std::vector<std::size_t> fixed_zero;
};

struct LpOptions {
    /// Pivot cap over both phases; 0 selects 50 * (rows + columns).
    std::size_t max_iterations = 0;
    double optimality_tol = 1e-9;
    double pivot_tol = 1e-10;
    double feasibility_tol = 1e-9;
    std::size_t refactor_interval = 64;
};

struct LpSolution {
    Vector x;
    double objective_value = 0.0;
    /// b.pi for the final basis duals; equals the primal value at optimality.
    double dual_objective = 0.0;
    LpStatus status = LpStatus::IterationLimit;
    std::size_t iterations = 0;
};

/// Two-phase revised simplex on a dense LU of the basis with an eta file
/// between refactorizations. Dantzig pricing; Bland's rule takes over after
/// 3M consecutive degenerate pivots and is released by the next
/// nondegenerate one.
LpSolution lp_solve(const LpProblem& problem, const LpOptions& options = {});

/// Split-variable LP for the source-space problem. Entries of `x` in the
/// result are x+ - x-; the variable vector length is the number of columns
/// of the original problem.
LpProblem make_wl1_problem(const DenseMatrix& a, const Vector& y, std::span<const double> weights,
                           std::span<const std::size_t> fixed_zero);

/// Minimizes sum_i w_i |x_i| subject to A x = y. Components listed in
/// `fixed_zero` are removed (held at zero).
LpSolution wl1_minimize(const DenseMatrix& a, const Vector& y, std::span<const double> weights,
                        std::span<const std::size_t> fixed_zero = {},
                        const LpOptions& options = {});

/// Plain-text dump: "M N", the objective row, then M rows of N coefficients
/// followed by the rhs, 17 significant digits.
void write_lp_dump(std::ostream& out, const LpProblem& problem);
LpProblem read_lp_dump(std::istream& in);

}  // namespace wl1
