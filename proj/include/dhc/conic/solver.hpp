#pragma once

#include "dhc/conic/problem.hpp"

#include <Eigen/Dense>

#include <string_view>
#include <vector>

namespace dhc::conic {

enum class SolveStatus { optimal, infeasible, unbounded, numerical_failure };

std::string_view to_string(SolveStatus s);

struct SolverOptions {
    double tolerance = 1e-8;
    int max_iterations = 150;
    /// Chord segments of the log under-approximation on [floor, x_max].
    int log_segments = 96;
    /// Extra passes that add breakpoints around the previous optimum.
    int log_refinements = 6;
    /// An "optimal" point whose independent re-check exceeds this is reported as a failure.
    double violation_limit = 1e-6;
    bool verbose = false;
};

struct SolveStats {
    int iterations = 0;  ///< summed over all passes
    int passes = 0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double gap = 0.0;
    double max_violation = 0.0;  ///< recomputed from the stored constraints
};

struct ConicSolution {
    SolveStatus status = SolveStatus::numerical_failure;
    std::vector<double> x;
    double objective = 0.0;  ///< exact objective (log terms evaluated, not approximated)
    SolveStats stats;

    bool optimal() const { return status == SolveStatus::optimal; }
    double value(const AffineExpr& e) const { return e.evaluate(x); }
    Eigen::VectorXd value(const VarBlock& b) const;
};

/// Solves the problem with the in-repo interior point backend. Log terms are
/// replaced by the epigraph of a piecewise-linear chord under-approximation of
/// log on a geometric grid, refined around the optimum.
ConicSolution solve(const ConicProblem& problem, const SolverOptions& options = {});

}  // namespace dhc::conic
