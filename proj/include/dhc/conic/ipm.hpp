#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstddef>
#include <vector>

namespace dhc::conic {

/// min c'x  s.t.  A x = b,  G x + s = h,  s in K.
/// K is the nonnegative orthant of dimension `orthant` followed by second-order
/// cones of the listed dimensions (first entry of each block is the cone "t").
struct StandardForm {
    Eigen::VectorXd c;
    Eigen::SparseMatrix<double> A;
    Eigen::VectorXd b;
    Eigen::SparseMatrix<double> G;
    Eigen::VectorXd h;
    std::size_t orthant = 0;
    std::vector<std::size_t> soc_dims;
};

struct IpmSettings {
    double feastol = 1e-8;
    double abstol = 1e-8;
    double reltol = 1e-8;
    /// Looser tolerances accepted for the best iterate when progress breaks down.
    double feastol_reduced = 1e-6;
    double abstol_reduced = 5e-6;
    double reltol_reduced = 5e-6;
    int max_iterations = 100;
    double regularization = 7e-8;
    int refinement_steps = 5;
    double step_fraction = 0.99;
    int equilibration_passes = 10;  ///< Ruiz passes over [A; G]; 0 disables
    bool verbose = false;  ///< per-iteration trace on stderr
};

enum class IpmStatus { optimal, primal_infeasible, dual_infeasible, max_iterations, numerical_failure };

struct IpmResult {
    IpmStatus status = IpmStatus::numerical_failure;
    Eigen::VectorXd x, y, z, s;
    int iterations = 0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double gap = 0.0;
    double primal_cost = 0.0;
    double dual_cost = 0.0;
    bool reduced_accuracy = false;  ///< optimal only to the reduced tolerances
};

/// Primal-dual interior point method on the homogeneous self-dual embedding with
/// Nesterov-Todd scaling and a Mehrotra predictor-corrector. The KKT system is
/// factored as a regularized quasi-definite sparse LDL' with iterative refinement.
IpmResult solve_ipm(const StandardForm& problem, const IpmSettings& settings = {});

}  // namespace dhc::conic
