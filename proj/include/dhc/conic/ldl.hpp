#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <vector>

namespace dhc::conic {

/// Sparse LDL' for quasi-definite matrices with a known pivot sign pattern.
///
/// Pivots whose sign disagrees with the expected one, or whose magnitude falls
/// below `pivot_floor`, are replaced by `sign * pivot_boost`. Refinement against
/// the true matrix is the caller's job.
class QuasiDefiniteLdl {
public:
    /// `lower` holds the lower triangle; `signs[i]` is +1 or -1.
    void analyze(const Eigen::SparseMatrix<double>& lower, std::vector<int> signs);
    void factorize(const Eigen::SparseMatrix<double>& lower);
    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

    int boosted_pivots() const { return boosted_; }
    double pivot_floor = 1e-13;
    double pivot_boost = 2e-7;

private:
    Eigen::Index n_ = 0;
    Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> perm_;
    std::vector<int> signs_;  // in permuted order
    std::vector<int> etree_, lnz_, lp_, li_;
    std::vector<double> lx_, d_, dinv_;
    int boosted_ = 0;
};

}  // namespace dhc::conic
