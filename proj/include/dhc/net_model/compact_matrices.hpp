#pragma once

#include "dhc/net_model/network.hpp"

#include <Eigen/Dense>

namespace dhc::net {

/// Topology and impedance matrices of the compact DistFlow form
///
///   P = C p - D_R l
///   Q = C q - D_X l
///   V = V0 + M_p p + M_q q - H l
///
/// All N x N blocks are indexed by branch (equivalently downstream bus - 1).
/// Sign splits hold the nonnegative (pos) and nonpositive (neg) entries so that
/// pos + neg reproduces the full matrix exactly.
struct CompactMatrices {
    Eigen::MatrixXd incidence;  ///< E, (N+1) x N, 0/1 entries
    Eigen::MatrixXd A;
    Eigen::MatrixXd C;
    Eigen::MatrixXd D_R;
    Eigen::MatrixXd D_X;
    Eigen::MatrixXd D_X_pos;
    Eigen::MatrixXd D_X_neg;
    Eigen::MatrixXd M_p;
    Eigen::MatrixXd M_q;
    Eigen::MatrixXd H;
    Eigen::MatrixXd H_pos;
    Eigen::MatrixXd H_neg;
    Eigen::VectorXd R;   ///< diagonal of R
    Eigen::VectorXd X;   ///< diagonal of X
    Eigen::VectorXd Z2;  ///< diagonal of Z^2

    Eigen::Index size() const { return C.rows(); }
};

/// Builds every derived matrix. C is obtained by a unit-upper-triangular solve,
/// which the topological bus order guarantees; anything else raises NetworkError.
CompactMatrices compact_matrices(const Network& net);

/// Splits a matrix into its nonnegative and nonpositive parts.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> sign_split(const Eigen::MatrixXd& m);

}  // namespace dhc::net
