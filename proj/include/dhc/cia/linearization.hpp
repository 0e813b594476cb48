#pragma once

#include "dhc/loadflow/loadflow.hpp"
#include "dhc/net_model/compact_matrices.hpp"
#include "dhc/net_model/network.hpp"

#include <Eigen/Dense>

#include <vector>

namespace dhc::cia {

using JacobianRows = Eigen::Matrix<double, Eigen::Dynamic, 3>;

/// Second-order expansion of l = (P^2 + Q^2) / v around a load-flow point,
/// one 3-vector x0 = (P0, Q0, v0) per branch with v taken at the downstream bus.
struct Linearization {
    lf::OperatingPoint nominal;
    Eigen::VectorXd P0, Q0, v0, l0;
    JacobianRows J, J_pos, J_neg;
    std::vector<Eigen::Matrix3d> He;
    Eigen::VectorXd p_d, q_d;  ///< demand snapshot (pu, length N)
    Eigen::VectorXd p_g;       ///< generation at the expansion point (pu, length N)

    std::size_t size() const { return static_cast<std::size_t>(l0.size()); }
};

/// Runs the load flow at generation p_g (zero when empty) and demand (p_d, q_d),
/// then assembles the Jacobian with its sign split and the Hessian of every
/// branch. Throws LoadFlowError when the load flow diverges and ModelError when
/// a Hessian is not positive semidefinite.
Linearization linearize(const net::Network& net, const Eigen::VectorXd& p_d, const Eigen::VectorXd& q_d,
                        const Eigen::VectorXd& p_g = {});

/// Smallest eigenvalue over all branch Hessians.
double min_hessian_eigenvalue(const Linearization& lin);

/// l0 + J' d + d' He d / 2 for branch k (second-order model).
double taylor_current(const Linearization& lin, std::size_t k, const Eigen::Vector3d& delta);

}  // namespace dhc::cia
