#include "dhc/cia/linearization.hpp"

#include "dhc/common/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <limits>

#include <fmt/core.h>

namespace dhc::cia {

Linearization linearize(const net::Network& net, const Eigen::VectorXd& p_d, const Eigen::VectorXd& q_d,
                        const Eigen::VectorXd& p_g) {
    const auto n = static_cast<Eigen::Index>(net.branch_count());
    if (p_d.size() != n || q_d.size() != n || (p_g.size() != 0 && p_g.size() != n)) {
        throw ModelError(fmt::format("linearize: vectors must have length {}", n));
    }
    Linearization lin;
    lin.p_d = p_d;
    lin.q_d = q_d;
    lin.p_g = p_g.size() == 0 ? Eigen::VectorXd::Zero(n) : p_g;
    lin.nominal = lf::solve_loadflow(net, lin.p_g - p_d, -q_d);
    lf::require_converged(lin.nominal);

    lin.P0 = lin.nominal.P;
    lin.Q0 = lin.nominal.Q;
    lin.v0 = lin.nominal.V;
    lin.l0 = lin.nominal.l;
    lin.J.resize(n, 3);
    lin.He.resize(static_cast<std::size_t>(n));
    for (Eigen::Index k = 0; k < n; ++k) {
        const double P = lin.P0(k);
        const double Q = lin.Q0(k);
        const double v = lin.v0(k);
        lin.J.row(k) << 2.0 * P / v, 2.0 * Q / v, -(P * P + Q * Q) / (v * v);
        auto& H = lin.He[static_cast<std::size_t>(k)];
        H << 2.0 / v, 0.0, -2.0 * P / (v * v),  //
            0.0, 2.0 / v, -2.0 * Q / (v * v),    //
            -2.0 * P / (v * v), -2.0 * Q / (v * v), 2.0 * (P * P + Q * Q) / (v * v * v);
    }
    lin.J_pos = lin.J.cwiseMax(0.0);
    lin.J_neg = lin.J.cwiseMin(0.0);
    const double min_eig = min_hessian_eigenvalue(lin);
    if (min_eig < -1e-9) {
        throw ModelError(fmt::format("branch Hessian is not positive semidefinite (min eigenvalue {:.3e})", min_eig));
    }
    return lin;
}

double min_hessian_eigenvalue(const Linearization& lin) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& H : lin.He) {
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(H, Eigen::EigenvaluesOnly);
        m = std::min(m, es.eigenvalues().minCoeff());
    }
    return m;
}

double taylor_current(const Linearization& lin, std::size_t k, const Eigen::Vector3d& delta) {
    const auto i = static_cast<Eigen::Index>(k);
    return lin.l0(i) + lin.J.row(i).dot(delta) + 0.5 * delta.dot(lin.He[k] * delta);
}

}  // namespace dhc::cia
