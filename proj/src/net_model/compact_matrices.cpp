#include "dhc/net_model/compact_matrices.hpp"

#include "dhc/common/error.hpp"

#include <fmt/core.h>

namespace dhc::net {

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> sign_split(const Eigen::MatrixXd& m) {
    return {m.cwiseMax(0.0), m.cwiseMin(0.0)};
}

CompactMatrices compact_matrices(const Network& net) {
    const auto n = static_cast<Eigen::Index>(net.branch_count());
    CompactMatrices m;

    m.incidence = Eigen::MatrixXd::Zero(n + 1, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        m.incidence(static_cast<Eigen::Index>(net.parent_bus(static_cast<std::size_t>(k))), k) = 1.0;
        m.incidence(k + 1, k) = 1.0;
    }

    // A := [0_N I_N] E - I_N; A(i, j) = 1 when branch i feeds branch j directly.
    m.A = m.incidence.bottomRows(n) - Eigen::MatrixXd::Identity(n, n);

    const Eigen::MatrixXd I_minus_A = Eigen::MatrixXd::Identity(n, n) - m.A;
    if (!m.A.triangularView<Eigen::StrictlyLower>().toDenseMatrix().isZero(0.0)) {
        throw NetworkError("(I - A) is not unit upper triangular: bus order is not topological");
    }
    m.C = I_minus_A.triangularView<Eigen::UnitUpper>().solve(Eigen::MatrixXd::Identity(n, n));
    const double residual = (m.C * I_minus_A - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
    if (!(residual < 1e-9)) {
        throw NetworkError(fmt::format("(I - A) is singular (inverse residual {:.3e})", residual));
    }

    m.R.resize(n);
    m.X.resize(n);
    m.Z2.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto b = static_cast<std::size_t>(k);
        m.R(k) = net.r(b);
        m.X(k) = net.x(b);
        m.Z2(k) = net.z2(b);
    }

    const Eigen::MatrixXd CA = m.C * m.A;
    m.D_R = CA * m.R.asDiagonal();
    m.D_X = CA * m.X.asDiagonal();
    std::tie(m.D_X_pos, m.D_X_neg) = sign_split(m.D_X);

    m.M_p = 2.0 * m.C.transpose() * m.R.asDiagonal() * m.C;
    m.M_q = 2.0 * m.C.transpose() * m.X.asDiagonal() * m.C;

    Eigen::MatrixXd inner = 2.0 * (m.R.asDiagonal() * m.D_R + m.X.asDiagonal() * m.D_X);
    inner.diagonal() += m.Z2;
    m.H = m.C.transpose() * inner;
    std::tie(m.H_pos, m.H_neg) = sign_split(m.H);
    return m;
}

}  // namespace dhc::net
