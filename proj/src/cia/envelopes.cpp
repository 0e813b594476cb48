#include "dhc/cia/envelopes.hpp"

#include "dhc/common/error.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

namespace dhc::cia {

std::string_view to_string(BoundVariant v) { return v == BoundVariant::soc ? "soc" : "conservative"; }

BoundVariant bound_variant_from_string(std::string_view s) {
    if (s == "soc") {
        return BoundVariant::soc;
    }
    if (s == "conservative") {
        return BoundVariant::conservative;
    }
    throw InputError(fmt::format("unknown bound variant '{}' (expected soc or conservative)", s));
}

ProxyBox proxy_box(const net::CompactMatrices& m, double v0, const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                   const Eigen::VectorXd& l_plus, const Eigen::VectorXd& l_minus) {
    ProxyBox b;
    const Eigen::VectorXd Cp = m.C * p;
    const Eigen::VectorXd Cq = m.C * q;
    const Eigen::VectorXd lin_v = Eigen::VectorXd::Constant(p.size(), v0) + m.M_p * p + m.M_q * q;
    b.P_plus = Cp - m.D_R * l_minus;
    b.P_minus = Cp - m.D_R * l_plus;
    b.Q_plus = Cq - m.D_X_pos * l_minus - m.D_X_neg * l_plus;
    b.Q_minus = Cq - m.D_X_pos * l_plus - m.D_X_neg * l_minus;
    b.V_plus = lin_v - m.H_pos * l_minus - m.H_neg * l_plus;
    b.V_minus = lin_v - m.H_pos * l_plus - m.H_neg * l_minus;
    return b;
}

namespace {

Eigen::Vector3d delta(const Linearization& lin, Eigen::Index k, double P, double Q, double V) {
    return {P - lin.P0(k), Q - lin.Q0(k), V - lin.v0(k)};
}

}  // namespace

Eigen::VectorXd current_lower_bound(const Linearization& lin, const ProxyBox& box) {
    const auto n = lin.l0.size();
    Eigen::VectorXd l(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto dp = delta(lin, k, box.P_plus(k), box.Q_plus(k), box.V_plus(k));
        const auto dm = delta(lin, k, box.P_minus(k), box.Q_minus(k), box.V_minus(k));
        l(k) = lin.l0(k) + lin.J_pos.row(k).dot(dm) + lin.J_neg.row(k).dot(dp);
    }
    return l;
}

Eigen::VectorXd soc_upper_bound(const ProxyBox& box) {
    const auto n = box.P_plus.size();
    Eigen::VectorXd l(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double p2 = std::max(box.P_plus(k) * box.P_plus(k), box.P_minus(k) * box.P_minus(k));
        const double q2 = std::max(box.Q_plus(k) * box.Q_plus(k), box.Q_minus(k) * box.Q_minus(k));
        l(k) = (p2 + q2) / box.V_minus(k);
    }
    return l;
}

Eigen::VectorXd conservative_upper_bound(const Linearization& lin, const ProxyBox& box) {
    const auto n = lin.l0.size();
    Eigen::VectorXd l(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto dp = delta(lin, k, box.P_plus(k), box.Q_plus(k), box.V_plus(k));
        const auto dm = delta(lin, k, box.P_minus(k), box.Q_minus(k), box.V_minus(k));
        double bound = 2.0 * std::abs(lin.J_pos.row(k).dot(dp) + lin.J_neg.row(k).dot(dm));
        const auto& H = lin.He[static_cast<std::size_t>(k)];
        for (double P : {box.P_plus(k), box.P_minus(k)}) {
            for (double Q : {box.Q_plus(k), box.Q_minus(k)}) {
                for (double V : {box.V_plus(k), box.V_minus(k)}) {
                    const auto d = delta(lin, k, P, Q, V);
                    bound = std::max(bound, d.dot(H * d));
                }
            }
        }
        l(k) = lin.l0(k) + bound;
    }
    return l;
}

Eigen::VectorXd upper_bound(BoundVariant variant, const Linearization& lin, const ProxyBox& box) {
    return variant == BoundVariant::soc ? soc_upper_bound(box) : conservative_upper_bound(lin, box);
}

EnvelopePoint envelope_fixed_point(const net::CompactMatrices& m, double v0, const Linearization& lin,
                                   BoundVariant variant, const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                                   const Eigen::VectorXd& l_start, int max_iterations, double tolerance) {
    EnvelopePoint pt;
    pt.l_minus = l_start;
    pt.l_plus = l_start;
    for (int it = 1; it <= max_iterations; ++it) {
        pt.iterations = it;
        pt.box = proxy_box(m, v0, p, q, pt.l_plus, pt.l_minus);
        if (!(pt.box.V_minus.minCoeff() > 0.0)) {
            return pt;
        }
        Eigen::VectorXd lo = current_lower_bound(lin, pt.box);
        Eigen::VectorXd up = upper_bound(variant, lin, pt.box);
        if (!lo.allFinite() || !up.allFinite()) {
            return pt;
        }
        const double change = std::max((lo - pt.l_minus).cwiseAbs().maxCoeff(), (up - pt.l_plus).cwiseAbs().maxCoeff());
        pt.l_minus = std::move(lo);
        pt.l_plus = std::move(up);
        if (change < tolerance) {
            pt.box = proxy_box(m, v0, p, q, pt.l_plus, pt.l_minus);
            pt.converged = true;
            return pt;
        }
    }
    return pt;
}

}  // namespace dhc::cia
