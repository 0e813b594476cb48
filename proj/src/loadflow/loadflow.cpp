#include "dhc/loadflow/loadflow.hpp"

#include "dhc/common/error.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

namespace dhc::lf {

namespace {

void check_lengths(const net::Network& net, const Eigen::VectorXd& v, const char* what) {
    if (static_cast<std::size_t>(v.size()) != net.branch_count()) {
        throw LoadFlowError(fmt::format("{} has length {}, expected {}", what, v.size(), net.branch_count()));
    }
}

}  // namespace

double distflow_residual(const net::Network& net, const OperatingPoint& op) {
    const auto n = net.branch_count();
    double worst = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        double p_in = op.p(k);
        double q_in = op.q(k);
        for (auto child : net.children(k + 1)) {
            const auto c = child - 1;
            p_in += op.P(c) - net.r(c) * op.l(c);
            q_in += op.Q(c) - net.x(c) * op.l(c);
        }
        const auto parent = net.parent_bus(k);
        const double v_parent = parent == 0 ? net.v0() : op.V(parent - 1);
        const double v_eq = v_parent + 2.0 * (net.r(k) * op.P(k) + net.x(k) * op.Q(k)) - net.z2(k) * op.l(k);
        const double l_eq = op.l(k) * op.V(k) - (op.P(k) * op.P(k) + op.Q(k) * op.Q(k));
        worst = std::max({worst, std::abs(op.P(k) - p_in), std::abs(op.Q(k) - q_in), std::abs(op.V(k) - v_eq),
                          std::abs(l_eq)});
    }
    return worst;
}

OperatingPoint solve_loadflow(const net::Network& net, const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                              const LoadFlowOptions& options) {
    check_lengths(net, p, "active injection");
    check_lengths(net, q, "reactive injection");
    const auto n = net.branch_count();

    OperatingPoint op;
    op.p = p;
    op.q = q;
    op.P = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    op.Q = op.P;
    op.l = op.P;
    op.V = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), net.v0());

    for (int it = 1; it <= options.max_iterations; ++it) {
        op.iterations = it;
        // backward: accumulate flows from the leaves (reverse topological order)
        for (std::size_t kk = n; kk-- > 0;) {
            double P = p(kk);
            double Q = q(kk);
            for (auto child : net.children(kk + 1)) {
                const auto c = child - 1;
                P += op.P(c) - net.r(c) * op.l(c);
                Q += op.Q(c) - net.x(c) * op.l(c);
            }
            op.P(kk) = P;
            op.Q(kk) = Q;
        }
        // forward: voltages from the substation, then currents
        for (std::size_t k = 0; k < n; ++k) {
            const auto parent = net.parent_bus(k);
            const double v_parent = parent == 0 ? net.v0() : op.V(parent - 1);
            op.V(k) = v_parent + 2.0 * (net.r(k) * op.P(k) + net.x(k) * op.Q(k)) - net.z2(k) * op.l(k);
        }
        if (!op.V.allFinite() || op.V.minCoeff() <= 0.0) {
            op.converged = false;
            op.residual = std::numeric_limits<double>::infinity();
            return op;
        }
        for (std::size_t k = 0; k < n; ++k) {
            op.l(k) = (op.P(k) * op.P(k) + op.Q(k) * op.Q(k)) / op.V(k);
        }
        op.residual = distflow_residual(net, op);
        if (!std::isfinite(op.residual)) {
            break;
        }
        if (op.residual < options.tolerance) {
            op.converged = true;
            return op;
        }
    }
    op.converged = false;
    return op;
}

OperatingPoint solve_loadflow(const net::Network& net, const Eigen::VectorXd& p_g, const Eigen::VectorXd& q_g,
                              const Eigen::VectorXd& p_d, const Eigen::VectorXd& q_d,
                              const LoadFlowOptions& options) {
    check_lengths(net, p_g, "active generation");
    check_lengths(net, q_g, "reactive generation");
    check_lengths(net, p_d, "active demand");
    check_lengths(net, q_d, "reactive demand");
    return solve_loadflow(net, p_g - p_d, q_g - q_d, options);
}

void require_converged(const OperatingPoint& op) {
    if (!op.converged) {
        throw LoadFlowError(fmt::format("load flow did not converge after {} iterations (residual {:.3e})",
                                        op.iterations, op.residual));
    }
}

AdmissibilityReport check_admissible(const net::Network& net, const OperatingPoint& op, double slack) {
    if (!op.converged) {
        throw LoadFlowError("admissibility check requires a converged operating point");
    }
    AdmissibilityReport report;
    const auto n = net.branch_count();
    for (std::size_t k = 0; k < n; ++k) {
        const double v = op.V(k);
        if (v > net.v_hi() + slack) {
            report.voltage_violations.push_back({k + 1, net.bus_id(k + 1), v, net.v_hi(), v - net.v_hi()});
        } else if (v < net.v_lo() - slack) {
            report.voltage_violations.push_back({k + 1, net.bus_id(k + 1), v, net.v_lo(), net.v_lo() - v});
        }
        if (op.l(k) > net.l_max(k) + slack) {
            report.current_violations.push_back({k, op.l(k), net.l_max(k), op.l(k) - net.l_max(k)});
        }
    }
    for (const auto& v : report.voltage_violations) {
        report.worst_violation = std::max(report.worst_violation, v.excess);
    }
    for (const auto& c : report.current_violations) {
        report.worst_violation = std::max(report.worst_violation, c.excess);
    }
    report.admissible = report.voltage_violations.empty() && report.current_violations.empty();
    return report;
}

}  // namespace dhc::lf
