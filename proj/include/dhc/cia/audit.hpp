#pragma once

#include "dhc/cia/hosting_capacity.hpp"
#include "dhc/net_model/network.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>

namespace dhc::cia {

struct AuditReport {
    std::size_t samples = 0;
    std::size_t violations = 0;     ///< converged points outside the limits
    std::size_t nonconverged = 0;   ///< load flow failures, counted as violations too
    double worst_violation = 0.0;   ///< largest excess over the limits (squared pu)
    Eigen::VectorXd worst_sample_mw;

    bool sound() const { return violations == 0; }
};

/// Draws injections uniformly inside the box (one independent stream per
/// sample, so the result does not depend on the worker count) and checks each
/// with the load-flow admissibility oracle under the given demand.
AuditReport audit_hyperrectangle(const net::Network& net, const Hyperrectangle& box, const Eigen::VectorXd& p_d,
                                 const Eigen::VectorXd& q_d, std::size_t samples, std::uint64_t seed,
                                 double slack = 1e-6, std::size_t workers = 0);

}  // namespace dhc::cia
