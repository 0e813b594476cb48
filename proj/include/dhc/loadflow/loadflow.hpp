#pragma once

#include "dhc/net_model/network.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace dhc::lf {

/// Full DistFlow state. Every vector has length N and is indexed by branch
/// (= downstream bus - 1). P and Q are flows towards the substation.
struct OperatingPoint {
    Eigen::VectorXd P;
    Eigen::VectorXd Q;
    Eigen::VectorXd V;  ///< squared voltage of bus k + 1
    Eigen::VectorXd l;  ///< squared current of branch k
    Eigen::VectorXd p;  ///< net active injection p_g - p_d
    Eigen::VectorXd q;  ///< net reactive injection q_g - q_d
    bool converged = false;
    double residual = 0.0;
    int iterations = 0;
};

struct LoadFlowOptions {
    double tolerance = 1e-10;
    int max_iterations = 100;
};

/// Backward-forward sweep on the branch-flow equations with net injections p, q.
/// Returns converged = false when the residual stays above tolerance or the
/// iterate leaves the physical region (nonpositive voltage, non-finite values).
OperatingPoint solve_loadflow(const net::Network& net, const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                              const LoadFlowOptions& options = {});

/// Same with generation and demand given separately: p = p_g - p_d, q = q_g - q_d.
OperatingPoint solve_loadflow(const net::Network& net, const Eigen::VectorXd& p_g, const Eigen::VectorXd& q_g,
                              const Eigen::VectorXd& p_d, const Eigen::VectorXd& q_d,
                              const LoadFlowOptions& options = {});

/// Max absolute residual of the four DistFlow equations at a state.
double distflow_residual(const net::Network& net, const OperatingPoint& op);

/// Throws LoadFlowError when op did not converge.
void require_converged(const OperatingPoint& op);

struct VoltageViolation {
    std::size_t bus = 0;  ///< internal index
    int bus_id = 0;
    double value = 0.0;   ///< squared pu
    double limit = 0.0;
    double excess = 0.0;  ///< positive distance outside the band
};

struct CurrentViolation {
    std::size_t branch = 0;
    double value = 0.0;
    double limit = 0.0;
    double excess = 0.0;
};

struct AdmissibilityReport {
    bool admissible = true;
    std::vector<VoltageViolation> voltage_violations;
    std::vector<CurrentViolation> current_violations;
    double worst_violation = 0.0;
};

/// Flags every bus voltage outside [v_lo - slack, v_hi + slack] and every branch
/// current above l_max + slack. Non-converged points raise LoadFlowError.
AdmissibilityReport check_admissible(const net::Network& net, const OperatingPoint& op, double slack = 0.0);

}  // namespace dhc::lf
