#pragma once

#include "dhc/cia/envelopes.hpp"
#include "dhc/cia/p1.hpp"
#include "dhc/conic/solver.hpp"
#include "dhc/fairness/scenario.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace dhc::cia {

/// Per-generator injection interval [p_minus, p_plus] in MW.
struct Hyperrectangle {
    std::vector<int> bus_ids;
    Eigen::VectorXd p_minus_mw;
    Eigen::VectorXd p_plus_mw;
    std::string scenario;
    BoundVariant variant = BoundVariant::soc;
    int iterations = 0;
    conic::SolveStats upper_stats;
    conic::SolveStats lower_stats;

    std::size_t size() const { return bus_ids.size(); }
    double aggregate_plus_mw() const { return p_plus_mw.sum(); }
    double aggregate_minus_mw() const { return p_minus_mw.sum(); }
    /// Product of interval widths (MW^n).
    double volume() const;
    /// True when every interval of `other` lies inside this one (with tolerance).
    bool contains(const Hyperrectangle& other, double tol = 0.0) const;
};

struct HcOptions {
    /// Number of linearizations; 1 reproduces the single-pass result.
    int max_iterations = 1;
    /// Stop relinearizing when no endpoint moves more than this (pu).
    double tolerance_pu = 1e-4;
    conic::SolverOptions solver;
};

/// Solves P1 twice (upper, then lower) for a demand snapshot (pu, length N).
/// Later iterations relinearize at the interval midpoint. Throws
/// HostingCapacityError when a solve is not optimal.
Hyperrectangle solve_hc(const net::Network& net, const net::CompactMatrices& m, const Eigen::VectorXd& p_d,
                        const Eigen::VectorXd& q_d, const fair::Scenario& scenario, BoundVariant variant,
                        const HcOptions& options = {});

/// Network nominal demand as vectors.
Eigen::VectorXd nominal_p_demand(const net::Network& net);
Eigen::VectorXd nominal_q_demand(const net::Network& net);

/// Generation vector (pu, length N) with the given MW values at the generator buses.
Eigen::VectorXd generation_vector(const net::Network& net, const Eigen::VectorXd& pg_mw);

}  // namespace dhc::cia
