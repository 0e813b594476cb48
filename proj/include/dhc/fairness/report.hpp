#pragma once

#include "dhc/cia/dhc_series.hpp"
#include "dhc/net_model/network.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace dhc::fair {

/// Hosting capacity relative to demand over the solved steps of a series.
struct FairnessReport {
    std::string scenario;
    std::vector<int> bus_ids;           ///< generator nodes with positive demand at every solved step
    std::vector<int> excluded_bus_ids;  ///< generator nodes dropped for nonpositive demand
    std::vector<Timestamp> timestamps;  ///< solved steps
    Eigen::MatrixXd rho;                ///< steps x bus_ids, p+ / p_d
    Eigen::VectorXd temporal_jfi;       ///< per node, over time
    Eigen::VectorXd spatial_jfi;        ///< per step, over nodes
};

/// Builds the ratio matrix and both Jain indices. Steps that are not solved are
/// skipped. Throws InputError when the demand series and the DHC series do not
/// share timestamps or generator nodes.
FairnessReport fairness_report(const net::Network& net, const cia::DhcSeries& dhc, const cia::DemandSeries& demand);

}  // namespace dhc::fair
