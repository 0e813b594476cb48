#pragma once

#include "dhc/cia/envelopes.hpp"
#include "dhc/cia/linearization.hpp"
#include "dhc/net_model/compact_matrices.hpp"
#include "dhc/net_model/network.hpp"

#include <Eigen/Dense>

#include <vector>

namespace dhc::cia {

/// One injection level of the envelope sweep. Currents are squared, per unit.
struct MaeSample {
    double pg_mw = 0.0;
    Eigen::VectorXd l_actual;
    Eigen::VectorXd l_soc;
    Eigen::VectorXd l_conservative;
    double mae_soc = 0.0;           ///< branch average of |l - l+_SOC|
    double mae_conservative = 0.0;  ///< branch average of |l - l+_conservative|
};

struct MaeReport {
    int bus_id = 0;
    std::vector<MaeSample> samples;
    Eigen::VectorXd branch_mae_soc;           ///< per-branch average over the sweep
    Eigen::VectorXd branch_mae_conservative;

    double mean_soc() const;
    double mean_conservative() const;
    /// Largest single-branch deviation |l - l+| anywhere in the sweep.
    double max_deviation_soc() const;
    double max_deviation_conservative() const;
};

struct MaeSweep {
    int bus_id = 0;
    double min_mw = -1.2;
    double max_mw = 2.0;
    int points = 161;
};

/// Injects p_g at one generator (all others at zero) under the linearization's
/// demand, runs the load flow, and evaluates both upper envelopes at the
/// self-consistent proxy point started from the load-flow currents. Throws
/// LoadFlowError if any sweep point diverges and NetworkError for a
/// non-generator bus.
MaeReport envelope_mae(const net::Network& net, const net::CompactMatrices& m, const Linearization& lin,
                       const MaeSweep& sweep, std::size_t workers = 0);

}  // namespace dhc::cia
