#pragma once

#include "dhc/cia/envelopes.hpp"
#include "dhc/cia/linearization.hpp"
#include "dhc/conic/problem.hpp"
#include "dhc/fairness/scenario.hpp"
#include "dhc/net_model/compact_matrices.hpp"
#include "dhc/net_model/network.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace dhc::cia {

/// upper: p_g >= 0 and the scenario objective is maximized;
/// lower: p_g <= 0 and the weighted linear sum is minimized.
enum class Direction { upper, lower };

std::string_view to_string(Direction d);

/// The convex program with handles to its variable blocks. Branch-indexed
/// blocks have length N; pg follows net.generator_buses().
struct P1Model {
    conic::ConicProblem problem;
    conic::VarBlock pg, l_plus, l_minus, P_plus, P_minus, Q_plus, Q_minus, V_plus, V_minus;
    std::optional<conic::VarBlock> w;  ///< conservative epigraph variable
    std::vector<double> weights;       ///< objective weights per generator
    std::size_t soc_blocks = 0;
    std::size_t quadratic_corners = 0;
};

/// Objective weights for a scenario: ones, or demand shares at the generator buses.
std::vector<double> scenario_weights(const net::Network& net, const fair::Scenario& scenario,
                                     const Eigen::VectorXd& p_d);

/// Builds the convex inner approximation for one direction. Demand comes from
/// the linearization snapshot; q_g is fixed to zero. Fairness rows are added to
/// the upper direction only. Throws ModelError when the topology yields a
/// negative D_R entry or when proportional fairness meets a zero demand share.
P1Model build_p1(const net::Network& net, const net::CompactMatrices& m, const Linearization& lin,
                 const fair::Scenario& scenario, BoundVariant variant, Direction direction);

}  // namespace dhc::cia
