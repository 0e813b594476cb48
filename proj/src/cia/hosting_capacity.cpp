#include "dhc/cia/hosting_capacity.hpp"

#include "dhc/common/error.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

namespace dhc::cia {

double Hyperrectangle::volume() const { return (p_plus_mw - p_minus_mw).prod(); }

bool Hyperrectangle::contains(const Hyperrectangle& other, double tol) const {
    if (other.bus_ids != bus_ids) {
        return false;
    }
    for (Eigen::Index i = 0; i < p_plus_mw.size(); ++i) {
        if (other.p_plus_mw(i) > p_plus_mw(i) + tol || other.p_minus_mw(i) < p_minus_mw(i) - tol) {
            return false;
        }
    }
    return true;
}

Eigen::VectorXd nominal_p_demand(const net::Network& net) {
    return Eigen::Map<const Eigen::VectorXd>(net.p_demand().data(), static_cast<Eigen::Index>(net.branch_count()));
}

Eigen::VectorXd nominal_q_demand(const net::Network& net) {
    return Eigen::Map<const Eigen::VectorXd>(net.q_demand().data(), static_cast<Eigen::Index>(net.branch_count()));
}

Eigen::VectorXd generation_vector(const net::Network& net, const Eigen::VectorXd& pg_mw) {
    const auto& gens = net.generator_buses();
    if (static_cast<std::size_t>(pg_mw.size()) != gens.size()) {
        throw ModelError("generation vector does not match the generator count");
    }
    Eigen::VectorXd p = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(net.branch_count()));
    for (std::size_t g = 0; g < gens.size(); ++g) {
        p(static_cast<Eigen::Index>(gens[g] - 1)) = net.mw_to_pu(pg_mw(static_cast<Eigen::Index>(g)));
    }
    return p;
}

namespace {

Eigen::VectorXd solve_direction(const net::Network& net, const net::CompactMatrices& m, const Linearization& lin,
                                const fair::Scenario& scenario, BoundVariant variant, Direction direction,
                                const HcOptions& options, conic::SolveStats& stats) {
    const auto model = build_p1(net, m, lin, scenario, variant, direction);
    const auto sol = conic::solve(model.problem, options.solver);
    stats = sol.stats;
    if (!sol.optimal()) {
        throw HostingCapacityError(fmt::format(
            "{} solve of scenario {} ({} bounds) ended {}: {} iterations, primal residual {:.2e}, dual residual "
            "{:.2e}, max violation {:.2e}",
            to_string(direction), scenario.name, to_string(variant), conic::to_string(sol.status),
            sol.stats.iterations, sol.stats.primal_residual, sol.stats.dual_residual, sol.stats.max_violation));
    }
    Eigen::VectorXd pg = sol.value(model.pg);
    // the solves are anchored at zero injection
    if (direction == Direction::upper) {
        return pg.cwiseMax(0.0);
    }
    return pg.cwiseMin(0.0);
}

}  // namespace

Hyperrectangle solve_hc(const net::Network& net, const net::CompactMatrices& m, const Eigen::VectorXd& p_d,
                        const Eigen::VectorXd& q_d, const fair::Scenario& scenario, BoundVariant variant,
                        const HcOptions& options) {
    if (options.max_iterations < 1) {
        throw ModelError("at least one linearization is required");
    }
    Hyperrectangle box;
    box.scenario = scenario.name;
    box.variant = variant;
    for (auto bus : net.generator_buses()) {
        box.bus_ids.push_back(net.bus_id(bus));
    }

    Linearization lin = linearize(net, p_d, q_d);
    Eigen::VectorXd up_pu, lo_pu;
    for (int it = 1; it <= options.max_iterations; ++it) {
        box.iterations = it;
        const Eigen::VectorXd up =
            solve_direction(net, m, lin, scenario, variant, Direction::upper, options, box.upper_stats);
        const Eigen::VectorXd lo =
            solve_direction(net, m, lin, scenario, variant, Direction::lower, options, box.lower_stats);
        double change = std::numeric_limits<double>::infinity();
        if (it > 1) {
            change = std::max((up - up_pu).cwiseAbs().maxCoeff(), (lo - lo_pu).cwiseAbs().maxCoeff());
        }
        up_pu = up;
        lo_pu = lo;
        if (change < options.tolerance_pu || it == options.max_iterations) {
            break;
        }
        Eigen::VectorXd mid_mw(up.size());
        for (Eigen::Index g = 0; g < up.size(); ++g) {
            mid_mw(g) = net.pu_to_mw(0.5 * (up(g) + lo(g)));
        }
        lin = linearize(net, p_d, q_d, generation_vector(net, mid_mw));
    }
    box.p_plus_mw = up_pu * net.s_base_mva();
    box.p_minus_mw = lo_pu * net.s_base_mva();
    return box;
}

}  // namespace dhc::cia
