#pragma once

#include "dhc/cia/hosting_capacity.hpp"
#include "dhc/common/time.hpp"
#include "dhc/net_model/network.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dhc::cia {

/// Demand per step for buses 1..N (columns follow the internal bus order), per unit.
struct DemandSeries {
    std::vector<Timestamp> timestamps;
    Eigen::MatrixXd p_pu;  ///< steps x N
    Eigen::MatrixXd q_pu;  ///< steps x N

    std::size_t steps() const { return timestamps.size(); }
    Eigen::VectorXd p_at(std::size_t t) const { return p_pu.row(static_cast<Eigen::Index>(t)).transpose(); }
    Eigen::VectorXd q_at(std::size_t t) const { return q_pu.row(static_cast<Eigen::Index>(t)).transpose(); }
};

/// Step length in seconds of strictly increasing, evenly spaced timestamps
/// (0 for a single step). Throws InputError otherwise.
std::int64_t uniform_step_seconds(const std::vector<Timestamp>& timestamps);

/// Builds a series from active demand in kW (steps x N). Reactive demand keeps
/// each bus's nominal q/p ratio; a bus with zero nominal p keeps its nominal q.
DemandSeries demand_from_kw(const net::Network& net, std::vector<Timestamp> timestamps, const Eigen::MatrixXd& p_kw);

/// The nominal snapshot repeated at every timestamp.
DemandSeries constant_demand(const net::Network& net, std::vector<Timestamp> timestamps);

/// Every demand value multiplied by `factor`.
DemandSeries scaled(const DemandSeries& demand, double factor);

enum class StepStatus { solved, night, failed };

std::string_view to_string(StepStatus s);
StepStatus step_status_from_string(std::string_view s);

struct DhcStep {
    Timestamp timestamp{};
    StepStatus status = StepStatus::night;
    std::optional<Hyperrectangle> box;  ///< set when solved
    std::string error;                  ///< set when failed
};

struct DhcSeries {
    std::string scenario;
    BoundVariant variant = BoundVariant::soc;
    std::vector<int> bus_ids;  ///< generator ids, the column order of every box
    std::int64_t step_seconds = 0;
    DaytimeWindow daytime;
    std::vector<DhcStep> steps;

    std::size_t count(StepStatus s) const;
    /// Indices of the solved steps in time order.
    std::vector<std::size_t> solved_steps() const;
};

struct DhcOptions {
    HcOptions hc;
    DaytimeWindow daytime;
    std::size_t workers = 0;
};

/// One independent hosting-capacity solve per daytime step. Night steps are
/// marked and skipped; a step whose load flow or solve fails is marked with
/// its error and the series continues. Throws InputError for an empty or
/// unevenly spaced series and when the demand width does not match the network.
DhcSeries dhc_timeseries(const net::Network& net, const net::CompactMatrices& m, const DemandSeries& demand,
                         const fair::Scenario& scenario, BoundVariant variant, const DhcOptions& options = {});

}  // namespace dhc::cia
