#include "dhc/cia/dhc_series.hpp"

#include "dhc/common/error.hpp"
#include "dhc/common/parallel.hpp"

#include <fmt/core.h>

#include <algorithm>

namespace dhc::cia {

std::int64_t uniform_step_seconds(const std::vector<Timestamp>& timestamps) {
    if (timestamps.empty()) {
        throw InputError("time series is empty");
    }
    if (timestamps.size() == 1) {
        return 0;
    }
    const auto step = (timestamps[1] - timestamps[0]).count();
    for (std::size_t t = 1; t < timestamps.size(); ++t) {
        const auto d = (timestamps[t] - timestamps[t - 1]).count();
        if (d <= 0) {
            throw InputError(fmt::format("timestamps must be strictly increasing ({} follows {})",
                                         format_rfc3339(timestamps[t]), format_rfc3339(timestamps[t - 1])));
        }
        if (d != step) {
            throw InputError(fmt::format("uneven time step at {}: {} s instead of {} s", format_rfc3339(timestamps[t]),
                                         d, step));
        }
    }
    return step;
}

DemandSeries demand_from_kw(const net::Network& net, std::vector<Timestamp> timestamps, const Eigen::MatrixXd& p_kw) {
    const auto n = static_cast<Eigen::Index>(net.branch_count());
    if (p_kw.cols() != n || p_kw.rows() != static_cast<Eigen::Index>(timestamps.size())) {
        throw InputError(fmt::format("demand matrix is {}x{}, expected {}x{}", p_kw.rows(), p_kw.cols(),
                                     timestamps.size(), n));
    }
    DemandSeries d;
    d.timestamps = std::move(timestamps);
    d.p_pu = p_kw / (1000.0 * net.s_base_mva());
    d.q_pu.resize(p_kw.rows(), n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double p0 = net.p_demand()[static_cast<std::size_t>(k)];
        const double q0 = net.q_demand()[static_cast<std::size_t>(k)];
        if (p0 != 0.0) {
            d.q_pu.col(k) = d.p_pu.col(k) * (q0 / p0);
        } else {
            d.q_pu.col(k).setConstant(q0);
        }
    }
    return d;
}

DemandSeries constant_demand(const net::Network& net, std::vector<Timestamp> timestamps) {
    DemandSeries d;
    const auto steps = static_cast<Eigen::Index>(timestamps.size());
    d.timestamps = std::move(timestamps);
    d.p_pu = nominal_p_demand(net).transpose().replicate(steps, 1);
    d.q_pu = nominal_q_demand(net).transpose().replicate(steps, 1);
    return d;
}

DemandSeries scaled(const DemandSeries& demand, double factor) {
    DemandSeries d = demand;
    d.p_pu *= factor;
    d.q_pu *= factor;
    return d;
}

std::string_view to_string(StepStatus s) {
    switch (s) {
        case StepStatus::solved: return "solved";
        case StepStatus::night: return "night";
        case StepStatus::failed: return "failed";
    }
    return "?";
}

StepStatus step_status_from_string(std::string_view s) {
    if (s == "solved") return StepStatus::solved;
    if (s == "night") return StepStatus::night;
    if (s == "failed") return StepStatus::failed;
    throw InputError("unknown step status '" + std::string(s) + "'");
}

std::size_t DhcSeries::count(StepStatus s) const {
    return static_cast<std::size_t>(
        std::count_if(steps.begin(), steps.end(), [s](const DhcStep& st) { return st.status == s; }));
}

std::vector<std::size_t> DhcSeries::solved_steps() const {
    std::vector<std::size_t> out;
    for (std::size_t t = 0; t < steps.size(); ++t) {
        if (steps[t].status == StepStatus::solved) {
            out.push_back(t);
        }
    }
    return out;
}

DhcSeries dhc_timeseries(const net::Network& net, const net::CompactMatrices& m, const DemandSeries& demand,
                         const fair::Scenario& scenario, BoundVariant variant, const DhcOptions& options) {
    const auto n = static_cast<Eigen::Index>(net.branch_count());
    if (demand.p_pu.cols() != n || demand.q_pu.cols() != n ||
        demand.p_pu.rows() != static_cast<Eigen::Index>(demand.steps()) || demand.q_pu.rows() != demand.p_pu.rows()) {
        throw InputError(fmt::format("demand series width {} does not match the {} network buses", demand.p_pu.cols(), n));
    }
    DhcSeries series;
    series.step_seconds = uniform_step_seconds(demand.timestamps);
    series.scenario = scenario.name;
    series.variant = variant;
    series.daytime = options.daytime;
    for (auto bus : net.generator_buses()) {
        series.bus_ids.push_back(net.bus_id(bus));
    }
    series.steps.resize(demand.steps());

    parallel_for(demand.steps(), options.workers, [&](std::size_t t) {
        auto& step = series.steps[t];
        step.timestamp = demand.timestamps[t];
        if (!options.daytime.contains(step.timestamp)) {
            step.status = StepStatus::night;
            return;
        }
        try {
            step.box = solve_hc(net, m, demand.p_at(t), demand.q_at(t), scenario, variant, options.hc);
            step.status = StepStatus::solved;
        } catch (const Error& e) {
            step.status = StepStatus::failed;
            step.error = e.what();
        }
    });
    return series;
}

}  // namespace dhc::cia
