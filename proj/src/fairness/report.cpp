#include "dhc/fairness/report.hpp"

#include "dhc/common/error.hpp"
#include "dhc/fairness/jfi.hpp"

#include <fmt/core.h>

namespace dhc::fair {

FairnessReport fairness_report(const net::Network& net, const cia::DhcSeries& dhc, const cia::DemandSeries& demand) {
    if (demand.steps() != dhc.steps.size()) {
        throw InputError(fmt::format("demand has {} steps but the DHC series has {}", demand.steps(), dhc.steps.size()));
    }
    for (std::size_t t = 0; t < demand.steps(); ++t) {
        if (demand.timestamps[t] != dhc.steps[t].timestamp) {
            throw InputError(fmt::format("demand and DHC series disagree at step {} ({} vs {})", t,
                                         format_rfc3339(demand.timestamps[t]), format_rfc3339(dhc.steps[t].timestamp)));
        }
    }
    std::vector<std::size_t> columns;  // demand column of each DHC generator
    for (int id : dhc.bus_ids) {
        const auto bus = net.bus_index(id);
        if (bus == 0 || !net.is_generator(bus)) {
            throw InputError(fmt::format("DHC node {} is not a generation node of network '{}'", id, net.name()));
        }
        columns.push_back(bus - 1);
    }

    FairnessReport r;
    r.scenario = dhc.scenario;
    const auto solved = dhc.solved_steps();
    std::vector<std::size_t> keep;  // positions in dhc.bus_ids
    for (std::size_t g = 0; g < columns.size(); ++g) {
        bool positive = true;
        for (auto t : solved) {
            positive = positive && demand.p_pu(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(columns[g])) > 0.0;
        }
        if (positive) {
            keep.push_back(g);
            r.bus_ids.push_back(dhc.bus_ids[g]);
        } else {
            r.excluded_bus_ids.push_back(dhc.bus_ids[g]);
        }
    }

    const auto T = static_cast<Eigen::Index>(solved.size());
    const auto G = static_cast<Eigen::Index>(keep.size());
    r.rho.resize(T, G);
    for (Eigen::Index s = 0; s < T; ++s) {
        const auto t = solved[static_cast<std::size_t>(s)];
        r.timestamps.push_back(dhc.steps[t].timestamp);
        const auto& box = *dhc.steps[t].box;
        for (Eigen::Index j = 0; j < G; ++j) {
            const auto g = keep[static_cast<std::size_t>(j)];
            const double pd_mw = net.pu_to_mw(demand.p_pu(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(columns[g])));
            r.rho(s, j) = box.p_plus_mw(static_cast<Eigen::Index>(g)) / pd_mw;
        }
    }

    auto as_vector = [](const auto& v) { return std::vector<double>(v.begin(), v.end()); };
    r.temporal_jfi = Eigen::VectorXd::Zero(G);
    if (T > 0) {
        for (Eigen::Index j = 0; j < G; ++j) {
            r.temporal_jfi(j) = jfi(as_vector(r.rho.col(j)));
        }
    }
    r.spatial_jfi = Eigen::VectorXd::Zero(T);
    if (G > 0) {
        for (Eigen::Index s = 0; s < T; ++s) {
            r.spatial_jfi(s) = jfi(as_vector(r.rho.row(s)));
        }
    }
    return r;
}

}  // namespace dhc::fair
