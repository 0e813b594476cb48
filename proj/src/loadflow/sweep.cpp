#include "dhc/loadflow/sweep.hpp"

#include "dhc/common/error.hpp"
#include "dhc/common/parallel.hpp"

#include <cmath>

#include <fmt/core.h>

namespace dhc::lf {

std::string_view to_string(CellClass c) {
    switch (c) {
    case CellClass::admissible:
        return "admissible";
    case CellClass::violation:
        return "violation";
    case CellClass::nonconverged:
        return "nonconverged";
    }
    return "unknown";
}

CellClass cell_class_from_string(std::string_view s) {
    if (s == "admissible") {
        return CellClass::admissible;
    }
    if (s == "violation") {
        return CellClass::violation;
    }
    if (s == "nonconverged") {
        return CellClass::nonconverged;
    }
    throw InputError(fmt::format("unknown cell class '{}'", s));
}

std::size_t SweepRaster::count(CellClass c) const {
    std::size_t n = 0;
    for (const auto& cell : cells) {
        n += cell.cls == c ? 1 : 0;
    }
    return n;
}

namespace {

std::vector<double> axis(double lo, double hi, std::size_t resolution) {
    if (lo == hi) {
        return {lo};
    }
    std::vector<double> values(resolution);
    for (std::size_t i = 0; i < resolution; ++i) {
        values[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(resolution - 1);
    }
    return values;
}

}  // namespace

SweepRaster sweep_admissible_set(const net::Network& net, const SweepGrid& grid, std::size_t workers,
                                 const LoadFlowOptions& options) {
    std::array<std::size_t, 2> bus{};
    for (int a = 0; a < 2; ++a) {
        bus[a] = net.bus_index(grid.bus_ids[a]);
        if (!net.is_generator(bus[a])) {
            throw LoadFlowError(fmt::format("sweep bus {} is not a generation node", grid.bus_ids[a]));
        }
        if (grid.resolution[a] < 2) {
            throw LoadFlowError("sweep resolution must be at least 2 per axis");
        }
        if (!(grid.min_mw[a] <= grid.max_mw[a]) || !std::isfinite(grid.min_mw[a]) || !std::isfinite(grid.max_mw[a])) {
            throw LoadFlowError(fmt::format("invalid sweep range for bus {}", grid.bus_ids[a]));
        }
    }
    if (bus[0] == bus[1]) {
        throw LoadFlowError("sweep needs two distinct buses");
    }

    const auto xa = axis(grid.min_mw[0], grid.max_mw[0], grid.resolution[0]);
    const auto xb = axis(grid.min_mw[1], grid.max_mw[1], grid.resolution[1]);

    SweepRaster raster;
    raster.bus_ids = grid.bus_ids;
    raster.rows = xa.size();
    raster.cols = xb.size();
    raster.cells.resize(raster.rows * raster.cols);

    const auto n = static_cast<Eigen::Index>(net.branch_count());
    const Eigen::VectorXd p_d = Eigen::Map<const Eigen::VectorXd>(net.p_demand().data(), n);
    const Eigen::VectorXd q_d = Eigen::Map<const Eigen::VectorXd>(net.q_demand().data(), n);

    parallel_for(raster.cells.size(), workers, [&](std::size_t idx) {
        const auto i = idx / raster.cols;
        const auto j = idx % raster.cols;
        Eigen::VectorXd p = -p_d;
        p(static_cast<Eigen::Index>(bus[0] - 1)) += net.mw_to_pu(xa[i]);
        p(static_cast<Eigen::Index>(bus[1] - 1)) += net.mw_to_pu(xb[j]);
        const auto op = solve_loadflow(net, p, -q_d, options);
        SweepCell cell{xa[i], xb[j], CellClass::nonconverged};
        if (op.converged) {
            cell.cls = check_admissible(net, op).admissible ? CellClass::admissible : CellClass::violation;
        }
        raster.cells[idx] = cell;
    });
    return raster;
}

}  // namespace dhc::lf
