#pragma once

#include "dhc/loadflow/loadflow.hpp"

#include <array>
#include <cstddef>
#include <string_view>
#include <vector>

namespace dhc::lf {

enum class CellClass { admissible, violation, nonconverged };

std::string_view to_string(CellClass c);
CellClass cell_class_from_string(std::string_view s);

/// Injection window in MW for the two swept generator buses (external ids).
/// An axis whose min equals max collapses to a single sample.
struct SweepGrid {
    std::array<int, 2> bus_ids{};
    std::array<double, 2> min_mw{};
    std::array<double, 2> max_mw{};
    std::array<std::size_t, 2> resolution{2, 2};
};

struct SweepCell {
    double pg_a_mw = 0.0;
    double pg_b_mw = 0.0;
    CellClass cls = CellClass::admissible;
};

/// Row-major raster: cell (i, j) sits at i * cols + j, i along the first bus.
struct SweepRaster {
    std::array<int, 2> bus_ids{};
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<SweepCell> cells;

    const SweepCell& at(std::size_t i, std::size_t j) const { return cells.at(i * cols + j); }
    std::size_t count(CellClass c) const;
};

/// Evaluates the load-flow oracle on every grid cell with the network's nominal
/// demand and q_g = 0. Throws LoadFlowError if a bus is not a generator or the
/// grid is malformed. Cells are independent and may run on `workers` threads.
SweepRaster sweep_admissible_set(const net::Network& net, const SweepGrid& grid, std::size_t workers = 0,
                                 const LoadFlowOptions& options = {});

}  // namespace dhc::lf
