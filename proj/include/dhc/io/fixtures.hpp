#pragma once

#include "dhc/cia/dhc_series.hpp"
#include "dhc/economics/pv_economics.hpp"
#include "dhc/net_model/network.hpp"

#include <cstdint>

namespace dhc::io {

/// Deterministic synthetic inputs standing in for measured feeder demand,
/// panel output and grid marginal emissions. Identical seeds give identical
/// series on every platform (64-bit Mersenne Twister, hand-rolled transforms).
struct FixtureOptions {
    std::uint64_t seed = 1;
    int year = 2023;
    unsigned demand_month = 7;
    unsigned demand_day = 3;
    double aggregate_min_kw = 660.0;
    double aggregate_max_kw = 1440.0;
    double panel_kw = 0.33;
    double latitude_deg = 44.5;
    std::int64_t step_seconds = 300;
};

/// One day of demand at every bus with nominal load. The aggregate follows a
/// residential shape rescaled to [aggregate_min_kw, aggregate_max_kw]; each bus
/// keeps its nominal share up to smooth per-bus noise.
cia::DemandSeries synthetic_demand_day(const net::Network& net, const FixtureOptions& options = {});

/// One year of reference-panel output (kW): clear-sky elevation model with
/// day-to-day cloud regimes, zero outside 06:00-20:00.
econ::TimeSeries synthetic_pv_year(const FixtureOptions& options = {});

/// One year of marginal emissions in lb/MWh with daily and seasonal cycles.
econ::TimeSeries synthetic_moer_year(const FixtureOptions& options = {});

}  // namespace dhc::io
