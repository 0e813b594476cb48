#pragma once

#include "dhc/cia/dhc_series.hpp"
#include "dhc/economics/pv_economics.hpp"
#include "dhc/fairness/report.hpp"
#include "dhc/io/csv.hpp"
#include "dhc/net_model/network.hpp"

#include <filesystem>
#include <string>

namespace dhc::io {

/// Long format (timestamp, node_id, p_kw). Every timestamp must list the same
/// nodes; buses that never appear carry zero demand. Reactive demand follows
/// the nominal power factor. Throws InputError with line and column.
cia::DemandSeries parse_demand_csv(const CsvDocument& doc, const net::Network& net);
cia::DemandSeries read_demand_csv(const std::filesystem::path& path, const net::Network& net);
std::string demand_csv(const cia::DemandSeries& demand, const net::Network& net);

/// (timestamp, <value_column>) in time order.
econ::TimeSeries parse_series_csv(const CsvDocument& doc, std::string_view value_column);
econ::TimeSeries read_series_csv(const std::filesystem::path& path, std::string_view value_column);
std::string series_csv(const econ::TimeSeries& s, std::string_view schema, std::string_view value_column);

inline constexpr std::string_view kPvColumn = "p_kw";
inline constexpr std::string_view kMoerColumn = "moer_lb_per_mwh";

/// One row per step and node: (timestamp, node_id, pg_minus_mw, pg_plus_mw,
/// scenario, variant, status). Night and failed steps leave the bounds empty.
/// The schema line carries the step length and the daytime window.
std::string dhc_csv(const cia::DhcSeries& series);
cia::DhcSeries parse_dhc_csv(const CsvDocument& doc);
cia::DhcSeries read_dhc_csv(const std::filesystem::path& path);

std::string temporal_jfi_csv(const fair::FairnessReport& r);
std::string spatial_jfi_csv(const fair::FairnessReport& r);
/// Ratio matrix, one row per solved step and node.
std::string rho_csv(const fair::FairnessReport& r);

/// One row per capacity increase with aggregate energies, costs and profit.
std::string economics_csv(const econ::EconomicsReport& r);
/// Per-node energies and avoided emissions at every capacity increase.
std::string economics_nodes_csv(const econ::EconomicsReport& r);

}  // namespace dhc::io
