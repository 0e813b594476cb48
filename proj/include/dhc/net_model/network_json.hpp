#pragma once

#include "dhc/net_model/network.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>

#include <nlohmann/json_fwd.hpp>

namespace dhc::net {

/// Reads the feeder JSON schema:
///
///   {s_base_mva, v_base_kv, v0_pu,
///    buses:    [{id, p_demand_kw, q_demand_kvar, is_generator}],
///    branches: [{from, to, r_pu, x_pu, [i_max_pu], [p_max_pu], [q_max_pu]}],
///    limits:   {v_lo_pu, v_hi_pu}}
///
/// The first bus listed is the substation. Throws InputError on schema problems.
FeederSpec feeder_from_json(const nlohmann::json& doc);
nlohmann::json feeder_to_json(const FeederSpec& spec);

/// 1-based (line, column) of a byte offset as reported by the JSON parser.
std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte);

FeederSpec load_feeder_file(const std::filesystem::path& path);
Network load_network_file(const std::filesystem::path& path);

}  // namespace dhc::net
