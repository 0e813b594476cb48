#include "dhc/net_model/network_json.hpp"

#include "dhc/common/error.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/core.h>
#include <nlohmann/json.hpp>

namespace dhc::net {

namespace {

template <typename T>
T required(const nlohmann::json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        throw InputError(fmt::format("{}: missing field '{}'", where, key));
    }
    try {
        return it->get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw InputError(fmt::format("{}: field '{}' has the wrong type ({})", where, key, e.what()));
    }
}

template <typename T>
T optional_field(const nlohmann::json& obj, const char* key, T fallback) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) {
        return fallback;
    }
    return it->get<T>();
}

std::optional<double> optional_number(const nlohmann::json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) {
        return std::nullopt;
    }
    return it->get<double>();
}

}  // namespace

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
    // nlohmann reports the 1-based position just past the offending character
    const auto end = std::min(byte == 0 ? 0 : byte - 1, text.size());
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i < end; ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return {line, column};
}

FeederSpec feeder_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) {
        throw InputError("network file: top level must be an object");
    }
    FeederSpec spec;
    spec.name = optional_field<std::string>(doc, "name", "");
    spec.s_base_mva = required<double>(doc, "s_base_mva", "network");
    spec.v_base_kv = required<double>(doc, "v_base_kv", "network");
    spec.v0_pu = optional_field<double>(doc, "v0_pu", 1.0);
    if (auto lim = doc.find("limits"); lim != doc.end()) {
        spec.v_lo_pu = optional_field<double>(*lim, "v_lo_pu", 0.95);
        spec.v_hi_pu = optional_field<double>(*lim, "v_hi_pu", 1.05);
    }
    const auto& buses = doc.at("buses");
    for (std::size_t i = 0; i < buses.size(); ++i) {
        const auto where = fmt::format("buses[{}]", i);
        BusSpec b;
        b.id = required<int>(buses[i], "id", where);
        b.p_demand_kw = optional_field<double>(buses[i], "p_demand_kw", 0.0);
        b.q_demand_kvar = optional_field<double>(buses[i], "q_demand_kvar", 0.0);
        b.is_generator = optional_field<bool>(buses[i], "is_generator", false);
        spec.buses.push_back(b);
    }
    const auto& branches = doc.at("branches");
    for (std::size_t i = 0; i < branches.size(); ++i) {
        const auto where = fmt::format("branches[{}]", i);
        BranchSpec br;
        br.from = required<int>(branches[i], "from", where);
        br.to = required<int>(branches[i], "to", where);
        br.r_pu = required<double>(branches[i], "r_pu", where);
        br.x_pu = required<double>(branches[i], "x_pu", where);
        br.current_limit_pu = optional_number(branches[i], "i_max_pu");
        br.p_limit_pu = optional_number(branches[i], "p_max_pu");
        br.q_limit_pu = optional_number(branches[i], "q_max_pu");
        spec.branches.push_back(br);
    }
    return spec;
}

nlohmann::json feeder_to_json(const FeederSpec& spec) {
    nlohmann::json doc;
    if (!spec.name.empty()) {
        doc["name"] = spec.name;
    }
    doc["s_base_mva"] = spec.s_base_mva;
    doc["v_base_kv"] = spec.v_base_kv;
    doc["v0_pu"] = spec.v0_pu;
    doc["limits"] = {{"v_lo_pu", spec.v_lo_pu}, {"v_hi_pu", spec.v_hi_pu}};
    doc["buses"] = nlohmann::json::array();
    for (const auto& b : spec.buses) {
        doc["buses"].push_back({{"id", b.id},
                                {"p_demand_kw", b.p_demand_kw},
                                {"q_demand_kvar", b.q_demand_kvar},
                                {"is_generator", b.is_generator}});
    }
    doc["branches"] = nlohmann::json::array();
    for (const auto& br : spec.branches) {
        nlohmann::json j{{"from", br.from}, {"to", br.to}, {"r_pu", br.r_pu}, {"x_pu", br.x_pu}};
        if (br.current_limit_pu) {
            j["i_max_pu"] = *br.current_limit_pu;
        }
        if (br.p_limit_pu) {
            j["p_max_pu"] = *br.p_limit_pu;
        }
        if (br.q_limit_pu) {
            j["q_max_pu"] = *br.q_limit_pu;
        }
        doc["branches"].push_back(j);
    }
    return doc;
}

FeederSpec load_feeder_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError(fmt::format("cannot open network file '{}'", path.string()));
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        const auto [line, column] = line_column(text, e.byte);
        throw InputError(fmt::format("{}:{}:{}: JSON parse error: {}", path.string(), line, column, e.what()));
    }
    try {
        return feeder_from_json(doc);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(fmt::format("{}: {}", path.string(), e.what()));
    }
}

Network load_network_file(const std::filesystem::path& path) {
    return build_network(load_feeder_file(path));
}

}  // namespace dhc::net
