#include "dhc/io/config.hpp"

#include "dhc/common/error.hpp"
#include "dhc/fairness/scenario.hpp"
#include "dhc/net_model/network_json.hpp"

#include <fmt/core.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace dhc::io {

namespace {

template <typename T>
T get(const nlohmann::json& v, const std::string& key, const std::string& source) {
    try {
        return v.get<T>();
    } catch (const nlohmann::json::exception&) {
        throw InputError(fmt::format("{}: key '{}' has the wrong type ({})", source, key, v.type_name()));
    }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

}  // namespace

RunConfig load_config(const std::filesystem::path& path, RunConfig c) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError(fmt::format("cannot open config '{}'", path.string()));
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    const std::string source = path.string();
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        const auto [line, col] = net::line_column(text, e.byte);
        throw InputError(fmt::format("{}:{}:{}: invalid JSON ({})", source, line, col, e.what()));
    }
    if (!doc.is_object()) {
        throw InputError(fmt::format("{}: config must be a JSON object", source));
    }
    const auto dir = path.parent_path();
    for (const auto& [key, v] : doc.items()) {
        if (key == "network") c.network = resolve(dir, get<std::string>(v, key, source));
        else if (key == "demand") c.demand = resolve(dir, get<std::string>(v, key, source));
        else if (key == "pv") c.pv = resolve(dir, get<std::string>(v, key, source));
        else if (key == "moer") c.moer = resolve(dir, get<std::string>(v, key, source));
        else if (key == "out") c.out = resolve(dir, get<std::string>(v, key, source));
        else if (key == "scenario") c.scenario = get<std::string>(v, key, source);
        else if (key == "variant") c.variant = get<std::string>(v, key, source);
        else if (key == "epsilon") c.epsilon = get<double>(v, key, source);
        else if (key == "dc_grid") {
            c.dc_grid = v.is_string() ? parse_dc_grid(v.get<std::string>()) : get<std::vector<double>>(v, key, source);
        }
        else if (key == "lambda_curt") c.lambda_curt = get<double>(v, key, source);
        else if (key == "lambda_co2") c.lambda_co2 = get<double>(v, key, source);
        else if (key == "m_pv") c.m_pv = get<double>(v, key, source);
        else if (key == "daytime") c.daytime = parse_daytime_window(get<std::string>(v, key, source));
        else if (key == "seed") c.seed = get<std::uint64_t>(v, key, source);
        else if (key == "iterations") c.iterations = get<int>(v, key, source);
        else if (key == "samples") c.samples = get<std::size_t>(v, key, source);
        else if (key == "workers") c.workers = get<std::size_t>(v, key, source);
        else throw InputError(fmt::format("{}: unknown key '{}'", source, key));
    }
    return c;
}

std::vector<double> parse_dc_grid(const std::string& text) {
    auto number = [&](const std::string& s) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != s.size()) {
            throw InputError(fmt::format("capacity-increase grid '{}': '{}' is not a number", text, s));
        }
        return v;
    };
    std::vector<std::string> parts;
    const char sep = text.find(':') != std::string::npos ? ':' : ',';
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto end = std::min(text.find(sep, pos), text.size());
        parts.push_back(text.substr(pos, end - pos));
        pos = end + 1;
    }
    std::vector<double> grid;
    if (sep == ':') {
        if (parts.size() != 3) {
            throw InputError(fmt::format("capacity-increase grid '{}' must be start:step:stop", text));
        }
        const double a = number(parts[0]), h = number(parts[1]), b = number(parts[2]);
        if (!(h > 0.0) || b < a) {
            throw InputError(fmt::format("capacity-increase grid '{}' needs a positive step and stop >= start", text));
        }
        const auto n = static_cast<long>(std::floor((b - a) / h + 1e-9));
        for (long k = 0; k <= n; ++k) grid.push_back(a + h * static_cast<double>(k));
    } else {
        for (const auto& p : parts) grid.push_back(number(p));
    }
    return grid;
}

void validate_config(const RunConfig& c, const std::vector<std::string>& need) {
    auto require_file = [](const std::filesystem::path& p, const char* what) {
        if (p.empty()) {
            throw InputError(fmt::format("--{} is required", what));
        }
        if (!std::filesystem::is_regular_file(p)) {
            throw InputError(fmt::format("{} file '{}' does not exist", what, p.string()));
        }
    };
    for (const auto& key : need) {
        if (key == "network") require_file(c.network, "network");
        else if (key == "demand") require_file(c.demand, "demand");
        else if (key == "pv") require_file(c.pv, "pv");
        else if (key == "moer") require_file(c.moer, "moer");
    }
    fair::scenario_preset(c.scenario, c.epsilon);
    if (c.variant != "soc" && c.variant != "conservative" && c.variant != "both") {
        throw InputError(fmt::format("variant must be soc or conservative, got '{}'", c.variant));
    }
    if (c.iterations < 1) {
        throw InputError("iterations must be at least 1");
    }
    if (c.lambda_curt < 0.0 || c.lambda_co2 < 0.0 || c.m_pv < 0.0) {
        throw InputError("prices and intensities must be nonnegative");
    }
}

void OutputSet::add(const std::string& name, std::string content) { files_[name] = std::move(content); }

std::vector<std::filesystem::path> OutputSet::commit(const std::filesystem::path& dir) const {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw InputError(fmt::format("cannot create output directory '{}'", dir.string()));
    }
    std::vector<std::pair<std::filesystem::path, std::filesystem::path>> staged;
    for (const auto& [name, content] : files_) {
        const auto final_path = dir / name;
        auto tmp = final_path;
        tmp += ".tmp";
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << content;
        out.close();
        if (!out) {
            for (const auto& s : staged) std::filesystem::remove(s.first);
            std::filesystem::remove(tmp);
            throw InputError(fmt::format("cannot write '{}'", tmp.string()));
        }
        staged.emplace_back(tmp, final_path);
    }
    std::vector<std::filesystem::path> written;
    for (const auto& [tmp, final_path] : staged) {
        std::filesystem::rename(tmp, final_path, ec);
        if (ec) throw InputError(fmt::format("cannot move '{}' into place: {}", tmp.string(), ec.message()));
        written.push_back(final_path);
    }
    return written;
}

}  // namespace dhc::io
