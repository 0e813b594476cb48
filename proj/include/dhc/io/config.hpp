#pragma once

#include "dhc/common/time.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dhc::io {

/// Everything a CLI run needs. Keys of the JSON config file match the long
/// flag names with dashes turned into underscores.
struct RunConfig {
    std::filesystem::path network;
    std::filesystem::path demand;
    std::filesystem::path pv;
    std::filesystem::path moer;
    std::filesystem::path out = "out";
    std::string scenario = "s1";
    std::string variant = "soc";
    std::optional<double> epsilon;
    std::vector<double> dc_grid;
    double lambda_curt = 0.20;
    double lambda_co2 = 100.0;
    double m_pv = 40.0;
    DaytimeWindow daytime;
    std::uint64_t seed = 1;
    int iterations = 1;
    std::size_t samples = 10000;
    std::size_t workers = 0;
};

/// Reads a JSON object of RunConfig keys on top of `base`. Relative paths are
/// resolved against the config file's directory. Throws InputError with line
/// and column on malformed JSON and on unknown keys or wrong value types.
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

/// "0,0.05,0.1" or "start:step:stop" (inclusive stop, tolerant to rounding).
std::vector<double> parse_dc_grid(const std::string& text);

/// Throws InputError unless the referenced inputs exist and the scenario,
/// variant and epsilon are valid. `need` lists the keys the subcommand reads.
void validate_config(const RunConfig& c, const std::vector<std::string>& need);

/// Collects output files in memory and writes them only when every step of a
/// run succeeded, each via a temporary file renamed into place.
class OutputSet {
public:
    void add(const std::string& name, std::string content);
    /// Creates the directory when needed; returns the written paths.
    std::vector<std::filesystem::path> commit(const std::filesystem::path& dir) const;

private:
    std::map<std::string, std::string> files_;
};

}  // namespace dhc::io
