#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>

namespace dhc {

using Timestamp = std::chrono::sys_seconds;

/// Parses "YYYY-MM-DDTHH:MM:SS" followed by "Z" or a "+HH:MM"/"-HH:MM" offset.
/// A space is accepted in place of 'T'. Throws InputError on malformed text.
Timestamp parse_rfc3339(std::string_view text);

/// Formats as "YYYY-MM-DDTHH:MM:SSZ".
std::string format_rfc3339(Timestamp t);

/// Seconds since local midnight (timestamps are treated as local wall time).
std::int64_t seconds_of_day(Timestamp t);

/// Half-open window [start, end) in seconds after midnight.
struct DaytimeWindow {
    std::int64_t start_s = 6 * 3600;
    std::int64_t end_s = 20 * 3600;

    bool contains(Timestamp t) const {
        const auto s = seconds_of_day(t);
        return s >= start_s && s < end_s;
    }
};

/// Parses "HH:MM-HH:MM".
DaytimeWindow parse_daytime_window(std::string_view text);
std::string format_daytime_window(const DaytimeWindow& w);

}  // namespace dhc
