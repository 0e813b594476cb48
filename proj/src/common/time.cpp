#include "dhc/common/time.hpp"

#include "dhc/common/error.hpp"

#include <fmt/core.h>

#include <charconv>
#include <cstdio>

namespace dhc {

namespace {

int parse_int(std::string_view text, std::size_t pos, std::size_t len, std::string_view whole) {
    if (pos + len > text.size()) {
        throw InputError("malformed timestamp '" + std::string(whole) + "'");
    }
    int value = 0;
    const char* first = text.data() + pos;
    const char* last = first + len;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        throw InputError("malformed timestamp '" + std::string(whole) + "'");
    }
    return value;
}

void expect_char(std::string_view text, std::size_t pos, std::string_view allowed, std::string_view whole) {
    if (pos >= text.size() || allowed.find(text[pos]) == std::string_view::npos) {
        throw InputError("malformed timestamp '" + std::string(whole) + "'");
    }
}

}  // namespace

Timestamp parse_rfc3339(std::string_view text) {
    using namespace std::chrono;
    expect_char(text, 4, "-", text);
    expect_char(text, 7, "-", text);
    expect_char(text, 10, "Tt ", text);
    expect_char(text, 13, ":", text);
    expect_char(text, 16, ":", text);
    const int y = parse_int(text, 0, 4, text);
    const int mo = parse_int(text, 5, 2, text);
    const int d = parse_int(text, 8, 2, text);
    const int hh = parse_int(text, 11, 2, text);
    const int mm = parse_int(text, 14, 2, text);
    const int ss = parse_int(text, 17, 2, text);

    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || hh > 23 || mm > 59 || ss > 60) {
        throw InputError("invalid date/time in timestamp '" + std::string(text) + "'");
    }

    std::size_t pos = 19;
    // fractional seconds are accepted and truncated
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
            ++pos;
        }
    }
    std::int64_t offset_s = 0;
    if (pos < text.size() && (text[pos] == 'Z' || text[pos] == 'z')) {
        ++pos;
    } else if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
        const int sign = text[pos] == '+' ? 1 : -1;
        expect_char(text, pos + 3, ":", text);
        const int oh = parse_int(text, pos + 1, 2, text);
        const int om = parse_int(text, pos + 4, 2, text);
        offset_s = sign * (oh * 3600 + om * 60);
        pos += 6;
    }
    if (pos != text.size()) {
        throw InputError("trailing characters in timestamp '" + std::string(text) + "'");
    }
    const auto local = sys_days{ymd} + hours{hh} + minutes{mm} + seconds{ss};
    return Timestamp{local.time_since_epoch() - seconds{offset_s}};
}

std::string format_rfc3339(Timestamp t) {
    using namespace std::chrono;
    const auto dp = floor<days>(t);
    const year_month_day ymd{dp};
    const hh_mm_ss hms{t - dp};
    return fmt::format("{:04d}-{:02d}-{:02d}T{:02d}:{:02d}:{:02d}Z", static_cast<int>(ymd.year()),
                       static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), hms.hours().count(),
                       hms.minutes().count(), hms.seconds().count());
}

std::int64_t seconds_of_day(Timestamp t) {
    using namespace std::chrono;
    return (t - floor<days>(t)).count();
}

DaytimeWindow parse_daytime_window(std::string_view text) {
    // HH:MM-HH:MM
    if (text.size() != 11 || text[2] != ':' || text[5] != '-' || text[8] != ':') {
        throw InputError("daytime window must look like HH:MM-HH:MM, got '" + std::string(text) + "'");
    }
    auto field = [&](std::size_t pos) {
        int v = 0;
        auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + 2, v);
        if (ec != std::errc{} || ptr != text.data() + pos + 2) {
            throw InputError("daytime window must look like HH:MM-HH:MM, got '" + std::string(text) + "'");
        }
        return v;
    };
    DaytimeWindow w;
    w.start_s = field(0) * 3600 + field(3) * 60;
    w.end_s = field(6) * 3600 + field(9) * 60;
    if (w.start_s >= w.end_s || w.end_s > 24 * 3600) {
        throw InputError("daytime window start must precede end: '" + std::string(text) + "'");
    }
    return w;
}

std::string format_daytime_window(const DaytimeWindow& w) {
    return fmt::format("{:02d}:{:02d}-{:02d}:{:02d}", w.start_s / 3600, w.start_s % 3600 / 60, w.end_s / 3600,
                       w.end_s % 3600 / 60);
}

}  // namespace dhc
