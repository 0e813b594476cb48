#include "dhc/io/fixtures.hpp"

#include "dhc/common/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace dhc::io {

namespace {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double normal() {
        // Box-Muller; the standard distributions differ between library vendors
        const double u1 = std::max(uniform(), 1e-300);
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::mt19937_64 gen_;
};

double bump(double h, double centre, double width) {
    const double d = (h - centre) / width;
    return std::exp(-d * d);
}

std::vector<Timestamp> time_base(Timestamp start, std::int64_t step, std::size_t count) {
    std::vector<Timestamp> out(count);
    for (std::size_t t = 0; t < count; ++t) {
        out[t] = start + std::chrono::seconds{step * static_cast<std::int64_t>(t)};
    }
    return out;
}

Timestamp year_start(int year) {
    using namespace std::chrono;
    return Timestamp{sys_days{std::chrono::year{year} / January / 1}.time_since_epoch()};
}

std::size_t steps_in_year(int year, std::int64_t step) {
    const auto secs = (year_start(year + 1) - year_start(year)).count();
    return static_cast<std::size_t>(secs / step);
}

}  // namespace

cia::DemandSeries synthetic_demand_day(const net::Network& net, const FixtureOptions& o) {
    if (o.step_seconds <= 0 || 86400 % o.step_seconds != 0) {
        throw InputError("fixture step must divide one day");
    }
    if (!(o.aggregate_min_kw > 0.0 && o.aggregate_max_kw > o.aggregate_min_kw)) {
        throw InputError("fixture aggregate demand range is empty");
    }
    using namespace std::chrono;
    const Timestamp day{sys_days{std::chrono::year{o.year} / month{o.demand_month} / std::chrono::day{o.demand_day}}
                            .time_since_epoch()};
    const auto steps = static_cast<std::size_t>(86400 / o.step_seconds);
    const auto n = static_cast<Eigen::Index>(net.branch_count());

    // aggregate shape: overnight trough, morning shoulder, evening peak
    std::vector<double> shape(steps);
    for (std::size_t t = 0; t < steps; ++t) {
        const double h = static_cast<double>(t) * static_cast<double>(o.step_seconds) / 3600.0;
        shape[t] = 0.8 - 0.12 * bump(h, 4.0, 2.5) - 0.1 * bump(h, 6.0, 1.2) + 0.25 * bump(h, 8.0, 1.5) +
                   0.1 * bump(h, 13.0, 3.0) + 0.85 * bump(h, 19.0, 2.2) + 0.3 * bump(h, 24.5, 2.5);
    }
    const auto [lo, hi] = std::minmax_element(shape.begin(), shape.end());
    const double s0 = *lo, s1 = *hi;
    for (auto& s : shape) {
        s = o.aggregate_min_kw + (s - s0) / (s1 - s0) * (o.aggregate_max_kw - o.aggregate_min_kw);
    }

    Rng rng(o.seed);
    Eigen::VectorXd nominal_kw(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        nominal_kw(k) = std::max(0.0, net.p_demand()[static_cast<std::size_t>(k)] * 1000.0 * net.s_base_mva());
    }
    if (nominal_kw.sum() <= 0.0) {
        throw InputError("network has no positive nominal demand to shape");
    }
    Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
    for (Eigen::Index k = 0; k < n; ++k) z(k) = rng.normal();
    Eigen::MatrixXd p_kw(static_cast<Eigen::Index>(steps), n);
    constexpr double rho = 0.97;
    for (std::size_t t = 0; t < steps; ++t) {
        for (Eigen::Index k = 0; k < n; ++k) {
            z(k) = rho * z(k) + std::sqrt(1.0 - rho * rho) * rng.normal();
        }
        Eigen::VectorXd row = nominal_kw.array() * (1.0 + 0.1 * z.array().max(-2.5).min(2.5));
        row *= shape[t] / row.sum();
        // three decimals keep the file compact; the rescaled aggregate stays within 1 W
        for (Eigen::Index k = 0; k < n; ++k) {
            p_kw(static_cast<Eigen::Index>(t), k) = std::round(row(k) * 1000.0) / 1000.0;
        }
    }
    return cia::demand_from_kw(net, time_base(day, o.step_seconds, steps), p_kw);
}

econ::TimeSeries synthetic_pv_year(const FixtureOptions& o) {
    const auto steps = steps_in_year(o.year, o.step_seconds);
    econ::TimeSeries s;
    s.timestamps = time_base(year_start(o.year), o.step_seconds, steps);
    s.values.assign(steps, 0.0);
    Rng rng(o.seed ^ 0x9e3779b97f4a7c15ULL);
    const double lat = o.latitude_deg * std::numbers::pi / 180.0;
    const auto per_day = static_cast<std::size_t>(86400 / o.step_seconds);

    int regime = 0;  // 0 clear, 1 broken cloud, 2 overcast
    double fast = 0.0;
    for (std::size_t d = 0; d * per_day < steps; ++d) {
        const double u = rng.uniform();
        // persistent weather: tomorrow repeats today half of the time
        if (u >= 0.5) {
            const double v = rng.uniform();
            regime = v < 0.45 ? 0 : v < 0.8 ? 1 : 2;
        }
        const double day_level = regime == 0 ? 0.95 + 0.05 * rng.uniform()
                                 : regime == 1 ? 0.55 + 0.3 * rng.uniform()
                                               : 0.12 + 0.18 * rng.uniform();
        const double decl = 23.44 * std::numbers::pi / 180.0 *
                            std::sin(2.0 * std::numbers::pi * (284.0 + static_cast<double>(d + 1)) / 365.0);
        for (std::size_t k = 0; k < per_day && d * per_day + k < steps; ++k) {
            const std::size_t t = d * per_day + k;
            const double h = static_cast<double>(k * static_cast<std::size_t>(o.step_seconds)) / 3600.0;
            const double hour_angle = (h - 12.0) * 15.0 * std::numbers::pi / 180.0;
            const double sin_elev =
                std::sin(lat) * std::sin(decl) + std::cos(lat) * std::cos(decl) * std::cos(hour_angle);
            fast = 0.9 * fast + std::sqrt(1.0 - 0.81) * rng.normal();
            if (h < 6.0 || h >= 20.0 || sin_elev <= 0.0) {
                continue;
            }
            const double clear = std::pow(sin_elev, 1.15) * (1.0 - 0.1 * std::exp(-8.0 * sin_elev));
            double cloud = day_level;
            if (regime == 1) {
                cloud = std::clamp(day_level + 0.35 * fast, 0.15, 1.05);
            } else if (regime == 0) {
                cloud = std::clamp(day_level + 0.02 * fast, 0.85, 1.02);
            }
            s.values[t] = std::round(o.panel_kw * 0.85 * clear * cloud * 1e5) / 1e5;
        }
    }
    return s;
}

econ::TimeSeries synthetic_moer_year(const FixtureOptions& o) {
    const auto steps = steps_in_year(o.year, o.step_seconds);
    econ::TimeSeries s;
    s.timestamps = time_base(year_start(o.year), o.step_seconds, steps);
    s.values.resize(steps);
    Rng rng(o.seed ^ 0xd1b54a32d192ed03ULL);
    double noise = 0.0;
    for (std::size_t t = 0; t < steps; ++t) {
        const double h = std::fmod(static_cast<double>(t) * static_cast<double>(o.step_seconds) / 3600.0, 24.0);
        const double doy = static_cast<double>(t) * static_cast<double>(o.step_seconds) / 86400.0;
        noise = 0.98 * noise + std::sqrt(1.0 - 0.98 * 0.98) * rng.normal();
        const double v = 880.0 + 90.0 * bump(h, 18.5, 3.0) - 60.0 * bump(h, 3.0, 3.0) - 40.0 * bump(h, 13.0, 2.5) +
                         50.0 * std::cos(2.0 * std::numbers::pi * (doy - 15.0) / 365.0) + 70.0 * noise;
        s.values[t] = std::round(std::clamp(v, 300.0, 1500.0) * 10.0) / 10.0;
    }
    return s;
}

}  // namespace dhc::io
