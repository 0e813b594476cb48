#include "dhc/common/error.hpp"
#include "dhc/economics/pv_economics.hpp"
#include "dhc/io/series_io.hpp"

#include <doctest.h>

#include <fstream>
#include <functional>

using namespace dhc;
using namespace dhc::econ;

namespace {

Timestamp at(const std::string& s) { return parse_rfc3339(s); }

/// One day of `step_s` steps; daytime steps solved with the given upper limits.
cia::DhcSeries day_series(std::int64_t step_s, const std::vector<int>& ids,
                          const std::function<Eigen::VectorXd(std::int64_t)>& hc) {
    cia::DhcSeries s;
    s.scenario = "test";
    s.bus_ids = ids;
    s.step_seconds = step_s;
    const auto t0 = at("2023-07-03T00:00:00Z");
    for (std::int64_t sec = 0; sec < 86400; sec += step_s) {
        cia::DhcStep st;
        st.timestamp = t0 + std::chrono::seconds(sec);
        if (s.daytime.contains(st.timestamp)) {
            st.status = cia::StepStatus::solved;
            cia::Hyperrectangle b;
            b.bus_ids = ids;
            b.p_plus_mw = hc(sec);
            b.p_minus_mw = Eigen::VectorXd::Zero(b.p_plus_mw.size());
            st.box = b;
        }
        s.steps.push_back(st);
    }
    return s;
}

TimeSeries hourly(const std::string& day, const std::vector<double>& v) {
    TimeSeries s;
    for (std::size_t h = 0; h < v.size(); ++h) {
        s.timestamps.push_back(at(day + "T00:00:00Z") + std::chrono::hours(h));
        s.values.push_back(v[h]);
    }
    return s;
}

}  // namespace

TEST_CASE("avoided emissions by hand") {
    CHECK(avoided_tonnes(1.0, 1.0, 500.0, 40.0) == 0.46);
    CHECK(avoided_tonnes(2.0, 0.5, 500.0, 40.0) == doctest::Approx(0.46));
    CHECK(avoided_tonnes(1.0, 1.0, 30.0, 40.0) < 0.0);
    CHECK(lb_per_mwh_to_g_per_kwh(1.0) == doctest::Approx(0.45359237).epsilon(1e-15));
    CHECK(lb_per_mwh_to_g_per_kwh(1000.0) == doctest::Approx(453.59237));
}

TEST_CASE("static limits take the daytime minimum and zero out failed steps") {
    auto s = day_series(3600, {5, 7}, [](std::int64_t sec) {
        return Eigen::Vector2d(1.0 + sec / 86400.0, sec == 12 * 3600 ? 0.0 : 2.0);
    });
    const auto l = static_limits(s);
    CHECK(l.solved_steps == 14);
    CHECK(l.failed_steps == 0);
    CHECK(l.l_pv_mw(0) == doctest::Approx(1.25));
    CHECK(l.l_pv_mw(1) == 0.0);
    CHECK(l.zero_bus_ids == std::vector<int>{7});
    CHECK(static_limits(s, {5}).bus_ids == std::vector<int>{5});
    CHECK_THROWS_AS(static_limits(s, {6}), InputError);

    s.steps[10].status = cia::StepStatus::failed;
    s.steps[10].box.reset();
    const auto f = static_limits(s);
    CHECK(f.failed_steps == 1);
    CHECK(f.l_pv_mw.isZero());
    CHECK(f.zero_bus_ids.size() == 2);

    for (auto& st : s.steps) st.status = cia::StepStatus::night;
    CHECK_THROWS_AS(static_limits(s), InputError);
}

TEST_CASE("PV alignment to a representative day") {
    const auto s = day_series(3600, {5}, [](std::int64_t) { return Eigen::VectorXd::Constant(1, 3.0); });
    std::vector<double> pv(48, 0.0);
    for (int h = 5; h < 21; ++h) pv[h] = pv[24 + h] = 1.0 + (h % 3);
    const auto a = align_pv(s, hourly("2023-03-01", pv));
    CHECK(a.steps() == 48);
    CHECK(a.dt_hours == 1.0);
    CHECK(a.excluded_pv_steps == 4);  // 05:00 and 20:00 of both days
    CHECK(a.excluded_pv_kwh == doctest::Approx(2 * (pv[5] + pv[20])));
    CHECK(a.dhc_step[30] == 6);
    CHECK(a.dhc_step[2] == -1);
    CHECK(a.pv_kw(5) == 0.0);
    CHECK(a.pv_kw(30) == pv[30]);

    // a daytime PV step needs a DHC counterpart
    auto gap = s;
    gap.steps.erase(gap.steps.begin() + 9);
    gap.steps.erase(gap.steps.begin() + 9, gap.steps.end());
    gap.step_seconds = 3600;
    CHECK_THROWS_AS(align_pv(gap, hourly("2023-03-01", pv)), InputError);

    auto bad = hourly("2023-03-01", pv);
    bad.values[12] = -1.0;
    CHECK_THROWS_AS(align_pv(s, bad), InputError);
    const auto fine = day_series(1800, {5}, [](std::int64_t) { return Eigen::VectorXd::Constant(1, 3.0); });
    CHECK_THROWS_AS(align_pv(fine, hourly("2023-03-01", pv)), InputError);
}

TEST_CASE("base energy of the bundled PV year against a direct summation") {
    const auto pv = io::read_series_csv(DHC_DATA_DIR "/pv_year.csv", io::kPvColumn);
    const auto s = day_series(300, {5}, [](std::int64_t) { return Eigen::VectorXd::Constant(1, 4.0); });
    auto limits = static_limits(s);
    limits.l_pv_mw(0) = 1.0;
    const auto a = align_pv(s, pv);
    const auto b = base_profile(limits, a);

    // independent pass over the raw file: daytime is 06:00 <= hh:mm < 20:00
    std::ifstream in(DHC_DATA_DIR "/pv_year.csv");
    std::string line;
    std::vector<double> day;
    double peak = 0.0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line[0] == 't') continue;
        const int hh = std::stoi(line.substr(11, 2));
        const double v = std::stod(line.substr(line.find(',') + 1));
        if (hh >= 6 && hh < 20) {
            day.push_back(v);
            peak = std::max(peak, v);
        }
    }
    REQUIRE(day.size() == 365 * 168);
    double e = 0.0;
    for (double v : day) e += v / peak * (5.0 / 60.0);
    CHECK(b.e_base_mwh(0) == doctest::Approx(e).epsilon(1e-12));
    CHECK(b.pv_peak_kw == peak);
    CHECK(a.excluded_pv_steps == 0);
}

TEST_CASE("curtailment curves") {
    // two nodes, one day of hourly steps, PV is a triangle peaking at noon
    const auto s = day_series(3600, {5, 7}, [](std::int64_t sec) {
        const double h = sec / 3600.0;
        return Eigen::Vector2d(1.0 + 0.1 * std::abs(h - 12.0), 2.0);
    });
    std::vector<double> pv(24, 0.0);
    for (int h = 6; h < 20; ++h) pv[h] = std::max(0.0, 7.0 - std::abs(h - 12.0));
    const auto a = align_pv(s, hourly("2023-07-03", pv));
    const auto l = static_limits(s);
    CHECK(l.l_pv_mw(0) == doctest::Approx(1.0));
    const auto b = base_profile(l, a);
    const double base_total = b.e_base_total_mwh();
    CHECK(base_total == doctest::Approx(49.0 / 7.0 * 3.0));

    std::vector<double> grid;
    for (int k = 0; k <= 120; ++k) grid.push_back(k / 10.0);
    const auto c = curtailment_curves(a, b, grid, base_total * 0.5, "test");
    REQUIRE(c.points.size() == grid.size());
    CHECK(c.points[0].e_add_total == 0.0);
    CHECK(c.points[0].e_curt_total == 0.0);
    CHECK(c.points[0].e_new_total == doctest::Approx(base_total));
    CHECK(c.points[0].e_add_common == doctest::Approx(0.5 * base_total));
    CHECK(c.points[0].e_add_pct_common == doctest::Approx(100.0));
    for (std::size_t k = 1; k < c.points.size(); ++k) {
        CHECK(c.points[k].e_curt_total >= c.points[k - 1].e_curt_total);
        CHECK(c.points[k].e_add_total >= c.points[k - 1].e_add_total);
        CHECK(c.points[k].e_add_total <= c.asymptote_mwh.sum() + 1e-12);
        CHECK(c.points[k].e_new_total - c.points[k].e_curt_total - base_total ==
              doctest::Approx(c.points[k].e_add_total));
    }
    // large enough increase: every daytime step with PV is capped at the limit
    CHECK(c.points.back().e_add_total == doctest::Approx(c.asymptote_mwh.sum()));
    double asym = 0.0;
    for (int h = 6; h <= 18; ++h) asym += 1.0 + 0.1 * std::abs(h - 12.0) - pv[h] / 7.0;
    asym += 13 * 2.0 - 2.0 * 49.0 / 7.0;
    CHECK(c.asymptote_mwh.sum() == doctest::Approx(asym));

    CHECK_THROWS_AS(curtailment_curves(a, b, {0.1, 0.1}, 1.0), InputError);
    CHECK_THROWS_AS(curtailment_curves(a, b, {-0.1, 0.1}, 1.0), InputError);
    CHECK_THROWS_AS(curtailment_curves(a, b, {}, 1.0), InputError);
    CHECK(common_base({b, b}) == base_total);
}

TEST_CASE("net profit arithmetic with a flat emission rate") {
    const auto s = day_series(3600, {5}, [](std::int64_t) { return Eigen::VectorXd::Constant(1, 1.5); });
    std::vector<double> pv(24, 0.0);
    pv[12] = 10.0;
    pv[13] = 5.0;
    const auto a = align_pv(s, hourly("2023-07-03", pv));
    auto l = static_limits(s);
    l.l_pv_mw(0) = 1.0;
    const auto b = base_profile(l, a);
    const auto c = curtailment_curves(a, b, {0.0, 1.0}, b.e_base_total_mwh());
    // dc = 1: 12:00 gets 2 MW against 1.5 (0.5 curtailed, 0.5 added); 13:00 gets 1 MW, all added
    CHECK(c.points[1].e_curt_total == doctest::Approx(0.5));
    CHECK(c.points[1].e_add_total == doctest::Approx(1.0));

    const auto moer = hourly("2023-07-03", std::vector<double>(24, 500.0));
    const auto r = carbon_and_profit(a, b, c, moer, {0.20, 100.0, 40.0});
    CHECK(r.points[1].a_co2_total_t == doctest::Approx(0.46));
    CHECK(r.points[1].c_rev == doctest::Approx(46.0));
    CHECK(r.points[1].c_curt == doctest::Approx(100.0));
    CHECK(r.points[1].np == doctest::Approx(-54.0));
    CHECK(r.best_index == 0);
    CHECK(r.moer_gaps == 0);

    auto sparse = moer;
    sparse.timestamps.erase(sparse.timestamps.begin() + 13);
    sparse.values.erase(sparse.values.begin() + 13);
    const auto g = carbon_and_profit(a, b, c, sparse, {0.0, 100.0, 40.0});
    CHECK(g.moer_gaps == 1);
    CHECK(g.points[1].a_co2_total_t == doctest::Approx(0.23));
    CHECK(g.best_dc() == 1.0);
    CHECK_THROWS_AS(carbon_and_profit(a, b, c, moer, {-1.0, 100.0, 40.0}), InputError);
    CHECK_THROWS_AS(carbon_and_profit(a, b, c, TimeSeries{}, {}), InputError);
}

TEST_CASE("ties keep the smallest capacity increase") {
    const auto s = day_series(3600, {5}, [](std::int64_t) { return Eigen::VectorXd::Constant(1, 1.0); });
    std::vector<double> pv(24, 0.0);
    pv[12] = 1.0;
    const auto a = align_pv(s, hourly("2023-07-03", pv));
    const auto b = base_profile(static_limits(s), a);
    const auto c = curtailment_curves(a, b, {0.0, 0.5, 1.0}, 1.0);
    // no headroom: nothing is added, and without a curtailment price every point ties
    const auto r = carbon_and_profit(a, b, c, hourly("2023-07-03", std::vector<double>(24, 400.0)), {0.0, 100.0, 40.0});
    CHECK(r.best_index == 0);
    CHECK(default_dc_grid().size() == 21);
    CHECK(default_dc_grid()[3] == 0.15);
}
