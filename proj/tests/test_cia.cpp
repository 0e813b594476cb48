#include "dhc/cia/audit.hpp"
#include "dhc/cia/dhc_series.hpp"
#include "dhc/cia/hosting_capacity.hpp"
#include "dhc/cia/mae.hpp"
#include "dhc/common/error.hpp"
#include "dhc/net_model/network_json.hpp"

#include <doctest.h>
#include <fmt/core.h>

#include <random>

using namespace dhc;
using namespace dhc::cia;

namespace {

const net::Network& four_bus() {
    static const auto net = net::load_network_file(DHC_DATA_DIR "/fourbus.json");
    return net;
}

const net::Network& ieee37() {
    static const auto net = net::load_network_file(DHC_DATA_DIR "/ieee37_mod.json");
    return net;
}

Linearization nominal(const net::Network& n) { return linearize(n, nominal_p_demand(n), nominal_q_demand(n)); }

Hyperrectangle four_bus_box(BoundVariant v) {
    const auto& n = four_bus();
    return solve_hc(n, net::compact_matrices(n), nominal_p_demand(n), nominal_q_demand(n),
                    fair::scenario_preset("s1"), v);
}

}  // namespace

TEST_CASE("branch Hessians are positive semidefinite and the expansion is exact at the nominal point") {
    for (const auto* n : {&four_bus(), &ieee37()}) {
        const auto lin = nominal(*n);
        CHECK(min_hessian_eigenvalue(lin) >= -1e-9);
        for (std::size_t k = 0; k < lin.size(); ++k) {
            CHECK(taylor_current(lin, k, Eigen::Vector3d::Zero()) == doctest::Approx(lin.l0(static_cast<Eigen::Index>(k))));
        }
        CHECK((lin.J_pos + lin.J_neg - lin.J).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("second-order model tracks (P^2 + Q^2) / v near the expansion point") {
    const auto lin = nominal(four_bus());
    const Eigen::Vector3d d(1e-3, -5e-4, 2e-3);
    for (std::size_t k = 0; k < lin.size(); ++k) {
        const auto i = static_cast<Eigen::Index>(k);
        const double P = lin.P0(i) + d(0), Q = lin.Q0(i) + d(1), v = lin.v0(i) + d(2);
        CHECK(taylor_current(lin, k, d) == doctest::Approx((P * P + Q * Q) / v).epsilon(1e-6));
    }
}

TEST_CASE("cone counts of the two bound variants") {
    const auto& n = four_bus();
    const auto m = net::compact_matrices(n);
    const auto lin = nominal(n);
    const auto s1 = fair::scenario_preset("s1");
    const auto soc = build_p1(n, m, lin, s1, BoundVariant::soc, Direction::upper);
    CHECK(soc.soc_blocks == 12);
    CHECK(soc.quadratic_corners == 0);
    CHECK_FALSE(soc.w.has_value());
    std::size_t three = 0;
    for (const auto& c : soc.problem.cones()) three += c.u.size() == 3;
    CHECK(three == 12);

    const auto con = build_p1(n, m, lin, s1, BoundVariant::conservative, Direction::lower);
    CHECK(con.soc_blocks == 0);
    CHECK(con.quadratic_corners == 24);
    CHECK(con.w.has_value());

    const auto f = build_p1(n, m, lin, fair::scenario_preset("s1f1"), BoundVariant::soc, Direction::upper);
    CHECK(f.problem.cones().size() == soc.problem.cones().size() + 1);
    const auto f_lower = build_p1(n, m, lin, fair::scenario_preset("s1f1"), BoundVariant::soc, Direction::lower);
    CHECK(f_lower.problem.cones().size() == soc.problem.cones().size());
}

TEST_CASE("four-bus limits after one linearization") {
    const auto con = four_bus_box(BoundVariant::conservative);
    const auto soc = four_bus_box(BoundVariant::soc);
    CHECK(con.aggregate_minus_mw() == doctest::Approx(-3.89).epsilon(0.05));
    CHECK(con.aggregate_plus_mw() == doctest::Approx(8.34).epsilon(0.05));
    CHECK(soc.aggregate_minus_mw() == doctest::Approx(-5.56).epsilon(0.05));
    CHECK(soc.aggregate_plus_mw() == doctest::Approx(8.34).epsilon(0.05));
    CHECK(soc.volume() >= con.volume());
    CHECK(soc.iterations == 1);
    CHECK(soc.bus_ids == std::vector<int>{3, 4});
    CHECK(soc.upper_stats.max_violation <= 1e-6);
    CHECK((soc.p_minus_mw.array() <= 0.0).all());
    CHECK((soc.p_plus_mw.array() >= 0.0).all());
}

TEST_CASE("hyperrectangle containment and volume") {
    Hyperrectangle a, b;
    a.bus_ids = b.bus_ids = {3, 4};
    a.p_minus_mw = Eigen::Vector2d(-2, -1);
    a.p_plus_mw = Eigen::Vector2d(2, 3);
    b.p_minus_mw = Eigen::Vector2d(-1, -1);
    b.p_plus_mw = Eigen::Vector2d(1, 3.0000001);
    CHECK(a.volume() == doctest::Approx(16.0));
    CHECK_FALSE(a.contains(b));
    CHECK(a.contains(b, 1e-6));
    b.bus_ids = {4, 3};
    CHECK_FALSE(a.contains(b, 1.0));
}

TEST_CASE("SOC current envelope never exceeds the conservative one") {
    for (const auto* n : {&four_bus(), &ieee37()}) {
        const auto m = net::compact_matrices(*n);
        const auto lin = nominal(*n);
        const auto N = static_cast<Eigen::Index>(lin.size());
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (int s = 0; s < 200; ++s) {
            Eigen::VectorXd p(N), q(N), l(N);
            for (Eigen::Index k = 0; k < N; ++k) {
                p(k) = -lin.p_d(k) + 0.01 * u(rng);
                q(k) = -lin.q_d(k) + 0.005 * u(rng);
                l(k) = lin.l0(k) * (1.0 + 0.1 * std::abs(u(rng)));
            }
            const auto box = proxy_box(m, n->v0(), p, q, l, lin.l0 * 0.9);
            const Eigen::VectorXd gap = conservative_upper_bound(lin, box) - soc_upper_bound(box);
            CHECK(gap.minCoeff() >= -1e-12);
        }
    }
}

TEST_CASE("envelope error at node 10 of the IEEE-37 fixture") {
    const auto& n = ieee37();
    const auto lin = nominal(n);
    MaeSweep sweep;
    sweep.bus_id = 10;
    sweep.points = 41;
    const auto r = envelope_mae(n, net::compact_matrices(n), lin, sweep, 1);
    REQUIRE(r.samples.size() == 41);
    CHECK(r.samples.front().pg_mw == doctest::Approx(-1.2));
    CHECK(r.samples.back().pg_mw == doctest::Approx(2.0));
    CHECK(r.mean_soc() < 0.01);
    CHECK(r.mean_conservative() >= 10.0 * r.mean_soc());
    for (const auto& s : r.samples) {
        CHECK((s.l_soc - s.l_actual).minCoeff() >= -1e-9);  // still an upper bound on the exact currents
    }
    sweep.bus_id = 1;
    CHECK_THROWS_AS(envelope_mae(n, net::compact_matrices(n), lin, sweep, 1), NetworkError);
}

TEST_CASE("monte-carlo audit of the four-bus boxes") {
    const auto& n = four_bus();
    for (auto v : {BoundVariant::soc, BoundVariant::conservative}) {
        const auto box = four_bus_box(v);
        const auto a = audit_hyperrectangle(n, box, nominal_p_demand(n), nominal_q_demand(n), 2000, 5);
        CHECK(a.samples == 2000);
        CHECK(a.sound());
        CHECK(a.violations == 0);
    }
    // a box far beyond the limits is caught
    auto big = four_bus_box(BoundVariant::soc);
    big.p_plus_mw *= 3.0;
    const auto bad = audit_hyperrectangle(n, big, nominal_p_demand(n), nominal_q_demand(n), 500, 5);
    CHECK_FALSE(bad.sound());
    CHECK(bad.worst_violation > 0.0);
    // same seed, same verdict
    const auto again = audit_hyperrectangle(n, big, nominal_p_demand(n), nominal_q_demand(n), 500, 5, 1e-6, 1);
    CHECK(again.violations == bad.violations);
}

TEST_CASE("constant demand gives the same box at every daytime step") {
    const auto& n = four_bus();
    const auto m = net::compact_matrices(n);
    std::vector<Timestamp> ts;
    for (int h : {4, 9, 10, 13, 21}) ts.push_back(parse_rfc3339(fmt::format("2023-07-03T{:02}:00:00Z", h)));
    // uneven spacing is rejected before any solve
    CHECK_THROWS_AS(dhc_timeseries(n, m, constant_demand(n, ts), fair::scenario_preset("s1"), BoundVariant::soc),
                    InputError);
    ts.clear();
    for (int h = 4; h <= 21; h += 4) ts.push_back(parse_rfc3339(fmt::format("2023-07-03T{:02}:00:00Z", h)));
    const auto s = dhc_timeseries(n, m, constant_demand(n, ts), fair::scenario_preset("s1"), BoundVariant::soc);
    CHECK(s.step_seconds == 4 * 3600);
    CHECK(s.count(StepStatus::night) == 2);  // 04:00 and 20:00
    CHECK(s.count(StepStatus::solved) == 3);
    const auto ref = four_bus_box(BoundVariant::soc);
    for (auto t : s.solved_steps()) {
        const auto& b = *s.steps[t].box;
        CHECK((b.p_plus_mw - ref.p_plus_mw).cwiseAbs().maxCoeff() == 0.0);
        CHECK((b.p_minus_mw - ref.p_minus_mw).cwiseAbs().maxCoeff() == 0.0);
    }
    CHECK(step_status_from_string(to_string(StepStatus::failed)) == StepStatus::failed);
}

TEST_CASE("an infeasible operating band raises") {
    auto spec = net::load_feeder_file(DHC_DATA_DIR "/fourbus.json");
    spec.v_lo_pu = 0.999;
    spec.v_hi_pu = 1.001;
    for (auto& b : spec.buses) b.p_demand_kw = 5000.0;  // the load alone drops every node below the band
    const auto n = net::build_network(spec);
    CHECK_THROWS_AS(solve_hc(n, net::compact_matrices(n), nominal_p_demand(n), nominal_q_demand(n),
                             fair::scenario_preset("s1"), BoundVariant::soc),
                    HostingCapacityError);
}
