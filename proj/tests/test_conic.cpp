#include "dhc/common/error.hpp"
#include "dhc/conic/ipm.hpp"
#include "dhc/conic/solver.hpp"

#include <doctest.h>

#include <cmath>

using namespace dhc::conic;

TEST_CASE("maximize x subject to x <= 2") {
    ConicProblem p;
    auto x = p.add_variable("x", 1);
    p.add_less_equal(x[0], 2.0);
    p.set_objective(Sense::maximize, x[0]);
    const auto sol = solve(p);
    REQUIRE(sol.optimal());
    CHECK(sol.x[0] == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(sol.objective == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(sol.stats.max_violation <= 1e-8);
}

TEST_CASE("log(x) + log(y) with x + y <= 2 peaks at (1, 1)") {
    ConicProblem p;
    auto v = p.add_variable("v", 2, 0.0);
    p.add_less_equal(v[0] + v[1], 2.0);
    p.set_objective(Sense::maximize, {});
    p.add_log_term(1.0, v[0], 10.0);
    p.add_log_term(1.0, v[1], 10.0);
    const auto sol = solve(p);
    REQUIRE(sol.optimal());
    CHECK(sol.x[0] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(sol.x[1] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::abs(sol.objective) < 1e-9);
}

TEST_CASE("weighted logs split the budget by weight") {
    ConicProblem p;
    auto v = p.add_variable("v", 2, 0.0);
    p.add_less_equal(v[0] + v[1], 4.0);
    p.set_objective(Sense::maximize, {});
    p.add_log_term(1.0, v[0], 10.0);
    p.add_log_term(3.0, v[1], 10.0);
    const auto sol = solve(p);
    REQUIRE(sol.optimal());
    CHECK(sol.x[0] == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(sol.x[1] == doctest::Approx(3.0).epsilon(1e-4));
}

TEST_CASE("unit disk: maximize x + y gives sqrt(2)/2 each") {
    ConicProblem p;
    auto v = p.add_variable("v", 2);
    p.add_soc({v[0], v[1]}, 1.0);
    p.set_objective(Sense::maximize, v[0] + v[1]);
    const auto sol = solve(p);
    REQUIRE(sol.optimal());
    CHECK(sol.x[0] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-7));
    CHECK(sol.x[1] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-7));
}

TEST_CASE("soc boundary points") {
    SUBCASE("u = (0, 0), t = 0 is feasible") {
        ConicProblem p;
        auto v = p.add_variable("v", 3);
        p.add_equality(v[0], 0.0);
        p.add_equality(v[1], 0.0);
        p.add_soc({v[0], v[1]}, v[2]);
        p.set_objective(Sense::minimize, v[2]);
        const auto sol = solve(p);
        REQUIRE(sol.optimal());
        CHECK(std::abs(sol.x[2]) < 1e-7);
    }
    SUBCASE("u = (3, 4), t = 5 holds with equality") {
        ConicProblem p;
        auto v = p.add_variable("v", 2);
        auto t = p.add_variable("t", 1, 5.0, 5.0);
        p.add_soc({v[0], v[1]}, t[0]);
        p.add_greater_equal(v[0], 3.0);
        p.set_objective(Sense::maximize, v[1]);
        const auto sol = solve(p);
        REQUIRE(sol.optimal());
        CHECK(sol.x[0] == doctest::Approx(3.0).epsilon(1e-7));
        CHECK(sol.x[1] == doctest::Approx(4.0).epsilon(1e-7));
    }
    SUBCASE("u = (1), t = 0 is infeasible") {
        ConicProblem p;
        auto v = p.add_variable("v", 2);
        p.add_equality(v[0], 1.0);
        p.add_equality(v[1], 0.0);
        p.add_soc({v[0]}, v[1]);
        p.set_objective(Sense::minimize, {});
        CHECK(solve(p).status == SolveStatus::infeasible);
    }
}

TEST_CASE("unbounded problem is reported") {
    ConicProblem p;
    auto x = p.add_variable("x", 1, 0.0);
    p.set_objective(Sense::maximize, x[0]);
    CHECK(solve(p).status == SolveStatus::unbounded);
}

TEST_CASE("redundant constraints keep the optimum") {
    auto build = [](bool redundant) {
        ConicProblem p;
        auto v = p.add_variable("v", 3, 0.0);
        p.add_less_equal(v[0] + 2.0 * v[1] + v[2], 4.0);
        p.add_soc({v[0], v[1]}, 2.0);
        if (redundant) {
            p.add_less_equal(v[0] + 2.0 * v[1] + v[2], 5.0);
            p.add_soc({v[0], v[1]}, 3.0);
        }
        p.set_objective(Sense::maximize, 3.0 * v[0] + v[1] + 0.5 * v[2]);
        return solve(p);
    };
    const auto a = build(false);
    const auto b = build(true);
    REQUIRE(a.optimal());
    REQUIRE(b.optimal());
    CHECK(std::abs(a.objective - b.objective) < 1e-7);
}

TEST_CASE("model errors") {
    ConicProblem p;
    auto x = p.add_variable("x", 2);
    CHECK_THROWS_AS(p.add_soc({}, x[0]), dhc::ModelError);
    CHECK_THROWS_AS(p.add_less_equal(AffineExpr::variable(7), 1.0), dhc::ModelError);
    CHECK_THROWS_AS(p.add_variable("x", 1), dhc::ModelError);
    CHECK_THROWS_AS(x[2], dhc::ModelError);
    p.set_objective(Sense::minimize, x[0]);
    CHECK_THROWS_AS(p.add_log_term(1.0, x[0], 1.0), dhc::ModelError);
}

TEST_CASE("dump lists variables, rows and cones") {
    ConicProblem p;
    auto x = p.add_variable("x", 2, 0.0, 4.0);
    p.add_equality(x[0] - x[1], 1.0, "diff");
    p.add_soc({x[0]}, x[1] + 3.0, "cone");
    p.set_objective(Sense::maximize, x[0]);
    const auto text = p.dump();
    CHECK(text.find("x[0] - x[1] - 1 == 0") != std::string::npos);
    CHECK(text.find("q0 cone (dim 2)") != std::string::npos);
    CHECK(text.find("0 <= x[1] <= 4") != std::string::npos);
}

TEST_CASE("random feasible LPs match a brute-force vertex oracle") {
    // 2-variable LPs: the optimum is attained at a vertex of the polygon, which
    // the oracle finds by intersecting every pair of constraint lines.
    std::uint64_t state = 12345;
    auto next = [&state] {
        state = state * 6364136223846793005ULL + 1442695040888963407ULL;
        return static_cast<double>(state >> 11) / static_cast<double>(1ULL << 53);
    };
    for (int trial = 0; trial < 50; ++trial) {
        const int rows = 6;
        std::vector<std::array<double, 3>> cons;  // a x + b y <= c
        for (int r = 0; r < rows; ++r) {
            const double ang = 2.0 * M_PI * (r + next() * 0.8) / rows;
            cons.push_back({std::cos(ang), std::sin(ang), 0.5 + next()});
        }
        const double cx = next() - 0.5;
        const double cy = next() - 0.5;
        double best = -1e300;
        for (int i = 0; i < rows; ++i) {
            for (int j = i + 1; j < rows; ++j) {
                const double det = cons[i][0] * cons[j][1] - cons[i][1] * cons[j][0];
                if (std::abs(det) < 1e-12) {
                    continue;
                }
                const double px = (cons[i][2] * cons[j][1] - cons[i][1] * cons[j][2]) / det;
                const double py = (cons[i][0] * cons[j][2] - cons[i][2] * cons[j][0]) / det;
                bool ok = true;
                for (const auto& c : cons) {
                    ok = ok && c[0] * px + c[1] * py <= c[2] + 1e-9;
                }
                if (ok) {
                    best = std::max(best, cx * px + cy * py);
                }
            }
        }
        ConicProblem p;
        auto v = p.add_variable("v", 2);
        for (const auto& c : cons) {
            p.add_less_equal(c[0] * v[0] + c[1] * v[1], c[2]);
        }
        p.set_objective(Sense::maximize, cx * v[0] + cy * v[1]);
        const auto sol = solve(p);
        REQUIRE(sol.optimal());
        CHECK(sol.objective == doctest::Approx(best).epsilon(1e-7));
    }
}
