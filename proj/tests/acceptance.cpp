// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include "dhc/cia/audit.hpp"
#include "dhc/cia/dhc_series.hpp"
#include "dhc/cia/hosting_capacity.hpp"
#include "dhc/cia/mae.hpp"
#include "dhc/economics/pv_economics.hpp"
#include "dhc/fairness/epsilon.hpp"
#include "dhc/fairness/jfi.hpp"
#include "dhc/io/series_io.hpp"
#include "dhc/net_model/compact_matrices.hpp"
#include "dhc/net_model/network_json.hpp"

#include <fmt/core.h>
#include <fmt/ranges.h>

#include <algorithm>
#include <chrono>
#include <exception>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

using namespace dhc;

namespace {

struct Outcome {
    std::string detail;
    std::vector<std::string> problems;

    bool pass() const { return problems.empty(); }
    void require(bool ok, const std::string& what) {
        if (!ok) problems.push_back(what);
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void run(const std::string& name, const std::function<Outcome()>& body) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o.problems.push_back(fmt::format("exception: {}", e.what()));
    }
    if (!o.pass()) ++failures;
    fmt::print("{} {} ({:.1f} s): {}\n", o.pass() ? "PASS" : "FAIL", name, seconds_since(t0), o.detail);
    for (const auto& p : o.problems) fmt::print("    {}\n", p);
    std::fflush(stdout);
}

const net::Network& fixture(const std::string& name) {
    static std::map<std::string, net::Network> cache;
    auto it = cache.find(name);
    if (it == cache.end()) {
        it = cache.emplace(name, net::load_network_file(std::string(DHC_DATA_DIR "/") + name + ".json")).first;
    }
    return it->second;
}

const std::vector<std::string> kFixtures{"fourbus", "ieee37_mod"};

cia::Hyperrectangle nominal_box(const net::Network& n, const fair::Scenario& s, cia::BoundVariant v) {
    return cia::solve_hc(n, net::compact_matrices(n), cia::nominal_p_demand(n), cia::nominal_q_demand(n), s, v);
}

bool within(double value, double target, double rel) { return std::abs(value - target) <= rel * std::abs(target); }

std::string interval(const cia::Hyperrectangle& b) {
    return fmt::format("[{:.3f}, {:.3f}]", b.aggregate_minus_mw(), b.aggregate_plus_mw());
}

Outcome four_bus_limits() {
    Outcome o;
    const auto t0 = Clock::now();
    const auto& n = fixture("fourbus");
    const auto s1 = fair::scenario_preset("s1");
    const auto con = nominal_box(n, s1, cia::BoundVariant::conservative);
    const auto soc = nominal_box(n, s1, cia::BoundVariant::soc);
    const double elapsed = seconds_since(t0);
    o.detail = fmt::format("conservative {} vs [-3.89, 8.34], soc {} vs [-5.56, 8.34], {:.2f} s", interval(con),
                           interval(soc), elapsed);
    o.require(within(con.aggregate_minus_mw(), -3.89, 0.05) && within(con.aggregate_plus_mw(), 8.34, 0.05),
              "conservative endpoints off by more than 5%");
    o.require(within(soc.aggregate_minus_mw(), -5.56, 0.05) && within(soc.aggregate_plus_mw(), 8.34, 0.05),
              "soc endpoints off by more than 5%");
    o.require(con.iterations == 1 && soc.iterations == 1, "more than one linearization");
    o.require(elapsed < 5.0, "slower than 5 s");
    return o;
}

Outcome envelope_dominance() {
    Outcome o;
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::size_t points = 0;
    double worst_gap = 0.0;
    for (const auto& name : kFixtures) {
        const auto& n = fixture(name);
        const auto m = net::compact_matrices(n);
        const auto s1 = fair::scenario_preset("s1");
        const auto soc = nominal_box(n, s1, cia::BoundVariant::soc);
        const auto con = nominal_box(n, s1, cia::BoundVariant::conservative);
        o.require(soc.volume() >= con.volume(),
                  fmt::format("{}: soc volume {:.6g} < conservative {:.6g}", name, soc.volume(), con.volume()));
        o.detail += fmt::format("{} volume soc {:.4g} >= conservative {:.4g}; ", name, soc.volume(), con.volume());

        // proxy points: generation drawn inside the SOC box, currents around the nominal ones
        const auto lin = cia::linearize(n, cia::nominal_p_demand(n), cia::nominal_q_demand(n));
        const auto N = static_cast<Eigen::Index>(lin.size());
        for (int s = 0; s < 1000; ++s) {
            Eigen::VectorXd pg_mw(static_cast<Eigen::Index>(soc.size()));
            for (Eigen::Index g = 0; g < pg_mw.size(); ++g) {
                pg_mw(g) = soc.p_minus_mw(g) + u(rng) * (soc.p_plus_mw(g) - soc.p_minus_mw(g));
            }
            const Eigen::VectorXd p = cia::generation_vector(n, pg_mw) - lin.p_d;
            const Eigen::VectorXd q = -lin.q_d;
            Eigen::VectorXd lp(N), lm(N);
            for (Eigen::Index k = 0; k < N; ++k) {
                lm(k) = lin.l0(k) * u(rng);
                lp(k) = lin.l0(k) * (1.0 + 2.0 * u(rng)) + 1e-4 * u(rng);
            }
            const auto box = cia::proxy_box(m, n.v0(), p, q, lp, lm);
            const Eigen::VectorXd gap = cia::conservative_upper_bound(lin, box) - cia::soc_upper_bound(box);
            worst_gap = std::min(worst_gap, gap.minCoeff());
            ++points;
        }
    }
    o.require(worst_gap >= 0.0, fmt::format("l+_soc exceeds l+_conservative by {:.3g}", -worst_gap));
    o.detail += fmt::format("{} proxy points, min(l+_con - l+_soc) = {:.3g}", points, worst_gap);
    return o;
}

Outcome envelope_mae() {
    Outcome o;
    const auto t0 = Clock::now();
    const auto& n = fixture("ieee37_mod");
    const auto lin = cia::linearize(n, cia::nominal_p_demand(n), cia::nominal_q_demand(n));
    cia::MaeSweep sweep;
    sweep.bus_id = 10;
    const auto r = cia::envelope_mae(n, net::compact_matrices(n), lin, sweep);
    const double elapsed = seconds_since(t0);
    const double soc = r.mean_soc(), con = r.mean_conservative();
    o.detail = fmt::format("node 10, {} points in [{}, {}] MW: mae soc {:.3g} pu, conservative {:.3g} pu ({:.1f}x), {:.2f} s",
                           r.samples.size(), sweep.min_mw, sweep.max_mw, soc, con, con / soc, elapsed);
    o.require(soc < 0.01, "soc mae not below 0.01");
    o.require(con >= 10.0 * soc, "conservative mae below 10x soc");
    o.require(elapsed < 60.0, "slower than 60 s");
    return o;
}

Outcome audit_soundness() {
    Outcome o;
    const auto t0 = Clock::now();
    std::size_t boxes = 0, samples = 0, violations = 0;
    for (const auto& name : kFixtures) {
        const auto& n = fixture(name);
        for (const auto& preset : fair::scenario_names()) {
            for (auto v : {cia::BoundVariant::soc, cia::BoundVariant::conservative}) {
                const auto box = nominal_box(n, fair::scenario_preset(preset), v);
                const auto a = cia::audit_hyperrectangle(n, box, cia::nominal_p_demand(n), cia::nominal_q_demand(n),
                                                         10000, 7 + boxes, 1e-6);
                ++boxes;
                samples += a.samples;
                violations += a.violations;
                if (!a.sound()) {
                    o.require(false, fmt::format("{} {} {}: {} violations (worst {:.3g})", name, preset,
                                                 cia::to_string(v), a.violations, a.worst_violation));
                }
            }
        }
    }
    const double elapsed = seconds_since(t0);
    o.require(elapsed < 300.0, "slower than 5 min");
    o.detail = fmt::format("{} boxes, {} samples, {} violations, {:.1f} s", boxes, samples, violations, elapsed);
    return o;
}

double relative_spread(const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi > 0.0 ? (*hi - *lo) / *hi : 0.0;
}

Outcome fairness_bounds() {
    Outcome o;
    const auto& n = fixture("ieee37_mod");
    const auto p_d = cia::nominal_p_demand(n);
    std::vector<double> demand;
    for (auto bus : n.generator_buses()) demand.push_back(p_d(static_cast<Eigen::Index>(bus - 1)));
    const auto alpha = fair::demand_weights(demand);
    double worst_margin = 1.0;
    for (double eps : {0.0, 0.25, 0.5, 0.85, 1.0}) {
        for (const char* preset : {"s1f1", "s1f2"}) {
            const auto s = fair::scenario_preset(preset, eps);
            const auto box = nominal_box(n, s, cia::BoundVariant::soc);
            std::vector<double> w(box.size());
            for (std::size_t g = 0; g < w.size(); ++g) {
                const double p = box.p_plus_mw(static_cast<Eigen::Index>(g));
                w[g] = s.fairness->mode == fair::FairnessMode::proportional ? p / alpha[g] : p;
            }
            const double bound = fair::jfi_lower_bound(eps, w.size());
            const double j = fair::jfi(w);
            worst_margin = std::min(worst_margin, j - bound);
            o.require(j >= bound - 1e-9, fmt::format("{} eps {}: jfi {:.6f} < {:.6f}", preset, eps, j, bound));
            if (eps == 1.0) {
                const double spread = relative_spread(w);
                o.require(spread < 1e-4, fmt::format("{} eps 1: spread {:.3g}", preset, spread));
                o.detail += fmt::format("{} eps 1 spread {:.2g}; ", to_string(s.fairness->mode), spread);
            }
        }
    }
    o.detail += fmt::format("ieee37 upper solves, min(jfi - bound) = {:.3g}", worst_margin);
    return o;
}

// Daytime series shared by the scenario and economics criteria.
struct SeriesCache {
    const net::Network& net = fixture("ieee37_mod");
    net::CompactMatrices m = net::compact_matrices(net);
    cia::DemandSeries demand = io::read_demand_csv(DHC_DATA_DIR "/demand_day.csv", net);
    std::map<std::pair<std::string, double>, cia::DhcSeries> runs;

    const cia::DhcSeries& get(const std::string& scenario, double factor = 1.0) {
        auto key = std::make_pair(scenario, factor);
        auto it = runs.find(key);
        if (it == runs.end()) {
            const auto d = factor == 1.0 ? demand : cia::scaled(demand, factor);
            it = runs.emplace(key, cia::dhc_timeseries(net, m, d, fair::scenario_preset(scenario), cia::BoundVariant::soc))
                     .first;
        }
        return it->second;
    }
};

SeriesCache& series() {
    static SeriesCache c;
    return c;
}

constexpr double kZeroMw = 1e-4;

Outcome scenario_behavior() {
    Outcome o;
    const auto& s1 = series().get("s1");
    const auto& s3 = series().get("s3");
    const auto& s4 = series().get("s4");
    for (const auto* s : {&s3, &s4}) {
        o.require(s->bus_ids.size() == 14, fmt::format("{}: {} generator nodes", s->scenario, s->bus_ids.size()));
        std::size_t nonpositive = 0;
        for (const auto& step : s->steps) {
            if (step.status == cia::StepStatus::failed) {
                o.require(false, fmt::format("{} failed at {}", s->scenario, format_rfc3339(step.timestamp)));
            } else if (step.box) {
                nonpositive += static_cast<std::size_t>((step.box->p_plus_mw.array() <= kZeroMw).count());
            }
        }
        o.require(nonpositive == 0, fmt::format("{}: {} node-steps with zero HC", s->scenario, nonpositive));
        o.detail += fmt::format("{} min p+ {:.4f} MW over {} steps; ", s->scenario,
                                [&] {
                                    double mn = 1e300;
                                    for (auto t : s->solved_steps()) mn = std::min(mn, s->steps[t].box->p_plus_mw.minCoeff());
                                    return mn;
                                }(),
                                s->count(cia::StepStatus::solved));
    }
    std::size_t zero_steps = 0, order_breaks = 0, compared = 0;
    double worst = 0.0;
    for (std::size_t t = 0; t < s1.steps.size(); ++t) {
        const auto& a = s1.steps[t];
        const auto& b = s3.steps[t];
        if (a.status == cia::StepStatus::failed) o.require(false, "s1 failed at " + format_rfc3339(a.timestamp));
        if (!a.box) continue;
        zero_steps += (a.box->p_plus_mw.array() < kZeroMw).any();
        if (!b.box) continue;
        ++compared;
        const double gap = a.box->aggregate_plus_mw() - b.box->aggregate_plus_mw();
        worst = std::min(worst, gap);
        // both totals come from solves stopped at a relative gap of 1e-6
        order_breaks += gap < -1e-5 * std::max(1.0, b.box->aggregate_plus_mw());
    }
    o.require(zero_steps > 0, "s1 never has a zero-HC node");
    o.require(order_breaks == 0, fmt::format("s1 total below s3 at {} steps", order_breaks));
    o.detail += fmt::format("s1 zero-HC node at {} steps; s1 - s3 total >= {:.2g} MW over {} steps", zero_steps, worst,
                            compared);
    return o;
}

bool nondecreasing(const std::vector<double>& v, double tol) {
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] < v[i - 1] - tol) return false;
    }
    return true;
}

Outcome economics_properties() {
    Outcome o;
    const auto pv = io::read_series_csv(DHC_DATA_DIR "/pv_year.csv", io::kPvColumn);
    auto moer = io::read_series_csv(DHC_DATA_DIR "/moer_year.csv", io::kMoerColumn);
    for (auto& v : moer.values) v = econ::lb_per_mwh_to_g_per_kwh(v);

    struct Prepared {
        std::string scenario;
        econ::Alignment aligned;
        econ::BaseProfile base;
    };
    std::vector<Prepared> all;
    std::vector<econ::BaseProfile> bases;
    for (const auto& name : fair::scenario_names()) {
        const auto& s = series().get(name);
        Prepared p{name, econ::align_pv(s, pv), {}};
        p.base = econ::base_profile(econ::static_limits(s), p.aligned);
        bases.push_back(p.base);
        all.push_back(std::move(p));
    }
    const double common = econ::common_base(bases);

    // far past the last curtailment-free step so the asymptote is approached
    auto grid = econ::default_dc_grid();
    for (double dc = 1.5; dc <= 20.0; dc += 0.5) grid.push_back(dc);
    const auto price_grid = econ::default_dc_grid();

    for (const auto& p : all) {
        const auto curves = econ::curtailment_curves(p.aligned, p.base, grid, common, p.scenario);
        std::vector<double> curt, add;
        for (const auto& pt : curves.points) {
            curt.push_back(pt.e_curt_total);
            add.push_back(pt.e_add_total);
        }
        const double limit = curves.asymptote_mwh.sum();
        o.require(nondecreasing(curt, 1e-9), p.scenario + ": E_curt decreases");
        o.require(nondecreasing(add, 1e-9), p.scenario + ": E_add decreases");
        o.require(*std::max_element(add.begin(), add.end()) <= limit + 1e-9 * std::max(1.0, limit),
                  p.scenario + ": E_add above its limit");

        const auto price_curves = econ::curtailment_curves(p.aligned, p.base, price_grid, common, p.scenario);
        econ::CarbonParams params;
        const auto r100 = econ::carbon_and_profit(p.aligned, p.base, price_curves, moer, params);
        params.lambda_co2 = 200.0;
        const auto r200 = econ::carbon_and_profit(p.aligned, p.base, price_curves, moer, params);
        const bool interior = r100.best_index > 0 && r100.best_index + 1 < r100.points.size();
        o.require(interior, fmt::format("{}: NP maximum at the grid edge ({}%)", p.scenario, 100 * r100.best_dc()));
        o.require(r200.best_dc() >= r100.best_dc(), p.scenario + ": argmax falls at $200/t");
        o.detail += fmt::format("{} E_add {:.1f}/{:.1f} MWh, argmax {:.0f}%->{:.0f}%; ", p.scenario, add.back(), limit,
                                100 * r100.best_dc(), 100 * r200.best_dc());
    }

    // demand sensitivity over the daytime steps solved at all three demand levels: the
    // aggregate range [min, max] of total p+ and each node's p+ summed over those steps
    std::size_t skipped = 0;
    for (const auto& name : fair::scenario_names()) {
        const auto& lo = series().get(name, 0.75);
        const auto& mid = series().get(name);
        const auto& hi = series().get(name, 1.25);
        std::vector<std::size_t> common;
        skipped = 0;
        for (std::size_t t = 0; t < mid.steps.size(); ++t) {
            if (mid.steps[t].status == cia::StepStatus::night) continue;
            if (lo.steps[t].box && mid.steps[t].box && hi.steps[t].box) {
                common.push_back(t);
            } else {
                ++skipped;
            }
        }
        if (common.empty()) {
            o.require(false, name + ": no step solved under all demand levels");
            continue;
        }
        struct Level {
            double min_total = 1e300, max_total = -1e300;
            Eigen::VectorXd node_sum;
        };
        auto level = [&](const cia::DhcSeries& s) {
            Level l;
            l.node_sum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(s.bus_ids.size()));
            for (auto t : common) {
                const auto& b = *s.steps[t].box;
                l.min_total = std::min(l.min_total, b.aggregate_plus_mw());
                l.max_total = std::max(l.max_total, b.aggregate_plus_mw());
                l.node_sum += b.p_plus_mw;
            }
            return l;
        };
        const auto L = level(lo), M = level(mid), H = level(hi);
        const double tol = 1e-5;
        const bool ranges = L.min_total <= M.min_total + tol && M.min_total <= H.min_total + tol &&
                            L.max_total <= M.max_total + tol && M.max_total <= H.max_total + tol;
        o.require(ranges, name + ": aggregate range does not move with demand");
        const double node_tol = tol * static_cast<double>(common.size());
        std::vector<int> broken;
        for (Eigen::Index g = 0; g < M.node_sum.size(); ++g) {
            if (H.node_sum(g) < M.node_sum(g) - node_tol || M.node_sum(g) < L.node_sum(g) - node_tol) {
                broken.push_back(mid.bus_ids[static_cast<std::size_t>(g)]);
            }
        }
        o.require(broken.empty(), fmt::format("{}: node DHC falls with higher demand at node(s) {}", name,
                                              fmt::join(broken, ", ")));
        o.detail += fmt::format("{} total [{:.2f}, {:.2f}] < [{:.2f}, {:.2f}] < [{:.2f}, {:.2f}] MW; ", name,
                                L.min_total, L.max_total, M.min_total, M.max_total, H.min_total, H.max_total);
    }
    o.detail += fmt::format("demand x0.75/x1/x1.25 compared at the steps all three solve, {} steps without an "
                            "admissible origin at x1.25 skipped",
                            skipped);
    return o;
}

Outcome hand_oracles() {
    Outcome o;
    const double t = econ::avoided_tonnes(1.0, 1.0, 500.0, 40.0);
    o.require(t == 0.46, fmt::format("avoided {:.17g} t", t));
    struct Case {
        std::vector<double> x;
        double expected;
    };
    const std::vector<Case> cases{{{1, 1, 1, 1}, 1.0}, {{0, 0, 3, 0}, 0.25}, {{0, 7, 0, 0, 0, 0}, 1.0 / 6.0},
                                  {{1, 2, 3}, 6.0 / 7.0}};
    for (const auto& c : cases) {
        const double j = fair::jfi(c.x);
        o.require(std::abs(j - c.expected) <= 1e-12, fmt::format("jfi {:.17g} vs {:.17g}", j, c.expected));
    }
    o.detail = fmt::format("500 vs 40 g/kWh over 1 MWh avoids {} t; {} Jain cases", t, cases.size());
    return o;
}

Outcome compact_matrix_checks() {
    Outcome o;
    {
        net::FeederSpec s;
        s.buses = {{0}, {1, 10.0, 2.0, true}};
        s.branches = {{0, 1, 0.03, 0.07}};
        const auto m = net::compact_matrices(net::build_network(s));
        o.require(std::abs(m.M_p(0, 0) - 0.06) <= 1e-15, "single line M_p != 2r");
        o.require(std::abs(m.H(0, 0) - (0.03 * 0.03 + 0.07 * 0.07)) <= 1e-15, "single line H != |z|^2");
    }
    {
        net::FeederSpec s;
        s.buses = {{0}, {1}, {2}};
        s.branches = {{0, 1, 0.1, 0.2}, {1, 2, 0.1, 0.2}};
        const auto m = net::compact_matrices(net::build_network(s));
        Eigen::Matrix2d c;
        c << 1, 1, 0, 1;
        o.require((m.C - c).norm() == 0.0, "path C != [[1,1],[0,1]]");
    }
    std::mt19937_64 rng(17);
    double worst = 0.0;
    const int trees = 50;
    for (int t = 0; t < trees; ++t) {
        const int n = 2 + static_cast<int>(rng() % 40);
        std::vector<int> ids(static_cast<std::size_t>(n) + 1);
        std::iota(ids.begin(), ids.end(), 1);
        std::shuffle(ids.begin() + 1, ids.end(), rng);
        std::uniform_real_distribution<double> imp(0.001, 0.05);
        net::FeederSpec s;
        for (int id : ids) s.buses.push_back({id, 0.0, 0.0, id != ids[0]});
        for (int k = 1; k <= n; ++k) {
            std::uniform_int_distribution<int> parent(0, k - 1);
            s.branches.push_back(
                {ids[static_cast<std::size_t>(parent(rng))], ids[static_cast<std::size_t>(k)], imp(rng), imp(rng)});
        }
        std::shuffle(s.branches.begin(), s.branches.end(), rng);
        const auto m = net::compact_matrices(net::build_network(s));
        Eigen::MatrixXd power = m.A;
        for (int k = 1; k < n; ++k) power = power * m.A;
        o.require(power.cwiseAbs().maxCoeff() == 0.0, fmt::format("tree {}: A^N != 0", t));
        const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
        worst = std::max(worst, (m.C * (I - m.A) - I).cwiseAbs().maxCoeff());
    }
    o.require(worst <= 1e-12, fmt::format("max |C(I-A) - I| = {:.3g}", worst));
    o.detail = fmt::format("single line, path, {} random trees, max |C(I-A) - I| = {:.2g}", trees, worst);
    return o;
}

}  // namespace

int main() {
    run("four_bus_limits", four_bus_limits);
    run("envelope_dominance", envelope_dominance);
    run("envelope_mae", envelope_mae);
    run("audit_soundness", audit_soundness);
    run("fairness_bounds", fairness_bounds);
    run("scenario_behavior", scenario_behavior);
    run("economics_properties", economics_properties);
    run("hand_oracles", hand_oracles);
    run("compact_matrices", compact_matrix_checks);
    fmt::print("{} of 9 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
