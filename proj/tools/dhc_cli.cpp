#include "dhc/cia/audit.hpp"
#include "dhc/cia/dhc_series.hpp"
#include "dhc/cia/hosting_capacity.hpp"
#include "dhc/common/error.hpp"
#include "dhc/economics/pv_economics.hpp"
#include "dhc/fairness/jfi.hpp"
#include "dhc/fairness/report.hpp"
#include "dhc/io/config.hpp"
#include "dhc/io/csv.hpp"
#include "dhc/io/fixtures.hpp"
#include "dhc/io/series_io.hpp"
#include "dhc/io/svg.hpp"
#include "dhc/loadflow/sweep.hpp"
#include "dhc/net_model/compact_matrices.hpp"
#include "dhc/net_model/network_json.hpp"

#include <CLI11.hpp>
#include <fmt/core.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdio>
#include <map>

using namespace dhc;
using nlohmann::json;

namespace {

/// Flag values as typed on the command line; only the ones given override the config.
struct Flags {
    std::string config, network, demand, pv, moer, out, scenario, variant, dc_grid, daytime;
    double epsilon = 0.0, lambda_curt = 0.0, lambda_co2 = 0.0, m_pv = 0.0;
    std::uint64_t seed = 0;
    int iterations = 1;
    std::size_t samples = 0, workers = 0;
    std::multimap<std::string, CLI::Option*> given;
};

void add_options(CLI::App* sub, Flags& f, const std::vector<std::string>& keys) {
    sub->add_option("--config", f.config, "JSON file with the same keys; flags override it")->check(CLI::ExistingFile);
    for (const auto& k : keys) {
        CLI::Option* o = nullptr;
        if (k == "network") o = sub->add_option("--network", f.network, "feeder JSON");
        else if (k == "demand") o = sub->add_option("--demand", f.demand, "demand CSV (timestamp,node_id,p_kw)");
        else if (k == "pv") o = sub->add_option("--pv", f.pv, "reference PV CSV (timestamp,p_kw)");
        else if (k == "moer") o = sub->add_option("--moer", f.moer, "MOER CSV (timestamp,moer_lb_per_mwh)");
        else if (k == "out") o = sub->add_option("--out", f.out, "output directory");
        else if (k == "scenario") o = sub->add_option("--scenario", f.scenario, "s1, s2, s3, s4, s1f1 or s1f2");
        else if (k == "variant") o = sub->add_option("--variant", f.variant, "soc or conservative");
        else if (k == "epsilon") o = sub->add_option("--epsilon", f.epsilon, "fairness level for s1f1/s1f2");
        else if (k == "dc-grid") o = sub->add_option("--dc-grid", f.dc_grid, "capacity increases, a,b,c or start:step:stop");
        else if (k == "lambda-curt") o = sub->add_option("--lambda-curt", f.lambda_curt, "curtailment price ($/kWh)");
        else if (k == "lambda-co2") o = sub->add_option("--lambda-co2", f.lambda_co2, "carbon price ($/tCO2)");
        else if (k == "m-pv") o = sub->add_option("--m-pv", f.m_pv, "PV life-cycle intensity (gCO2/kWh)");
        else if (k == "daytime") o = sub->add_option("--daytime", f.daytime, "daytime window HH:MM-HH:MM");
        else if (k == "seed") o = sub->add_option("--seed", f.seed, "random seed");
        else if (k == "iterations") o = sub->add_option("--iterations", f.iterations, "linearizations per solve");
        else if (k == "samples") o = sub->add_option("--samples", f.samples, "Monte-Carlo samples");
        else if (k == "workers") o = sub->add_option("--workers", f.workers, "threads (0 = all cores)");
        f.given.emplace(k, o);
    }
}

io::RunConfig resolve_config(const Flags& f) {
    io::RunConfig c;
    if (!f.config.empty()) {
        c = io::load_config(f.config);
    }
    auto set = [&](const char* k) {
        const auto [lo, hi] = f.given.equal_range(k);
        return std::any_of(lo, hi, [](const auto& e) { return e.second != nullptr && e.second->count() > 0; });
    };
    if (set("network")) c.network = f.network;
    if (set("demand")) c.demand = f.demand;
    if (set("pv")) c.pv = f.pv;
    if (set("moer")) c.moer = f.moer;
    if (set("out")) c.out = f.out;
    if (set("scenario")) c.scenario = f.scenario;
    if (set("variant")) c.variant = f.variant;
    if (set("epsilon")) c.epsilon = f.epsilon;
    if (set("dc-grid")) c.dc_grid = io::parse_dc_grid(f.dc_grid);
    if (set("lambda-curt")) c.lambda_curt = f.lambda_curt;
    if (set("lambda-co2")) c.lambda_co2 = f.lambda_co2;
    if (set("m-pv")) c.m_pv = f.m_pv;
    if (set("daytime")) c.daytime = parse_daytime_window(f.daytime);
    if (set("seed")) c.seed = f.seed;
    if (set("iterations")) c.iterations = f.iterations;
    if (set("samples")) c.samples = f.samples;
    if (set("workers")) c.workers = f.workers;
    if (c.dc_grid.empty()) c.dc_grid = econ::default_dc_grid();
    return c;
}

std::vector<cia::BoundVariant> variants(const io::RunConfig& c) {
    if (c.variant == "both") return {cia::BoundVariant::conservative, cia::BoundVariant::soc};
    return {cia::bound_variant_from_string(c.variant)};
}

json matrix_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        rows.push_back(std::vector<double>(m.row(i).begin(), m.row(i).end()));
    }
    return rows;
}

json vector_json(const Eigen::VectorXd& v) { return std::vector<double>(v.begin(), v.end()); }

std::string dump(const json& j) { return j.dump(2) + "\n"; }

cia::HcOptions hc_options(const io::RunConfig& c) {
    cia::HcOptions o;
    o.max_iterations = c.iterations;
    return o;
}

cia::DhcOptions dhc_options(const io::RunConfig& c) {
    cia::DhcOptions o;
    o.hc = hc_options(c);
    o.daytime = c.daytime;
    o.workers = c.workers;
    return o;
}

std::string dhc_name(const std::string& scenario, cia::BoundVariant v) {
    return fmt::format("dhc_{}_{}.csv", scenario, cia::to_string(v));
}

// ---------------------------------------------------------------------------

int run_matrices(const io::RunConfig& c, io::OutputSet& out) {
    io::validate_config(c, {"network"});
    const auto net = net::load_network_file(c.network);
    const auto m = net::compact_matrices(net);
    json j;
    j["network"] = net.name();
    j["bus_ids"] = net.bus_ids();
    j["incidence"] = matrix_json(m.incidence);
    j["A"] = matrix_json(m.A);
    j["C"] = matrix_json(m.C);
    j["D_R"] = matrix_json(m.D_R);
    j["D_X"] = matrix_json(m.D_X);
    j["M_p"] = matrix_json(m.M_p);
    j["M_q"] = matrix_json(m.M_q);
    j["H"] = matrix_json(m.H);
    j["R"] = vector_json(m.R);
    j["X"] = vector_json(m.X);
    out.add("matrices.json", dump(j));
    fmt::print("{}: {} buses, {} branches, {} generation nodes\n", net.name(), net.bus_count(), net.branch_count(),
               net.generator_buses().size());
    return 0;
}

struct SweepFlags {
    int bus_a = 0, bus_b = 0;
    double min_a = -1.0, max_a = 2.0, min_b = -1.0, max_b = 2.0;
    std::size_t resolution = 61;
};

int run_sweep(const io::RunConfig& c, const SweepFlags& s, io::OutputSet& out) {
    io::validate_config(c, {"network"});
    const auto net = net::load_network_file(c.network);
    lf::SweepGrid grid;
    grid.bus_ids = {s.bus_a, s.bus_b};
    grid.min_mw = {s.min_a, s.min_b};
    grid.max_mw = {s.max_a, s.max_b};
    grid.resolution = {s.resolution, s.resolution};
    const auto raster = lf::sweep_admissible_set(net, grid, c.workers);
    io::CsvWriter w("sweep/1", {"pg_node_a_mw", "pg_node_b_mw", "class"});
    for (const auto& cell : raster.cells) {
        w.field(cell.pg_a_mw).field(cell.pg_b_mw).field(lf::to_string(cell.cls));
        w.end_row();
    }
    out.add("sweep.csv", w.str());
    out.add("sweep.svg", io::svg_raster(raster));
    fmt::print("nodes {} and {}: {} admissible, {} violating, {} non-converged cells\n", s.bus_a, s.bus_b,
               raster.count(lf::CellClass::admissible), raster.count(lf::CellClass::violation),
               raster.count(lf::CellClass::nonconverged));
    return 0;
}

json box_json(const cia::Hyperrectangle& b) {
    json j;
    j["scenario"] = b.scenario;
    j["variant"] = cia::to_string(b.variant);
    j["node_ids"] = b.bus_ids;
    j["pg_minus_mw"] = vector_json(b.p_minus_mw);
    j["pg_plus_mw"] = vector_json(b.p_plus_mw);
    j["aggregate_minus_mw"] = b.aggregate_minus_mw();
    j["aggregate_plus_mw"] = b.aggregate_plus_mw();
    j["iterations"] = b.iterations;
    return j;
}

std::string hc_csv(const std::vector<cia::Hyperrectangle>& boxes) {
    io::CsvWriter w("hc/1", {"node_id", "pg_minus_mw", "pg_plus_mw", "scenario", "variant"});
    for (const auto& b : boxes) {
        for (std::size_t g = 0; g < b.size(); ++g) {
            const auto gg = static_cast<Eigen::Index>(g);
            w.field(b.bus_ids[g]).field(b.p_minus_mw(gg)).field(b.p_plus_mw(gg)).field(b.scenario);
            w.field(cia::to_string(b.variant));
            w.end_row();
        }
    }
    return w.str();
}

std::vector<cia::Hyperrectangle> read_hc_csv(const std::filesystem::path& path) {
    const auto doc = io::read_csv(path);
    doc.require_header({"node_id", "pg_minus_mw", "pg_plus_mw", "scenario", "variant"});
    std::map<std::string, cia::Hyperrectangle> by_variant;
    std::vector<std::string> order;
    for (const auto& row : doc.rows) {
        const auto& v = doc.text(row, 4);
        if (!by_variant.count(v)) {
            order.push_back(v);
            auto& b = by_variant[v];
            b.scenario = doc.text(row, 3);
            try {
                b.variant = cia::bound_variant_from_string(v);
            } catch (const Error& e) {
                doc.fail(row, 4, e.what());
            }
        }
        auto& b = by_variant[v];
        b.bus_ids.push_back(static_cast<int>(doc.integer(row, 0)));
        const auto n = b.p_minus_mw.size();
        b.p_minus_mw.conservativeResize(n + 1);
        b.p_plus_mw.conservativeResize(n + 1);
        b.p_minus_mw(n) = doc.number(row, 1);
        b.p_plus_mw(n) = doc.number(row, 2);
    }
    std::vector<cia::Hyperrectangle> boxes;
    for (const auto& v : order) boxes.push_back(by_variant[v]);
    if (boxes.empty()) {
        throw InputError(fmt::format("{}: no hyperrectangle rows", path.string()));
    }
    return boxes;
}

int run_hc(io::RunConfig c, io::OutputSet& out, bool both) {
    if (both) c.variant = "both";
    io::validate_config(c, {"network"});
    const auto net = net::load_network_file(c.network);
    const auto m = net::compact_matrices(net);
    const auto scenario = fair::scenario_preset(c.scenario, c.epsilon);
    std::vector<cia::Hyperrectangle> boxes;
    for (auto v : variants(c)) {
        boxes.push_back(cia::solve_hc(net, m, cia::nominal_p_demand(net), cia::nominal_q_demand(net), scenario, v,
                                      hc_options(c)));
    }
    fmt::print("HC limits of {} after {} iteration(s), scenario {}\n", net.name(), c.iterations, scenario.name);
    fmt::print("{:<14}{:>22}\n", "variant", "aggregate HC (MW)");
    for (const auto& b : boxes) {
        fmt::print("{:<14}{:>22}\n", cia::to_string(b.variant),
                   fmt::format("[{:.2f}, {:.2f}]", b.aggregate_minus_mw(), b.aggregate_plus_mw()));
    }
    fmt::print("\n{:<8}", "node");
    for (const auto& b : boxes) fmt::print("{:>26}", cia::to_string(b.variant));
    fmt::print("\n");
    for (std::size_t g = 0; g < boxes.front().size(); ++g) {
        fmt::print("{:<8}", boxes.front().bus_ids[g]);
        for (const auto& b : boxes) {
            const auto gg = static_cast<Eigen::Index>(g);
            fmt::print("{:>26}", fmt::format("[{:.4f}, {:.4f}]", b.p_minus_mw(gg), b.p_plus_mw(gg)));
        }
        fmt::print("\n");
    }
    json j;
    j["network"] = net.name();
    j["iterations"] = c.iterations;
    j["boxes"] = json::array();
    for (const auto& b : boxes) j["boxes"].push_back(box_json(b));
    out.add("hc.json", dump(j));
    out.add("hc.csv", hc_csv(boxes));
    return 0;
}

int run_validate(const io::RunConfig& c, const std::string& hc_file, io::OutputSet& out) {
    io::validate_config(c, {"network"});
    const auto net = net::load_network_file(c.network);
    std::vector<cia::Hyperrectangle> boxes;
    if (!hc_file.empty()) {
        boxes = read_hc_csv(hc_file);
    } else {
        const auto m = net::compact_matrices(net);
        const auto scenario = fair::scenario_preset(c.scenario, c.epsilon);
        for (auto v : variants(c)) {
            boxes.push_back(cia::solve_hc(net, m, cia::nominal_p_demand(net), cia::nominal_q_demand(net), scenario, v,
                                          hc_options(c)));
        }
    }
    json j = json::array();
    std::size_t total = 0;
    for (const auto& b : boxes) {
        const auto a = cia::audit_hyperrectangle(net, b, cia::nominal_p_demand(net), cia::nominal_q_demand(net),
                                                 c.samples, c.seed, 1e-6, c.workers);
        fmt::print("{} {}: {} samples, {} violations ({} non-converged), worst excess {:.3e}\n", b.scenario,
                   cia::to_string(b.variant), a.samples, a.violations, a.nonconverged, a.worst_violation);
        json r;
        r["scenario"] = b.scenario;
        r["variant"] = cia::to_string(b.variant);
        r["samples"] = a.samples;
        r["violations"] = a.violations;
        r["nonconverged"] = a.nonconverged;
        r["worst_violation"] = a.worst_violation;
        r["seed"] = c.seed;
        j.push_back(r);
        total += a.violations;
    }
    out.add("validate.json", dump(j));
    return total == 0 ? 0 : 3;
}

cia::DhcSeries compute_dhc(const net::Network& net, const net::CompactMatrices& m, const cia::DemandSeries& demand,
                           const io::RunConfig& c, const std::string& scenario_name, cia::BoundVariant v) {
    const auto scenario = fair::scenario_preset(scenario_name, c.epsilon);
    fmt::print(stderr, "computing DHC for {} ({} bounds) over {} steps\n", scenario_name, cia::to_string(v),
               demand.steps());
    auto s = cia::dhc_timeseries(net, m, demand, scenario, v, dhc_options(c));
    for (const auto& step : s.steps) {
        if (step.status == cia::StepStatus::failed) {
            fmt::print(stderr, "  {} failed: {}\n", format_rfc3339(step.timestamp), step.error);
        }
    }
    return s;
}

io::LineChart series_chart(const cia::DhcSeries& s) {
    io::LineChart chart;
    chart.title = fmt::format("Aggregate DHC, {} ({} bounds)", s.scenario, cia::to_string(s.variant));
    chart.x_label = "hour of day";
    chart.y_label = "MW";
    io::PlotSeries up{"upper"}, lo{"lower"};
    for (const auto& st : s.steps) {
        if (st.status != cia::StepStatus::solved) continue;
        const double h = static_cast<double>(seconds_of_day(st.timestamp)) / 3600.0;
        up.x.push_back(h);
        up.y.push_back(st.box->aggregate_plus_mw());
        lo.x.push_back(h);
        lo.y.push_back(st.box->aggregate_minus_mw());
    }
    chart.series = {up, lo};
    return chart;
}

json series_summary(const cia::DhcSeries& s) {
    json j;
    j["scenario"] = s.scenario;
    j["variant"] = cia::to_string(s.variant);
    j["steps"] = s.steps.size();
    j["solved"] = s.count(cia::StepStatus::solved);
    j["night"] = s.count(cia::StepStatus::night);
    j["failed"] = s.count(cia::StepStatus::failed);
    j["step_seconds"] = s.step_seconds;
    j["daytime"] = format_daytime_window(s.daytime);
    json errors = json::array();
    for (const auto& st : s.steps) {
        if (st.status == cia::StepStatus::failed) {
            errors.push_back({{"timestamp", format_rfc3339(st.timestamp)}, {"error", st.error}});
        }
    }
    j["errors"] = errors;
    return j;
}

int run_dhc(const io::RunConfig& c, io::OutputSet& out) {
    io::validate_config(c, {"network", "demand"});
    const auto net = net::load_network_file(c.network);
    const auto m = net::compact_matrices(net);
    const auto demand = io::read_demand_csv(c.demand, net);
    json summary = json::array();
    for (auto v : variants(c)) {
        const auto s = compute_dhc(net, m, demand, c, c.scenario, v);
        out.add(dhc_name(c.scenario, v), io::dhc_csv(s));
        out.add(fmt::format("dhc_{}_{}.svg", c.scenario, cia::to_string(v)), io::svg_line_chart(series_chart(s)));
        summary.push_back(series_summary(s));
        fmt::print("{} {}: {} solved, {} night, {} failed steps\n", s.scenario, cia::to_string(v),
                   s.count(cia::StepStatus::solved), s.count(cia::StepStatus::night), s.count(cia::StepStatus::failed));
    }
    out.add(fmt::format("dhc_{}_summary.json", c.scenario), dump(summary));
    return 0;
}

int run_fairness(const io::RunConfig& c, const std::string& dhc_file, io::OutputSet& out) {
    io::validate_config(c, {"network", "demand"});
    const auto net = net::load_network_file(c.network);
    const auto demand = io::read_demand_csv(c.demand, net);
    cia::DhcSeries s;
    if (!dhc_file.empty()) {
        s = io::read_dhc_csv(dhc_file);
    } else {
        s = compute_dhc(net, net::compact_matrices(net), demand, c, c.scenario, variants(c).front());
    }
    const auto r = fair::fairness_report(net, s, demand);
    out.add(fmt::format("temporal_jfi_{}.csv", r.scenario), io::temporal_jfi_csv(r));
    out.add(fmt::format("spatial_jfi_{}.csv", r.scenario), io::spatial_jfi_csv(r));
    out.add(fmt::format("rho_{}.csv", r.scenario), io::rho_csv(r));
    io::LineChart chart;
    chart.title = fmt::format("Spatial JFI, {}", r.scenario);
    chart.x_label = "hour of day";
    chart.y_label = "JFI";
    io::PlotSeries sp{"spatial"};
    for (std::size_t t = 0; t < r.timestamps.size(); ++t) {
        sp.x.push_back(static_cast<double>(seconds_of_day(r.timestamps[t])) / 3600.0);
        sp.y.push_back(r.spatial_jfi(static_cast<Eigen::Index>(t)));
    }
    chart.series = {sp};
    out.add(fmt::format("spatial_jfi_{}.svg", r.scenario), io::svg_line_chart(chart));

    json j;
    j["scenario"] = r.scenario;
    j["node_ids"] = r.bus_ids;
    j["excluded_node_ids"] = r.excluded_bus_ids;
    j["temporal_jfi"] = vector_json(r.temporal_jfi);
    j["spatial_jfi_min"] = r.spatial_jfi.size() ? r.spatial_jfi.minCoeff() : 0.0;
    j["spatial_jfi_mean"] = r.spatial_jfi.size() ? r.spatial_jfi.mean() : 0.0;
    const auto scenario = fair::scenario_preset(s.scenario, c.epsilon);
    if (scenario.fairness) {
        j["epsilon"] = scenario.fairness->epsilon;
        j["jfi_lower_bound"] = fair::jfi_lower_bound(scenario.fairness->epsilon, s.bus_ids.size());
    }
    out.add(fmt::format("fairness_{}.json", r.scenario), dump(j));
    fmt::print("{}: {} nodes ({} excluded), temporal JFI min {:.4f}, spatial JFI mean {:.4f}\n", r.scenario,
               r.bus_ids.size(), r.excluded_bus_ids.size(), r.temporal_jfi.size() ? r.temporal_jfi.minCoeff() : 0.0,
               r.spatial_jfi.size() ? r.spatial_jfi.mean() : 0.0);
    for (int id : r.excluded_bus_ids) {
        fmt::print(stderr, "node {} excluded: nonpositive demand at a solved step\n", id);
    }
    return 0;
}

struct ScenarioEconomics {
    std::string scenario;
    econ::StaticLimits limits;
    econ::Alignment aligned;
    econ::BaseProfile base;
};

ScenarioEconomics prepare(const cia::DhcSeries& s, const econ::TimeSeries& pv) {
    ScenarioEconomics e;
    e.scenario = s.scenario;
    e.limits = econ::static_limits(s);
    e.aligned = econ::align_pv(s, pv);
    e.base = econ::base_profile(e.limits, e.aligned);
    return e;
}

io::LineChart dc_chart(const std::string& title, const std::string& y_label) {
    io::LineChart c;
    c.title = title;
    c.x_label = "capacity increase (%)";
    c.y_label = y_label;
    return c;
}

int run_economics(const io::RunConfig& c, const std::string& dhc_dir, bool demand_sensitivity, io::OutputSet& out) {
    io::validate_config(c, {"network", "demand", "pv", "moer"});
    const auto net = net::load_network_file(c.network);
    const auto m = net::compact_matrices(net);
    const auto demand = io::read_demand_csv(c.demand, net);
    const auto pv = io::read_series_csv(c.pv, io::kPvColumn);
    auto moer = io::read_series_csv(c.moer, io::kMoerColumn);
    for (auto& v : moer.values) v = econ::lb_per_mwh_to_g_per_kwh(v);
    const auto variant = variants(c).front();

    auto series_for = [&](const std::string& name, const cia::DemandSeries& d, bool reuse) {
        if (reuse && !dhc_dir.empty()) {
            const auto path = std::filesystem::path(dhc_dir) / dhc_name(name, variant);
            if (std::filesystem::exists(path)) {
                fmt::print(stderr, "reusing {}\n", path.string());
                return io::read_dhc_csv(path);
            }
        }
        auto s = compute_dhc(net, m, d, c, name, variant);
        out.add(dhc_name(name, variant), io::dhc_csv(s));
        return s;
    };

    std::vector<ScenarioEconomics> all;
    for (const auto& name : fair::scenario_names()) {
        all.push_back(prepare(series_for(name, demand, true), pv));
    }
    std::vector<econ::BaseProfile> bases;
    for (const auto& e : all) bases.push_back(e.base);
    const double common = econ::common_base(bases);

    econ::CarbonParams params{c.lambda_curt, c.lambda_co2, c.m_pv};
    json summary;
    summary["common_base_mwh"] = common;
    summary["lambda_curt_usd_per_kwh"] = c.lambda_curt;
    summary["lambda_co2_usd_per_t"] = c.lambda_co2;
    summary["m_pv_g_per_kwh"] = c.m_pv;
    summary["dc_grid"] = c.dc_grid;
    summary["scenarios"] = json::array();
    auto e_add = dc_chart("Additional energy", "MWh"), e_curt = dc_chart("Curtailed energy", "MWh");
    auto np = dc_chart(fmt::format("Net profit at ${}/tCO2", c.lambda_co2), "$k");
    for (const auto& e : all) {
        const auto curves = econ::curtailment_curves(e.aligned, e.base, c.dc_grid, common, e.scenario);
        const auto report = econ::carbon_and_profit(e.aligned, e.base, curves, moer, params);
        out.add(fmt::format("economics_{}.csv", e.scenario), io::economics_csv(report));
        out.add(fmt::format("economics_nodes_{}.csv", e.scenario), io::economics_nodes_csv(report));
        json s;
        s["scenario"] = e.scenario;
        s["node_ids"] = e.limits.bus_ids;
        s["l_pv_mw"] = vector_json(e.limits.l_pv_mw);
        s["zero_limit_node_ids"] = e.limits.zero_bus_ids;
        s["e_base_mwh"] = vector_json(e.base.e_base_mwh);
        s["e_add_limit_mwh"] = vector_json(curves.asymptote_mwh);
        s["best_dc"] = report.best_dc();
        s["best_np_usd"] = report.points[report.best_index].np;
        s["moer_gaps"] = report.moer_gaps;
        s["excluded_pv_steps"] = e.aligned.excluded_pv_steps;
        s["failed_dhc_steps"] = e.limits.failed_steps;
        summary["scenarios"].push_back(s);
        io::PlotSeries a{e.scenario}, cu{e.scenario}, p{e.scenario};
        for (std::size_t k = 0; k < report.points.size(); ++k) {
            const double x = 100.0 * c.dc_grid[k];
            a.x.push_back(x);
            a.y.push_back(curves.points[k].e_add_common);
            cu.x.push_back(x);
            cu.y.push_back(curves.points[k].e_curt_total);
            p.x.push_back(x);
            p.y.push_back(report.points[k].np / 1000.0);
        }
        p.marker = static_cast<int>(report.best_index);
        e_add.series.push_back(a);
        e_curt.series.push_back(cu);
        np.series.push_back(p);
        fmt::print("{:<5} sum L_pv {:7.3f} MW  E_base {:9.1f} MWh  best dc {:4.0f}%  NP ${:.0f}\n", e.scenario,
                   e.limits.l_pv_mw.sum(), e.base.e_base_total_mwh(), 100.0 * report.best_dc(),
                   report.points[report.best_index].np);
    }
    out.add("e_add.svg", io::svg_line_chart(e_add));
    out.add("e_curt.svg", io::svg_line_chart(e_curt));
    out.add("net_profit.svg", io::svg_line_chart(np));

    // carbon price sweep on the selected scenario
    const auto focus = std::find_if(all.begin(), all.end(), [&](const auto& e) { return e.scenario == c.scenario; });
    const auto curves = econ::curtailment_curves(focus->aligned, focus->base, c.dc_grid, common, focus->scenario);
    auto prices = dc_chart(fmt::format("Net profit vs carbon price, {}", focus->scenario), "$k");
    json price_json = json::array();
    for (double lam : {50.0, 100.0, 150.0, 200.0}) {
        auto p = params;
        p.lambda_co2 = lam;
        const auto r = econ::carbon_and_profit(focus->aligned, focus->base, curves, moer, p);
        io::PlotSeries ps{fmt::format("${}/t", lam)};
        for (const auto& pt : r.points) {
            ps.x.push_back(100.0 * pt.dc);
            ps.y.push_back(pt.np / 1000.0);
        }
        ps.marker = static_cast<int>(r.best_index);
        prices.series.push_back(ps);
        price_json.push_back({{"lambda_co2", lam}, {"best_dc", r.best_dc()}, {"best_np_usd", r.points[r.best_index].np}});
    }
    summary["carbon_price_sweep"] = price_json;
    out.add("net_profit_carbon_price.svg", io::svg_line_chart(prices));

    if (demand_sensitivity) {
        auto add_pct = dc_chart(fmt::format("Additional energy vs demand, {}", focus->scenario), "%");
        auto curt_pct = dc_chart(fmt::format("Curtailed energy vs demand, {}", focus->scenario), "%");
        json dj = json::array();
        for (double f : {0.75, 1.0, 1.25}) {
            const auto s = f == 1.0 ? series_for(focus->scenario, demand, true)
                                    : compute_dhc(net, m, cia::scaled(demand, f), c, focus->scenario, variant);
            const auto e = prepare(s, pv);
            const auto cv = econ::curtailment_curves(e.aligned, e.base, c.dc_grid, common, e.scenario);
            io::PlotSeries a{fmt::format("demand x{}", f)}, cu{fmt::format("demand x{}", f)};
            for (const auto& pt : cv.points) {
                a.x.push_back(100.0 * pt.dc);
                a.y.push_back(pt.e_add_pct);
                cu.x.push_back(100.0 * pt.dc);
                cu.y.push_back(pt.e_curt_pct);
            }
            add_pct.series.push_back(a);
            curt_pct.series.push_back(cu);
            dj.push_back({{"demand_factor", f}, {"l_pv_mw", vector_json(e.limits.l_pv_mw)}});
        }
        summary["demand_sensitivity"] = dj;
        out.add("e_add_demand.svg", io::svg_line_chart(add_pct));
        out.add("e_curt_demand.svg", io::svg_line_chart(curt_pct));
    }
    out.add("economics.json", dump(summary));
    return 0;
}

int run_fixtures(const io::RunConfig& c, io::OutputSet& out) {
    io::validate_config(c, {"network"});
    const auto net = net::load_network_file(c.network);
    io::FixtureOptions o;
    o.seed = c.seed;
    out.add("demand_day.csv", io::demand_csv(io::synthetic_demand_day(net, o), net));
    out.add("pv_year.csv", io::series_csv(io::synthetic_pv_year(o), "pv/1", io::kPvColumn));
    out.add("moer_year.csv", io::series_csv(io::synthetic_moer_year(o), "moer/1", io::kMoerColumn));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fairness-aware dynamic hosting capacity for radial feeders"};
    app.require_subcommand(1);
    Flags f;
    SweepFlags sweep;
    std::string hc_file, dhc_file, dhc_dir;
    bool sensitivity = false;

    auto* matrices = app.add_subcommand("matrices", "dump the compact DistFlow matrices");
    add_options(matrices, f, {"network", "out"});
    auto* sw = app.add_subcommand("sweep", "load-flow admissibility raster over two generation nodes");
    add_options(sw, f, {"network", "out", "workers"});
    sw->add_option("--bus-a", sweep.bus_a, "first swept node")->required();
    sw->add_option("--bus-b", sweep.bus_b, "second swept node")->required();
    sw->add_option("--min-a", sweep.min_a);
    sw->add_option("--max-a", sweep.max_a);
    sw->add_option("--min-b", sweep.min_b);
    sw->add_option("--max-b", sweep.max_b);
    sw->add_option("--resolution", sweep.resolution, "samples per axis");
    auto* hc = app.add_subcommand("hc", "single-snapshot hyperrectangle, both bound variants");
    add_options(hc, f, {"network", "out", "scenario", "epsilon", "iterations"});
    auto* dhc = app.add_subcommand("dhc", "hosting capacity at every daytime step of a demand series");
    add_options(dhc, f, {"network", "demand", "out", "scenario", "variant", "epsilon", "iterations", "daytime", "workers"});
    auto* fairness = app.add_subcommand("fairness", "Jain indices of a DHC series");
    add_options(fairness, f, {"network", "demand", "out", "scenario", "variant", "epsilon", "daytime", "workers"});
    fairness->add_option("--dhc", dhc_file, "existing DHC CSV (computed when absent)")->check(CLI::ExistingFile);
    auto* economics = app.add_subcommand("economics", "curtailment, avoided CO2 and net profit");
    add_options(economics, f,
                {"network", "demand", "pv", "moer", "out", "scenario", "variant", "epsilon", "dc-grid", "lambda-curt",
                 "lambda-co2", "m-pv", "daytime", "workers"});
    economics->add_option("--dhc-dir", dhc_dir, "directory with DHC CSVs to reuse");
    economics->add_flag("--demand-sensitivity", sensitivity, "also run the +/-25% demand cases");
    auto* validate = app.add_subcommand("validate", "Monte-Carlo admissibility audit of a hyperrectangle");
    add_options(validate, f, {"network", "out", "scenario", "variant", "epsilon", "iterations", "seed", "samples", "workers"});
    validate->add_option("--hc", hc_file, "hc.csv to audit (computed when absent)")->check(CLI::ExistingFile);
    auto* fixtures = app.add_subcommand("fixtures", "write the synthetic demand, PV and MOER series");
    add_options(fixtures, f, {"network", "out", "seed"});

    CLI11_PARSE(app, argc, argv);

    try {
        const auto c = resolve_config(f);
        io::OutputSet out;
        int code = 0;
        if (matrices->parsed()) code = run_matrices(c, out);
        else if (sw->parsed()) code = run_sweep(c, sweep, out);
        else if (hc->parsed()) code = run_hc(c, out, true);
        else if (dhc->parsed()) code = run_dhc(c, out);
        else if (fairness->parsed()) code = run_fairness(c, dhc_file, out);
        else if (economics->parsed()) code = run_economics(c, dhc_dir, sensitivity, out);
        else if (validate->parsed()) code = run_validate(c, hc_file, out);
        else if (fixtures->parsed()) code = run_fixtures(c, out);
        std::fflush(stdout);
        for (const auto& p : out.commit(c.out)) {
            fmt::print(stderr, "wrote {}\n", p.string());
        }
        return code;
    } catch (const dhc::Error& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 2;
    }
}
