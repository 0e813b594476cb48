#include "dhc/common/error.hpp"
#include "dhc/io/config.hpp"
#include "dhc/io/csv.hpp"
#include "dhc/io/fixtures.hpp"
#include "dhc/io/series_io.hpp"
#include "dhc/io/svg.hpp"
#include "dhc/net_model/network_json.hpp"

#include <doctest.h>

#include <fstream>

using namespace dhc;
using namespace dhc::io;
namespace fs = std::filesystem;

namespace {

const net::Network& ieee37() {
    static const auto net = net::load_network_file(DHC_DATA_DIR "/ieee37_mod.json");
    return net;
}

/// Scratch directory removed at scope exit.
struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    fs::path write(const std::string& name, const std::string& text) const {
        std::ofstream(path / name) << text;
        return path / name;
    }
};

}  // namespace

TEST_CASE("CSV parsing") {
    const auto doc = parse_csv("# schema: demo/1\n# note\na,b,c\n1,\"x, y\",3\n\n4,\"say \"\"hi\"\"\",6\n", "t.csv");
    CHECK(doc.schema == "demo/1");
    CHECK(doc.header == std::vector<std::string>{"a", "b", "c"});
    CHECK(doc.header_line == 3);
    REQUIRE(doc.rows.size() == 2);
    CHECK(doc.rows[0].line == 4);
    CHECK(doc.rows[0].fields[1] == "x, y");
    CHECK(doc.rows[1].fields[1] == "say \"hi\"");
    CHECK(doc.rows[0].columns[2] == 10);
    CHECK(doc.number(doc.rows[1], 2) == 6.0);
    CHECK(doc.column("c") == 2);

    CHECK_THROWS_WITH_AS(doc.column("zz"), doctest::Contains("t.csv"), InputError);
    CHECK_THROWS_WITH_AS(doc.number(doc.rows[0], 1), doctest::Contains("t.csv:4:3:"), InputError);
    CHECK_THROWS_WITH_AS(parse_csv("a,b\n1,2\n3\n", "w.csv"), doctest::Contains("w.csv:3:"), InputError);
    CHECK_THROWS_WITH_AS(parse_csv("a,b\n1,\"2\n", "q.csv"), doctest::Contains("q.csv:2:"), InputError);
    CHECK_THROWS_AS(doc.require_header({"a", "c"}), InputError);
    CHECK_THROWS_AS(parse_csv("a\n1.5\n").integer(parse_csv("a\n1.5\n").rows[0], 0), InputError);
    CHECK_THROWS_AS(read_csv("/nonexistent/file.csv"), InputError);
}

TEST_CASE("doubles are written in the shortest round-trip form") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 63.657, 0.0}) {
        CHECK(std::stod(format_double(v)) == v);
    }
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(2.0) == "2");
    CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_double(std::nan("")) == "nan");

    CsvWriter w("x/1", {"a", "b"});
    w.field(1.5).field("q,r");
    w.end_row();
    CHECK(w.str() == "# schema: x/1\na,b\n1.5,\"q,r\"\n");
    w.field(1.0);
    CHECK_THROWS(w.end_row());
}

TEST_CASE("demand CSV") {
    const auto& net = ieee37();
    const auto d = synthetic_demand_day(net);
    CHECK(d.steps() == 288);
    const auto agg_kw = d.p_pu.rowwise().sum() * 1000.0 * net.s_base_mva();
    CHECK(agg_kw.minCoeff() == doctest::Approx(660.0).epsilon(1e-3));
    CHECK(agg_kw.maxCoeff() == doctest::Approx(1440.0).epsilon(1e-3));

    const auto text = demand_csv(d, net);
    const auto back = parse_demand_csv(parse_csv(text), net);
    CHECK(back.timestamps == d.timestamps);
    CHECK((back.p_pu - d.p_pu).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((back.q_pu - d.q_pu).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(demand_csv(back, net) == text);

    const auto bundled = read_demand_csv(DHC_DATA_DIR "/demand_day.csv", net);
    CHECK(bundled.steps() == 288);
    CHECK((bundled.p_pu - d.p_pu).cwiseAbs().maxCoeff() < 1e-9);  // the bundled day is this output, rounded to 1e-6 kW

    const std::string head = "timestamp,node_id,p_kw\n";
    CHECK_THROWS_WITH_AS(parse_demand_csv(parse_csv(head + "2023-07-03T00:00:00Z,999,1\n", "d.csv"), net),
                         doctest::Contains("d.csv:2:"), InputError);
    CHECK_THROWS_AS(parse_demand_csv(parse_csv(head + "2023-07-03T00:00:00Z,0,1\n"), net), InputError);  // substation
    CHECK_THROWS_AS(parse_demand_csv(parse_csv(head + "2023-07-03T00:00:00Z,2,1\n2023-07-03T00:00:00Z,2,1\n"), net),
                    InputError);
    CHECK_THROWS_AS(parse_demand_csv(parse_csv(head + "2023-07-03T00:00:00Z,2,1\n2023-07-03T00:05:00Z,3,1\n"), net),
                    InputError);
    CHECK_THROWS_AS(parse_demand_csv(parse_csv(head + "2023-07-03T00:00:00Z,2,abc\n"), net), InputError);
    CHECK_THROWS_AS(parse_demand_csv(parse_csv(head), net), InputError);
    CHECK_THROWS_AS(parse_demand_csv(parse_csv("time,node,p\n"), net), InputError);
}

TEST_CASE("PV and MOER series") {
    const auto pv = synthetic_pv_year();
    CHECK(pv.size() == 365 * 288);
    CHECK(*std::min_element(pv.values.begin(), pv.values.end()) == 0.0);
    CHECK(*std::max_element(pv.values.begin(), pv.values.end()) <= 0.33);
    const auto moer = synthetic_moer_year();
    CHECK(moer.size() == pv.size());
    CHECK(*std::min_element(moer.values.begin(), moer.values.end()) >= 300.0);

    // identical seeds, identical files; the bundled files are this output
    CHECK(series_csv(synthetic_pv_year(), "pv/1", kPvColumn) == series_csv(pv, "pv/1", kPvColumn));
    const auto bundled = read_series_csv(DHC_DATA_DIR "/pv_year.csv", kPvColumn);
    CHECK(bundled.values == pv.values);
    CHECK(read_series_csv(DHC_DATA_DIR "/moer_year.csv", kMoerColumn).values == moer.values);
    FixtureOptions other;
    other.seed = 2;
    CHECK(synthetic_moer_year(other).values != moer.values);

    CHECK_THROWS_AS(parse_series_csv(parse_csv("timestamp,p_kw\n2023-01-01T00:05:00Z,1\n2023-01-01T00:00:00Z,1\n"),
                                     kPvColumn),
                    InputError);
    CHECK_THROWS_AS(parse_series_csv(parse_csv("timestamp,p_kw\n2023-01-01 00:05,1\n"), kPvColumn), InputError);
    CHECK_THROWS_AS(parse_series_csv(parse_csv("timestamp,q\n2023-01-01T00:05:00Z,1\n"), kPvColumn), InputError);
}

TEST_CASE("DHC series CSV round trip") {
    cia::DhcSeries s;
    s.scenario = "s3";
    s.variant = cia::BoundVariant::conservative;
    s.bus_ids = {4, 9};
    s.step_seconds = 1800;
    s.daytime = parse_daytime_window("07:30-19:00");
    const auto t0 = parse_rfc3339("2023-07-03T07:00:00Z");
    for (int k = 0; k < 4; ++k) {
        cia::DhcStep st;
        st.timestamp = t0 + std::chrono::seconds(1800 * k);
        st.status = k == 0 ? cia::StepStatus::night : (k == 2 ? cia::StepStatus::failed : cia::StepStatus::solved);
        if (st.status == cia::StepStatus::solved) {
            cia::Hyperrectangle b;
            b.bus_ids = s.bus_ids;
            b.p_plus_mw = Eigen::Vector2d(0.1 * k, 1.0 / 3.0);
            b.p_minus_mw = Eigen::Vector2d(-0.2, -1e-9);
            st.box = b;
        }
        s.steps.push_back(st);
    }
    const auto text = dhc_csv(s);
    CHECK(text.rfind("# schema: dhc-series/1 step_s=1800 daytime=07:30-19:00\n", 0) == 0);
    const auto back = parse_dhc_csv(parse_csv(text));
    CHECK(back.scenario == "s3");
    CHECK(back.variant == cia::BoundVariant::conservative);
    CHECK(back.bus_ids == s.bus_ids);
    CHECK(back.step_seconds == 1800);
    CHECK(back.daytime.start_s == 7 * 3600 + 1800);
    REQUIRE(back.steps.size() == 4);
    CHECK(back.steps[2].status == cia::StepStatus::failed);
    CHECK(back.steps[3].box->p_plus_mw(1) == 1.0 / 3.0);
    CHECK(back.steps[1].box->p_minus_mw(1) == -1e-9);
    CHECK(dhc_csv(back) == text);

    const TempDir dir("dhc_io_dhc");
    CHECK(read_dhc_csv(dir.write("a.csv", text)).steps.size() == 4);
    std::string broken = text;
    broken.replace(broken.find(",solved"), 7, ",sunny");
    CHECK_THROWS_AS(parse_dhc_csv(parse_csv(broken)), InputError);
}

TEST_CASE("config files") {
    const TempDir dir("dhc_io_config");
    const auto path = dir.write("run.json", R"({
  "network": "feeder.json",
  "scenario": "s1f2",
  "epsilon": 0.5,
  "dc_grid": "0:0.25:1",
  "lambda_co2": 150,
  "daytime": "05:00-21:00",
  "out": "/abs/out"
})");
    const auto c = load_config(path);
    CHECK(c.network == dir.path / "feeder.json");
    CHECK(c.out == fs::path("/abs/out"));
    CHECK(c.scenario == "s1f2");
    CHECK(*c.epsilon == 0.5);
    CHECK(c.dc_grid == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
    CHECK(c.lambda_co2 == 150.0);
    CHECK(c.lambda_curt == 0.20);
    CHECK(c.daytime.end_s == 21 * 3600);

    CHECK_THROWS_WITH_AS(load_config(dir.write("bad.json", "{\n  \"seed\": 1,\n  \"oops\": \n}")),
                         doctest::Contains("bad.json:4:1"), InputError);
    CHECK_THROWS_WITH_AS(load_config(dir.write("key.json", "{\"colour\": 1}")), doctest::Contains("colour"),
                         InputError);
    CHECK_THROWS_AS(load_config(dir.write("type.json", "{\"seed\": \"one\"}")), InputError);
    CHECK_THROWS_AS(load_config(dir.write("arr.json", "[1]")), InputError);
    CHECK_THROWS_AS(load_config(dir.path / "missing.json"), InputError);

    CHECK(parse_dc_grid("0, 0.1,0.3") == std::vector<double>{0.0, 0.1, 0.3});
    CHECK(parse_dc_grid("0:0.05:1").size() == 21);
    CHECK(parse_dc_grid("0:0.05:1").back() == 1.0);
    CHECK_THROWS_AS(parse_dc_grid("0:0:1"), InputError);
    CHECK_THROWS_AS(parse_dc_grid("a,b"), InputError);

    RunConfig v;
    v.network = DHC_DATA_DIR "/fourbus.json";
    CHECK_NOTHROW(validate_config(v, {"network"}));
    CHECK_THROWS_AS(validate_config(v, {"network", "demand"}), InputError);
    v.variant = "exact";
    CHECK_THROWS_AS(validate_config(v, {"network"}), InputError);
    v.variant = "both";
    v.scenario = "s1f1";
    v.epsilon = 2.0;
    CHECK_THROWS_AS(validate_config(v, {"network"}), Error);
}

TEST_CASE("outputs are written together or not at all") {
    const TempDir dir("dhc_io_out");
    OutputSet out;
    out.add("b.txt", "two");
    out.add("a.txt", "one");
    const auto written = out.commit(dir.path / "nested");
    CHECK(written.size() == 2);
    std::ifstream in(dir.path / "nested" / "a.txt");
    std::string s;
    in >> s;
    CHECK(s == "one");
    for (const auto& e : fs::directory_iterator(dir.path / "nested")) {
        CHECK(e.path().extension() == ".txt");
    }
    // a file in place of the directory blocks the commit
    dir.write("plain", "x");
    CHECK_THROWS_AS(out.commit(dir.path / "plain"), InputError);
}

TEST_CASE("SVG output") {
    LineChart c;
    c.title = "A & B";
    c.x_label = "x";
    c.y_label = "y";
    c.series.push_back({"one", {0, 1, 2}, {0, 1, 4}, 2});
    c.series.push_back({"two", {0, 1, 2}, {1, 1, 1}});
    const auto svg = svg_line_chart(c);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("A &amp; B") != std::string::npos);
    CHECK(svg.find("polyline") != std::string::npos);

    lf::SweepRaster r;
    r.rows = 2;
    r.cols = 3;
    r.bus_ids = {3, 4};
    for (std::size_t i = 0; i < 6; ++i) {
        r.cells.push_back({static_cast<double>(i / 3), static_cast<double>(i % 3),
                           i == 4 ? lf::CellClass::violation : lf::CellClass::admissible});
    }
    const auto raster = svg_raster(r);
    CHECK(raster.find("</svg>") != std::string::npos);
}
