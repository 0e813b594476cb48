#include "dhc/io/series_io.hpp"

#include "dhc/common/error.hpp"

#include <fmt/core.h>

#include <charconv>
#include <cmath>
#include <map>
#include <set>

namespace dhc::io {

cia::DemandSeries parse_demand_csv(const CsvDocument& doc, const net::Network& net) {
    doc.require_header({"timestamp", "node_id", "p_kw"});
    if (doc.rows.empty()) {
        throw InputError(fmt::format("{}: no demand rows", doc.source));
    }
    const auto n = static_cast<Eigen::Index>(net.branch_count());
    std::map<Timestamp, std::map<int, double>> by_time;
    std::map<Timestamp, const CsvRow*> first_row;
    for (const auto& row : doc.rows) {
        const auto t = doc.timestamp(row, 0);
        const auto id = doc.integer(row, 1);
        const double kw = doc.number(row, 2);
        if (!std::isfinite(kw)) {
            doc.fail(row, 2, "demand must be finite");
        }
        std::size_t bus = 0;
        try {
            bus = net.bus_index(static_cast<int>(id));
        } catch (const NetworkError&) {
            doc.fail(row, 1, fmt::format("node {} is not in network '{}'", id, net.name()));
        }
        if (bus == 0) {
            doc.fail(row, 1, fmt::format("node {} is the substation and cannot carry demand", id));
        }
        if (!by_time[t].emplace(static_cast<int>(id), kw).second) {
            doc.fail(row, 1, fmt::format("node {} appears twice at {}", id, format_rfc3339(t)));
        }
        first_row.emplace(t, &row);
    }
    std::set<int> nodes;
    for (const auto& [id, kw] : by_time.begin()->second) nodes.insert(id);
    std::vector<Timestamp> stamps;
    Eigen::MatrixXd p_kw = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(by_time.size()), n);
    Eigen::Index r = 0;
    for (const auto& [t, values] : by_time) {
        if (values.size() != nodes.size() ||
            !std::all_of(values.begin(), values.end(), [&](const auto& kv) { return nodes.count(kv.first) > 0; })) {
            doc.fail(*first_row[t], 0,
                     fmt::format("timestamp {} lists {} nodes; every timestamp must list the same {} nodes",
                                 format_rfc3339(t), values.size(), nodes.size()));
        }
        for (const auto& [id, kw] : values) {
            p_kw(r, static_cast<Eigen::Index>(net.bus_index(id) - 1)) = kw;
        }
        stamps.push_back(t);
        ++r;
    }
    try {
        cia::uniform_step_seconds(stamps);
    } catch (const InputError& e) {
        throw InputError(fmt::format("{}: {}", doc.source, e.what()));
    }
    return cia::demand_from_kw(net, std::move(stamps), p_kw);
}

cia::DemandSeries read_demand_csv(const std::filesystem::path& path, const net::Network& net) {
    return parse_demand_csv(read_csv(path), net);
}

std::string demand_csv(const cia::DemandSeries& demand, const net::Network& net) {
    CsvWriter w("demand/1", {"timestamp", "node_id", "p_kw"});
    for (std::size_t t = 0; t < demand.steps(); ++t) {
        for (std::size_t k = 0; k < net.branch_count(); ++k) {
            const double kw = demand.p_pu(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(k)) * 1000.0 *
                              net.s_base_mva();
            // strip the per-unit round trip noise
            w.field(demand.timestamps[t]).field(net.bus_id(k + 1)).field(std::round(kw * 1e6) / 1e6);
            w.end_row();
        }
    }
    return w.str();
}

econ::TimeSeries parse_series_csv(const CsvDocument& doc, std::string_view value_column) {
    doc.require_header({"timestamp", std::string(value_column)});
    if (doc.rows.empty()) {
        throw InputError(fmt::format("{}: no data rows", doc.source));
    }
    econ::TimeSeries s;
    for (const auto& row : doc.rows) {
        const auto t = doc.timestamp(row, 0);
        if (!s.timestamps.empty() && t <= s.timestamps.back()) {
            doc.fail(row, 0, "timestamps must be strictly increasing");
        }
        s.timestamps.push_back(t);
        s.values.push_back(doc.number(row, 1));
    }
    return s;
}

econ::TimeSeries read_series_csv(const std::filesystem::path& path, std::string_view value_column) {
    return parse_series_csv(read_csv(path), value_column);
}

std::string series_csv(const econ::TimeSeries& s, std::string_view schema, std::string_view value_column) {
    CsvWriter w(schema, {"timestamp", std::string(value_column)});
    for (std::size_t t = 0; t < s.size(); ++t) {
        w.field(s.timestamps[t]).field(s.values[t]);
        w.end_row();
    }
    return w.str();
}

namespace {

constexpr std::string_view kDhcSchema = "dhc-series/1";

}  // namespace

std::string dhc_csv(const cia::DhcSeries& series) {
    CsvWriter w(fmt::format("{} step_s={} daytime={}", kDhcSchema, series.step_seconds,
                            format_daytime_window(series.daytime)),
                {"timestamp", "node_id", "pg_minus_mw", "pg_plus_mw", "scenario", "variant", "status"});
    for (const auto& step : series.steps) {
        for (std::size_t g = 0; g < series.bus_ids.size(); ++g) {
            w.field(step.timestamp).field(series.bus_ids[g]);
            if (step.status == cia::StepStatus::solved) {
                w.field(step.box->p_minus_mw(static_cast<Eigen::Index>(g)));
                w.field(step.box->p_plus_mw(static_cast<Eigen::Index>(g)));
            } else {
                w.empty().empty();
            }
            w.field(series.scenario).field(cia::to_string(series.variant)).field(cia::to_string(step.status));
            w.end_row();
        }
    }
    return w.str();
}

cia::DhcSeries parse_dhc_csv(const CsvDocument& doc) {
    doc.require_header({"timestamp", "node_id", "pg_minus_mw", "pg_plus_mw", "scenario", "variant", "status"});
    cia::DhcSeries s;
    {
        // "dhc-series/1 step_s=300 daytime=06:00-20:00"
        std::string_view schema = doc.schema;
        if (schema.substr(0, kDhcSchema.size()) != kDhcSchema) {
            throw InputError(fmt::format("{}: schema '{}' is not {}", doc.source, doc.schema, kDhcSchema));
        }
        std::size_t pos = 0;
        while (pos < schema.size()) {
            const auto end = std::min(schema.find(' ', pos), schema.size());
            const auto tok = schema.substr(pos, end - pos);
            if (tok.substr(0, 7) == "step_s=") {
                const auto v = tok.substr(7);
                std::from_chars(v.data(), v.data() + v.size(), s.step_seconds);
            } else if (tok.substr(0, 8) == "daytime=") {
                s.daytime = parse_daytime_window(tok.substr(8));
            }
            pos = end + 1;
        }
    }
    if (doc.rows.empty()) {
        throw InputError(fmt::format("{}: no rows", doc.source));
    }
    std::vector<double> lo, hi;
    auto flush = [&](cia::DhcStep& step) {
        if (step.status == cia::StepStatus::solved) {
            cia::Hyperrectangle box;
            box.bus_ids = s.bus_ids;
            box.p_minus_mw = Eigen::Map<Eigen::VectorXd>(lo.data(), static_cast<Eigen::Index>(lo.size()));
            box.p_plus_mw = Eigen::Map<Eigen::VectorXd>(hi.data(), static_cast<Eigen::Index>(hi.size()));
            box.scenario = s.scenario;
            box.variant = s.variant;
            step.box = std::move(box);
        }
        s.steps.push_back(std::move(step));
        lo.clear();
        hi.clear();
    };
    cia::DhcStep current;
    std::vector<int> ids;
    bool first_step = true;
    for (std::size_t r = 0; r < doc.rows.size(); ++r) {
        const auto& row = doc.rows[r];
        const auto t = doc.timestamp(row, 0);
        const auto status = [&] {
            try {
                return cia::step_status_from_string(doc.text(row, 6));
            } catch (const InputError& e) {
                doc.fail(row, 6, e.what());
            }
        }();
        if (r == 0) {
            s.scenario = doc.text(row, 4);
            try {
                s.variant = cia::bound_variant_from_string(doc.text(row, 5));
            } catch (const Error& e) {
                doc.fail(row, 5, e.what());
            }
            current.timestamp = t;
            current.status = status;
        } else if (t != current.timestamp) {
            if (t < current.timestamp) {
                doc.fail(row, 0, "timestamps must be nondecreasing");
            }
            if (first_step) {
                s.bus_ids = ids;
                first_step = false;
            } else if (ids != s.bus_ids) {
                doc.fail(row, 0, "every step must list the same nodes in the same order");
            }
            flush(current);
            ids.clear();
            current = cia::DhcStep{};
            current.timestamp = t;
            current.status = status;
        }
        if (doc.text(row, 4) != s.scenario || doc.text(row, 5) != cia::to_string(s.variant)) {
            doc.fail(row, 4, "scenario and variant must be the same on every row");
        }
        if (status != current.status) {
            doc.fail(row, 6, "status must be the same for every node of a step");
        }
        ids.push_back(static_cast<int>(doc.integer(row, 1)));
        if (status == cia::StepStatus::solved) {
            lo.push_back(doc.number(row, 2));
            hi.push_back(doc.number(row, 3));
        } else if (!doc.text(row, 2).empty() || !doc.text(row, 3).empty()) {
            doc.fail(row, 2, "bounds must be empty for steps that are not solved");
        }
    }
    if (first_step) {
        s.bus_ids = ids;
    } else if (ids != s.bus_ids) {
        doc.fail(doc.rows.back(), 0, "every step must list the same nodes in the same order");
    }
    flush(current);
    return s;
}

cia::DhcSeries read_dhc_csv(const std::filesystem::path& path) { return parse_dhc_csv(read_csv(path)); }

std::string temporal_jfi_csv(const fair::FairnessReport& r) {
    CsvWriter w("temporal-jfi/1", {"node_id", "temporal_jfi"});
    for (std::size_t j = 0; j < r.bus_ids.size(); ++j) {
        w.field(r.bus_ids[j]).field(r.temporal_jfi(static_cast<Eigen::Index>(j)));
        w.end_row();
    }
    return w.str();
}

std::string spatial_jfi_csv(const fair::FairnessReport& r) {
    CsvWriter w("spatial-jfi/1", {"timestamp", "spatial_jfi"});
    for (std::size_t t = 0; t < r.timestamps.size(); ++t) {
        w.field(r.timestamps[t]).field(r.spatial_jfi(static_cast<Eigen::Index>(t)));
        w.end_row();
    }
    return w.str();
}

std::string rho_csv(const fair::FairnessReport& r) {
    CsvWriter w("hc-demand-ratio/1", {"timestamp", "node_id", "rho"});
    for (std::size_t t = 0; t < r.timestamps.size(); ++t) {
        for (std::size_t j = 0; j < r.bus_ids.size(); ++j) {
            w.field(r.timestamps[t]).field(r.bus_ids[j]).field(r.rho(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)));
            w.end_row();
        }
    }
    return w.str();
}

std::string economics_csv(const econ::EconomicsReport& r) {
    CsvWriter w("economics/1", {"dc", "e_base_mwh", "e_new_mwh", "e_curt_mwh", "e_add_mwh", "e_add_common_mwh",
                                "e_add_pct", "e_curt_pct", "e_add_pct_common", "e_curt_pct_common", "a_co2_t",
                                "c_rev_usd", "c_curt_usd", "np_usd"});
    const double base = r.curves.e_base_mwh.sum();
    for (std::size_t k = 0; k < r.points.size(); ++k) {
        const auto& c = r.curves.points.at(k);
        const auto& e = r.points[k];
        w.field(e.dc).field(base).field(c.e_new_total).field(c.e_curt_total).field(c.e_add_total);
        w.field(c.e_add_common).field(c.e_add_pct).field(c.e_curt_pct).field(c.e_add_pct_common);
        w.field(c.e_curt_pct_common).field(e.a_co2_total_t).field(e.c_rev).field(e.c_curt).field(e.np);
        w.end_row();
    }
    return w.str();
}

std::string economics_nodes_csv(const econ::EconomicsReport& r) {
    CsvWriter w("economics-nodes/1", {"dc", "node_id", "e_base_mwh", "e_new_mwh", "e_curt_mwh", "e_add_mwh",
                                      "e_add_limit_mwh", "a_co2_t"});
    for (std::size_t k = 0; k < r.points.size(); ++k) {
        const auto& c = r.curves.points.at(k);
        for (std::size_t i = 0; i < r.curves.bus_ids.size(); ++i) {
            const auto ii = static_cast<Eigen::Index>(i);
            w.field(c.dc).field(r.curves.bus_ids[i]).field(r.curves.e_base_mwh(ii)).field(c.e_new_mwh(ii));
            w.field(c.e_curt_mwh(ii)).field(c.e_add_mwh(ii)).field(r.curves.asymptote_mwh(ii));
            w.field(r.points[k].a_co2_t(ii));
            w.end_row();
        }
    }
    return w.str();
}

}  // namespace dhc::io
