#include "dhc/economics/pv_economics.hpp"

#include "dhc/common/error.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace dhc::econ {

StaticLimits static_limits(const cia::DhcSeries& dhc, const std::vector<int>& nodes) {
    std::vector<std::size_t> cols;
    StaticLimits out;
    if (nodes.empty()) {
        out.bus_ids = dhc.bus_ids;
        for (std::size_t g = 0; g < dhc.bus_ids.size(); ++g) {
            cols.push_back(g);
        }
    } else {
        for (int id : nodes) {
            const auto it = std::find(dhc.bus_ids.begin(), dhc.bus_ids.end(), id);
            if (it == dhc.bus_ids.end()) {
                throw InputError(fmt::format("node {} is not part of the DHC series", id));
            }
            cols.push_back(static_cast<std::size_t>(it - dhc.bus_ids.begin()));
            out.bus_ids.push_back(id);
        }
    }
    const auto G = static_cast<Eigen::Index>(cols.size());
    out.l_pv_mw = Eigen::VectorXd::Constant(G, std::numeric_limits<double>::infinity());
    for (const auto& step : dhc.steps) {
        if (step.status == cia::StepStatus::night) {
            continue;
        }
        if (step.status == cia::StepStatus::failed) {
            ++out.failed_steps;
            out.l_pv_mw.setZero();
            continue;
        }
        ++out.solved_steps;
        for (Eigen::Index j = 0; j < G; ++j) {
            out.l_pv_mw(j) = std::min(out.l_pv_mw(j), step.box->p_plus_mw(static_cast<Eigen::Index>(cols[static_cast<std::size_t>(j)])));
        }
    }
    if (out.solved_steps + out.failed_steps == 0) {
        throw InputError("the DHC series has no daytime steps");
    }
    for (Eigen::Index j = 0; j < G; ++j) {
        if (out.l_pv_mw(j) <= 0.0) {
            out.l_pv_mw(j) = 0.0;
            out.zero_bus_ids.push_back(out.bus_ids[static_cast<std::size_t>(j)]);
        }
    }
    return out;
}

Alignment align_pv(const cia::DhcSeries& dhc, const TimeSeries& pv) {
    if (dhc.steps.empty()) {
        throw InputError("the DHC series is empty");
    }
    if (pv.values.size() != pv.timestamps.size()) {
        throw InputError("PV series has mismatched timestamps and values");
    }
    const auto pv_step = cia::uniform_step_seconds(pv.timestamps);
    if (dhc.steps.size() > 1 && pv.size() > 1 && pv_step != dhc.step_seconds) {
        throw InputError(fmt::format("PV step is {} s but the DHC step is {} s", pv_step, dhc.step_seconds));
    }
    const auto step_s = dhc.steps.size() > 1 ? dhc.step_seconds : pv_step;
    if (step_s <= 0) {
        throw InputError("cannot infer the time step from a single-sample series");
    }

    const bool by_time_of_day = (dhc.steps.back().timestamp - dhc.steps.front().timestamp).count() < 86400;
    std::unordered_map<std::int64_t, int> index;
    for (std::size_t k = 0; k < dhc.steps.size(); ++k) {
        const auto& ts = dhc.steps[k].timestamp;
        const auto key = by_time_of_day ? seconds_of_day(ts) : ts.time_since_epoch().count();
        index.emplace(key, static_cast<int>(k));
    }

    Alignment a;
    a.bus_ids = dhc.bus_ids;
    a.timestamps = pv.timestamps;
    a.dt_hours = static_cast<double>(step_s) / 3600.0;
    a.pv_kw = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(pv.size()));
    a.dhc_step.assign(pv.size(), -1);
    const auto G = static_cast<Eigen::Index>(dhc.bus_ids.size());
    a.hc_mw = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dhc.steps.size()), G);
    for (std::size_t k = 0; k < dhc.steps.size(); ++k) {
        if (dhc.steps[k].status == cia::StepStatus::solved) {
            a.hc_mw.row(static_cast<Eigen::Index>(k)) = dhc.steps[k].box->p_plus_mw.transpose();
        }
    }

    for (std::size_t t = 0; t < pv.size(); ++t) {
        const double v = pv.values[t];
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw InputError(fmt::format("PV value at {} is {}; expected a nonnegative number",
                                         format_rfc3339(pv.timestamps[t]), v));
        }
        const auto& ts = pv.timestamps[t];
        const bool day = dhc.daytime.contains(ts);
        const auto key = by_time_of_day ? seconds_of_day(ts) : ts.time_since_epoch().count();
        const auto it = index.find(key);
        if (day && it == index.end()) {
            throw InputError(fmt::format("PV step {} has no DHC step at the same {}", format_rfc3339(ts),
                                         by_time_of_day ? "time of day" : "timestamp"));
        }
        if (!day || dhc.steps[static_cast<std::size_t>(it->second)].status == cia::StepStatus::night) {
            if (v > 0.0) {
                ++a.excluded_pv_steps;
                a.excluded_pv_kwh += v * a.dt_hours;
            }
            continue;
        }
        a.dhc_step[t] = it->second;
        a.pv_kw(static_cast<Eigen::Index>(t)) = v;
    }
    return a;
}

BaseProfile base_profile(const StaticLimits& limits, const Alignment& aligned) {
    if (limits.bus_ids != aligned.bus_ids) {
        throw InputError("static limits and the aligned DHC series cover different nodes");
    }
    BaseProfile b;
    b.bus_ids = limits.bus_ids;
    b.l_pv_mw = limits.l_pv_mw;
    b.pv_peak_kw = aligned.pv_kw.size() > 0 ? aligned.pv_kw.maxCoeff() : 0.0;
    if (!(b.pv_peak_kw > 0.0)) {
        throw InputError("the PV shape is zero over every daytime step");
    }
    b.p_base_mw = (aligned.pv_kw / b.pv_peak_kw) * limits.l_pv_mw.transpose();
    b.e_base_mwh = aligned.dt_hours * b.p_base_mw.colwise().sum().transpose();
    return b;
}

double common_base(const std::vector<BaseProfile>& bases) {
    if (bases.empty()) {
        throw InputError("common base needs at least one scenario");
    }
    double m = std::numeric_limits<double>::infinity();
    for (const auto& b : bases) {
        m = std::min(m, b.e_base_total_mwh());
    }
    return m;
}

namespace {

void check_grid(const std::vector<double>& dc_grid) {
    if (dc_grid.empty()) {
        throw InputError("the capacity-increase grid is empty");
    }
    for (std::size_t k = 0; k < dc_grid.size(); ++k) {
        if (!(dc_grid[k] >= 0.0) || !std::isfinite(dc_grid[k])) {
            throw InputError(fmt::format("capacity increase {} is not a nonnegative number", dc_grid[k]));
        }
        if (k > 0 && dc_grid[k] <= dc_grid[k - 1]) {
            throw InputError("the capacity-increase grid must be strictly increasing");
        }
    }
}

double percent(double part, double whole) { return whole > 0.0 ? 100.0 * part / whole : 0.0; }

}  // namespace

CurtailmentCurves curtailment_curves(const Alignment& aligned, const BaseProfile& base, const std::vector<double>& dc_grid,
                                     double common_base_mwh, const std::string& scenario) {
    check_grid(dc_grid);
    if (base.bus_ids != aligned.bus_ids || base.p_base_mw.rows() != static_cast<Eigen::Index>(aligned.steps())) {
        throw InputError("base profile and aligned DHC series disagree");
    }
    const auto G = static_cast<Eigen::Index>(base.bus_ids.size());
    const double dt = aligned.dt_hours;

    CurtailmentCurves c;
    c.scenario = scenario;
    c.bus_ids = base.bus_ids;
    c.e_base_mwh = base.e_base_mwh;
    c.common_base_mwh = common_base_mwh;
    c.asymptote_mwh = Eigen::VectorXd::Zero(G);
    for (std::size_t t = 0; t < aligned.steps(); ++t) {
        const int k = aligned.dhc_step[t];
        if (k < 0) {
            continue;
        }
        for (Eigen::Index i = 0; i < G; ++i) {
            const double pb = base.p_base_mw(static_cast<Eigen::Index>(t), i);
            if (pb > 0.0) {
                c.asymptote_mwh(i) += dt * (aligned.hc_mw(k, i) - pb);
            }
        }
    }

    const double e_base_total = base.e_base_total_mwh();
    for (double dc : dc_grid) {
        CurvePoint p;
        p.dc = dc;
        p.e_new_mwh = Eigen::VectorXd::Zero(G);
        p.e_curt_mwh = Eigen::VectorXd::Zero(G);
        p.e_add_mwh = Eigen::VectorXd::Zero(G);
        for (std::size_t t = 0; t < aligned.steps(); ++t) {
            const int k = aligned.dhc_step[t];
            if (k < 0) {
                continue;
            }
            for (Eigen::Index i = 0; i < G; ++i) {
                const double pb = base.p_base_mw(static_cast<Eigen::Index>(t), i);
                const double hc = aligned.hc_mw(k, i);
                const double pn = (1.0 + dc) * pb;
                p.e_new_mwh(i) += dt * pn;
                p.e_curt_mwh(i) += dt * std::max(0.0, pn - hc);
                // new - curtailed - base, summed term by term so that it stays
                // monotone in dc under rounding
                p.e_add_mwh(i) += dt * std::min(dc * pb, hc - pb);
            }
        }
        p.e_new_total = p.e_new_mwh.sum();
        p.e_curt_total = p.e_curt_mwh.sum();
        p.e_add_total = p.e_add_mwh.sum();
        p.e_add_common = p.e_new_total - p.e_curt_total - common_base_mwh;
        p.e_add_pct = percent(p.e_add_total, e_base_total);
        p.e_curt_pct = percent(p.e_curt_total, e_base_total);
        p.e_add_pct_common = percent(p.e_add_common, common_base_mwh);
        p.e_curt_pct_common = percent(p.e_curt_total, common_base_mwh);
        c.points.push_back(std::move(p));
    }
    return c;
}

EconomicsReport carbon_and_profit(const Alignment& aligned, const BaseProfile& base, const CurtailmentCurves& curves,
                                  const TimeSeries& moer_g_per_kwh, const CarbonParams& params) {
    if (!(params.lambda_curt >= 0.0) || !(params.lambda_co2 >= 0.0)) {
        throw InputError("prices must be nonnegative");
    }
    if (!(params.m_pv >= 0.0)) {
        throw InputError("PV life-cycle intensity must be nonnegative");
    }
    if (moer_g_per_kwh.size() == 0 || moer_g_per_kwh.values.size() != moer_g_per_kwh.size()) {
        throw InputError("MOER series is empty or malformed");
    }
    if (curves.bus_ids != base.bus_ids || base.p_base_mw.rows() != static_cast<Eigen::Index>(aligned.steps())) {
        throw InputError("curves, base profile and aligned series disagree");
    }
    std::unordered_map<std::int64_t, double> moer;
    for (std::size_t t = 0; t < moer_g_per_kwh.size(); ++t) {
        moer.emplace(moer_g_per_kwh.timestamps[t].time_since_epoch().count(), moer_g_per_kwh.values[t]);
    }

    EconomicsReport r;
    r.scenario = curves.scenario;
    r.params = params;
    r.curves = curves;
    const auto G = static_cast<Eigen::Index>(base.bus_ids.size());
    const double dt = aligned.dt_hours;

    // per-step MOER, NaN where missing
    std::vector<double> m(aligned.steps(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t t = 0; t < aligned.steps(); ++t) {
        if (aligned.dhc_step[t] < 0) {
            continue;
        }
        const auto it = moer.find(aligned.timestamps[t].time_since_epoch().count());
        if (it != moer.end() && std::isfinite(it->second)) {
            m[t] = it->second;
        } else if (aligned.pv_kw(static_cast<Eigen::Index>(t)) > 0.0) {
            ++r.moer_gaps;
        }
    }

    for (const auto& cp : curves.points) {
        EconomicsPoint e;
        e.dc = cp.dc;
        e.a_co2_t = Eigen::VectorXd::Zero(G);
        for (std::size_t t = 0; t < aligned.steps(); ++t) {
            const int k = aligned.dhc_step[t];
            if (k < 0 || std::isnan(m[t])) {
                continue;
            }
            for (Eigen::Index i = 0; i < G; ++i) {
                const double pb = base.p_base_mw(static_cast<Eigen::Index>(t), i);
                const double added = std::min(cp.dc * pb, aligned.hc_mw(k, i) - pb);
                e.a_co2_t(i) += avoided_tonnes(added, dt, m[t], params.m_pv);
            }
        }
        e.a_co2_total_t = e.a_co2_t.sum();
        e.c_rev = params.lambda_co2 * e.a_co2_total_t;
        e.c_curt = params.lambda_curt * 1000.0 * cp.e_curt_total;
        e.np = e.c_rev - e.c_curt;
        r.points.push_back(std::move(e));
    }
    for (std::size_t k = 1; k < r.points.size(); ++k) {
        if (r.points[k].np > r.points[r.best_index].np) {
            r.best_index = k;
        }
    }
    return r;
}

std::vector<double> default_dc_grid() {
    std::vector<double> g;
    for (int k = 0; k <= 20; ++k) {
        g.push_back(k / 20.0);
    }
    return g;
}

}  // namespace dhc::econ
